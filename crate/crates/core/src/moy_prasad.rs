//! Points of the standard apartment, Moy-Prasad lattices
//! `g_{x,r} = sum_a u_a(t^{m_a})`, their jumps, and stratum containment.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{Connection, LoopElement};
use crate::lie::{LieElement, SimpleLieAlgebra};
use crate::rational::{ceil_i64, floor_i64, format_q, Q};
use crate::series::LaurentScalar;

/// A point `x` of the apartment, recorded through `alpha_i(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ApartmentPoint {
    pub values: Vec<Q>,
}

impl ApartmentPoint {
    pub fn new(values: Vec<Q>) -> Self {
        ApartmentPoint { values }
    }

    pub fn origin(rank: usize) -> Self {
        ApartmentPoint { values: vec![Q::zero(); rank] }
    }

    /// The point with every `alpha_i(x) = 1/h`.
    pub fn barycentre(alg: &SimpleLieAlgebra) -> Self {
        let h = Q::from_integer(i64::from(alg.coxeter_number()).into());
        ApartmentPoint { values: vec![Q::one() / h; alg.rank()] }
    }

    /// `alpha(x)` for a weight written in simple-root coordinates.
    pub fn eval(&self, weight: &[i64]) -> Q {
        weight
            .iter()
            .zip(&self.values)
            .filter(|(m, _)| **m != 0)
            .fold(Q::zero(), |acc, (m, v)| acc + v * Q::from_integer((*m).into()))
    }

    /// `x` as an element of the Cartan subalgebra.
    pub fn to_cartan(&self, alg: &SimpleLieAlgebra) -> LieElement {
        let mut x = LieElement::zero(alg.dim());
        for (v, w) in self.values.iter().zip(alg.fundamental_coweights()) {
            x.add_scaled(w, v);
        }
        x
    }

    fn check(&self, alg: &SimpleLieAlgebra) -> Result<()> {
        if self.values.len() != alg.rank() {
            return Err(Error::DimensionMismatch { expected: alg.rank(), found: self.values.len() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPLattice {
    pub x: ApartmentPoint,
    pub r: Q,
    pub plus: bool,
    /// `m_a` per basis element, indexed like the basis.
    pub powers: Vec<i64>,
}

pub fn power(alpha_x: &Q, r: &Q, plus: bool) -> i64 {
    if plus {
        1 - ceil_i64(&(alpha_x - r))
    } else {
        ceil_i64(&(r - alpha_x))
    }
}

pub fn lattice(alg: &SimpleLieAlgebra, x: &ApartmentPoint, r: &Q, plus: bool) -> Result<MPLattice> {
    x.check(alg)?;
    if *r < Q::zero() {
        return Err(Error::BoundViolation(format!("depth {} is negative", format_q(r))));
    }
    let powers = (0..alg.dim()).map(|b| power(&x.eval(alg.weight(b)), r, plus)).collect();
    Ok(MPLattice { x: x.clone(), r: r.clone(), plus, powers })
}

impl MPLattice {
    /// `m` for a weight in simple-root coordinates.
    pub fn power_of(&self, weight: &[i64]) -> i64 {
        power(&self.x.eval(weight), &self.r, self.plus)
    }

    pub fn contains(&self, other: &MPLattice) -> bool {
        self.powers.iter().zip(&other.powers).all(|(a, b)| a <= b)
    }
}

pub fn member(z: &LoopElement, l: &MPLattice) -> Result<bool> {
    if z.ramification() != 1 {
        return Err(Error::RamificationMismatch(1, z.ramification()));
    }
    if z.dim() != l.powers.len() {
        return Err(Error::DimensionMismatch { expected: l.powers.len(), found: z.dim() });
    }
    let mut uncertified = None;
    for (s, &m) in z.components().iter().zip(&l.powers) {
        match s.valuation() {
            Some(v) if v < m => return Ok(false),
            Some(_) => {}
            None => {
                if let Some(n) = s.precision() {
                    if n < m {
                        uncertified = Some(Error::PrecisionExhausted { exponent: m - 1, precision: n });
                    }
                }
            }
        }
    }
    match uncertified {
        Some(e) => Err(e),
        None => Ok(true),
    }
}

/// `{alpha(x) + n} ∩ [lo, hi]`, sorted.
pub fn jumps(alg: &SimpleLieAlgebra, x: &ApartmentPoint, lo: &Q, hi: &Q) -> Result<Vec<Q>> {
    x.check(alg)?;
    if *lo < Q::zero() || lo > hi {
        return Err(Error::BoundViolation(format!("bad interval [{}, {}]", format_q(lo), format_q(hi))));
    }
    let values: BTreeSet<Q> = (0..alg.dim()).map(|b| x.eval(alg.weight(b))).collect();
    let mut out = BTreeSet::new();
    for a in values {
        for n in ceil_i64(&(lo - &a))..=floor_i64(&(hi - &a)) {
            out.insert(&a + Q::from_integer(n.into()));
        }
    }
    Ok(out.into_iter().collect())
}

/// Outcome of sampling the Kac-Moody cocycle on a lattice.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitReport {
    pub trials: usize,
    pub accepted: usize,
    pub rejected: usize,
    /// `(label, exponent, label, exponent)` pairs with nonzero cocycle value.
    pub failures: Vec<(String, i64, String, i64)>,
}

impl SplitReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `killing(a, b) Res f dg` for `a (x) f`, `b (x) g`.
pub fn cocycle(alg: &SimpleLieAlgebra, a: usize, f: &LaurentScalar, b: usize, g: &LaurentScalar) -> Result<Q> {
    let k = alg.killing(a, b);
    if k.is_zero() {
        return Ok(Q::zero());
    }
    Ok(k * f.checked_mul(&g.derivative())?.coeff(-1)?)
}

/// Draws monomial pairs of opposite weights with exponents in `-4..=4`, keeps those
/// lying in `lattice(x, 0, plus)`, and evaluates the cocycle on each.
pub fn cocycle_split_check(
    alg: &SimpleLieAlgebra,
    x: &ApartmentPoint,
    plus: bool,
    trials: usize,
    seed: u64,
) -> Result<SplitReport> {
    let l = lattice(alg, x, &Q::zero(), plus)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SplitReport { trials, ..SplitReport::default() };
    for _ in 0..trials {
        let a = rng.gen_range(0..alg.dim());
        let partners: Vec<usize> = (0..alg.dim()).filter(|&b| !alg.killing(a, b).is_zero()).collect();
        let b = partners[rng.gen_range(0..partners.len())];
        let (i, j) = (rng.gen_range(-4..=4), rng.gen_range(-4..=4));
        if i < l.powers[a] || j < l.powers[b] {
            report.rejected += 1;
            continue;
        }
        report.accepted += 1;
        let ci = Q::from_integer(rng.gen_range(1..=5).into());
        let cj = Q::from_integer(rng.gen_range(1..=5).into());
        let f = LaurentScalar::monomial(ci, i, 1);
        let g = LaurentScalar::monomial(cj, j, 1);
        if !cocycle(alg, a, &f, b, &g)?.is_zero() {
            report.failures.push((alg.label(a).to_string(), i, alg.label(b).to_string(), j));
        }
    }
    Ok(report)
}

/// Containment verdict with the class `beta` of `A - x/t` in the dual graded piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumReport {
    pub contains: bool,
    pub beta: Option<LoopElement>,
}

/// The residue pairing identifies the annihilator of `lattice(x, r, plus)` with
/// `{D : val D_b >= -m_{-b}}`; containment asks that `A - x/t` lie there.
pub fn contains_stratum(alg: &SimpleLieAlgebra, c: &Connection, x: &ApartmentPoint, r: &Q) -> Result<StratumReport> {
    if c.ramification() != 1 {
        return Err(Error::RamificationMismatch(1, c.ramification()));
    }
    let plus = lattice(alg, x, r, true)?;
    let flat = lattice(alg, x, r, false)?;
    let xt = LoopElement::tensor(&x.to_cartan(alg), &LaurentScalar::monomial(Q::one(), -1, 1));
    let d = c.a.checked_sub(&xt)?;
    let neg = |b: usize| -> Vec<i64> { alg.weight(b).iter().map(|m| -m).collect() };

    let mut uncertified = None;
    for (b, s) in d.components().iter().enumerate() {
        let floor = -plus.power_of(&neg(b));
        match s.valuation() {
            Some(v) if v < floor => return Ok(StratumReport { contains: false, beta: None }),
            Some(_) => {}
            None => {
                if let Some(n) = s.precision() {
                    if n < floor {
                        uncertified = Some(Error::PrecisionExhausted { exponent: floor - 1, precision: n });
                    }
                }
            }
        }
    }
    if let Some(e) = uncertified {
        return Err(e);
    }
    let mut comps = Vec::with_capacity(alg.dim());
    for (b, s) in d.components().iter().enumerate() {
        let lo = -plus.power_of(&neg(b));
        let hi = -flat.power_of(&neg(b));
        let mut terms = Vec::new();
        for k in lo..hi {
            let c = s.coeff(k)?;
            if !c.is_zero() {
                terms.push((k, c));
            }
        }
        comps.push(LaurentScalar::exact(terms, 1));
    }
    Ok(StratumReport { contains: true, beta: Some(LoopElement::from_components(comps)?) })
}
