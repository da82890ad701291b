//! The affine Kac-Moody algebra `g((t)) + C1` with cocycle
//! `-kappa(x, y) Res f dg`, PBW straightening, and the induced modules `U_{x,r}`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::lie::SimpleLieAlgebra;
use crate::moy_prasad::{lattice, ApartmentPoint, MPLattice};
use crate::rational::{format_q, frac, parse_q, Q};

/// `kappa = c_factor * Killing`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Level {
    pub c_factor: Q,
}

impl Level {
    pub fn new(c_factor: Q) -> Self {
        Level { c_factor }
    }

    pub fn critical() -> Self {
        Level { c_factor: frac(-1, 2) }
    }

    pub fn zero() -> Self {
        Level { c_factor: Q::zero() }
    }

    pub fn is_critical(&self) -> bool {
        self.c_factor == frac(-1, 2)
    }

    pub fn kappa(&self, alg: &SimpleLieAlgebra, a: usize, b: usize) -> Q {
        &self.c_factor * alg.killing(a, b)
    }
}

/// `x_b (x) t^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gen {
    pub idx: usize,
    pub n: i64,
}

impl Gen {
    pub fn new(idx: usize, n: i64) -> Self {
        Gen { idx, n }
    }
}

/// A word in generators; the empty word is the central element evaluated to 1.
pub type UMonomial = SmallVec<[Gen; 6]>;

/// Finite linear combination of words; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UElement {
    terms: BTreeMap<UMonomial, Q>,
}

impl UElement {
    pub fn zero() -> Self {
        UElement::default()
    }

    pub fn one() -> Self {
        Self::monomial(UMonomial::new(), Q::one())
    }

    pub fn monomial(m: UMonomial, c: Q) -> Self {
        let mut out = UElement::zero();
        out.add_term(m, c);
        out
    }

    pub fn generator(g: Gen) -> Self {
        Self::monomial(SmallVec::from_slice(&[g]), Q::one())
    }

    pub fn from_gens(gens: &[Gen]) -> Self {
        Self::monomial(SmallVec::from_slice(gens), Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&UMonomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &[Gen]) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, m: UMonomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return UElement::zero();
        }
        UElement { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    /// Product by concatenation of words.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = UElement::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut m = a.clone();
                m.extend_from_slice(b);
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

/// `[x_m, y_n] = [x, y]_{m+n} - kappa(x, y) n delta_{m+n,0}`.
pub fn km_bracket(alg: &SimpleLieAlgebra, lvl: &Level, a: Gen, b: Gen) -> UElement {
    let mut out = UElement::zero();
    for (c, coef) in alg.structure(a.idx, b.idx) {
        out.add_term(SmallVec::from_slice(&[Gen::new(*c, a.n + b.n)]), coef.clone());
    }
    if a.n + b.n == 0 && b.n != 0 {
        let k = lvl.kappa(alg, a.idx, b.idx);
        out.add_term(UMonomial::new(), -k * Q::from_integer(b.n.into()));
    }
    out
}

/// Straightens words until no adjacent pair is out of `key` order, discarding any
/// word whose rightmost generator satisfies `kill`.
pub fn straighten<K: Ord>(
    alg: &SimpleLieAlgebra,
    lvl: &Level,
    u: &UElement,
    key: impl Fn(&Gen) -> K,
    kill: impl Fn(&Gen) -> bool,
) -> UElement {
    let mut pending: BTreeMap<UMonomial, Q> = BTreeMap::new();
    let push = |pending: &mut BTreeMap<UMonomial, Q>, m: UMonomial, c: Q| {
        let slot = pending.entry(m).or_insert_with(Q::zero);
        *slot += c;
    };
    for (m, c) in u.terms() {
        push(&mut pending, m.clone(), c.clone());
    }
    let mut out = UElement::zero();
    while let Some((m, c)) = pending.pop_last() {
        if c.is_zero() || m.last().is_some_and(&kill) {
            continue;
        }
        let descent = (0..m.len().saturating_sub(1)).find(|&i| key(&m[i]) > key(&m[i + 1]));
        let Some(i) = descent else {
            out.add_term(m, c);
            continue;
        };
        let (a, b) = (m[i], m[i + 1]);
        let mut swapped = m.clone();
        swapped.swap(i, i + 1);
        push(&mut pending, swapped, c.clone());
        for (word, coef) in km_bracket(alg, lvl, a, b).terms {
            let mut w: UMonomial = SmallVec::with_capacity(m.len() - 1);
            w.extend_from_slice(&m[..i]);
            w.extend_from_slice(&word);
            w.extend_from_slice(&m[i + 2..]);
            push(&mut pending, w, &c * coef);
        }
    }
    out
}

/// PBW normal form for the order `(n, index)`: larger modes to the right.
pub fn normal_order(alg: &SimpleLieAlgebra, lvl: &Level, u: &UElement) -> UElement {
    straighten(alg, lvl, u, |g| (g.n, g.idx), |_| false)
}

pub fn is_normal(u: &UElement) -> bool {
    u.terms().all(|(m, _)| m.windows(2).all(|w| (w[0].n, w[0].idx) <= (w[1].n, w[1].idx)))
}

/// `U_{x,r}`, induced from the trivial character of `g_{x,r+} + C1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedModuleSpec {
    pub x: ApartmentPoint,
    pub r: Q,
    pub level: Level,
    pub annihilator: MPLattice,
}

impl InducedModuleSpec {
    pub fn annihilates(&self, g: &Gen) -> bool {
        g.n >= self.annihilator.powers[g.idx]
    }

    /// `r_a`: the generator `x^a_n` kills the generating vector iff `n >= r_a`.
    pub fn power(&self, idx: usize) -> i64 {
        self.annihilator.powers[idx]
    }

    pub fn max_power(&self) -> i64 {
        self.annihilator.powers.iter().copied().max().unwrap_or(0)
    }

    /// `x_p w = 0` for every `p` at or above this mode.
    pub fn kill_bound(&self, w: &UElement) -> Option<i64> {
        let base = self.max_power().max(1);
        w.terms()
            .map(|(m, _)| base + m.iter().filter(|g| g.n < 0).map(|g| -g.n).sum::<i64>())
            .max()
    }

    pub fn is_module_vector(&self, w: &UElement) -> bool {
        w.terms().all(|(m, _)| {
            m.iter().all(|g| !self.annihilates(g)) && m.windows(2).all(|p| (p[0].n, p[0].idx) <= (p[1].n, p[1].idx))
        })
    }
}

pub fn induced_module(alg: &SimpleLieAlgebra, x: &ApartmentPoint, r: &Q, lvl: &Level) -> Result<InducedModuleSpec> {
    let annihilator = lattice(alg, x, r, true)?;
    if !cocycle_vanishes_on(alg, &annihilator) {
        return Err(Error::BoundViolation("central extension does not split over the annihilator".into()));
    }
    if let Some((a, b)) = power_hypothesis_failure(alg, &annihilator) {
        return Err(Error::BoundViolation(format!(
            "powers of {} and {} violate r_a + r_b >= r_(a+b)",
            alg.label(a),
            alg.label(b)
        )));
    }
    Ok(InducedModuleSpec { x: x.clone(), r: r.clone(), level: lvl.clone(), annihilator })
}

/// Exact check that `Res t^i d(t^j)` vanishes for all `i >= m_a`, `j >= m_b`
/// on Killing-paired weights.
pub fn cocycle_vanishes_on(alg: &SimpleLieAlgebra, l: &MPLattice) -> bool {
    (0..alg.dim()).all(|a| {
        (0..alg.dim()).all(|b| {
            if alg.killing(a, b).is_zero() {
                return true;
            }
            let (ma, mb) = (l.powers[a], l.powers[b]);
            // some j != 0 with mb <= j <= -ma
            !(mb <= -ma && !(mb == 0 && ma == 0))
        })
    })
}

/// First pair of basis elements whose weights violate `r_a + r_b >= r_{a+b}`.
pub fn power_hypothesis_failure(alg: &SimpleLieAlgebra, l: &MPLattice) -> Option<(usize, usize)> {
    for a in 0..alg.dim() {
        for b in 0..alg.dim() {
            let sum: Vec<i64> = alg.weight(a).iter().zip(alg.weight(b)).map(|(x, y)| x + y).collect();
            let is_weight = sum.iter().all(|&m| m == 0) || (0..alg.dim()).any(|c| alg.weight(c) == sum.as_slice());
            if is_weight && l.powers[a] + l.powers[b] < l.power_of(&sum) {
                return Some((a, b));
            }
        }
    }
    None
}

/// `u . w` in `U_{x,r}`: concatenate, straighten creation generators left, and
/// drop words ending in an annihilator.
pub fn act(alg: &SimpleLieAlgebra, spec: &InducedModuleSpec, u: &UElement, w: &UElement) -> UElement {
    straighten(
        alg,
        &spec.level,
        &u.mul(w),
        |g| (spec.annihilates(g), g.n, g.idx),
        |g| spec.annihilates(g),
    )
}

/// The generating vector `v`.
pub fn vacuum() -> UElement {
    UElement::one()
}

/// Wire form `[["coef", [["e", 1], ["f", -1]]], ...]`.
pub type UElementJson = Vec<(String, Vec<(String, i64)>)>;

pub fn uelement_to_json(alg: &SimpleLieAlgebra, u: &UElement) -> UElementJson {
    u.terms()
        .map(|(m, c)| (format_q(c), m.iter().map(|g| (alg.label(g.idx).to_string(), g.n)).collect()))
        .collect()
}

pub fn uelement_from_json(alg: &SimpleLieAlgebra, json: &UElementJson) -> Result<UElement> {
    let mut out = UElement::zero();
    for (c, gens) in json {
        let mut m = UMonomial::new();
        for (label, n) in gens {
            let idx = alg
                .index_of(label)
                .ok_or_else(|| Error::Schema(format!("unknown basis label {label:?}")))?;
            m.push(Gen::new(idx, *n));
        }
        out.add_term(m, parse_q(c)?);
    }
    Ok(out)
}
