//! Opers `d/dt + sum phi_i f_i + q` with `q` in the Borel, their
//! Drinfeld-Sokolov canonical form `d/dt + p_{-1} + sum v_j p_j`, and slopes.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{
    gauge_apply, order_and_polar, ramify_connection, Connection, GaugeFactor, GaugeWord, LoopElement, Singularity,
};
use crate::lie::{LieElement, SimpleLieAlgebra};
use crate::linalg::{self, Matrix};
use crate::rational::{ceil_i64, Q};
use crate::series::{LaurentScalar, SeriesJson};

/// `v_j` multiplies the `j`-th slice generator `p_j` of degree `d_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperCanonical {
    pub v: Vec<LaurentScalar>,
}

/// `phi_i` multiplies `f_i`; `q` lives in non-negative principal degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperGeneral {
    pub phi: Vec<LaurentScalar>,
    pub q: LoopElement,
}

impl OperCanonical {
    pub fn new(alg: &SimpleLieAlgebra, v: Vec<LaurentScalar>) -> Result<Self> {
        if v.len() != alg.rank() {
            return Err(Error::DimensionMismatch { expected: alg.rank(), found: v.len() });
        }
        if let Some(s) = v.iter().find(|s| s.ramification() != 1) {
            return Err(Error::RamificationMismatch(1, s.ramification()));
        }
        Ok(OperCanonical { v })
    }

    pub fn regular(alg: &SimpleLieAlgebra) -> Self {
        OperCanonical { v: vec![LaurentScalar::zero(1); alg.rank()] }
    }
}

impl OperGeneral {
    pub fn from_connection(alg: &SimpleLieAlgebra, c: &Connection) -> Result<Self> {
        if c.ramification() != 1 {
            return Err(Error::RamificationMismatch(1, c.ramification()));
        }
        if c.a.dim() != alg.dim() {
            return Err(Error::DimensionMismatch { expected: alg.dim(), found: c.a.dim() });
        }
        let mut q = c.a.components().to_vec();
        let mut phi = Vec::with_capacity(alg.rank());
        for &i in alg.simple_negative() {
            let s = std::mem::replace(&mut q[i], LaurentScalar::zero(1));
            if s.valuation().is_none() {
                return Err(Error::NotOperShaped(format!("coefficient of {} is not a unit", alg.label(i))));
            }
            phi.push(s);
        }
        for (i, s) in q.iter().enumerate() {
            if alg.height(i) < 0 && !s.is_exact_zero() {
                return Err(Error::NotOperShaped(format!("nonzero component along {}", alg.label(i))));
            }
        }
        Ok(OperGeneral { phi, q: LoopElement::from_components(q)? })
    }

    pub fn to_connection(&self, alg: &SimpleLieAlgebra) -> Result<Connection> {
        let mut comps = self.q.components().to_vec();
        for (&i, s) in alg.simple_negative().iter().zip(&self.phi) {
            comps[i] = s.clone();
        }
        Ok(Connection::new(LoopElement::from_components(comps)?))
    }
}

/// `d/dt + p_{-1} + sum v_j p_j`.
pub fn to_connection(alg: &SimpleLieAlgebra, chi: &OperCanonical) -> Connection {
    let mut a = LoopElement::constant(alg.p_minus(), 1);
    for ((p, _), v) in alg.vcan_basis().iter().zip(&chi.v) {
        if !v.is_exact_zero() {
            a = a.checked_add(&LoopElement::tensor(p, v)).expect("common ramification");
        }
    }
    Connection::new(a)
}

/// Splitting of each principal degree `g_j = V_can,j + [p_{-1}, n_{j+1}]`.
struct SliceSplitting {
    levels: Vec<DegreeSplit>,
}

/// Basis indices of `g_j`, slice positions, roots of height `j+1`, inverse change of basis.
type DegreeSplit = (Vec<usize>, Vec<usize>, Vec<usize>, Matrix);

impl SliceSplitting {
    fn new(alg: &SimpleLieAlgebra) -> Result<Self> {
        let top = alg.coxeter_number() as i64 - 1;
        let mut levels = Vec::new();
        for j in 0..=top {
            let coords: Vec<usize> = (0..alg.dim()).filter(|&b| alg.height(b) == j).collect();
            let slice: Vec<usize> = alg
                .vcan_basis()
                .iter()
                .enumerate()
                .filter(|(_, (_, d))| i64::from(*d) == j)
                .map(|(k, _)| k)
                .collect();
            let above: Vec<usize> = (0..alg.dim()).filter(|&b| alg.height(b) == j + 1).collect();
            let mut columns: Vec<LieElement> = slice.iter().map(|&k| alg.vcan_basis()[k].0.clone()).collect();
            for &b in &above {
                columns.push(alg.bracket(alg.p_minus(), &LieElement::basis(alg.dim(), b)));
            }
            if columns.len() != coords.len() {
                return Err(Error::InvalidAlgebra(format!("degree {j} does not split over the slice")));
            }
            let m: Matrix = coords.iter().map(|&r| columns.iter().map(|c| c.0[r].clone()).collect()).collect();
            let inv = linalg::inverse(&m)
                .ok_or_else(|| Error::InvalidAlgebra(format!("degree {j} does not split over the slice")))?;
            levels.push((coords, slice, above, inv));
        }
        Ok(SliceSplitting { levels })
    }
}

fn combine(row: &[Q], comps: &[LaurentScalar], coords: &[usize]) -> Result<LaurentScalar> {
    let mut acc = LaurentScalar::zero(1);
    for (c, &i) in row.iter().zip(coords) {
        if !c.is_zero() {
            acc = acc.checked_add(&comps[i].scale(c))?;
        }
    }
    Ok(acc)
}

/// Gauges an oper into canonical form; the returned word realizes the gauge.
pub fn canonicalize(alg: &SimpleLieAlgebra, o: &OperGeneral) -> Result<(OperCanonical, GaugeWord)> {
    if o.phi.len() != alg.rank() {
        return Err(Error::DimensionMismatch { expected: alg.rank(), found: o.phi.len() });
    }
    let split = SliceSplitting::new(alg)?;
    let mut conn = o.to_connection(alg)?;
    let mut word = Vec::new();

    let one = LaurentScalar::one(1);
    if o.phi.iter().any(|p| *p != one) {
        let torus = GaugeWord(vec![GaugeFactor::TorusChar { chars: o.phi.clone() }]);
        conn = gauge_apply(alg, &torus, &conn)?;
        word.extend(torus.0);
    }

    let mut v = vec![LaurentScalar::zero(1); alg.rank()];
    for (coords, slice, above, inv) in &split.levels {
        let comps = conn.a.components().to_vec();
        let mut step = Vec::new();
        for (r, row) in inv.iter().enumerate() {
            let s = combine(row, &comps, coords)?;
            if r < slice.len() {
                v[slice[r]] = s;
            } else if s.num_terms() > 0 {
                let b = above[r - slice.len()];
                step.push(GaugeFactor::UnipExp { x: LieElement::basis(alg.dim(), b), f: s });
            }
        }
        if !step.is_empty() {
            let step = GaugeWord(step);
            conn = gauge_apply(alg, &step, &conn)?;
            word.extend(step.0);
        }
    }
    Ok((OperCanonical { v }, GaugeWord(word)))
}

/// `max(0, sup (-val(s) / w - 1))`; components known to vanish only up to their
/// precision are admitted when that bound cannot raise the supremum.
pub(crate) fn certified_sup<'a>(items: impl IntoIterator<Item = (&'a LaurentScalar, i64)>) -> Result<Q> {
    let mut best = Q::zero();
    let mut pending = Vec::new();
    for (s, w) in items {
        if s.is_exact_zero() {
            continue;
        }
        let wq = Q::from_integer(w.into());
        match s.valuation() {
            Some(val) => {
                let c = -Q::from_integer(val.into()) / &wq - Q::one();
                if c > best {
                    best = c;
                }
            }
            None => pending.push((s.precision().expect("inexact"), wq)),
        }
    }
    for (n, w) in pending {
        let bound = -Q::from_integer(n.into()) / &w - Q::one();
        if bound > best {
            let needed = ceil_i64(&(-(&w) * (&best + Q::one())));
            return Err(Error::PrecisionExhausted { exponent: needed, precision: n });
        }
    }
    Ok(best)
}

pub fn slope_of_oper(alg: &SimpleLieAlgebra, chi: &OperCanonical) -> Result<Q> {
    certified_sup(chi.v.iter().zip(alg.exponents()).map(|(s, &d)| (s, i64::from(d) + 1)))
}

pub fn in_op_r(alg: &SimpleLieAlgebra, chi: &OperCanonical, r: &Q) -> Result<bool> {
    Ok(slope_of_oper(alg, chi)? <= *r)
}

/// A reduced (or regular-singular) connection gauge equivalent to an oper after ramification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedForm {
    pub connection: Connection,
    pub b: u32,
    pub order: i64,
    pub polar: Option<LieElement>,
    /// Slice index realizing the slope, absent in the regular-singular branch.
    pub index: Option<usize>,
}

fn ratio(chi: &OperCanonical, alg: &SimpleLieAlgebra, k: usize) -> Option<Q> {
    let n = -chi.v[k].valuation()?;
    Some(Q::new(n.into(), (i64::from(alg.exponents()[k]) + 1).into()))
}

pub fn reduced_form_via_oper(alg: &SimpleLieAlgebra, chi: &OperCanonical) -> Result<ReducedForm> {
    let slope = slope_of_oper(alg, chi)?;
    if slope.is_zero() {
        return regular_singular_witness(alg, chi);
    }
    let best = (0..alg.rank()).filter_map(|k| ratio(chi, alg, k)).max().expect("positive slope");
    let k = (0..alg.rank()).find(|&k| ratio(chi, alg, k).as_ref() == Some(&best)).expect("maximizer");
    reduced_form_at(alg, chi, k)
}

/// As [`reduced_form_via_oper`] but through a prescribed maximizing index `k`.
pub fn reduced_form_via_oper_at(alg: &SimpleLieAlgebra, chi: &OperCanonical, k: usize) -> Result<ReducedForm> {
    let slope = slope_of_oper(alg, chi)?;
    if slope.is_zero() {
        return regular_singular_witness(alg, chi);
    }
    let best = (0..alg.rank()).filter_map(|j| ratio(chi, alg, j)).max().expect("positive slope");
    if k >= alg.rank() || ratio(chi, alg, k) != Some(best) {
        return Err(Error::BoundViolation(format!("index {k} does not maximize the pole ratio")));
    }
    reduced_form_at(alg, chi, k)
}

fn reduced_form_at(alg: &SimpleLieAlgebra, chi: &OperCanonical, k: usize) -> Result<ReducedForm> {
    let d = alg.exponents()[k];
    let b = d + 1;
    let n_k = -chi.v[k].valuation().expect("maximizer has a valuation");
    let ramified = ramify_connection(&to_connection(alg, chi), b)?;
    let torus = GaugeWord(vec![GaugeFactor::cocharacter(&vec![n_k; alg.rank()], b)]);
    let connection = gauge_apply(alg, &torus, &ramified)?;
    match order_and_polar(&connection)? {
        Singularity::Pole { order, polar } => {
            Ok(ReducedForm { connection, b, order, polar: Some(polar), index: Some(k) })
        }
        Singularity::Regular => Err(Error::NotReduced),
    }
}

fn regular_singular_witness(alg: &SimpleLieAlgebra, chi: &OperCanonical) -> Result<ReducedForm> {
    let conn = to_connection(alg, chi);
    let conn = if chi.v.iter().all(|s| s.valuation_bound().is_none_or(|v| v >= 0)) {
        conn
    } else {
        gauge_apply(alg, &GaugeWord(vec![GaugeFactor::cocharacter(&vec![1; alg.rank()], 1)]), &conn)?
    };
    let sing = order_and_polar(&conn)?;
    let polar = match &sing {
        Singularity::Pole { polar, .. } => Some(polar.clone()),
        Singularity::Regular => None,
    };
    Ok(ReducedForm { connection: conn, b: 1, order: sing.order(), polar, index: None })
}

/// Slope of the scalar equation obtained from the standard representation by
/// the cyclic vector given by the last coordinate.
pub fn type_a_newton_slope(alg: &SimpleLieAlgebra, chi: &OperCanonical) -> Result<Q> {
    let b = scalar_equation(alg, chi)?;
    certified_sup(b.iter().enumerate().map(|(i, s)| (s, i as i64 + 1)))
}

/// Coefficients `b_1..b_n` of `y^(n) + b_1 y^(n-1) + ... + b_n y = 0` satisfied by the
/// last coordinate of a horizontal section `s' = -A s`.
pub fn scalar_equation(alg: &SimpleLieAlgebra, chi: &OperCanonical) -> Result<Vec<LaurentScalar>> {
    let rep = alg.matrix_rep().ok_or(Error::NotTypeA)?;
    let n = alg.rank() + 1;
    let conn = to_connection(alg, chi);
    let mut a = vec![vec![LaurentScalar::zero(1); n]; n];
    for (comp, entries) in conn.a.components().iter().zip(rep) {
        if comp.is_exact_zero() {
            continue;
        }
        for (r, c, x) in entries {
            a[*r][*c] = a[*r][*c].checked_add(&comp.scale(x))?;
        }
    }
    let mut lambda = vec![LaurentScalar::zero(1); n];
    lambda[n - 1] = LaurentScalar::one(1);
    let mut rows = vec![lambda];
    for _ in 0..n {
        let prev = rows.last().unwrap();
        let mut next: Vec<LaurentScalar> = prev.iter().map(LaurentScalar::derivative).collect();
        for (i, li) in prev.iter().enumerate() {
            if li.is_exact_zero() {
                continue;
            }
            for (j, nj) in next.iter_mut().enumerate() {
                if !a[i][j].is_exact_zero() {
                    *nj = nj.checked_sub(&li.checked_mul(&a[i][j])?)?;
                }
            }
        }
        rows.push(next);
    }
    // sum_k c_k lambda_k = lambda_n, one equation per coordinate
    let mut aug: Vec<Vec<LaurentScalar>> = (0..n).map(|j| (0..=n).map(|k| rows[k][j].clone()).collect()).collect();
    let c = solve_series(&mut aug, n)?;
    Ok((1..=n).map(|i| c[n - i].neg()).collect())
}

fn pivot_rank(s: &LaurentScalar) -> Option<(u8, i64)> {
    let v = s.valuation()?;
    let kind = match (s.is_exact(), s.num_terms()) {
        (true, 1) => 0,
        (true, _) => 1,
        _ => 2,
    };
    Some((kind, v))
}

fn solve_series(aug: &mut [Vec<LaurentScalar>], n: usize) -> Result<Vec<LaurentScalar>> {
    for col in 0..n {
        let pick = (col..n).filter_map(|r| pivot_rank(&aug[r][col]).map(|k| (k, r))).min();
        let Some((_, p)) = pick else {
            if (col..n).all(|r| aug[r][col].is_exact_zero()) {
                return Err(Error::CyclicVectorFailure);
            }
            let prec = (col..n).filter_map(|r| aug[r][col].precision()).min().unwrap_or(0);
            return Err(Error::PrecisionExhausted { exponent: prec, precision: prec });
        };
        aug.swap(col, p);
        let inv = aug[col][col].inverse()?;
        for x in aug[col].iter_mut() {
            *x = x.checked_mul(&inv)?;
        }
        for r in 0..n {
            if r == col || aug[r][col].is_exact_zero() {
                continue;
            }
            let factor = aug[r][col].clone();
            for j in col..=n {
                let delta = factor.checked_mul(&aug[col][j])?;
                aug[r][j] = aug[r][j].checked_sub(&delta)?;
            }
        }
    }
    Ok((0..n).map(|r| aug[r][n].clone()).collect())
}

/// Wire form `{"algebra": "A2", "v": [<series>, <series>]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperJson {
    pub algebra: String,
    pub v: Vec<SeriesJson>,
}

impl OperJson {
    pub fn from_oper(alg: &SimpleLieAlgebra, chi: &OperCanonical) -> Self {
        OperJson { algebra: alg.name().to_string(), v: chi.v.iter().map(LaurentScalar::to_json).collect() }
    }

    pub fn to_oper(&self, alg: &SimpleLieAlgebra, default_terms: Option<i64>) -> Result<OperCanonical> {
        let v = self
            .v
            .iter()
            .map(|s| LaurentScalar::from_json(s, default_terms))
            .collect::<Result<Vec<_>>>()?;
        OperCanonical::new(alg, v).map_err(|e| Error::Schema(e.to_string()))
    }
}

/// Summary of a reduced form for serialization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedJson {
    pub b: u32,
    pub order: i64,
    pub polar: Option<BTreeMap<String, String>>,
    pub index: Option<usize>,
}

impl ReducedJson {
    pub fn from_reduced(alg: &SimpleLieAlgebra, r: &ReducedForm) -> Self {
        ReducedJson {
            b: r.b,
            order: r.order,
            polar: r.polar.as_ref().map(|p| {
                p.support().map(|(i, c)| (alg.label(i).to_string(), crate::rational::format_q(c))).collect()
            }),
            index: r.index,
        }
    }
}

/// Reduced fraction denominators of a slope divide some `d_j + 1`.
pub fn denominator_divides_degree(alg: &SimpleLieAlgebra, slope: &Q) -> bool {
    let den = slope.denom().clone();
    alg.exponents().iter().any(|&d| (num_bigint::BigInt::from(d + 1) % &den).is_zero())
}
