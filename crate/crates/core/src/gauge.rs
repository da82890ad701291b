//! Connections `d/du + A(u)` with Lie-algebra-valued Laurent coefficients and
//! the loop-group gauge action
//! `A -> g A g^{-1} - (dg) g^{-1}`
//! by words in elementary factors.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{LieElement, SimpleLieAlgebra};
use crate::linalg::Matrix;
use crate::rational::{factorial, format_q, parse_q, q, Q};
use crate::series::{LaurentScalar, SeriesJson};

/// `sum_b b (x) A_b(u)` over the basis of the algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopElement {
    comps: Vec<LaurentScalar>,
    ram: u32,
}

impl LoopElement {
    pub fn zero(dim: usize, ram: u32) -> Self {
        LoopElement { comps: vec![LaurentScalar::zero(ram); dim], ram }
    }

    pub fn from_components(comps: Vec<LaurentScalar>) -> Result<Self> {
        let ram = comps.first().map_or(1, LaurentScalar::ramification);
        if let Some(c) = comps.iter().find(|c| c.ramification() != ram) {
            return Err(Error::RamificationMismatch(ram, c.ramification()));
        }
        Ok(LoopElement { comps, ram })
    }

    /// `x (x) f`.
    pub fn tensor(x: &LieElement, f: &LaurentScalar) -> Self {
        let comps = x.0.iter().map(|c| f.scale(c)).collect();
        LoopElement { comps, ram: f.ramification() }
    }

    /// A constant element.
    pub fn constant(x: &LieElement, ram: u32) -> Self {
        Self::tensor(x, &LaurentScalar::one(ram))
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    pub fn component(&self, i: usize) -> &LaurentScalar {
        &self.comps[i]
    }

    pub fn components(&self) -> &[LaurentScalar] {
        &self.comps
    }

    /// Minimal component precision; `None` when every component is exact.
    pub fn precision(&self) -> Option<i64> {
        self.comps.iter().filter_map(LaurentScalar::precision).min()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_components(comps)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_components(comps)
    }

    pub fn mul_series(&self, f: &LaurentScalar) -> Result<Self> {
        let comps = self.comps.iter().map(|a| a.checked_mul(f)).collect::<Result<Vec<_>>>()?;
        Ok(LoopElement { comps, ram: f.ramification() })
    }

    /// Applies a constant linear map of the algebra component-wise.
    pub fn apply_linear(&self, m: &Matrix) -> Result<Self> {
        let dim = self.dim();
        let mut comps = Vec::with_capacity(dim);
        for row in m.iter() {
            let mut acc = LaurentScalar::zero(self.ram);
            for (b, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    acc = acc.checked_add(&self.comps[b].scale(c))?;
                }
            }
            comps.push(acc);
        }
        Ok(LoopElement { comps, ram: self.ram })
    }

    pub fn is_exact_zero(&self) -> bool {
        self.comps.iter().all(LaurentScalar::is_exact_zero)
    }

    /// The constant Lie element multiplying `u^k`.
    pub fn coefficient(&self, k: i64) -> Result<LieElement> {
        Ok(LieElement(self.comps.iter().map(|c| c.coeff(k)).collect::<Result<Vec<_>>>()?))
    }

    pub fn reramify(&self, m: u32) -> Self {
        LoopElement { comps: self.comps.iter().map(|c| c.reramify(m)).collect(), ram: self.ram * m }
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.comps.iter().zip(&other.comps).all(|(a, b)| a.agrees_with(b))
    }
}

/// The operator `d/du + A(u)` where `t = u^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    pub a: LoopElement,
}

impl Connection {
    pub fn new(a: LoopElement) -> Self {
        Connection { a }
    }

    pub fn ramification(&self) -> u32 {
        self.a.ramification()
    }
}

/// Elementary loop-group factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaugeFactor {
    /// `exp(x (x) f)` with `x` ad-nilpotent.
    UnipExp { x: LieElement, f: LaurentScalar },
    /// The adjoint-torus point with `alpha_i(g) = chars[i]` (units).
    TorusChar { chars: Vec<LaurentScalar> },
}

impl GaugeFactor {
    /// The cocharacter `u^lambda` given by `<lambda, alpha_i> = values[i]`.
    pub fn cocharacter(values: &[i64], ram: u32) -> Self {
        GaugeFactor::TorusChar {
            chars: values.iter().map(|&v| LaurentScalar::monomial(Q::one(), v, ram)).collect(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(match self {
            GaugeFactor::UnipExp { x, f } => GaugeFactor::UnipExp { x: x.clone(), f: f.neg() },
            GaugeFactor::TorusChar { chars } => GaugeFactor::TorusChar {
                chars: chars.iter().map(LaurentScalar::inverse).collect::<Result<Vec<_>>>()?,
            },
        })
    }
}

/// Factors are applied in the order written.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GaugeWord(pub Vec<GaugeFactor>);

impl GaugeWord {
    pub fn identity() -> Self {
        GaugeWord(Vec::new())
    }

    pub fn then(mut self, other: GaugeWord) -> Self {
        self.0.extend(other.0);
        self
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(GaugeWord(self.0.iter().rev().map(GaugeFactor::inverse).collect::<Result<Vec<_>>>()?))
    }

    pub fn reramify(&self, m: u32) -> Self {
        GaugeWord(
            self.0
                .iter()
                .map(|f| match f {
                    GaugeFactor::UnipExp { x, f } => GaugeFactor::UnipExp { x: x.clone(), f: f.reramify(m) },
                    GaugeFactor::TorusChar { chars } => {
                        GaugeFactor::TorusChar { chars: chars.iter().map(|c| c.reramify(m)).collect() }
                    }
                })
                .collect(),
        )
    }
}

pub fn gauge_apply(alg: &SimpleLieAlgebra, word: &GaugeWord, c: &Connection) -> Result<Connection> {
    let mut a = c.a.clone();
    if a.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: a.dim() });
    }
    for factor in &word.0 {
        a = apply_factor(alg, factor, &a)?;
    }
    Ok(Connection { a })
}

fn apply_factor(alg: &SimpleLieAlgebra, factor: &GaugeFactor, a: &LoopElement) -> Result<LoopElement> {
    let ram = a.ramification();
    match factor {
        GaugeFactor::UnipExp { x, f } => {
            if f.ramification() != ram {
                return Err(Error::RamificationMismatch(ram, f.ramification()));
            }
            if x.dim() != alg.dim() {
                return Err(Error::DimensionMismatch { expected: alg.dim(), found: x.dim() });
            }
            if !alg.is_ad_nilpotent(x) {
                return Err(Error::NotNilpotent);
            }
            // Ad(exp(xf)) A = sum_k f^k / k! ad_x^k A; the logarithmic derivative of
            // exp(xf) is x f' because x f and x f' commute.
            let ad = alg.ad_matrix(x);
            let mut out = a.clone();
            let mut term = a.clone();
            let mut f_pow = LaurentScalar::one(ram);
            for k in 1..=alg.dim() as u32 {
                term = term.apply_linear(&ad)?;
                if term.is_exact_zero() {
                    break;
                }
                f_pow = f_pow.checked_mul(f)?;
                let coef = f_pow.scale(&(Q::one() / factorial(k)));
                out = out.checked_add(&term.mul_series(&coef)?)?;
            }
            out.checked_sub(&LoopElement::tensor(x, &f.derivative()))
        }
        GaugeFactor::TorusChar { chars } => {
            if chars.len() != alg.rank() {
                return Err(Error::DimensionMismatch { expected: alg.rank(), found: chars.len() });
            }
            for c in chars {
                if c.ramification() != ram {
                    return Err(Error::RamificationMismatch(ram, c.ramification()));
                }
                c.valuation_leading().map_err(|_| Error::NonUnit)?;
            }
            let mut cache: BTreeMap<Vec<i64>, LaurentScalar> = BTreeMap::new();
            let mut comps = Vec::with_capacity(a.dim());
            for (b, comp) in a.components().iter().enumerate() {
                let w = alg.weight(b);
                if w.iter().all(|&m| m == 0) || comp.is_exact_zero() {
                    comps.push(comp.clone());
                    continue;
                }
                if !cache.contains_key(w) {
                    let mut acc = LaurentScalar::one(ram);
                    for (chi, &m) in chars.iter().zip(w) {
                        if m != 0 {
                            acc = acc.checked_mul(&chi.pow(m)?)?;
                        }
                    }
                    cache.insert(w.to_vec(), acc);
                }
                comps.push(comp.checked_mul(&cache[w])?);
            }
            let mut out = LoopElement::from_components(comps)?;
            for (chi, coweight) in chars.iter().zip(alg.fundamental_coweights()) {
                let log_der = chi.derivative().checked_mul(&chi.inverse()?)?;
                if !log_der.is_exact_zero() {
                    out = out.checked_sub(&LoopElement::tensor(coweight, &log_der))?;
                }
            }
            Ok(out)
        }
    }
}

/// Order of singularity with its polar part, or `Regular` when `A` is holomorphic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Singularity {
    Regular,
    Pole { order: i64, polar: LieElement },
}

impl Singularity {
    pub fn order(&self) -> i64 {
        match self {
            Singularity::Regular => 0,
            Singularity::Pole { order, .. } => *order,
        }
    }
}

pub fn order_and_polar(c: &Connection) -> Result<Singularity> {
    let a = &c.a;
    let least = a.components().iter().filter_map(LaurentScalar::valuation).min();
    // every component must be certified above the candidate leading exponent
    let needed = least.map_or(0, |v| v.min(0));
    for comp in a.components() {
        if let Some(n) = comp.precision() {
            if comp.valuation().is_none_or(|v| v > needed) && n <= needed {
                return Err(Error::PrecisionExhausted { exponent: needed, precision: n });
            }
        }
    }
    match least {
        Some(v) if v < 0 => Ok(Singularity::Pole { order: -v, polar: a.coefficient(v)? }),
        _ => {
            if let Some(n) = a.precision() {
                if n < 0 {
                    return Err(Error::PrecisionExhausted { exponent: -1, precision: n });
                }
            }
            Ok(Singularity::Regular)
        }
    }
}

pub fn is_reduced(alg: &SimpleLieAlgebra, c: &Connection) -> Result<bool> {
    Ok(match order_and_polar(c)? {
        Singularity::Regular => false,
        Singularity::Pole { polar, .. } => !alg.is_ad_nilpotent(&polar),
    })
}

/// Pull back along `u = s^m`: `A(u) du = A(s^m) m s^{m-1} ds`.
pub fn ramify_connection(c: &Connection, m: u32) -> Result<Connection> {
    if m == 1 {
        return Ok(c.clone());
    }
    let ram = c.ramification() * m;
    let jac = LaurentScalar::monomial(q(i64::from(m)), i64::from(m) - 1, ram);
    Ok(Connection { a: c.a.reramify(m).mul_series(&jac)? })
}

/// `a / b` for a reduced connection of pole order `a + 1` over `t = u^b`;
/// zero when the pole order is at most one.
pub fn slope_from_reduced(alg: &SimpleLieAlgebra, c: &Connection) -> Result<Q> {
    let sing = order_and_polar(c)?;
    let order = sing.order();
    if order <= 1 {
        return Ok(Q::zero());
    }
    if !is_reduced(alg, c)? {
        return Err(Error::NotReduced);
    }
    Ok(Q::new((order - 1).into(), i64::from(c.ramification()).into()))
}

/// Wire form of a connection: `{"algebra": "A1", "b": 1, "components": {"e": <series>, ...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionJson {
    pub algebra: String,
    #[serde(default = "default_ram")]
    pub b: u32,
    pub components: BTreeMap<String, SeriesJson>,
}

fn default_ram() -> u32 {
    1
}

impl ConnectionJson {
    pub fn from_connection(alg: &SimpleLieAlgebra, c: &Connection) -> Self {
        let components = c
            .a
            .components()
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_exact_zero())
            .map(|(i, s)| (alg.label(i).to_string(), s.to_json()))
            .collect();
        ConnectionJson { algebra: alg.name().to_string(), b: c.ramification(), components }
    }

    pub fn to_connection(&self, alg: &SimpleLieAlgebra, default_terms: Option<i64>) -> Result<Connection> {
        let mut comps = vec![LaurentScalar::zero(self.b); alg.dim()];
        for (label, s) in &self.components {
            let i = alg
                .index_of(label)
                .ok_or_else(|| Error::Schema(format!("unknown basis label {label:?}")))?;
            let series = LaurentScalar::from_json(s, default_terms)?;
            if series.ramification() != self.b {
                return Err(Error::Schema(format!("component {label:?} has ramification {}", series.ramification())));
            }
            comps[i] = series;
        }
        Ok(Connection { a: LoopElement::from_components(comps)? })
    }
}

/// Wire form of one gauge factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeFactorJson {
    Unip { x: BTreeMap<String, String>, f: SeriesJson },
    Torus(Vec<SeriesJson>),
}

pub fn word_to_json(alg: &SimpleLieAlgebra, w: &GaugeWord) -> Vec<GaugeFactorJson> {
    w.0.iter()
        .map(|f| match f {
            GaugeFactor::UnipExp { x, f } => GaugeFactorJson::Unip {
                x: x.support().map(|(i, c)| (alg.label(i).to_string(), format_q(c))).collect(),
                f: f.to_json(),
            },
            GaugeFactor::TorusChar { chars } => GaugeFactorJson::Torus(chars.iter().map(LaurentScalar::to_json).collect()),
        })
        .collect()
}

pub fn word_from_json(alg: &SimpleLieAlgebra, factors: &[GaugeFactorJson], default_terms: Option<i64>) -> Result<GaugeWord> {
    let mut out = Vec::new();
    for f in factors {
        out.push(match f {
            GaugeFactorJson::Unip { x, f } => {
                let mut el = LieElement::zero(alg.dim());
                for (label, c) in x {
                    let i = alg
                        .index_of(label)
                        .ok_or_else(|| Error::Schema(format!("unknown basis label {label:?}")))?;
                    el.0[i] += parse_q(c)?;
                }
                GaugeFactor::UnipExp { x: el, f: LaurentScalar::from_json(f, default_terms)? }
            }
            GaugeFactorJson::Torus(chars) => GaugeFactor::TorusChar {
                chars: chars
                    .iter()
                    .map(|c| LaurentScalar::from_json(c, default_terms))
                    .collect::<Result<Vec<_>>>()?,
            },
        });
    }
    Ok(GaugeWord(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn sl2() -> SimpleLieAlgebra {
        SimpleLieAlgebra::type_a(1).unwrap()
    }

    fn mono(c: Q, k: i64, ram: u32) -> LaurentScalar {
        LaurentScalar::monomial(c, k, ram)
    }

    /// Connection from `(label, coefficient, exponent)` triples.
    fn conn(alg: &SimpleLieAlgebra, ram: u32, terms: &[(&str, Q, i64)]) -> Connection {
        let mut comps = vec![LaurentScalar::zero(ram); alg.dim()];
        for (label, c, k) in terms {
            let i = alg.index_of(label).unwrap();
            comps[i] = comps[i].checked_add(&mono(c.clone(), *k, ram)).unwrap();
        }
        Connection::new(LoopElement::from_components(comps).unwrap())
    }

    #[test]
    fn identity_word() {
        let a = sl2();
        let c = conn(&a, 1, &[("f", q(1), 0), ("h", q(3), -2)]);
        assert_eq!(gauge_apply(&a, &GaugeWord::identity(), &c).unwrap(), c);
    }

    #[test]
    fn cocharacter_shifts_root_components() {
        let a = sl2();
        let c = conn(&a, 1, &[("f", q(1), 0), ("e", q(5), 2)]);
        // u^{rho_check}: alpha(rho_check) = 1, so e gains u^1, f gains u^-1, minus rho_check/u
        let w = GaugeWord(vec![GaugeFactor::cocharacter(&[1], 1)]);
        let out = gauge_apply(&a, &w, &c).unwrap();
        let expect = conn(&a, 1, &[("f", q(1), -1), ("e", q(5), 3), ("h", frac(-1, 2), -1)]);
        assert_eq!(out, expect);
        // u^{h}: alpha(h) = 2, shifts by -2 / +2, minus h/u
        let w = GaugeWord(vec![GaugeFactor::cocharacter(&[2], 1)]);
        let out = gauge_apply(&a, &w, &c).unwrap();
        let expect = conn(&a, 1, &[("f", q(1), -2), ("e", q(5), 4), ("h", q(-1), -1)]);
        assert_eq!(out, expect);
    }

    #[test]
    fn worked_example_after_ramification() {
        // d/ds + 2 p_-1 / s + 2 p_1 / s^3, gauged by s^{rho_check}
        let a = sl2();
        let c = conn(&a, 2, &[("f", q(2), -1), ("e", q(2), -3)]);
        let out = gauge_apply(&a, &GaugeWord(vec![GaugeFactor::cocharacter(&[1], 2)]), &c).unwrap();
        let expect = conn(&a, 2, &[("f", q(2), -2), ("e", q(2), -2), ("h", frac(-1, 2), -1)]);
        assert_eq!(out, expect);
        assert_eq!(slope_from_reduced(&a, &out).unwrap(), frac(1, 2));
    }

    #[test]
    fn unipotent_factor_matches_hand_expansion() {
        // exp(-a/t e) on d + f + a h / t: the h/t term cancels, e gains (a^2 - a)/t^2
        let a = sl2();
        let x = a.element_from_labels(&[("e", q(1))]).unwrap();
        for num in [1, 3, -2] {
            let av = frac(num, 2);
            let c = conn(&a, 1, &[("f", q(1), 0), ("h", av.clone(), -1)]);
            let w = GaugeWord(vec![GaugeFactor::UnipExp { x: x.clone(), f: mono(-av.clone(), -1, 1) }]);
            let out = gauge_apply(&a, &w, &c).unwrap();
            let expect = conn(&a, 1, &[("f", q(1), 0), ("e", &av * &av - &av, -2)]);
            assert_eq!(out, expect);
        }
    }

    #[test]
    fn rejects_non_nilpotent_carrier() {
        let a = sl2();
        let c = conn(&a, 1, &[("f", q(1), 0)]);
        let h = a.element_from_labels(&[("h", q(1))]).unwrap();
        let w = GaugeWord(vec![GaugeFactor::UnipExp { x: h, f: mono(q(1), 0, 1) }]);
        assert_eq!(gauge_apply(&a, &w, &c), Err(Error::NotNilpotent));
    }

    #[test]
    fn orders_and_polar_parts() {
        let a = sl2();
        assert_eq!(order_and_polar(&conn(&a, 1, &[("f", q(1), 0)])).unwrap(), Singularity::Regular);
        let h = a.element_from_labels(&[("h", q(1))]).unwrap();
        assert_eq!(
            order_and_polar(&conn(&a, 1, &[("h", q(1), -3)])).unwrap(),
            Singularity::Pole { order: 3, polar: h }
        );
        let e = a.element_from_labels(&[("e", q(1))]).unwrap();
        assert_eq!(
            order_and_polar(&conn(&a, 1, &[("f", q(1), -1), ("e", q(1), -2)])).unwrap(),
            Singularity::Pole { order: 2, polar: e }
        );
    }

    #[test]
    fn order_requires_certified_components() {
        let a = sl2();
        let mut c = conn(&a, 1, &[("h", q(1), -2)]);
        c.a.comps[0] = LaurentScalar::certified_zero(-2, 1);
        assert!(matches!(order_and_polar(&c), Err(Error::PrecisionExhausted { .. })));
        c.a.comps[0] = LaurentScalar::certified_zero(-1, 1);
        assert_eq!(order_and_polar(&c).unwrap().order(), 2);
    }

    #[test]
    fn reduced_forms() {
        let a = sl2();
        assert!(!is_reduced(&a, &conn(&a, 1, &[("f", q(1), -2)])).unwrap());
        assert!(is_reduced(&a, &conn(&a, 1, &[("h", q(1), -2)])).unwrap());
        assert!(is_reduced(&a, &conn(&a, 2, &[("f", q(1), -2), ("e", q(1), -2)])).unwrap());
    }

    #[test]
    fn ramification_chain_rule() {
        let a = sl2();
        let c = conn(&a, 1, &[("h", q(3), -2)]);
        assert_eq!(ramify_connection(&c, 2).unwrap(), conn(&a, 2, &[("h", q(6), -3)]));
        assert_eq!(ramify_connection(&c, 1).unwrap(), c);
        let c = conn(&a, 1, &[("f", q(1), -1), ("e", q(1), -2)]);
        assert_eq!(ramify_connection(&c, 2).unwrap(), conn(&a, 2, &[("f", q(2), -1), ("e", q(2), -3)]));
    }

    #[test]
    fn slopes_from_reduced_forms() {
        let a = sl2();
        assert_eq!(slope_from_reduced(&a, &conn(&a, 1, &[("h", q(1), -3)])).unwrap(), q(2));
        assert_eq!(slope_from_reduced(&a, &conn(&a, 3, &[("h", q(1), -5)])).unwrap(), frac(4, 3));
        assert_eq!(slope_from_reduced(&a, &conn(&a, 1, &[("h", q(1), -1)])).unwrap(), q(0));
        assert_eq!(slope_from_reduced(&a, &conn(&a, 1, &[("f", q(1), 0)])).unwrap(), q(0));
        assert_eq!(slope_from_reduced(&a, &conn(&a, 1, &[("e", q(1), -3)])), Err(Error::NotReduced));
    }

    #[test]
    fn json_round_trip() {
        let a = sl2();
        let c = conn(&a, 2, &[("f", q(2), -1), ("e", frac(3, 2), -3)]);
        let json = ConnectionJson::from_connection(&a, &c);
        let text = serde_json::to_string(&json).unwrap();
        let back: ConnectionJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_connection(&a, None).unwrap(), c);

        let w = GaugeWord(vec![
            GaugeFactor::cocharacter(&[1], 2),
            GaugeFactor::UnipExp { x: a.element_from_labels(&[("e", q(2))]).unwrap(), f: mono(q(1), -1, 2) },
        ]);
        let wj = serde_json::to_string(&word_to_json(&a, &w)).unwrap();
        let back: Vec<GaugeFactorJson> = serde_json::from_str(&wj).unwrap();
        assert_eq!(word_from_json(&a, &back, None).unwrap(), w);
    }

    type WordSpec = (Vec<(usize, i64, i64, i64)>, Vec<i64>);

    fn arb_word() -> impl Strategy<Value = WordSpec> {
        (
            proptest::collection::vec((0usize..6, -3i64..4, 1i64..4, -2i64..3), 0..4),
            proptest::collection::vec(-2i64..3, 2),
        )
    }

    fn build_word(alg: &SimpleLieAlgebra, spec: &WordSpec, ram: u32) -> GaugeWord {
        // root vectors only (indices 0..6 of A2 are e1, e2, e12, f1, f2, f12)
        let mut w = vec![GaugeFactor::cocharacter(&spec.1, ram)];
        for &(b, num, den, k) in &spec.0 {
            let x = LieElement::basis(alg.dim(), b);
            w.push(GaugeFactor::UnipExp { x, f: mono(frac(num, den), k, ram) });
        }
        GaugeWord(w)
    }

    proptest! {
        #[test]
        fn inverse_word_is_identity(spec in arb_word(), cs in proptest::collection::vec(-3i64..4, 8)) {
            let alg = SimpleLieAlgebra::type_a(2).unwrap();
            let comps = cs.iter().enumerate().map(|(i, &c)| mono(q(c), i as i64 % 3 - 2, 1)).collect();
            let c = Connection::new(LoopElement::from_components(comps).unwrap());
            let w = build_word(&alg, &spec, 1);
            let there = gauge_apply(&alg, &w, &c).unwrap();
            let back = gauge_apply(&alg, &w.inverse().unwrap(), &there).unwrap();
            prop_assert!(back.a.agrees_with(&c.a));
        }

        #[test]
        fn composite_words_act_sequentially(s1 in arb_word(), s2 in arb_word(), cs in proptest::collection::vec(-3i64..4, 8)) {
            let alg = SimpleLieAlgebra::type_a(2).unwrap();
            let comps = cs.iter().enumerate().map(|(i, &c)| mono(q(c), -(i as i64 % 2), 1)).collect();
            let c = Connection::new(LoopElement::from_components(comps).unwrap());
            let (w1, w2) = (build_word(&alg, &s1, 1), build_word(&alg, &s2, 1));
            let seq = gauge_apply(&alg, &w2, &gauge_apply(&alg, &w1, &c).unwrap()).unwrap();
            let comp = gauge_apply(&alg, &w1.clone().then(w2), &c).unwrap();
            prop_assert_eq!(seq, comp);
        }

        #[test]
        fn ramification_commutes_with_gauge(spec in arb_word(), cs in proptest::collection::vec(-3i64..4, 8), m in 1u32..4) {
            let alg = SimpleLieAlgebra::type_a(2).unwrap();
            let comps = cs.iter().enumerate().map(|(i, &c)| mono(q(c), i as i64 % 3 - 1, 1)).collect();
            let c = Connection::new(LoopElement::from_components(comps).unwrap());
            let w = build_word(&alg, &spec, 1);
            let lhs = ramify_connection(&gauge_apply(&alg, &w, &c).unwrap(), m).unwrap();
            let rhs = gauge_apply(&alg, &w.reramify(m), &ramify_connection(&c, m).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
