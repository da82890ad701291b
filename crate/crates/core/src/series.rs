//! Exact Laurent series in a local parameter `u` with `t = u^b`.
//!
//! A series carries a precision certificate `N`: every coefficient at an
//! exponent below `N` is known exactly, nothing is known at or above `N`.
//! Series without a bound are exact Laurent polynomials. Reading past the
//! certificate is an error, never an implicit zero.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, q, Q};

/// Terms kept past the valuation when an exact series has an infinite expansion.
pub const DEFAULT_TERMS: i64 = 40;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentScalar {
    terms: BTreeMap<i64, Q>,
    prec: Option<i64>,
    ram: u32,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    Some(a? + b?)
}

impl LaurentScalar {
    /// Builds a series from raw terms; zero coefficients and terms at or above
    /// the precision are dropped.
    pub fn new(terms: impl IntoIterator<Item = (i64, Q)>, prec: Option<i64>, ram: u32) -> Self {
        assert!(ram > 0, "ramification must be positive");
        let mut map: BTreeMap<i64, Q> = BTreeMap::new();
        for (k, c) in terms {
            if prec.is_some_and(|n| k >= n) {
                continue;
            }
            *map.entry(k).or_insert_with(Q::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        LaurentScalar { terms: map, prec, ram }
    }

    pub fn exact(terms: impl IntoIterator<Item = (i64, Q)>, ram: u32) -> Self {
        Self::new(terms, None, ram)
    }

    /// The exact zero polynomial.
    pub fn zero(ram: u32) -> Self {
        Self::exact([], ram)
    }

    /// Zero up to precision `prec`, unknown beyond.
    pub fn certified_zero(prec: i64, ram: u32) -> Self {
        Self::new([], Some(prec), ram)
    }

    pub fn constant(c: Q, ram: u32) -> Self {
        Self::exact([(0, c)], ram)
    }

    pub fn one(ram: u32) -> Self {
        Self::constant(Q::one(), ram)
    }

    pub fn monomial(c: Q, k: i64, ram: u32) -> Self {
        Self::exact([(k, c)], ram)
    }

    pub fn ramification(&self) -> u32 {
        self.ram
    }

    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True for the exact zero polynomial only.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec.is_none()
    }

    /// No known nonzero coefficient but a finite precision.
    pub fn is_certified_zero(&self) -> bool {
        self.terms.is_empty() && self.prec.is_some()
    }

    /// Coefficient at exponent `k`.
    pub fn coeff(&self, k: i64) -> Result<Q> {
        if let Some(n) = self.prec {
            if k >= n {
                return Err(Error::PrecisionExhausted { exponent: k, precision: n });
            }
        }
        Ok(self.terms.get(&k).cloned().unwrap_or_else(Q::zero))
    }

    /// Least stored exponent.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Lower bound on the true valuation; `None` means the series is exactly zero.
    pub fn valuation_bound(&self) -> Option<i64> {
        self.valuation().or(self.prec)
    }

    /// `(valuation, leading coefficient)`.
    pub fn valuation_leading(&self) -> Result<(i64, Q)> {
        self.terms
            .iter()
            .next()
            .map(|(k, c)| (*k, c.clone()))
            .ok_or(Error::ZeroSeries)
    }

    fn check_ram(&self, other: &Self) -> Result<()> {
        if self.ram != other.ram {
            return Err(Error::RamificationMismatch(self.ram, other.ram));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ram(other)?;
        let prec = min_opt(self.prec, other.prec);
        let terms = self.terms().chain(other.terms()).map(|(k, c)| (k, c.clone()));
        Ok(Self::new(terms, prec, self.ram))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            // 0 * (unknown tail) is still 0
            return Self::zero(self.ram);
        }
        Self::new(self.terms().map(|(k, a)| (k, a * c)), self.prec, self.ram)
    }

    /// Product; precision `min(N_a + v_b, N_b + v_a)` with `v` the valuation bound.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_ram(other)?;
        let (va, vb) = (self.valuation_bound(), other.valuation_bound());
        if va.is_none() || vb.is_none() {
            return Ok(Self::zero(self.ram));
        }
        let prec = min_opt(add_opt(self.prec, vb), add_opt(other.prec, va));
        let mut out: BTreeMap<i64, Q> = BTreeMap::new();
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                if prec.is_some_and(|n| i + j >= n) {
                    break;
                }
                *out.entry(i + j).or_insert_with(Q::zero) += a * b;
            }
        }
        Ok(Self::new(out, prec, self.ram))
    }

    /// Multiplication by `u^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.terms().map(|(e, c)| (e + k, c.clone())), self.prec.map(|n| n + k), self.ram)
    }

    /// Multiplicative inverse. Exact monomials invert exactly; other exact
    /// series are expanded to [`DEFAULT_TERMS`] terms.
    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with_terms(DEFAULT_TERMS)
    }

    pub fn inverse_with_terms(&self, default_terms: i64) -> Result<Self> {
        let (v, lead) = self.valuation_leading().map_err(|_| Error::NonUnit)?;
        if lead.is_zero() {
            return Err(Error::NonUnit);
        }
        let rel = match self.prec {
            Some(n) => n - v,
            None if self.terms.len() == 1 => {
                return Ok(Self::monomial(Q::one() / lead, -v, self.ram));
            }
            None => default_terms,
        };
        let a: Vec<Q> = (0..rel)
            .map(|i| self.terms.get(&(v + i)).cloned().unwrap_or_else(Q::zero))
            .collect();
        let inv0 = Q::one() / &a[0];
        let mut b: Vec<Q> = Vec::with_capacity(rel as usize);
        b.push(inv0.clone());
        for k in 1..rel as usize {
            let mut acc = Q::zero();
            for i in 1..=k {
                if !a[i].is_zero() {
                    acc += &a[i] * &b[k - i];
                }
            }
            b.push(-acc * &inv0);
        }
        let terms = b.into_iter().enumerate().map(|(i, c)| (i as i64 - v, c));
        Ok(Self::new(terms, Some(rel - v), self.ram))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut acc = Self::one(self.ram);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `d/du` in the series' own parameter.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.terms().map(|(k, c)| (k - 1, c * q(k))),
            self.prec.map(|n| n - 1),
            self.ram,
        )
    }

    /// Pass to the parameter `s` with `u = s^m`.
    pub fn reramify(&self, m: u32) -> Self {
        let m64 = i64::from(m);
        Self::new(
            self.terms().map(|(k, c)| (k * m64, c.clone())),
            self.prec.map(|n| n * m64),
            self.ram * m,
        )
    }

    /// Forget everything at or above `n`.
    pub fn truncate(&self, n: i64) -> Self {
        let prec = Some(self.prec.map_or(n, |p| p.min(n)));
        Self::new(self.terms().map(|(k, c)| (k, c.clone())), prec, self.ram)
    }

    /// Equality of all coefficients below the common precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.ram != other.ram {
            return false;
        }
        let bound = min_opt(self.prec, other.prec);
        let below = |k: &i64| bound.is_none_or(|n| *k < n);
        let lhs: Vec<_> = self.terms.iter().filter(|(k, _)| below(k)).collect();
        let rhs: Vec<_> = other.terms.iter().filter(|(k, _)| below(k)).collect();
        lhs == rhs
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            b: self.ram,
            prec: Some(match self.prec {
                Some(n) => PrecJson::Bound(n),
                None => PrecJson::Exact(ExactTag::Exact),
            }),
            terms: self.terms().map(|(k, c)| (k, format_q(c))).collect(),
        }
    }

    /// Decodes the wire form. A missing `prec` becomes `valuation + default_terms`
    /// when a default is given, and exact otherwise.
    pub fn from_json(json: &SeriesJson, default_terms: Option<i64>) -> Result<Self> {
        if json.b == 0 {
            return Err(Error::Schema("ramification must be positive".into()));
        }
        let terms = json
            .terms
            .iter()
            .map(|(k, c)| Ok((*k, parse_q(c)?)))
            .collect::<Result<Vec<_>>>()?;
        let explicit = match &json.prec {
            Some(PrecJson::Bound(n)) => Some(Some(*n)),
            Some(PrecJson::Exact(_)) => Some(None),
            None => None,
        };
        let prec = match explicit {
            Some(p) => p,
            None => default_terms.map(|d| {
                let v = terms.iter().filter(|(_, c)| !c.is_zero()).map(|(k, _)| *k).min().unwrap_or(0);
                v + d
            }),
        };
        if let Some(n) = prec {
            if let Some((k, _)) = terms.iter().find(|(k, c)| *k >= n && !c.is_zero()) {
                return Err(Error::Schema(format!("term at exponent {k} lies beyond precision {n}")));
            }
        }
        Ok(Self::new(terms, prec, json.b))
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.ram == 1 { "t".to_string() } else { format!("u[t=u^{}]", self.ram) };
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", format_q(c))?,
                _ => write!(f, "{}*{}^{}", format_q(c), var, k)?,
            }
        }
        match self.prec {
            Some(n) if first => write!(f, "O({var}^{n})"),
            Some(n) => write!(f, " + O({var}^{n})"),
            None if first => write!(f, "0"),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactTag {
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrecJson {
    Bound(i64),
    Exact(ExactTag),
}

/// Wire form: `{"b": 1, "prec": 40, "terms": [[-4, "1"], [2, "3/2"]]}`;
/// `"prec": "exact"` marks a Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    #[serde(default = "one_u32")]
    pub b: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<PrecJson>,
    pub terms: Vec<(i64, String)>,
}

fn one_u32() -> u32 {
    1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn poly(terms: &[(i64, i64)]) -> LaurentScalar {
        LaurentScalar::exact(terms.iter().map(|&(k, c)| (k, q(c))), 1)
    }

    #[test]
    fn shift_by_multiplication() {
        let a = poly(&[(-1, 1), (0, 1)]);
        assert_eq!(a.checked_mul(&poly(&[(1, 1)])).unwrap(), poly(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn geometric_series() {
        let inv = poly(&[(0, 1), (1, -1)]).inverse_with_terms(6).unwrap();
        assert_eq!(inv, LaurentScalar::new((0..6).map(|k| (k, q(1))), Some(6), 1));
        let back = inv.checked_mul(&poly(&[(0, 1), (1, -1)])).unwrap();
        assert_eq!(back, LaurentScalar::new([(0, q(1))], Some(6), 1));
    }

    #[test]
    fn inverse_of_polar_series() {
        // 2 t^-3 + t^-1 = 2 t^-3 (1 + t^2 / 2)
        let a = poly(&[(-3, 2), (-1, 1)]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv.valuation_leading().unwrap(), (3, frac(1, 2)));
        assert_eq!(inv.coeff(5).unwrap(), frac(-1, 4));
        let prod = a.checked_mul(&inv).unwrap();
        assert_eq!(prod.valuation_leading().unwrap(), (0, q(1)));
        assert_eq!(prod.num_terms(), 1);
        assert_eq!(prod.precision(), Some(DEFAULT_TERMS));
    }

    #[test]
    fn non_unit_and_mismatch() {
        assert_eq!(LaurentScalar::zero(1).inverse(), Err(Error::NonUnit));
        assert_eq!(LaurentScalar::certified_zero(5, 1).inverse(), Err(Error::NonUnit));
        let a = LaurentScalar::one(1);
        let b = LaurentScalar::one(2);
        assert_eq!(a.checked_add(&b), Err(Error::RamificationMismatch(1, 2)));
    }

    #[test]
    fn derivatives() {
        assert_eq!(poly(&[(-1, 1)]).derivative(), poly(&[(-2, -1)]));
        assert!(poly(&[(0, 7)]).derivative().is_exact_zero());
        let a = LaurentScalar::exact([(2, q(3)), (-4, frac(-1, 2))], 1);
        assert_eq!(a.derivative(), poly(&[(1, 6), (-5, 2)]));
        let b = LaurentScalar::new([(0, q(1))], Some(4), 1);
        assert_eq!(b.derivative().precision(), Some(3));
    }

    #[test]
    fn leading_terms() {
        assert_eq!(poly(&[(-4, 1), (2, 1)]).valuation_leading().unwrap(), (-4, q(1)));
        assert_eq!(poly(&[(0, 5)]).valuation_leading().unwrap(), (0, q(5)));
        let a = LaurentScalar::exact([(3, frac(-1, 7))], 1);
        assert_eq!(a.valuation_leading().unwrap(), (3, frac(-1, 7)));
        assert_eq!(LaurentScalar::certified_zero(3, 1).valuation_leading(), Err(Error::ZeroSeries));
    }

    #[test]
    fn reramification() {
        let r = poly(&[(-2, 1)]).reramify(2);
        assert_eq!(r, LaurentScalar::exact([(-4, q(1))], 2));
        assert_eq!(poly(&[(0, 1)]).reramify(5), LaurentScalar::one(5));
        assert_eq!(poly(&[(-1, 1), (1, 1)]).reramify(3), LaurentScalar::exact([(-3, q(1)), (3, q(1))], 3));
        let p = LaurentScalar::new([(1, q(1))], Some(4), 1).reramify(2);
        assert_eq!(p.precision(), Some(8));
    }

    #[test]
    fn precision_is_a_hard_certificate() {
        let a = LaurentScalar::new([(0, q(1))], Some(3), 1);
        assert_eq!(a.coeff(2).unwrap(), q(0));
        assert_eq!(a.coeff(3), Err(Error::PrecisionExhausted { exponent: 3, precision: 3 }));
        let z = LaurentScalar::certified_zero(2, 1);
        assert!(z.is_certified_zero() && !z.is_exact_zero());
        assert_ne!(z, LaurentScalar::zero(1));
    }

    #[test]
    fn product_precision_rule() {
        // (t^-2 + O(t^3)) * (t + O(t^5)): min(3 + 1, 5 - 2) = 3
        let a = LaurentScalar::new([(-2, q(1))], Some(3), 1);
        let b = LaurentScalar::new([(1, q(1))], Some(5), 1);
        assert_eq!(a.checked_mul(&b).unwrap().precision(), Some(3));
        let z = LaurentScalar::certified_zero(2, 1);
        let p = z.checked_mul(&b).unwrap();
        assert!(p.is_certified_zero());
        assert_eq!(p.precision(), Some(3));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let text = r#"{"b":1,"prec":40,"terms":[[-4,"1"],[2,"3/2"]]}"#;
        let json: SeriesJson = serde_json::from_str(text).unwrap();
        let s = LaurentScalar::from_json(&json, None).unwrap();
        assert_eq!(serde_json::to_string(&s.to_json()).unwrap(), text);
        let exact = r#"{"b":2,"prec":"exact","terms":[[-1,"-2/3"]]}"#;
        let s = LaurentScalar::from_json(&serde_json::from_str(exact).unwrap(), Some(40)).unwrap();
        assert!(s.is_exact());
        assert_eq!(serde_json::to_string(&s.to_json()).unwrap(), exact);
    }

    #[test]
    fn json_default_precision() {
        let json: SeriesJson = serde_json::from_str(r#"{"terms":[[-3,"2"]]}"#).unwrap();
        let s = LaurentScalar::from_json(&json, Some(40)).unwrap();
        assert_eq!(s.precision(), Some(37));
        let s = LaurentScalar::from_json(&json, None).unwrap();
        assert!(s.is_exact());
        let bad: SeriesJson = serde_json::from_str(r#"{"prec":0,"terms":[[3,"2"]]}"#).unwrap();
        assert!(matches!(LaurentScalar::from_json(&bad, None), Err(Error::Schema(_))));
    }

    fn arb_series() -> impl Strategy<Value = LaurentScalar> {
        (
            proptest::collection::vec((-4i64..6, -5i64..6, 1i64..4), 0..5),
            proptest::option::of(4i64..12),
        )
            .prop_map(|(terms, prec)| {
                LaurentScalar::new(terms.into_iter().map(|(k, n, d)| (k, frac(n, d))), prec, 1)
            })
    }

    fn arb_unit() -> impl Strategy<Value = LaurentScalar> {
        (arb_series(), -3i64..3, 1i64..5).prop_map(|(s, v, c)| {
            let lead = LaurentScalar::monomial(q(c), v, 1);
            let tail = LaurentScalar::new(s.terms().map(|(k, c)| (k.max(0) + v + 1, c.clone())), s.precision().map(|n| n + 10), 1);
            lead.checked_add(&tail).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            let ab_c = a.checked_mul(&b).unwrap().checked_mul(&c).unwrap();
            let a_bc = a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap();
            prop_assert!(ab_c.agrees_with(&a_bc));
            let lhs = a.checked_mul(&b.checked_add(&c).unwrap()).unwrap();
            let rhs = a.checked_mul(&b).unwrap().checked_add(&a.checked_mul(&c).unwrap()).unwrap();
            prop_assert!(lhs.agrees_with(&rhs));
            prop_assert_eq!(a.checked_mul(&b).unwrap(), b.checked_mul(&a).unwrap());
        }

        #[test]
        fn invert_then_multiply(a in arb_unit()) {
            let prod = a.checked_mul(&a.inverse().unwrap()).unwrap();
            prop_assert!(prod.agrees_with(&LaurentScalar::one(1)));
            prop_assert!(prod.precision().is_none_or(|n| n > 0));
        }

        #[test]
        fn reramify_is_a_homomorphism(a in arb_series(), b in arb_series(), m in 1u32..4) {
            let lhs = a.checked_mul(&b).unwrap().reramify(m);
            let rhs = a.reramify(m).checked_mul(&b.reramify(m)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn leibniz(a in arb_series(), b in arb_series()) {
            let lhs = a.checked_mul(&b).unwrap().derivative();
            let rhs = a.derivative().checked_mul(&b).unwrap()
                .checked_add(&a.checked_mul(&b.derivative()).unwrap()).unwrap();
            prop_assert!(lhs.agrees_with(&rhs));
        }
    }
}
