//! Fourier modes of normally ordered fields in the vacuum vertex algebra,
//! the quadratic Segal-Sugawara vector, and annihilation checks on `U_{x,r}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kac_moody::{act, induced_module, vacuum, Gen, InducedModuleSpec, Level, UElement, UMonomial};
use crate::lie::SimpleLieAlgebra;
use crate::linalg;
use crate::moy_prasad::ApartmentPoint;
use crate::rational::{binomial, ceil_i64, format_q, Q};

/// A state `x_{n_1} ... x_{n_k} |0>` with every `n_j < 0`, read as the
/// right-nested normally ordered product of the corresponding fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexElement(UElement);

impl VertexElement {
    pub fn new(u: UElement) -> Result<Self> {
        if u.terms().any(|(m, _)| m.iter().any(|g| g.n >= 0)) {
            return Err(Error::Schema("vertex elements use negative modes only".into()));
        }
        Ok(VertexElement(u))
    }

    pub fn as_uelement(&self) -> &UElement {
        &self.0
    }
}

/// `[x_n(z)]_m = (-1)^j C(m, j) x_{m+n+1}` with `j = -n-1`.
fn single_coefficient(n: i64, m: i64) -> (Q, i64) {
    let j = (-n - 1) as u32;
    let sign = if j.is_multiple_of(2) { Q::one() } else { -Q::one() };
    (sign * binomial(m, j), m + n + 1)
}

/// The `m`-th mode of the field of `A`, keeping only generator modes in `[-cutoff, cutoff]`.
pub fn fourier_coefficient(a: &VertexElement, m: i64, cutoff: i64) -> UElement {
    let mut out = UElement::zero();
    for (mon, c) in a.0.terms() {
        out = out.add(&word_coefficient(mon, m, cutoff).scale(c));
    }
    out
}

fn word_coefficient(gens: &[Gen], m: i64, cutoff: i64) -> UElement {
    match gens {
        [] => {
            if m == -1 {
                UElement::one()
            } else {
                UElement::zero()
            }
        }
        [g] => {
            let (c, mode) = single_coefficient(g.n, m);
            if mode.abs() > cutoff {
                UElement::zero()
            } else {
                UElement::generator(Gen::new(g.idx, mode)).scale(&c)
            }
        }
        [g, rest @ ..] => {
            let mut out = UElement::zero();
            // A_r is a single generator of mode r + n + 1
            let lo = -cutoff - g.n - 1;
            let hi = cutoff - g.n - 1;
            for r in lo..=hi {
                let a_r = word_coefficient(&[*g], r, cutoff);
                if a_r.is_zero() {
                    continue;
                }
                let b = word_coefficient(rest, m - 1 - r, cutoff);
                out = if r < 0 { out.add(&a_r.mul(&b)) } else { out.add(&b.mul(&a_r)) };
            }
            out
        }
    }
}

/// `A_{[m]} w` in `U_{x,r}`, computed exactly: every infinite mode sum is cut at a
/// point beyond which the summands provably act by zero.
pub fn act_fourier(alg: &SimpleLieAlgebra, spec: &InducedModuleSpec, a: &VertexElement, m: i64, w: &UElement) -> UElement {
    let mut out = UElement::zero();
    for (mon, c) in a.0.terms() {
        out = out.add(&act_word(alg, spec, mon, m, w).scale(c));
    }
    out
}

fn act_word(alg: &SimpleLieAlgebra, spec: &InducedModuleSpec, gens: &[Gen], m: i64, w: &UElement) -> UElement {
    if w.is_zero() {
        return UElement::zero();
    }
    match gens {
        [] => {
            if m == -1 {
                w.clone()
            } else {
                UElement::zero()
            }
        }
        [g] => {
            let (c, mode) = single_coefficient(g.n, m);
            if c.is_zero() {
                return UElement::zero();
            }
            act(alg, spec, &UElement::generator(Gen::new(g.idx, mode)), w).scale(&c)
        }
        [g, rest @ ..] => {
            let mut out = UElement::zero();
            // r < 0: A_r B_{m-1-r} w, with B_s w = 0 once s >= field_bound(B, w)
            if let Some(fb) = field_bound(alg, spec, rest, w) {
                for r in (m - fb).min(0)..0 {
                    let bw = act_word(alg, spec, rest, m - 1 - r, w);
                    if !bw.is_zero() {
                        out = out.add(&act_word(alg, spec, &[*g], r, &bw));
                    }
                }
            }
            // r >= 0: B_{m-1-r} A_r w, with A_r w = 0 once r >= field_bound(A, w)
            if let Some(fa) = field_bound(alg, spec, &[*g], w) {
                for r in 0..fa.max(0) {
                    let aw = act_word(alg, spec, &[*g], r, w);
                    if !aw.is_zero() {
                        out = out.add(&act_word(alg, spec, rest, m - 1 - r, &aw));
                    }
                }
            }
            out
        }
    }
}

/// A mode `s0` with `[word]_s w = 0` for all `s >= s0`; `None` when `w = 0`.
pub fn field_bound(alg: &SimpleLieAlgebra, spec: &InducedModuleSpec, gens: &[Gen], w: &UElement) -> Option<i64> {
    let t = spec.kill_bound(w)?;
    match gens {
        [] => Some(0),
        [g] => Some(t - g.n - 1),
        [g, rest @ ..] => {
            let mut bound = field_bound(alg, spec, rest, w).unwrap_or(i64::MIN);
            for r in 0..(t - g.n - 1).max(0) {
                let aw = act_word(alg, spec, &[*g], r, w);
                if let Some(b) = field_bound(alg, spec, rest, &aw) {
                    bound = bound.max(1 + r + b);
                }
            }
            Some(bound)
        }
    }
}

/// `S = 1/2 sum_a J^a_{-1} J_{a,-1}` for the form `Killing / (2 h^vee)`.
pub fn quadratic_sugawara(alg: &SimpleLieAlgebra) -> VertexElement {
    let scale = Q::one() / Q::from_integer((2 * i64::from(alg.dual_coxeter_number())).into());
    let gram: linalg::Matrix = (0..alg.dim())
        .map(|a| (0..alg.dim()).map(|b| alg.killing(a, b) * &scale).collect())
        .collect();
    let inv = linalg::inverse(&gram).expect("Killing form is nondegenerate");
    let half = Q::one() / Q::from_integer(2.into());
    let mut s = UElement::zero();
    for (a, row) in inv.iter().enumerate() {
        for (b, c) in row.iter().enumerate() {
            if !c.is_zero() {
                let m: UMonomial = [Gen::new(b, -1), Gen::new(a, -1)].into_iter().collect();
                s.add_term(m, c * &half);
            }
        }
    }
    VertexElement(s)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SSReport {
    pub degree: bool,
    pub length: bool,
    pub weight: bool,
    /// Modes at which centrality was probed; empty when not run.
    pub tested_modes: Vec<i64>,
    pub failures: Vec<String>,
}

impl SSReport {
    pub fn passed(&self) -> bool {
        self.degree && self.length && self.weight && self.failures.is_empty()
    }
}

/// Degree `-(d_i+1)`, at most `d_i+1` factors, and total weight zero for every word.
pub fn validate_ss_vector(alg: &SimpleLieAlgebra, s: &VertexElement, i: usize) -> Result<SSReport> {
    let d = i64::from(
        *alg.exponents()
            .get(i)
            .ok_or_else(|| Error::Schema(format!("no exponent with index {i}")))?,
    );
    let mut rep = SSReport { degree: true, length: true, weight: true, ..SSReport::default() };
    for (m, _) in s.0.terms() {
        let text = describe(alg, m);
        if m.iter().map(|g| g.n).sum::<i64>() != -(d + 1) {
            rep.degree = false;
            rep.failures.push(format!("degree of {text}"));
        }
        if m.len() as i64 > d + 1 {
            rep.length = false;
            rep.failures.push(format!("length of {text}"));
        }
        let mut weight = vec![0i64; alg.rank()];
        for g in m {
            for (acc, x) in weight.iter_mut().zip(alg.weight(g.idx)) {
                *acc += x;
            }
        }
        if weight.iter().any(|&x| x != 0) {
            rep.weight = false;
            rep.failures.push(format!("weight of {text}"));
        }
    }
    Ok(rep)
}

/// [`validate_ss_vector`] followed by a centrality probe on the critical vacuum
/// module: `[S_[n], y_p] w = 0` for `y_p` with `|p| <= 1` and `w` in `{v, x_{-1} v}`.
pub fn validate_with_centrality(
    alg: &SimpleLieAlgebra,
    s: &VertexElement,
    i: usize,
    modes: std::ops::RangeInclusive<i64>,
) -> Result<SSReport> {
    let mut rep = validate_ss_vector(alg, s, i)?;
    let spec = induced_module(alg, &ApartmentPoint::origin(alg.rank()), &Q::zero(), &Level::critical())?;
    let mut ws = vec![vacuum()];
    ws.extend((0..alg.dim()).map(|b| act(alg, &spec, &UElement::generator(Gen::new(b, -1)), &vacuum())));
    for n in modes {
        rep.tested_modes.push(n);
        for b in 0..alg.dim() {
            for p in -1..=1 {
                for w in &ws {
                    if !commutator_action(alg, &spec, s, n, Gen::new(b, p), w).is_zero() {
                        rep.failures.push(format!("[S_[{n}], {}_{p}] acts nontrivially", alg.label(b)));
                    }
                }
            }
        }
    }
    Ok(rep)
}

fn describe(alg: &SimpleLieAlgebra, m: &[Gen]) -> String {
    let parts: Vec<String> = m.iter().map(|g| format!("{}_{}", alg.label(g.idx), g.n)).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

/// `[S_[n], y] w` as a module action.
pub fn commutator_action(
    alg: &SimpleLieAlgebra,
    spec: &InducedModuleSpec,
    s: &VertexElement,
    n: i64,
    y: Gen,
    w: &UElement,
) -> UElement {
    let yv = UElement::generator(y);
    let lhs = act_fourier(alg, spec, s, n, &act(alg, spec, &yv, w));
    let rhs = act(alg, spec, &yv, &act_fourier(alg, spec, s, n, w));
    lhs.sub(&rhs)
}

/// Outcome of evaluating `S_[n] v` in `U_{x,r}` at the critical level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnihilationReport {
    pub modes: BTreeMap<i64, bool>,
    /// `ceil((d+1)(r+1))`.
    pub depth_bound: i64,
    /// Maximum over words of `-sum ceil(alpha_j(x) - r) + d + 1`.
    pub key_bound: i64,
    /// Per word `sum (r_alpha - n) - k`.
    pub field_bounds: Vec<(String, i64)>,
    pub nonzero_modes: Vec<i64>,
    pub violations: Vec<String>,
}

impl AnnihilationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::BoundViolation(self.violations.join("; ")))
        }
    }
}

/// `-sum ceil(alpha_j(x) - r) + d + 1` for one word.
pub fn key_bound(alg: &SimpleLieAlgebra, x: &ApartmentPoint, r: &Q, d: i64, m: &[Gen]) -> i64 {
    -m.iter().map(|g| ceil_i64(&(x.eval(alg.weight(g.idx)) - r))).sum::<i64>() + d + 1
}

/// `sum (r_alpha - n) - k` for one word.
pub fn creation_word_bound(spec: &InducedModuleSpec, m: &[Gen]) -> i64 {
    m.iter().map(|g| spec.power(g.idx) - g.n).sum::<i64>() - m.len() as i64
}

pub fn annihilation_check(
    alg: &SimpleLieAlgebra,
    s: &VertexElement,
    i: usize,
    x: &ApartmentPoint,
    r: &Q,
    modes: std::ops::RangeInclusive<i64>,
) -> Result<AnnihilationReport> {
    annihilation_check_at(alg, s, i, x, r, modes, &Level::critical())
}

pub fn annihilation_check_at(
    alg: &SimpleLieAlgebra,
    s: &VertexElement,
    i: usize,
    x: &ApartmentPoint,
    r: &Q,
    modes: std::ops::RangeInclusive<i64>,
    lvl: &Level,
) -> Result<AnnihilationReport> {
    let valid = validate_ss_vector(alg, s, i)?;
    if !valid.passed() {
        return Err(Error::Schema(format!("not a Segal-Sugawara vector: {}", valid.failures.join(", "))));
    }
    let spec = induced_module(alg, x, r, lvl)?;
    let d = i64::from(alg.exponents()[i]);
    let depth_bound = ceil_i64(&(Q::from_integer((d + 1).into()) * (r + Q::one())));
    let key = s.0.terms().map(|(m, _)| key_bound(alg, x, r, d, m)).max().unwrap_or(i64::MIN);
    let field_bounds: Vec<(String, i64)> =
        s.0.terms().map(|(m, _)| (describe(alg, m), creation_word_bound(&spec, m))).collect();

    let mut report = AnnihilationReport {
        modes: BTreeMap::new(),
        depth_bound,
        key_bound: key,
        field_bounds,
        nonzero_modes: Vec::new(),
        violations: Vec::new(),
    };
    if key > depth_bound {
        report.violations.push(format!("word bound {key} exceeds {depth_bound}"));
    }
    let v = vacuum();
    for n in modes {
        let zero = act_fourier(alg, &spec, s, n, &v).is_zero();
        report.modes.insert(n, zero);
        if !zero {
            report.nonzero_modes.push(n);
            if n >= depth_bound {
                report.violations.push(format!("mode {n} is nonzero above the bound {depth_bound}"));
            }
            if n >= key {
                report.violations.push(format!("mode {n} is nonzero above the word bound {key}"));
            }
        }
    }
    Ok(report)
}

/// Wire form of an annihilation report with modes as `"zero"`/`"nonzero"`.
pub fn report_to_json(report: &AnnihilationReport, r: &Q) -> serde_json::Value {
    let modes: BTreeMap<String, &str> = report
        .modes
        .iter()
        .map(|(n, z)| (n.to_string(), if *z { "zero" } else { "nonzero" }))
        .collect();
    serde_json::json!({
        "r": format_q(r),
        "modes": modes,
        "bound": report.depth_bound,
        "key_bound": report.key_bound,
        "field_bounds": report.field_bounds,
        "nonzero_modes": report.nonzero_modes,
        "violations": report.violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn sl2() -> SimpleLieAlgebra {
        SimpleLieAlgebra::type_a(1).unwrap()
    }

    fn g(alg: &SimpleLieAlgebra, label: &str, n: i64) -> Gen {
        Gen::new(alg.index_of(label).unwrap(), n)
    }

    #[test]
    fn single_field_modes() {
        let a = sl2();
        let e1 = VertexElement::new(UElement::generator(g(&a, "e", -1))).unwrap();
        let e2 = VertexElement::new(UElement::generator(g(&a, "e", -2))).unwrap();
        for m in -3..4 {
            assert_eq!(fourier_coefficient(&e1, m, 10), UElement::generator(g(&a, "e", m)));
            assert_eq!(fourier_coefficient(&e2, m, 10), UElement::generator(g(&a, "e", m - 1)).scale(&q(-m)));
        }
        assert!(VertexElement::new(UElement::generator(g(&a, "e", 0))).is_err());
    }

    #[test]
    fn two_factor_mode_matches_displayed_sum() {
        let a = sl2();
        let ef = VertexElement::new(UElement::from_gens(&[g(&a, "e", -1), g(&a, "f", -1)])).unwrap();
        let (m, cut) = (1i64, 4i64);
        let mut expect = UElement::zero();
        for r in -cut..=cut {
            let s = m - 1 - r;
            if s.abs() > cut {
                continue;
            }
            let (x, y) = (UElement::generator(g(&a, "e", r)), UElement::generator(g(&a, "f", s)));
            expect = expect.add(&if r < 0 { x.mul(&y) } else { y.mul(&x) });
        }
        assert_eq!(fourier_coefficient(&ef, m, cut), expect);
    }

    #[test]
    fn sl2_quadratic_vector() {
        let a = sl2();
        let s = quadratic_sugawara(&a);
        let mut expect = UElement::zero();
        expect.add_term([g(&a, "e", -1), g(&a, "f", -1)].into_iter().collect(), frac(1, 2));
        expect.add_term([g(&a, "f", -1), g(&a, "e", -1)].into_iter().collect(), frac(1, 2));
        expect.add_term([g(&a, "h", -1), g(&a, "h", -1)].into_iter().collect(), frac(1, 4));
        assert_eq!(s.as_uelement(), &expect);
        assert!(validate_ss_vector(&a, &s, 0).unwrap().passed());
    }

    #[test]
    fn centrality_probe() {
        let a = sl2();
        let rep = validate_with_centrality(&a, &quadratic_sugawara(&a), 0, 0..=2).unwrap();
        assert!(rep.passed() && rep.tested_modes == vec![0, 1, 2]);
        let ef = VertexElement::new(UElement::from_gens(&[g(&a, "e", -1), g(&a, "f", -1)])).unwrap();
        assert!(!validate_with_centrality(&a, &ef, 0, 0..=1).unwrap().passed());
    }

    #[test]
    fn validation_failures() {
        let a = sl2();
        let ee = VertexElement::new(UElement::from_gens(&[g(&a, "e", -1), g(&a, "e", -1)])).unwrap();
        let rep = validate_ss_vector(&a, &ee, 0).unwrap();
        assert!(!rep.weight && rep.degree);
        let ef = VertexElement::new(UElement::from_gens(&[g(&a, "e", -1), g(&a, "f", -2)])).unwrap();
        let rep = validate_ss_vector(&a, &ef, 0).unwrap();
        assert!(!rep.degree && rep.weight);
    }

    #[test]
    fn truncated_and_exact_actions_agree() {
        let a = sl2();
        let s = quadratic_sugawara(&a);
        let x = ApartmentPoint::barycentre(&a);
        let spec = induced_module(&a, &x, &frac(1, 2), &Level::critical()).unwrap();
        let w = act(&a, &spec, &UElement::from_gens(&[g(&a, "f", 0), g(&a, "e", -1)]), &vacuum());
        for m in -1..5 {
            let exact = act_fourier(&a, &spec, &s, m, &w);
            let truncated = act(&a, &spec, &fourier_coefficient(&s, m, 12), &w);
            assert_eq!(exact, truncated, "mode {m}");
        }
    }

    #[test]
    fn vacuum_bounds_for_sl2() {
        let a = sl2();
        let s = quadratic_sugawara(&a);
        let rep = annihilation_check(&a, &s, 0, &ApartmentPoint::origin(1), &q(0), 0..=6).unwrap();
        assert_eq!(rep.depth_bound, 2);
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.modes.range(2..).all(|(_, z)| *z));
        let rep = annihilation_check(&a, &s, 0, &ApartmentPoint::barycentre(&a), &frac(1, 2), 0..=7).unwrap();
        assert_eq!(rep.depth_bound, 3);
        assert!(rep.passed(), "{rep:?}");
        for n in 0..3 {
            let rep = annihilation_check(&a, &s, 0, &ApartmentPoint::origin(1), &q(n), 0..=2 * (n + 1) + 3).unwrap();
            assert_eq!(rep.depth_bound, 2 * (n + 1));
            assert!(rep.passed());
        }
    }

    #[test]
    fn sugawara_is_central_only_at_critical_level() {
        let a = sl2();
        let s = quadratic_sugawara(&a);
        let x = ApartmentPoint::origin(1);
        let crit = induced_module(&a, &x, &q(0), &Level::critical()).unwrap();
        let zero = induced_module(&a, &x, &q(0), &Level::zero()).unwrap();
        let w = act(&a, &crit, &UElement::generator(g(&a, "f", -1)), &vacuum());
        let mut seen_nonzero = false;
        for n in -1..3 {
            for y in [g(&a, "e", 1), g(&a, "f", -1), g(&a, "h", 0), g(&a, "e", -2)] {
                assert!(commutator_action(&a, &crit, &s, n, y, &w).is_zero());
                seen_nonzero |= !commutator_action(&a, &zero, &s, n, y, &w).is_zero();
            }
        }
        assert!(seen_nonzero);
    }
}
