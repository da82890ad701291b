//! Simple Lie algebras in a Chevalley-type basis with exact structure constants.
//!
//! Every basis element is a weight vector for the Cartan subalgebra; weights are
//! recorded in simple-root coordinates, so the principal grading of a basis
//! element is the sum of its weight coordinates. The algebra is treated as the
//! Lie algebra of the adjoint group: torus points are described by their values
//! on simple roots and the fundamental coweights are elements of the Cartan.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::{format_q, parse_q, q, Q};

/// Element of the algebra as a dense coefficient vector over the basis.
/// Sparse matrix as `(row, column, entry)` triples.
pub type SparseMatrix = Vec<(usize, usize, Q)>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieElement(pub Vec<Q>);

impl LieElement {
    pub fn zero(dim: usize) -> Self {
        LieElement(vec![Q::zero(); dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = Q::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coeff(&self, i: usize) -> &Q {
        &self.0[i]
    }

    /// Nonzero `(basis index, coefficient)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.0.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        LieElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        LieElement(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Q) -> Self {
        LieElement(self.0.iter().map(|a| a * c).collect())
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += b * c;
            }
        }
    }
}

type Bracket = Vec<(usize, Q)>;

/// A simple Lie algebra together with its root data, principal `sl2` triple and
/// Kostant slice.
#[derive(Clone, Debug)]
pub struct SimpleLieAlgebra {
    name: String,
    rank: usize,
    labels: Vec<String>,
    weights: Vec<Vec<i64>>,
    table: Vec<Vec<Bracket>>,
    killing: Matrix,
    cartan: Vec<usize>,
    simple_pos: Vec<usize>,
    simple_neg: Vec<usize>,
    heights: Vec<i64>,
    exponents: Vec<u32>,
    coxeter: u32,
    dual_coxeter: u32,
    rho_check: LieElement,
    coweights: Vec<LieElement>,
    p_minus: LieElement,
    p_plus: LieElement,
    vcan: Vec<(LieElement, u32)>,
    matrix_rep: Option<Vec<SparseMatrix>>,
}

impl SimpleLieAlgebra {
    /// `sl(l+1)` realized by trace-zero matrices.
    pub fn type_a(l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidAlgebra("rank must be positive".into()));
        }
        let n = l + 1;
        // positive roots E_ij (i < j), ordered by height then start
        let mut roots: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        roots.sort_by_key(|&(i, j)| (j - i, i));

        let root_label = |i: usize, j: usize| -> String {
            (i + 1..=j).map(|k| k.to_string()).collect::<String>()
        };
        let root_weight = |i: usize, j: usize| -> Vec<i64> {
            (0..l).map(|k| i64::from(k >= i && k < j)).collect()
        };

        let mut labels = Vec::new();
        let mut weights = Vec::new();
        let mut rep: Vec<SparseMatrix> = Vec::new();
        for &(i, j) in &roots {
            labels.push(if l == 1 { "e".into() } else { format!("e{}", root_label(i, j)) });
            weights.push(root_weight(i, j));
            rep.push(vec![(i, j, Q::one())]);
        }
        for &(i, j) in &roots {
            labels.push(if l == 1 { "f".into() } else { format!("f{}", root_label(i, j)) });
            weights.push(root_weight(i, j).iter().map(|x| -x).collect());
            rep.push(vec![(j, i, Q::one())]);
        }
        for k in 0..l {
            labels.push(if l == 1 { "h".into() } else { format!("h{}", k + 1) });
            weights.push(vec![0; l]);
            rep.push(vec![(k, k, Q::one()), (k + 1, k + 1, -Q::one())]);
        }

        let dim = labels.len();
        let dense = |m: &[(usize, usize, Q)]| -> Matrix {
            let mut out = linalg::zeros(n, n);
            for (r, c, v) in m {
                out[*r][*c] = v.clone();
            }
            out
        };
        let mats: Vec<Matrix> = rep.iter().map(|m| dense(m)).collect();
        let offdiag_index: BTreeMap<(usize, usize), usize> = rep[..2 * roots.len()]
            .iter()
            .enumerate()
            .map(|(idx, m)| ((m[0].0, m[0].1), idx))
            .collect();
        let h0 = 2 * roots.len();
        let coords = |m: &Matrix| -> Bracket {
            let mut out = Vec::new();
            for r in 0..n {
                for c in 0..n {
                    if r != c && !m[r][c].is_zero() {
                        out.push((offdiag_index[&(r, c)], m[r][c].clone()));
                    }
                }
            }
            let mut acc = Q::zero();
            for k in 0..l {
                acc += &m[k][k];
                if !acc.is_zero() {
                    out.push((h0 + k, acc.clone()));
                }
            }
            out.sort_by_key(|(i, _)| *i);
            out
        };
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                let ab = linalg::mat_mul(&mats[a], &mats[b]);
                let ba = linalg::mat_mul(&mats[b], &mats[a]);
                let comm: Matrix = ab
                    .iter()
                    .zip(&ba)
                    .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
                    .collect();
                table[a][b] = coords(&comm);
            }
        }
        Self::assemble(format!("A{l}"), l, labels, weights, table, Some(rep))
    }

    /// Builds an algebra from explicit structure constants, checking every
    /// structural invariant including the Jacobi identity.
    pub fn from_structure(
        name: String,
        rank: usize,
        labels: Vec<String>,
        weights: Vec<Vec<i64>>,
        table: Vec<Vec<Vec<(usize, Q)>>>,
    ) -> Result<Self> {
        let dim = labels.len();
        if weights.len() != dim || table.len() != dim || table.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidAlgebra("basis, weights and brackets disagree in size".into()));
        }
        check_antisymmetry(&table)?;
        check_jacobi(&table)?;
        let alg = Self::assemble(name, rank, labels, weights, table, None)?;
        alg.check_invariants()?;
        Ok(alg)
    }

    fn assemble(
        name: String,
        rank: usize,
        labels: Vec<String>,
        weights: Vec<Vec<i64>>,
        table: Vec<Vec<Bracket>>,
        matrix_rep: Option<Vec<SparseMatrix>>,
    ) -> Result<Self> {
        let dim = labels.len();
        let invalid = |msg: &str| Error::InvalidAlgebra(msg.to_string());
        if rank == 0 || weights.iter().any(|w| w.len() != rank) {
            return Err(invalid("weights must have one coordinate per simple root"));
        }
        let cartan: Vec<usize> = (0..dim).filter(|&i| weights[i].iter().all(|&x| x == 0)).collect();
        if cartan.len() != rank {
            return Err(invalid("number of zero-weight basis elements must equal the rank"));
        }
        let unit = |i: usize, sign: i64| -> Vec<i64> {
            (0..rank).map(|k| if k == i { sign } else { 0 }).collect()
        };
        let find_weight = |w: &[i64]| -> Result<usize> {
            let hits: Vec<usize> = (0..dim).filter(|&b| weights[b] == w).collect();
            match hits.as_slice() {
                [one] => Ok(*one),
                _ => Err(Error::InvalidAlgebra(format!("weight {w:?} must occur exactly once"))),
            }
        };
        let simple_pos = (0..rank).map(|i| find_weight(&unit(i, 1))).collect::<Result<Vec<_>>>()?;
        let simple_neg = (0..rank).map(|i| find_weight(&unit(i, -1))).collect::<Result<Vec<_>>>()?;
        let heights: Vec<i64> = weights.iter().map(|w| w.iter().sum()).collect();

        let mut alg = SimpleLieAlgebra {
            name,
            rank,
            labels,
            weights,
            table,
            killing: Vec::new(),
            cartan,
            simple_pos,
            simple_neg,
            heights,
            exponents: Vec::new(),
            coxeter: 0,
            dual_coxeter: 0,
            rho_check: LieElement::zero(dim),
            coweights: Vec::new(),
            p_minus: LieElement::zero(dim),
            p_plus: LieElement::zero(dim),
            vcan: Vec::new(),
            matrix_rep,
        };
        alg.killing = alg.compute_killing();

        // alpha_j(H) for the Cartan basis elements H
        let alpha_values: Matrix = alg
            .cartan
            .iter()
            .map(|&h| alg.simple_pos.iter().map(|&e| alg.bracket_coeff(h, e, e)).collect())
            .collect();
        let solve_cartan = |target: &[Q]| -> Result<LieElement> {
            // sum_k c_k alpha_values[k][j] = target[j]
            let system: Matrix = (0..rank)
                .map(|j| {
                    (0..rank)
                        .map(|k| alpha_values[k][j].clone())
                        .chain(std::iter::once(target[j].clone()))
                        .collect()
                })
                .collect();
            let (red, piv) = linalg::rref(&system);
            if piv.len() != rank || piv.iter().any(|&p| p >= rank) {
                return Err(Error::InvalidAlgebra("Cartan subalgebra does not separate simple roots".into()));
            }
            let mut out = LieElement::zero(dim);
            for k in 0..rank {
                out.0[alg.cartan[k]] = red[k][rank].clone();
            }
            Ok(out)
        };
        alg.rho_check = solve_cartan(&vec![Q::one(); rank])?;
        alg.coweights = (0..rank)
            .map(|i| solve_cartan(&(0..rank).map(|j| if i == j { Q::one() } else { Q::zero() }).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;

        for &f in &alg.simple_neg {
            alg.p_minus.0[f] += Q::one();
        }
        // p_1 = sum c_i e_i with [p_1, p_{-1}] = 2 rho_check
        let coroots: Vec<LieElement> = (0..rank)
            .map(|i| alg.bracket_basis(alg.simple_pos[i], alg.simple_neg[i]))
            .collect();
        let two_rho = alg.rho_check.scale(&q(2));
        let system: Matrix = alg
            .cartan
            .iter()
            .map(|&h| {
                coroots
                    .iter()
                    .map(|c| c.0[h].clone())
                    .chain(std::iter::once(two_rho.0[h].clone()))
                    .collect()
            })
            .collect();
        let (red, piv) = linalg::rref(&system);
        if piv.len() != rank || piv.iter().any(|&p| p >= rank) {
            return Err(invalid("simple coroots are not independent"));
        }
        for i in 0..rank {
            alg.p_plus.0[alg.simple_pos[i]] = red[i][rank].clone();
        }

        alg.vcan = alg.compute_vcan();
        alg.exponents = alg.vcan.iter().map(|(_, d)| *d).collect();
        let max_height = alg.heights.iter().copied().max().unwrap_or(0);
        alg.coxeter = (max_height + 1) as u32;
        alg.dual_coxeter = alg.compute_dual_coxeter(max_height)?;
        Ok(alg)
    }

    fn compute_killing(&self) -> Matrix {
        let dim = self.dim();
        let mut k = linalg::zeros(dim, dim);
        for a in 0..dim {
            for b in a..dim {
                // trace(ad a ad b) = sum_c coeff_c([a, [b, c]])
                let mut tr = Q::zero();
                for c in 0..dim {
                    for (d, x) in &self.table[b][c] {
                        for (e, y) in &self.table[a][*d] {
                            if *e == c {
                                tr += x * y;
                            }
                        }
                    }
                }
                k[a][b] = tr.clone();
                k[b][a] = tr;
            }
        }
        k
    }

    fn compute_vcan(&self) -> Vec<(LieElement, u32)> {
        let dim = self.dim();
        let max_height = self.heights.iter().copied().max().unwrap_or(0);
        let mut out = Vec::new();
        for d in 1..=max_height {
            let src: Vec<usize> = (0..dim).filter(|&b| self.heights[b] == d).collect();
            let dst: Vec<usize> = (0..dim).filter(|&b| self.heights[b] == d + 1).collect();
            let images: Vec<LieElement> = src
                .iter()
                .map(|&b| self.bracket(&self.p_plus, &LieElement::basis(dim, b)))
                .collect();
            let m: Matrix = dst
                .iter()
                .map(|&c| images.iter().map(|img| img.0[c].clone()).collect())
                .collect();
            let ker = if dst.is_empty() {
                linalg::identity(src.len())
            } else {
                linalg::kernel(&m, src.len())
            };
            for vec in ker {
                let mut el = LieElement::zero(dim);
                for (k, &b) in src.iter().enumerate() {
                    el.0[b] = vec[k].clone();
                }
                out.push((el, d as u32));
            }
        }
        out
    }

    fn compute_dual_coxeter(&self, max_height: i64) -> Result<u32> {
        let dim = self.dim();
        let theta = (0..dim)
            .find(|&b| self.heights[b] == max_height)
            .ok_or_else(|| Error::InvalidAlgebra("no highest root".into()))?;
        let neg: Vec<i64> = self.weights[theta].iter().map(|x| -x).collect();
        let f_theta = (0..dim)
            .find(|&b| self.weights[b] == neg)
            .ok_or_else(|| Error::InvalidAlgebra("highest root has no negative".into()))?;
        let h = self.bracket_basis(theta, f_theta);
        let theta_h = self.bracket(&h, &LieElement::basis(dim, theta)).0[theta].clone();
        if theta_h.is_zero() {
            return Err(Error::InvalidAlgebra("degenerate highest root".into()));
        }
        let coroot = h.scale(&(q(2) / theta_h));
        let hv = self.killing_form(&coroot, &coroot) / q(4);
        if !hv.is_integer() || hv <= Q::zero() {
            return Err(Error::InvalidAlgebra("Killing form is not normalized like a simple algebra".into()));
        }
        u32::try_from(hv.to_integer()).map_err(|_| Error::InvalidAlgebra("dual Coxeter number".into()))
    }

    /// Checks every structural invariant except Jacobi and antisymmetry (which
    /// are checked by [`SimpleLieAlgebra::check_structure`]).
    pub fn check_invariants(&self) -> Result<()> {
        let dim = self.dim();
        let bad = |m: &str| Err(Error::InvalidAlgebra(m.to_string()));
        for a in 0..dim {
            for b in 0..dim {
                if self.killing[a][b] != self.killing[b][a] {
                    return bad("Killing form is not symmetric");
                }
            }
        }
        if linalg::rank(&self.killing) != dim {
            return bad("Killing form is degenerate");
        }
        let two_rho = self.rho_check.scale(&q(2));
        if self.bracket(&self.p_plus, &self.p_minus) != two_rho {
            return bad("[p_1, p_-1] != 2 rho_check");
        }
        if self.bracket(&two_rho, &self.p_plus) != self.p_plus.scale(&q(2))
            || self.bracket(&two_rho, &self.p_minus) != self.p_minus.scale(&q(-2))
        {
            return bad("principal triple relations fail");
        }
        if self.vcan.len() != self.rank {
            return bad("Kostant slice has wrong dimension");
        }
        for (p, d) in &self.vcan {
            if !self.bracket(&self.p_plus, p).is_zero() {
                return bad("slice element not killed by ad p_1");
            }
            let degrees = self.principal_degree_decompose(p);
            if degrees.len() != 1 || !degrees.contains_key(&(*d as i64)) {
                return bad("slice element not homogeneous of its degree");
            }
            if self.is_ad_nilpotent(&self.p_minus.add(p)) {
                return bad("p_-1 + p_j is nilpotent");
            }
        }
        Ok(())
    }

    /// Antisymmetry and Jacobi on all basis pairs and triples.
    pub fn check_structure(&self) -> Result<()> {
        check_antisymmetry(&self.table)?;
        check_jacobi(&self.table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Weight of a basis element in simple-root coordinates.
    pub fn weight(&self, i: usize) -> &[i64] {
        &self.weights[i]
    }

    /// Principal degree (root height) of a basis element.
    pub fn height(&self, i: usize) -> i64 {
        self.heights[i]
    }

    pub fn cartan_indices(&self) -> &[usize] {
        &self.cartan
    }

    pub fn simple_positive(&self) -> &[usize] {
        &self.simple_pos
    }

    pub fn simple_negative(&self) -> &[usize] {
        &self.simple_neg
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn coxeter_number(&self) -> u32 {
        self.coxeter
    }

    pub fn dual_coxeter_number(&self) -> u32 {
        self.dual_coxeter
    }

    pub fn killing(&self, a: usize, b: usize) -> &Q {
        &self.killing[a][b]
    }

    pub fn killing_form(&self, x: &LieElement, y: &LieElement) -> Q {
        let mut acc = Q::zero();
        for (a, xa) in x.support() {
            for (b, yb) in y.support() {
                if !self.killing[a][b].is_zero() {
                    acc += xa * yb * &self.killing[a][b];
                }
            }
        }
        acc
    }

    /// Half the sum of the positive coroots: `alpha_i(rho_check) = 1`.
    pub fn rho_check(&self) -> &LieElement {
        &self.rho_check
    }

    /// Fundamental coweights: `alpha_j(coweight_i) = delta_ij`.
    pub fn fundamental_coweights(&self) -> &[LieElement] {
        &self.coweights
    }

    /// Sum of the negative simple root vectors.
    pub fn p_minus(&self) -> &LieElement {
        &self.p_minus
    }

    /// Completes `(p_minus, 2 rho_check, p_plus)` to an `sl2` triple.
    pub fn p_plus(&self) -> &LieElement {
        &self.p_plus
    }

    /// Homogeneous basis of the centralizer of `p_plus` in the nilradical, as
    /// `(element, principal degree)` ordered by degree.
    pub fn vcan_basis(&self) -> &[(LieElement, u32)] {
        &self.vcan
    }

    /// Standard representation matrices (type A only), one sparse matrix per basis element.
    pub fn matrix_rep(&self) -> Option<&[SparseMatrix]> {
        self.matrix_rep.as_deref()
    }

    pub fn is_type_a(&self) -> bool {
        self.matrix_rep.is_some()
    }

    pub fn bracket_basis(&self, a: usize, b: usize) -> LieElement {
        let mut out = LieElement::zero(self.dim());
        for (c, v) in &self.table[a][b] {
            out.0[*c] += v;
        }
        out
    }

    /// Structure constants `[b_a, b_b] = sum_c c b_c` as a sparse list.
    pub fn structure(&self, a: usize, b: usize) -> &[(usize, Q)] {
        &self.table[a][b]
    }

    fn bracket_coeff(&self, a: usize, b: usize, c: usize) -> Q {
        self.table[a][b]
            .iter()
            .find(|(i, _)| *i == c)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> LieElement {
        let mut out = LieElement::zero(self.dim());
        for (a, xa) in x.support() {
            for (b, yb) in y.support() {
                let s = xa * yb;
                for (c, v) in &self.table[a][b] {
                    out.0[*c] += &s * v;
                }
            }
        }
        out
    }

    /// Bracket that rejects operands from a different algebra.
    pub fn try_bracket(&self, x: &LieElement, y: &LieElement) -> Result<LieElement> {
        for z in [x, y] {
            if z.dim() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), found: z.dim() });
            }
        }
        Ok(self.bracket(x, y))
    }

    /// Matrix of `ad x` in the basis: column `b` holds `[x, b_b]`.
    pub fn ad_matrix(&self, x: &LieElement) -> Matrix {
        let dim = self.dim();
        let mut m = linalg::zeros(dim, dim);
        for (a, xa) in x.support() {
            for b in 0..dim {
                for (c, v) in &self.table[a][b] {
                    m[*c][b] += xa * v;
                }
            }
        }
        m
    }

    /// Decided by the characteristic polynomial of `ad x` being `T^dim`.
    pub fn is_ad_nilpotent(&self, x: &LieElement) -> bool {
        let cp = linalg::charpoly(&self.ad_matrix(x));
        cp[..cp.len() - 1].iter().all(Zero::is_zero)
    }

    pub fn principal_degree_decompose(&self, x: &LieElement) -> BTreeMap<i64, LieElement> {
        let mut out: BTreeMap<i64, LieElement> = BTreeMap::new();
        for (a, c) in x.support() {
            out.entry(self.heights[a])
                .or_insert_with(|| LieElement::zero(self.dim()))
                .0[a] = c.clone();
        }
        out
    }

    pub fn centralizer_dimension(&self, x: &LieElement) -> usize {
        self.dim() - linalg::rank(&self.ad_matrix(x))
    }

    /// Evaluation `alpha(H)` of a weight (simple-root coordinates) on a Cartan element.
    pub fn weight_on_cartan(&self, weight: &[i64], h: &LieElement) -> Q {
        let mut acc = Q::zero();
        for (i, &m) in weight.iter().enumerate() {
            if m != 0 {
                let e = self.simple_pos[i];
                acc += q(m) * self.bracket(h, &LieElement::basis(self.dim(), e)).0[e].clone();
            }
        }
        acc
    }

    pub fn element_from_labels(&self, pairs: &[(&str, Q)]) -> Result<LieElement> {
        let mut out = LieElement::zero(self.dim());
        for (label, c) in pairs {
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::Schema(format!("unknown basis label {label:?}")))?;
            out.0[i] += c;
        }
        Ok(out)
    }

    /// The structure-constant file describing this algebra.
    pub fn to_structure_file(&self) -> StructureFile {
        let mut brackets = Vec::new();
        for a in 0..self.dim() {
            for b in a + 1..self.dim() {
                if !self.table[a][b].is_empty() {
                    brackets.push(BracketEntry(
                        BasisRef::Index(a),
                        BasisRef::Index(b),
                        self.table[a][b].iter().map(|(c, v)| (BasisRef::Index(*c), format_q(v))).collect(),
                    ));
                }
            }
        }
        StructureFile {
            name: Some(self.name.clone()),
            rank: self.rank,
            basis: self.labels.clone(),
            weights: self.weights.clone(),
            brackets,
        }
    }
}

fn check_antisymmetry(table: &[Vec<Bracket>]) -> Result<()> {
    let dim = table.len();
    for a in 0..dim {
        for b in 0..dim {
            let mut sum = vec![Q::zero(); dim];
            for (c, v) in table[a][b].iter().chain(&table[b][a]) {
                sum[*c] += v;
            }
            if sum.iter().any(|x| !x.is_zero()) {
                return Err(Error::InvalidAlgebra(format!("antisymmetry fails for basis pair ({a}, {b})")));
            }
        }
    }
    Ok(())
}

fn check_jacobi(table: &[Vec<Bracket>]) -> Result<()> {
    let dim = table.len();
    let nested = |x: usize, y: usize, z: usize, acc: &mut Vec<Q>| {
        // [[x, y], z]
        for (w, v) in &table[x][y] {
            for (u, s) in &table[*w][z] {
                acc[*u] += v * s;
            }
        }
    };
    let mut acc = vec![Q::zero(); dim];
    for a in 0..dim {
        for b in a + 1..dim {
            for c in b + 1..dim {
                acc.iter_mut().for_each(|x| x.set_zero());
                nested(a, b, c, &mut acc);
                nested(b, c, a, &mut acc);
                nested(c, a, b, &mut acc);
                if acc.iter().any(|x| !x.is_zero()) {
                    return Err(Error::InvalidAlgebra(format!("Jacobi identity fails on ({a}, {b}, {c})")));
                }
            }
        }
    }
    Ok(())
}

/// Reference to a basis element in a structure file, by position or label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisRef {
    Index(usize),
    Label(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry(pub BasisRef, pub BasisRef, pub Vec<(BasisRef, String)>);

/// On-disk structure-constant description of a simple Lie algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rank: usize,
    pub basis: Vec<String>,
    pub weights: Vec<Vec<i64>>,
    pub brackets: Vec<BracketEntry>,
}

impl StructureFile {
    /// Validates the data and builds the algebra. Brackets listed in one order
    /// only are completed by antisymmetry.
    pub fn into_algebra(self) -> Result<SimpleLieAlgebra> {
        let dim = self.basis.len();
        let resolve = |r: &BasisRef| -> Result<usize> {
            match r {
                BasisRef::Index(i) if *i < dim => Ok(*i),
                BasisRef::Index(i) => Err(Error::InvalidAlgebra(format!("basis index {i} out of range"))),
                BasisRef::Label(l) => self
                    .basis
                    .iter()
                    .position(|b| b == l)
                    .ok_or_else(|| Error::InvalidAlgebra(format!("unknown basis label {l:?}"))),
            }
        };
        let mut given = vec![vec![None::<Bracket>; dim]; dim];
        for BracketEntry(a, b, terms) in &self.brackets {
            let (a, b) = (resolve(a)?, resolve(b)?);
            let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
            for (c, v) in terms {
                *acc.entry(resolve(c)?).or_insert_with(Q::zero) += parse_q(v)?;
            }
            let entry: Bracket = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            if given[a][b].is_some() {
                return Err(Error::InvalidAlgebra(format!("bracket ({a}, {b}) listed twice")));
            }
            given[a][b] = Some(entry);
        }
        let mut table = vec![vec![Vec::new(); dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                table[a][b] = match (&given[a][b], &given[b][a]) {
                    (Some(x), _) => x.clone(),
                    (None, Some(y)) => y.iter().map(|(c, v)| (*c, -v.clone())).collect(),
                    (None, None) => Vec::new(),
                };
            }
        }
        let name = self.name.clone().unwrap_or_else(|| "custom".into());
        SimpleLieAlgebra::from_structure(name, self.rank, self.basis, self.weights, table)
    }
}

/// Resolves `A1`..`A8` to the built-in type A algebras; anything else is read
/// as a structure-constant file path.
pub fn resolve_algebra(spec: &str) -> Result<SimpleLieAlgebra> {
    if let Some(rest) = spec.strip_prefix('A') {
        if let Ok(l) = rest.parse::<usize>() {
            if (1..=8).contains(&l) {
                return SimpleLieAlgebra::type_a(l);
            }
        }
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| Error::Schema(format!("cannot read algebra {spec:?}: {e}")))?;
    let file: StructureFile =
        serde_json::from_str(&text).map_err(|e| Error::Schema(format!("bad structure file: {e}")))?;
    file.into_algebra()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2() -> SimpleLieAlgebra {
        SimpleLieAlgebra::type_a(1).unwrap()
    }

    fn el(alg: &SimpleLieAlgebra, pairs: &[(&str, i64)]) -> LieElement {
        let owned: Vec<(&str, Q)> = pairs.iter().map(|(l, c)| (*l, q(*c))).collect();
        alg.element_from_labels(&owned).unwrap()
    }

    #[test]
    fn type_a_dimensions_and_exponents() {
        let a1 = sl2();
        assert_eq!(a1.dim(), 3);
        assert_eq!(a1.exponents(), &[1]);
        assert_eq!(a1.coxeter_number(), 2);
        assert_eq!(a1.dual_coxeter_number(), 2);
        let a2 = SimpleLieAlgebra::type_a(2).unwrap();
        assert_eq!(a2.dim(), 8);
        assert_eq!(a2.exponents(), &[1, 2]);
        assert_eq!(a2.coxeter_number(), 3);
        let a4 = SimpleLieAlgebra::type_a(4).unwrap();
        assert_eq!(a4.exponents(), &[1, 2, 3, 4]);
        assert_eq!(a4.dual_coxeter_number(), 5);
    }

    #[test]
    fn sl2_killing_values() {
        // tr(ad e ad f) and tr(ad h ad h) in the adjoint representation
        let a = sl2();
        let (e, f, h) = (a.index_of("e").unwrap(), a.index_of("f").unwrap(), a.index_of("h").unwrap());
        assert_eq!(a.killing(e, f), &q(4));
        assert_eq!(a.killing(h, h), &q(8));
        assert_eq!(a.killing(e, e), &q(0));
    }

    #[test]
    fn killing_is_trace_of_ad_product() {
        let a = SimpleLieAlgebra::type_a(2).unwrap();
        for x in 0..a.dim() {
            for y in 0..a.dim() {
                let prod = linalg::mat_mul(
                    &a.ad_matrix(&LieElement::basis(a.dim(), x)),
                    &a.ad_matrix(&LieElement::basis(a.dim(), y)),
                );
                let tr = (0..a.dim()).fold(Q::zero(), |acc, i| acc + &prod[i][i]);
                assert_eq!(&tr, a.killing(x, y));
            }
        }
    }

    #[test]
    fn sl2_brackets() {
        let a = sl2();
        assert_eq!(a.bracket(&el(&a, &[("e", 1)]), &el(&a, &[("f", 1)])), el(&a, &[("h", 1)]));
        let x = el(&a, &[("e", 3), ("f", -2), ("h", 5)]);
        assert!(a.bracket(&x, &x).is_zero());
        assert_eq!(a.bracket(a.p_plus(), a.p_minus()), a.rho_check().scale(&q(2)));
        assert_eq!(a.rho_check().scale(&q(2)), el(&a, &[("h", 1)]));
    }

    #[test]
    fn mismatched_algebra_is_rejected() {
        let a = sl2();
        let wrong = LieElement::zero(8);
        assert!(matches!(
            a.try_bracket(&wrong, a.p_plus()),
            Err(Error::DimensionMismatch { expected: 3, found: 8 })
        ));
    }

    #[test]
    fn nilpotency() {
        let a = sl2();
        assert!(a.is_ad_nilpotent(&el(&a, &[("e", 1)])));
        assert!(!a.is_ad_nilpotent(&el(&a, &[("h", 1)])));
        for l in 1..=3 {
            let alg = SimpleLieAlgebra::type_a(l).unwrap();
            for (p, _) in alg.vcan_basis() {
                assert!(!alg.is_ad_nilpotent(&alg.p_minus().add(p)));
            }
            assert!(alg.is_ad_nilpotent(alg.p_minus()));
        }
    }

    #[test]
    fn principal_degrees() {
        let a = sl2();
        let d = a.principal_degree_decompose(&el(&a, &[("e", 1), ("f", 1), ("h", 1)]));
        assert_eq!(d.len(), 3);
        assert_eq!(d[&1], el(&a, &[("e", 1)]));
        assert_eq!(d[&0], el(&a, &[("h", 1)]));
        assert_eq!(d[&-1], el(&a, &[("f", 1)]));
        assert!(a.principal_degree_decompose(&LieElement::zero(3)).is_empty());
        let a2 = SimpleLieAlgebra::type_a(2).unwrap();
        let d = a2.principal_degree_decompose(&el(&a2, &[("e12", 1)]));
        assert_eq!(d.keys().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn centralizers() {
        let a = sl2();
        assert_eq!(a.centralizer_dimension(&el(&a, &[("h", 1)])), 1);
        assert_eq!(a.centralizer_dimension(&LieElement::zero(3)), 3);
        assert_eq!(a.centralizer_dimension(&el(&a, &[("e", 1), ("f", 1)])), 1);
    }

    #[test]
    fn vcan_is_normalized() {
        let a2 = SimpleLieAlgebra::type_a(2).unwrap();
        let basis = a2.vcan_basis();
        assert_eq!(basis[0], (el(&a2, &[("e1", 1), ("e2", 1)]), 1));
        assert_eq!(basis[1], (el(&a2, &[("e12", 1)]), 2));
        assert_eq!(a2.p_plus(), &el(&a2, &[("e1", 2), ("e2", 2)]));
    }

    #[test]
    fn built_ins_satisfy_all_invariants() {
        for l in 1..=4 {
            let alg = SimpleLieAlgebra::type_a(l).unwrap();
            alg.check_structure().unwrap();
            alg.check_invariants().unwrap();
        }
    }

    #[test]
    fn structure_file_round_trip_and_rejection() {
        let a2 = SimpleLieAlgebra::type_a(2).unwrap();
        let file = a2.to_structure_file();
        let text = serde_json::to_string(&file).unwrap();
        let back: StructureFile = serde_json::from_str(&text).unwrap();
        let loaded = back.clone().into_algebra().unwrap();
        assert_eq!(loaded.exponents(), a2.exponents());
        assert_eq!(loaded.dual_coxeter_number(), 3);
        assert_eq!(loaded.vcan_basis(), a2.vcan_basis());

        // perturb one structure constant: Jacobi must fail
        let mut broken = back;
        let entry = broken
            .brackets
            .iter_mut()
            .find(|BracketEntry(_, _, terms)| terms.len() == 1)
            .unwrap();
        entry.2[0].1 = "2".into();
        assert!(matches!(broken.into_algebra(), Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn structure_file_with_labels() {
        let text = r#"{"rank": 1, "basis": ["e", "f", "h"], "weights": [[1], [-1], [0]],
            "brackets": [["e", "f", [["h", "1"]]], ["h", "e", [["e", "2"]]], ["h", "f", [["f", "-2"]]]]}"#;
        let file: StructureFile = serde_json::from_str(text).unwrap();
        let alg = file.into_algebra().unwrap();
        assert_eq!(alg.exponents(), &[1]);
        assert_eq!(alg.killing(0, 1), &q(4));
    }

    proptest::proptest! {
        #[test]
        fn killing_is_invariant(xs in proptest::collection::vec(-3i64..4, 24)) {
            let a = SimpleLieAlgebra::type_a(2).unwrap();
            let mk = |c: &[i64]| LieElement(c.iter().map(|&v| q(v)).collect());
            let (x, y, z) = (mk(&xs[0..8]), mk(&xs[8..16]), mk(&xs[16..24]));
            let lhs = a.killing_form(&a.bracket(&x, &y), &z) + a.killing_form(&y, &a.bracket(&x, &z));
            proptest::prop_assert!(lhs.is_zero());
        }

        #[test]
        fn kostant_slice_is_regular(cs in proptest::collection::vec(-5i64..6, 2)) {
            let a = SimpleLieAlgebra::type_a(2).unwrap();
            let mut x = a.p_minus().clone();
            for ((p, _), c) in a.vcan_basis().iter().zip(&cs) {
                x.add_scaled(p, &q(*c));
            }
            proptest::prop_assert_eq!(a.centralizer_dimension(&x), 2);
        }

        #[test]
        fn nilpotency_matches_power_of_ad(cs in proptest::collection::vec(-2i64..3, 8)) {
            let a = SimpleLieAlgebra::type_a(2).unwrap();
            let x = LieElement(cs.iter().map(|&v| q(v)).collect());
            let m = a.ad_matrix(&x);
            let mut p = linalg::identity(8);
            for _ in 0..8 {
                p = linalg::mat_mul(&p, &m);
            }
            let power_zero = p.iter().all(|r| r.iter().all(Zero::is_zero));
            proptest::prop_assert_eq!(a.is_ad_nilpotent(&x), power_zero);
        }
    }
}
