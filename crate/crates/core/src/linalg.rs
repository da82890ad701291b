//! Dense exact linear algebra over `Q`.

use num_traits::{One, Zero};

use crate::rational::Q;

pub type Matrix = Vec<Vec<Q>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Q::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &Matrix, v: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .fold(Q::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

/// Reduced row echelon form; returns the reduced matrix and its pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = Q::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                for j in c..cols {
                    if !a[r][j].is_zero() {
                        let delta = &factor * &a[r][j];
                        a[i][j] -= delta;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Basis of the right kernel `{v : m v = 0}`, in reduced echelon form: each
/// basis vector has first nonzero coordinate equal to one.
pub fn kernel(m: &Matrix, cols: usize) -> Vec<Vec<Q>> {
    let (a, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let raw: Matrix = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -a[row][f].clone();
            }
            v
        })
        .collect();
    if raw.is_empty() {
        return raw;
    }
    let (basis, piv) = rref(&raw);
    basis.into_iter().take(piv.len()).collect()
}

/// Inverse of a square matrix, `None` if singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let (red, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    aug = red;
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Characteristic polynomial `det(T - m)` as coefficients `c[0] + c[1] T + ... + T^n`,
/// via similarity reduction to upper Hessenberg form.
pub fn charpoly(m: &Matrix) -> Vec<Q> {
    let n = m.len();
    let mut h = m.clone();
    for col in 0..n.saturating_sub(2) {
        let Some(p) = (col + 1..n).find(|&i| !h[i][col].is_zero()) else {
            continue;
        };
        if p != col + 1 {
            h.swap(p, col + 1);
            for row in h.iter_mut() {
                row.swap(p, col + 1);
            }
        }
        let pivot = h[col + 1][col].clone();
        for i in col + 2..n {
            if h[i][col].is_zero() {
                continue;
            }
            let factor = &h[i][col] / &pivot;
            // row_i -= factor * row_{col+1}
            for j in 0..n {
                if !h[col + 1][j].is_zero() {
                    let delta = &factor * &h[col + 1][j];
                    h[i][j] -= delta;
                }
            }
            // col_{col+1} += factor * col_i
            for row in h.iter_mut() {
                if !row[i].is_zero() {
                    let delta = &factor * &row[i];
                    row[col + 1] += delta;
                }
            }
        }
    }
    // p_k(T) = charpoly of the leading k x k block.
    let mut polys: Vec<Vec<Q>> = vec![vec![Q::one()]];
    for k in 0..n {
        let mut next = shift_poly(&polys[k]);
        sub_assign_scaled(&mut next, &polys[k], &h[k][k]);
        let mut prod = Q::one();
        for i in (0..k).rev() {
            prod *= &h[i + 1][i];
            if prod.is_zero() {
                break;
            }
            let coef = &prod * &h[i][k];
            sub_assign_scaled(&mut next, &polys[i], &coef);
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn shift_poly(p: &[Q]) -> Vec<Q> {
    std::iter::once(Q::zero()).chain(p.iter().cloned()).collect()
}

fn sub_assign_scaled(acc: &mut [Q], p: &[Q], scale: &Q) {
    if scale.is_zero() {
        return;
    }
    for (a, c) in acc.iter_mut().zip(p) {
        if !c.is_zero() {
            *a -= c * scale;
        }
    }
}
