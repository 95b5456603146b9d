//! Dense numerical kernels.
//!
//! Matrices are `faer::Mat<f64>`. Rank decisions use a relative tolerance
//! `tol · σ_max · max(rows, cols)`; the default `tol` is machine epsilon and
//! every rank-sensitive routine has a `_tol` variant taking it explicitly.

pub mod lp;
pub mod sparse;

use crate::error::{dim_err, Error, Result};
use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Par, Scale};

pub type Matrix = Mat<f64>;

pub const DEFAULT_RANK_TOL: f64 = f64::EPSILON;
/// Gram-Schmidt residuals carry more rounding than singular values do.
pub const ROW_SUBSET_TOL: f64 = 1e-10;

/// Build a matrix from row slices. All rows must have equal length.
pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Matrix {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.as_ref().len());
    Mat::from_fn(m, n, |i, j| rows[i].as_ref()[j])
}

pub fn to_rows(a: MatRef<'_, f64>) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

pub fn col_vec(v: &[f64]) -> Matrix {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

pub fn col_to_vec(a: MatRef<'_, f64>, j: usize) -> Vec<f64> {
    (0..a.nrows()).map(|i| a[(i, j)]).collect()
}

pub fn row_to_vec(a: MatRef<'_, f64>, i: usize) -> Vec<f64> {
    (0..a.ncols()).map(|j| a[(i, j)]).collect()
}

pub fn diag(d: &[f64]) -> Matrix {
    Mat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
}

pub fn scaled(a: MatRef<'_, f64>, s: f64) -> Matrix {
    Scale(s) * a
}

pub fn vstack(top: MatRef<'_, f64>, bottom: MatRef<'_, f64>) -> Matrix {
    assert_eq!(top.ncols(), bottom.ncols(), "vstack column mismatch");
    let m = top.nrows();
    Mat::from_fn(m + bottom.nrows(), top.ncols(), |i, j| {
        if i < m {
            top[(i, j)]
        } else {
            bottom[(i - m, j)]
        }
    })
}

pub fn hstack(left: MatRef<'_, f64>, right: MatRef<'_, f64>) -> Matrix {
    assert_eq!(left.nrows(), right.nrows(), "hstack row mismatch");
    let n = left.ncols();
    Mat::from_fn(left.nrows(), n + right.ncols(), |i, j| {
        if j < n {
            left[(i, j)]
        } else {
            right[(i, j - n)]
        }
    })
}

pub fn mat_vec(a: MatRef<'_, f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![0.0; a.nrows()];
    for j in 0..a.ncols() {
        let xj = x[j];
        if xj == 0.0 {
            continue;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += a[(i, j)] * xj;
        }
    }
    y
}

/// `aᵀ x`
pub fn mat_t_vec(a: MatRef<'_, f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(a.nrows(), x.len());
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)] * x[i]).sum())
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

pub fn all_finite(a: MatRef<'_, f64>) -> bool {
    (0..a.ncols()).all(|j| (0..a.nrows()).all(|i| a[(i, j)].is_finite()))
}

pub fn max_abs(a: MatRef<'_, f64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].abs());
        }
    }
    m
}

/// Minimum Frobenius-norm solution of `A X = B` for wide `A` with full row rank.
pub fn min_norm_solve(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Result<Matrix> {
    min_norm_solve_tol(a, b, DEFAULT_RANK_TOL)
}

/// As [`min_norm_solve`] with an explicit relative rank tolerance.
///
/// Column-pivoted QR of `Aᵀ`: `Aᵀ[:, π] = Q R`, hence row `π_j` of `A` is
/// `(Rᵀ Qᵀ)_j`. Solving `Rᵀ Y = B[π, :]` and taking `X = Q Y` gives the
/// solution in the row space of `A`, which is the minimum-norm one.
pub fn min_norm_solve_tol(a: MatRef<'_, f64>, b: MatRef<'_, f64>, tol: f64) -> Result<Matrix> {
    let (m, n) = a.shape();
    if b.nrows() != m {
        return dim_err(format!("min_norm_solve: A is {m}x{n}, B has {} rows", b.nrows()));
    }
    if m > n {
        return Err(Error::RankDeficient { rank: n, needed: m });
    }
    if m == 0 {
        return Ok(Mat::zeros(n, b.ncols()));
    }
    let qr = a.transpose().col_piv_qr();
    let r = qr.R();
    let rank = pivot_rank(r, m, n, tol);
    if rank < m {
        return Err(Error::RankDeficient { rank, needed: m });
    }
    let (fwd, _) = qr.P().arrays();
    let mut y = Mat::from_fn(m, b.ncols(), |i, j| b[(fwd[i], j)]);
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        r.get(..m, ..m).transpose(),
        y.as_mut(),
        Par::Seq,
    );
    let q = qr.compute_thin_Q();
    Ok(&q * &y)
}

/// Dense entry count of `A` above which [`min_norm_solve_sparse_or_dense`]
/// switches to the sparse factorization.
pub const SPARSE_SWITCH_ENTRIES: usize = 2_000_000;

/// Minimum-norm solve choosing the dense QR route for small `A` and the
/// sparse augmented-system route for large, sparse `A`.
pub fn min_norm_solve_sparse_or_dense(a: &sparse::SparseMatrix, b: MatRef<'_, f64>) -> Result<Matrix> {
    let (m, n) = a.shape();
    if m > n {
        return Err(Error::RankDeficient { rank: n, needed: m });
    }
    if m * n > SPARSE_SWITCH_ENTRIES && a.nnz() * 10 < m * n {
        sparse::sparse_min_norm_solve(a, b)
    } else {
        min_norm_solve(a.to_dense().as_ref(), b)
    }
}

/// Number of leading diagonal entries of a pivoted `R` above the rank threshold.
fn pivot_rank(r: MatRef<'_, f64>, m: usize, n: usize, tol: f64) -> usize {
    let size = m.min(n).min(r.nrows());
    if size == 0 {
        return 0;
    }
    let r00 = r[(0, 0)].abs();
    let thresh = tol * r00 * m.max(n) as f64;
    (0..size).take_while(|&i| r[(i, i)].abs() > thresh && r[(i, i)] != 0.0).count()
}

/// Count of singular values above `tol · σ_max · max(rows, cols)`.
pub fn numerical_rank(a: MatRef<'_, f64>, tol: f64) -> usize {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return 0;
    }
    let sv = match a.singular_values() {
        Ok(s) => s,
        // SVD failure only happens on non-finite input; fall back to pivoted QR.
        Err(_) => return pivot_rank(a.col_piv_qr().R(), m, n, tol),
    };
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    let thresh = tol * smax * m.max(n) as f64;
    sv.iter().filter(|&&s| s > thresh).count()
}

pub fn singular_values(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    a.singular_values()
        .map_err(|e| Error::NumericalFailure(format!("svd: {e:?}")))
}

/// Maximal independent row subset, chosen greedily in ascending row order.
pub fn independent_row_subset(a: MatRef<'_, f64>) -> Vec<usize> {
    independent_row_subset_tol(a, ROW_SUBSET_TOL)
}

/// Modified Gram-Schmidt with one reorthogonalization pass. A row is kept when
/// its residual against the rows kept so far exceeds the rank threshold.
pub fn independent_row_subset_tol(a: MatRef<'_, f64>, tol: f64) -> Vec<usize> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Vec::new();
    }
    let smax = match a.singular_values() {
        Ok(sv) => sv.iter().cloned().fold(0.0, f64::max),
        Err(_) => return Vec::new(),
    };
    if smax == 0.0 {
        return Vec::new();
    }
    let thresh = tol * smax * m.max(n) as f64;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut keep = Vec::new();
    for i in 0..m {
        let mut v = row_to_vec(a, i);
        for _ in 0..2 {
            for q in &basis {
                let p = dot(q, &v);
                for (vk, qk) in v.iter_mut().zip(q) {
                    *vk -= p * qk;
                }
            }
        }
        let nv = norm2(&v);
        if nv > thresh {
            for vk in v.iter_mut() {
                *vk /= nv;
            }
            basis.push(v);
            keep.push(i);
            if keep.len() == n {
                break;
            }
        }
    }
    keep
}

/// LU-based solve of a square system with a condition-number guard.
pub fn solve_square(a: MatRef<'_, f64>, b: MatRef<'_, f64>, max_cond: f64) -> Result<Matrix> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return dim_err(format!(
            "solve_square: A is {}x{}, B has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        ));
    }
    let c = condition_number(a)?;
    if !(c <= max_cond) {
        return Err(Error::NotInvertible(format!("condition number {c:.3e} exceeds {max_cond:.1e}")));
    }
    let lu = a.partial_piv_lu();
    Ok(lu.solve(b))
}

/// 2-norm condition number from singular values (infinite when singular).
pub fn condition_number(a: MatRef<'_, f64>) -> Result<f64> {
    if a.nrows() == 0 {
        return Ok(1.0);
    }
    let sv = singular_values(a)?;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if smin == 0.0 { f64::INFINITY } else { smax / smin })
}

pub fn inverse(a: MatRef<'_, f64>, max_cond: f64) -> Result<Matrix> {
    solve_square(a, Mat::<f64>::identity(a.nrows(), a.nrows()).as_ref(), max_cond)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential: scaling and squaring around the degree-13 Padé approximant.
pub fn expm(a: MatRef<'_, f64>) -> Matrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = Scale(0.5f64.powi(s)) * a;
    let b = &PADE13;
    let id = Mat::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (Scale(b[13]) * &a6 + Scale(b[11]) * &a4 + Scale(b[9]) * &a2);
    let u = &a
        * (inner_u + Scale(b[7]) * &a6 + Scale(b[5]) * &a4 + Scale(b[3]) * &a2 + Scale(b[1]) * &id);
    let inner_v = &a6 * (Scale(b[12]) * &a6 + Scale(b[10]) * &a4 + Scale(b[8]) * &a2);
    let v = inner_v + Scale(b[6]) * &a6 + Scale(b[4]) * &a4 + Scale(b[2]) * &a2 + Scale(b[0]) * &id;
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.partial_piv_lu().solve(&p);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
