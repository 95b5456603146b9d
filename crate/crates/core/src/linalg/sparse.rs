//! Compressed sparse row storage for constraint matrices, plus the sparse
//! minimum-norm solve used once `[G; A]` outgrows dense factorization.
//!
//! Recursions stack constraint blocks whose fill is tiny (a few nonzeros per
//! row for state constraints in Invertible form), so `A` is kept in CSR form
//! everywhere and only densified on demand.

use super::Matrix;
use crate::error::{Error, Result};
use faer::Mat;
use faer::MatRef;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn from_dense(a: MatRef<'_, f64>) -> Self {
        let mut s = SparseMatrix::zeros(0, a.ncols());
        for i in 0..a.nrows() {
            s.push_row((0..a.ncols()).filter_map(|j| {
                let v = a[(i, j)];
                (v != 0.0).then_some((j, v))
            }));
        }
        s
    }

    /// Triplets may come in any order; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, trip: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for &(i, j, v) in trip {
            assert!(i < nrows && j < ncols, "triplet ({i},{j}) out of bounds");
            rows[i].push((j, v));
        }
        let mut s = SparseMatrix::zeros(0, ncols);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(r.len());
            for (j, v) in r {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => merged.push((j, v)),
                }
            }
            s.push_row(merged.into_iter().filter(|e| e.1 != 0.0));
        }
        s
    }

    /// Append a row; entries must have increasing column indices.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, f64)>) {
        for (j, v) in entries {
            debug_assert!(j < self.ncols);
            self.indices.push(j);
            self.data.push(v);
        }
        self.indptr.push(self.indices.len());
        self.nrows += 1;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.data[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        idx.binary_search(&j).map_or(0.0, |p| val[p])
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (idx, val) = self.row(i);
            idx.iter().zip(val).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (idx, val) = self.row(i);
                idx.iter().zip(val).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// `selfᵀ y`
    pub fn t_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows);
        let mut out = vec![0.0; self.ncols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                out[j] += v * yi;
            }
        }
        out
    }

    /// `self · b` for a dense `b`.
    pub fn mul_dense(&self, b: MatRef<'_, f64>) -> Matrix {
        assert_eq!(b.nrows(), self.ncols);
        let mut out = Mat::zeros(self.nrows, b.ncols());
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                for k in 0..b.ncols() {
                    out[(i, k)] += v * b[(j, k)];
                }
            }
        }
        out
    }

    pub fn scale_columns(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.ncols);
        let mut s = self.clone();
        for (v, &j) in s.data.iter_mut().zip(&s.indices) {
            *v *= d[j];
        }
        s.drop_zeros()
    }

    fn drop_zeros(self) -> Self {
        if self.data.iter().all(|v| *v != 0.0) {
            return self;
        }
        let mut s = SparseMatrix::zeros(0, self.ncols);
        for i in 0..self.nrows {
            let (idx, val) = self.row(i);
            s.push_row(idx.iter().zip(val).filter(|e| *e.1 != 0.0).map(|(&j, &v)| (j, v)));
        }
        s
    }

    /// Same rows, `extra` zero columns appended on the right.
    pub fn pad_cols(&self, extra: usize) -> Self {
        let mut s = self.clone();
        s.ncols += extra;
        s
    }

    /// Same rows, `extra` zero columns inserted on the left.
    pub fn shift_cols(&self, extra: usize) -> Self {
        let mut s = self.clone();
        s.ncols += extra;
        for j in s.indices.iter_mut() {
            *j += extra;
        }
        s
    }

    pub fn vstack(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.ncols, other.ncols, "vstack column mismatch");
        let mut s = self.clone();
        let off = s.indices.len();
        s.indices.extend_from_slice(&other.indices);
        s.data.extend_from_slice(&other.data);
        s.indptr.extend(other.indptr[1..].iter().map(|p| p + off));
        s.nrows += other.nrows;
        s
    }

    pub fn hstack(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.nrows, other.nrows, "hstack row mismatch");
        let mut s = SparseMatrix::zeros(0, self.ncols + other.ncols);
        for i in 0..self.nrows {
            let (li, lv) = self.row(i);
            let (ri, rv) = other.row(i);
            let left = li.iter().copied().zip(lv.iter().copied());
            let right = ri.iter().map(|j| j + self.ncols).zip(rv.iter().copied());
            s.push_row(left.chain(right));
        }
        s
    }

    pub fn block_diag(&self, other: &SparseMatrix) -> Self {
        self.pad_cols(other.ncols).vstack(&other.shift_cols(self.ncols))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut s = SparseMatrix::zeros(0, self.ncols);
        for &i in rows {
            let (idx, val) = self.row(i);
            s.push_row(idx.iter().copied().zip(val.iter().copied()));
        }
        s
    }
}

/// Minimum-norm solution of `P X = E` for a sparse wide `P` with full row
/// rank, through the symmetric quasi-definite system
///
/// ```text
/// [ I   Pᵀ ] [ X ]   [ 0 ]
/// [ P  -δI ] [ Y ] = [ E ]
/// ```
///
/// solved by sparse LU, followed by iterative refinement against the exact
/// (δ = 0) system. The tiny regularization keeps the pivots bounded away from
/// zero; refinement removes its bias.
pub fn sparse_min_norm_solve(p: &SparseMatrix, e: MatRef<'_, f64>) -> Result<Matrix> {
    use faer::linalg::solvers::Solve;
    use faer::sparse::{SparseColMat, Triplet};

    let (m, n) = p.shape();
    assert_eq!(e.nrows(), m);
    let k = e.ncols();
    let scale = p.data.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let delta = 1e-14 * scale * scale;
    let dim = n + m;
    let mut trip: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(2 * p.nnz() + dim);
    for j in 0..n {
        trip.push(Triplet::new(j, j, 1.0));
    }
    for (i, j, v) in p.triplets() {
        trip.push(Triplet::new(n + i, j, v));
        trip.push(Triplet::new(j, n + i, v));
    }
    for i in 0..m {
        trip.push(Triplet::new(n + i, n + i, -delta));
    }
    let kkt = SparseColMat::<usize, f64>::try_new_from_triplets(dim, dim, &trip)
        .map_err(|e| Error::NumericalFailure(format!("sparse assembly: {e:?}")))?;
    let lu = kkt
        .sp_lu()
        .map_err(|e| Error::NumericalFailure(format!("sparse LU: {e:?}")))?;

    let mut rhs = Mat::zeros(dim, k);
    for i in 0..m {
        for c in 0..k {
            rhs[(n + i, c)] = e[(i, c)];
        }
    }
    let mut sol = lu.solve(&rhs);
    let enorm = (0..k).map(|c| (0..m).map(|i| e[(i, c)].abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
    // refine on the unregularized system
    let mut rn = f64::INFINITY;
    for _ in 0..5 {
        let mut res = rhs.clone();
        for c in 0..k {
            for j in 0..n {
                res[(j, c)] -= sol[(j, c)];
            }
        }
        for (i, j, v) in p.triplets() {
            for c in 0..k {
                res[(n + i, c)] -= v * sol[(j, c)];
                res[(j, c)] -= v * sol[(n + i, c)];
            }
        }
        rn = super::max_abs(res.as_ref());
        if !rn.is_finite() {
            return Err(Error::NumericalFailure("sparse min-norm solve diverged".into()));
        }
        if rn <= 1e-13 * enorm.max(1.0) {
            break;
        }
        let corr = lu.solve(&res);
        sol += &corr;
    }
    if rn > 1e-8 * enorm.max(1.0) {
        // a consistent full-row-rank system converges in one or two steps
        return Err(Error::NumericalFailure(format!(
            "sparse min-norm solve stalled at residual {rn:.3e}; the matrix is likely rank deficient"
        )));
    }
    if !super::all_finite(sol.as_ref()) {
        return Err(Error::NumericalFailure("sparse min-norm solve produced non-finite values".into()));
    }
    Ok(sol.get(..n, ..).to_owned())
}
