//! Set types and support/membership oracles.

use crate::error::{dim_err, Error, Result};
use crate::linalg::lp::{lp_solve, LpOutcome, LpProblem};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::{self, Matrix};
use faer::Mat;
use std::fmt;
use std::sync::Arc;

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;

/// `{G ξ + c : ‖ξ‖∞ ≤ 1, A ξ = b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstrainedZonotope {
    g: Matrix,
    c: Vec<f64>,
    a: SparseMatrix,
    b: Vec<f64>,
}

impl ConstrainedZonotope {
    pub fn new(g: Matrix, c: Vec<f64>, a: Matrix, b: Vec<f64>) -> Result<Self> {
        Self::from_sparse(g, c, SparseMatrix::from_dense(a.as_ref()), b)
    }

    pub fn from_sparse(g: Matrix, c: Vec<f64>, a: SparseMatrix, b: Vec<f64>) -> Result<Self> {
        if g.nrows() != c.len() {
            return dim_err(format!("G has {} rows, c has length {}", g.nrows(), c.len()));
        }
        if a.ncols() != g.ncols() {
            return dim_err(format!("A has {} columns, G has {}", a.ncols(), g.ncols()));
        }
        if a.nrows() != b.len() {
            return dim_err(format!("A has {} rows, b has length {}", a.nrows(), b.len()));
        }
        if !linalg::all_finite(g.as_ref()) || !a.all_finite() || !c.iter().chain(&b).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("constrained zonotope has non-finite entries".into()));
        }
        Ok(ConstrainedZonotope { g, c, a, b })
    }

    pub fn zonotope(g: Matrix, c: Vec<f64>) -> Result<Self> {
        let n = g.ncols();
        Self::from_sparse(g, c, SparseMatrix::zeros(0, n), Vec::new())
    }

    /// `[-1, 1]ⁿ`
    pub fn unit_box(n: usize) -> Self {
        Self::zonotope(Mat::identity(n, n), vec![0.0; n]).unwrap()
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn interval_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return dim_err("box bounds differ in length");
        }
        let half: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| (h - l) / 2.0).collect();
        let mid: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| (h + l) / 2.0).collect();
        Self::zonotope(linalg::diag(&half), mid)
    }

    /// The canonical empty set in `ℝⁿ`: one generator constrained to `ξ = 2`.
    pub fn empty(n: usize) -> Self {
        let mut a = SparseMatrix::zeros(0, 1);
        a.push_row([(0, 1.0)]);
        ConstrainedZonotope { g: Mat::zeros(n, 1), c: vec![0.0; n], a, b: vec![2.0] }
    }

    /// Singleton `{x}`.
    pub fn point(x: &[f64]) -> Self {
        Self::zonotope(Mat::zeros(x.len(), 0), x.to_vec()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn n_gen(&self) -> usize {
        self.g.ncols()
    }

    pub fn n_con(&self) -> usize {
        self.a.nrows()
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn a_dense(&self) -> Matrix {
        self.a.to_dense()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `[G; A]` as a dense matrix.
    pub fn stacked(&self) -> Matrix {
        linalg::vstack(self.g.as_ref(), self.a.to_dense().as_ref())
    }

    /// `[G; A]` in sparse form.
    pub fn stacked_sparse(&self) -> SparseMatrix {
        SparseMatrix::from_dense(self.g.as_ref()).vstack(&self.a)
    }

    pub fn complexity(&self) -> ReprComplexity {
        repr_complexity(self)
    }

    pub fn translate(&self, t: &[f64]) -> Self {
        assert_eq!(t.len(), self.dim());
        let mut s = self.clone();
        for (ci, ti) in s.c.iter_mut().zip(t) {
            *ci += ti;
        }
        s
    }

    pub fn into_parts(self) -> (Matrix, Vec<f64>, SparseMatrix, Vec<f64>) {
        (self.g, self.c, self.a, self.b)
    }
}

/// Symmetric convex compact set, mostly an affine image of a unit norm ball.
#[derive(Clone)]
pub enum SymmetricSet {
    /// `G B∞ + c`
    Zonotope { g: Matrix, c: Vec<f64> },
    /// `G B₂ + c`
    Ellipsoid { g: Matrix, c: Vec<f64> },
    /// `G B₁ + c`
    CrossPolytope { g: Matrix, c: Vec<f64> },
    /// Any symmetric set given by the support function of `S - c`.
    Generic { c: Vec<f64>, support: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> },
}

impl fmt::Debug for SymmetricSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetricSet::Zonotope { g, c } => f.debug_struct("Zonotope").field("g", g).field("c", c).finish(),
            SymmetricSet::Ellipsoid { g, c } => f.debug_struct("Ellipsoid").field("g", g).field("c", c).finish(),
            SymmetricSet::CrossPolytope { g, c } => {
                f.debug_struct("CrossPolytope").field("g", g).field("c", c).finish()
            }
            SymmetricSet::Generic { c, .. } => f.debug_struct("Generic").field("c", c).finish_non_exhaustive(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetricKind {
    Zonotope,
    Ellipsoid,
    CrossPolytope,
    Generic,
}

impl SymmetricSet {
    pub fn zonotope(g: Matrix, c: Vec<f64>) -> Result<Self> {
        check_gc(&g, &c)?;
        Ok(SymmetricSet::Zonotope { g, c })
    }

    /// Primitive ellipsoids take a square shape matrix.
    pub fn ellipsoid(g: Matrix, c: Vec<f64>) -> Result<Self> {
        check_gc(&g, &c)?;
        if g.nrows() != g.ncols() {
            return dim_err(format!("ellipsoid shape matrix must be square, got {}x{}", g.nrows(), g.ncols()));
        }
        Ok(SymmetricSet::Ellipsoid { g, c })
    }

    pub fn cross_polytope(g: Matrix, c: Vec<f64>) -> Result<Self> {
        check_gc(&g, &c)?;
        Ok(SymmetricSet::CrossPolytope { g, c })
    }

    pub fn generic(c: Vec<f64>, support: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        SymmetricSet::Generic { c, support: Arc::new(support) }
    }

    pub fn point(c: Vec<f64>) -> Self {
        SymmetricSet::Zonotope { g: Mat::zeros(c.len(), 0), c }
    }

    pub fn kind(&self) -> SymmetricKind {
        match self {
            SymmetricSet::Zonotope { .. } => SymmetricKind::Zonotope,
            SymmetricSet::Ellipsoid { .. } => SymmetricKind::Ellipsoid,
            SymmetricSet::CrossPolytope { .. } => SymmetricKind::CrossPolytope,
            SymmetricSet::Generic { .. } => SymmetricKind::Generic,
        }
    }

    pub fn dim(&self) -> usize {
        self.center().len()
    }

    pub fn center(&self) -> &[f64] {
        match self {
            SymmetricSet::Zonotope { c, .. }
            | SymmetricSet::Ellipsoid { c, .. }
            | SymmetricSet::CrossPolytope { c, .. }
            | SymmetricSet::Generic { c, .. } => c,
        }
    }

    /// Generator matrix of the closed-form kinds.
    pub fn generators(&self) -> Option<&Matrix> {
        match self {
            SymmetricSet::Zonotope { g, .. }
            | SymmetricSet::Ellipsoid { g, .. }
            | SymmetricSet::CrossPolytope { g, .. } => Some(g),
            SymmetricSet::Generic { .. } => None,
        }
    }

    /// `ρ_{S−c}(ν)`.
    pub fn support_centered(&self, nu: &[f64]) -> Result<f64> {
        if nu.len() != self.dim() {
            return dim_err(format!("direction has length {}, set lives in R^{}", nu.len(), self.dim()));
        }
        Ok(match self {
            SymmetricSet::Zonotope { g, .. } => linalg::norm1(&linalg::mat_t_vec(g.as_ref(), nu)),
            SymmetricSet::Ellipsoid { g, .. } => linalg::norm2(&linalg::mat_t_vec(g.as_ref(), nu)),
            SymmetricSet::CrossPolytope { g, .. } => linalg::norm_inf(&linalg::mat_t_vec(g.as_ref(), nu)),
            SymmetricSet::Generic { support, .. } => support(nu),
        })
    }

    /// `ρ_S(ν) = νᵀc + ρ_{S−c}(ν)`.
    pub fn support(&self, nu: &[f64]) -> Result<f64> {
        Ok(linalg::dot(nu, self.center()) + self.support_centered(nu)?)
    }

    /// A maximizer of `νᵀs` over `S`; `None` for generic sets.
    pub fn support_vector(&self, nu: &[f64]) -> Result<Option<Vec<f64>>> {
        if nu.len() != self.dim() {
            return dim_err(format!("direction has length {}, set lives in R^{}", nu.len(), self.dim()));
        }
        let coeffs = match self {
            SymmetricSet::Zonotope { g, .. } => {
                linalg::mat_t_vec(g.as_ref(), nu).into_iter().map(|v| if v >= 0.0 { 1.0 } else { -1.0 }).collect()
            }
            SymmetricSet::Ellipsoid { g, .. } => {
                let w = linalg::mat_t_vec(g.as_ref(), nu);
                let r = linalg::norm2(&w);
                if r == 0.0 { vec![0.0; w.len()] } else { w.into_iter().map(|v| v / r).collect() }
            }
            SymmetricSet::CrossPolytope { g, .. } => {
                let w = linalg::mat_t_vec(g.as_ref(), nu);
                let mut e = vec![0.0; w.len()];
                if let Some((i, v)) = w.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())) {
                    e[i] = if *v >= 0.0 { 1.0 } else { -1.0 };
                }
                e
            }
            SymmetricSet::Generic { .. } => return Ok(None),
        };
        let g = self.generators().expect("closed-form kind");
        let mut x = linalg::mat_vec(g.as_ref(), &coeffs);
        for (xi, ci) in x.iter_mut().zip(self.center()) {
            *xi += ci;
        }
        Ok(Some(x))
    }

    /// `F S` for `F` with `dim` columns. Ellipsoid images may have a
    /// rectangular shape matrix (degenerate ellipsoids).
    pub fn affine_image(&self, f: &Matrix) -> Result<Self> {
        if f.ncols() != self.dim() {
            return dim_err(format!("map has {} columns, set lives in R^{}", f.ncols(), self.dim()));
        }
        let c = linalg::mat_vec(f.as_ref(), self.center());
        Ok(match self {
            SymmetricSet::Zonotope { g, .. } => SymmetricSet::Zonotope { g: f * g, c },
            SymmetricSet::Ellipsoid { g, .. } => SymmetricSet::Ellipsoid { g: f * g, c },
            SymmetricSet::CrossPolytope { g, .. } => SymmetricSet::CrossPolytope { g: f * g, c },
            SymmetricSet::Generic { support, .. } => {
                let support = support.clone();
                let f = f.clone();
                SymmetricSet::Generic {
                    c,
                    support: Arc::new(move |nu: &[f64]| support(&linalg::mat_t_vec(f.as_ref(), nu))),
                }
            }
        })
    }

    /// `α (S − c) + α c`, i.e. the set scaled about the origin.
    pub fn scaled(&self, alpha: f64) -> Self {
        let c: Vec<f64> = self.center().iter().map(|v| alpha * v).collect();
        match self {
            SymmetricSet::Zonotope { g, .. } => SymmetricSet::Zonotope { g: linalg::scaled(g.as_ref(), alpha), c },
            SymmetricSet::Ellipsoid { g, .. } => SymmetricSet::Ellipsoid { g: linalg::scaled(g.as_ref(), alpha), c },
            SymmetricSet::CrossPolytope { g, .. } => {
                SymmetricSet::CrossPolytope { g: linalg::scaled(g.as_ref(), alpha), c }
            }
            SymmetricSet::Generic { support, .. } => {
                let support = support.clone();
                let a = alpha.abs();
                SymmetricSet::Generic { c, support: Arc::new(move |nu: &[f64]| a * support(nu)) }
            }
        }
    }

    /// Zonotopes are constrained zonotopes with no constraints.
    pub fn to_czono(&self) -> Option<ConstrainedZonotope> {
        match self {
            SymmetricSet::Zonotope { g, c } => ConstrainedZonotope::zonotope(g.clone(), c.clone()).ok(),
            _ => None,
        }
    }

    /// Smallest axis-aligned box (as a zonotope) containing the set.
    pub fn bounding_box(&self) -> Result<Self> {
        let n = self.dim();
        let mut half = vec![0.0; n];
        for (i, h) in half.iter_mut().enumerate() {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            *h = self.support_centered(&e)?;
        }
        Ok(SymmetricSet::Zonotope { g: linalg::diag(&half), c: self.center().to_vec() })
    }
}

fn check_gc(g: &Matrix, c: &[f64]) -> Result<()> {
    if g.nrows() != c.len() {
        return dim_err(format!("G has {} rows, c has length {}", g.nrows(), c.len()));
    }
    if !linalg::all_finite(g.as_ref()) || !c.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("set has non-finite entries".into()));
    }
    Ok(())
}

/// `{x : H x ≤ k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolyhedron {
    pub h: Matrix,
    pub k: Vec<f64>,
    pub bounded_hint: Option<bool>,
}

impl HPolyhedron {
    pub fn new(h: Matrix, k: Vec<f64>) -> Result<Self> {
        if h.nrows() != k.len() {
            return dim_err(format!("H has {} rows, k has length {}", h.nrows(), k.len()));
        }
        if !linalg::all_finite(h.as_ref()) || !k.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("polyhedron has non-finite entries".into()));
        }
        Ok(HPolyhedron { h, k, bounded_hint: None })
    }

    /// `{lo ≤ x ≤ hi}` as `[I; −I] x ≤ [hi; −lo]`.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let n = lo.len();
        if hi.len() != n {
            return dim_err("box bounds differ in length");
        }
        let h = Mat::from_fn(2 * n, n, |i, j| {
            if i == j {
                1.0
            } else if i == j + n {
                -1.0
            } else {
                0.0
            }
        });
        let k = hi.iter().copied().chain(lo.iter().map(|v| -v)).collect();
        let mut p = Self::new(h, k)?;
        p.bounded_hint = Some(true);
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.h.ncols()
    }

    pub fn n_rows(&self) -> usize {
        self.h.nrows()
    }

    pub fn row(&self, i: usize) -> Halfspace {
        Halfspace { p: linalg::row_to_vec(self.h.as_ref(), i), q: self.k[i] }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        linalg::mat_vec(self.h.as_ref(), x).iter().zip(&self.k).all(|(hx, k)| *hx <= k + tol)
    }

    /// LP support function; `None` when the polyhedron is empty,
    /// `f64::INFINITY` when unbounded in direction `ν`.
    pub fn support(&self, nu: &[f64]) -> Result<Option<f64>> {
        if nu.len() != self.dim() {
            return dim_err("direction length differs from polyhedron dimension");
        }
        let p = LpProblem::new(nu.to_vec()).with_ineq(self.h.clone(), self.k.clone());
        Ok(match lp_solve(&p)? {
            LpOutcome::Optimal { value, .. } => Some(value),
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => Some(f64::INFINITY),
        })
    }

    /// Stack the rows of two polyhedra.
    pub fn intersect(&self, other: &HPolyhedron) -> Result<Self> {
        if self.dim() != other.dim() {
            return dim_err("polyhedra live in different dimensions");
        }
        let h = linalg::vstack(self.h.as_ref(), other.h.as_ref());
        let k = self.k.iter().chain(&other.k).copied().collect();
        Self::new(h, k)
    }

    /// Drop rows implied by the others, keeping the input order of the rest.
    ///
    /// Clarkson's scheme: each row is tested by an LP over the rows already
    /// known to be irredundant; when the test point escapes, a ray from an
    /// interior point finds one more irredundant row. LPs stay as small as
    /// the output. Falls back to one full LP per row when no interior point
    /// exists (empty or flat polyhedra).
    pub fn remove_redundant(&self) -> Result<Self> {
        let (rows, n) = (self.n_rows(), self.dim());
        let mut hn = Mat::<f64>::zeros(rows, n);
        let mut kn = vec![0.0; rows];
        let mut zero_rows = Vec::new();
        for i in 0..rows {
            let h = linalg::row_to_vec(self.h.as_ref(), i);
            let s = linalg::norm2(&h);
            if s == 0.0 {
                zero_rows.push(i);
                continue;
            }
            for j in 0..n {
                hn[(i, j)] = h[j] / s;
            }
            kn[i] = self.k[i] / s;
        }
        if let Some(&i) = zero_rows.iter().find(|&&i| self.k[i] < 0.0) {
            // 0 ≤ k < 0 alone makes the set empty
            return self.select(&[i]);
        }
        let live: Vec<usize> = (0..rows).filter(|i| !zero_rows.contains(i)).collect();
        let Some(z) = chebyshev_center(&hn, &kn, &live)? else {
            return self.remove_redundant_naive();
        };
        let mut irr: Vec<bool> = vec![false; rows];
        let mut irr_list: Vec<usize> = Vec::new();
        let tol = |k: f64| 1e-9 * k.abs().max(1.0);
        for &i in &live {
            if irr[i] {
                continue;
            }
            loop {
                let mut set = irr_list.clone();
                set.push(i);
                let h = Mat::from_fn(set.len(), n, |r, c| hn[(set[r], c)]);
                let mut k: Vec<f64> = set.iter().map(|&j| kn[j]).collect();
                *k.last_mut().unwrap() += 1.0;
                let obj = linalg::row_to_vec(hn.as_ref(), i);
                let x = match lp_solve(&LpProblem::new(obj).with_ineq(h, k))? {
                    LpOutcome::Optimal { value, x } => {
                        if value <= kn[i] + tol(kn[i]) {
                            break;
                        }
                        x
                    }
                    _ => return self.remove_redundant_naive(),
                };
                // first facet hit on the segment z → x
                let d: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a - b).collect();
                let mut best: Option<(f64, usize)> = None;
                for &j in &live {
                    let hd: f64 = (0..n).map(|c| hn[(j, c)] * d[c]).sum();
                    if hd <= 0.0 {
                        continue;
                    }
                    let hz: f64 = (0..n).map(|c| hn[(j, c)] * z[c]).sum();
                    let t = (kn[j] - hz) / hd;
                    if best.is_none_or(|(bt, bj)| t < bt - 1e-12 || (t <= bt + 1e-12 && j == i && bj != i)) {
                        best = Some((t, j));
                    }
                }
                let Some((_, j)) = best else { return self.remove_redundant_naive() };
                if irr[j] {
                    // numerical stall: the LP and the ray disagree
                    return self.remove_redundant_naive();
                }
                irr[j] = true;
                irr_list.push(j);
                if j == i {
                    break;
                }
            }
        }
        let keep: Vec<usize> = (0..rows).filter(|&i| irr[i]).collect();
        self.select(&keep)
    }

    fn select(&self, rows: &[usize]) -> Result<Self> {
        let h = Mat::from_fn(rows.len(), self.dim(), |r, c| self.h[(rows[r], c)]);
        let k = rows.iter().map(|&i| self.k[i]).collect();
        let mut p = Self::new(h, k)?;
        p.bounded_hint = self.bounded_hint;
        Ok(p)
    }

    /// One LP per row against all rows not yet removed.
    pub fn remove_redundant_naive(&self) -> Result<Self> {
        let mut keep: Vec<bool> = vec![true; self.n_rows()];
        for i in 0..self.n_rows() {
            let others: Vec<usize> = (0..self.n_rows()).filter(|&j| j != i && keep[j]).collect();
            let h = Mat::from_fn(others.len(), self.dim(), |r, c| self.h[(others[r], c)]);
            let k: Vec<f64> = others.iter().map(|&j| self.k[j]).collect();
            let hi = linalg::row_to_vec(self.h.as_ref(), i);
            let scale = linalg::norm2(&hi).max(1e-300);
            let p = LpProblem::new(hi).with_ineq(h, k);
            if let LpOutcome::Optimal { value, .. } = lp_solve(&p)? {
                if value <= self.k[i] + 1e-9 * scale.max(self.k[i].abs()) {
                    keep[i] = false;
                }
            }
        }
        let rows: Vec<usize> = (0..self.n_rows()).filter(|&i| keep[i]).collect();
        self.select(&rows)
    }
}

/// Center of a large inscribed ball, `None` when the radius is not
/// clearly positive. Rows must be normalized.
fn chebyshev_center(h: &Matrix, k: &[f64], rows: &[usize]) -> Result<Option<Vec<f64>>> {
    let n = h.ncols();
    let a = Mat::from_fn(rows.len(), n + 1, |r, c| if c < n { h[(rows[r], c)] } else { 1.0 });
    let b: Vec<f64> = rows.iter().map(|&i| k[i]).collect();
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lo = vec![f64::NEG_INFINITY; n + 1];
    let mut hi = vec![f64::INFINITY; n + 1];
    lo[n] = 0.0;
    hi[n] = 1.0;
    let p = LpProblem::new(obj).with_ineq(a, b).with_bounds(lo, hi);
    match lp_solve(&p)? {
        LpOutcome::Optimal { value, x } if value > 1e-9 => Ok(Some(x[..n].to_vec())),
        _ => Ok(None),
    }
}

/// `{x : pᵀx ≤ q}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub p: Vec<f64>,
    pub q: f64,
}

impl Halfspace {
    pub fn new(p: Vec<f64>, q: f64) -> Result<Self> {
        if p.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidInput("halfspace normal is zero".into()));
        }
        if !p.iter().all(|v| v.is_finite()) || !q.is_finite() {
            return Err(Error::InvalidInput("halfspace has non-finite entries".into()));
        }
        Ok(Halfspace { p, q })
    }
}

/// Constraint count `M` and degrees-of-freedom order `(N − M)/n`, kept as
/// integers so that equality is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReprComplexity {
    pub constraints: usize,
    pub generators: usize,
    pub dim: usize,
}

impl ReprComplexity {
    pub fn dof_order(&self) -> f64 {
        (self.generators as f64 - self.constraints as f64) / self.dim as f64
    }

    /// `(N − M, n)` reduced to lowest terms.
    pub fn dof_ratio(&self) -> (i64, i64) {
        let num = self.generators as i64 - self.constraints as i64;
        let den = self.dim as i64;
        let g = gcd(num.abs(), den).max(1);
        (num / g, den / g)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for ReprComplexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.constraints, self.dof_order())
    }
}

pub fn repr_complexity(c: &ConstrainedZonotope) -> ReprComplexity {
    ReprComplexity { constraints: c.n_con(), generators: c.n_gen(), dim: c.dim() }
}

pub fn support_symmetric(s: &SymmetricSet, nu: &[f64]) -> Result<f64> {
    s.support(nu)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportPoint {
    pub value: f64,
    pub point: Vec<f64>,
}

fn xi_box(n: usize) -> (Vec<f64>, Vec<f64>) {
    (vec![-1.0; n], vec![1.0; n])
}

/// LP support function and support vector; `None` when `C` is empty.
pub fn support_czono(c: &ConstrainedZonotope, nu: &[f64]) -> Result<Option<SupportPoint>> {
    if nu.len() != c.dim() {
        return dim_err(format!("direction has length {}, set lives in R^{}", nu.len(), c.dim()));
    }
    let obj = linalg::mat_t_vec(c.g.as_ref(), nu);
    let (lo, hi) = xi_box(c.n_gen());
    let p = LpProblem::new(obj).with_bounds(lo, hi).with_eq(c.a_dense(), c.b.clone());
    match lp_solve(&p)? {
        LpOutcome::Optimal { value, x } => {
            let mut point = linalg::mat_vec(c.g.as_ref(), &x);
            for (pi, ci) in point.iter_mut().zip(&c.c) {
                *pi += ci;
            }
            Ok(Some(SupportPoint { value: value + linalg::dot(nu, &c.c), point }))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::NumericalFailure("support LP over a box reported unbounded".into())),
    }
}

/// Support value only; errors on empty sets.
pub fn support_value(c: &ConstrainedZonotope, nu: &[f64]) -> Result<f64> {
    support_czono(c, nu)?
        .map(|s| s.value)
        .ok_or_else(|| Error::InvalidInput("support of an empty set".into()))
}

/// Membership up to an ℓ∞ mismatch `tol`: minimize `t` subject to
/// `A ξ = b`, `‖ξ‖∞ ≤ 1`, `−t ≤ G ξ + c − x ≤ t`.
pub fn membership_czono(c: &ConstrainedZonotope, x: &[f64], tol: f64) -> Result<bool> {
    Ok(membership_gap(c, x)?.is_some_and(|t| t <= tol))
}

/// The minimal ℓ∞ distance from `x` to `C` (`None` when `C` is empty).
pub fn membership_gap(c: &ConstrainedZonotope, x: &[f64]) -> Result<Option<f64>> {
    let n = c.dim();
    if x.len() != n {
        return dim_err(format!("point has length {}, set lives in R^{n}", x.len()));
    }
    let ng = c.n_gen();
    let mut obj = vec![0.0; ng + 1];
    obj[ng] = -1.0;
    let mut lo = vec![-1.0; ng + 1];
    let mut hi = vec![1.0; ng + 1];
    lo[ng] = 0.0;
    hi[ng] = f64::INFINITY;
    let eq = linalg::hstack(c.a_dense().as_ref(), Mat::<f64>::zeros(c.n_con(), 1).as_ref());
    let ineq = Mat::from_fn(2 * n, ng + 1, |i, j| {
        let (r, s) = if i < n { (i, 1.0) } else { (i - n, -1.0) };
        if j < ng {
            s * c.g[(r, j)]
        } else {
            -1.0
        }
    });
    let rhs: Vec<f64> = (0..2 * n)
        .map(|i| if i < n { x[i] - c.c[i] } else { c.c[i - n] - x[i - n] })
        .collect();
    let p = LpProblem::new(obj).with_bounds(lo, hi).with_eq(eq, c.b.clone()).with_ineq(ineq, rhs);
    match lp_solve(&p)? {
        LpOutcome::Optimal { value, .. } => Ok(Some(-value)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::NumericalFailure("membership LP reported unbounded".into())),
    }
}

/// `C = ∅` iff `B∞(A, b) = ∅`.
pub fn is_empty(c: &ConstrainedZonotope) -> Result<bool> {
    if c.n_con() == 0 {
        return Ok(false);
    }
    let (lo, hi) = xi_box(c.n_gen());
    let p = LpProblem::new(vec![0.0; c.n_gen()]).with_bounds(lo, hi).with_eq(c.a_dense(), c.b.clone());
    Ok(matches!(lp_solve(&p)?, LpOutcome::Infeasible))
}

/// Directions `(cos θ_j, sin θ_j)` with `θ_j = 2πj/k`.
pub fn unit_directions(k: usize) -> Vec<[f64; 2]> {
    (0..k)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}

/// Support points of a planar set along `k` equi-spaced directions;
/// `None` when the set is empty.
pub fn boundary_sample(c: &ConstrainedZonotope, k: usize) -> Result<Option<Vec<[f64; 2]>>> {
    if c.dim() != 2 {
        return dim_err(format!("boundary_sample needs a planar set, got R^{}", c.dim()));
    }
    let mut pts = Vec::with_capacity(k);
    for d in unit_directions(k) {
        match support_czono(c, &d)? {
            Some(sp) => pts.push([sp.point[0], sp.point[1]]),
            None => return Ok(None),
        }
    }
    Ok(Some(pts))
}
