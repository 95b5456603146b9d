//! Inner and outer approximations of `C ⊖ S` for a constrained-zonotope
//! minuend and a symmetric subtrahend.

use crate::czops::{self, czono_bounds, intersect_halfspace};
use crate::error::{dim_err, Error, Result};
use crate::linalg::lp::{lp_solve, LpOutcome, LpProblem};
use crate::linalg::{self, Matrix, ROW_SUBSET_TOL};
use crate::sets::{support_czono, ConstrainedZonotope, HPolyhedron, Halfspace, SymmetricSet};
use faer::Mat;

/// Diagonal entries in `[-CLAMP_TOL, 0)` are rounded up to zero.
pub const CLAMP_TOL: f64 = 1e-10;

/// Cover rows whose normalizer `‖vᵀ[G; A]‖₁` falls below this are dropped.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Diagonal of the shrink matrix `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkDiag {
    pub d: Vec<f64>,
}

impl ShrinkDiag {
    pub fn min(&self) -> f64 {
        self.d.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Any entry below `-CLAMP_TOL`.
    pub fn signals_empty(&self) -> bool {
        self.min() < -CLAMP_TOL
    }

    fn clamped(&self) -> Vec<f64> {
        self.d.iter().map(|&v| v.max(0.0)).collect()
    }
}

/// Outcome of a Pontryagin-difference approximation.
#[derive(Clone, Debug, PartialEq)]
pub enum PdiffResult {
    Set(ConstrainedZonotope),
    Empty,
}

impl PdiffResult {
    pub fn is_empty(&self) -> bool {
        matches!(self, PdiffResult::Empty)
    }

    pub fn set(&self) -> Option<&ConstrainedZonotope> {
        match self {
            PdiffResult::Set(c) => Some(c),
            PdiffResult::Empty => None,
        }
    }

    pub fn into_set(self) -> Option<ConstrainedZonotope> {
        match self {
            PdiffResult::Set(c) => Some(c),
            PdiffResult::Empty => None,
        }
    }
}

/// Inner approximation together with the shrink diagonal that produced it.
#[derive(Clone, Debug)]
pub struct InnerReport {
    pub result: PdiffResult,
    /// `None` when the affine-dimension guard fired before `D` was formed.
    pub diag: Option<ShrinkDiag>,
}

fn is_rank_failure(e: &Error) -> bool {
    matches!(e, Error::RankDeficient { .. } | Error::NumericalFailure(_))
}

/// `Γ` with `[G; A] Γ = [Iₙ; 0]` of minimum norm.
pub fn gamma(c: &ConstrainedZonotope) -> Result<Matrix> {
    let (n, m) = (c.dim(), c.n_con());
    let e = Mat::from_fn(n + m, n, |i, j| if i == j { 1.0 } else { 0.0 });
    linalg::min_norm_solve_sparse_or_dense(&c.stacked_sparse(), e.as_ref())
}

/// Run `f` on `C`, retrying once on its MinRow form if `[G; A]` turns out to
/// be rank deficient.
fn on_min_row<T>(
    c: &ConstrainedZonotope,
    f: impl Fn(&ConstrainedZonotope) -> Result<T>,
) -> Result<(T, Option<ConstrainedZonotope>)> {
    match f(c) {
        Ok(v) => Ok((v, None)),
        Err(e) if is_rank_failure(&e) => {
            let reduced = czops::min_row(c)?;
            if reduced.n_con() == c.n_con() {
                return Err(e);
            }
            Ok((f(&reduced)?, Some(reduced)))
        }
        Err(e) => Err(e),
    }
}

fn check_generic_symmetry(s: &SymmetricSet) -> Result<()> {
    if let SymmetricSet::Generic { .. } = s {
        let n = s.dim();
        let nu: Vec<f64> = (0..n).map(|i| 1.0 / (i as f64 + 1.0)).collect();
        let neg: Vec<f64> = nu.iter().map(|v| -v).collect();
        let (a, b) = (s.support_centered(&nu)?, s.support_centered(&neg)?);
        if !a.is_finite() || (a - b).abs() > 1e-9 * a.abs().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "generic subtrahend support is not symmetric about its center ({a} vs {b})"
            )));
        }
    }
    Ok(())
}

fn diag_from_gamma(gamma: &Matrix, s: &SymmetricSet) -> Result<ShrinkDiag> {
    let ng = gamma.nrows();
    let d = match s {
        SymmetricSet::Zonotope { g, .. } | SymmetricSet::Ellipsoid { g, .. } | SymmetricSet::CrossPolytope { g, .. } => {
            let rows = gamma * g;
            let norm: fn(&[f64]) -> f64 = match s {
                SymmetricSet::Zonotope { .. } => linalg::norm1,
                SymmetricSet::Ellipsoid { .. } => linalg::norm2,
                _ => linalg::norm_inf,
            };
            (0..ng).map(|i| 1.0 - norm(&linalg::row_to_vec(rows.as_ref(), i))).collect()
        }
        SymmetricSet::Generic { .. } => {
            let mut d = Vec::with_capacity(ng);
            for i in 0..ng {
                d.push(1.0 - s.support_centered(&linalg::row_to_vec(gamma.as_ref(), i))?);
            }
            d
        }
    };
    Ok(ShrinkDiag { d })
}

/// `D_ii = 1 − ρ_{S₀}(Γᵀ eᵢ)` for a MinRow minuend.
pub fn shrink_diag(c: &ConstrainedZonotope, s: &SymmetricSet) -> Result<ShrinkDiag> {
    if s.dim() != c.dim() {
        return dim_err(format!("subtrahend lives in R^{}, minuend in R^{}", s.dim(), c.dim()));
    }
    check_generic_symmetry(s)?;
    diag_from_gamma(&gamma(c)?, s)
}

/// `S` spans more directions than `C` does, so `C ⊖ S = ∅`.
fn affine_dimension_exceeds(c: &ConstrainedZonotope, s: &SymmetricSet) -> bool {
    let Some(gs) = s.generators() else { return false };
    let rs = linalg::numerical_rank(gs.as_ref(), ROW_SUBSET_TOL);
    if rs == 0 {
        return false;
    }
    rs > linalg::numerical_rank(c.g().as_ref(), ROW_SUBSET_TOL)
}

fn apply_diag(c: &ConstrainedZonotope, d: &[f64], shift: &[f64]) -> Result<ConstrainedZonotope> {
    let mut g = c.g().clone();
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            g[(i, j)] *= d[j];
        }
    }
    let cc = c.c().iter().zip(shift).map(|(x, s)| x - s).collect();
    ConstrainedZonotope::from_sparse(g, cc, c.a().scale_columns(d), c.b().to_vec())
}

/// `M⁻ = (G D, c − c_S, A D, b) ⊆ C ⊖ S`.
pub fn inner_pdiff(c: &ConstrainedZonotope, s: &SymmetricSet) -> Result<PdiffResult> {
    Ok(inner_pdiff_report(c, s)?.result)
}

pub fn inner_pdiff_report(c: &ConstrainedZonotope, s: &SymmetricSet) -> Result<InnerReport> {
    if s.dim() != c.dim() {
        return dim_err(format!("subtrahend lives in R^{}, minuend in R^{}", s.dim(), c.dim()));
    }
    check_generic_symmetry(s)?;
    if affine_dimension_exceeds(c, s) {
        return Ok(InnerReport { result: PdiffResult::Empty, diag: None });
    }
    let (diag, reduced) = on_min_row(c, |c| diag_from_gamma(&gamma(c)?, s))?;
    let base = reduced.as_ref().unwrap_or(c);
    let result = if diag.signals_empty() {
        PdiffResult::Empty
    } else {
        PdiffResult::Set(apply_diag(base, &diag.clamped(), s.center())?)
    };
    Ok(InnerReport { result, diag: Some(diag) })
}

/// LP-based baseline for zonotopic subtrahends: minimize `Σ|Γᵢⱼ|` subject to
/// `[G; A] Γ = [G_S; 0]` and `Σⱼ|Γᵢⱼ| ≤ 1`, then `D_ii = 1 − ‖eᵢᵀΓ*‖₁`.
pub fn two_stage_inner_pdiff(c: &ConstrainedZonotope, s: &SymmetricSet) -> Result<PdiffResult> {
    Ok(two_stage_report(c, s)?.result)
}

pub fn two_stage_report(c: &ConstrainedZonotope, s: &SymmetricSet) -> Result<InnerReport> {
    let SymmetricSet::Zonotope { g: gs, c: cs } = s else {
        return Err(Error::InvalidInput("two-stage requires zonotope".into()));
    };
    if s.dim() != c.dim() {
        return dim_err(format!("subtrahend lives in R^{}, minuend in R^{}", s.dim(), c.dim()));
    }
    let (n, m, nc, ns) = (c.dim(), c.n_con(), c.n_gen(), gs.ncols());
    if ns == 0 {
        let d = ShrinkDiag { d: vec![1.0; nc] };
        let set = apply_diag(c, &d.d, cs)?;
        return Ok(InnerReport { result: PdiffResult::Set(set), diag: Some(d) });
    }
    let p = c.stacked();
    let nv = 2 * nc * ns;
    // Γ⁺ occupies [0, nc·ns), Γ⁻ the rest; entry (i, j) sits at i·ns + j
    let pos = |i: usize, j: usize| i * ns + j;
    let rows = (n + m) * ns;
    let mut eq = Mat::<f64>::zeros(rows, nv);
    let mut rhs = vec![0.0; rows];
    for r in 0..n + m {
        for j in 0..ns {
            let row = r * ns + j;
            for i in 0..nc {
                let v = p[(r, i)];
                if v != 0.0 {
                    eq[(row, pos(i, j))] = v;
                    eq[(row, nc * ns + pos(i, j))] = -v;
                }
            }
            if r < n {
                rhs[row] = gs[(r, j)];
            }
        }
    }
    let mut ineq = Mat::<f64>::zeros(nc, nv);
    for i in 0..nc {
        for j in 0..ns {
            ineq[(i, pos(i, j))] = 1.0;
            ineq[(i, nc * ns + pos(i, j))] = 1.0;
        }
    }
    let lp = LpProblem::new(vec![-1.0; nv])
        .with_bounds(vec![0.0; nv], vec![1.0; nv])
        .with_eq(eq, rhs)
        .with_ineq(ineq, vec![1.0; nc]);
    let x = match lp_solve(&lp)? {
        LpOutcome::Optimal { x, .. } => x,
        LpOutcome::Infeasible => return Ok(InnerReport { result: PdiffResult::Empty, diag: None }),
        LpOutcome::Unbounded => return Err(Error::NumericalFailure("two-stage LP reported unbounded".into())),
    };
    let d: Vec<f64> = (0..nc)
        .map(|i| 1.0 - (0..ns).map(|j| (x[pos(i, j)] - x[nc * ns + pos(i, j)]).abs()).sum::<f64>())
        .collect();
    let diag = ShrinkDiag { d };
    let result = if diag.signals_empty() {
        PdiffResult::Empty
    } else {
        PdiffResult::Set(apply_diag(c, &diag.clamped(), cs)?)
    };
    Ok(InnerReport { result, diag: Some(diag) })
}

/// Polyhedral outer cover of `C` plus the generator indices whose rows were
/// dropped for a vanishing normalizer.
#[derive(Clone, Debug)]
pub struct PolyhedralCover {
    pub poly: HPolyhedron,
    pub dropped: Vec<usize>,
}

fn cover_rows(c: &ConstrainedZonotope) -> Result<PolyhedralCover> {
    let (n, m, ng) = (c.dim(), c.n_con(), c.n_gen());
    let p = c.stacked();
    let eye = Mat::<f64>::identity(n + m, n + m);
    let pinv = linalg::min_norm_solve(p.as_ref(), eye.as_ref())?;
    let proj = &pinv * &p;
    let mut rows: Vec<usize> = Vec::with_capacity(ng);
    let mut dropped = Vec::new();
    let mut norms = Vec::with_capacity(ng);
    for i in 0..ng {
        let nrm: f64 = (0..ng).map(|j| proj[(i, j)].abs()).sum();
        if nrm < NORMALIZATION_TOL {
            dropped.push(i);
        } else {
            rows.push(i);
            norms.push(nrm);
        }
    }
    let l = rows.len();
    let mut h = Mat::<f64>::zeros(2 * l, n);
    let mut k = vec![0.0; 2 * l];
    for (r, (&i, &nrm)) in rows.iter().zip(&norms).enumerate() {
        let vx: Vec<f64> = (0..n).map(|j| pinv[(i, j)] / nrm).collect();
        let vb: Vec<f64> = (0..m).map(|j| pinv[(i, n + j)] / nrm).collect();
        let off = linalg::dot(&vx, c.c()) - linalg::dot(&vb, c.b());
        for j in 0..n {
            h[(r, j)] = vx[j];
            h[(l + r, j)] = -vx[j];
        }
        k[r] = 1.0 + off;
        k[l + r] = 1.0 - off;
    }
    Ok(PolyhedralCover { poly: HPolyhedron::new(h, k)?, dropped })
}

/// `{x : ±V[:, :n] x ≤ 1 ± (V[:, :n] c − V[:, n:] b)}` with `V` the
/// normalized rows of `[G; A]†`; at most `2N` rows and always `⊇ C`.
pub fn outer_polyhedron(c: &ConstrainedZonotope) -> Result<PolyhedralCover> {
    Ok(on_min_row(c, cover_rows)?.0)
}

/// [`outer_polyhedron`] plus the interval hull of `C`.
pub fn outer_polyhedron_boxed(c: &ConstrainedZonotope) -> Result<PolyhedralCover> {
    let mut cover = outer_polyhedron(c)?;
    let (l, u) = czono_bounds(c)?.ok_or_else(|| Error::Degenerate("cannot cover an empty set".into()))?;
    let bx = HPolyhedron::from_box(&l, &u)?;
    cover.poly = cover.poly.intersect(&bx)?;
    cover.poly.bounded_hint = Some(true);
    Ok(cover)
}

/// Append `{νⱼᵀx ≤ ρ_C(νⱼ)}` for every direction.
pub fn ray_shoot_tighten(p: &HPolyhedron, c: &ConstrainedZonotope, dirs: &[Vec<f64>]) -> Result<HPolyhedron> {
    if dirs.is_empty() {
        return Ok(p.clone());
    }
    let n = c.dim();
    let mut h = Mat::<f64>::zeros(dirs.len(), n);
    let mut k = Vec::with_capacity(dirs.len());
    for (r, d) in dirs.iter().enumerate() {
        let sp = support_czono(c, d)?.ok_or_else(|| Error::Degenerate("cannot tighten around an empty set".into()))?;
        for j in 0..n {
            h[(r, j)] = d[j];
        }
        k.push(sp.value);
    }
    let mut out = p.intersect(&HPolyhedron::new(h, k)?)?;
    out.bounded_hint = p.bounded_hint;
    Ok(out)
}

/// `{x : H x ≤ k − ρ_S(H)}` row by row.
pub fn hpoly_pdiff(p: &HPolyhedron, s: &SymmetricSet) -> Result<HPolyhedron> {
    if p.dim() != s.dim() {
        return dim_err(format!("polyhedron lives in R^{}, subtrahend in R^{}", p.dim(), s.dim()));
    }
    let mut k = p.k.clone();
    for (i, ki) in k.iter_mut().enumerate() {
        *ki -= s.support(&linalg::row_to_vec(p.h.as_ref(), i))?;
    }
    let mut out = HPolyhedron::new(p.h.clone(), k)?;
    out.bounded_hint = p.bounded_hint;
    Ok(out)
}

/// Step-1 cover choices for [`outer_pdiff_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OuterOptions {
    pub boxed: bool,
    pub remove_redundant: bool,
}

impl Default for OuterOptions {
    fn default() -> Self {
        OuterOptions { boxed: true, remove_redundant: false }
    }
}

/// `M⁺ = (C − c_S) ∩ (cover(C) ⊖ S) ⊇ C ⊖ S`.
pub fn outer_pdiff(c: &ConstrainedZonotope, s: &SymmetricSet) -> Result<PdiffResult> {
    outer_pdiff_with(c, s, OuterOptions::default())
}

pub fn outer_pdiff_with(c: &ConstrainedZonotope, s: &SymmetricSet, opts: OuterOptions) -> Result<PdiffResult> {
    if s.dim() != c.dim() {
        return dim_err(format!("subtrahend lives in R^{}, minuend in R^{}", s.dim(), c.dim()));
    }
    check_generic_symmetry(s)?;
    let mut cover = if opts.boxed { outer_polyhedron_boxed(c)?.poly } else { outer_polyhedron(c)?.poly };
    if opts.remove_redundant {
        cover = cover.remove_redundant()?;
    }
    let shrunk = hpoly_pdiff(&cover, s)?;
    // an empty eroded cover is an n-variable feasibility check, far cheaper
    // than detecting it on the lifted representation
    if shrunk.support(&vec![0.0; c.dim()])?.is_none() {
        return Ok(PdiffResult::Empty);
    }
    let neg: Vec<f64> = s.center().iter().map(|v| -v).collect();
    let mut out = c.translate(&neg);
    for i in 0..shrunk.n_rows() {
        let h = shrunk.row(i);
        if cut_misses(&out, &h) {
            return Ok(PdiffResult::Empty);
        }
        out = intersect_halfspace(&out, &h)?;
    }
    Ok(PdiffResult::Set(out))
}

/// `q < min over the unconstrained zonotope (G, c)` of `pᵀx`.
fn cut_misses(c: &ConstrainedZonotope, h: &Halfspace) -> bool {
    let pg = linalg::mat_t_vec(c.g().as_ref(), &h.p);
    h.q - linalg::dot(&h.p, c.c()) + linalg::norm1(&pg) < 0.0
}
