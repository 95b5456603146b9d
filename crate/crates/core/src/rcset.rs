//! Backward robust-controllable-set recursions.

use crate::czops::{self, affine_map, intersect_inverse_affine, minkowski_sum, MAX_INVERTIBLE_COND};
use crate::error::{dim_err, Error, Result};
use crate::linalg::{self, Matrix};
use crate::pdiff::{self, OuterOptions, PdiffResult};
use crate::sets::{ConstrainedZonotope, HPolyhedron, ReprComplexity, SymmetricSet};
use std::time::Instant;

/// Which of the two step structures the recursion uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Invert `A_t` and cut with the rows of `X_t`.
    InvertibleA,
    /// Intersect `X_t` with the preimage under `A_t`.
    PolytopicX,
}

#[derive(Clone, Debug)]
pub enum StateConstraint {
    HPoly(HPolyhedron),
    CZono(ConstrainedZonotope),
}

impl StateConstraint {
    pub fn dim(&self) -> usize {
        match self {
            StateConstraint::HPoly(p) => p.dim(),
            StateConstraint::CZono(c) => c.dim(),
        }
    }
}

/// Data of one step `t`: `x⁺ = A x + B u + F w`, `u ∈ U`, `w ∈ W`, `x ∈ X`.
#[derive(Clone, Debug)]
pub struct RcStep {
    pub a: Matrix,
    pub b: Matrix,
    pub f: Matrix,
    pub u: ConstrainedZonotope,
    pub w: SymmetricSet,
    pub x: StateConstraint,
    a_inv: Option<Matrix>,
}

impl RcStep {
    pub fn new(
        a: Matrix,
        b: Matrix,
        f: Matrix,
        u: ConstrainedZonotope,
        w: SymmetricSet,
        x: StateConstraint,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return dim_err(format!("A must be square, got {}x{}", n, a.ncols()));
        }
        if b.nrows() != n || b.ncols() != u.dim() {
            return dim_err(format!("B is {}x{}, need {n}x{}", b.nrows(), b.ncols(), u.dim()));
        }
        if f.nrows() != n || f.ncols() != w.dim() {
            return dim_err(format!("F is {}x{}, need {n}x{}", f.nrows(), f.ncols(), w.dim()));
        }
        if x.dim() != n {
            return dim_err(format!("state constraint lives in R^{}, state in R^{n}", x.dim()));
        }
        Ok(RcStep { a, b, f, u, w, x, a_inv: None })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

#[derive(Clone, Debug)]
pub struct RcScenario {
    /// `steps[t]` holds the data of time `t`, `t = 0..T`.
    pub steps: Vec<RcStep>,
    pub goal: ConstrainedZonotope,
    pub variant: Variant,
}

impl RcScenario {
    /// Validates dimensions and prepares each step for the chosen variant:
    /// `A_t⁻¹` for [`Variant::InvertibleA`], a constrained-zonotope `X_t` for
    /// [`Variant::PolytopicX`].
    pub fn new(steps: Vec<RcStep>, goal: ConstrainedZonotope, variant: Variant) -> Result<Self> {
        let n = goal.dim();
        let mut steps = steps;
        for (t, s) in steps.iter_mut().enumerate() {
            if s.dim() != n {
                return dim_err(format!("step {t} has state dimension {}, goal lives in R^{n}", s.dim()));
            }
            match variant {
                Variant::InvertibleA => {
                    s.a_inv = Some(linalg::inverse(s.a.as_ref(), MAX_INVERTIBLE_COND).map_err(|e| match e {
                        Error::NotInvertible(m) => Error::NotInvertible(format!("A_{t}: {m}")),
                        e => e,
                    })?);
                    if let StateConstraint::CZono(c) = &s.x {
                        s.x = StateConstraint::HPoly(czops::hpoly_from_invertible(c)?);
                    }
                }
                Variant::PolytopicX => {
                    if let StateConstraint::HPoly(p) = &s.x {
                        s.x = StateConstraint::CZono(czops::invertible_from_hpoly(p)?);
                    }
                }
            }
        }
        Ok(RcScenario { steps, goal, variant })
    }

    pub fn time_invariant(step: RcStep, horizon: usize, goal: ConstrainedZonotope, variant: Variant) -> Result<Self> {
        Self::new(vec![step; horizon], goal, variant)
    }

    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn dim(&self) -> usize {
        self.goal.dim()
    }

    /// Copy with every disturbance set scaled by `alpha` about the origin.
    pub fn with_scaled_disturbance(&self, alpha: f64) -> Self {
        let mut sc = self.clone();
        for s in sc.steps.iter_mut() {
            s.w = s.w.scaled(alpha);
        }
        sc
    }

    /// Copy with every disturbance set replaced.
    pub fn with_disturbance(&self, w: SymmetricSet) -> Result<Self> {
        let mut sc = self.clone();
        for s in sc.steps.iter_mut() {
            if s.f.ncols() != w.dim() {
                return dim_err("replacement disturbance has the wrong dimension");
            }
            s.w = w.clone();
        }
        Ok(sc)
    }

    pub fn with_horizon(&self, horizon: usize) -> Self {
        let mut sc = self.clone();
        if let Some(last) = sc.steps.last().cloned() {
            sc.steps.resize(horizon, last);
        }
        sc
    }
}

/// Which Pontryagin-difference approximation drives the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Approx {
    Inner,
    Outer,
    TwoStage,
}

#[derive(Clone, Debug)]
pub struct RcRecord {
    pub t: usize,
    pub set: Option<ConstrainedZonotope>,
    pub complexity: Option<ReprComplexity>,
    pub millis: f64,
}

impl RcRecord {
    pub fn is_empty(&self) -> bool {
        self.set.is_none()
    }
}

/// Sets `K_T, …, K_0` in that order.
#[derive(Clone, Debug)]
pub struct RcResult {
    pub records: Vec<RcRecord>,
}

impl RcResult {
    pub fn k0(&self) -> Option<&ConstrainedZonotope> {
        self.records.last().and_then(|r| r.set.as_ref())
    }

    pub fn at(&self, t: usize) -> Option<&RcRecord> {
        self.records.iter().find(|r| r.t == t)
    }

    pub fn total_millis(&self) -> f64 {
        self.records.iter().map(|r| r.millis).sum()
    }

    pub fn any_empty(&self) -> bool {
        self.records.iter().any(|r| r.is_empty())
    }
}

/// Options for [`rc_run`].
#[derive(Clone, Copy, Debug)]
pub struct RcOptions {
    pub approx: Approx,
    pub outer: OuterOptions,
}

impl RcOptions {
    pub fn inner() -> Self {
        RcOptions { approx: Approx::Inner, outer: OuterOptions::default() }
    }

    /// Outer recursions prune the cover to keep growth in check.
    pub fn outer() -> Self {
        RcOptions { approx: Approx::Outer, outer: OuterOptions { boxed: true, remove_redundant: true } }
    }

    pub fn two_stage() -> Self {
        RcOptions { approx: Approx::TwoStage, outer: OuterOptions::default() }
    }
}

pub fn rc_inner(sc: &RcScenario) -> Result<RcResult> {
    rc_run(sc, RcOptions::inner())
}

pub fn rc_outer(sc: &RcScenario) -> Result<RcResult> {
    rc_run(sc, RcOptions::outer())
}

pub fn rc_two_stage(sc: &RcScenario) -> Result<RcResult> {
    rc_run(sc, RcOptions::two_stage())
}

/// One backward step `K_{t+1} ↦ K_t`; `None` when the set became empty.
pub fn rc_step(k: &ConstrainedZonotope, step: &RcStep, variant: Variant, opts: RcOptions) -> Result<Option<ConstrainedZonotope>> {
    let fw = step.w.affine_image(&step.f)?;
    let shrunk = match opts.approx {
        Approx::Inner => pdiff::inner_pdiff(k, &fw)?,
        Approx::Outer => pdiff::outer_pdiff_with(k, &fw, opts.outer)?,
        Approx::TwoStage => pdiff::two_stage_inner_pdiff(k, &fw)?,
    };
    let PdiffResult::Set(shrunk) = shrunk else { return Ok(None) };
    let neg_b = linalg::scaled(step.b.as_ref(), -1.0);
    let grown = minkowski_sum(&shrunk, &affine_map(&neg_b, &step.u)?)?;
    let next = match (variant, &step.x) {
        (Variant::InvertibleA, StateConstraint::HPoly(x)) => {
            let a_inv = step.a_inv.as_ref().ok_or_else(|| Error::InvalidInput("scenario step was not prepared".into()))?;
            czops::intersect_hpoly(&affine_map(a_inv, &grown)?, x)?
        }
        (Variant::PolytopicX, StateConstraint::CZono(x)) => intersect_inverse_affine(x, &step.a, &grown)?,
        _ => return Err(Error::InvalidInput("state constraint kind does not match the variant".into())),
    };
    Ok(Some(next))
}

pub fn rc_run(sc: &RcScenario, opts: RcOptions) -> Result<RcResult> {
    let horizon = sc.horizon();
    let mut records = Vec::with_capacity(horizon + 1);
    let goal = sc.goal.clone();
    records.push(RcRecord { t: horizon, complexity: Some(goal.complexity()), set: Some(goal), millis: 0.0 });
    let mut current = records[0].set.clone();
    for t in (0..horizon).rev() {
        let start = Instant::now();
        let next = match &current {
            Some(k) => rc_step(k, &sc.steps[t], sc.variant, opts)?,
            None => None,
        };
        let millis = start.elapsed().as_secs_f64() * 1e3;
        records.push(RcRecord { t, complexity: next.as_ref().map(|k| k.complexity()), set: next.clone(), millis });
        current = next;
    }
    Ok(RcResult { records })
}

/// Representation complexity of the inner-approximation `K₀`, summing the
/// per-step growth of each operation.
pub fn predicted_complexity(sc: &RcScenario) -> ReprComplexity {
    let n = sc.dim();
    let mut m = sc.goal.n_con();
    let mut g = sc.goal.n_gen();
    for step in &sc.steps {
        m += step.u.n_con();
        g += step.u.n_gen();
        match &step.x {
            StateConstraint::HPoly(x) => {
                m += x.n_rows();
                g += x.n_rows();
            }
            StateConstraint::CZono(x) => {
                m += x.n_con() + n;
                g += x.n_gen();
            }
        }
    }
    ReprComplexity { constraints: m, generators: g, dim: n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_rows;
    use crate::sets::support_value;
    use faer::Mat;

    fn integrator(w: SymmetricSet, variant: Variant, horizon: usize) -> RcScenario {
        let dt = 0.1;
        let a = from_rows(&[[1.0, dt], [0.0, 1.0]]);
        let b = from_rows(&[[dt * dt / 2.0], [dt]]);
        let u = ConstrainedZonotope::interval_box(&[-2.0], &[2.0]).unwrap();
        let x = HPolyhedron::from_box(&[-2.0, -3.0], &[2.0, 3.0]).unwrap();
        let goal = ConstrainedZonotope::interval_box(&[-2.0, -3.0], &[2.0, 3.0]).unwrap();
        let step = RcStep::new(a, b, Mat::identity(2, 2), u, w, StateConstraint::HPoly(x)).unwrap();
        RcScenario::time_invariant(step, horizon, goal, variant).unwrap()
    }

    fn ball(r: f64) -> SymmetricSet {
        SymmetricSet::ellipsoid(linalg::diag(&[r, r]), vec![0.0; 2]).unwrap()
    }

    #[test]
    fn complexity_prediction_matches() {
        for variant in [Variant::InvertibleA, Variant::PolytopicX] {
            let sc = integrator(ball(0.1), variant, 4);
            let res = rc_inner(&sc).unwrap();
            assert_eq!(res.records.len(), 5);
            assert_eq!(res.k0().unwrap().complexity(), predicted_complexity(&sc));
        }
        let sc = integrator(ball(0.1), Variant::PolytopicX, 20);
        let p = predicted_complexity(&sc);
        assert_eq!((p.constraints, p.dof_order()), (120, 11.0));
        let zero = integrator(ball(0.1), Variant::PolytopicX, 0);
        assert_eq!(predicted_complexity(&zero), zero.goal.complexity());
        assert_eq!(rc_inner(&zero).unwrap().k0().unwrap(), &zero.goal);
    }

    #[test]
    fn disturbance_free_inner_equals_outer() {
        let sc = integrator(SymmetricSet::point(vec![0.0, 0.0]), Variant::PolytopicX, 2);
        let inner = rc_inner(&sc).unwrap();
        let outer = rc_outer(&sc).unwrap();
        for d in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-0.3, 1.0], [1.0, -0.2]] {
            let a = support_value(inner.k0().unwrap(), &d).unwrap();
            let b = support_value(outer.k0().unwrap(), &d).unwrap();
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn variant_a_refuses_singular_dynamics() {
        let u = ConstrainedZonotope::interval_box(&[-1.0], &[1.0]).unwrap();
        let x = HPolyhedron::from_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let step = RcStep::new(
            from_rows(&[[1.0, 1.0], [1.0, 1.0]]),
            from_rows(&[[0.0], [1.0]]),
            Mat::identity(2, 2),
            u,
            ball(0.1),
            StateConstraint::HPoly(x),
        )
        .unwrap();
        let err = RcScenario::time_invariant(step, 3, ConstrainedZonotope::unit_box(2), Variant::InvertibleA);
        assert!(matches!(err, Err(Error::NotInvertible(_))));
    }

    #[test]
    fn empty_short_circuit() {
        let sc = integrator(ball(5.0), Variant::PolytopicX, 3);
        let res = rc_inner(&sc).unwrap();
        assert!(res.k0().is_none());
        assert!(res.records[1..].iter().all(|r| r.is_empty()));
    }
}
