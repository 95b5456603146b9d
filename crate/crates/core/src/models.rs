//! Case-study plants and scenario factories.

use crate::czops::invertible_from_hpoly;
use crate::error::{Error, Result};
use crate::linalg::{self, from_rows, Matrix};
use crate::rcset::{RcScenario, RcStep, StateConstraint, Variant};
use crate::sets::{ConstrainedZonotope, HPolyhedron, SymmetricSet};
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `x⁺ = A x + B u + F w` (or its continuous-time counterpart).
#[derive(Clone, Debug)]
pub struct LtiPlant {
    pub a: Matrix,
    pub b: Matrix,
    pub f: Matrix,
    pub discrete: bool,
    pub dt: Option<f64>,
}

impl LtiPlant {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Zero-order-hold discretization; `F` is held like `B`.
    pub fn discretize(&self, dt: f64) -> Result<LtiPlant> {
        if self.discrete {
            return Err(Error::InvalidInput("plant is already discrete".into()));
        }
        let bf = linalg::hstack(self.b.as_ref(), self.f.as_ref());
        let (a, bf_d) = zoh(&self.a, &bf, dt)?;
        let m = self.b.ncols();
        Ok(LtiPlant {
            a,
            b: bf_d.get(.., ..m).to_owned(),
            f: bf_d.get(.., m..).to_owned(),
            discrete: true,
            dt: Some(dt),
        })
    }
}

/// `(e^{A dt}, ∫₀^dt e^{A s} ds B)` from one exponential of `[[A, B], [0, 0]]·dt`.
pub fn zoh(a: &Matrix, b: &Matrix, dt: f64) -> Result<(Matrix, Matrix)> {
    let (n, m) = (a.nrows(), b.ncols());
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch(format!("A is {}x{}, B is {}x{m}", n, a.ncols(), b.nrows())));
    }
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("sampling time must be non-negative, got {dt}")));
    }
    let aug = Mat::from_fn(n + m, n + m, |i, j| {
        if i >= n {
            0.0
        } else if j < n {
            a[(i, j)] * dt
        } else {
            b[(i, j - n)] * dt
        }
    });
    let e = linalg::expm(aug.as_ref());
    Ok((e.get(..n, ..n).to_owned(), e.get(..n, n..).to_owned()))
}

/// Disturbance choices for the double-integrator study.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiDisturbance {
    /// `(0.1 I₂, 0)`
    Ball,
    /// `(diag(0.2, 0.04), (0.1, 0.1))`
    Ellipsoid,
    /// Interval hull of the ball.
    BallZonoOuter,
    /// Interval hull of the ellipsoid.
    EllipsoidZonoOuter,
}

impl DiDisturbance {
    pub fn set(self) -> SymmetricSet {
        match self {
            DiDisturbance::Ball => SymmetricSet::ellipsoid(linalg::diag(&[0.1, 0.1]), vec![0.0, 0.0]).unwrap(),
            DiDisturbance::Ellipsoid => {
                SymmetricSet::ellipsoid(linalg::diag(&[0.2, 0.04]), vec![0.1, 0.1]).unwrap()
            }
            DiDisturbance::BallZonoOuter => DiDisturbance::Ball.set().bounding_box().unwrap(),
            DiDisturbance::EllipsoidZonoOuter => DiDisturbance::Ellipsoid.set().bounding_box().unwrap(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ball" => DiDisturbance::Ball,
            "ellipsoid" => DiDisturbance::Ellipsoid,
            "ball-zono" | "ball-zono-outer" => DiDisturbance::BallZonoOuter,
            "ellipsoid-zono" | "ellipsoid-zono-outer" => DiDisturbance::EllipsoidZonoOuter,
            _ => return None,
        })
    }
}

/// `A = [1, dt; 0, 1]`, `B = [dt²/2; dt]`, `F = I₂`.
pub fn double_integrator_plant(dt: f64) -> LtiPlant {
    LtiPlant {
        a: from_rows(&[[1.0, dt], [0.0, 1.0]]),
        b: from_rows(&[[dt * dt / 2.0], [dt]]),
        f: Mat::identity(2, 2),
        discrete: true,
        dt: Some(dt),
    }
}

/// Double integrator with `U = [−2, 2]`, `X = G = [−2, 2] × [−3, 3]`, the
/// goal kept as a zonotope and `X` in Invertible form.
pub fn double_integrator(dt: f64, w: DiDisturbance, horizon: usize) -> Result<RcScenario> {
    let p = double_integrator_plant(dt);
    let u = ConstrainedZonotope::interval_box(&[-2.0], &[2.0])?;
    let x = HPolyhedron::from_box(&[-2.0, -3.0], &[2.0, 3.0])?;
    let goal = ConstrainedZonotope::interval_box(&[-2.0, -3.0], &[2.0, 3.0])?;
    let step = RcStep::new(p.a, p.b, p.f, u, w.set(), StateConstraint::HPoly(x))?;
    RcScenario::time_invariant(step, horizon, goal, Variant::PolytopicX)
}

pub fn stable_2d_plant() -> LtiPlant {
    LtiPlant {
        a: from_rows(&[[0.99, 0.02], [-0.15, 0.99]]),
        b: from_rows(&[[-0.01], [0.08]]),
        f: Mat::identity(2, 2),
        discrete: true,
        dt: None,
    }
}

pub const STABLE_2D_HORIZON: usize = 100;

/// The unbounded two-row state constraint of the stable planar system.
pub fn stable_2d_state_constraint() -> HPolyhedron {
    HPolyhedron::new(from_rows(&[[-1.0, 0.0], [2.0, 1.0]]), vec![2.0, 5.0]).unwrap()
}

/// Stable planar system with a polyhedral `X`; needs the inverted-`A` variant.
pub fn stable_2d_system(horizon: usize) -> Result<RcScenario> {
    stable_2d_with(horizon, Variant::InvertibleA)
}

pub fn stable_2d_with(horizon: usize, variant: Variant) -> Result<RcScenario> {
    let p = stable_2d_plant();
    let u = ConstrainedZonotope::interval_box(&[-1.5], &[1.5])?;
    let w = SymmetricSet::zonotope(linalg::diag(&[0.01, 0.01]), vec![0.0, 0.0])?;
    let goal = ConstrainedZonotope::zonotope(linalg::diag(&[0.5, 0.5]), vec![1.5, 0.0])?;
    let step = RcStep::new(p.a, p.b, p.f, u, w, StateConstraint::HPoly(stable_2d_state_constraint()))?;
    RcScenario::time_invariant(step, horizon, goal, variant)
}

/// Parameters of the mass-spring-damper chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainParams {
    pub masses: usize,
    pub k: f64,
    pub m: f64,
    pub mu: f64,
    pub dt: f64,
}

impl ChainParams {
    pub fn new(masses: usize) -> Self {
        ChainParams { masses, k: 0.1, m: 0.1, mu: 0.01, dt: 0.1 }
    }
}

/// How the chain's goal set is represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoalRepr {
    /// Box zonotope, no constraints.
    Zonotope,
    /// Invertible form of the box H-Rep (`4 N_M` constraints).
    Invertible,
}

/// Disturbance choices for the chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChainDisturbance {
    /// `[−w, w]^{N_M}`
    Box(f64),
    /// Ball of radius `w` in `ℝ^{N_M}`.
    Ball(f64),
}

/// Continuous chain dynamics on the interleaved state `(x₁, v₁, …, x_N, v_N)`;
/// `B_c = F_c` act on the velocities.
pub fn chain_plant(p: ChainParams) -> Result<LtiPlant> {
    if p.masses < 2 {
        return Err(Error::InvalidInput(format!("chain needs at least two masses, got {}", p.masses)));
    }
    if !(p.m > 0.0) {
        return Err(Error::InvalidInput("mass must be positive".into()));
    }
    let nm = p.masses;
    let n = 2 * nm;
    let mut a = Mat::<f64>::zeros(n, n);
    let mut b = Mat::<f64>::zeros(n, nm);
    for j in 0..nm {
        let (x, v) = (2 * j, 2 * j + 1);
        a[(x, v)] = 1.0;
        a[(v, x)] = -2.0 * p.k / p.m;
        a[(v, v)] = -p.mu / p.m;
        if j > 0 {
            a[(v, x - 2)] = p.k / p.m;
        }
        if j + 1 < nm {
            a[(v, x + 2)] = p.k / p.m;
        }
        b[(v, j)] = 1.0;
    }
    Ok(LtiPlant { a, f: b.clone(), b, discrete: false, dt: None })
}

/// Chain scenario: `U = [−0.1, 0.1]^{N_M}`, `X = G = ([−0.2, 0.2] × [−0.5, 0.5])^{N_M}`.
pub fn spring_mass_chain(
    p: ChainParams,
    horizon: usize,
    goal: GoalRepr,
    w: ChainDisturbance,
) -> Result<RcScenario> {
    let plant = chain_plant(p)?.discretize(p.dt)?;
    let nm = p.masses;
    let u = ConstrainedZonotope::interval_box(&vec![-0.1; nm], &vec![0.1; nm])?;
    let w = match w {
        ChainDisturbance::Box(r) => SymmetricSet::zonotope(linalg::diag(&vec![r; nm]), vec![0.0; nm])?,
        ChainDisturbance::Ball(r) => SymmetricSet::ellipsoid(linalg::diag(&vec![r; nm]), vec![0.0; nm])?,
    };
    let hi: Vec<f64> = (0..2 * nm).map(|i| if i % 2 == 0 { 0.2 } else { 0.5 }).collect();
    let lo: Vec<f64> = hi.iter().map(|v| -v).collect();
    let x_poly = HPolyhedron::from_box(&lo, &hi)?;
    let x = invertible_from_hpoly(&x_poly)?;
    let goal = match goal {
        GoalRepr::Zonotope => ConstrainedZonotope::interval_box(&lo, &hi)?,
        GoalRepr::Invertible => x.clone(),
    };
    let step = RcStep::new(plant.a, plant.b, plant.f, u, w, StateConstraint::CZono(x))?;
    RcScenario::time_invariant(step, horizon, goal, Variant::PolytopicX)
}

/// The case-study default: box disturbance of half-width `1e-4`, Invertible goal.
pub fn chain_default(masses: usize, horizon: usize) -> Result<RcScenario> {
    spring_mass_chain(ChainParams::new(masses), horizon, GoalRepr::Invertible, ChainDisturbance::Box(1e-4))
}

/// Random planar scenario for property checks: `A` near a rotation,
/// one input, a zonotope/ellipsoid/ℓ1 disturbance, a clipped box for `X` and
/// a zonotope goal. Seeded, so the same seed gives the same scenario.
pub fn random_planar(seed: u64, horizon: usize, variant: Variant) -> Result<RcScenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let th: f64 = rng.gen_range(-0.3..0.3);
    let rho: f64 = rng.gen_range(0.95..1.05);
    let a = from_rows(&[
        [rho * th.cos() + rng.gen_range(-0.05..0.05), -rho * th.sin()],
        [rho * th.sin(), rho * th.cos() + rng.gen_range(-0.05..0.05)],
    ]);
    let b = from_rows(&[[rng.gen_range(-0.2..0.2)], [rng.gen_range(0.05..0.3)]]);
    let u = ConstrainedZonotope::interval_box(&[-1.0], &[1.0])?;
    let wg = Matrix::from_fn(2, 2, |i, j| if i == j { rng.gen_range(0.01..0.05) } else { rng.gen_range(-0.01..0.01) });
    let wc = vec![rng.gen_range(-0.01..0.01), rng.gen_range(-0.01..0.01)];
    let w = match rng.gen_range(0..3) {
        0 => SymmetricSet::zonotope(wg, wc)?,
        1 => SymmetricSet::ellipsoid(wg, wc)?,
        _ => SymmetricSet::cross_polytope(wg, wc)?,
    };
    let mut rows = vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
    let mut k = vec![2.0; 4];
    for _ in 0..2 {
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        rows.push([phi.cos(), phi.sin()]);
        k.push(rng.gen_range(1.6..2.2));
    }
    let x = HPolyhedron::new(from_rows(&rows), k)?;
    let ng = rng.gen_range(2..4);
    let g = Matrix::from_fn(2, ng, |_, _| rng.gen_range(-0.8..0.8));
    let gc = vec![rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)];
    let goal = ConstrainedZonotope::zonotope(g, gc)?;
    let step = RcStep::new(a, b, Mat::identity(2, 2), u, w, StateConstraint::HPoly(x))?;
    RcScenario::time_invariant(step, horizon, goal, variant)
}
