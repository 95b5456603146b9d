//! Area-ratio comparisons against the planar oracle and the chain benchmark.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::models::chain_default;
use crate::oracle::{exact_rc_2d, support_polygon, ConvexPolygon};
use crate::rcset::{predicted_complexity, rc_run, Approx, RcOptions, RcScenario};
use crate::sets::{ConstrainedZonotope, ReprComplexity, SymmetricKind};

/// Base direction count and relative sliver tolerance for area estimates.
pub const AREA_DIRECTIONS: usize = 100;
pub const AREA_REL_TOL: f64 = 1e-5;

/// Area of a planar constrained zonotope from its adaptive support polygon.
/// Returns `(estimate, upper bound)`; both are zero for the empty set.
pub fn czono_area(c: &ConstrainedZonotope, directions: usize) -> Result<(f64, f64)> {
    match support_polygon(c, directions, AREA_REL_TOL)? {
        Some(sp) => Ok((sp.area(), sp.outer.area())),
        None => Ok((0.0, 0.0)),
    }
}

/// One row of a comparison table.
#[derive(Clone, Debug)]
pub struct MethodRow {
    pub method: String,
    pub area: f64,
    pub area_upper: f64,
    pub ratio: f64,
    pub complexity: Option<ReprComplexity>,
    pub millis: f64,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub exact: ConvexPolygon,
    pub exact_area: f64,
    pub rows: Vec<MethodRow>,
}

impl Comparison {
    pub fn ratio(&self, method: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.method == method).map(|r| r.ratio)
    }
}

/// A method to compare: label, scenario it runs on and approximation.
pub struct MethodSpec<'a> {
    pub label: &'a str,
    pub scenario: &'a RcScenario,
    pub approx: Approx,
}

/// Runs each method and divides the area of its `K₀` by the exact area of
/// `reference`. A method that hits an empty set reports area zero.
pub fn oracle_compare(reference: &RcScenario, methods: &[MethodSpec<'_>], directions: usize) -> Result<Comparison> {
    if reference.dim() != 2 {
        return Err(Error::DimensionMismatch(format!("oracle comparison needs n = 2, got {}", reference.dim())));
    }
    let exact = exact_rc_2d(reference)?
        .pop()
        .flatten()
        .ok_or_else(|| Error::Degenerate("exact robust controllable set is empty".into()))?;
    let exact_area = exact.area();
    let mut rows = Vec::with_capacity(methods.len());
    for m in methods {
        let opts = match m.approx {
            Approx::Inner => RcOptions::inner(),
            Approx::Outer => RcOptions::outer(),
            Approx::TwoStage => RcOptions::two_stage(),
        };
        let res = rc_run(m.scenario, opts)?;
        let (area, area_upper) = match res.k0() {
            Some(k) => czono_area(k, directions)?,
            None => (0.0, 0.0),
        };
        rows.push(MethodRow {
            method: m.label.to_string(),
            area,
            area_upper,
            ratio: area / exact_area,
            complexity: res.k0().map(|k| k.complexity()),
            millis: res.total_millis(),
        });
    }
    Ok(Comparison { exact, exact_area, rows })
}

/// Planned method: label, scenario and approximation.
pub type PlannedMethod = (String, RcScenario, Approx);

/// Method labels understood by [`comparison_plan`].
pub const METHODS: [&str; 5] = ["inner", "outer", "two-stage", "inner-zono-w", "two-stage-zono-w"];

/// The comparison rows for a scenario. The two-stage baseline needs a
/// zonotopic disturbance, so for other disturbances it runs on the interval
/// hull `W⁺` next to the inner approximation on the same `W⁺`.
pub fn comparison_plan(sc: &RcScenario, requested: Option<&[String]>) -> Result<Vec<PlannedMethod>> {
    let zonotopic = sc.steps.iter().all(|s| s.w.kind() == SymmetricKind::Zonotope);
    let mut labels: Vec<&str> = vec!["inner", "outer"];
    if zonotopic {
        labels.push("two-stage");
    } else {
        labels.extend(["inner-zono-w", "two-stage-zono-w"]);
    }
    if let Some(req) = requested {
        for r in req {
            if !METHODS.contains(&r.as_str()) {
                return Err(Error::InvalidInput(format!("unknown method `{r}` (expected one of {})", METHODS.join(", "))));
            }
        }
        labels = METHODS.iter().copied().filter(|m| req.iter().any(|r| r == m)).collect();
    }
    let hull = || -> Result<RcScenario> {
        let mut out = sc.clone();
        for s in out.steps.iter_mut() {
            s.w = s.w.bounding_box()?;
        }
        Ok(out)
    };
    let mut plan = Vec::with_capacity(labels.len());
    for l in labels {
        let entry = match l {
            "inner" => (l.to_string(), sc.clone(), Approx::Inner),
            "outer" => (l.to_string(), sc.clone(), Approx::Outer),
            "two-stage" => {
                if !zonotopic {
                    return Err(Error::InvalidInput("two-stage requires zonotope".into()));
                }
                (l.to_string(), sc.clone(), Approx::TwoStage)
            }
            "inner-zono-w" => (l.to_string(), hull()?, Approx::Inner),
            _ => (l.to_string(), hull()?, Approx::TwoStage),
        };
        plan.push(entry);
    }
    Ok(plan)
}

/// One chain benchmark row.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub masses: usize,
    pub seconds: f64,
    pub complexity: Option<ReprComplexity>,
    pub predicted: ReprComplexity,
}

pub fn bench_chain_one(masses: usize, horizon: usize) -> Result<BenchRow> {
    let sc = chain_default(masses, horizon)?;
    let start = Instant::now();
    let res = rc_run(&sc, RcOptions::inner())?;
    let seconds = start.elapsed().as_secs_f64();
    Ok(BenchRow { masses, seconds, complexity: res.k0().map(|k| k.complexity()), predicted: predicted_complexity(&sc) })
}

/// Inner recursion on the chain for each mass count. With `parallel`, each
/// count runs on its own thread; rows come back in input order either way.
pub fn bench_chain(masses: &[usize], horizon: usize, parallel: bool) -> Result<Vec<BenchRow>> {
    for &nm in masses {
        if nm < 2 {
            return Err(Error::InvalidInput(format!("chain needs at least 2 masses, got {nm}")));
        }
    }
    if !parallel {
        return masses.iter().map(|&nm| bench_chain_one(nm, horizon)).collect();
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = masses.iter().map(|&nm| s.spawn(move || bench_chain_one(nm, horizon))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::NumericalFailure("benchmark thread panicked".into()))))
            .collect()
    })
}
