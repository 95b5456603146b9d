//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::time::Instant;

use common::*;
use czset::compare::{comparison_plan, oracle_compare, MethodSpec};
use czset::czops::{hpoly_from_invertible, invertible_from_hpoly, is_invertible_rep, min_row};
use czset::linalg::lp::{lp_solve, LpProblem};
use czset::linalg::{self, Matrix};
use czset::models::{self, ChainDisturbance, ChainParams, DiDisturbance, GoalRepr};
use czset::pdiff::{inner_pdiff, outer_pdiff, outer_polyhedron, PdiffResult};
use czset::rcset::{predicted_complexity, rc_inner, Variant};
use czset::sets::{membership_czono, support_czono, support_value, ConstrainedZonotope, SymmetricSet};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn within(secs: f64, limit: f64, what: &str) -> Result<(), String> {
    check(secs < limit, || format!("{what} took {secs:.1} s, limit {limit} s"))
}

/// Inner ⊆ exact ⊆ outer on random minuends and all three subtrahend kinds.
fn sandwich() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(101);
    let (mut cases, mut nonempty, mut pairs) = (0, 0, 0usize);
    for trial in 0..200 {
        let n = [2, 3, 4][trial % 3];
        let m = rng.gen_range(0..=4usize.min(12 - n - 1));
        let ng = rng.gen_range(n + m + 1..=12);
        let c = random_czono(&mut rng, n, ng, m);
        for kind in KINDS {
            cases += 1;
            let s = random_symmetric(&mut rng, n, kind, 0.08);
            let inner = inner_pdiff(&c, &s).map_err(|e| format!("trial {trial} {kind:?}: inner: {e}"))?;
            let outer = outer_pdiff(&c, &s).map_err(|e| format!("trial {trial} {kind:?}: outer: {e}"))?;
            let PdiffResult::Set(k) = inner else { continue };
            nonempty += 1;
            let PdiffResult::Set(o) = outer else {
                return Err(format!("trial {trial} {kind:?}: outer empty while inner is not"));
            };
            let xs: Vec<Vec<f64>> = random_dirs(&mut rng, n, 50)
                .iter()
                .map(|d| support_czono(&k, d).unwrap().expect("non-empty").point)
                .collect();
            let ss: Vec<Vec<f64>> =
                random_dirs(&mut rng, n, 50).iter().map(|d| s.support_vector(d).unwrap().unwrap()).collect();
            for x in &xs {
                for sv in &ss {
                    let y: Vec<f64> = x.iter().zip(sv).map(|(a, b)| a + b).collect();
                    pairs += 1;
                    check(membership_czono(&c, &y, 1e-6).unwrap(), || format!("trial {trial} {kind:?}: x + s outside C"))?;
                }
            }
            let excess = support_excess(&k, &o, &random_dirs(&mut rng, n, 100));
            check(excess <= 1e-7, || format!("trial {trial} {kind:?}: inner support exceeds outer by {excess:e}"))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    within(secs, 60.0, "sandwich")?;
    Ok(format!("{cases} cases, {nonempty} non-empty, {pairs} memberships, {secs:.1} s"))
}

/// Inner and outer coincide on Invertible minuends; the cover is the exact
/// H-Rep.
fn exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(202);
    let mut compared = 0;
    for trial in 0..100 {
        let n = 2 + trial % 2;
        let cuts = rng.gen_range(2..5);
        let p = random_polytope(&mut rng, n, cuts);
        let c = invertible_from_hpoly(&p).map_err(|e| format!("trial {trial}: {e}"))?;
        check(is_invertible_rep(&c), || format!("trial {trial}: not Invertible"))?;
        let dirs = random_dirs(&mut rng, n, 100);
        for kind in KINDS {
            let s = random_symmetric(&mut rng, n, kind, 0.05);
            let inner = inner_pdiff(&c, &s).map_err(|e| format!("trial {trial}: {e}"))?;
            let outer = outer_pdiff(&c, &s).map_err(|e| format!("trial {trial}: {e}"))?;
            match (inner, outer) {
                (PdiffResult::Set(k), PdiffResult::Set(o)) => {
                    let gap = support_gap(&k, &o, &dirs);
                    check(gap <= 1e-7, || format!("trial {trial} {kind:?}: inner and outer differ by {gap:e}"))?;
                    compared += 1;
                }
                (PdiffResult::Empty, PdiffResult::Empty) => {}
                _ => return Err(format!("trial {trial} {kind:?}: only one result is empty")),
            }
        }
        let cover = outer_polyhedron(&c).map_err(|e| format!("trial {trial}: {e}"))?.poly;
        let exact = hpoly_from_invertible(&c).map_err(|e| format!("trial {trial}: {e}"))?;
        let gap = hpoly_support_gap(&cover, &exact, &dirs);
        check(gap <= 1e-8, || format!("trial {trial}: cover differs from exact H-Rep by {gap:e}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    within(secs, 30.0, "exactness")?;
    Ok(format!("{compared} non-empty pairs equal, 100 covers exact, {secs:.1} s"))
}

fn near(x: Option<f64>, target: f64, tol: f64, what: &str) -> Result<f64, String> {
    let x = x.ok_or_else(|| format!("{what}: missing"))?;
    check((x - target).abs() <= tol, || format!("{what} = {x:.3}, want {target} ± {tol}"))?;
    Ok(x)
}

fn labels(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Double integrator area ratios against the exact planar recursion.
fn double_integrator_ratios() -> Outcome {
    let start = Instant::now();
    let ball = models::double_integrator(0.1, DiDisturbance::Ball, 20).map_err(|e| e.to_string())?;
    let plan = comparison_plan(&ball, Some(&labels(&["inner", "inner-zono-w", "two-stage-zono-w"]))).map_err(|e| e.to_string())?;
    let specs: Vec<MethodSpec<'_>> = plan.iter().map(|(l, s, a)| MethodSpec { label: l, scenario: s, approx: *a }).collect();
    let cmp = oracle_compare(&ball, &specs, 100).map_err(|e| e.to_string())?;
    let r_ball = near(cmp.ratio("inner"), 0.97, 0.05, "ball inner ratio")?;
    let r_zono = near(cmp.ratio("inner-zono-w"), 0.70, 0.05, "zonotopic W+ inner ratio")?;
    let r_two = near(cmp.ratio("two-stage-zono-w"), 0.67, 0.05, "two-stage ratio")?;
    let cx = cmp.rows[0].complexity.ok_or("ball inner K0 empty")?;
    check(cx.constraints == 120 && cx.dof_ratio() == (11, 1), || format!("complexity {cx:?}, want (120, 11)"))?;

    let ell = models::double_integrator(0.1, DiDisturbance::Ellipsoid, 20).map_err(|e| e.to_string())?;
    let plan = comparison_plan(&ell, Some(&labels(&["inner"]))).map_err(|e| e.to_string())?;
    let specs: Vec<MethodSpec<'_>> = plan.iter().map(|(l, s, a)| MethodSpec { label: l, scenario: s, approx: *a }).collect();
    let cmp = oracle_compare(&ell, &specs, 100).map_err(|e| e.to_string())?;
    let r_ell = near(cmp.ratio("inner"), 0.77, 0.05, "ellipsoid inner ratio")?;
    let secs = start.elapsed().as_secs_f64();
    within(secs, 120.0, "double integrator comparison")?;
    Ok(format!(
        "ball {r_ball:.3}, ellipsoid {r_ell:.3}, zono W+ {r_zono:.3}, two-stage {r_two:.3}, C = (120, 11), {secs:.1} s"
    ))
}

/// Long-horizon stable system.
fn stable_system() -> Outcome {
    let sc = models::stable_2d_system(100).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let res = rc_inner(&sc).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let k0 = res.k0().ok_or("K0 empty")?;
    check(k0.n_con() == 200, || format!("M = {}, want 200", k0.n_con()))?;
    within(secs, 5.0, "inner recursion")?;
    let plan = comparison_plan(&sc, Some(&labels(&["inner"]))).map_err(|e| e.to_string())?;
    let specs: Vec<MethodSpec<'_>> = plan.iter().map(|(l, s, a)| MethodSpec { label: l, scenario: s, approx: *a }).collect();
    let cmp = oracle_compare(&sc, &specs, 100).map_err(|e| e.to_string())?;
    let r = near(cmp.ratio("inner"), 0.89, 0.05, "inner ratio")?;
    Ok(format!("M = 200, ratio {r:.3}, recursion {secs:.2} s"))
}

/// Chain complexity, with and without a disturbance-kind swap.
fn chain_complexity() -> Outcome {
    let p = ChainParams::new(5);
    let sc = models::spring_mass_chain(p, 20, GoalRepr::Invertible, ChainDisturbance::Box(1e-4)).map_err(|e| e.to_string())?;
    let k0 = rc_inner(&sc).map_err(|e| e.to_string())?.k0().cloned().ok_or("K0 empty")?;
    let cx = k0.complexity();
    check(cx.constraints == 620 && cx.dof_ratio() == (11, 1) && cx.generators == 730, || format!("{cx:?}"))?;
    check(cx == predicted_complexity(&sc), || "prediction differs".into())?;
    let ball = models::spring_mass_chain(p, 20, GoalRepr::Invertible, ChainDisturbance::Ball(1e-4)).map_err(|e| e.to_string())?;
    let kb = rc_inner(&ball).map_err(|e| e.to_string())?.k0().cloned().ok_or("K0 empty with ball W")?;
    check(kb.complexity() == cx, || format!("ball W gives {:?}", kb.complexity()))?;
    Ok("C(K0) = (620, 11), N = 730, unchanged under ball W".into())
}

/// Chain with 50 masses.
fn chain_scale() -> Outcome {
    let mut notes = Vec::new();
    for (t, limit) in [(20, 60.0), (40, 600.0)] {
        let sc = models::chain_default(50, t).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let res = rc_inner(&sc).map_err(|e| format!("T = {t}: {e}"))?;
        let secs = start.elapsed().as_secs_f64();
        let k0 = res.k0().ok_or_else(|| format!("T = {t}: K0 empty"))?;
        check(linalg::all_finite(k0.g().as_ref()), || format!("T = {t}: non-finite generators"))?;
        within(secs, limit, &format!("T = {t}"))?;
        notes.push(format!("T = {t}: {secs:.1} s, M = {}", k0.n_con()));
    }
    Ok(notes.join("; "))
}

/// Cross-polytope support by LP over `λ⁺, λ⁻ ≥ 0` with `Σ λ⁺ + λ⁻ ≤ 1`.
fn l1_support_lp(g: &Matrix, c: &[f64], nu: &[f64]) -> f64 {
    let w = linalg::mat_t_vec(g.as_ref(), nu);
    let k = w.len();
    let mut obj = w.clone();
    obj.extend(w.iter().map(|v| -v));
    let p = LpProblem::new(obj)
        .with_ineq(Matrix::from_fn(1, 2 * k, |_, _| 1.0), vec![1.0])
        .with_bounds(vec![0.0; 2 * k], vec![f64::INFINITY; 2 * k]);
    lp_solve(&p).unwrap().value().unwrap() + linalg::dot(nu, c)
}

/// Closed-form supports against optimization oracles.
fn closed_form_supports() -> Outcome {
    let mut rng = rng(707);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = 2 + i % 4;
        let k = rng.gen_range(1..=2 * n);
        let g = Matrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..1.0));
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nu = random_dirs(&mut rng, n, 1).pop().unwrap();

        let z = SymmetricSet::zonotope(g.clone(), c.clone()).unwrap();
        let lp = support_value(&ConstrainedZonotope::zonotope(g.clone(), c.clone()).unwrap(), &nu).unwrap();
        worst = worst.max((z.support(&nu).unwrap() - lp).abs());

        let l1 = SymmetricSet::cross_polytope(g.clone(), c.clone()).unwrap();
        worst = worst.max((l1.support(&nu).unwrap() - l1_support_lp(&g, &c, &nu)).abs());

        // no LP describes a ball; the oracle is the Gram-matrix quadratic form
        let ge = Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let e = SymmetricSet::ellipsoid(ge.clone(), c.clone()).unwrap();
        let q = &ge * ge.transpose();
        let quad = linalg::dot(&nu, &linalg::mat_vec(q.as_ref(), &nu)).max(0.0).sqrt() + linalg::dot(&nu, &c);
        worst = worst.max((e.support(&nu).unwrap() - quad).abs());
    }
    check(worst <= 1e-9, || format!("largest mismatch {worst:e}"))?;
    Ok(format!("300 pairs, largest mismatch {worst:.1e}"))
}

/// Complexity law, monotone nesting in the disturbance scale and
/// independence of the disturbance kind.
fn recursion_properties() -> Outcome {
    let mut rng = rng(808);
    let mut nonempty = 0;
    for seed in 0..50u64 {
        let t = 1 + (seed as usize % 5);
        let variant = if seed % 2 == 0 { Variant::PolytopicX } else { Variant::InvertibleA };
        let sc = models::random_planar(seed, t, variant).map_err(|e| format!("seed {seed}: {e}"))?;
        let dirs = random_dirs(&mut rng, 2, 32);
        let run = |s: &czset::rcset::RcScenario| rc_inner(s).map(|r| r.k0().cloned()).map_err(|e| format!("seed {seed}: {e}"));
        let k1 = run(&sc)?;
        if let Some(k) = &k1 {
            nonempty += 1;
            check(k.complexity() == predicted_complexity(&sc), || format!("seed {seed}: {:?} vs predicted", k.complexity()))?;
        }
        let kh = run(&sc.with_scaled_disturbance(0.5))?;
        let k0 = run(&sc.with_scaled_disturbance(0.0))?.ok_or_else(|| format!("seed {seed}: disturbance-free K0 empty"))?;
        if let Some(k1) = &k1 {
            let kh = kh.as_ref().ok_or_else(|| format!("seed {seed}: K0(0.5) empty but K0(1) not"))?;
            let e = support_excess(k1, kh, &dirs);
            check(e <= 1e-7, || format!("seed {seed}: K0(1) not inside K0(0.5), excess {e:e}"))?;
        }
        if let Some(kh) = &kh {
            let e = support_excess(kh, &k0, &dirs);
            check(e <= 1e-7, || format!("seed {seed}: K0(0.5) not inside K0(0), excess {e:e}"))?;
        }
        let w_ell = SymmetricSet::ellipsoid(linalg::diag(&[0.02, 0.03]), vec![0.0; 2]).unwrap();
        let w_zono = SymmetricSet::zonotope(Matrix::from_fn(2, 5, |i, j| 0.004 * (1 + i + j) as f64), vec![0.0; 2]).unwrap();
        for w in [w_ell, w_zono] {
            let alt = sc.with_disturbance(w).map_err(|e| e.to_string())?;
            if let (Some(a), Some(k1)) = (run(&alt)?, &k1) {
                check(a.complexity() == k1.complexity(), || format!("seed {seed}: complexity depends on W"))?;
            }
        }
    }
    check(nonempty >= 25, || format!("only {nonempty} of 50 scenarios non-empty"))?;
    Ok(format!("50 scenarios, {nonempty} with non-empty K0"))
}

/// Canonical-form round trips.
fn round_trips() -> Outcome {
    let mut rng = rng(909);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = 2 + trial % 2;
        let cuts = rng.gen_range(1..5);
        let p = random_polytope(&mut rng, n, cuts);
        let c1 = invertible_from_hpoly(&p).map_err(|e| format!("trial {trial}: {e}"))?;
        let h = hpoly_from_invertible(&c1).map_err(|e| format!("trial {trial}: {e}"))?;
        let c2 = invertible_from_hpoly(&h).map_err(|e| format!("trial {trial}: {e}"))?;
        worst = worst.max(support_gap(&c1, &c2, &random_dirs(&mut rng, n, 100)));
    }
    check(worst <= 1e-8, || format!("round trip moved a support by {worst:e}"))?;
    for trial in 0..100 {
        let n = 2 + trial % 3;
        let m = rng.gen_range(1..4);
        let ng = n + m + rng.gen_range(1..4);
        let c = random_czono(&mut rng, n, ng, m);
        // plant a dependent row: a combination of the existing ones
        let (g, cc, a, b) = c.clone().into_parts();
        let a = a.to_dense();
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let extra: Vec<f64> = (0..a.ncols()).map(|j| (0..m).map(|i| w[i] * a[(i, j)]).sum()).collect();
        let a2 = linalg::vstack(a.as_ref(), Matrix::from_fn(1, extra.len(), |_, j| extra[j]).as_ref());
        let mut b2 = b.clone();
        b2.push(linalg::dot(&w, &b));
        let planted = ConstrainedZonotope::new(g, cc, a2, b2).unwrap();
        let r = min_row(&planted).map_err(|e| format!("trial {trial}: {e}"))?;
        let rank = linalg::numerical_rank(r.stacked().as_ref(), linalg::ROW_SUBSET_TOL);
        check(rank == n + r.n_con(), || format!("trial {trial}: rank {rank} vs n + M = {}", n + r.n_con()))?;
        check(r.n_con() == m, || format!("trial {trial}: kept {} rows, want {m}", r.n_con()))?;
        let rr = min_row(&r).map_err(|e| format!("trial {trial}: {e}"))?;
        check(rr.n_con() == r.n_con(), || format!("trial {trial}: min_row not idempotent"))?;
        let gap = support_gap(&planted, &r, &random_dirs(&mut rng, n, 20));
        check(gap <= 1e-8, || format!("trial {trial}: min_row changed the set by {gap:e}"))?;
    }
    Ok(format!("100 polytope round trips (largest gap {worst:.1e}), 100 min_row checks"))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 9] = [
        ("1", "Pontryagin sandwich", sandwich),
        ("2", "exactness on Invertible representations", exactness),
        ("3", "double integrator area ratios", double_integrator_ratios),
        ("4", "stable system, T = 100", stable_system),
        ("5", "chain complexity", chain_complexity),
        ("6", "chain scalability", chain_scale),
        ("7", "closed-form supports", closed_form_supports),
        ("8", "recursion properties", recursion_properties),
        ("9", "canonical-form round trips", round_trips),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| x == id) {
            continue;
        }
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS {id} {name}: {detail} [{secs:.1} s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id} {name}: {why} [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
