//! Random instances and set comparisons shared by the integration tests.
#![allow(dead_code)]

use czset::linalg::{self, Matrix};
use czset::sets::{support_value, ConstrainedZonotope, HPolyhedron, SymmetricSet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_dirs(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = linalg::norm2(&v).max(1e-12);
            v.into_iter().map(|x| x / r).collect()
        })
        .collect()
}

/// Generic full-dimensional constrained zonotope: `b = A ξ₀` with `ξ₀` deep
/// inside the box and `N ≥ n + M`.
pub fn random_czono(rng: &mut ChaCha8Rng, n: usize, ng: usize, m: usize) -> ConstrainedZonotope {
    assert!(ng >= n + m);
    let g = Matrix::from_fn(n, ng, |_, _| rng.gen_range(-1.0..1.0));
    let a = Matrix::from_fn(m, ng, |_, _| rng.gen_range(-1.0..1.0));
    let xi0: Vec<f64> = (0..ng).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let b = linalg::mat_vec(a.as_ref(), &xi0);
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    ConstrainedZonotope::new(g, c, a, b).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Zonotope,
    Ellipsoid,
    L1Ball,
}

pub const KINDS: [Kind; 3] = [Kind::Zonotope, Kind::Ellipsoid, Kind::L1Ball];

/// Small symmetric set with a few generators around a small center.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, kind: Kind, scale: f64) -> SymmetricSet {
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.2..0.2) * scale).collect();
    match kind {
        Kind::Zonotope => {
            let k = rng.gen_range(1..=n + 1);
            SymmetricSet::zonotope(Matrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..1.0) * scale), c).unwrap()
        }
        Kind::Ellipsoid => {
            SymmetricSet::ellipsoid(Matrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0) * scale), c).unwrap()
        }
        Kind::L1Ball => {
            let k = rng.gen_range(n..=n + 2);
            SymmetricSet::cross_polytope(Matrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..1.0) * scale), c).unwrap()
        }
    }
}

/// Random bounded polytope: a few random cuts plus a surrounding box.
pub fn random_polytope(rng: &mut ChaCha8Rng, n: usize, cuts: usize) -> HPolyhedron {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut k = Vec::new();
    for d in random_dirs(rng, n, cuts) {
        rows.push(d);
        k.push(rng.gen_range(0.5..1.2));
    }
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            rows.push(e);
            k.push(rng.gen_range(1.0..1.6));
        }
    }
    HPolyhedron::new(linalg::from_rows(&rows), k).unwrap()
}

/// Largest `ρ_inner(d) − ρ_outer(d)` over the directions.
pub fn support_excess(inner: &ConstrainedZonotope, outer: &ConstrainedZonotope, dirs: &[Vec<f64>]) -> f64 {
    dirs.iter()
        .map(|d| support_value(inner, d).unwrap() - support_value(outer, d).unwrap())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest `|ρ_a(d) − ρ_b(d)|` over the directions.
pub fn support_gap(a: &ConstrainedZonotope, b: &ConstrainedZonotope, dirs: &[Vec<f64>]) -> f64 {
    dirs.iter()
        .map(|d| (support_value(a, d).unwrap() - support_value(b, d).unwrap()).abs())
        .fold(0.0, f64::max)
}

/// Largest `|ρ_P(d) − ρ_Q(d)|` for two bounded polyhedra.
pub fn hpoly_support_gap(p: &HPolyhedron, q: &HPolyhedron, dirs: &[Vec<f64>]) -> f64 {
    dirs.iter()
        .map(|d| (p.support(d).unwrap().unwrap() - q.support(d).unwrap().unwrap()).abs())
        .fold(0.0, f64::max)
}
