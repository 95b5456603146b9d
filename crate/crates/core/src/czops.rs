//! Closed-form operations on constrained zonotopes and the MinRow /
//! Invertible canonical forms.

use crate::error::{dim_err, Error, Result};
use crate::linalg::lp::{lp_solve, LpOutcome, LpProblem};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::{self, Matrix, ROW_SUBSET_TOL};
use crate::sets::{ConstrainedZonotope, HPolyhedron, Halfspace};
use faer::Mat;

/// Condition-number ceiling for treating `[G; A]` as invertible.
pub const MAX_INVERTIBLE_COND: f64 = 1e12;

/// Relative tolerance for the full-dimensionality checks of the Invertible construction.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// `R C = (R G, R c, A, b)`.
pub fn affine_map(r: &Matrix, c: &ConstrainedZonotope) -> Result<ConstrainedZonotope> {
    if r.ncols() != c.dim() {
        return dim_err(format!("map has {} columns, set lives in R^{}", r.ncols(), c.dim()));
    }
    let g = r * c.g();
    let cc = linalg::mat_vec(r.as_ref(), c.c());
    ConstrainedZonotope::from_sparse(g, cc, c.a().clone(), c.b().to_vec())
}

/// `C ⊕ S`.
pub fn minkowski_sum(c: &ConstrainedZonotope, s: &ConstrainedZonotope) -> Result<ConstrainedZonotope> {
    if c.dim() != s.dim() {
        return dim_err(format!("Minkowski sum of sets in R^{} and R^{}", c.dim(), s.dim()));
    }
    let g = linalg::hstack(c.g().as_ref(), s.g().as_ref());
    let cc = c.c().iter().zip(s.c()).map(|(x, y)| x + y).collect();
    let a = c.a().block_diag(s.a());
    let b = c.b().iter().chain(s.b()).copied().collect();
    ConstrainedZonotope::from_sparse(g, cc, a, b)
}

/// `C ∩_R W = {x ∈ C : R x ∈ W}`.
pub fn intersect_inverse_affine(
    c: &ConstrainedZonotope,
    r: &Matrix,
    w: &ConstrainedZonotope,
) -> Result<ConstrainedZonotope> {
    if r.ncols() != c.dim() || r.nrows() != w.dim() {
        return dim_err(format!(
            "map is {}x{}, sets live in R^{} and R^{}",
            r.nrows(),
            r.ncols(),
            c.dim(),
            w.dim()
        ));
    }
    let nw = w.n_gen();
    let g = linalg::hstack(c.g().as_ref(), Mat::<f64>::zeros(c.dim(), nw).as_ref());
    let rg = SparseMatrix::from_dense((r * c.g()).as_ref());
    let gw = SparseMatrix::from_dense(linalg::scaled(w.g().as_ref(), -1.0).as_ref());
    let coupling = rg.hstack(&gw);
    let a = c.a().block_diag(w.a()).vstack(&coupling);
    let rc = linalg::mat_vec(r.as_ref(), c.c());
    let b = c
        .b()
        .iter()
        .chain(w.b())
        .copied()
        .chain(w.c().iter().zip(&rc).map(|(cw, rc)| cw - rc))
        .collect();
    ConstrainedZonotope::from_sparse(g, c.c().to_vec(), a, b)
}

/// `C ∩ {x : pᵀx ≤ q}` with one extra generator and one extra constraint.
///
/// When the cut misses `C` entirely (`d_m < 0`) the slack coefficient is set
/// to zero, which leaves the new constraint row infeasible over the unit box.
pub fn intersect_halfspace(c: &ConstrainedZonotope, h: &Halfspace) -> Result<ConstrainedZonotope> {
    if h.p.len() != c.dim() {
        return dim_err(format!("halfspace normal has length {}, set lives in R^{}", h.p.len(), c.dim()));
    }
    let n_gen = c.n_gen();
    let pg = linalg::mat_t_vec(c.g().as_ref(), &h.p);
    let pc = linalg::dot(&h.p, c.c());
    let l1 = linalg::norm1(&pg);
    let dm = h.q - pc + l1;
    let g = linalg::hstack(c.g().as_ref(), Mat::<f64>::zeros(c.dim(), 1).as_ref());
    let mut a = c.a().pad_cols(1);
    let slack = if dm >= 0.0 { dm / 2.0 } else { 0.0 };
    a.push_row(pg.iter().copied().enumerate().chain(std::iter::once((n_gen, slack))));
    let mut b = c.b().to_vec();
    b.push((h.q - pc - l1) / 2.0);
    ConstrainedZonotope::from_sparse(g, c.c().to_vec(), a, b)
}

/// Fold [`intersect_halfspace`] over the rows of `P` in order.
pub fn intersect_hpoly(c: &ConstrainedZonotope, p: &HPolyhedron) -> Result<ConstrainedZonotope> {
    if p.dim() != c.dim() {
        return dim_err(format!("polyhedron lives in R^{}, set in R^{}", p.dim(), c.dim()));
    }
    let mut out = c.clone();
    for i in 0..p.n_rows() {
        out = intersect_halfspace(&out, &p.row(i))?;
    }
    Ok(out)
}

/// Drop linearly dependent rows of `[A, b]`.
pub fn min_row(c: &ConstrainedZonotope) -> Result<ConstrainedZonotope> {
    let ab = linalg::hstack(c.a_dense().as_ref(), linalg::col_vec(c.b()).as_ref());
    let keep = linalg::independent_row_subset_tol(ab.as_ref(), ROW_SUBSET_TOL);
    let out = if keep.len() == c.n_con() {
        c.clone()
    } else {
        let b = keep.iter().map(|&i| c.b()[i]).collect();
        ConstrainedZonotope::from_sparse(c.g().clone(), c.c().to_vec(), c.a().select_rows(&keep), b)?
    };
    let needed = out.dim() + out.n_con();
    let rank = linalg::numerical_rank(out.stacked().as_ref(), ROW_SUBSET_TOL);
    if rank < needed {
        return Err(Error::NotFullDimensional(format!("rank([G; A]) = {rank} after row reduction, need {needed}")));
    }
    Ok(out)
}

/// `[G; A]` has full row rank.
pub fn is_min_row(c: &ConstrainedZonotope) -> bool {
    let p = c.stacked();
    p.nrows() <= p.ncols() && linalg::numerical_rank(p.as_ref(), ROW_SUBSET_TOL) == p.nrows()
}

/// MinRow with `N = n + M`.
pub fn is_invertible_rep(c: &ConstrainedZonotope) -> bool {
    c.n_gen() == c.dim() + c.n_con() && is_min_row(c)
}

/// Interval hull `[l, u]` of a polyhedron from `2n` support LPs.
pub fn hpoly_bounds(p: &HPolyhedron) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = p.dim();
    let mut l = vec![0.0; n];
    let mut u = vec![0.0; n];
    for i in 0..n {
        let mut e = vec![0.0; n];
        for (sign, slot) in [(1.0, &mut u[i]), (-1.0, &mut l[i])] {
            e[i] = sign;
            match p.support(&e)? {
                None => return Err(Error::Degenerate("polyhedron is empty".into())),
                Some(v) if v.is_infinite() => {
                    return Err(Error::Unbounded(format!("polyhedron is unbounded along {}e_{i}", sign)))
                }
                Some(v) => *slot = sign * v,
            }
        }
    }
    Ok((l, u))
}

/// Interval hull of a constrained zonotope; `None` when it is empty.
pub fn czono_bounds(c: &ConstrainedZonotope) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let n = c.dim();
    let ng = c.n_gen();
    let a = c.a_dense();
    let mut l = vec![0.0; n];
    let mut u = vec![0.0; n];
    for i in 0..n {
        let gi = linalg::row_to_vec(c.g().as_ref(), i);
        for sign in [1.0, -1.0] {
            let obj = gi.iter().map(|v| sign * v).collect();
            let p = LpProblem::new(obj).with_bounds(vec![-1.0; ng], vec![1.0; ng]).with_eq(a.clone(), c.b().to_vec());
            match lp_solve(&p)? {
                LpOutcome::Optimal { value, .. } => {
                    if sign > 0.0 {
                        u[i] = c.c()[i] + value;
                    } else {
                        l[i] = c.c()[i] - value;
                    }
                }
                LpOutcome::Infeasible => return Ok(None),
                LpOutcome::Unbounded => {
                    return Err(Error::NumericalFailure("bound LP over a box reported unbounded".into()))
                }
            }
        }
    }
    Ok(Some((l, u)))
}

/// Invertible representation of a bounded full-dimensional H-Rep polytope.
pub fn invertible_from_hpoly(p: &HPolyhedron) -> Result<ConstrainedZonotope> {
    let (n, rows) = (p.dim(), p.n_rows());
    let (l, u) = hpoly_bounds(p)?;
    let scale = 1f64.max(linalg::norm2(&u)).max(linalg::norm2(&l));
    for i in 0..n {
        if u[i] - l[i] <= DEGENERACY_TOL * scale {
            return Err(Error::Degenerate(format!("polytope is flat along e_{i}: width {:.3e}", u[i] - l[i])));
        }
    }
    let half: Vec<f64> = l.iter().zip(&u).map(|(l, u)| (u - l) / 2.0).collect();
    let cz: Vec<f64> = l.iter().zip(&u).map(|(l, u)| (u + l) / 2.0).collect();
    let gz = linalg::diag(&half);
    let hg = &p.h * &gz;
    let hc = linalg::mat_vec(p.h.as_ref(), &cz);
    let mut sigma = vec![0.0; rows];
    for i in 0..rows {
        let l1: f64 = (0..n).map(|j| hg[(i, j)].abs()).sum();
        sigma[i] = hc[i] - l1;
        let hn = linalg::norm2(&linalg::row_to_vec(p.h.as_ref(), i));
        if p.k[i] - sigma[i] <= DEGENERACY_TOL * hn * scale {
            return Err(Error::Degenerate(format!(
                "row {i} touches the bounding box only at its boundary (k - sigma = {:.3e})",
                p.k[i] - sigma[i]
            )));
        }
    }
    let g = linalg::hstack(gz.as_ref(), Mat::<f64>::zeros(n, rows).as_ref());
    let slack: Vec<f64> = sigma.iter().zip(&p.k).map(|(s, k)| (s - k) / 2.0).collect();
    let a = linalg::hstack(hg.as_ref(), linalg::diag(&slack).as_ref());
    let b = (0..rows).map(|i| (sigma[i] + p.k[i]) / 2.0 - hc[i]).collect();
    ConstrainedZonotope::new(g, cz, a, b)
}

/// Exact H-Rep of an Invertible representation, `2N` rows.
pub fn hpoly_from_invertible(c: &ConstrainedZonotope) -> Result<HPolyhedron> {
    let (n, m, ng) = (c.dim(), c.n_con(), c.n_gen());
    if ng != n + m {
        return Err(Error::NotInvertible(format!("[G; A] is {}x{ng}, not square", n + m)));
    }
    let p = c.stacked();
    let mut rhs = Mat::<f64>::zeros(ng, n + 1);
    for i in 0..n {
        rhs[(i, i)] = 1.0;
        rhs[(i, n)] = -c.c()[i];
    }
    for i in 0..m {
        rhs[(n + i, n)] = c.b()[i];
    }
    let sol = linalg::solve_square(p.as_ref(), rhs.as_ref(), MAX_INVERTIBLE_COND)?;
    let h = Mat::from_fn(2 * ng, n, |i, j| if i < ng { sol[(i, j)] } else { -sol[(i - ng, j)] });
    let k = (0..2 * ng).map(|i| if i < ng { 1.0 - sol[(i, n)] } else { 1.0 + sol[(i - ng, n)] }).collect();
    let mut out = HPolyhedron::new(h, k)?;
    out.bounded_hint = Some(true);
    Ok(out)
}

/// LP-based removal of implied rows.
pub fn remove_redundant(p: &HPolyhedron) -> Result<HPolyhedron> {
    p.remove_redundant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_rows;
    use crate::sets::{is_empty, support_value};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_box() -> ConstrainedZonotope {
        ConstrainedZonotope::unit_box(2)
    }

    fn random_czono(rng: &mut ChaCha8Rng, n: usize, ng: usize, m: usize) -> ConstrainedZonotope {
        let g = Mat::from_fn(n, ng, |_, _| rng.gen_range(-1.0..1.0));
        let a = Mat::from_fn(m, ng, |_, _| rng.gen_range(-1.0..1.0));
        let xi0: Vec<f64> = (0..ng).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let b = linalg::mat_vec(a.as_ref(), &xi0);
        let c = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ConstrainedZonotope::new(g, c, a, b).unwrap()
    }

    fn dirs(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
        (0..k).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
    }

    fn same_support(a: &ConstrainedZonotope, b: &ConstrainedZonotope, tol: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for d in dirs(&mut rng, a.dim(), 30) {
            let (x, y) = (support_value(a, &d).unwrap(), support_value(b, &d).unwrap());
            assert!((x - y).abs() <= tol, "support {x} vs {y} along {d:?}");
        }
    }

    #[test]
    fn affine_examples() {
        let b = unit_box();
        assert_eq!(affine_map(&Mat::identity(2, 2), &b).unwrap(), b);
        let two = affine_map(&linalg::diag(&[2.0, 2.0]), &b).unwrap();
        assert!((support_value(&two, &[1.0, 0.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(affine_map(&Mat::identity(3, 3), &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn affine_support_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let c = random_czono(&mut rng, 3, 6, 2);
            let r = Mat::from_fn(2, 3, |_, _| rng.gen_range(-1.0..1.0));
            let rc = affine_map(&r, &c).unwrap();
            for d in dirs(&mut rng, 2, 5) {
                let lhs = support_value(&rc, &d).unwrap();
                let rhs = support_value(&c, &linalg::mat_t_vec(r.as_ref(), &d)).unwrap();
                assert!((lhs - rhs).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn minkowski_examples() {
        let b = unit_box();
        let t = minkowski_sum(&b, &ConstrainedZonotope::point(&[0.5, -1.0])).unwrap();
        assert!((support_value(&t, &[1.0, 1.0]).unwrap() - 1.5).abs() < 1e-12);
        let bb = minkowski_sum(&b, &b).unwrap();
        assert!((support_value(&bb, &[1.0, 0.0]).unwrap() - 2.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let c = random_czono(&mut rng, 2, 5, 2);
            let s = random_czono(&mut rng, 2, 4, 1);
            let sum = minkowski_sum(&c, &s).unwrap();
            assert_eq!(sum.n_con(), c.n_con() + s.n_con());
            assert_eq!(sum.n_gen(), c.n_gen() + s.n_gen());
            for d in dirs(&mut rng, 2, 10) {
                let lhs = support_value(&sum, &d).unwrap();
                let rhs = support_value(&c, &d).unwrap() + support_value(&s, &d).unwrap();
                assert!((lhs - rhs).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn inverse_affine_examples() {
        let b = unit_box();
        let same = intersect_inverse_affine(&b, &Mat::identity(2, 2), &b).unwrap();
        same_support(&same, &b, 1e-8);
        let w = ConstrainedZonotope::interval_box(&[0.0, 0.0], &[2.0, 2.0]).unwrap();
        let cut = intersect_inverse_affine(&b, &Mat::identity(2, 2), &w).unwrap();
        assert!(support_value(&cut, &[-1.0, 0.0]).unwrap().abs() < 1e-9);
        assert!((support_value(&cut, &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(cut.n_gen(), b.n_gen() + w.n_gen());
        assert_eq!(cut.n_con(), b.n_con() + w.n_con() + 2);
        let far = ConstrainedZonotope::interval_box(&[3.0, 3.0], &[4.0, 4.0]).unwrap();
        assert!(is_empty(&intersect_inverse_affine(&b, &Mat::identity(2, 2), &far).unwrap()).unwrap());
    }

    #[test]
    fn halfspace_examples() {
        let b = unit_box();
        let loose = intersect_halfspace(&b, &Halfspace::new(vec![1.0, 1.0], 5.0).unwrap()).unwrap();
        same_support(&loose, &b, 1e-9);
        let half = intersect_halfspace(&b, &Halfspace::new(vec![1.0, 0.0], 0.0).unwrap()).unwrap();
        assert!(support_value(&half, &[1.0, 0.0]).unwrap().abs() < 1e-9);
        assert!((support_value(&half, &[-1.0, 0.0]).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!((half.n_gen(), half.n_con()), (3, 1));
        let miss = intersect_halfspace(&b, &Halfspace::new(vec![1.0, 0.0], -1.5).unwrap()).unwrap();
        assert_eq!((miss.n_gen(), miss.n_con()), (3, 1));
        assert!(is_empty(&miss).unwrap());
        let touch = intersect_halfspace(&b, &Halfspace::new(vec![1.0, 0.0], -1.0).unwrap()).unwrap();
        assert!(!is_empty(&touch).unwrap());
    }

    #[test]
    fn min_row_examples() {
        let g = Mat::identity(2, 3);
        let a = from_rows(&[[0.0, 0.0, 1.0], [0.0, 0.0, 2.0]]);
        let c = ConstrainedZonotope::new(g, vec![0.0; 2], a, vec![0.5, 1.0]).unwrap();
        let r = min_row(&c).unwrap();
        assert_eq!(r.n_con(), 1);
        same_support(&r, &c, 1e-9);
        assert_eq!(min_row(&r).unwrap(), r);
        let flat = ConstrainedZonotope::new(Mat::identity(2, 2), vec![0.0; 2], from_rows(&[[1.0, 0.0]]), vec![0.0])
            .unwrap();
        assert!(matches!(min_row(&flat), Err(Error::NotFullDimensional(_))));
    }

    #[test]
    fn invertible_examples() {
        let bx = HPolyhedron::from_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let inv = invertible_from_hpoly(&bx).unwrap();
        assert!(is_invertible_rep(&inv));
        assert_eq!(inv.complexity().dof_order(), 1.0);
        same_support(&inv, &unit_box(), 1e-9);
        let back = hpoly_from_invertible(&inv).unwrap();
        assert_eq!(back.n_rows(), 2 * inv.n_gen());
        assert_eq!(back.remove_redundant().unwrap().n_rows(), 4);

        let tri = HPolyhedron::new(from_rows(&[[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]]), vec![0.0, 0.0, 1.0]).unwrap();
        let inv = invertible_from_hpoly(&tri).unwrap();
        assert!(is_invertible_rep(&inv));
        for (d, want) in [([1.0, 0.0], 1.0), ([-1.0, -1.0], 0.0), ([1.0, 2.0], 2.0)] {
            assert!((support_value(&inv, &d).unwrap() - want).abs() < 1e-9);
        }

        let half = HPolyhedron::new(from_rows(&[[1.0, 0.0]]), vec![0.0]).unwrap();
        assert!(matches!(invertible_from_hpoly(&half), Err(Error::Unbounded(_))));
        let flat = HPolyhedron::from_box(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(matches!(invertible_from_hpoly(&flat), Err(Error::Degenerate(_))));
    }

    #[test]
    fn invertible_rep_flags() {
        assert!(is_invertible_rep(&unit_box()));
        let three = ConstrainedZonotope::zonotope(from_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]), vec![0.0; 2]).unwrap();
        assert!(!is_invertible_rep(&three));
        assert!(is_min_row(&three));
        assert!(matches!(hpoly_from_invertible(&three), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn bounds_of_czono() {
        let c = ConstrainedZonotope::interval_box(&[-1.0, 2.0], &[3.0, 5.0]).unwrap();
        let (l, u) = czono_bounds(&c).unwrap().unwrap();
        assert!((l[0] + 1.0).abs() < 1e-12 && (u[1] - 5.0).abs() < 1e-12);
        assert!(czono_bounds(&ConstrainedZonotope::empty(2)).unwrap().is_none());
    }

    proptest::proptest! {
        #[test]
        fn closed_form_ops_preserve_emptiness(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_czono(&mut rng, 2, 4, 1);
            let e = ConstrainedZonotope::empty(2);
            let r = Mat::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0));
            proptest::prop_assert!(is_empty(&affine_map(&r, &e).unwrap()).unwrap());
            proptest::prop_assert!(is_empty(&minkowski_sum(&c, &e).unwrap()).unwrap());
            proptest::prop_assert!(!is_empty(&minkowski_sum(&c, &c).unwrap()).unwrap());
            proptest::prop_assert!(is_empty(&intersect_inverse_affine(&c, &Mat::identity(2, 2), &e).unwrap()).unwrap());
            let cr = min_row(&c).unwrap();
            proptest::prop_assert!(!is_empty(&cr).unwrap());
        }

        #[test]
        fn complexity_bookkeeping(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..4);
            let (ng, m) = (rng.gen_range(n..7), rng.gen_range(0..3));
            let c = random_czono(&mut rng, n, ng, m);
            let (ng, m) = (rng.gen_range(2..5), rng.gen_range(0..2));
            let w = random_czono(&mut rng, 2, ng, m);
            let r = Mat::from_fn(2, n, |_, _| rng.gen_range(-1.0..1.0));
            let x = intersect_inverse_affine(&c, &r, &w).unwrap();
            proptest::prop_assert_eq!(x.n_gen(), c.n_gen() + w.n_gen());
            proptest::prop_assert_eq!(x.n_con(), c.n_con() + w.n_con() + 2);
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let h = intersect_halfspace(&c, &Halfspace::new(p, rng.gen_range(-2.0..2.0)).unwrap()).unwrap();
            proptest::prop_assert_eq!((h.n_gen(), h.n_con()), (c.n_gen() + 1, c.n_con() + 1));
        }
    }
}
