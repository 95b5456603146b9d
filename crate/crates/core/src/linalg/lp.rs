//! Dense bounded-variable primal simplex.
//!
//! Rows are `eq_lhs x = eq_rhs` and `ineq_lhs x ≤ ineq_rhs`; every variable
//! has a box `[lower, upper]` whose ends may be infinite. Inequalities get a
//! nonnegative slack, each row gets an artificial column, and phase 1
//! minimizes the artificial sum. Pricing is Dantzig's rule with a switch to
//! Bland's rule after a run of degenerate pivots.

use super::Matrix;
use crate::error::{dim_err, Error, Result};
use faer::linalg::solvers::Solve;
use faer::Mat;

#[derive(Clone, Debug)]
pub struct LpProblem {
    /// Maximized.
    pub objective: Vec<f64>,
    pub eq_lhs: Matrix,
    pub eq_rhs: Vec<f64>,
    pub ineq_lhs: Matrix,
    pub ineq_rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

impl LpProblem {
    /// Problem in `n` free variables with no constraints.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            objective,
            eq_lhs: Mat::zeros(0, n),
            eq_rhs: Vec::new(),
            ineq_lhs: Mat::zeros(0, n),
            ineq_rhs: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn with_eq(mut self, a: Matrix, b: Vec<f64>) -> Self {
        self.eq_lhs = a;
        self.eq_rhs = b;
        self
    }

    pub fn with_ineq(mut self, a: Matrix, b: Vec<f64>) -> Self {
        self.ineq_lhs = a;
        self.ineq_rhs = b;
        self
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    fn check(&self) -> Result<()> {
        let n = self.objective.len();
        let ok = self.eq_lhs.ncols() == n
            && self.ineq_lhs.ncols() == n
            && self.eq_lhs.nrows() == self.eq_rhs.len()
            && self.ineq_lhs.nrows() == self.ineq_rhs.len()
            && self.lower.len() == n
            && self.upper.len() == n;
        if !ok {
            return dim_err("lp_solve: inconsistent problem dimensions");
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] || self.lower[j] == f64::INFINITY || self.upper[j] == f64::NEG_INFINITY {
                return Err(Error::InvalidInput(format!("lp_solve: empty bound interval on variable {j}")));
            }
        }
        Ok(())
    }
}

const OPT_TOL: f64 = 1e-10;
const PIV_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 30;
const REFACTOR_EVERY: usize = 100;

pub fn lp_solve(p: &LpProblem) -> Result<LpOutcome> {
    p.check()?;
    let mut s = Simplex::new(p);
    s.run()
}

struct Simplex {
    m: usize,
    n: usize,
    ncols: usize,
    /// Original constraint matrix `[A | slack | artificial]`, row-major.
    k: Vec<f64>,
    rhs: Vec<f64>,
    /// `B⁻¹ K`, row-major.
    t: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    cost: Vec<f64>,
    obj: Vec<f64>,
    pivots: usize,
    scale: f64,
}

impl Simplex {
    fn new(p: &LpProblem) -> Self {
        let n = p.objective.len();
        let me = p.eq_lhs.nrows();
        let mi = p.ineq_lhs.nrows();
        let m = me + mi;
        let ncols = n + mi + m;
        let mut lo = Vec::with_capacity(ncols);
        let mut hi = Vec::with_capacity(ncols);
        lo.extend_from_slice(&p.lower);
        hi.extend_from_slice(&p.upper);
        lo.extend(std::iter::repeat_n(0.0, mi + m));
        hi.extend(std::iter::repeat_n(f64::INFINITY, mi + m));

        let mut x = vec![0.0; ncols];
        for j in 0..n {
            x[j] = if lo[j].is_finite() {
                lo[j]
            } else if hi[j].is_finite() {
                hi[j]
            } else {
                0.0
            };
        }

        let mut k = vec![0.0; m * ncols];
        let mut rhs = vec![0.0; m];
        for i in 0..m {
            let row = &mut k[i * ncols..(i + 1) * ncols];
            if i < me {
                for j in 0..n {
                    row[j] = p.eq_lhs[(i, j)];
                }
                rhs[i] = p.eq_rhs[i];
            } else {
                let r = i - me;
                for j in 0..n {
                    row[j] = p.ineq_lhs[(r, j)];
                }
                row[n + r] = 1.0;
                rhs[i] = p.ineq_rhs[r];
            }
        }
        let mut scale = 1.0f64;
        for v in rhs.iter() {
            scale = scale.max(v.abs());
        }
        for j in 0..n {
            for b in [lo[j], hi[j]] {
                if b.is_finite() {
                    scale = scale.max(b.abs());
                }
            }
        }
        // Artificial columns carry the sign of the initial residual so that
        // they start at a nonnegative value.
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            let row = &k[i * ncols..(i + 1) * ncols];
            let ax: f64 = (0..n).map(|j| row[j] * x[j]).sum();
            let r = rhs[i] - ax;
            let sign = if r >= 0.0 { 1.0 } else { -1.0 };
            k[i * ncols + n + mi + i] = sign;
            basis.push(n + mi + i);
            x[n + mi + i] = r.abs();
        }
        let mut is_basic = vec![false; ncols];
        for &b in &basis {
            is_basic[b] = true;
        }
        let mut t = k.clone();
        for i in 0..m {
            let sign = k[i * ncols + n + mi + i];
            if sign < 0.0 {
                for v in &mut t[i * ncols..(i + 1) * ncols] {
                    *v = -*v;
                }
            }
        }
        let mut cost = vec![0.0; ncols];
        for c in cost.iter_mut().skip(n + mi) {
            *c = -1.0;
        }
        Simplex { m, n, ncols, k, rhs, t, lo, hi, x, basis, is_basic, cost, obj: p.objective.clone(), pivots: 0, scale }
    }

    fn art_start(&self) -> usize {
        self.ncols - self.m
    }

    fn run(&mut self) -> Result<LpOutcome> {
        if self.m > 0 {
            match self.iterate()? {
                Step::Optimal => {}
                Step::Unbounded => {
                    return Err(Error::NumericalFailure("phase 1 reported unbounded".into()));
                }
            }
            let infeas: f64 = (self.art_start()..self.ncols).map(|j| self.x[j].abs()).sum();
            if infeas > FEAS_TOL * self.scale * (1.0 + self.m as f64).sqrt() {
                return Ok(LpOutcome::Infeasible);
            }
            let a0 = self.art_start();
            for j in a0..self.ncols {
                self.lo[j] = 0.0;
                self.hi[j] = 0.0;
                if !self.is_basic[j] {
                    self.x[j] = 0.0;
                }
            }
            self.drive_out_artificials();
            self.refactor()?;
        }
        for j in 0..self.ncols {
            self.cost[j] = 0.0;
        }
        Ok(match self.iterate_with_objective()? {
            Step::Unbounded => LpOutcome::Unbounded,
            Step::Optimal => {
                self.polish()?;
                let xs = self.x[..self.n].to_vec();
                let value = (0..self.n).map(|j| self.cost[j] * xs[j]).sum();
                LpOutcome::Optimal { value, x: xs }
            }
        })
    }

    fn iterate_with_objective(&mut self) -> Result<Step> {
        for j in 0..self.n {
            self.cost[j] = self.obj[j];
        }
        self.iterate()
    }

    fn reduced_costs(&self) -> Vec<f64> {
        let mut d = self.cost.clone();
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
            for (dj, tij) in d.iter_mut().zip(row) {
                *dj -= cb * tij;
            }
        }
        d
    }

    fn iterate(&mut self) -> Result<Step> {
        let max_iter = 50 * (self.m + self.ncols) + 1000;
        let mut degenerate_run = 0usize;
        for _ in 0..max_iter {
            let bland = degenerate_run >= DEGENERATE_RUN;
            let d = self.reduced_costs();
            let mut enter: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..self.ncols {
                if self.is_basic[j] || self.lo[j] == self.hi[j] {
                    continue;
                }
                let dir = if d[j] > OPT_TOL && self.x[j] < self.hi[j] {
                    1.0
                } else if d[j] < -OPT_TOL && self.x[j] > self.lo[j] {
                    -1.0
                } else {
                    continue;
                };
                if bland {
                    enter = Some((j, dir));
                    break;
                }
                if d[j].abs() > best {
                    best = d[j].abs();
                    enter = Some((j, dir));
                }
            }
            let Some((j, dir)) = enter else {
                return Ok(Step::Optimal);
            };

            // ratio test
            let mut step = f64::INFINITY;
            let mut leave: Option<usize> = None;
            let mut leave_alpha = 0.0f64;
            if self.lo[j].is_finite() && self.hi[j].is_finite() {
                step = self.hi[j] - self.lo[j];
            }
            for i in 0..self.m {
                let alpha = dir * self.t[i * self.ncols + j];
                let b = self.basis[i];
                let lim = if alpha > PIV_TOL {
                    if !self.lo[b].is_finite() {
                        continue;
                    }
                    ((self.x[b] - self.lo[b]) / alpha).max(0.0)
                } else if alpha < -PIV_TOL {
                    if !self.hi[b].is_finite() {
                        continue;
                    }
                    ((self.hi[b] - self.x[b]) / -alpha).max(0.0)
                } else {
                    continue;
                };
                let better = match leave {
                    None => lim < step,
                    Some(l) => {
                        if bland {
                            lim < step - 1e-12 || (lim <= step + 1e-12 && b < self.basis[l])
                        } else {
                            lim < step - 1e-12 || (lim <= step + 1e-12 && alpha.abs() > leave_alpha)
                        }
                    }
                };
                if better {
                    step = lim;
                    leave = Some(i);
                    leave_alpha = alpha.abs();
                }
            }
            if !step.is_finite() {
                return Ok(Step::Unbounded);
            }
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            // move
            self.x[j] += dir * step;
            for i in 0..self.m {
                let tij = self.t[i * self.ncols + j];
                if tij != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= dir * step * tij;
                }
            }
            match leave {
                None => {
                    // bound flip of the entering variable
                    self.x[j] = if dir > 0.0 { self.hi[j] } else { self.lo[j] };
                }
                Some(r) => {
                    let b = self.basis[r];
                    let alpha = dir * self.t[r * self.ncols + j];
                    self.x[b] = if alpha > 0.0 { self.lo[b] } else { self.hi[b] };
                    self.pivot(r, j);
                    if self.pivots.is_multiple_of(REFACTOR_EVERY) {
                        self.refactor()?;
                    }
                }
            }
        }
        Err(Error::NumericalFailure("simplex iteration limit reached".into()))
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let nc = self.ncols;
        let piv = self.t[r * nc + j];
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for v in row.iter_mut() {
                *v /= piv;
            }
        }
        let prow: Vec<f64> = self.t[r * nc..(r + 1) * nc].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * nc + j];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * nc..(i + 1) * nc];
            for (v, p) in row.iter_mut().zip(&prow) {
                *v -= f * p;
            }
            row[j] = 0.0;
        }
        let old = self.basis[r];
        self.is_basic[old] = false;
        self.is_basic[j] = true;
        self.basis[r] = j;
        self.pivots += 1;
    }

    /// Pivot zero-level artificials out of the basis where a structural or
    /// slack column allows it; rows where none does are redundant.
    fn drive_out_artificials(&mut self) {
        let a0 = self.art_start();
        for r in 0..self.m {
            if self.basis[r] < a0 {
                continue;
            }
            let row = &self.t[r * self.ncols..r * self.ncols + a0];
            let mut best = None;
            let mut bv = 1e-7;
            for (j, v) in row.iter().enumerate() {
                if !self.is_basic[j] && v.abs() > bv {
                    bv = v.abs();
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                // degenerate pivot: the artificial sits at zero
                self.x[self.basis[r]] = 0.0;
                self.pivot(r, j);
            }
        }
    }

    /// Recompute `B⁻¹ K` and the basic values from the original data.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        if m == 0 {
            return Ok(());
        }
        let nc = self.ncols;
        let bmat = Mat::from_fn(m, m, |i, c| self.k[i * nc + self.basis[c]]);
        let lu = bmat.partial_piv_lu();
        let kmat = Mat::from_fn(m, nc, |i, j| self.k[i * nc + j]);
        let t = lu.solve(&kmat);
        if !super::all_finite(t.as_ref()) {
            return Err(Error::NumericalFailure("singular simplex basis".into()));
        }
        for i in 0..m {
            for jj in 0..nc {
                self.t[i * nc + jj] = t[(i, jj)];
            }
        }
        self.recompute_basic_values(&lu);
        Ok(())
    }

    fn recompute_basic_values(&mut self, lu: &faer::linalg::solvers::PartialPivLu<f64>) {
        let m = self.m;
        let nc = self.ncols;
        let mut r = Mat::from_fn(m, 1, |i, _| self.rhs[i]);
        for j in 0..nc {
            if self.is_basic[j] || self.x[j] == 0.0 {
                continue;
            }
            for i in 0..m {
                r[(i, 0)] -= self.k[i * nc + j] * self.x[j];
            }
        }
        let xb = lu.solve(&r);
        for i in 0..m {
            self.x[self.basis[i]] = xb[(i, 0)];
        }
    }

    fn polish(&mut self) -> Result<()> {
        if self.m == 0 {
            return Ok(());
        }
        let m = self.m;
        let nc = self.ncols;
        let bmat = Mat::from_fn(m, m, |i, c| self.k[i * nc + self.basis[c]]);
        let lu = bmat.partial_piv_lu();
        self.recompute_basic_values(&lu);
        for j in 0..nc {
            if self.x[j] < self.lo[j] {
                if self.x[j] < self.lo[j] - 1e-6 * self.scale {
                    return Err(Error::NumericalFailure("basic variable violates its bound".into()));
                }
                self.x[j] = self.lo[j];
            }
            if self.x[j] > self.hi[j] {
                if self.x[j] > self.hi[j] + 1e-6 * self.scale {
                    return Err(Error::NumericalFailure("basic variable violates its bound".into()));
                }
                self.x[j] = self.hi[j];
            }
        }
        Ok(())
    }
}

enum Step {
    Optimal,
    Unbounded,
}
