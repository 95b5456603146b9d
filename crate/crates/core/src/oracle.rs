//! Exact planar polygon algebra used as a reference for the approximations,
//! plus area and volume estimates.

use crate::czops::{self, czono_bounds};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rcset::{RcScenario, StateConstraint, Variant};
use crate::sets::{membership_czono, support_czono, ConstrainedZonotope, HPolyhedron, SymmetricSet};

/// Geometric tolerance for feasibility decisions.
pub const GEOM_TOL: f64 = 1e-9;
/// Vertices closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-8;

pub type Point = [f64; 2];

/// Convex polygon with counter-clockwise vertices. Segments and points
/// (fewer than three vertices) are allowed as degenerate polygons.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

impl ConvexPolygon {
    /// Convex hull (monotone chain) of arbitrary points.
    pub fn hull(points: &[Point]) -> Self {
        let mut pts: Vec<Point> = points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        // near-duplicates need not be adjacent after sorting
        let mut kept: Vec<Point> = Vec::with_capacity(pts.len());
        for p in pts {
            let dup = kept.iter().rev().take_while(|q| p[0] - q[0] <= DEDUP_TOL).any(|q| dist(p, *q) <= DEDUP_TOL);
            if !dup {
                kept.push(p);
            }
        }
        let pts = kept;
        if pts.len() <= 2 {
            return ConvexPolygon { vertices: pts };
        }
        let scale = pts.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
        let eps = 1e-12 * scale * scale;
        let mut lower: Vec<Point> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        ConvexPolygon { vertices: lower }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..v.len() {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            s += a[0] * b[1] - a[1] * b[0];
        }
        s / 2.0
    }

    pub fn support(&self, nu: Point) -> f64 {
        self.vertices.iter().map(|v| nu[0] * v[0] + nu[1] * v[1]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Edge halfplanes `hᵀx ≤ k` with unit outward normals. Needs three or
    /// more vertices.
    pub fn halfplanes(&self) -> Vec<(Point, f64)> {
        let v = &self.vertices;
        let mut out = Vec::with_capacity(v.len());
        for i in 0..v.len() {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let l = (dx * dx + dy * dy).sqrt();
            if l == 0.0 {
                continue;
            }
            let h = [dy / l, -dx / l];
            out.push((h, h[0] * a[0] + h[1] * a[1]));
        }
        out
    }

    pub fn to_hpoly(&self) -> Result<HPolyhedron> {
        if self.vertices.len() < 3 {
            return Err(Error::Degenerate("polygon has no interior".into()));
        }
        let hp = self.halfplanes();
        let h = Matrix::from_fn(hp.len(), 2, |i, j| hp[i].0[j]);
        HPolyhedron::new(h, hp.iter().map(|e| e.1).collect())
    }

    pub fn contains(&self, x: Point, tol: f64) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => dist(self.vertices[0], x) <= tol,
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                let l = dist(a, b);
                let t = ((x[0] - a[0]) * (b[0] - a[0]) + (x[1] - a[1]) * (b[1] - a[1])) / (l * l);
                let t = t.clamp(0.0, 1.0);
                dist([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], x) <= tol
            }
            _ => self.halfplanes().iter().all(|(h, k)| h[0] * x[0] + h[1] * x[1] <= k + tol),
        }
    }

    pub fn translate(&self, t: Point) -> Self {
        ConvexPolygon { vertices: self.vertices.iter().map(|v| [v[0] + t[0], v[1] + t[1]]).collect() }
    }

    /// Symmetric Hausdorff distance, exact for convex polygons up to sampling
    /// of the support function in `k` directions.
    pub fn support_distance(&self, other: &ConvexPolygon, k: usize) -> f64 {
        crate::sets::unit_directions(k)
            .into_iter()
            .map(|d| (self.support(d) - other.support(d)).abs())
            .fold(0.0, f64::max)
    }
}

/// Line `hᵀx = k` intersection of two lines.
fn meet(a: (Point, f64), b: (Point, f64)) -> Option<Point> {
    let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
    if det.abs() < 1e-14 {
        return None;
    }
    Some([(a.1 * b.0[1] - b.1 * a.0[1]) / det, (a.0[0] * b.1 - b.0[0] * a.1) / det])
}

/// Halfplane intersection by successive clipping of a large box. The region is
/// stored as a cycle of edge lines and each vertex is recomputed from its two
/// lines, so the size of the starting box never leaks into the result.
struct Clipper {
    lines: Vec<(Point, f64)>,
    edges: Vec<usize>,
}

impl Clipper {
    fn new(radius: f64) -> Self {
        let lines = vec![([1.0, 0.0], radius), ([0.0, 1.0], radius), ([-1.0, 0.0], radius), ([0.0, -1.0], radius)];
        Clipper { lines, edges: vec![0, 1, 2, 3] }
    }

    fn vertex(&self, i: usize) -> Point {
        let m = self.edges.len();
        meet(self.lines[self.edges[i]], self.lines[self.edges[(i + 1) % m]]).unwrap_or([f64::NAN, f64::NAN])
    }

    /// `false` when the region became empty.
    fn clip(&mut self, h: Point, k: f64) -> bool {
        let nrm = (h[0] * h[0] + h[1] * h[1]).sqrt();
        if nrm == 0.0 {
            return k >= -GEOM_TOL;
        }
        let (h, k) = ([h[0] / nrm, h[1] / nrm], k / nrm);
        let m = self.edges.len();
        let tol = GEOM_TOL * k.abs().max(1.0);
        let out: Vec<bool> = (0..m)
            .map(|i| {
                let v = self.vertex(i);
                h[0] * v[0] + h[1] * v[1] - k > tol
            })
            .collect();
        let n_out = out.iter().filter(|o| **o).count();
        if n_out == 0 {
            return true;
        }
        if n_out == m {
            return false;
        }
        // outside vertices form one cyclic run i..=j
        let i = (0..m).find(|&i| out[i] && !out[(i + m - 1) % m]).unwrap();
        let j = (0..m).map(|s| (i + s) % m).take_while(|&v| out[v]).last().unwrap();
        let li = self.lines.len();
        self.lines.push((h, k));
        // vertex v sits between edges v and v+1; drop edges i+1 ..= j
        let mut edges = Vec::with_capacity(m + 1);
        let mut v = (j + 1) % m;
        loop {
            edges.push(self.edges[v]);
            if v == i {
                break;
            }
            v = (v + 1) % m;
        }
        edges.push(li);
        self.edges = edges;
        true
    }

    fn touches_box(&self) -> bool {
        self.edges.iter().any(|&e| e < 4)
    }

    fn polygon(&self) -> ConvexPolygon {
        let pts: Vec<Point> = (0..self.edges.len()).map(|i| self.vertex(i)).collect();
        ConvexPolygon::hull(&pts)
    }
}

fn clip_box_radius(planes: &[(Point, f64)]) -> f64 {
    let m = planes.iter().fold(1.0f64, |m, (h, k)| {
        let n = (h[0] * h[0] + h[1] * h[1]).sqrt();
        if n > 0.0 { m.max(k.abs() / n) } else { m }
    });
    1e6 * m
}

/// Intersection of halfplanes; `Ok(None)` when empty, `Unbounded` when the
/// region is not bounded.
pub fn polygon_from_halfplanes(planes: &[(Point, f64)]) -> Result<Option<ConvexPolygon>> {
    let mut c = Clipper::new(clip_box_radius(planes));
    for &(h, k) in planes {
        if !c.clip(h, k) {
            return Ok(None);
        }
    }
    if c.touches_box() {
        return Err(Error::Unbounded("halfplane intersection is unbounded".into()));
    }
    Ok(Some(c.polygon()))
}

fn planes_of(p: &HPolyhedron) -> Vec<(Point, f64)> {
    (0..p.n_rows()).map(|i| ([p.h[(i, 0)], p.h[(i, 1)]], p.k[i])).collect()
}

fn need_planar(n: usize) -> Result<()> {
    if n != 2 {
        return Err(Error::DimensionMismatch(format!("planar oracle needs R^2, got R^{n}")));
    }
    Ok(())
}

/// Vertex enumeration of a bounded, full-dimensional planar polyhedron.
pub fn polygon_from_hpoly(p: &HPolyhedron) -> Result<ConvexPolygon> {
    need_planar(p.dim())?;
    let poly = polygon_from_halfplanes(&planes_of(p))?.ok_or_else(|| Error::Degenerate("polyhedron is empty".into()))?;
    if poly.len() < 3 || poly.area() <= GEOM_TOL {
        return Err(Error::Degenerate("polyhedron has no interior".into()));
    }
    Ok(poly)
}

/// Edge-merge Minkowski sum; degenerate inputs fall back to the hull of
/// pairwise vertex sums.
pub fn poly2d_minkowski_sum(p: &ConvexPolygon, q: &ConvexPolygon) -> ConvexPolygon {
    if p.is_empty() || q.is_empty() {
        return ConvexPolygon { vertices: Vec::new() };
    }
    if p.len() < 3 || q.len() < 3 {
        let mut pts = Vec::with_capacity(p.len() * q.len());
        for a in p.vertices() {
            for b in q.vertices() {
                pts.push([a[0] + b[0], a[1] + b[1]]);
            }
        }
        return ConvexPolygon::hull(&pts);
    }
    let start = |v: &[Point]| {
        (0..v.len())
            .min_by(|&i, &j| v[i][1].total_cmp(&v[j][1]).then(v[i][0].total_cmp(&v[j][0])))
            .unwrap()
    };
    let (a, b) = (p.vertices(), q.vertices());
    let (ia, ib) = (start(a), start(b));
    let (na, nb) = (a.len(), b.len());
    let mut out = Vec::with_capacity(na + nb);
    let (mut i, mut j) = (0, 0);
    while i < na || j < nb {
        let pa = a[(ia + i) % na];
        let pb = b[(ib + j) % nb];
        out.push([pa[0] + pb[0], pa[1] + pb[1]]);
        let ea = {
            let n = a[(ia + i + 1) % na];
            [n[0] - pa[0], n[1] - pa[1]]
        };
        let eb = {
            let n = b[(ib + j + 1) % nb];
            [n[0] - pb[0], n[1] - pb[1]]
        };
        let c = ea[0] * eb[1] - ea[1] * eb[0];
        if j >= nb || (i < na && c > 0.0) {
            i += 1;
        } else if i >= na || c < 0.0 {
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    ConvexPolygon::hull(&out)
}

/// `P ⊖ S` through the edge H-Rep of `P`; `None` when empty.
pub fn poly2d_pdiff(p: &ConvexPolygon, s: &SymmetricSet) -> Result<Option<ConvexPolygon>> {
    need_planar(s.dim())?;
    if p.len() < 3 {
        return Err(Error::Degenerate("minuend polygon has no interior".into()));
    }
    let mut planes = p.halfplanes();
    for (h, k) in planes.iter_mut() {
        *k -= s.support(h)?;
    }
    polygon_from_halfplanes(&planes)
}

/// `P ∩ Q`; `None` when empty.
pub fn poly2d_intersect(p: &ConvexPolygon, q: &ConvexPolygon) -> Result<Option<ConvexPolygon>> {
    if p.len() < 3 || q.len() < 3 {
        return Err(Error::Degenerate("intersection operands need interiors".into()));
    }
    let mut planes = p.halfplanes();
    planes.extend(q.halfplanes());
    polygon_from_halfplanes(&planes)
}

/// `R P` for invertible `R`.
pub fn poly2d_affine(r: &Matrix, p: &ConvexPolygon) -> Result<ConvexPolygon> {
    if r.nrows() != 2 || r.ncols() != 2 {
        return Err(Error::DimensionMismatch("planar affine map must be 2x2".into()));
    }
    let det = r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)];
    if det.abs() < 1e-12 * linalg::max_abs(r.as_ref()).powi(2).max(1e-300) {
        return Err(Error::Degenerate("affine map is singular".into()));
    }
    let pts: Vec<Point> = p
        .vertices()
        .iter()
        .map(|v| [r[(0, 0)] * v[0] + r[(0, 1)] * v[1], r[(1, 0)] * v[0] + r[(1, 1)] * v[1]])
        .collect();
    Ok(ConvexPolygon::hull(&pts))
}

/// `{x ∈ P : R x ∈ Q}` for any `2×2` map.
pub fn poly2d_intersect_preimage(p: &ConvexPolygon, r: &Matrix, q: &ConvexPolygon) -> Result<Option<ConvexPolygon>> {
    if q.len() < 3 || p.len() < 3 {
        return Err(Error::Degenerate("preimage operands need interiors".into()));
    }
    let mut planes = p.halfplanes();
    planes.extend(preimage_planes(r, q));
    polygon_from_halfplanes(&planes)
}

fn preimage_planes(r: &Matrix, q: &ConvexPolygon) -> Vec<(Point, f64)> {
    q.halfplanes()
        .into_iter()
        .map(|(h, k)| ([h[0] * r[(0, 0)] + h[1] * r[(1, 0)], h[0] * r[(0, 1)] + h[1] * r[(1, 1)]], k))
        .collect()
}

/// Zonogon `G B∞ + c` by sorting generator directions.
pub fn zonogon(g: &Matrix, c: &[f64]) -> ConvexPolygon {
    let mut gens: Vec<Point> = (0..g.ncols())
        .map(|j| [g[(0, j)], g[(1, j)]])
        .filter(|v| v[0] != 0.0 || v[1] != 0.0)
        .map(|v| if v[1] < 0.0 || (v[1] == 0.0 && v[0] < 0.0) { [-v[0], -v[1]] } else { v })
        .collect();
    gens.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    let mut p = [c[0], c[1]];
    for v in &gens {
        p[0] -= v[0];
        p[1] -= v[1];
    }
    let mut pts = Vec::with_capacity(2 * gens.len() + 1);
    pts.push(p);
    for sign in [2.0, -2.0] {
        for v in &gens {
            p = [p[0] + sign * v[0], p[1] + sign * v[1]];
            pts.push(p);
        }
    }
    ConvexPolygon::hull(&pts)
}

/// Exact polygon of a planar constrained zonotope: zonogon, H-Rep of an
/// Invertible representation, or vertex enumeration for few generators.
pub fn polygon_of_czono(c: &ConstrainedZonotope) -> Result<ConvexPolygon> {
    need_planar(c.dim())?;
    if c.n_con() == 0 {
        return Ok(zonogon(c.g(), c.c()));
    }
    if czops::is_invertible_rep(c) {
        return polygon_from_hpoly(&czops::hpoly_from_invertible(c)?);
    }
    if c.n_gen() <= ENUMERATION_MAX_GEN {
        return polygon_by_vertex_enumeration(c)?.ok_or_else(|| Error::Degenerate("set is empty".into()));
    }
    Err(Error::InvalidInput("exact polygon needs a zonotope, an Invertible representation or few generators".into()))
}

/// Largest generator count accepted by [`polygon_by_vertex_enumeration`].
pub const ENUMERATION_MAX_GEN: usize = 16;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Exact polygon of any planar constrained zonotope with few generators.
/// Each vertex of `{‖ξ‖∞ ≤ 1, A ξ = b}` pins all but `rank A` coordinates to
/// `±1`, so trying every free set and sign pattern finds them all; the image
/// hull is the polygon. `None` when the set is empty.
pub fn polygon_by_vertex_enumeration(c: &ConstrainedZonotope) -> Result<Option<ConvexPolygon>> {
    need_planar(c.dim())?;
    let ng = c.n_gen();
    if ng > ENUMERATION_MAX_GEN {
        return Err(Error::InvalidInput(format!("vertex enumeration is limited to {ENUMERATION_MAX_GEN} generators, got {ng}")));
    }
    let a_full = c.a_dense();
    let rows = linalg::independent_row_subset(a_full.as_ref());
    let a = Matrix::from_fn(rows.len(), ng, |i, j| a_full[(rows[i], j)]);
    let b: Vec<f64> = rows.iter().map(|&i| c.b()[i]).collect();
    let m = a.nrows();
    let tol = 1e-9;
    let mut pts = Vec::new();
    for free in combinations(ng, m) {
        let fixed: Vec<usize> = (0..ng).filter(|j| !free.contains(j)).collect();
        let a_f = Matrix::from_fn(m, m, |i, j| a[(i, free[j])]);
        let patterns = 1usize << fixed.len();
        let signs = |p: usize, k: usize| if p >> k & 1 == 1 { 1.0 } else { -1.0 };
        let rhs = Matrix::from_fn(m, patterns, |i, p| {
            b[i] - fixed.iter().enumerate().map(|(k, &j)| a[(i, j)] * signs(p, k)).sum::<f64>()
        });
        let sol = if m == 0 {
            Matrix::zeros(0, patterns)
        } else {
            match linalg::solve_square(a_f.as_ref(), rhs.as_ref(), 1e10) {
                Ok(s) => s,
                Err(_) => continue,
            }
        };
        for p in 0..patterns {
            if (0..m).any(|i| sol[(i, p)].abs() > 1.0 + tol) {
                continue;
            }
            let mut xi = vec![0.0; ng];
            for (k, &j) in fixed.iter().enumerate() {
                xi[j] = signs(p, k);
            }
            for (i, &j) in free.iter().enumerate() {
                xi[j] = sol[(i, p)].clamp(-1.0, 1.0);
            }
            let resid = linalg::mat_vec(a_full.as_ref(), &xi).iter().zip(c.b()).map(|(r, b)| (r - b).abs()).fold(0.0, f64::max);
            if resid > 1e-7 * (1.0 + linalg::norm_inf(c.b())) {
                continue;
            }
            let x = linalg::mat_vec(c.g().as_ref(), &xi);
            pts.push([x[0] + c.c()[0], x[1] + c.c()[1]]);
        }
    }
    if pts.is_empty() {
        return Ok(None);
    }
    Ok(Some(ConvexPolygon::hull(&pts)))
}

/// Halfplanes of a state constraint; an H-Rep may be unbounded.
fn constraint_planes(x: &StateConstraint) -> Result<Vec<(Point, f64)>> {
    match x {
        StateConstraint::HPoly(p) => {
            need_planar(p.dim())?;
            Ok(planes_of(p))
        }
        StateConstraint::CZono(c) => Ok(polygon_of_czono(c)?.halfplanes()),
    }
}

/// Exact recursion on polygons, `K_T, …, K_0`; `None` once a set is empty.
pub fn exact_rc_2d(sc: &RcScenario) -> Result<Vec<Option<ConvexPolygon>>> {
    need_planar(sc.dim())?;
    let mut out = Vec::with_capacity(sc.horizon() + 1);
    let mut k = Some(polygon_of_czono(&sc.goal)?);
    out.push(k.clone());
    for t in (0..sc.horizon()).rev() {
        let step = &sc.steps[t];
        k = match k {
            None => None,
            Some(kp) => {
                let fw = step.w.affine_image(&step.f)?;
                match poly2d_pdiff(&kp, &fw)? {
                    None => None,
                    Some(shrunk) => {
                        let neg_b = linalg::scaled(step.b.as_ref(), -1.0);
                        let bu = czops::affine_map(&neg_b, &step.u)?;
                        if bu.n_con() != 0 {
                            return Err(Error::InvalidInput("exact recursion needs a zonotopic input set".into()));
                        }
                        let grown = poly2d_minkowski_sum(&shrunk, &zonogon(bu.g(), bu.c()));
                        let mut planes = constraint_planes(&step.x)?;
                        match sc.variant {
                            Variant::InvertibleA => {
                                let a_inv = linalg::inverse(step.a.as_ref(), czops::MAX_INVERTIBLE_COND)?;
                                planes.extend(poly2d_affine(&a_inv, &grown)?.halfplanes());
                            }
                            Variant::PolytopicX => planes.extend(preimage_planes(&step.a, &grown)),
                        }
                        if grown.len() < 3 {
                            return Err(Error::Degenerate("exact recursion lost its interior".into()));
                        }
                        polygon_from_halfplanes(&planes)?
                    }
                }
            }
        };
        if let Some(p) = &k {
            if p.len() < 3 {
                k = None;
            }
        }
        out.push(k.clone());
    }
    Ok(out)
}

pub fn polygon_area(p: &ConvexPolygon) -> f64 {
    p.area()
}

/// Grid membership count over the interval hull of `C`: `resolution` cells
/// per axis, one LP per cell center.
pub fn volume_estimate(c: &ConstrainedZonotope, resolution: usize) -> Result<f64> {
    let Some((l, u)) = czono_bounds(c)? else { return Ok(0.0) };
    let n = c.dim();
    let widths: Vec<f64> = l.iter().zip(&u).map(|(l, u)| u - l).collect();
    let box_vol: f64 = widths.iter().product();
    if box_vol <= 0.0 || resolution == 0 {
        return Ok(0.0);
    }
    let total = resolution.pow(n as u32);
    let mut hits = 0usize;
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    for _ in 0..total {
        for d in 0..n {
            x[d] = l[d] + (idx[d] as f64 + 0.5) * widths[d] / resolution as f64;
        }
        if membership_czono(c, &x, 1e-9)? {
            hits += 1;
        }
        for d in 0..n {
            idx[d] += 1;
            if idx[d] < resolution {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(box_vol * hits as f64 / total as f64)
}

/// Inner (hull of support points) and outer (support halfplanes) polygons
/// of a planar constrained zonotope.
#[derive(Clone, Debug)]
pub struct SupportPolygon {
    pub inner: ConvexPolygon,
    pub outer: ConvexPolygon,
    pub directions: usize,
}

impl SupportPolygon {
    /// Area estimate: the inner area, within `area_gap` of the truth.
    pub fn area(&self) -> f64 {
        self.inner.area()
    }

    pub fn area_gap(&self) -> f64 {
        self.outer.area() - self.inner.area()
    }
}

/// Sample the support function in `base` equi-spaced directions, then
/// bisect any angular gap whose inner/outer sliver exceeds `rel_tol` of the
/// area. `None` when `C` is empty.
pub fn support_polygon(c: &ConstrainedZonotope, base: usize, rel_tol: f64) -> Result<Option<SupportPolygon>> {
    need_planar(c.dim())?;
    let base = base.max(4);
    let mut samples: Vec<(f64, Point, f64)> = Vec::new(); // (angle, point, value)
    for j in 0..base {
        let th = 2.0 * std::f64::consts::PI * j as f64 / base as f64;
        let d = [th.cos(), th.sin()];
        match support_czono(c, &d)? {
            Some(sp) => samples.push((th, [sp.point[0], sp.point[1]], sp.value)),
            None => return Ok(None),
        }
    }
    let mut rounds = 0;
    loop {
        let inner = ConvexPolygon::hull(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
        let area = inner.area().max(1e-300);
        let m = samples.len();
        let mut inserts = Vec::new();
        for i in 0..m {
            let (a, b) = (&samples[i], &samples[(i + 1) % m]);
            let mut gap = b.0 - a.0;
            if gap <= 0.0 {
                gap += 2.0 * std::f64::consts::PI;
            }
            if gap < 1e-7 {
                continue;
            }
            let ha = ([a.0.cos(), a.0.sin()], a.2);
            let hb = ([b.0.cos(), b.0.sin()], b.2);
            // sliver between the chord a.1 → b.1 and the two support lines
            let sliver = match meet(ha, hb) {
                Some(q) => cross(a.1, q, b.1).abs() / 2.0,
                None => f64::INFINITY,
            };
            if sliver > rel_tol * area {
                inserts.push(a.0 + gap / 2.0);
            }
        }
        if inserts.is_empty() || rounds >= 12 {
            break;
        }
        for th in inserts {
            let d = [th.cos(), th.sin()];
            let sp = support_czono(c, &d)?.ok_or_else(|| Error::NumericalFailure("support LP flipped to infeasible".into()))?;
            let th = th.rem_euclid(2.0 * std::f64::consts::PI);
            samples.push((th, [sp.point[0], sp.point[1]], sp.value));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        rounds += 1;
    }
    let inner = ConvexPolygon::hull(&samples.iter().map(|s| s.1).collect::<Vec<_>>());
    // consecutive support lines meet at the outer vertices; LP noise on
    // nearly parallel neighbours can throw the meet far off, so such corners
    // fall back to the support point
    let m = samples.len();
    let corners: Vec<Point> = (0..m)
        .map(|i| {
            let (a, b) = (&samples[i], &samples[(i + 1) % m]);
            let line = |s: &(f64, Point, f64)| ([s.0.cos(), s.0.sin()], s.2);
            let chord = dist(a.1, b.1);
            meet(line(a), line(b))
                .filter(|q| dist(*q, a.1) <= 2.0 * chord + 1e-12 && dist(*q, b.1) <= 2.0 * chord + 1e-12)
                .unwrap_or(a.1)
        })
        .collect();
    let mut all = corners;
    all.extend(samples.iter().map(|s| s.1));
    let outer = ConvexPolygon::hull(&all);
    Ok(Some(SupportPolygon { inner, outer, directions: samples.len() }))
}
