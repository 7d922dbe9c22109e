//! Inverse spectral pipeline: from families of joint spectra back to the
//! moment polytope.
//!
//! Stages: fit the affine lattice structure of each toric spectrum (which
//! also enforces the simplicity the spectra are supposed to have), take
//! convex hulls, extrapolate their support functions to the semiclassical
//! limit, snap the limit polygon to rational data with primitive integer
//! edge normals, and test the Delzant smoothness condition vertex by
//! vertex. The per-level lattice spacing estimated from the data doubles
//! as the extrapolation abscissa, so no normalization convention for the
//! spacing constant is ever assumed.

use std::collections::HashMap;

use crate::spectra::{
    convex_hull, hausdorff_hull, point_polygon_distance, spectrum_hull, ConvexPolygon, Hull,
    Interval, JointSpectrum,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Exact rationals
// ---------------------------------------------------------------------------

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Reduced fraction with positive denominator; exact arithmetic for the
/// rational polytope data. Arithmetic is by named methods (add, sub, mul,
/// div) rather than operator overloads; the handful of call sites does
/// not justify the trait plumbing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rational {
    num: i64,
    den: i64,
}

#[allow(clippy::should_implement_trait)]
impl Rational {
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let (num, den) = (num * sign, den * sign);
        let g = gcd_i64(num, den).max(1);
        Rational { num: num / g, den: den / g }
    }

    pub fn from_int(v: i64) -> Rational {
        Rational { num: v, den: 1 }
    }

    #[inline]
    pub fn num(&self) -> i64 {
        self.num
    }

    #[inline]
    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn add(self, other: Rational) -> Rational {
        Rational::new(self.num * other.den + other.num * self.den, self.den * other.den)
    }

    pub fn sub(self, other: Rational) -> Rational {
        Rational::new(self.num * other.den - other.num * self.den, self.den * other.den)
    }

    pub fn mul(self, other: Rational) -> Rational {
        Rational::new(self.num * other.num, self.den * other.den)
    }

    pub fn div(self, other: Rational) -> Rational {
        assert!(other.num != 0, "division by zero rational");
        Rational::new(self.num * other.den, self.den * other.num)
    }

    pub fn mul_int(self, v: i64) -> Rational {
        Rational::new(self.num * v, self.den)
    }
}

/// Nearest rational p/q to `x` with 1 <= q <= cap (exhaustive over q, so
/// genuinely the best bounded-denominator approximation).
pub fn best_rational(x: f64, cap: u64) -> Rational {
    assert!(cap >= 1);
    let mut best = Rational::new(x.round() as i64, 1);
    let mut best_err = (x - best.to_f64()).abs();
    for q in 1..=cap as i64 {
        let p = (x * q as f64).round() as i64;
        let cand = Rational::new(p, q);
        let err = (x - cand.to_f64()).abs();
        if err + 1e-18 < best_err {
            best = cand;
            best_err = err;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Lattice fitting
// ---------------------------------------------------------------------------

/// Affine lattice fitted to a toric joint spectrum: per-axis origin and
/// spacing estimated from the data, plus the worst deviation of any point
/// from the fitted grid.
#[derive(Clone, Debug)]
pub struct LatticeFit {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub residual: f64,
    pub k: Option<u64>,
}

impl LatticeFit {
    /// Mean spacing over the axes; serves as a data-driven semiclassical
    /// scale.
    pub fn mean_spacing(&self) -> f64 {
        self.spacing.iter().sum::<f64>() / self.spacing.len() as f64
    }
}

fn distinct_sorted(values: &mut [f64]) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::new();
    for &v in values.iter() {
        match out.last() {
            Some(&last) if (v - last).abs() <= 1e-12 => {}
            _ => out.push(v),
        }
    }
    out
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Fit an affine lattice to a joint spectrum whose points are all simple.
///
/// Per coordinate the spacing is the median gap of the distinct sorted
/// values and the origin is the smallest value; the residual is the worst
/// Euclidean distance from a point to its nearest lattice node. Spacing is
/// always estimated from the data, never assumed from a normalization.
pub fn fit_lattice(js: &JointSpectrum) -> Result<LatticeFit> {
    for p in js.points() {
        if p.multiplicity > 1 {
            return Err(Error::SimplicityViolation {
                point: p.coords.clone(),
                multiplicity: p.multiplicity,
            });
        }
    }
    let d = js.d();
    if d == 0 {
        return Err(Error::InsufficientPoints { axis: 0, distinct: 0 });
    }
    let mut origin = Vec::with_capacity(d);
    let mut spacing = Vec::with_capacity(d);
    for axis in 0..d {
        let mut values: Vec<f64> = js.points().iter().map(|p| p.coords[axis]).collect();
        let distinct = distinct_sorted(&mut values);
        if distinct.len() < 2 {
            return Err(Error::InsufficientPoints { axis, distinct: distinct.len() });
        }
        let mut gaps: Vec<f64> = distinct.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        origin.push(distinct[0]);
        spacing.push(median(&gaps));
    }

    let mut residual = 0.0f64;
    for p in js.points() {
        let mut r2 = 0.0;
        for axis in 0..d {
            let steps = ((p.coords[axis] - origin[axis]) / spacing[axis]).round();
            let node = origin[axis] + steps * spacing[axis];
            let delta = p.coords[axis] - node;
            r2 += delta * delta;
        }
        residual = residual.max(r2.sqrt());
    }
    let min_spacing = spacing.iter().cloned().fold(f64::INFINITY, f64::min);
    if residual > 0.1 * min_spacing {
        return Err(Error::NotALattice { residual, spacing: min_spacing });
    }
    Ok(LatticeFit { origin, spacing, residual, k: js.param().k() })
}

/// True when no two distinct joint points sit within `radius` of each
/// other and every multiplicity is one: each ball of that radius contains
/// exactly the point at its center.
pub fn simplicity_isolated(js: &JointSpectrum, radius: f64) -> bool {
    if js.points().iter().any(|p| p.multiplicity > 1) {
        return false;
    }
    let pts: Vec<&[f64]> = js.points().iter().map(|p| p.coords.as_slice()).collect();
    !has_pair_within(&pts, radius)
}

fn has_pair_within(points: &[&[f64]], radius: f64) -> bool {
    if radius <= 0.0 || points.len() < 2 {
        return false;
    }
    let d = points[0].len();
    let key = |p: &[f64]| -> (i64, i64) {
        let a = (p[0] / radius).floor() as i64;
        let b = if d > 1 { (p[1] / radius).floor() as i64 } else { 0 };
        (a, b)
    };
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(key(p)).or_default().push(i);
    }
    for (i, p) in points.iter().enumerate() {
        let (ka, kb) = key(p);
        for da in -1..=1 {
            for db in -1..=1 {
                if let Some(bucket) = grid.get(&(ka + da, kb + db)) {
                    for &j in bucket {
                        if j <= i {
                            continue;
                        }
                        let q = points[j];
                        let dist2: f64 =
                            p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum();
                        if dist2.sqrt() <= radius {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Support-function extrapolation
// ---------------------------------------------------------------------------

/// OLS fit y = intercept + slope * x; returns (intercept, slope, max
/// absolute residual).
fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut max_res = 0.0f64;
    for (x, y) in xs.iter().zip(ys) {
        max_res = max_res.max((y - (intercept + slope * x)).abs());
    }
    (intercept, slope, max_res)
}

/// Equally spaced unit directions on the circle.
pub fn support_directions(m: usize) -> Vec<[f64; 2]> {
    (0..m)
        .map(|i| {
            let theta = std::f64::consts::TAU * i as f64 / m as f64;
            [theta.cos(), theta.sin()]
        })
        .collect()
}

/// Intersection of half-planes { x . dir <= offset } starting from a large
/// box, by successive convex clipping.
fn clip_halfplanes(constraints: &[([f64; 2], f64)]) -> Result<ConvexPolygon> {
    let bound = constraints
        .iter()
        .map(|(_, c)| c.abs())
        .fold(1.0f64, f64::max)
        * 4.0;
    let mut poly: Vec<[f64; 2]> = vec![
        [-bound, -bound],
        [bound, -bound],
        [bound, bound],
        [-bound, bound],
    ];
    let eps = 1e-12 * bound.max(1.0);
    for &(dir, offset) in constraints {
        let mut next: Vec<[f64; 2]> = Vec::with_capacity(poly.len() + 1);
        let inside = |p: [f64; 2]| p[0] * dir[0] + p[1] * dir[1] <= offset + eps;
        for i in 0..poly.len() {
            let cur = poly[i];
            let nxt = poly[(i + 1) % poly.len()];
            let cur_in = inside(cur);
            let nxt_in = inside(nxt);
            if cur_in {
                next.push(cur);
            }
            if cur_in != nxt_in {
                let fc = cur[0] * dir[0] + cur[1] * dir[1] - offset;
                let fn_ = nxt[0] * dir[0] + nxt[1] * dir[1] - offset;
                let t = fc / (fc - fn_);
                next.push([cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])]);
            }
        }
        poly = next;
        if poly.is_empty() {
            return Err(Error::EmptyIntersection);
        }
    }
    // Tangent planes leave clusters of intersection points a few ulps wide
    // at each true vertex; collapse them before hulling so the tolerance-
    // based collinearity pruning sees one point per vertex.
    let mut merged: Vec<[f64; 2]> = Vec::with_capacity(poly.len());
    for p in poly {
        let dup = merged
            .iter()
            .any(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() <= 1e-9);
        if !dup {
            merged.push(p);
        }
    }
    let hull = convex_hull(&merged)?;
    if hull.degenerate() {
        return Err(Error::EmptyIntersection);
    }
    Ok(hull)
}

/// Extrapolate a family of hulls to zero semiclassical scale via their
/// support functions.
///
/// Each entry pairs a positive scale (hbar itself, or a data-estimated
/// proxy such as the fitted lattice spacing) with the hull at that scale.
/// Per direction the support value is fitted linearly in the scale and
/// read off at zero; the polygon case intersects the resulting supporting
/// half-planes over `m_directions` equally spaced directions augmented by
/// the edge normals of the finest-scale hull (so a constant family is
/// reproduced exactly). Returns the extrapolated hull and the largest
/// absolute fit residual.
pub fn extrapolate_hull(hulls: &[(f64, Hull)], m_directions: usize) -> Result<(Hull, f64)> {
    let mut scales: Vec<f64> = hulls.iter().map(|(s, _)| *s).collect();
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap());
    scales.dedup();
    if scales.len() < 3 {
        return Err(Error::InsufficientHbar { found: scales.len(), need: 3 });
    }
    let dim = hulls[0].1.dim();
    if hulls.iter().any(|(_, h)| h.dim() != dim) {
        return Err(Error::DimensionMismatch { left: dim, right: 0 });
    }
    let xs: Vec<f64> = hulls.iter().map(|(s, _)| *s).collect();
    match dim {
        1 => {
            let his: Vec<f64> = hulls
                .iter()
                .map(|(_, h)| match h {
                    Hull::D1(iv) => iv.hi,
                    _ => unreachable!(),
                })
                .collect();
            let neg_los: Vec<f64> = hulls
                .iter()
                .map(|(_, h)| match h {
                    Hull::D1(iv) => -iv.lo,
                    _ => unreachable!(),
                })
                .collect();
            let (hi0, _, r1) = ols(&xs, &his);
            let (neg_lo0, _, r2) = ols(&xs, &neg_los);
            if hi0 + neg_lo0 < -1e-12 {
                return Err(Error::NegativeDiameter { support_sum: hi0 + neg_lo0 });
            }
            Ok((Hull::D1(Interval { lo: -neg_lo0, hi: hi0 }), r1.max(r2)))
        }
        2 => {
            if m_directions < 16 {
                return Err(Error::InvalidArgument(format!(
                    "need at least 16 support directions, got {}",
                    m_directions
                )));
            }
            let mut dirs = support_directions(m_directions);
            // Edge normals of the finest hull pin the facets that a finite
            // direction fan would otherwise chamfer.
            let finest = hulls
                .iter()
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                .expect("nonempty");
            if let Hull::D2(poly) = &finest.1 {
                dirs.extend(poly.edge_normals());
            }
            let mut constraints = Vec::with_capacity(dirs.len());
            let mut max_res = 0.0f64;
            let mut h0_at = Vec::with_capacity(dirs.len());
            for &dir in &dirs {
                let ys: Vec<f64> = hulls
                    .iter()
                    .map(|(_, h)| match h {
                        Hull::D2(poly) => poly.support(dir),
                        _ => unreachable!(),
                    })
                    .collect();
                let (h0, _, res) = ols(&xs, &ys);
                max_res = max_res.max(res);
                h0_at.push(h0);
                constraints.push((dir, h0));
            }
            // Antipodal consistency over the equally spaced fan.
            if m_directions.is_multiple_of(2) {
                for i in 0..m_directions / 2 {
                    let sum = h0_at[i] + h0_at[i + m_directions / 2];
                    if sum < -1e-12 {
                        return Err(Error::NegativeDiameter { support_sum: sum });
                    }
                }
            }
            let poly = clip_halfplanes(&constraints)?;
            Ok((Hull::D2(poly), max_res))
        }
        d => Err(Error::InvalidArgument(format!("unsupported hull dimension {}", d))),
    }
}

// ---------------------------------------------------------------------------
// Rational polytopes and the Delzant test
// ---------------------------------------------------------------------------

/// Convex polytope with exact rational data: an interval in one dimension
/// or a polygon with primitive integer edge normals in two.
#[derive(Clone, Debug, PartialEq)]
pub enum Polytope {
    Interval { lo: Rational, hi: Rational },
    Polygon { vertices: Vec<[Rational; 2]>, edge_normals: Vec<[i64; 2]>, delzant: bool },
}

impl Polytope {
    pub fn dim(&self) -> usize {
        match self {
            Polytope::Interval { .. } => 1,
            Polytope::Polygon { .. } => 2,
        }
    }

    pub fn is_delzant(&self) -> bool {
        match self {
            // The smoothness condition is vacuous in one dimension.
            Polytope::Interval { .. } => true,
            Polytope::Polygon { delzant, .. } => *delzant,
        }
    }

    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        match self {
            Polytope::Interval { lo, hi } => vec![vec![lo.to_f64()], vec![hi.to_f64()]],
            Polytope::Polygon { vertices, .. } => vertices
                .iter()
                .map(|v| vec![v[0].to_f64(), v[1].to_f64()])
                .collect(),
        }
    }

    pub fn edge_normals(&self) -> Vec<Vec<i64>> {
        match self {
            Polytope::Interval { .. } => Vec::new(),
            Polytope::Polygon { edge_normals, .. } => {
                edge_normals.iter().map(|n| vec![n[0], n[1]]).collect()
            }
        }
    }

    /// Build a polygon from counterclockwise rational vertices; edge
    /// normals and the Delzant flag are derived.
    pub fn from_polygon_vertices(vertices: Vec<[Rational; 2]>) -> Result<Polytope> {
        if vertices.len() < 3 {
            return Err(Error::DegeneratePolygon);
        }
        let n = vertices.len();
        // Convexity / orientation check with exact arithmetic.
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let abx = b[0].sub(a[0]);
            let aby = b[1].sub(a[1]);
            let bcx = c[0].sub(b[0]);
            let bcy = c[1].sub(b[1]);
            let cross = abx.mul(bcy).sub(aby.mul(bcx));
            if cross.num() <= 0 {
                return Err(Error::InvalidArgument(
                    "polygon vertices must be strictly convex counterclockwise".into(),
                ));
            }
        }
        let mut normals = Vec::with_capacity(n);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let dir = primitive_direction(a, b);
            normals.push([dir[1], -dir[0]]);
        }
        let mut poly =
            Polytope::Polygon { vertices, edge_normals: normals, delzant: false };
        let (ok, _) = delzant_check(&poly);
        if let Polytope::Polygon { ref mut delzant, .. } = poly {
            *delzant = ok;
        }
        Ok(poly)
    }
}

/// Primitive integer vector along the segment from `a` to `b`.
fn primitive_direction(a: [Rational; 2], b: [Rational; 2]) -> [i64; 2] {
    let dx = b[0].sub(a[0]);
    let dy = b[1].sub(a[1]);
    // Common denominator, then divide out the gcd.
    let nx = dx.num() * dy.den();
    let ny = dy.num() * dx.den();
    let g = gcd_i64(nx, ny).max(1);
    [nx / g, ny / g]
}

/// Delzant smoothness test: at every vertex the two primitive integer
/// edge directions must span the lattice, i.e. have determinant +-1.
/// Returns the flag plus the per-vertex determinant certificates.
pub fn delzant_check(p: &Polytope) -> (bool, Vec<i64>) {
    match p {
        Polytope::Interval { .. } => (true, Vec::new()),
        Polytope::Polygon { vertices, .. } => {
            let n = vertices.len();
            let mut certs = Vec::with_capacity(n);
            let mut ok = true;
            for i in 0..n {
                let prev = vertices[(i + n - 1) % n];
                let here = vertices[i];
                let next = vertices[(i + 1) % n];
                let e_next = primitive_direction(here, next);
                let e_prev = primitive_direction(here, prev);
                let det = e_next[0] * e_prev[1] - e_next[1] * e_prev[0];
                certs.push(det);
                if det.abs() != 1 {
                    ok = false;
                }
            }
            (ok, certs)
        }
    }
}

/// Nearest primitive integer vector (entries bounded by `cap`) to a float
/// direction, by exhaustive scan: maximal cosine similarity, ties broken
/// towards shorter vectors.
fn nearest_primitive(dir: [f64; 2], cap: u64) -> [i64; 2] {
    let len = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
    let (ux, uy) = (dir[0] / len, dir[1] / len);
    let cap = cap as i64;
    let mut best = [1i64, 0];
    let mut best_cos = f64::NEG_INFINITY;
    let mut best_len2 = i64::MAX;
    for p in -cap..=cap {
        for q in -cap..=cap {
            if p == 0 && q == 0 {
                continue;
            }
            if gcd_i64(p, q) != 1 {
                continue;
            }
            let norm = ((p * p + q * q) as f64).sqrt();
            let cosine = (p as f64 * ux + q as f64 * uy) / norm;
            let len2 = p * p + q * q;
            if cosine > best_cos + 1e-15
                || ((cosine - best_cos).abs() <= 1e-15 && len2 < best_len2)
            {
                best_cos = cosine;
                best = [p, q];
                best_len2 = len2;
            }
        }
    }
    best
}

/// Snap a float polygon to a rational polytope: edge directions go to the
/// nearest primitive integer vectors, edge offsets to nearby bounded-
/// denominator rationals, and the vertices are re-derived exactly from the
/// snapped edge lines. Fails if the polygon moved further than
/// `delta_tol` (Hausdorff).
pub fn round_to_rational_polytope(
    poly: &ConvexPolygon,
    denominator_cap: u64,
    delta_tol: f64,
) -> Result<(Polytope, Vec<f64>, f64)> {
    if poly.degenerate() {
        return Err(Error::DegeneratePolygon);
    }
    let verts = poly.vertices();
    let n = verts.len();
    let mut lines: Vec<([i64; 2], Rational)> = Vec::with_capacity(n);
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        let dir = nearest_primitive([b[0] - a[0], b[1] - a[1]], denominator_cap);
        let normal = [dir[1], -dir[0]];
        let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
        let offset = best_rational(
            normal[0] as f64 * mid[0] + normal[1] as f64 * mid[1],
            denominator_cap,
        );
        if lines.last().is_some_and(|(ln, lo)| *ln == normal && *lo == offset) {
            continue;
        }
        lines.push((normal, offset));
    }
    if lines.len() >= 2 && lines[0] == lines[lines.len() - 1] {
        lines.pop();
    }
    if lines.len() < 3 {
        return Err(Error::RoundingFailure { delta: f64::INFINITY, tol: delta_tol });
    }

    let m = lines.len();
    let mut vertices = Vec::with_capacity(m);
    for i in 0..m {
        let (n1, c1) = lines[i];
        let (n2, c2) = lines[(i + 1) % m];
        let det = n1[0] * n2[1] - n1[1] * n2[0];
        if det == 0 {
            return Err(Error::RoundingFailure { delta: f64::INFINITY, tol: delta_tol });
        }
        // Cramer in exact arithmetic:
        // x = (c1 n2y - c2 n1y) / det, y = (n1x c2 - n2x c1) / det.
        let x = c1.mul_int(n2[1]).sub(c2.mul_int(n1[1])).div(Rational::from_int(det));
        let y = c2.mul_int(n1[0]).sub(c1.mul_int(n2[0])).div(Rational::from_int(det));
        vertices.push([x, y]);
    }
    // The vertex between edge i and edge i+1 is original vertex i+1; keep
    // counterclockwise order starting from the intersection of the last
    // and first edges.
    vertices.rotate_right(1);

    let float_verts: Vec<[f64; 2]> =
        vertices.iter().map(|v| [v[0].to_f64(), v[1].to_f64()]).collect();
    let per_vertex: Vec<f64> = float_verts
        .iter()
        .map(|&v| point_polygon_distance(v, poly))
        .collect();
    let snapped_hull = convex_hull(&float_verts)?;
    let delta = hausdorff_hull(&Hull::D2(poly.clone()), &Hull::D2(snapped_hull))?;
    if delta > delta_tol {
        return Err(Error::RoundingFailure { delta, tol: delta_tol });
    }
    let polytope = Polytope::from_polygon_vertices(vertices)?;
    Ok((polytope, per_vertex, delta))
}

/// Interval analogue of the rational rounding step.
pub fn round_to_rational_interval(
    iv: &Interval,
    denominator_cap: u64,
    delta_tol: f64,
) -> Result<(Polytope, Vec<f64>, f64)> {
    let lo = best_rational(iv.lo, denominator_cap);
    let hi = best_rational(iv.hi, denominator_cap);
    let deltas = vec![(lo.to_f64() - iv.lo).abs(), (hi.to_f64() - iv.hi).abs()];
    let delta = deltas[0].max(deltas[1]);
    if delta > delta_tol {
        return Err(Error::RoundingFailure { delta, tol: delta_tol });
    }
    Ok((Polytope::Interval { lo, hi }, deltas, delta))
}

// ---------------------------------------------------------------------------
// Full recovery pipeline
// ---------------------------------------------------------------------------

/// Options for [`recover`].
#[derive(Clone, Debug)]
pub struct RecoverOptions {
    /// Number of equally spaced support directions (polygon case).
    pub directions: usize,
    /// Denominator cap for rational rounding.
    pub denominator_cap: u64,
    /// Rounding tolerance; defaults to 10x the extrapolation residual
    /// (with a small floor against pure float noise).
    pub rounding_tol: Option<f64>,
    /// Use the fitted lattice spacing as the extrapolation abscissa
    /// instead of the nominal hbar. The spacing is the data's own
    /// semiclassical scale, free of any normalization convention.
    pub spacing_scale: bool,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        RecoverOptions {
            directions: 64,
            denominator_cap: 20,
            rounding_tol: None,
            spacing_scale: true,
        }
    }
}

/// Everything the recovery run produced, including the intermediate
/// residuals of each stage.
#[derive(Clone, Debug)]
pub struct RecoveryReport {
    pub polytope: Polytope,
    pub delzant: bool,
    pub certificates: Vec<i64>,
    pub lattice_fits: Vec<LatticeFit>,
    pub hulls: Vec<(f64, Hull)>,
    pub extrapolation_residual: f64,
    pub rounding_delta: f64,
    pub vertex_deltas: Vec<f64>,
}

/// Recover the moment polytope from at least three toric joint spectra at
/// distinct semiclassical parameters: lattice fits (validating
/// simplicity), hulls, support extrapolation to the limit, rational
/// rounding, Delzant test.
pub fn recover(spectra: &[JointSpectrum], opts: &RecoverOptions) -> Result<RecoveryReport> {
    if spectra.len() < 3 {
        return Err(Error::InsufficientHbar { found: spectra.len(), need: 3 });
    }
    let mut hbars: Vec<f64> = spectra.iter().map(|s| s.param().hbar()).collect();
    hbars.sort_by(|a, b| a.partial_cmp(b).unwrap());
    hbars.dedup();
    if hbars.len() < 3 {
        return Err(Error::InsufficientHbar { found: hbars.len(), need: 3 });
    }
    let d = spectra[0].d();
    if d == 0 || d > 2 {
        return Err(Error::InvalidArgument(format!("unsupported spectrum dimension {}", d)));
    }
    if spectra.iter().any(|s| s.d() != d) {
        return Err(Error::DimensionMismatch { left: d, right: 0 });
    }

    let mut lattice_fits = Vec::with_capacity(spectra.len());
    let mut hulls = Vec::with_capacity(spectra.len());
    for js in spectra {
        let fit = fit_lattice(js)?;
        let scale = if opts.spacing_scale { fit.mean_spacing() } else { js.param().hbar() };
        lattice_fits.push(fit);
        hulls.push((scale, spectrum_hull(js)?));
    }

    let (limit_hull, extrapolation_residual) = extrapolate_hull(&hulls, opts.directions)?;
    let rounding_tol = opts
        .rounding_tol
        .unwrap_or_else(|| (10.0 * extrapolation_residual).max(1e-9));

    let (polytope, vertex_deltas, rounding_delta) = match &limit_hull {
        Hull::D1(iv) => round_to_rational_interval(iv, opts.denominator_cap, rounding_tol)?,
        Hull::D2(poly) => round_to_rational_polytope(poly, opts.denominator_cap, rounding_tol)?,
    };
    let (delzant, certificates) = delzant_check(&polytope);
    Ok(RecoveryReport {
        polytope,
        delzant,
        certificates,
        lattice_fits,
        hulls,
        extrapolation_residual,
        rounding_delta,
        vertex_deltas,
    })
}
