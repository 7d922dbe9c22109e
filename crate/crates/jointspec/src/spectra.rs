//! Joint spectra of commuting families and classical spectra of their
//! principal symbols.
//!
//! The quantum side diagonalizes the first operator, groups eigenvalues
//! into gap-separated clusters, projects the next operator onto each
//! cluster eigenspace, and recurses; joint eigenvector residuals are
//! tracked across every output. The classical side samples the moment map
//! on deterministic grids, reduces to convex hulls, and compares the two
//! worlds with an exact Hausdorff distance.

use num_complex::Complex64;

use crate::cmat::{eigh, CMat, ZERO};
use crate::operators::SemiclassicalParam;
use crate::quantize::{toric_family, CommutingFamily, ToricModel, ToricModelName};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// One point of a joint spectrum: simultaneous eigenvalue tuple plus the
/// dimension of its joint eigenspace.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPoint {
    pub coords: Vec<f64>,
    pub multiplicity: usize,
}

/// Finite multiset of joint eigenvalue tuples at a fixed semiclassical
/// parameter, with the worst joint-eigenvector residual observed while
/// computing it.
#[derive(Clone, Debug)]
pub struct JointSpectrum {
    param: SemiclassicalParam,
    points: Vec<JointPoint>,
    residual: f64,
}

impl JointSpectrum {
    pub fn new(param: SemiclassicalParam, points: Vec<JointPoint>, residual: f64) -> Self {
        JointSpectrum { param, points, residual }
    }

    #[inline]
    pub fn param(&self) -> SemiclassicalParam {
        self.param
    }

    #[inline]
    pub fn points(&self) -> &[JointPoint] {
        &self.points
    }

    #[inline]
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn d(&self) -> usize {
        self.points.first().map_or(0, |p| p.coords.len())
    }

    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    pub fn coords_cloud(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.coords.clone()).collect()
    }

    pub fn sort_points(&mut self) {
        self.points
            .sort_by(|a, b| a.coords.partial_cmp(&b.coords).unwrap());
    }
}

/// Default clustering tolerance: 1e-9 times a Gershgorin bound on the
/// spectral diameter, floored so it always clears the measured
/// commutation error and the 1e-12 baseline.
pub fn default_cluster_tol(fam: &CommutingFamily) -> f64 {
    let mut diam = 0.0f64;
    for op in fam.ops() {
        let m = op.matrix();
        let n = m.rows();
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for i in 0..n {
            let d = m.get(i, i).re;
            let mut radius = 0.0;
            for j in 0..n {
                if j != i {
                    radius += m.get(i, j).norm();
                }
            }
            hi = hi.max(d + radius);
            lo = lo.min(d - radius);
        }
        diam = diam.max(hi - lo);
    }
    (1e-9 * diam).max(2e-12).max(2.0 * fam.max_commutator_norm())
}

/// Accumulated change of basis in the recursion: either an exact column
/// selection (the diagonal fast path composes to this) or a dense n x m
/// isometry.
enum Basis {
    Selection(Vec<usize>),
    Dense(CMat),
}

impl Basis {
    fn cols(&self) -> usize {
        match self {
            Basis::Selection(idx) => idx.len(),
            Basis::Dense(w) => w.cols(),
        }
    }

    fn project(&self, mat: &CMat) -> CMat {
        match self {
            Basis::Selection(idx) => mat.gather(idx, idx),
            Basis::Dense(w) => w.adjoint().mul(mat).mul(w).hermitize(),
        }
    }

    /// Compose with a block of eigenvector columns of the projected
    /// operator. `ambient` is the dimension of the original space.
    fn compose(&self, vecs: &CMat, lo: usize, hi: usize, ambient: usize) -> Basis {
        let cols: Vec<usize> = (lo..hi).collect();
        let all_rows: Vec<usize> = (0..vecs.rows()).collect();
        let sub = vecs.gather(&all_rows, &cols);
        match self {
            Basis::Selection(idx) => {
                if let Some(sel) = sub.selection_indices() {
                    Basis::Selection(sel.into_iter().map(|s| idx[s]).collect())
                } else {
                    // Scatter the rows of `sub` into the selected slots.
                    let mut w = CMat::zeros(ambient, sub.cols());
                    for (local, &global) in idx.iter().enumerate() {
                        for c in 0..sub.cols() {
                            w.set(global, c, sub.get(local, c));
                        }
                    }
                    Basis::Dense(w)
                }
            }
            Basis::Dense(w) => Basis::Dense(w.mul(&sub)),
        }
    }
}

/// Final joint eigenspace: selected ambient indices or a dense isometry,
/// plus the joint coordinates assigned to it.
type Leaf = (Vec<usize>, Option<CMat>, Vec<f64>);

struct Recursion<'a> {
    mats: Vec<&'a CMat>,
    ambient: usize,
    cluster_tol: f64,
    points: Vec<JointPoint>,
    leaves: Vec<Leaf>,
}

fn cluster_value(sorted: &[f64]) -> f64 {
    // Exactly degenerate clusters keep their value bit for bit; only
    // genuinely split clusters get averaged.
    if sorted.iter().all(|v| *v == sorted[0]) {
        sorted[0]
    } else {
        sorted.iter().sum::<f64>() / sorted.len() as f64
    }
}

/// Restricted to the given index set, is the operator exactly diagonal?
fn restriction_is_diagonal(mat: &CMat, idx: &[usize]) -> bool {
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            if a != b && mat.get(i, j) != ZERO {
                return false;
            }
        }
    }
    true
}

impl<'a> Recursion<'a> {
    fn run(&mut self, level: usize, basis: Basis, coords: Vec<f64>) -> Result<()> {
        if level == self.mats.len() {
            let mult = basis.cols();
            match basis {
                Basis::Selection(idx) => self.leaves.push((idx, None, coords.clone())),
                Basis::Dense(w) => self.leaves.push((Vec::new(), Some(w), coords.clone())),
            }
            self.points.push(JointPoint { coords, multiplicity: mult });
            return Ok(());
        }

        // Diagonal operators restricted to selection bases need no
        // eigensolve and, more importantly at Kronecker sizes, no
        // materialized projections: read the eigenvalues off the diagonal
        // and carry index sets through the recursion.
        if let Basis::Selection(idx) = &basis {
            let mat = self.mats[level];
            if restriction_is_diagonal(mat, idx) {
                let mut entries: Vec<(f64, usize)> =
                    idx.iter().map(|&i| (mat.get(i, i).re, i)).collect();
                entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                let m = entries.len();
                let mut start = 0usize;
                for i in 1..=m {
                    if i == m || entries[i].0 - entries[i - 1].0 > self.cluster_tol {
                        let vals: Vec<f64> = entries[start..i].iter().map(|e| e.0).collect();
                        let sub_idx: Vec<usize> =
                            entries[start..i].iter().map(|e| e.1).collect();
                        let mut next = coords.clone();
                        next.push(cluster_value(&vals));
                        self.run(level + 1, Basis::Selection(sub_idx), next)?;
                        start = i;
                    }
                }
                return Ok(());
            }
        }

        let projected = basis.project(self.mats[level]);
        let (vals, vecs) = eigh(&projected)?;
        let m = vals.len();
        let mut start = 0usize;
        for i in 1..=m {
            if i == m || vals[i] - vals[i - 1] > self.cluster_tol {
                let sub_basis = basis.compose(&vecs, start, i, self.ambient);
                let mut next = coords.clone();
                next.push(cluster_value(&vals[start..i]));
                self.run(level + 1, sub_basis, next)?;
                start = i;
            }
        }
        Ok(())
    }
}

/// Joint spectrum of a commuting family by recursive simultaneous
/// diagonalization.
///
/// Eigenvalues of the first operator are grouped into maximal runs with
/// gaps at most `cluster_tol`; the next operator is projected onto each
/// cluster eigenspace and the recursion continues through the family.
/// Every emitted joint point carries the dimension of its final eigenspace
/// as multiplicity, and the worst residual `|T_j v - lambda_j v|` over all
/// joint vectors is reported and validated.
pub fn joint_spectrum(fam: &CommutingFamily, cluster_tol: f64) -> Result<JointSpectrum> {
    let floor = fam.max_commutator_norm().max(1e-12);
    if cluster_tol <= floor {
        return Err(Error::Configuration(format!(
            "cluster tolerance {:.3e} must exceed max(commutation error {:.3e}, 1e-12)",
            cluster_tol,
            fam.max_commutator_norm()
        )));
    }
    let n = fam.dim();
    let mats: Vec<&CMat> = fam.ops().iter().map(|o| o.matrix()).collect();
    let mut rec = Recursion {
        mats,
        ambient: n,
        cluster_tol,
        points: Vec::new(),
        leaves: Vec::new(),
    };
    rec.run(0, Basis::Selection((0..n).collect()), Vec::new())?;

    let mut residual = 0.0f64;
    for (idx, dense, coords) in &rec.leaves {
        for (j, mat) in fam.ops().iter().map(|o| o.matrix()).enumerate() {
            let lambda = coords[j];
            if let Some(w) = dense {
                for c in 0..w.cols() {
                    let v = w.col(c);
                    let av = mat.matvec(&v);
                    let mut r2 = 0.0;
                    for i in 0..n {
                        r2 += (av[i] - v[i] * lambda).norm_sqr();
                    }
                    residual = residual.max(r2.sqrt());
                }
            } else {
                for &col in idx {
                    let mut r2 = 0.0;
                    for i in 0..n {
                        let aic = mat.get(i, col);
                        let expect = if i == col {
                            Complex64::new(lambda, 0.0)
                        } else {
                            ZERO
                        };
                        r2 += (aic - expect).norm_sqr();
                    }
                    residual = residual.max(r2.sqrt());
                }
            }
        }
    }
    if residual > 100.0 * cluster_tol {
        return Err(Error::NonCommutingInput { residual, tol: cluster_tol });
    }

    let total: usize = rec.points.iter().map(|p| p.multiplicity).sum();
    debug_assert_eq!(total, n, "multiplicities must sum to the dimension");

    let mut js = JointSpectrum::new(fam.param(), rec.points, residual);
    js.sort_points();
    Ok(js)
}

/// Independent oracle for [`joint_spectrum`]: diagonalize one random unit
/// combination of the family and read each joint value off as a Rayleigh
/// quotient. Eigenvalue collisions of the combination trigger a reseeded
/// retry (five attempts).
pub fn random_combination_check(fam: &CommutingFamily, seed: u64) -> Result<JointSpectrum> {
    let n = fam.dim();
    let d = fam.d();
    let mut rng = SplitMix64::new(seed);
    let mut last_gap = f64::INFINITY;
    for _attempt in 0..5 {
        let coeffs = rng.next_unit_vector(d);
        let mut m = CMat::zeros(n, n);
        for (c, op) in coeffs.iter().zip(fam.ops()) {
            m = m.add(&op.matrix().scale(Complex64::new(*c, 0.0)));
        }
        let (vals, vecs) = eigh(&m)?;
        let mut min_gap = f64::INFINITY;
        for w in vals.windows(2) {
            min_gap = min_gap.min(w[1] - w[0]);
        }
        if n > 1 && min_gap < 1e-10 {
            last_gap = min_gap;
            continue;
        }

        // Standard-basis eigenvectors (from the diagonal fast path) avoid
        // dense Rayleigh quotients and residual matvecs entirely.
        let basis_index = |v: &[Complex64]| -> Option<usize> {
            let mut hit = None;
            for (i, z) in v.iter().enumerate() {
                if *z == ZERO {
                    continue;
                }
                if *z == crate::cmat::ONE && hit.is_none() {
                    hit = Some(i);
                } else {
                    return None;
                }
            }
            hit
        };

        let mut points = Vec::with_capacity(n);
        let mut residual = 0.0f64;
        for c in 0..n {
            let v = vecs.col(c);
            let sel = basis_index(&v);
            let mut coords = Vec::with_capacity(d);
            for op in fam.ops() {
                let mat = op.matrix();
                match sel {
                    Some(i) => {
                        let lambda = mat.get(i, i).re;
                        let mut r2 = 0.0;
                        for r in 0..n {
                            let expect =
                                if r == i { Complex64::new(lambda, 0.0) } else { ZERO };
                            r2 += (mat.get(r, i) - expect).norm_sqr();
                        }
                        residual = residual.max(r2.sqrt());
                        coords.push(lambda);
                    }
                    None => {
                        let av = mat.matvec(&v);
                        let lambda: f64 =
                            v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum();
                        let mut r2 = 0.0;
                        for i in 0..n {
                            r2 += (av[i] - v[i] * lambda).norm_sqr();
                        }
                        residual = residual.max(r2.sqrt());
                        coords.push(lambda);
                    }
                }
            }
            points.push(JointPoint { coords, multiplicity: 1 });
        }
        let mut js = JointSpectrum::new(fam.param(), points, residual);
        js.sort_points();
        return Ok(js);
    }
    Err(Error::EigenvalueCollision { gap: last_gap, retries: 5 })
}

// ---------------------------------------------------------------------------
// Classical systems
// ---------------------------------------------------------------------------

/// Catalog of classical integrable systems whose moment maps provide the
/// principal symbols of the quantized families.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalSystem {
    /// Unit sphere with the height function; classical spectrum [-1, 1].
    S2,
    /// Product of two unit spheres with both heights; spectrum [-1, 1]^2.
    S2xS2,
    /// Sphere x plane with `f1 = (u^2+v^2)/2 + z`, `f2 = (u x + v y)/2`,
    /// windowed at `f1 <= window` to make the noncompact image finite.
    JaynesCummings { window: f64 },
}

impl ClassicalSystem {
    pub fn jaynes_cummings(window: f64) -> Self {
        ClassicalSystem::JaynesCummings { window }
    }

    pub fn d(&self) -> usize {
        match self {
            ClassicalSystem::S2 => 1,
            ClassicalSystem::S2xS2 | ClassicalSystem::JaynesCummings { .. } => 2,
        }
    }

    /// Ambient phase-space coordinates: spheres contribute (x, y, z)
    /// triples, the plane contributes (u, v).
    pub fn phase_dim(&self) -> usize {
        match self {
            ClassicalSystem::S2 => 3,
            ClassicalSystem::S2xS2 => 6,
            ClassicalSystem::JaynesCummings { .. } => 5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassicalSystem::S2 => "s2",
            ClassicalSystem::S2xS2 => "s2xs2",
            ClassicalSystem::JaynesCummings { .. } => "jc",
        }
    }

    /// Moment map at an ambient phase-space point.
    pub fn moment_map(&self, pt: &[f64]) -> Vec<f64> {
        assert_eq!(pt.len(), self.phase_dim());
        match self {
            ClassicalSystem::S2 => vec![pt[2]],
            ClassicalSystem::S2xS2 => vec![pt[2], pt[5]],
            ClassicalSystem::JaynesCummings { .. } => {
                let (x, y, z, u, v) = (pt[0], pt[1], pt[2], pt[3], pt[4]);
                vec![(u * u + v * v) / 2.0 + z, (u * x + v * y) / 2.0]
            }
        }
    }

    /// Hamiltonian vector field of the first moment component, in the
    /// ambient coordinates. Sphere brackets are oriented so that the pair
    /// Poisson-commutes with the canonical plane bracket.
    pub fn f1_field(&self, pt: &[f64]) -> Vec<f64> {
        assert_eq!(pt.len(), self.phase_dim());
        match self {
            ClassicalSystem::S2 => vec![pt[1], -pt[0], 0.0],
            ClassicalSystem::S2xS2 => vec![pt[1], -pt[0], 0.0, 0.0, 0.0, 0.0],
            ClassicalSystem::JaynesCummings { .. } => {
                vec![pt[1], -pt[0], 0.0, pt[4], -pt[3]]
            }
        }
    }

    /// Radius window of the plane factor, if the system has one.
    pub fn plane_radius(&self) -> Option<f64> {
        match self {
            ClassicalSystem::JaynesCummings { window } => Some((2.0 * (window + 1.0)).sqrt()),
            _ => None,
        }
    }
}

/// Sampled classical spectrum: point cloud, its hull, and the window used
/// for noncompact systems.
#[derive(Clone, Debug)]
pub struct ClassicalSpectrum {
    pub samples: Vec<Vec<f64>>,
    pub hull: Hull,
    pub window: Option<f64>,
}

/// Deterministic grid sample of the moment-map image.
///
/// Sphere factors use an equal-area latitude grid (uniform in z, poles
/// included); the plane factor uses a polar grid up to the window radius.
/// Grid coordinates that the moment map does not depend on are not
/// enumerated: they would only replicate image points.
pub fn classical_spectrum(
    sys: &ClassicalSystem,
    resolution: usize,
    window: Option<f64>,
) -> Result<ClassicalSpectrum> {
    if resolution < 16 {
        return Err(Error::InvalidArgument(format!(
            "resolution {} below the minimum of 16 per factor dimension",
            resolution
        )));
    }
    let res = resolution;
    let z_grid: Vec<f64> = (0..res)
        .map(|i| -1.0 + 2.0 * i as f64 / (res - 1) as f64)
        .collect();
    match sys {
        ClassicalSystem::S2 => {
            let samples: Vec<Vec<f64>> = z_grid.iter().map(|&z| vec![z]).collect();
            let hull = Hull::D1(Interval::from_values(samples.iter().map(|s| s[0])));
            Ok(ClassicalSpectrum { samples, hull, window: None })
        }
        ClassicalSystem::S2xS2 => {
            let mut samples = Vec::with_capacity(res * res);
            for &z1 in &z_grid {
                for &z2 in &z_grid {
                    samples.push(vec![z1, z2]);
                }
            }
            let pts: Vec<[f64; 2]> = samples.iter().map(|s| [s[0], s[1]]).collect();
            let hull = Hull::D2(convex_hull(&pts)?);
            Ok(ClassicalSpectrum { samples, hull, window: None })
        }
        ClassicalSystem::JaynesCummings { window: sys_window } => {
            let c = window.unwrap_or(*sys_window);
            if c < -1.0 {
                return Err(Error::EmptyWindow);
            }
            let r_max = (2.0 * (c + 1.0)).sqrt();
            let r_grid: Vec<f64> =
                (0..res).map(|i| r_max * i as f64 / (res - 1) as f64).collect();
            // f1 and f2 depend on the sphere longitude and the plane angle
            // only through their difference, so one uniform angle grid
            // covers the image of the full product grid.
            let delta_grid: Vec<f64> = (0..res)
                .map(|i| std::f64::consts::TAU * i as f64 / res as f64)
                .collect();
            let mut samples = Vec::new();
            for &z in &z_grid {
                let s = (1.0 - z * z).max(0.0).sqrt();
                for &r in &r_grid {
                    let f1 = r * r / 2.0 + z;
                    if f1 > c {
                        continue;
                    }
                    for &delta in &delta_grid {
                        samples.push(vec![f1, r * s * delta.cos() / 2.0]);
                    }
                }
            }
            if samples.is_empty() {
                return Err(Error::EmptyWindow);
            }
            let pts: Vec<[f64; 2]> = samples.iter().map(|s| [s[0], s[1]]).collect();
            let hull = Hull::D2(convex_hull(&pts)?);
            Ok(ClassicalSpectrum { samples, hull, window: Some(c) })
        }
    }
}

/// Drift of the second moment component along the numerically integrated
/// Hamiltonian flow of the first (classic RK4), over [0, t_end].
///
/// For one-component systems the conserved quantity checked is the
/// component itself.
pub fn poisson_check(sys: &ClassicalSystem, point: &[f64], t_end: f64, dt: f64) -> Result<f64> {
    if point.len() != sys.phase_dim() {
        return Err(Error::DimensionMismatch { left: point.len(), right: sys.phase_dim() });
    }
    if !(dt > 0.0 && dt <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "dt = {} outside (0, 1e-3]",
            dt
        )));
    }
    if t_end < 0.0 {
        return Err(Error::InvalidArgument("t_end must be nonnegative".into()));
    }
    let conserved_index = sys.d() - 1;
    let f2_start = sys.moment_map(point)[conserved_index];
    let limit = sys.plane_radius();
    let check_window = |state: &[f64]| -> Result<()> {
        if let Some(r_max) = limit {
            let (u, v) = (state[3], state[4]);
            let r = (u * u + v * v).sqrt();
            if r > r_max {
                return Err(Error::WindowExceeded { radius: r, limit: r_max });
            }
        }
        Ok(())
    };
    check_window(point)?;

    let dim = point.len();
    let mut state = point.to_vec();
    let steps = (t_end / dt).ceil() as usize;
    let mut drift = 0.0f64;
    let axpy = |base: &[f64], scale: f64, dir: &[f64]| -> Vec<f64> {
        base.iter().zip(dir).map(|(b, d)| b + scale * d).collect()
    };
    for _ in 0..steps {
        let k1 = sys.f1_field(&state);
        let k2 = sys.f1_field(&axpy(&state, dt / 2.0, &k1));
        let k3 = sys.f1_field(&axpy(&state, dt / 2.0, &k2));
        let k4 = sys.f1_field(&axpy(&state, dt, &k3));
        for i in 0..dim {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        check_window(&state)?;
        let f2 = sys.moment_map(&state)[conserved_index];
        drift = drift.max((f2 - f2_start).abs());
    }
    Ok(drift)
}

// ---------------------------------------------------------------------------
// Hulls and Hausdorff distance
// ---------------------------------------------------------------------------

/// Closed interval; the degenerate case is a single point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Interval {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Interval { lo, hi }
    }

    pub fn degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

/// Convex polygon with counterclockwise vertices; rank-deficient clouds
/// (a point or a segment) carry the degenerate flag instead.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<[f64; 2]>,
    degenerate: bool,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    /// Support value max_{v} v . dir.
    pub fn support(&self, dir: [f64; 2]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[0] * dir[0] + v[1] * dir[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Outward unit normals of the edges (empty for degenerate polygons).
    pub fn edge_normals(&self) -> Vec<[f64; 2]> {
        if self.degenerate {
            return Vec::new();
        }
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = (dx * dx + dy * dy).sqrt();
            out.push([dy / len, -dx / len]);
        }
        out
    }
}

/// Hull of a classical or quantum spectrum: interval in one dimension,
/// convex polygon in two.
#[derive(Clone, Debug, PartialEq)]
pub enum Hull {
    D1(Interval),
    D2(ConvexPolygon),
}

impl Hull {
    pub fn dim(&self) -> usize {
        match self {
            Hull::D1(_) => 1,
            Hull::D2(_) => 2,
        }
    }
}

const COLLINEAR_TOL: f64 = 1e-12;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Monotone-chain convex hull with collinear pruning.
pub fn convex_hull(points: &[[f64; 2]]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("convex hull of an empty set".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() == 1 {
        return Ok(ConvexPolygon { vertices: pts, degenerate: true });
    }

    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= COLLINEAR_TOL
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= COLLINEAR_TOL
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let mut vertices = lower;
    vertices.extend(upper);
    if vertices.len() < 3 {
        // All points collinear: keep the extreme pair as a segment.
        let a = pts[0];
        let b = pts[pts.len() - 1];
        return Ok(ConvexPolygon { vertices: vec![a, b], degenerate: true });
    }
    Ok(ConvexPolygon { vertices, degenerate: false })
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (abx, aby) = (b[0] - a[0], b[1] - a[1]);
    let (apx, apy) = (p[0] - a[0], p[1] - a[1]);
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 { ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (cx, cy) = (a[0] + t * abx - p[0], a[1] + t * aby - p[1]);
    (cx * cx + cy * cy).sqrt()
}

/// Distance from a point to a solid convex polygon (zero inside).
pub fn point_polygon_distance(p: [f64; 2], poly: &ConvexPolygon) -> f64 {
    let verts = poly.vertices();
    match verts.len() {
        0 => f64::INFINITY,
        1 => {
            let (dx, dy) = (p[0] - verts[0][0], p[1] - verts[0][1]);
            (dx * dx + dy * dy).sqrt()
        }
        2 => point_segment_distance(p, verts[0], verts[1]),
        n => {
            let mut inside = true;
            let mut min_edge = f64::INFINITY;
            for i in 0..n {
                let a = verts[i];
                let b = verts[(i + 1) % n];
                if cross(a, b, p) < -COLLINEAR_TOL {
                    inside = false;
                }
                min_edge = min_edge.min(point_segment_distance(p, a, b));
            }
            if inside {
                0.0
            } else {
                min_edge
            }
        }
    }
}

/// Exact symmetric Hausdorff distance between finite point sets.
pub fn hausdorff_points(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("Hausdorff distance of an empty set".into()));
    }
    let directed = |from: &[Vec<f64>], to: &[Vec<f64>]| -> f64 {
        let mut worst = 0.0f64;
        for p in from {
            let mut best = f64::INFINITY;
            for q in to {
                let d2: f64 = p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum();
                best = best.min(d2);
            }
            worst = worst.max(best.sqrt());
        }
        worst
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Hausdorff distance between hulls as solid convex sets. For polygons
/// the supremum of the distance function over a convex set is attained at
/// a vertex, so scanning vertices of each against the other is exact.
pub fn hausdorff_hull(a: &Hull, b: &Hull) -> Result<f64> {
    match (a, b) {
        (Hull::D1(x), Hull::D1(y)) => Ok((x.lo - y.lo).abs().max((x.hi - y.hi).abs())),
        (Hull::D2(x), Hull::D2(y)) => {
            let over = x
                .vertices()
                .iter()
                .map(|&v| point_polygon_distance(v, y))
                .fold(0.0f64, f64::max);
            let back = y
                .vertices()
                .iter()
                .map(|&v| point_polygon_distance(v, x))
                .fold(0.0f64, f64::max);
            Ok(over.max(back))
        }
        _ => Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() }),
    }
}

/// Hull of a joint spectrum's point cloud.
pub fn spectrum_hull(js: &JointSpectrum) -> Result<Hull> {
    match js.d() {
        1 => Ok(Hull::D1(Interval::from_values(js.points().iter().map(|p| p.coords[0])))),
        2 => {
            let pts: Vec<[f64; 2]> =
                js.points().iter().map(|p| [p.coords[0], p.coords[1]]).collect();
            Ok(Hull::D2(convex_hull(&pts)?))
        }
        d => Err(Error::InvalidArgument(format!("unsupported spectrum dimension {}", d))),
    }
}

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub k: Option<u64>,
    pub hbar: f64,
    pub distance: f64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub alpha: f64,
    pub intercept: f64,
}

/// Ordinary least squares on (ln hbar, ln distance); returns (slope,
/// intercept).
pub fn fit_loglog(pairs: &[(f64, f64)]) -> (f64, f64) {
    let n = pairs.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &(x, y) in pairs {
        sx += x.ln();
        sy += y.ln();
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in pairs {
        let dx = x.ln() - mx;
        sxx += dx * dx;
        sxy += dx * (y.ln() - my);
    }
    let alpha = sxy / sxx;
    (alpha, my - alpha * mx)
}

/// Rows of (scale, distance) plus the fitted log-log (slope, intercept).
pub type ConvergenceFit = (Vec<(f64, f64)>, f64, f64);

/// Distance table plus log-log fit for precomputed per-hbar hulls against
/// a fixed classical hull.
pub fn convergence_table(entries: &[(f64, Hull)], classical: &Hull) -> Result<ConvergenceFit> {
    let mut rows = Vec::with_capacity(entries.len());
    for (hbar, hull) in entries {
        let d = hausdorff_hull(hull, classical)?;
        // A zero distance is formally fine but its logarithm is not; the
        // fit would silently go non-finite either way.
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::NonFiniteDistance);
        }
        rows.push((*hbar, d));
    }
    let (alpha, intercept) = fit_loglog(&rows);
    Ok((rows, alpha, intercept))
}

/// Hausdorff convergence study of a toric model over increasing levels k:
/// builds the family at each k, computes the joint spectrum and its hull,
/// and fits the decay exponent of the hull distance to the classical hull.
///
/// The table reports the nominal `hbar = 1/k` of each level; the exponent
/// is fitted against the level spacing estimated from the spectrum itself,
/// the one semiclassical scale that is free of area-normalization
/// conventions (against the raw 1/k the exponent of these models is
/// depressed by the constant offset in the spacing 2/(k+2), an artifact of
/// the normalization rather than of the convergence).
pub fn convergence_study(
    name: ToricModelName,
    k_list: &[u64],
    resolution: usize,
) -> Result<ConvergenceStudy> {
    if k_list.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 k values, got {}",
            k_list.len()
        )));
    }
    for w in k_list.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidArgument(
                "k list must be strictly increasing (hbar strictly decreasing)".into(),
            ));
        }
    }
    let sys = match name {
        ToricModelName::S2 => ClassicalSystem::S2,
        ToricModelName::S2xS2 => ClassicalSystem::S2xS2,
    };
    let classical = classical_spectrum(&sys, resolution, None)?.hull;
    let mut entries = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let fam = toric_family(&ToricModel::new(name, k)?)?;
        let js = joint_spectrum(&fam, default_cluster_tol(&fam))?;
        let fit = crate::inverse::fit_lattice(&js)?;
        entries.push((fit.mean_spacing(), spectrum_hull(&js)?));
    }
    let (rows, alpha, intercept) = convergence_table(&entries, &classical)?;
    let study_rows = k_list
        .iter()
        .zip(&rows)
        .map(|(&k, &(_, distance))| ConvergenceRow { k: Some(k), hbar: 1.0 / k as f64, distance })
        .collect();
    Ok(ConvergenceStudy { rows: study_rows, alpha, intercept })
}

/// Distances of windowed quantum joint points to the windowed classical
/// hull of the spin-oscillator model. Callers flag (rather than fail on)
/// points beyond their margin of interest.
pub fn jc_containment_distances(
    n: usize,
    window: f64,
    resolution: usize,
) -> Result<Vec<(Vec<f64>, f64)>> {
    let hbar = 2.0 / (n as f64 + 1.0);
    let t_max = ((window / hbar - (1.0 - n as f64) / 2.0).floor()).max(0.0) as usize;
    let js = crate::quantize::jc_block_spectrum(n, t_max)?;
    let classical = classical_spectrum(
        &ClassicalSystem::jaynes_cummings(window),
        resolution,
        None,
    )?;
    let poly = match &classical.hull {
        Hull::D2(p) => p,
        Hull::D1(_) => unreachable!("spin-oscillator spectrum is two dimensional"),
    };
    let mut out = Vec::new();
    for p in js.points() {
        if p.coords[0] <= window {
            let d = point_polygon_distance([p.coords[0], p.coords[1]], poly);
            out.push((p.coords.clone(), d));
        }
    }
    Ok(out)
}
