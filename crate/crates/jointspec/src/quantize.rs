//! Commuting operator families.
//!
//! Three constructions live here:
//!
//! * Weyl quantization of real polynomial symbols in one canonical pair
//!   (u, v), by explicit averaging over all orderings of the position and
//!   momentum factors of each monomial.
//! * The spin-oscillator pair: a conserved total excitation splits the
//!   pair into finite blocks, so both operators are handled exactly, with
//!   no truncation error. A full tensor-product build is kept alongside as
//!   a cross-check.
//! * Berezin-Toeplitz operators for the sphere in the monomial section
//!   basis, with matrix elements evaluated in closed form (Beta-function
//!   integrals) instead of through any discretized projector.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::cmat::{CMat, I, ONE};
use crate::operators::{
    commutator_norm, oscillator, spin_triple, tensor, HermitianOperator, OscillatorAlgebra,
    SemiclassicalParam,
};
use crate::spectra::{ClassicalSystem, JointPoint, JointSpectrum};
use crate::{Error, Result};

/// Largest supported total degree for polynomial symbols.
pub const DEGREE_CAP: u32 = 8;

/// Real polynomial in the canonical pair (u, v), stored as a map from
/// exponents (alpha, beta) to coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialSymbol {
    terms: BTreeMap<(u32, u32), f64>,
}

impl PolynomialSymbol {
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32), f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((a, b), c) in terms {
            if a + b > DEGREE_CAP {
                return Err(Error::DegreeCap { degree: a + b, cap: DEGREE_CAP });
            }
            if c != 0.0 {
                *map.entry((a, b)).or_insert(0.0) += c;
            }
        }
        Ok(PolynomialSymbol { terms: map })
    }

    pub fn constant(c: f64) -> Self {
        PolynomialSymbol::new([((0, 0), c)]).expect("degree 0")
    }

    pub fn monomial(alpha: u32, beta: u32, c: f64) -> Result<Self> {
        PolynomialSymbol::new([((alpha, beta), c)])
    }

    pub fn add(&self, other: &PolynomialSymbol) -> PolynomialSymbol {
        let mut map = self.terms.clone();
        for (&k, &c) in &other.terms {
            *map.entry(k).or_insert(0.0) += c;
        }
        PolynomialSymbol { terms: map }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &f64)> {
        self.terms.iter()
    }
}

/// All distinct orderings of `n_u` position factors and `n_v` momentum
/// factors, as bit sequences (false = u, true = v).
fn orderings(n_u: u32, n_v: u32) -> Vec<Vec<bool>> {
    fn rec(u_left: u32, v_left: u32, prefix: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if u_left == 0 && v_left == 0 {
            out.push(prefix.clone());
            return;
        }
        if u_left > 0 {
            prefix.push(false);
            rec(u_left - 1, v_left, prefix, out);
            prefix.pop();
        }
        if v_left > 0 {
            prefix.push(true);
            rec(u_left, v_left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n_u, n_v, &mut Vec::new(), &mut out);
    out
}

/// Weyl (fully symmetrized) quantization of a polynomial symbol on the
/// truncated oscillator: each monomial u^a v^b becomes the average of all
/// (a+b)!/(a!b!) orderings of a position factors and b momentum factors.
pub fn weyl_quantize(p: &PolynomialSymbol, osc: &OscillatorAlgebra) -> Result<HermitianOperator> {
    let degree = p.total_degree();
    if degree > DEGREE_CAP {
        return Err(Error::DegreeCap { degree, cap: DEGREE_CAP });
    }
    if osc.trunc <= degree as usize {
        return Err(Error::TruncationTooSmall { trunc: osc.trunc, degree });
    }
    let u = osc.position();
    let v = osc.momentum();
    let dim = osc.trunc;

    let mut acc = CMat::zeros(dim, dim);
    for (&(a, b), &coeff) in p.terms() {
        if a == 0 && b == 0 {
            for i in 0..dim {
                acc.add_assign_at(i, i, Complex64::new(coeff, 0.0));
            }
            continue;
        }
        let ords = orderings(a, b);
        let weight = coeff / ords.len() as f64;
        for ord in &ords {
            let mut prod: Option<CMat> = None;
            for &is_v in ord {
                let factor = if is_v { v.matrix() } else { u.matrix() };
                prod = Some(match prod {
                    None => factor.clone(),
                    Some(m) => m.mul(factor),
                });
            }
            let term = prod.unwrap().scale(Complex64::new(weight, 0.0));
            acc = acc.add(&term);
        }
    }
    Ok(HermitianOperator::new(acc, osc.param))
}

/// One conserved-excitation block of the spin-oscillator pair.
///
/// At total excitation T the joint basis is {(j, m = T-j) : 0 <= j <=
/// min(n, T)}; the first operator is the scalar `hbar (T + (1-n)/2)` there
/// and the second acts as a zero-diagonal tridiagonal coupling.
#[derive(Clone, Debug)]
pub struct JCBlock {
    pub t: usize,
    pub f1_value: f64,
    pub f2_block: CMat,
}

impl JCBlock {
    pub fn dim(&self) -> usize {
        self.f2_block.rows()
    }

    /// Eigenvalues of the block coupling, ascending.
    pub fn f2_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(crate::cmat::eigh(&self.f2_block)?.0)
    }
}

/// Exact block decomposition of the spin-oscillator pair for spin size n
/// (hbar fixed by 2 = hbar (n+1)) and total excitation up to `t_max`.
///
/// The coupling from (j, m) to (j+1, m-1) is
/// `(hbar/2) sqrt(hbar/2) sqrt((j+1)(n-j)) sqrt(m)`; both conserved-charge
/// bookkeeping and the matrix elements are exact, so the blocks carry no
/// truncation error at any T.
pub fn build_jaynes_cummings(n: usize, t_max: usize) -> Vec<JCBlock> {
    let hbar = 2.0 / (n as f64 + 1.0);
    let amp = 0.5 * hbar * (hbar / 2.0).sqrt();
    let mut blocks = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let dim = t.min(n) + 1;
        let f1_value = hbar * (t as f64 + (1.0 - n as f64) / 2.0);
        let mut f2 = CMat::zeros(dim, dim);
        for j in 0..dim - 1 {
            let m = (t - j) as f64;
            let w = ((j + 1) as f64 * (n - j) as f64).sqrt();
            let c = amp * w * m.sqrt();
            f2.set(j + 1, j, Complex64::new(c, 0.0));
            f2.set(j, j + 1, Complex64::new(c, 0.0));
        }
        blocks.push(JCBlock { t, f1_value, f2_block: f2 });
    }
    blocks
}

/// Joint spectrum read directly off the exact blocks: one point
/// `(f1_value, lambda)` per block eigenvalue.
///
/// ```
/// let js = jointspec::quantize::jc_block_spectrum(1, 1).unwrap();
/// let pts = js.points();
/// assert_eq!(pts.len(), 3);
/// assert_eq!(pts[0].coords, vec![0.0, 0.0]);
/// assert!((pts[2].coords[1] - 0.5 * 0.5f64.sqrt()).abs() < 1e-15);
/// ```
pub fn jc_block_spectrum(n: usize, t_max: usize) -> Result<JointSpectrum> {
    let param = SemiclassicalParam::from_spin_n(n);
    let mut points = Vec::new();
    for block in build_jaynes_cummings(n, t_max) {
        for lambda in block.f2_eigenvalues()? {
            points.push(JointPoint { coords: vec![block.f1_value, lambda], multiplicity: 1 });
        }
    }
    points.sort_by(|a, b| a.coords.partial_cmp(&b.coords).unwrap());
    Ok(JointSpectrum::new(param, points, 0.0))
}

/// A family of pairwise-commuting operators together with the classical
/// system whose moment map provides their principal symbols.
#[derive(Clone, Debug)]
pub struct CommutingFamily {
    ops: Vec<HermitianOperator>,
    classical: ClassicalSystem,
    commute_tol: f64,
    max_comm: f64,
}

impl CommutingFamily {
    /// Validates shape, shared parameters and pairwise commutation against
    /// `commute_tol` before accepting the family.
    pub fn new(
        ops: Vec<HermitianOperator>,
        classical: ClassicalSystem,
        commute_tol: f64,
    ) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidArgument("family needs at least one operator".into()));
        }
        let dim = ops[0].dim();
        let param = ops[0].param();
        for op in &ops[1..] {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: op.dim() });
            }
            if op.param() != param {
                return Err(Error::ParamMismatch {
                    left_hbar: param.hbar(),
                    right_hbar: op.param().hbar(),
                });
            }
        }
        let mut max_comm = 0.0f64;
        for i in 0..ops.len() {
            for j in i + 1..ops.len() {
                let nrm = commutator_norm(&ops[i], &ops[j])?;
                if nrm > commute_tol {
                    return Err(Error::NonCommutingInput { residual: nrm, tol: commute_tol });
                }
                max_comm = max_comm.max(nrm);
            }
        }
        Ok(CommutingFamily { ops, classical, commute_tol, max_comm })
    }

    #[inline]
    pub fn ops(&self) -> &[HermitianOperator] {
        &self.ops
    }

    #[inline]
    pub fn classical(&self) -> &ClassicalSystem {
        &self.classical
    }

    #[inline]
    pub fn commute_tol(&self) -> f64 {
        self.commute_tol
    }

    /// Largest pairwise commutator norm actually measured at construction.
    /// `commute_tol` may deliberately overstate this (e.g. a truncation
    /// leakage bound), so cluster-width checks use the measured value.
    #[inline]
    pub fn max_commutator_norm(&self) -> f64 {
        self.max_comm
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.ops.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    #[inline]
    pub fn param(&self) -> SemiclassicalParam {
        self.ops[0].param()
    }
}

/// Full tensor-product build of the spin-oscillator pair on the truncated
/// oscillator, retained to cross-validate the block path.
///
/// The first operator is `Id (x) hbar(N + 1/2) + z (x) Id`, the second
/// couples each spin raise to an oscillator lower. In the raising
/// convention of [`spin_triple`] that second operator reads
/// `(x (x) u - y (x) v)/2`: the spin factor must carry the orientation
/// opposite to y for the pair to conserve total excitation and commute.
/// Truncation only removes whole couplings at the top oscillator state, so
/// the commutator carries no truncation term at all -- what remains is
/// rounding noise at the 1e-16 level -- and the retained blocks are exact.
pub fn jc_full_family(n: usize, osc_trunc: usize) -> Result<CommutingFamily> {
    assert!(osc_trunc >= 1, "oscillator truncation must be at least 1");
    let hbar = 2.0 / (n as f64 + 1.0);
    let spin = spin_triple(n, hbar);
    let osc = oscillator(osc_trunc, hbar);
    let param = spin.x_hat.param();

    let id_spin = HermitianOperator::identity(n + 1, param);
    let id_osc = HermitianOperator::identity(osc_trunc, param);

    let f1 = tensor(&id_spin, &osc.hamiltonian())?.add(&tensor(&spin.z_hat, &id_osc)?)?;
    let y_flipped = spin.y_hat.scale(-1.0);
    let f2 = tensor(&spin.x_hat, &osc.position())?
        .add(&tensor(&y_flipped, &osc.momentum())?)?
        .scale(0.5);

    // Worst dropped coupling: the (j, m = trunc-1) -> (j+1, m = trunc)
    // element that truncation removes.
    let max_w = (0..n)
        .map(|j| ((j + 1) as f64 * (n - j) as f64).sqrt())
        .fold(0.0f64, f64::max);
    let leakage = 0.5 * hbar * (hbar / 2.0).sqrt() * max_w * (osc_trunc as f64).sqrt();

    CommutingFamily::new(vec![f1, f2], ClassicalSystem::jaynes_cummings(3.0), leakage)
}

/// Block-diagonal assembly of the exact blocks into a commuting pair,
/// useful as a finite stand-in family for the spin-oscillator model.
pub fn jc_blockdiag_family(n: usize, t_max: usize) -> Result<CommutingFamily> {
    let blocks = build_jaynes_cummings(n, t_max);
    let dim: usize = blocks.iter().map(|b| b.dim()).sum();
    let param = SemiclassicalParam::from_spin_n(n);
    let mut f1 = CMat::zeros(dim, dim);
    let mut f2 = CMat::zeros(dim, dim);
    let mut off = 0;
    for block in &blocks {
        let d = block.dim();
        for i in 0..d {
            f1.set(off + i, off + i, Complex64::new(block.f1_value, 0.0));
            for j in 0..d {
                f2.set(off + i, off + j, block.f2_block.get(i, j));
            }
        }
        off += d;
    }
    CommutingFamily::new(
        vec![HermitianOperator::new(f1, param), HermitianOperator::new(f2, param)],
        ClassicalSystem::jaynes_cummings(3.0),
        0.0,
    )
}

/// Coordinate functions on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereSymbol {
    X,
    Y,
    Z,
}

impl SphereSymbol {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "x" => Ok(SphereSymbol::X),
            "y" => Ok(SphereSymbol::Y),
            "z" => Ok(SphereSymbol::Z),
            other => Err(Error::UnknownModel(other.to_string())),
        }
    }
}

/// Berezin-Toeplitz operator of a sphere coordinate at level k, from the
/// closed-form matrix elements in the monomial section basis:
///
/// * z: diagonal, entries `(k - 2j)/(k + 2)` for j = 0..k;
/// * x: tridiagonal, off-diagonal `sqrt((j+1)(k-j))/(k + 2)`;
/// * y: same moduli as x with the phases `-i` below / `+i` above.
///
/// The area normalization makes the classical spectrum of z equal [-1, 1];
/// the resulting level spacing `2/(k+2)` is left for the inverse pipeline
/// to estimate from data rather than being assumed anywhere.
pub fn toeplitz_s2(symbol: SphereSymbol, k: u64) -> HermitianOperator {
    assert!(k >= 1, "k must be a positive integer");
    let param = SemiclassicalParam::from_k(k);
    let dim = (k + 1) as usize;
    let denom = (k + 2) as f64;
    let mut m = CMat::zeros(dim, dim);
    match symbol {
        SphereSymbol::Z => {
            for j in 0..dim {
                let num = k as i64 - 2 * j as i64;
                m.set(j, j, Complex64::new(num as f64 / denom, 0.0));
            }
        }
        SphereSymbol::X => {
            for j in 0..dim - 1 {
                let w = ((j + 1) as f64 * (k as usize - j) as f64).sqrt() / denom;
                m.set(j + 1, j, Complex64::new(w, 0.0));
                m.set(j, j + 1, Complex64::new(w, 0.0));
            }
        }
        SphereSymbol::Y => {
            for j in 0..dim - 1 {
                let w = ((j + 1) as f64 * (k as usize - j) as f64).sqrt() / denom;
                m.set(j + 1, j, Complex64::new(0.0, -w));
                m.set(j, j + 1, Complex64::new(0.0, w));
            }
        }
    }
    HermitianOperator::new(m, param)
}

/// Real polynomial in the ambient sphere coordinates (x, y, z).
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePolynomial {
    terms: BTreeMap<(u32, u32, u32), f64>,
}

impl SpherePolynomial {
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32, u32), f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((a, b, c), coeff) in terms {
            if a + b + c > DEGREE_CAP {
                return Err(Error::DegreeCap { degree: a + b + c, cap: DEGREE_CAP });
            }
            if coeff != 0.0 {
                *map.entry((a, b, c)).or_insert(0.0) += coeff;
            }
        }
        Ok(SpherePolynomial { terms: map })
    }

    pub fn constant(c: f64) -> Self {
        SpherePolynomial::new([((0, 0, 0), c)]).expect("degree 0")
    }

    pub fn zero() -> Self {
        SpherePolynomial { terms: BTreeMap::new() }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b, c)| a + b + c).max().unwrap_or(0)
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Berezin-Toeplitz operator of an arbitrary low-degree polynomial in
/// (x, y, z) at level k, from the same closed-form monomial integrals.
///
/// In the affine chart w, a monomial x^a y^b z^c expands into terms
/// w^p wbar^q t^r / (1+t)^s with t = |w|^2 and s = a+b+c; each term
/// contributes `B(j+p+r+1, k+s+1-j-p-r)` between monomial sections j and
/// i = j + p - q, normalized by the section norms `B(j+1, k+1-j)`.
pub fn toeplitz_sphere_poly(poly: &SpherePolynomial, k: u64) -> HermitianOperator {
    assert!(k >= 1, "k must be a positive integer");
    let param = SemiclassicalParam::from_k(k);
    let dim = (k + 1) as usize;
    let s_max = poly.degree() as usize;
    let lnf = ln_factorials(dim + s_max + 2);
    let kf = k as i64;

    // ln of the section norm squared, up to the common pi/(k+1)! factor
    // which cancels in the normalized elements.
    let ln_norm_sq =
        |j: usize| lnf[j] + lnf[(kf as usize) - j] - lnf[kf as usize + 1];

    let mut m = CMat::zeros(dim, dim);
    for (&(a, b, c), &coeff) in &poly.terms {
        let s = (a + b + c) as i64;
        let ib_phase = match b % 4 {
            0 => ONE,
            1 => -I,
            2 => -ONE,
            _ => I,
        };
        for i1 in 0..=a {
            for i2 in 0..=b {
                for i3 in 0..=c {
                    let sign = if ((b - i2) + i3) % 2 == 0 { 1.0 } else { -1.0 };
                    let cmb = binomial(a, i1) * binomial(b, i2) * binomial(c, i3);
                    let z_coeff = ib_phase * (coeff * sign * cmb);
                    let p = (i1 + i2) as i64;
                    let q = ((a - i1) + (b - i2)) as i64;
                    let r = i3 as i64;
                    for j in 0..dim as i64 {
                        let i_row = j + p - q;
                        if i_row < 0 || i_row >= dim as i64 {
                            continue;
                        }
                        let top = j + p + r;
                        if top > kf + s {
                            continue;
                        }
                        // B(top+1, k+s+1-top) over (k+s+1)! matching the
                        // norm normalization below.
                        let ln_num = lnf[top as usize] + lnf[(kf + s - top) as usize]
                            - lnf[(kf + s + 1) as usize];
                        let ln_den =
                            0.5 * (ln_norm_sq(i_row as usize) + ln_norm_sq(j as usize));
                        let val = (ln_num - ln_den).exp();
                        m.add_assign_at(i_row as usize, j as usize, z_coeff * val);
                    }
                }
            }
        }
    }
    HermitianOperator::new(m, param)
}

/// `T_{f0} + k^{-1} T_{f1}` with f0 a sphere coordinate and f1 a
/// polynomial correction of degree at most 2; the principal symbol is
/// unchanged by the correction.
pub fn toeplitz_subprincipal(
    symbol: SphereSymbol,
    k: u64,
    correction: &SpherePolynomial,
) -> Result<HermitianOperator> {
    if correction.degree() > 2 {
        return Err(Error::DegreeCap { degree: correction.degree(), cap: 2 });
    }
    let t0 = toeplitz_s2(symbol, k);
    if correction.terms.is_empty() {
        return Ok(t0);
    }
    let t1 = toeplitz_sphere_poly(correction, k);
    t0.add(&t1.scale(1.0 / k as f64))
}

/// Toric catalog entry: which product of spheres, at which level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToricModelName {
    S2,
    S2xS2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToricModel {
    pub name: ToricModelName,
    pub k: u64,
}

impl ToricModel {
    pub fn new(name: ToricModelName, k: u64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidArgument("k must be a positive integer".into()));
        }
        Ok(ToricModel { name, k })
    }

    pub fn parse(name: &str, k: u64) -> Result<Self> {
        let name = match name.to_ascii_lowercase().as_str() {
            "s2" => ToricModelName::S2,
            "s2xs2" => ToricModelName::S2xS2,
            other => return Err(Error::UnknownModel(other.to_string())),
        };
        ToricModel::new(name, k)
    }

    /// Number of moment-map components.
    pub fn moment_dim(&self) -> usize {
        match self.name {
            ToricModelName::S2 => 1,
            ToricModelName::S2xS2 => 2,
        }
    }
}

/// Joint spectrum of a toric model read directly off the closed-form
/// diagonals, without materializing Kronecker matrices. Bitwise-identical
/// to running the simultaneous diagonalization on [`toric_family`]
/// (cross-checked in tests) and usable at levels where the dense product
/// operators would not fit in memory.
pub fn toric_joint_spectrum(model: &ToricModel) -> JointSpectrum {
    let k = model.k;
    let param = SemiclassicalParam::from_k(k);
    let denom = (k + 2) as f64;
    let diag: Vec<f64> = (0..=k as usize)
        .map(|j| (k as i64 - 2 * j as i64) as f64 / denom)
        .collect();
    let mut points = Vec::new();
    match model.name {
        ToricModelName::S2 => {
            for &z in &diag {
                points.push(JointPoint { coords: vec![z], multiplicity: 1 });
            }
        }
        ToricModelName::S2xS2 => {
            for &z1 in &diag {
                for &z2 in &diag {
                    points.push(JointPoint { coords: vec![z1, z2], multiplicity: 1 });
                }
            }
        }
    }
    let mut js = JointSpectrum::new(param, points, 0.0);
    js.sort_points();
    js
}

/// The commuting Berezin-Toeplitz family of a toric model: height
/// operators on each sphere factor, exactly commuting diagonals.
pub fn toric_family(model: &ToricModel) -> Result<CommutingFamily> {
    let tz = toeplitz_s2(SphereSymbol::Z, model.k);
    match model.name {
        ToricModelName::S2 => {
            CommutingFamily::new(vec![tz], ClassicalSystem::S2, 0.0)
        }
        ToricModelName::S2xS2 => {
            let id = HermitianOperator::identity(tz.dim(), tz.param());
            let t1 = tensor(&tz, &id)?;
            let t2 = tensor(&id, &tz)?;
            CommutingFamily::new(vec![t1, t2], ClassicalSystem::S2xS2, 0.0)
        }
    }
}
