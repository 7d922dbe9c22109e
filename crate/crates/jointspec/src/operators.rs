//! Self-adjoint matrix building blocks.
//!
//! Spin operators are realized on the total-occupation-n subspace of a
//! two-mode Fock space, which is exactly (n+1)-dimensional; the harmonic
//! oscillator is truncated in its number eigenbasis, where the ladder
//! matrices are sparse and the Hamiltonian is exactly diagonal. All
//! operators are symmetrized to exact Hermiticity when constructed.

use num_complex::Complex64;

use crate::cmat::{CMat, I};
use crate::{Error, Result};

/// Semiclassical scale of an operator.
///
/// `k` is present when the model requires `hbar = 1/k` with integer `k`
/// (the toric case); `hbar` is then derived from `k`, never stored
/// independently, so the pair cannot drift apart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiclassicalParam {
    hbar: f64,
    k: Option<u64>,
}

impl SemiclassicalParam {
    /// Plain semiclassical parameter without an integer level.
    pub fn from_hbar(hbar: f64) -> Self {
        assert!(hbar > 0.0, "hbar must be positive");
        SemiclassicalParam { hbar, k: None }
    }

    /// Integer level `k`, with `hbar = 1/k` derived from it.
    pub fn from_k(k: u64) -> Self {
        assert!(k >= 1, "k must be a positive integer");
        SemiclassicalParam { hbar: 1.0 / k as f64, k: Some(k) }
    }

    /// The spin convention `2 = hbar (n + 1)` for an (n+1)-dimensional
    /// spin space.
    pub fn from_spin_n(n: usize) -> Self {
        SemiclassicalParam { hbar: 2.0 / (n as f64 + 1.0), k: None }
    }

    #[inline]
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    #[inline]
    pub fn k(&self) -> Option<u64> {
        self.k
    }
}

/// Dense self-adjoint matrix tagged with its semiclassical parameter.
///
/// The stored matrix is `(A + A^H)/2` of whatever was supplied, so
/// Hermiticity holds exactly (entry by entry) rather than approximately.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMat,
    param: SemiclassicalParam,
}

impl HermitianOperator {
    pub fn new(matrix: CMat, param: SemiclassicalParam) -> Self {
        assert_eq!(matrix.rows(), matrix.cols(), "operator matrix must be square");
        HermitianOperator { matrix: matrix.hermitize(), param }
    }

    pub fn identity(dim: usize, param: SemiclassicalParam) -> Self {
        HermitianOperator { matrix: CMat::identity(dim), param }
    }

    pub fn zero(dim: usize, param: SemiclassicalParam) -> Self {
        HermitianOperator { matrix: CMat::zeros(dim, dim), param }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    #[inline]
    pub fn param(&self) -> SemiclassicalParam {
        self.param
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        check_params(self, other)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(HermitianOperator { matrix: self.matrix.add(&other.matrix), param: self.param })
    }

    /// Real scalar multiple (preserves Hermiticity exactly).
    pub fn scale(&self, s: f64) -> HermitianOperator {
        HermitianOperator {
            matrix: self.matrix.scale(Complex64::new(s, 0.0)),
            param: self.param,
        }
    }

    /// Shift by a real multiple of the identity.
    pub fn shift(&self, s: f64) -> HermitianOperator {
        let mut m = self.matrix.clone();
        for i in 0..m.rows() {
            let d = m.get(i, i);
            m.set(i, i, d + Complex64::new(s, 0.0));
        }
        HermitianOperator { matrix: m, param: self.param }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(crate::cmat::eigh(&self.matrix)?.0)
    }
}

fn check_params(a: &HermitianOperator, b: &HermitianOperator) -> Result<()> {
    if a.param != b.param {
        return Err(Error::ParamMismatch {
            left_hbar: a.param.hbar(),
            right_hbar: b.param.hbar(),
        });
    }
    Ok(())
}

/// The three spin operators on the (n+1)-dimensional representation.
///
/// Basis vectors are indexed by j = 0..n with `z_hat` diagonal, entries
/// `hbar (j - n/2)` ascending. The raising combination `x_hat + i y_hat`
/// moves j -> j+1 with matrix element `hbar sqrt((j+1)(n-j))`, which fixes
/// the commutators to `[x, y] = i hbar z` and cyclic. The number-operator
/// difference behind `z_hat` makes the result independent of whether the
/// two mode bilinears are taken in normal or anti-normal order: the
/// constant shifts cancel.
#[derive(Clone, Debug)]
pub struct SpinTriple {
    pub x_hat: HermitianOperator,
    pub y_hat: HermitianOperator,
    pub z_hat: HermitianOperator,
    pub n: usize,
}

/// Build the spin triple for total occupation `n` at scale `hbar`.
pub fn spin_triple(n: usize, hbar: f64) -> SpinTriple {
    assert!(hbar > 0.0, "hbar must be positive");
    let param = SemiclassicalParam::from_hbar(hbar);
    let dim = n + 1;

    let mut x = CMat::zeros(dim, dim);
    let mut y = CMat::zeros(dim, dim);
    let mut z = CMat::zeros(dim, dim);
    for j in 0..dim {
        z.set(j, j, Complex64::new(hbar * (j as f64 - n as f64 / 2.0), 0.0));
    }
    for j in 0..n {
        // x + i y raises j with element hbar * w_j.
        let w = ((j + 1) as f64 * (n - j) as f64).sqrt();
        let half = 0.5 * hbar * w;
        x.set(j + 1, j, Complex64::new(half, 0.0));
        x.set(j, j + 1, Complex64::new(half, 0.0));
        y.set(j + 1, j, Complex64::new(0.0, -half));
        y.set(j, j + 1, Complex64::new(0.0, half));
    }

    SpinTriple {
        x_hat: HermitianOperator::new(x, param),
        y_hat: HermitianOperator::new(y, param),
        z_hat: HermitianOperator::new(z, param),
        n,
    }
}

/// Truncated oscillator ladder algebra in the number basis.
#[derive(Clone, Debug)]
pub struct OscillatorAlgebra {
    pub trunc: usize,
    pub lower: CMat,
    pub raise: CMat,
    pub number: CMat,
    pub param: SemiclassicalParam,
}

/// Ladder matrices on the first `trunc` number states. The number
/// operator is written down as the exact integer diagonal rather than as
/// the product `raise * lower`, whose sqrt(m)^2 entries would be off by an
/// ulp; the two agree to rounding (see tests) but the diagonal form keeps
/// downstream conserved-quantity bookkeeping exact.
pub fn oscillator(trunc: usize, hbar: f64) -> OscillatorAlgebra {
    assert!(trunc >= 1, "truncation must be at least 1");
    let param = SemiclassicalParam::from_hbar(hbar);
    let mut lower = CMat::zeros(trunc, trunc);
    for m in 1..trunc {
        lower.set(m - 1, m, Complex64::new((m as f64).sqrt(), 0.0));
    }
    let raise = lower.adjoint();
    let number = CMat::diag(&(0..trunc).map(|m| m as f64).collect::<Vec<_>>());
    OscillatorAlgebra { trunc, lower, raise, number, param }
}

impl OscillatorAlgebra {
    /// Position operator `u = sqrt(hbar/2) (lower + raise)`.
    pub fn position(&self) -> HermitianOperator {
        let s = (self.param.hbar() / 2.0).sqrt();
        let m = self.lower.add(&self.raise).scale(Complex64::new(s, 0.0));
        HermitianOperator::new(m, self.param)
    }

    /// Momentum operator `v = -i sqrt(hbar/2) (lower - raise)`.
    pub fn momentum(&self) -> HermitianOperator {
        let s = (self.param.hbar() / 2.0).sqrt();
        let m = self.lower.sub(&self.raise).scale(-I * s);
        HermitianOperator::new(m, self.param)
    }

    /// Harmonic Hamiltonian `hbar (number + 1/2)`, exactly diagonal here.
    pub fn hamiltonian(&self) -> HermitianOperator {
        let hbar = self.param.hbar();
        let mut m = self.number.scale(Complex64::new(hbar, 0.0));
        for i in 0..self.trunc {
            let d = m.get(i, i);
            m.set(i, i, d + Complex64::new(hbar / 2.0, 0.0));
        }
        HermitianOperator::new(m, self.param)
    }
}

/// Kronecker product of two operators with a shared semiclassical
/// parameter. Index layout: row `(i_a, i_b) -> i_a * b.dim + i_b`.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    check_params(a, b)?;
    Ok(HermitianOperator {
        matrix: a.matrix().kron(b.matrix()),
        param: a.param(),
    })
}

/// Max-entry magnitude of the commutator `ab - ba`.
///
/// Exactly diagonal pairs commute identically; that case is answered
/// without forming the (possibly very large) products.
pub fn commutator_norm(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    if a.matrix().is_diagonal() && b.matrix().is_diagonal() {
        return Ok(0.0);
    }
    let ab = a.matrix().mul(b.matrix());
    let ba = b.matrix().mul(a.matrix());
    Ok(ab.sub(&ba).max_abs())
}

/// Commutator matrix `ab - ba` (anti-Hermitian for Hermitian inputs).
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<CMat> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(a.matrix().mul(b.matrix()).sub(&b.matrix().mul(a.matrix())))
}

/// `x^2 + y^2 + z^2` for a spin triple; equals `hbar^2 n(n+2)/4 I`.
pub fn casimir(spin: &SpinTriple) -> CMat {
    let xx = spin.x_hat.matrix().mul(spin.x_hat.matrix());
    let yy = spin.y_hat.matrix().mul(spin.y_hat.matrix());
    let zz = spin.z_hat.matrix().mul(spin.z_hat.matrix());
    xx.add(&yy).add(&zz)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spin_n0_is_zero() {
        let s = spin_triple(0, 2.0);
        assert_eq!(s.x_hat.dim(), 1);
        assert_eq!(s.x_hat.matrix().max_abs(), 0.0);
        assert_eq!(s.y_hat.matrix().max_abs(), 0.0);
        assert_eq!(s.z_hat.matrix().max_abs(), 0.0);
    }

    #[test]
    fn spin_n1_entries() {
        let s = spin_triple(1, 1.0);
        assert_eq!(s.z_hat.matrix().get(0, 0), c(-0.5, 0.0));
        assert_eq!(s.z_hat.matrix().get(1, 1), c(0.5, 0.0));
        assert_eq!(s.x_hat.matrix().get(0, 1), c(0.5, 0.0));
        assert_eq!(s.x_hat.matrix().get(1, 0), c(0.5, 0.0));
    }

    #[test]
    fn spin_n2_casimir_against_explicit_matrices() {
        // Independent oracle: the three 3x3 matrices written out by hand
        // from the ladder elements hbar*sqrt((j+1)(n-j)) at hbar = 2/3,
        // then squared and summed with plain arithmetic.
        let h = 2.0 / 3.0;
        let r2 = (2.0f64).sqrt();
        let x = [
            [0.0, h / 2.0 * r2, 0.0],
            [h / 2.0 * r2, 0.0, h / 2.0 * r2],
            [0.0, h / 2.0 * r2, 0.0],
        ];
        let z = [-h, 0.0, h];
        // x^2 + y^2 + z^2 where y has the same moduli as x off-diagonal:
        // (x^2 + y^2)[i][i] = 2 * sum_j |x[i][j]|^2, off-diagonal terms of
        // x^2 and y^2 cancel for tridiagonal x, y with y = -i*sign pattern.
        let mut casimir_diag = [0.0f64; 3];
        for i in 0..3 {
            let mut s = 0.0;
            for v in x[i] {
                s += v * v;
            }
            casimir_diag[i] = 2.0 * s + z[i] * z[i];
        }
        for &d in &casimir_diag {
            assert!((d - 8.0 / 9.0).abs() < 1e-15, "oracle diag {}", d);
        }

        let s = spin_triple(2, h);
        let cas = casimir(&s);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { c(8.0 / 9.0, 0.0) } else { c(0.0, 0.0) };
                assert!((cas.get(i, j) - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn commutation_relations_up_to_n30() {
        for n in 0..=30 {
            for &hbar in &[2.0 / (n as f64 + 1.0), 1.0, 0.1] {
                let s = spin_triple(n, hbar);
                let pairs = [
                    (&s.x_hat, &s.y_hat, &s.z_hat),
                    (&s.y_hat, &s.z_hat, &s.x_hat),
                    (&s.z_hat, &s.x_hat, &s.y_hat),
                ];
                for (a, b, c_op) in pairs {
                    let comm = commutator(a, b).unwrap();
                    let expect = c_op.matrix().scale(I * hbar);
                    assert!(
                        comm.sub(&expect).max_abs() <= 1e-12,
                        "n={} hbar={}",
                        n,
                        hbar
                    );
                }
            }
        }
    }

    #[test]
    fn casimir_up_to_n30() {
        for n in 0..=30 {
            for &hbar in &[2.0 / (n as f64 + 1.0), 1.0, 0.1] {
                let s = spin_triple(n, hbar);
                let cas = casimir(&s);
                let scalar = hbar * hbar * (n as f64) * (n as f64 + 2.0) / 4.0;
                let expect = CMat::identity(n + 1).scale(c(scalar, 0.0));
                assert!(cas.sub(&expect).max_abs() <= 1e-10, "n={} hbar={}", n, hbar);
            }
        }
    }

    #[test]
    fn casimir_scalar_monotone_to_unit_sphere() {
        // With 2 = hbar (n+1) the Casimir scalar is n(n+2)/(n+1)^2 and
        // climbs monotonically towards 1.
        let mut prev = -1.0f64;
        for n in 0..=50 {
            let hbar = 2.0 / (n as f64 + 1.0);
            let s = spin_triple(n, hbar);
            let scalar = casimir(&s).get(0, 0).re;
            assert!(scalar > prev, "not monotone at n={}", n);
            prev = scalar;
        }
        let target = 1.0 - 1.0 / (51.0f64 * 51.0);
        assert!((prev - target).abs() < 1e-3);
    }

    #[test]
    fn spin_x_isospectral_to_z() {
        // Rotating the sphere maps z to x, so x_hat must carry exactly the
        // eigenvalues hbar (j - n/2) that z_hat wears on its diagonal.
        // Also a solid exercise for the dense eigensolver on tridiagonal
        // input of nontrivial size.
        for &(n, hbar) in &[(5usize, 1.0), (17, 0.3), (40, 2.0 / 41.0)] {
            let s = spin_triple(n, hbar);
            let eig = s.x_hat.eigenvalues().unwrap();
            for (j, lambda) in eig.iter().enumerate() {
                let expect = hbar * (j as f64 - n as f64 / 2.0);
                assert!(
                    (lambda - expect).abs() <= 1e-12,
                    "n={} j={} got {} want {}",
                    n,
                    j,
                    lambda,
                    expect
                );
            }
        }
    }

    #[test]
    fn oscillator_single_state() {
        let osc = oscillator(1, 1.0);
        assert_eq!(osc.lower.max_abs(), 0.0);
        assert_eq!(osc.position().matrix().max_abs(), 0.0);
    }

    #[test]
    fn oscillator_number_diagonal() {
        let osc = oscillator(3, 1.0);
        for m in 0..3 {
            assert_eq!(osc.number.get(m, m), c(m as f64, 0.0));
        }
        assert_eq!(osc.number.max_abs_offdiag(), 0.0);
        // Agrees with raise * lower to rounding on every retained state.
        let product = osc.raise.mul(&osc.lower);
        assert!(product.sub(&osc.number).max_abs() <= 1e-14);
    }

    #[test]
    fn oscillator_position_element() {
        let osc = oscillator(4, 0.5);
        assert_eq!(osc.position().matrix().get(0, 1), c(0.5, 0.0));
    }

    #[test]
    fn oscillator_ladder_commutator_is_identity_below_truncation() {
        let osc = oscillator(6, 1.0);
        let comm = osc.lower.mul(&osc.raise).sub(&osc.raise.mul(&osc.lower));
        for m in 0..5 {
            for l in 0..5 {
                let expect = if m == l { c(1.0, 0.0) } else { c(0.0, 0.0) };
                assert!((comm.get(m, l) - expect).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn oscillator_exact_hermiticity_and_canonical_commutator() {
        for trunc in [2usize, 5, 9] {
            for &hbar in &[1.0, 0.25] {
                let osc = oscillator(trunc, hbar);
                let u = osc.position();
                let v = osc.momentum();
                for i in 0..trunc {
                    for j in 0..trunc {
                        assert_eq!(u.matrix().get(i, j), u.matrix().get(j, i).conj());
                        assert_eq!(v.matrix().get(i, j), v.matrix().get(j, i).conj());
                    }
                }
                let comm = commutator(&u, &v).unwrap();
                for i in 0..trunc - 1 {
                    for j in 0..trunc - 1 {
                        let expect = if i == j { I * hbar } else { c(0.0, 0.0) };
                        assert!((comm.get(i, j) - expect).norm() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_identities() {
        let p = SemiclassicalParam::from_hbar(1.0);
        let i2 = HermitianOperator::identity(2, p);
        let i3 = HermitianOperator::identity(3, p);
        let t = tensor(&i2, &i3).unwrap();
        assert_eq!(t.matrix(), &CMat::identity(6));

        let a = HermitianOperator::new(CMat::diag(&[1.0, -1.0]), p);
        let b = HermitianOperator::new(CMat::diag(&[2.0, 3.0]), p);
        let ab = tensor(&a, &b).unwrap();
        assert_eq!(ab.matrix(), &CMat::diag(&[2.0, 3.0, -2.0, -3.0]));
    }

    #[test]
    fn tensor_spin_z_with_identity() {
        let s = spin_triple(1, 1.0);
        let id = HermitianOperator::identity(2, s.z_hat.param());
        let t = tensor(&s.z_hat, &id).unwrap();
        assert_eq!(t.matrix(), &CMat::diag(&[-0.5, -0.5, 0.5, 0.5]));
    }

    #[test]
    fn tensor_param_mismatch() {
        let a = HermitianOperator::identity(2, SemiclassicalParam::from_hbar(1.0));
        let b = HermitianOperator::identity(2, SemiclassicalParam::from_hbar(0.5));
        assert!(matches!(tensor(&a, &b), Err(Error::ParamMismatch { .. })));
    }

    #[test]
    fn tensor_associative_on_diagonals() {
        let p = SemiclassicalParam::from_hbar(1.0);
        let a = HermitianOperator::new(CMat::diag(&[1.0, 2.0]), p);
        let b = HermitianOperator::new(CMat::diag(&[-1.0, 3.0, 0.5]), p);
        let d = HermitianOperator::new(CMat::diag(&[4.0, 0.25]), p);
        let left = tensor(&tensor(&a, &b).unwrap(), &d).unwrap();
        let right = tensor(&a, &tensor(&b, &d).unwrap()).unwrap();
        assert_eq!(left.matrix(), right.matrix());
    }

    #[test]
    fn commutator_norm_cases() {
        let p = SemiclassicalParam::from_hbar(1.0);
        let id = HermitianOperator::identity(3, p);
        let a = HermitianOperator::new(
            CMat::from_fn(3, 3, |i, j| c((i + j) as f64, 0.0)),
            p,
        );
        assert_eq!(commutator_norm(&id, &a).unwrap(), 0.0);

        let s = spin_triple(1, 1.0);
        // [x, y] = i hbar z, whose max entry is 1/2.
        let nrm = commutator_norm(&s.x_hat, &s.y_hat).unwrap();
        assert!((nrm - 0.5).abs() < 1e-15);

        let d1 = HermitianOperator::new(CMat::diag(&[1.0, 2.0, 3.0]), p);
        let d2 = HermitianOperator::new(CMat::diag(&[-4.0, 5.0, 6.0]), p);
        assert_eq!(commutator_norm(&d1, &d2).unwrap(), 0.0);

        let small = HermitianOperator::identity(2, p);
        assert!(matches!(
            commutator_norm(&a, &small),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spin_param_derivations() {
        let p = SemiclassicalParam::from_k(4);
        assert_eq!(p.hbar(), 0.25);
        assert_eq!(p.k(), Some(4));
        let q = SemiclassicalParam::from_spin_n(3);
        assert_eq!(q.hbar(), 0.5);
        assert_eq!(q.k(), None);
    }
}
