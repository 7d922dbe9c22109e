//! Dense complex matrices and a cyclic-Jacobi Hermitian eigensolver.
//!
//! Everything downstream works with matrices that are Hermitian by
//! construction and small enough (a few thousand rows at most) that a
//! dense representation with an O(n^3) eigensolver is the right trade.
//! Exactly diagonal matrices are detected and short-circuited, which is
//! what keeps the large Kronecker-product families cheap.

use num_complex::Complex64;

use crate::Error;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let mut m = CMat::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, Complex64::new(v, 0.0));
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_assign_at(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// (A + A^H)/2. Construction-time symmetrization for operators.
    pub fn hermitize(&self) -> CMat {
        assert_eq!(self.rows, self.cols);
        CMat::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = CMat::zeros(n, m);
        for i in 0..n {
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[p * m..(p + 1) * m];
                let orow = &mut out.data[i * m..(i + 1) * m];
                for j in 0..m {
                    orow[j] += a * brow[j];
                }
            }
        }
        out
    }

    /// Kronecker product, block layout (i_a, i_b) -> i_a * b.rows + i_b.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (ra, ca) = (self.rows, self.cols);
        let (rb, cb) = (other.rows, other.cols);
        let mut out = CMat::zeros(ra * rb, ca * cb);
        for ia in 0..ra {
            for ja in 0..ca {
                let a = self.get(ia, ja);
                if a == ZERO {
                    continue;
                }
                for ib in 0..rb {
                    for jb in 0..cb {
                        out.set(ia * rb + ib, ja * cb + jb, a * other.get(ib, jb));
                    }
                }
            }
        }
        out
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_offdiag(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    m = m.max(self.get(i, j).norm());
                }
            }
        }
        m
    }

    /// Exactly diagonal (hard zeros everywhere off the diagonal).
    /// Bit-compare scan with early exit; no square roots.
    pub fn is_diagonal(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (j, z) in row.iter().enumerate() {
                if j != i && *z != ZERO {
                    return false;
                }
            }
        }
        true
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// y = A x.
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len());
        let mut y = vec![ZERO; self.rows];
        for (i, out) in y.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut acc = ZERO;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *out = acc;
        }
        y
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Submatrix with the given row and column index sets.
    pub fn gather(&self, row_idx: &[usize], col_idx: &[usize]) -> CMat {
        CMat::from_fn(row_idx.len(), col_idx.len(), |i, j| self.get(row_idx[i], col_idx[j]))
    }

    /// If every column is exactly a standard basis vector, return the row
    /// index of the unit entry per column. Holds for eigenvector matrices
    /// coming out of the diagonal fast path, and lets the joint-spectrum
    /// recursion replace dense projections by index gathers.
    pub fn selection_indices(&self) -> Option<Vec<usize>> {
        let mut idx = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let mut hit = None;
            for i in 0..self.rows {
                let z = self.get(i, j);
                if z == ZERO {
                    continue;
                }
                if z == ONE && hit.is_none() {
                    hit = Some(i);
                } else {
                    return None;
                }
            }
            idx.push(hit?);
        }
        Some(idx)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns. The input is trusted to be Hermitian (operators
/// are symmetrized at construction); only its lower/upper agreement in
/// floating point is what the rotations preserve.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat), Error> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch { left: a.rows(), right: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }

    // Fast path: exactly diagonal input (diagonal and Kronecker-diagonal
    // operators are built with hard zeros off the diagonal).
    if a.is_diagonal() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a.get(i, i).re.partial_cmp(&a.get(j, j).re).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
        let mut vecs = CMat::zeros(n, n);
        for (j, &i) in order.iter().enumerate() {
            vecs.set(i, j, ONE);
        }
        return Ok((values, vecs));
    }

    let mut w = a.clone();
    let mut v = CMat::identity(n);
    let scale = w.max_abs().max(f64::MIN_POSITIVE);
    let tol = scale * 1e-15;

    let mut converged = false;
    for _sweep in 0..100 {
        if w.max_abs_offdiag() <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w.get(p, q);
                let r = apq.norm();
                if r <= tol * 1e-2 {
                    continue;
                }
                let app = w.get(p, p).re;
                let aqq = w.get(q, q).re;
                let u = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ubar = u.conj();

                // Columns: B = W R with R = [[c, s], [-s*ubar, c*ubar]] on (p,q).
                for i in 0..n {
                    let wip = w.get(i, p);
                    let wiq = w.get(i, q);
                    w.set(i, p, wip * c - wiq * (s * ubar));
                    w.set(i, q, wip * s + wiq * (c * ubar));
                }
                // Rows: W' = R^H B.
                for j in 0..n {
                    let wpj = w.get(p, j);
                    let wqj = w.get(q, j);
                    w.set(p, j, wpj * c - wqj * (s * u));
                    w.set(q, j, wpj * s + wqj * (c * u));
                }
                // Clean up what the rotation drove to zero.
                w.set(p, q, ZERO);
                w.set(q, p, ZERO);
                let dp = w.get(p, p).re;
                let dq = w.get(q, q).re;
                w.set(p, p, Complex64::new(dp, 0.0));
                w.set(q, q, Complex64::new(dq, 0.0));

                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * (s * ubar));
                    v.set(i, q, vip * s + viq * (c * ubar));
                }
            }
        }
    }
    if !converged && w.max_abs_offdiag() > tol * 10.0 {
        return Err(Error::EigenSolverFailure { off_norm: w.max_abs_offdiag() });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w.get(i, i).re.partial_cmp(&w.get(j, j).re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| w.get(i, i).re).collect();
    let vecs = CMat::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok((values, vecs))
}
