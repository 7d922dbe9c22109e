//! Numerical laboratory for joint spectra of commuting self-adjoint matrices.
//!
//! The crate quantizes a small catalog of classical integrable systems into
//! families of commuting Hermitian matrices, computes their joint spectra,
//! measures how those spectra converge to the classical moment-map image as
//! the semiclassical parameter goes to zero, and runs the inverse direction:
//! reconstructing the moment polytope from spectral data alone.
//!
//! Module map:
//!
//! * [`operators`] -- self-adjoint matrix building blocks: spin triples from
//!   the two-mode construction, truncated oscillator ladders, tensor products.
//! * [`quantize`] -- commuting families: Weyl quantization of polynomial
//!   symbols, the exactly block-diagonal spin-oscillator pair, Berezin-Toeplitz
//!   operators on the sphere from closed-form matrix elements.
//! * [`spectra`] -- joint spectra by recursive simultaneous diagonalization,
//!   classical spectra by deterministic sampling, convex hulls, Hausdorff
//!   distance, convergence studies.
//! * [`inverse`] -- lattice fits of toric spectra, support-function
//!   extrapolation of hulls, rational rounding, the Delzant vertex test.
//! * [`cli`] -- the `jointspec` command line: CSV/JSON/SVG pipelines.
//!
//! Round trip in a few lines: quantize a toric model at three levels,
//! compute the joint spectra, and reconstruct the moment polytope they
//! converge to.
//!
//! ```
//! use jointspec::inverse::{recover, RecoverOptions};
//! use jointspec::quantize::{toric_family, ToricModel, ToricModelName};
//! use jointspec::spectra::{default_cluster_tol, joint_spectrum};
//!
//! let spectra: Vec<_> = [8, 16, 32]
//!     .into_iter()
//!     .map(|k| {
//!         let model = ToricModel::new(ToricModelName::S2xS2, k).unwrap();
//!         let fam = toric_family(&model).unwrap();
//!         joint_spectrum(&fam, default_cluster_tol(&fam)).unwrap()
//!     })
//!     .collect();
//!
//! let report = recover(&spectra, &RecoverOptions::default()).unwrap();
//! assert!(report.delzant);
//! // The product of two spheres lives over the square [-1, 1]^2.
//! for v in report.polytope.vertices_f64() {
//!     assert!((v[0].abs() - 1.0).abs() < 5e-3);
//!     assert!((v[1].abs() - 1.0).abs() < 5e-3);
//! }
//! ```

pub mod cmat;
pub mod operators;
pub mod quantize;
pub mod spectra;
pub mod inverse;
pub mod cli;
pub mod rng;

use std::fmt;

/// Crate-wide error type. Variants mirror the failure modes of the
/// individual operations rather than wrapping strings.
#[derive(Debug)]
pub enum Error {
    /// Two operators carry different semiclassical parameters.
    ParamMismatch { left_hbar: f64, right_hbar: f64 },
    /// Matrix dimensions do not agree.
    DimensionMismatch { left: usize, right: usize },
    /// Generic precondition violation (argument out of range, bad flag...).
    InvalidArgument(String),
    /// Polynomial symbol exceeds the supported total degree.
    DegreeCap { degree: u32, cap: u32 },
    /// Oscillator truncation too small for the requested symbol.
    TruncationTooSmall { trunc: usize, degree: u32 },
    /// Joint eigenvector residual too large: inputs do not commute well
    /// enough for the requested clustering tolerance.
    NonCommutingInput { residual: f64, tol: f64 },
    /// Inconsistent tolerance configuration (e.g. cluster tolerance at or
    /// below the family's commutation tolerance).
    Configuration(String),
    /// Random linear combination kept producing collided eigenvalues.
    EigenvalueCollision { gap: f64, retries: u32 },
    /// The Jacobi sweep did not reach its off-diagonal target.
    EigenSolverFailure { off_norm: f64 },
    /// Classical window selects no phase-space points.
    EmptyWindow,
    /// A trajectory left the plane-factor radius window.
    WindowExceeded { radius: f64, limit: f64 },
    /// A Hausdorff distance came out non-finite.
    NonFiniteDistance,
    /// A joint eigenvalue has multiplicity above one where simplicity is
    /// required.
    SimplicityViolation { point: Vec<f64>, multiplicity: usize },
    /// Spectrum points do not sit on an affine lattice.
    NotALattice { residual: f64, spacing: f64 },
    /// Too few distinct values along an axis to estimate a lattice.
    InsufficientPoints { axis: usize, distinct: usize },
    /// Too few distinct semiclassical parameters for extrapolation.
    InsufficientHbar { found: usize, need: usize },
    /// Support-function extrapolation produced a negative diameter.
    NegativeDiameter { support_sum: f64 },
    /// Half-plane intersection came out empty.
    EmptyIntersection,
    /// Rational rounding moved the polygon by more than the tolerance.
    RoundingFailure { delta: f64, tol: f64 },
    /// Operation requires a polygon of full rank.
    DegeneratePolygon,
    /// Model name not in the catalog.
    UnknownModel(String),
    /// Malformed CSV input, with the 1-based offending line.
    CsvFormat { line: usize, message: String },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ParamMismatch { left_hbar, right_hbar } => {
                write!(f, "semiclassical parameter mismatch: hbar {} vs {}", left_hbar, right_hbar)
            }
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {} vs {}", left, right)
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {}", msg),
            Error::DegreeCap { degree, cap } => {
                write!(f, "symbol degree {} exceeds cap {}", degree, cap)
            }
            Error::TruncationTooSmall { trunc, degree } => {
                write!(f, "oscillator truncation {} too small for degree-{} symbol", trunc, degree)
            }
            Error::NonCommutingInput { residual, tol } => {
                write!(f, "joint eigenvector residual {:.3e} exceeds 100 x cluster tolerance {:.3e}: inputs do not commute", residual, tol)
            }
            Error::Configuration(msg) => write!(f, "configuration error: {}", msg),
            Error::EigenvalueCollision { gap, retries } => {
                write!(f, "eigenvalue collision (gap {:.3e}) persisted after {} retries", gap, retries)
            }
            Error::EigenSolverFailure { off_norm } => {
                write!(f, "eigensolver stalled with off-diagonal norm {:.3e}", off_norm)
            }
            Error::EmptyWindow => write!(f, "window selects no phase-space points"),
            Error::WindowExceeded { radius, limit } => {
                write!(f, "trajectory radius {:.6} exceeded plane window {:.6}", radius, limit)
            }
            Error::NonFiniteDistance => write!(f, "non-finite Hausdorff distance"),
            Error::SimplicityViolation { point, multiplicity } => {
                write!(f, "joint eigenvalue at {:?} has multiplicity {} (expected simple)", point, multiplicity)
            }
            Error::NotALattice { residual, spacing } => {
                write!(f, "points deviate from fitted lattice by {:.3e} (spacing {:.3e})", residual, spacing)
            }
            Error::InsufficientPoints { axis, distinct } => {
                write!(f, "axis {} has only {} distinct value(s); need at least 2", axis, distinct)
            }
            Error::InsufficientHbar { found, need } => {
                write!(f, "need at least {} distinct semiclassical parameters, found {}", need, found)
            }
            Error::NegativeDiameter { support_sum } => {
                write!(f, "extrapolated support functions give negative diameter ({:.3e})", support_sum)
            }
            Error::EmptyIntersection => write!(f, "half-plane intersection is empty"),
            Error::RoundingFailure { delta, tol } => {
                write!(f, "rational rounding moved polygon by {:.3e} (tolerance {:.3e})", delta, tol)
            }
            Error::DegeneratePolygon => write!(f, "polygon is degenerate (rank < 2)"),
            Error::UnknownModel(name) => write!(f, "unknown model '{}'", name),
            Error::CsvFormat { line, message } => write!(f, "CSV line {}: {}", line, message),
            Error::Io(e) => write!(f, "io error: {}", e),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
