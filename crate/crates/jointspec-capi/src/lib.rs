//! C ABI over the jointspec library.
//!
//! Conventions: every fallible call returns a [`JsStatus`]; results come
//! back through out-pointers; spectra and polytopes are opaque handles
//! owned by the caller and released with the matching `_free` function.
//! All functions are panic-safe (panics are caught and reported as
//! `JS_STATUS_INTERNAL_ERROR`).
//!
//! Pointer contract (applies to every function here): handle arguments
//! must be null or come from this library and still be live; string
//! arguments must be null or NUL-terminated; out-pointers must be null or
//! point to writable storage of the documented size. Null pointers are
//! rejected with `JS_STATUS_NULL_POINTER`; anything else non-conforming
//! is undefined behavior, as usual across a C boundary.
#![allow(clippy::missing_safety_doc)]

use std::ffi::CStr;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use jointspec::cli::{parse_spectrum_csv, spectrum_csv};
use jointspec::inverse::{fit_lattice, recover, RecoverOptions, RecoveryReport};
use jointspec::quantize::{jc_block_spectrum, toric_family, ToricModel};
use jointspec::spectra::{
    default_cluster_tol, hausdorff_points, joint_spectrum, JointSpectrum,
};
use jointspec::Error;

/// Status code of every fallible C-ABI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    IndexOutOfRange = 3,
    UnknownModel = 4,
    NumericalError = 5,
    SimplicityViolation = 6,
    NotALattice = 7,
    InsufficientData = 8,
    RoundingFailure = 9,
    IoError = 10,
    ParseError = 11,
    InternalError = 12,
}

fn status_of(err: &Error) -> JsStatus {
    match err {
        Error::InvalidArgument(_)
        | Error::DegreeCap { .. }
        | Error::TruncationTooSmall { .. }
        | Error::Configuration(_)
        | Error::ParamMismatch { .. }
        | Error::DimensionMismatch { .. }
        | Error::EmptyWindow
        | Error::DegeneratePolygon => JsStatus::InvalidArgument,
        Error::UnknownModel(_) => JsStatus::UnknownModel,
        Error::NonCommutingInput { .. }
        | Error::EigenvalueCollision { .. }
        | Error::EigenSolverFailure { .. }
        | Error::NonFiniteDistance
        | Error::WindowExceeded { .. }
        | Error::NegativeDiameter { .. }
        | Error::EmptyIntersection => JsStatus::NumericalError,
        Error::SimplicityViolation { .. } => JsStatus::SimplicityViolation,
        Error::NotALattice { .. } => JsStatus::NotALattice,
        Error::InsufficientPoints { .. } | Error::InsufficientHbar { .. } => {
            JsStatus::InsufficientData
        }
        Error::RoundingFailure { .. } => JsStatus::RoundingFailure,
        Error::CsvFormat { .. } => JsStatus::ParseError,
        Error::Io(_) => JsStatus::IoError,
    }
}

/// Opaque joint spectrum handle.
pub struct JsSpectrum {
    inner: JointSpectrum,
}

/// Opaque recovered-polytope handle.
pub struct JsPolytope {
    report: RecoveryReport,
}

fn guard(body: impl FnOnce() -> JsStatus) -> JsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => JsStatus::InternalError,
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

fn emit(out: *mut *mut JsSpectrum, spectrum: JointSpectrum) -> JsStatus {
    let handle = Box::new(JsSpectrum { inner: spectrum });
    unsafe { *out = Box::into_raw(handle) };
    JsStatus::Ok
}

/// Joint spectrum of the spin-oscillator model with spin size `n`, from
/// the exact conserved-excitation blocks up to total excitation `t_max`.
#[no_mangle]
pub unsafe extern "C" fn js_jc_spectrum(n: usize, t_max: usize, out: *mut *mut JsSpectrum) -> JsStatus {
    if out.is_null() {
        return JsStatus::NullPointer;
    }
    guard(|| match jc_block_spectrum(n, t_max) {
        Ok(js) => emit(out, js),
        Err(e) => status_of(&e),
    })
}

/// Joint spectrum of a toric catalog model ("s2" or "s2xs2") at level k,
/// computed through the commuting operator family.
#[no_mangle]
pub unsafe extern "C" fn js_toric_spectrum(
    model: *const c_char,
    k: u64,
    out: *mut *mut JsSpectrum,
) -> JsStatus {
    if out.is_null() || model.is_null() {
        return JsStatus::NullPointer;
    }
    guard(|| {
        let name = match unsafe { cstr(model) } {
            Some(s) => s,
            None => return JsStatus::InvalidArgument,
        };
        let result = ToricModel::parse(name, k)
            .and_then(|m| toric_family(&m))
            .and_then(|fam| joint_spectrum(&fam, default_cluster_tol(&fam)));
        match result {
            Ok(js) => emit(out, js),
            Err(e) => status_of(&e),
        }
    })
}

/// Parse a spectrum CSV file (`hbar,lambda1[,lambda2],multiplicity`).
#[no_mangle]
pub unsafe extern "C" fn js_spectrum_read_csv(
    path: *const c_char,
    out: *mut *mut JsSpectrum,
) -> JsStatus {
    if out.is_null() || path.is_null() {
        return JsStatus::NullPointer;
    }
    guard(|| {
        let path = match unsafe { cstr(path) } {
            Some(s) => s,
            None => return JsStatus::InvalidArgument,
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(_) => return JsStatus::IoError,
        };
        match parse_spectrum_csv(&text) {
            Ok(js) => emit(out, js),
            Err(e) => status_of(&e),
        }
    })
}

/// Write a spectrum as CSV, bit-identical to the CLI output format.
#[no_mangle]
pub unsafe extern "C" fn js_spectrum_write_csv(
    spectrum: *const JsSpectrum,
    path: *const c_char,
) -> JsStatus {
    if spectrum.is_null() || path.is_null() {
        return JsStatus::NullPointer;
    }
    guard(|| {
        let spectrum = unsafe { &*spectrum };
        let path = match unsafe { cstr(path) } {
            Some(s) => s,
            None => return JsStatus::InvalidArgument,
        };
        match std::fs::write(path, spectrum_csv(&spectrum.inner)) {
            Ok(()) => JsStatus::Ok,
            Err(_) => JsStatus::IoError,
        }
    })
}

/// Number of distinct joint points.
#[no_mangle]
pub unsafe extern "C" fn js_spectrum_len(spectrum: *const JsSpectrum) -> usize {
    if spectrum.is_null() {
        return 0;
    }
    unsafe { &*spectrum }.inner.points().len()
}

/// Number of commuting operators (coordinates per point).
#[no_mangle]
pub unsafe extern "C" fn js_spectrum_dim(spectrum: *const JsSpectrum) -> usize {
    if spectrum.is_null() {
        return 0;
    }
    unsafe { &*spectrum }.inner.d()
}

/// Semiclassical parameter of the spectrum.
#[no_mangle]
pub unsafe extern "C" fn js_spectrum_hbar(spectrum: *const JsSpectrum) -> f64 {
    if spectrum.is_null() {
        return f64::NAN;
    }
    unsafe { &*spectrum }.inner.param().hbar()
}

/// Copy out one joint point: `coords` must hold at least
/// `js_spectrum_dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn js_spectrum_point(
    spectrum: *const JsSpectrum,
    index: usize,
    coords: *mut f64,
    multiplicity: *mut usize,
) -> JsStatus {
    if spectrum.is_null() || coords.is_null() || multiplicity.is_null() {
        return JsStatus::NullPointer;
    }
    let spectrum = unsafe { &*spectrum };
    let points = spectrum.inner.points();
    if index >= points.len() {
        return JsStatus::IndexOutOfRange;
    }
    let p = &points[index];
    for (i, &c) in p.coords.iter().enumerate() {
        unsafe { *coords.add(i) = c };
    }
    unsafe { *multiplicity = p.multiplicity };
    JsStatus::Ok
}

/// Fit the affine lattice of a toric spectrum. `origin` and `spacing`
/// must hold `js_spectrum_dim` doubles each.
#[no_mangle]
pub unsafe extern "C" fn js_spectrum_lattice_fit(
    spectrum: *const JsSpectrum,
    origin: *mut f64,
    spacing: *mut f64,
    residual: *mut f64,
) -> JsStatus {
    if spectrum.is_null() || origin.is_null() || spacing.is_null() || residual.is_null() {
        return JsStatus::NullPointer;
    }
    guard(|| {
        let spectrum = unsafe { &*spectrum };
        match fit_lattice(&spectrum.inner) {
            Ok(fit) => {
                for (i, (&o, &s)) in fit.origin.iter().zip(&fit.spacing).enumerate() {
                    unsafe {
                        *origin.add(i) = o;
                        *spacing.add(i) = s;
                    }
                }
                unsafe { *residual = fit.residual };
                JsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Exact symmetric Hausdorff distance between the two point clouds.
#[no_mangle]
pub unsafe extern "C" fn js_spectrum_hausdorff(
    a: *const JsSpectrum,
    b: *const JsSpectrum,
    out: *mut f64,
) -> JsStatus {
    if a.is_null() || b.is_null() || out.is_null() {
        return JsStatus::NullPointer;
    }
    guard(|| {
        let a = unsafe { &*a };
        let b = unsafe { &*b };
        match hausdorff_points(&a.inner.coords_cloud(), &b.inner.coords_cloud()) {
            Ok(d) => {
                unsafe { *out = d };
                JsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release a spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn js_spectrum_free(spectrum: *mut JsSpectrum) {
    if !spectrum.is_null() {
        drop(unsafe { Box::from_raw(spectrum) });
    }
}

/// Recover the moment polytope from at least three spectra at distinct
/// semiclassical parameters (lattice fit, hull extrapolation, rational
/// rounding, Delzant test).
#[no_mangle]
pub unsafe extern "C" fn js_recover(
    spectra: *const *const JsSpectrum,
    count: usize,
    out: *mut *mut JsPolytope,
) -> JsStatus {
    if spectra.is_null() || out.is_null() {
        return JsStatus::NullPointer;
    }
    guard(|| {
        let mut owned = Vec::with_capacity(count);
        for i in 0..count {
            let ptr = unsafe { *spectra.add(i) };
            if ptr.is_null() {
                return JsStatus::NullPointer;
            }
            owned.push(unsafe { &*ptr }.inner.clone());
        }
        match recover(&owned, &RecoverOptions::default()) {
            Ok(report) => {
                let handle = Box::new(JsPolytope { report });
                unsafe { *out = Box::into_raw(handle) };
                JsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Dimension of the recovered polytope (1 or 2).
#[no_mangle]
pub unsafe extern "C" fn js_polytope_dim(polytope: *const JsPolytope) -> usize {
    if polytope.is_null() {
        return 0;
    }
    unsafe { &*polytope }.report.polytope.dim()
}

/// Number of vertices (2 endpoints for an interval).
#[no_mangle]
pub unsafe extern "C" fn js_polytope_vertex_count(polytope: *const JsPolytope) -> usize {
    if polytope.is_null() {
        return 0;
    }
    unsafe { &*polytope }.report.polytope.vertices_f64().len()
}

/// Copy a vertex into `coords` (`js_polytope_dim` doubles).
#[no_mangle]
pub unsafe extern "C" fn js_polytope_vertex(
    polytope: *const JsPolytope,
    index: usize,
    coords: *mut f64,
) -> JsStatus {
    if polytope.is_null() || coords.is_null() {
        return JsStatus::NullPointer;
    }
    let polytope = unsafe { &*polytope };
    let verts = polytope.report.polytope.vertices_f64();
    if index >= verts.len() {
        return JsStatus::IndexOutOfRange;
    }
    for (i, &c) in verts[index].iter().enumerate() {
        unsafe { *coords.add(i) = c };
    }
    JsStatus::Ok
}

/// 1 when the recovered polytope passes the vertex smoothness test.
#[no_mangle]
pub unsafe extern "C" fn js_polytope_is_delzant(polytope: *const JsPolytope) -> i32 {
    if polytope.is_null() {
        return 0;
    }
    unsafe { &*polytope }.report.delzant as i32
}

/// Worst rounding movement of the recovery's rational snapping stage.
#[no_mangle]
pub unsafe extern "C" fn js_polytope_rounding_delta(polytope: *const JsPolytope) -> f64 {
    if polytope.is_null() {
        return f64::NAN;
    }
    unsafe { &*polytope }.report.rounding_delta
}

/// Release a polytope handle.
#[no_mangle]
pub unsafe extern "C" fn js_polytope_free(polytope: *mut JsPolytope) {
    if !polytope.is_null() {
        drop(unsafe { Box::from_raw(polytope) });
    }
}
