//! C ABI over the `curvsense` library.
//!
//! Objects are opaque heap handles created by `cs_*_new`-style functions and
//! released with the matching `cs_*_free`. Every fallible call returns a
//! [`CsStatus`] and writes its result through an out-pointer; on failure the
//! out-pointer is left untouched and [`cs_last_error_message`] describes the
//! error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use curvsense::estimation::{default_position_grid, fi_qfi_ratio, position_fi, qfi_pure};
use curvsense::geometry::{self, Degenerate, Surface};
use curvsense::magnetic::{cylinder_field_qfi, sphere_ground_qfi, FieldConfig};
use curvsense::probe::{
    lambda_derivative, sphere_two_level, superposition, von_mises_packet, EvolvedModel, SpectralState,
};
use curvsense::spectral::{CylinderMode, SphereMode};
use curvsense::{Complex64, Error, Units};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Degenerate = 3,
    Numeric = 4,
    Panic = 5,
}

/// Physical units: reduced Planck constant and particle mass.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsUnits {
    pub hbar: f64,
    pub mass: f64,
}

/// Local geometry at a chart point. Matrices are row-major.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsGeometryReport {
    pub metric: [f64; 4],
    pub shape_operator: [f64; 4],
    pub mean_curvature: f64,
    pub gaussian_curvature: f64,
    pub surface_potential: f64,
    pub ricci: f64,
}

/// Position Fisher information next to the QFI of the same model.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsRatio {
    pub fi: f64,
    pub qfi: f64,
    pub ratio: f64,
    pub skipped_mass: f64,
}

/// Field-perturbed QFI in both the printed and the re-derived normalisation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsFieldQfi {
    pub printed: f64,
    pub derived: f64,
    pub gauge: f64,
}

/// Opaque embedded surface.
pub struct CsSurface(Surface);

/// Opaque probe state.
pub struct CsState(SpectralState);

/// Opaque evolved probe together with its radius derivative.
pub struct CsModel(EvolvedModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Lib(Error),
    Degenerate(Degenerate),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<Degenerate> for Failure {
    fn from(e: Degenerate) -> Self {
        Failure::Degenerate(e)
    }
}

fn status_of(e: &Error) -> CsStatus {
    match e {
        Error::InvalidSurface(_)
        | Error::InvalidPoint(_)
        | Error::InvalidArgument(_)
        | Error::ZeroState
        | Error::SurfaceMismatch { .. } => CsStatus::InvalidArgument,
        Error::DegenerateLevels { .. } => CsStatus::Degenerate,
        Error::TailNotMet { .. }
        | Error::UndefinedRatio { .. }
        | Error::Envelope
        | Error::BoundaryHit { .. }
        | Error::NonConvergent { .. } => CsStatus::Numeric,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F>(f: F) -> CsStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CsStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer: {name}"));
            CsStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Degenerate(d))) => {
            set_error(d.to_string());
            CsStatus::Degenerate
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            CsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn write<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn to_units(u: CsUnits) -> Result<Units, Failure> {
    Ok(Units::new(u.hbar, u.mass)?)
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Natural units, ħ = M = 1.
#[no_mangle]
pub extern "C" fn cs_units_natural() -> CsUnits {
    CsUnits { hbar: 1.0, mass: 1.0 }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_surface_sphere(radius: f64, out: *mut *mut CsSurface) -> CsStatus {
    guard(|| write(out, boxed(CsSurface(Surface::sphere(radius)?)), "out"))
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_surface_cylinder(radius: f64, out: *mut *mut CsSurface) -> CsStatus {
    guard(|| write(out, boxed(CsSurface(Surface::cylinder(radius)?)), "out"))
}

/// Torus with tube radius `tube` around a circle of radius `center`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_surface_torus(tube: f64, center: f64, out: *mut *mut CsSurface) -> CsStatus {
    guard(|| write(out, boxed(CsSurface(Surface::torus(tube, center)?)), "out"))
}

/// # Safety
/// `s` must be NULL or a handle from a `cs_surface_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_surface_free(s: *mut CsSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_geometry_report(
    s: *const CsSurface,
    u: f64,
    v: f64,
    units: CsUnits,
    out: *mut CsGeometryReport,
) -> CsStatus {
    guard(|| {
        let s = &deref(s, "surface")?.0;
        let p = s.point(u, v)?;
        let r = geometry::geometry_report(s, &p, &to_units(units)?)?;
        let flat = |m: [[f64; 2]; 2]| [m[0][0], m[0][1], m[1][0], m[1][1]];
        write(
            out,
            CsGeometryReport {
                metric: flat(r.metric),
                shape_operator: flat(r.shape_operator),
                mean_curvature: r.mean_curvature,
                gaussian_curvature: r.gaussian_curvature,
                surface_potential: r.surface_potential,
                ricci: r.ricci,
            },
            "out",
        )
    })
}

/// Difference `ξħ²R/M − V_s` between the two quantization prescriptions.
///
/// # Safety
/// `s` must be a live surface handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_quantization_gap(
    s: *const CsSurface,
    u: f64,
    v: f64,
    xi: f64,
    units: CsUnits,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let s = &deref(s, "surface")?.0;
        let p = s.point(u, v)?;
        write(out, geometry::quantization_gap(s, &p, xi, &to_units(units)?)?, "out")
    })
}

/// Normalised superposition of sphere modes `Σ (re + i·im) |j, m⟩`.
///
/// # Safety
/// The four arrays must each hold `len` elements; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_state_sphere(
    j: *const u32,
    m: *const i32,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut CsState,
) -> CsStatus {
    guard(|| {
        let (j, m, re, im) = (
            slice(j, len, "j")?,
            slice(m, len, "m")?,
            slice(re, len, "re")?,
            slice(im, len, "im")?,
        );
        let terms = (0..len)
            .map(|i| Ok((SphereMode::new(j[i], m[i])?, Complex64::new(re[i], im[i]))))
            .collect::<Result<Vec<_>, Error>>()?;
        write(out, boxed(CsState(superposition(&terms)?)), "out")
    })
}

/// Normalised superposition of cylinder modes `Σ (re + i·im) |k, m⟩`.
///
/// # Safety
/// The four arrays must each hold `len` elements; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_state_cylinder(
    k: *const f64,
    m: *const i32,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut CsState,
) -> CsStatus {
    guard(|| {
        let (k, m, re, im) = (
            slice(k, len, "k")?,
            slice(m, len, "m")?,
            slice(re, len, "re")?,
            slice(im, len, "im")?,
        );
        let terms = (0..len)
            .map(|i| Ok((CylinderMode::new(k[i], m[i])?, Complex64::new(re[i], im[i]))))
            .collect::<Result<Vec<_>, Error>>()?;
        write(out, boxed(CsState(superposition(&terms)?)), "out")
    })
}

/// `cos α |0,0⟩ + sin α e^{iβ} |j,m⟩` on the sphere.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_state_two_level(j: u32, m: i32, alpha: f64, beta: f64, out: *mut *mut CsState) -> CsStatus {
    guard(|| write(out, boxed(CsState(sphere_two_level(j, m, alpha, beta)?)), "out"))
}

/// Von Mises packet with concentration `kappa`, truncated at the smallest
/// `j ≤ j_cap` leaving tail mass below 1e-12.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_state_von_mises(kappa: f64, j_cap: usize, out: *mut *mut CsState) -> CsStatus {
    guard(|| write(out, boxed(CsState(von_mises_packet(kappa, j_cap)?)), "out"))
}

/// # Safety
/// `s` must be NULL or a handle from a `cs_state_*` constructor not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_state_free(s: *mut CsState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Evolves `state` freely for time `t` on a surface of radius `lambda`.
///
/// # Safety
/// `state` must be a live state handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_model_new(
    state: *const CsState,
    t: f64,
    lambda: f64,
    units: CsUnits,
    out: *mut *mut CsModel,
) -> CsStatus {
    guard(|| {
        let state = &deref(state, "state")?.0;
        let model = lambda_derivative(state, t, lambda, &to_units(units)?)?;
        write(out, boxed(CsModel(model)), "out")
    })
}

/// # Safety
/// `m` must be NULL or a handle from [`cs_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_model_free(m: *mut CsModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Quantum Fisher information for the radius.
///
/// # Safety
/// `model` must be a live model handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_qfi_pure(model: *const CsModel, out: *mut f64) -> CsStatus {
    guard(|| write(out, qfi_pure(&deref(model, "model")?.0), "out"))
}

/// Fisher information of an ideal position measurement, on the default grid.
///
/// # Safety
/// `model` must be a live model handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_position_fi(model: *const CsModel, out: *mut f64) -> CsStatus {
    guard(|| {
        let m = &deref(model, "model")?.0;
        write(out, position_fi(m, &default_position_grid(m))?.value, "out")
    })
}

/// Position FI, QFI and their ratio.
///
/// # Safety
/// `model` must be a live model handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_fi_qfi_ratio(model: *const CsModel, out: *mut CsRatio) -> CsStatus {
    guard(|| {
        let m = &deref(model, "model")?.0;
        let r = fi_qfi_ratio(m, &default_position_grid(m))?;
        write(
            out,
            CsRatio {
                fi: r.fi.value,
                qfi: r.qfi,
                ratio: r.ratio,
                skipped_mass: r.fi.skipped_mass,
            },
            "out",
        )
    })
}

/// QFI of the perturbed sphere ground state in a uniform field.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_sphere_ground_qfi(
    charge: f64,
    field: f64,
    lambda: f64,
    units: CsUnits,
    out: *mut CsFieldQfi,
) -> CsStatus {
    guard(|| {
        let f = FieldConfig::new(charge, field, to_units(units)?)?;
        let q = sphere_ground_qfi(&f, lambda)?;
        write(
            out,
            CsFieldQfi {
                printed: q.printed,
                derived: q.derived,
                gauge: q.gauge,
            },
            "out",
        )
    })
}

/// QFI of the perturbed cylinder state `(k, m)` in a radial field.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_cylinder_field_qfi(
    k: f64,
    m: i32,
    charge: f64,
    field: f64,
    lambda: f64,
    units: CsUnits,
    out: *mut CsFieldQfi,
) -> CsStatus {
    guard(|| {
        let f = FieldConfig::new(charge, field, to_units(units)?)?;
        let q = cylinder_field_qfi(CylinderMode::new(k, m)?, &f, lambda)?;
        write(
            out,
            CsFieldQfi {
                printed: q.printed,
                derived: q.derived,
                gauge: q.gauge,
            },
            "out",
        )
    })
}
