//! C ABI for `nlstw`.
//!
//! Objects cross the boundary as opaque heap handles created by `*_new` /
//! `*_read` / solver calls and released by the matching `*_free`. Every call
//! returns an [`NlstwStatus`]; on failure a message is available from
//! [`nlstw_last_error`] until the next failing call on the same thread.
//! Panics are caught and reported as `NLSTW_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nlstw::minimize::{self, MinimizationProblem, ProblemKind, SolverOptions, WaveSolution};
use nlstw::{diagnostics, io, kp, physics, ComplexField, Error, Grid, Nonlinearity};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NlstwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotConverged = 3,
    Io = 4,
    Format = 5,
    Internal = 6,
}

/// Periodic grid.
pub struct NlstwGrid {
    inner: Grid,
}

/// Nonlinearity `F`.
pub struct NlstwNonlinearity {
    inner: Nonlinearity,
}

/// Complex field on a grid.
pub struct NlstwField {
    inner: ComplexField,
}

/// Result of a constrained solve.
pub struct NlstwWave {
    inner: WaveSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> NlstwStatus {
    match e {
        Error::NotConverged { .. }
        | Error::PotentialBarrierStuck { .. }
        | Error::MultiplierNonnegative { .. }
        | Error::IterationDiverged(_) => NlstwStatus::NotConverged,
        Error::Io(_) => NlstwStatus::Io,
        Error::Format(_) | Error::Json(_) => NlstwStatus::Format,
        _ => NlstwStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (NlstwStatus, String)>) -> NlstwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NlstwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NlstwStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (NlstwStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (NlstwStatus, String) {
    (NlstwStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (NlstwStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (NlstwStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_f64(out: *mut f64, v: f64) -> Result<(), (NlstwStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = v;
    Ok(())
}

unsafe fn path_arg(p: *const c_char) -> Result<String, (NlstwStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| (NlstwStatus::InvalidArgument, "path is not UTF-8".to_owned()))
}

/// Message of the last failing call on this thread, or null. The string is
/// owned by the library and valid until the next failing call.
#[no_mangle]
pub extern "C" fn nlstw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nlstw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---------------------------------------------------------------- grid

/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn nlstw_grid_new(
    l1: f64,
    l2: f64,
    n1: usize,
    n2: usize,
    out: *mut *mut NlstwGrid,
) -> NlstwStatus {
    guard(|| {
        let g = Grid::new(l1, l2, n1, n2).map_err(lib_err)?;
        put(out, NlstwGrid { inner: g })
    })
}

/// # Safety
/// `grid` must be null or a handle from `nlstw_grid_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nlstw_grid_free(grid: *mut NlstwGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of grid points, `n1 * n2`; zero for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nlstw_grid_len(grid: *const NlstwGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.len())
}

// ---------------------------------------------------------------- nonlinearity

/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn nlstw_nonlinearity_gp(out: *mut *mut NlstwNonlinearity) -> NlstwStatus {
    guard(|| {
        put(
            out,
            NlstwNonlinearity {
                inner: Nonlinearity::GrossPitaevskii,
            },
        )
    })
}

/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn nlstw_nonlinearity_cubic_quintic(
    alpha5: f64,
    out: *mut *mut NlstwNonlinearity,
) -> NlstwStatus {
    guard(|| {
        let nl = Nonlinearity::cubic_quintic(alpha5).map_err(lib_err)?;
        put(out, NlstwNonlinearity { inner: nl })
    })
}

/// # Safety
/// `nl` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nlstw_nonlinearity_free(nl: *mut NlstwNonlinearity) {
    if !nl.is_null() {
        drop(Box::from_raw(nl));
    }
}

// ---------------------------------------------------------------- fields

/// Field from split real and imaginary arrays of length `n1 * n2`.
///
/// # Safety
/// `re` and `im` must point to `len` readable doubles; `grid` must be live.
#[no_mangle]
pub unsafe extern "C" fn nlstw_field_from_values(
    grid: *const NlstwGrid,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut NlstwField,
) -> NlstwStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        if re.is_null() || im.is_null() {
            return Err(null("value array"));
        }
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let values = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let f = ComplexField::new(g.inner.clone(), values).map_err(lib_err)?;
        put(out, NlstwField { inner: f })
    })
}

/// Copies `len = n1 * n2` values into `re` and `im`.
///
/// # Safety
/// `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nlstw_field_values(
    field: *const NlstwField,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> NlstwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        if re.is_null() || im.is_null() {
            return Err(null("value array"));
        }
        let v = f.inner.values();
        if v.len() != len {
            return Err((
                NlstwStatus::InvalidArgument,
                format!("expected {} values, buffer holds {len}", v.len()),
            ));
        }
        let re = std::slice::from_raw_parts_mut(re, len);
        let im = std::slice::from_raw_parts_mut(im, len);
        for (i, z) in v.iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

/// Number of values of a field; zero for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nlstw_field_len(field: *const NlstwField) -> usize {
    field.as_ref().map_or(0, |f| f.inner.values().len())
}

/// Reads a complex NLSTW1 file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_field_read(path: *const c_char, out: *mut *mut NlstwField) -> NlstwStatus {
    guard(|| {
        let p = path_arg(path)?;
        let f = io::read_complex(p).map_err(lib_err)?;
        put(out, NlstwField { inner: f })
    })
}

/// Writes a complex NLSTW1 file atomically.
///
/// # Safety
/// `field` must be live and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nlstw_field_write(field: *const NlstwField, path: *const c_char) -> NlstwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let p = path_arg(path)?;
        io::write_complex(p, &f.inner).map_err(lib_err)
    })
}

/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nlstw_field_free(field: *mut NlstwField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

// ---------------------------------------------------------------- functionals

/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_energy(
    field: *const NlstwField,
    nl: *const NlstwNonlinearity,
    out: *mut f64,
) -> NlstwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let nl = deref(nl, "nonlinearity")?;
        put_f64(out, physics::energy(&f.inner, &nl.inner))
    })
}

/// # Safety
/// `field` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_momentum(field: *const NlstwField, out: *mut f64) -> NlstwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        put_f64(out, physics::momentum(&f.inner))
    })
}

/// Least-squares speed of a field.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_extract_speed(
    field: *const NlstwField,
    nl: *const NlstwNonlinearity,
    out: *mut f64,
) -> NlstwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let nl = deref(nl, "nonlinearity")?;
        let c = physics::extract_speed(&f.inner, &nl.inner).map_err(lib_err)?;
        put_f64(out, c)
    })
}

/// Relative residuals of the two planar Pohozaev identities at speed `c`.
///
/// # Safety
/// Handles must be live; `scaling` and `planar` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_pohozaev(
    field: *const NlstwField,
    nl: *const NlstwNonlinearity,
    c: f64,
    scaling: *mut f64,
    planar: *mut f64,
) -> NlstwStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let nl = deref(nl, "nonlinearity")?;
        let [s, p] = diagnostics::pohozaev(&f.inner, &nl.inner, c, 2);
        put_f64(scaling, s.rel)?;
        put_f64(planar, p.rel)
    })
}

// ---------------------------------------------------------------- solvers

fn options(tol: f64, max_iter: usize) -> SolverOptions {
    let d = SolverOptions::default();
    SolverOptions {
        tol: if tol > 0.0 { tol } else { d.tol },
        max_iter: if max_iter > 0 { max_iter } else { d.max_iter },
        ..d
    }
}

unsafe fn solve_into(
    pb: MinimizationProblem,
    nl: &Nonlinearity,
    out: *mut *mut NlstwWave,
) -> Result<(), (NlstwStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    match minimize::solve(&pb, nl) {
        Ok(w) => put(out, NlstwWave { inner: w }),
        Err(Error::NotConverged { best, iterations, residual }) => {
            put(out, NlstwWave { inner: *best })?;
            Err((
                NlstwStatus::NotConverged,
                format!("not converged after {iterations} iterations (residual {residual:.3e})"),
            ))
        }
        Err(e) => Err(lib_err(e)),
    }
}

/// Minimizes `E` at momentum `q`. `tol <= 0` and `max_iter == 0` select the
/// defaults. On `NLSTW_STATUS_NOT_CONVERGED` the best iterate is still
/// returned in `out` and must be freed.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_solve_momentum(
    grid: *const NlstwGrid,
    nl: *const NlstwNonlinearity,
    q: f64,
    tol: f64,
    max_iter: usize,
    out: *mut *mut NlstwWave,
) -> NlstwStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        let nl = deref(nl, "nonlinearity")?;
        let pb = MinimizationProblem::new(ProblemKind::FixedMomentum { q }, g.inner.clone())
            .with_options(options(tol, max_iter));
        solve_into(pb, &nl.inner, out)
    })
}

/// Minimizes `I` at kinetic energy `k`; the returned wave is rescaled to speed `c`.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_solve_kinetic(
    grid: *const NlstwGrid,
    nl: *const NlstwNonlinearity,
    k: f64,
    tol: f64,
    max_iter: usize,
    out: *mut *mut NlstwWave,
) -> NlstwStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        let nl = deref(nl, "nonlinearity")?;
        let pb = MinimizationProblem::new(ProblemKind::FixedKinetic { k, k_infinity: None }, g.inner.clone())
            .with_options(options(tol, max_iter));
        solve_into(pb, &nl.inner, out)
    })
}

/// # Safety
/// `wave` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_wave_speed(wave: *const NlstwWave, out: *mut f64) -> NlstwStatus {
    guard(|| put_f64(out, deref(wave, "wave")?.inner.speed))
}

/// # Safety
/// `wave` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_wave_energy(wave: *const NlstwWave, out: *mut f64) -> NlstwStatus {
    guard(|| put_f64(out, deref(wave, "wave")?.inner.diagnostics.energy))
}

/// Whether the solve met its tolerance; false for a null handle.
///
/// # Safety
/// `wave` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nlstw_wave_converged(wave: *const NlstwWave) -> bool {
    wave.as_ref().is_some_and(|w| w.inner.converged())
}

/// Copies the wave's field into a new field handle.
///
/// # Safety
/// `wave` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_wave_field(wave: *const NlstwWave, out: *mut *mut NlstwField) -> NlstwStatus {
    guard(|| {
        let w = deref(wave, "wave")?;
        put(
            out,
            NlstwField {
                inner: w.inner.psi.clone(),
            },
        )
    })
}

/// JSON sidecar of the wave as a newly allocated string; free it with
/// `nlstw_string_free`.
///
/// # Safety
/// `wave` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_wave_sidecar_json(wave: *const NlstwWave, out: *mut *mut c_char) -> NlstwStatus {
    guard(|| {
        let w = deref(wave, "wave")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let s = serde_json::to_string(&w.inner.sidecar()).map_err(|e| lib_err(e.into()))?;
        *out = CString::new(s)
            .map_err(|_| (NlstwStatus::Internal, "sidecar contains NUL".to_owned()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `wave` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nlstw_wave_free(wave: *mut NlstwWave) {
    if !wave.is_null() {
        drop(Box::from_raw(wave));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nlstw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------- kp

/// Action and largest relative identity residual of the KP-I lump on the
/// `(l, sqrt2 l)` grid with `n x n` points.
///
/// # Safety
/// `action` and `residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nlstw_kp_lump(
    gamma: f64,
    l: f64,
    n: usize,
    action: *mut f64,
    residual: *mut f64,
) -> NlstwStatus {
    guard(|| {
        let g = kp::default_grid(l, n).map_err(lib_err)?;
        let lump = kp::solve_kp_ground_state(gamma, &g, &kp::KpOptions::default()).map_err(lib_err)?;
        put_f64(action, lump.action)?;
        put_f64(residual, lump.max_residual())
    })
}
