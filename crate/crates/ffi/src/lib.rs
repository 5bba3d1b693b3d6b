//! C ABI over `inls-core`.
//!
//! Objects are opaque handles created by `inls_*_new`-style functions and
//! released with the matching `inls_*_free`. Every fallible function returns
//! an [`InlsStatus`]; on failure the message is available from
//! [`inls_last_error`] on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use inls_core::evolution::{evolve, EvolutionConfig, Termination};
use inls_core::ground_state::{shoot, GroundState, ShootOptions};
use inls_core::transforms::{s_family, SFamilyParams};
use inls_core::verify::{run_suite, Suite, SuiteConfig};
use inls_core::{functionals, io, CartesianGrid, Discretization, Field, InlsError, Params};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InlsStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Parameters, grid or configuration rejected.
    InvalidArgument = 2,
    /// The computation failed numerically.
    Numerical = 3,
    /// File system error.
    Io = 4,
    /// Malformed snapshot.
    Format = 5,
    /// Output buffer too small.
    BufferTooSmall = 6,
    /// A verification check failed.
    CheckFailed = 7,
    /// Internal panic caught at the boundary.
    Panic = 8,
}

/// Outcome of an evolution run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InlsTermination {
    ReachedTEnd = 0,
    BlowupDetected = 1,
    BoundaryContaminated = 2,
    NumericalFailure = 3,
}

/// Scalars describing a ground state.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct InlsGroundStateSummary {
    pub dim: u32,
    pub b: f64,
    pub p: f64,
    pub psi0: f64,
    pub mass_sq: f64,
    pub grad_sq: f64,
    pub potential_term: f64,
    pub j_min: f64,
    pub residual: f64,
}

/// Opaque ground state.
pub struct InlsGroundState(GroundState);

/// Opaque field on a Cartesian grid, with the `b` it belongs to.
pub struct InlsField {
    field: Field,
    b: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &InlsError) -> InlsStatus {
    match e {
        InlsError::Io(_) => InlsStatus::Io,
        InlsError::Format(_) => InlsStatus::Format,
        e if e.is_numerical() => InlsStatus::Numerical,
        _ => InlsStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (InlsStatus, String)>) -> InlsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InlsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            InlsStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (InlsStatus, String)>;
}

impl<T> IntoFfi<T> for inls_core::Result<T> {
    fn ffi(self) -> Result<T, (InlsStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (InlsStatus, String) {
    (InlsStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (InlsStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(p: *mut T, what: &str, v: T) -> Result<(), (InlsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(v);
    Ok(())
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, (InlsStatus, String)> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| (InlsStatus::InvalidArgument, "path is not UTF-8".into()))
}

fn params_for(dim: u32, b: f64) -> inls_core::Result<Params> {
    if b == 0.0 {
        Params::classic(dim as usize)
    } else {
        Params::new(dim as usize, b)
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn inls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn inls_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Ground state for dimension `dim` and exponent `b` (`b = 0` is the
/// classic equation).
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inls_ground_state_new(dim: u32, b: f64, out: *mut *mut InlsGroundState) -> InlsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = params_for(dim, b).ffi()?;
        let gs = shoot(&params, &ShootOptions::default()).ffi()?;
        write_out(out, "out", Box::into_raw(Box::new(InlsGroundState(gs))))
    })
}

/// # Safety
/// `gs` must be null or a handle from [`inls_ground_state_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn inls_ground_state_free(gs: *mut InlsGroundState) {
    if !gs.is_null() {
        drop(Box::from_raw(gs));
    }
}

/// # Safety
/// `gs` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inls_ground_state_summary(
    gs: *const InlsGroundState,
    out: *mut InlsGroundStateSummary,
) -> InlsStatus {
    guard(|| {
        let s = deref(gs, "gs")?.0.summary();
        write_out(
            out,
            "out",
            InlsGroundStateSummary {
                dim: s.n as u32,
                b: s.b,
                p: s.p,
                psi0: s.psi0,
                mass_sq: s.mass_sq,
                grad_sq: s.grad_sq,
                potential_term: s.potential_term,
                j_min: s.j_min,
                residual: s.residual,
            },
        )
    })
}

/// `psi(r)`.
///
/// # Safety
/// `gs` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inls_ground_state_eval(gs: *const InlsGroundState, r: f64, out: *mut f64) -> InlsStatus {
    guard(|| {
        let v = deref(gs, "gs")?.0.eval(r).ffi()?;
        write_out(out, "out", v)
    })
}

fn new_field(field: Field, b: f64) -> *mut InlsField {
    Box::into_raw(Box::new(InlsField { field, b }))
}

/// Closed-form S-family member at time `t` on the cell-centered grid
/// `[-L, L)^N` with `M` points per axis.
///
/// # Safety
/// `gs` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inls_field_s_family(
    gs: *const InlsGroundState,
    t_blowup: f64,
    lambda0: f64,
    gamma0: f64,
    t: f64,
    points: u32,
    extent: f64,
    out: *mut *mut InlsField,
) -> InlsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let gs = &deref(gs, "gs")?.0;
        let grid = CartesianGrid::cell(gs.params().dim(), points as usize, extent).ffi()?;
        let sp = SFamilyParams::new(t_blowup, lambda0, gamma0).ffi()?;
        let f = s_family(&sp, gs, t, &grid).ffi()?;
        write_out(out, "out", new_field(f, gs.params().b()))
    })
}

/// `amplitude exp(-|x|^2 / (2 width^2))` at time 0.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inls_field_gaussian(
    dim: u32,
    b: f64,
    points: u32,
    extent: f64,
    amplitude: f64,
    width: f64,
    out: *mut *mut InlsField,
) -> InlsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        params_for(dim, b).ffi()?;
        let grid = CartesianGrid::cell(dim as usize, points as usize, extent).ffi()?;
        let f = Field::gaussian(grid, amplitude, width).ffi()?;
        write_out(out, "out", new_field(f, b))
    })
}

/// Reads a snapshot file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn inls_field_load(path: *const c_char, out: *mut *mut InlsField) -> InlsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (f, b) = io::load_snapshot(path_arg(path)?).ffi()?;
        write_out(out, "out", new_field(f, b))
    })
}

/// Writes a snapshot file.
///
/// # Safety
/// `field` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn inls_field_save(field: *const InlsField, path: *const c_char) -> InlsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        io::save_snapshot(path_arg(path)?, &f.field, f.b).ffi()
    })
}

/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn inls_field_free(field: *mut InlsField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of complex samples, `M^N`; 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn inls_field_len(field: *const InlsField) -> usize {
    field.as_ref().map_or(0, |f| f.field.values().len())
}

/// Time stamp of the field; NaN for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn inls_field_time(field: *const InlsField) -> f64 {
    field.as_ref().map_or(f64::NAN, |f| f.field.time())
}

/// Copies the samples as interleaved `(re, im)` pairs; `len` counts
/// doubles and must be at least `2 * inls_field_len(field)`.
///
/// # Safety
/// `field` must be a live handle and `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn inls_field_values(field: *const InlsField, buf: *mut f64, len: usize) -> InlsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let vals = f.field.values();
        if len < 2 * vals.len() {
            return Err((
                InlsStatus::BufferTooSmall,
                format!("buffer holds {len} doubles, need {}", 2 * vals.len()),
            ));
        }
        for (i, z) in vals.iter().enumerate() {
            *buf.add(2 * i) = z.re;
            *buf.add(2 * i + 1) = z.im;
        }
        Ok(())
    })
}

/// Mass, kinetic and potential parts of the energy. Any output pointer
/// may be null.
///
/// # Safety
/// `field` must be a live handle; non-null outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn inls_field_functionals(
    field: *const InlsField,
    mass: *mut f64,
    kinetic: *mut f64,
    potential: *mut f64,
) -> InlsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let params = params_for(f.field.grid().dim() as u32, f.b).ffi()?;
        let disc = Discretization::new(params, *f.field.grid()).ffi()?;
        let e = functionals::energy(&f.field, &disc).ffi()?;
        let m = functionals::mass(&f.field).ffi()?;
        for (p, v) in [(mass, m), (kinetic, e.kinetic), (potential, e.potential)] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Evolves `field` to `t_end` with base step `dt0`. A non-positive
/// `grad_threshold` disables blow-up detection. The final state is a new
/// handle in `out`.
///
/// # Safety
/// `field` must be a live handle; `out` and `termination` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn inls_evolve(
    field: *const InlsField,
    dt0: f64,
    t_end: f64,
    grad_threshold: f64,
    adapt: bool,
    out: *mut *mut InlsField,
    termination: *mut InlsTermination,
) -> InlsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        if out.is_null() {
            return Err(null("out"));
        }
        if termination.is_null() {
            return Err(null("termination"));
        }
        let params = params_for(f.field.grid().dim() as u32, f.b).ffi()?;
        let disc = Discretization::new(params, *f.field.grid()).ffi()?;
        let mut cfg = EvolutionConfig::new(dt0, t_end);
        cfg.record_every = usize::MAX;
        cfg.adapt = adapt;
        if grad_threshold > 0.0 {
            cfg.grad_blowup_threshold = Some(grad_threshold);
        }
        let traj = evolve(&f.field, &cfg, &disc).ffi()?;
        let term = match traj.termination {
            Termination::ReachedTEnd => InlsTermination::ReachedTEnd,
            Termination::BlowupDetected => InlsTermination::BlowupDetected,
            Termination::BoundaryContaminated => InlsTermination::BoundaryContaminated,
            Termination::NumericalFailure => InlsTermination::NumericalFailure,
        };
        write_out(termination, "termination", term)?;
        write_out(out, "out", new_field(traj.final_state, f.b))
    })
}

/// Runs the verification suite (`0` quick, `1` default, `2` full) for
/// `N = 1` and the given `b`. Writes the number of checks and failures;
/// returns [`InlsStatus::CheckFailed`] if any check failed.
///
/// # Safety
/// `total` and `failed` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn inls_verify(suite: u32, b: f64, total: *mut usize, failed: *mut usize) -> InlsStatus {
    guard(|| {
        if total.is_null() {
            return Err(null("total"));
        }
        if failed.is_null() {
            return Err(null("failed"));
        }
        let suite = match suite {
            0 => Suite::Quick,
            1 => Suite::Default,
            2 => Suite::Full,
            other => return Err((InlsStatus::InvalidArgument, format!("unknown suite {other}"))),
        };
        let cfg = SuiteConfig {
            b,
            ..SuiteConfig::new(suite)
        };
        let reports = run_suite(&cfg).ffi()?;
        let bad: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
        total.write(reports.len());
        failed.write(bad.len());
        if bad.is_empty() {
            Ok(())
        } else {
            Err((InlsStatus::CheckFailed, format!("failed checks: {}", bad.join(", "))))
        }
    })
}
