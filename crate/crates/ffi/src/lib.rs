//! C ABI for `decoshield`.
//!
//! Every fallible function returns a [`DsStatus`] and writes results through
//! out-pointers. On failure the message is available from
//! [`ds_last_error_message`] on the same thread. Handles are opaque and must be
//! released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use decoshield::channels::{apply_channel, apply_via_dilation, gad_channel, GadParams};
use decoshield::entangle::{optimal_parameters, ConcurrenceReport, EntangledInput, Regime};
use decoshield::linalg::{wootters_concurrence, ComplexMatrix, DensityMatrix};
use decoshield::qubit::{
    average_fidelity_six, bb84_error_rate, optimal_strengths, protect_equatorial,
};
use decoshield::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotPhysical = 4,
    PostSelectionFailed = 5,
    Degenerate = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsRegime {
    Interior = 0,
    ProjectiveLimit = 1,
    NoEntanglement = 2,
}

/// Optimal single-qubit strengths and the maximal fidelity.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DsQubitOptimum {
    pub m: f64,
    pub n: f64,
    pub f_max: f64,
    pub projective: bool,
}

/// Fidelities of the six axis states and their average.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DsSixState {
    pub f0: f64,
    pub f1: f64,
    pub fe: f64,
    pub favg: f64,
}

/// Plain copy of a two-qubit optimum report.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DsReportValues {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda2_max: f64,
    pub m: f64,
    pub n1: f64,
    pub n2: f64,
    pub h: f64,
    pub alpha_sq_opt: f64,
    pub success_prob: f64,
    pub regime: DsRegime,
}

/// Opaque density matrix of dimension 2 or 4.
pub struct DsDensityMatrix {
    inner: DensityMatrix,
}

/// Opaque two-qubit optimum report.
pub struct DsConcurrenceReport {
    inner: ConcurrenceReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> DsStatus {
    match err {
        Error::DimensionMismatch { .. }
        | Error::UnsupportedDimension(_)
        | Error::EntryCount { .. } => DsStatus::DimensionMismatch,
        Error::NotHermitian(_)
        | Error::InvalidTrace(_)
        | Error::NotPositive(_)
        | Error::NotPure(_) => DsStatus::NotPhysical,
        Error::OutOfRange { .. } | Error::NotNormalized(_) => DsStatus::InvalidArgument,
        Error::PostSelectionFailed(_) => DsStatus::PostSelectionFailed,
        Error::Degenerate(_) => DsStatus::Degenerate,
    }
}

/// Runs `f`, recording errors and panics as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (DsStatus, String)>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DsStatus::Panic
        }
    }
}

fn lib_err(err: Error) -> (DsStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(name: &str) -> (DsStatus, String) {
    (DsStatus::NullPointer, format!("{name} is null"))
}

fn params(p: f64, r: f64) -> Result<GadParams, (DsStatus, String)> {
    GadParams::new(p, r).map_err(lib_err)
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), (DsStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_complex(
    re: *const f64,
    im: *const f64,
    len: usize,
) -> Result<Vec<Complex64>, (DsStatus, String)> {
    if re.is_null() {
        return Err(null("re"));
    }
    let re = slice::from_raw_parts(re, len);
    let im = if im.is_null() {
        vec![0.0; len]
    } else {
        slice::from_raw_parts(im, len).to_vec()
    };
    Ok(re
        .iter()
        .zip(im)
        .map(|(&a, b)| Complex64::new(a, b))
        .collect())
}

unsafe fn handle<'a, T>(h: *const T, name: &str) -> Result<&'a T, (DsStatus, String)> {
    h.as_ref().ok_or_else(|| null(name))
}

/// Message of the last failed call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Density matrix `|ψ⟩⟨ψ|` from `len` (2 or 4) amplitudes; `im` may be null.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `len` readable doubles; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_density_from_pure(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut DsDensityMatrix,
) -> DsStatus {
    guard(|| {
        let amps = read_complex(re, im, len)?;
        let rho = DensityMatrix::from_pure(&amps).map_err(lib_err)?;
        write(
            out,
            Box::into_raw(Box::new(DsDensityMatrix { inner: rho })),
            "out",
        )
    })
}

/// Density matrix from `dim*dim` row-major entries; validated for
/// Hermiticity, unit trace and positivity. `im` may be null.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `dim*dim` readable doubles;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_density_from_entries(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut DsDensityMatrix,
) -> DsStatus {
    guard(|| {
        let entries = read_complex(re, im, dim.saturating_mul(dim))?;
        let matrix = ComplexMatrix::new(dim, entries).map_err(lib_err)?;
        let rho = DensityMatrix::new(matrix).map_err(lib_err)?;
        write(
            out,
            Box::into_raw(Box::new(DsDensityMatrix { inner: rho })),
            "out",
        )
    })
}

/// Dimension of the matrix (2 or 4), or 0 for a null handle.
///
/// # Safety
/// `rho` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ds_density_dim(rho: *const DsDensityMatrix) -> usize {
    rho.as_ref().map_or(0, |h| h.inner.dim())
}

/// Copies the row-major entries into `re` and `im` (each `len >= dim*dim`).
///
/// # Safety
/// `rho` must be a live handle; `re` and `im` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ds_density_entries(
    rho: *const DsDensityMatrix,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> DsStatus {
    guard(|| {
        let h = handle(rho, "rho")?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let entries = h.inner.matrix().entries();
        if len < entries.len() {
            return Err((
                DsStatus::DimensionMismatch,
                format!("buffer holds {len} entries, need {}", entries.len()),
            ));
        }
        let (re, im) = (
            slice::from_raw_parts_mut(re, len),
            slice::from_raw_parts_mut(im, len),
        );
        for (k, z) in entries.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Releases a density-matrix handle; null is ignored.
///
/// # Safety
/// `rho` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ds_density_free(rho: *mut DsDensityMatrix) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Applies the GAD channel `(p, r)` to a single-qubit state via its Kraus operators.
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_gad_apply(
    p: f64,
    r: f64,
    rho: *const DsDensityMatrix,
    out: *mut *mut DsDensityMatrix,
) -> DsStatus {
    guard(|| {
        let h = handle(rho, "rho")?;
        let result = apply_channel(&gad_channel(params(p, r)?), &h.inner).map_err(lib_err)?;
        write(
            out,
            Box::into_raw(Box::new(DsDensityMatrix { inner: result })),
            "out",
        )
    })
}

/// Applies the GAD channel `(p, r)` through its environment dilation.
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_gad_apply_dilation(
    p: f64,
    r: f64,
    rho: *const DsDensityMatrix,
    out: *mut *mut DsDensityMatrix,
) -> DsStatus {
    guard(|| {
        let h = handle(rho, "rho")?;
        let result = apply_via_dilation(params(p, r)?, &h.inner).map_err(lib_err)?;
        write(
            out,
            Box::into_raw(Box::new(DsDensityMatrix { inner: result })),
            "out",
        )
    })
}

/// Wootters concurrence of a two-qubit state.
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_wootters_concurrence(
    rho: *const DsDensityMatrix,
    out: *mut f64,
) -> DsStatus {
    guard(|| {
        let h = handle(rho, "rho")?;
        let c = wootters_concurrence(&h.inner).map_err(lib_err)?;
        write(out, c, "out")
    })
}

/// Optimal single-qubit strengths for equatorial states.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_qubit_optimal(p: f64, r: f64, out: *mut DsQubitOptimum) -> DsStatus {
    guard(|| {
        let opt = optimal_strengths(params(p, r)?).map_err(lib_err)?;
        write(
            out,
            DsQubitOptimum {
                m: opt.m,
                n: opt.n,
                f_max: opt.f_max,
                projective: opt.projective,
            },
            "out",
        )
    })
}

/// Fidelity and success probability of the equatorial state at phase `phi`.
///
/// # Safety
/// `fidelity` and `success_prob` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_qubit_protect(
    p: f64,
    r: f64,
    m: f64,
    n: f64,
    phi: f64,
    fidelity: *mut f64,
    success_prob: *mut f64,
) -> DsStatus {
    guard(|| {
        if fidelity.is_null() || success_prob.is_null() {
            return Err(null("fidelity/success_prob"));
        }
        let res = protect_equatorial(params(p, r)?, m, n, phi).map_err(lib_err)?;
        write(fidelity, res.fidelity, "fidelity")?;
        write(success_prob, res.success_prob, "success_prob")
    })
}

/// BB84 error rate over the four equatorial signal states.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_bb84_error_rate(
    p: f64,
    r: f64,
    m: f64,
    n: f64,
    out: *mut f64,
) -> DsStatus {
    guard(|| {
        let re = bb84_error_rate(params(p, r)?, m, n).map_err(lib_err)?;
        write(out, re, "out")
    })
}

/// Six-state fidelities and their average.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_six_state(
    p: f64,
    r: f64,
    m: f64,
    n: f64,
    out: *mut DsSixState,
) -> DsStatus {
    guard(|| {
        let rep = average_fidelity_six(params(p, r)?, m, n).map_err(lib_err)?;
        write(
            out,
            DsSixState {
                f0: rep.f0,
                f1: rep.f1,
                fe: rep.fe,
                favg: rep.favg,
            },
            "out",
        )
    })
}

/// Optimal two-qubit protection for input `√a|00⟩ + √(1−a)|11⟩`, `a = alpha_sq`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_entangle_optimal(
    p1: f64,
    r1: f64,
    p2: f64,
    r2: f64,
    alpha_sq: f64,
    out: *mut *mut DsConcurrenceReport,
) -> DsStatus {
    guard(|| {
        let input = EntangledInput::from_alpha_sq(alpha_sq).map_err(lib_err)?;
        let report =
            optimal_parameters(&input, params(p1, r1)?, params(p2, r2)?).map_err(lib_err)?;
        write(
            out,
            Box::into_raw(Box::new(DsConcurrenceReport { inner: report })),
            "out",
        )
    })
}

/// Copies every field of the report into `out`.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ds_report_values(
    report: *const DsConcurrenceReport,
    out: *mut DsReportValues,
) -> DsStatus {
    guard(|| {
        let r = &handle(report, "report")?.inner;
        let regime = match r.regime {
            Regime::Interior => DsRegime::Interior,
            Regime::ProjectiveLimit => DsRegime::ProjectiveLimit,
            Regime::NoEntanglement => DsRegime::NoEntanglement,
        };
        write(
            out,
            DsReportValues {
                lambda1: r.lambda1,
                lambda2: r.lambda2,
                lambda2_max: r.lambda2_max,
                m: r.m_opt,
                n1: r.n1_opt,
                n2: r.n2_opt,
                h: r.h,
                alpha_sq_opt: r.alpha_sq_opt,
                success_prob: r.success_prob,
                regime,
            },
            "out",
        )
    })
}

/// Releases a report handle; null is ignored.
///
/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ds_report_free(report: *mut DsConcurrenceReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
