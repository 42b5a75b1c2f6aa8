//! C ABI over `riesz`: case handles, identity verification, the Meijer G
//! kernel and the error term of the cosine sums.
//!
//! Every entry point returns an [`RzStatus`]. On failure the message is kept
//! per thread and read back with [`rz_last_error`]. Panics are caught at the
//! boundary and reported as [`RzStatus::Panic`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use riesz::arith::FieldContext;
use riesz::bigo::error_term;
use riesz::characters::{character_group, DirichletCharacter};
use riesz::identities::{verify, RieszCase, Theta, TruncationPolicy, VerificationReport};
use riesz::meijer::{g_kernel, MeijerKernelSpec};
use riesz::Error;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

/// Result codes shared by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RzStatus {
    Ok = 0,
    InvalidArgument = 1,
    Domain = 2,
    Pole = 3,
    Hypothesis = 4,
    NonConvergence = 5,
    DegenerateGrid = 6,
    NullPointer = 7,
    Panic = 8,
}

/// Which identity a handle evaluates.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RzCaseKind {
    Voronoi = 0,
    Ramanujan = 1,
    T3_1 = 2,
    T3_2 = 3,
    T3_3 = 4,
    T5_1 = 5,
    T5_2 = 6,
    T5_3 = 7,
    Corollary = 8,
}

/// Parameters for [`rz_case_new`]. Fields a case does not use are ignored.
///
/// `disc` is the field discriminant for the T3 cases (0 selects the
/// rationals) and the character discriminant D for T5 and the corollary.
/// `q`, `h` give theta = h/q; `q`, `chi_index` pick the character for T3_1
/// and T5_1.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RzCaseParams {
    pub kind: RzCaseKind,
    pub disc: i64,
    pub q: u64,
    pub h: u64,
    pub chi_index: u64,
    pub rho: f64,
}

/// Flat view of a verification run. `series` is the last partial of the
/// series side.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RzReport {
    pub x: f64,
    pub lhs: f64,
    pub lhs_im: f64,
    pub rhs_main: f64,
    pub rhs_main_im: f64,
    pub series: f64,
    pub series_im: f64,
    pub series_cap: f64,
    pub residual: f64,
    pub tail_estimate: f64,
    pub kernel_error: f64,
    pub converged: bool,
}

/// Opaque identity handle.
pub struct RzCase {
    inner: RieszCase,
}

fn status_of(e: &Error) -> RzStatus {
    match e {
        Error::InvalidArgument(_) => RzStatus::InvalidArgument,
        Error::Domain(_) => RzStatus::Domain,
        Error::Pole(_) => RzStatus::Pole,
        Error::Hypothesis(_) => RzStatus::Hypothesis,
        Error::NonConvergence { .. } => RzStatus::NonConvergence,
        Error::DegenerateGrid(_) => RzStatus::DegenerateGrid,
    }
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|m| *m.borrow_mut() = msg.into());
}

fn fail(e: &Error) -> RzStatus {
    set_error(e.to_string());
    status_of(e)
}

fn null(what: &str) -> RzStatus {
    set_error(format!("null pointer: {what}"));
    RzStatus::NullPointer
}

fn guarded(body: impl FnOnce() -> RzStatus) -> RzStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RzStatus::Panic
        }
    }
}

fn character(q: u64, index: u64) -> Result<DirichletCharacter, Error> {
    character_group(q)?
        .into_iter()
        .find(|c| c.index() == index)
        .ok_or_else(|| Error::InvalidArgument(format!("character index must lie in [0, {}], got {index}", q.saturating_sub(2))))
}

fn field(disc: i64) -> Result<FieldContext, Error> {
    if disc == 0 {
        Ok(FieldContext::rational())
    } else {
        FieldContext::real_quadratic(disc)
    }
}

fn build(p: &RzCaseParams) -> Result<RieszCase, Error> {
    let theta = || Theta::new(p.h, p.q);
    match p.kind {
        RzCaseKind::Voronoi => Ok(RieszCase::voronoi()),
        RzCaseKind::Ramanujan => Ok(RieszCase::ramanujan(theta()?)),
        RzCaseKind::T3_1 => RieszCase::t3_1(field(p.disc)?, character(p.q, p.chi_index)?, p.rho),
        RzCaseKind::T3_2 => RieszCase::t3_2(field(p.disc)?, p.rho),
        RzCaseKind::T3_3 => RieszCase::t3_3(field(p.disc)?, theta()?, p.rho),
        RzCaseKind::T5_1 => RieszCase::t5_1(p.disc, character(p.q, p.chi_index)?, p.rho),
        RzCaseKind::T5_2 => RieszCase::t5_2(p.disc, p.rho),
        RzCaseKind::T5_3 => RieszCase::t5_3(p.disc, theta()?, p.rho),
        RzCaseKind::Corollary => RieszCase::corollary(p.disc, theta()?, p.rho),
    }
}

fn flatten(r: &VerificationReport, converged: bool) -> RzReport {
    let last = r.last_partial();
    RzReport {
        x: r.x,
        lhs: r.lhs,
        lhs_im: r.lhs_im,
        rhs_main: r.rhs_main,
        rhs_main_im: r.rhs_main_im,
        series: last.re,
        series_im: last.im,
        series_cap: r.rhs_series_partials.last().map_or(0.0, |p| p.0),
        residual: r.residual,
        tail_estimate: r.tail_estimate,
        kernel_error: r.kernel_error,
        converged: converged && r.converged,
    }
}

/// Builds a case handle. On success `*out` owns a handle to release with
/// [`rz_case_free`]; on failure `*out` is null.
///
/// # Safety
/// `params` must point to a valid `RzCaseParams` and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rz_case_new(params: *const RzCaseParams, out: *mut *mut RzCase) -> RzStatus {
    guarded(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        let Some(p) = params.as_ref() else {
            return null("params");
        };
        match build(p) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RzCase { inner }));
                RzStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a handle from [`rz_case_new`]. Null is ignored.
///
/// # Safety
/// `case` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rz_case_free(case: *mut RzCase) {
    if !case.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(case))));
    }
}

/// Evaluates both sides of the identity at `x` with adaptive smooth
/// summation. `max_n` caps the series length; 0 keeps the default.
///
/// On `RzStatus::NonConvergence` the best report found is still written to
/// `*out` when one exists, with `converged` false.
///
/// # Safety
/// `case` must be a live handle and `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn rz_verify(case: *const RzCase, x: f64, tol: f64, max_n: u64, out: *mut RzReport) -> RzStatus {
    guarded(|| {
        let Some(case) = case.as_ref() else {
            return null("case");
        };
        if out.is_null() {
            return null("out");
        }
        let mut trunc = TruncationPolicy::default();
        if max_n > 0 {
            trunc.max_n = max_n;
        }
        match verify(&case.inner, x, &trunc, tol) {
            Ok(r) => {
                *out = flatten(&r, true);
                RzStatus::Ok
            }
            Err(e) => {
                if let Error::NonConvergence { best: Some(r), .. } = &e {
                    *out = flatten(r, false);
                }
                fail(&e)
            }
        }
    })
}

/// The Meijer G kernel of order `m` at `y`, with its estimated absolute
/// error. `abs_error` may be null.
///
/// # Safety
/// `value` must point to writable storage; `abs_error` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn rz_g_kernel(m: u32, rho: f64, y: f64, value: *mut f64, abs_error: *mut f64) -> RzStatus {
    guarded(|| {
        if value.is_null() {
            return null("value");
        }
        match MeijerKernelSpec::new(m, rho).and_then(|spec| g_kernel(&spec, y)) {
            Ok(k) => {
                *value = k.value;
                if !abs_error.is_null() {
                    *abs_error = k.est_abs_error;
                }
                RzStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// LHS minus the main term at `x`, for the T3_3 and T5_3 cosine sums.
///
/// # Safety
/// `case` must be a live handle and `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn rz_error_term(case: *const RzCase, x: f64, out: *mut f64) -> RzStatus {
    guarded(|| {
        let Some(case) = case.as_ref() else {
            return null("case");
        };
        if out.is_null() {
            return null("out");
        }
        match error_term(&case.inner, x) {
            Ok(v) => {
                *out = v;
                RzStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Copies the calling thread's last error message into `buf` as a
/// NUL-terminated string, truncating to `len - 1` bytes. Returns the length
/// the full message needs including the terminator, so a caller can pass a
/// null `buf` to size it.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rz_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|m| {
        let msg = m.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len() + 1
    })
}
