//! C interface to `avlp-range`.
//!
//! Problems live behind an opaque [`AvlpProblem`] handle. Every function
//! returns an [`AvlpStatus`]; on failure the message is available from
//! [`avlp_last_error_message`] on the same thread. Matrices are dense and
//! row-major. Infinite values are returned as IEEE infinities.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use avlp_range::error::{Error, ErrorKind};
use avlp_range::gave::{solve_gave, GaveSystem};
use avlp_range::problem_file::parse_problem_str;
use avlp_range::range::{best_case, full_range, worst_lower_bound, worst_upper_bound};
use avlp_range::stability::{
    best_case_bstable, verify_b_stability, worst_case_bstable, Basis, StabilityStatus,
};
use avlp_range::{IntervalMatrix, IntervalVector, Options};
use nalgebra::{DMatrix, DVector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvlpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Numerical = 3,
    SizeCap = 4,
    /// A certificate the computation depends on could not be established.
    Inconclusive = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AvlpStability {
    VerifiedNondegenerate = 0,
    Verified = 1,
    Unknown = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvlpOptions {
    pub tol: f64,
    pub orthant_cap: usize,
    pub max_iters: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvlpRange {
    pub best: f64,
    pub worst_lower: f64,
    pub worst_upper: f64,
    /// The worst-case value when it is known exactly, otherwise NaN.
    pub worst: f64,
    /// Nonzero when the lower bound passed the tightness test.
    pub lower_tight: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvlpCertificate {
    pub status: AvlpStability,
    /// NaN when the check was not reached.
    pub primal_margin: f64,
    pub dual_margin: f64,
}

/// Opaque interval AVLP.
pub struct AvlpProblem {
    inner: avlp_range::AvlpProblem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(AvlpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match (&e, e.kind()) {
            (Error::UnknownRegularity | Error::Inconsistent(_), _) => AvlpStatus::Inconclusive,
            (_, ErrorKind::Input) => AvlpStatus::InvalidInput,
            (_, ErrorKind::SizeCap) => AvlpStatus::SizeCap,
            (_, ErrorKind::Numerical) => AvlpStatus::Numerical,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(AvlpStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AvlpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AvlpStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            AvlpStatus::Panic
        }
    }
}

unsafe fn handle<'a>(p: *const AvlpProblem) -> Result<&'a avlp_range::AvlpProblem, Fail> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("problem"))
}

unsafe fn options(o: *const AvlpOptions) -> Options {
    match o.as_ref() {
        Some(o) => Options {
            tol: o.tol,
            orthant_cap: o.orthant_cap,
            max_iters: o.max_iters,
        },
        None => Options::default(),
    }
}

unsafe fn out<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    ptr.as_mut().ok_or_else(|| null(what))
}

unsafe fn array<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

/// Writes `x` to an optional caller buffer of length `n`.
unsafe fn write_x(x: &DVector<f64>, dst: *mut f64) {
    if !dst.is_null() {
        slice::from_raw_parts_mut(dst, x.len()).copy_from_slice(x.as_slice());
    }
}

unsafe fn basis(p: &avlp_range::AvlpProblem, rows: *const usize, len: usize) -> Result<Basis, Fail> {
    if rows.is_null() {
        return Err(null("basis"));
    }
    let rows = slice::from_raw_parts(rows, len);
    Ok(Basis::from_one_based(rows, p.nrows(), p.nvars())?)
}

/// Default tolerance `1e-9`, orthant cap 16, 50 upper-bound iterations.
#[no_mangle]
pub extern "C" fn avlp_options_default() -> AvlpOptions {
    let o = Options::default();
    AvlpOptions {
        tol: o.tol,
        orthant_cap: o.orthant_cap,
        max_iters: o.max_iters,
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from this thread.
#[no_mangle]
pub extern "C" fn avlp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn avlp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a problem from endpoint arrays: `A` and `D` are `m x n` row-major,
/// `b` has length `m`, `c` length `n`.
#[no_mangle]
pub unsafe extern "C" fn avlp_problem_new(
    m: usize,
    n: usize,
    a_inf: *const f64,
    a_sup: *const f64,
    b_inf: *const f64,
    b_sup: *const f64,
    c_inf: *const f64,
    c_sup: *const f64,
    d_inf: *const f64,
    d_sup: *const f64,
    out_problem: *mut *mut AvlpProblem,
) -> AvlpStatus {
    guard(|| {
        let slot = out(out_problem, "out_problem")?;
        *slot = std::ptr::null_mut();
        if m == 0 || n == 0 {
            return Err(Fail(AvlpStatus::InvalidInput, "empty problem".into()));
        }
        let mat = |lo, hi, what| -> Result<IntervalMatrix, Fail> {
            let lo = DMatrix::from_row_slice(m, n, array(lo, m * n, what)?);
            let hi = DMatrix::from_row_slice(m, n, array(hi, m * n, what)?);
            IntervalMatrix::new(lo, hi).map_err(|e| Fail::from(e).prefixed(what))
        };
        let vec = |lo, hi, len, what| -> Result<IntervalVector, Fail> {
            let lo = DVector::from_column_slice(array(lo, len, what)?);
            let hi = DVector::from_column_slice(array(hi, len, what)?);
            IntervalVector::new(lo, hi).map_err(|e| Fail::from(e).prefixed(what))
        };
        let inner = avlp_range::AvlpProblem::new(
            mat(a_inf, a_sup, "A")?,
            vec(b_inf, b_sup, m, "b")?,
            vec(c_inf, c_sup, n, "c")?,
            mat(d_inf, d_sup, "D")?,
        )?;
        *slot = Box::into_raw(Box::new(AvlpProblem { inner }));
        Ok(())
    })
}

impl Fail {
    fn prefixed(self, what: &str) -> Fail {
        Fail(self.0, format!("{what}: {}", self.1))
    }
}

/// Parses a problem document (the CLI's JSON format).
#[no_mangle]
pub unsafe extern "C" fn avlp_problem_from_json(json: *const c_char, out_problem: *mut *mut AvlpProblem) -> AvlpStatus {
    guard(|| {
        let slot = out(out_problem, "out_problem")?;
        *slot = std::ptr::null_mut();
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(AvlpStatus::InvalidInput, format!("json is not UTF-8: {e}")))?;
        let inner = parse_problem_str(text)?.problem;
        *slot = Box::into_raw(Box::new(AvlpProblem { inner }));
        Ok(())
    })
}

/// Releases a problem. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn avlp_problem_free(problem: *mut AvlpProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

#[no_mangle]
pub unsafe extern "C" fn avlp_problem_dims(problem: *const AvlpProblem, m: *mut usize, n: *mut usize) -> AvlpStatus {
    guard(|| {
        let p = handle(problem)?;
        *out(m, "m")? = p.nrows();
        *out(n, "n")? = p.nvars();
        Ok(())
    })
}

/// Best-case optimal value. `x` (length n, may be NULL) receives the
/// optimizer, or the start of the ray when the value is `+inf`.
#[no_mangle]
pub unsafe extern "C" fn avlp_best_case(
    problem: *const AvlpProblem,
    opts: *const AvlpOptions,
    value: *mut f64,
    x: *mut f64,
) -> AvlpStatus {
    guard(|| {
        let p = handle(problem)?;
        let v = out(value, "value")?;
        let best = best_case(p, &options(opts))?;
        *v = best.value;
        write_x(&best.outcome.x, x);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn avlp_worst_lower_bound(
    problem: *const AvlpProblem,
    opts: *const AvlpOptions,
    value: *mut f64,
) -> AvlpStatus {
    guard(|| {
        let p = handle(problem)?;
        let v = out(value, "value")?;
        *v = worst_lower_bound(p, &options(opts))?.value;
        Ok(())
    })
}

/// Iterative upper bound; `iterations` (may be NULL) receives the number of
/// realizations solved.
#[no_mangle]
pub unsafe extern "C" fn avlp_worst_upper_bound(
    problem: *const AvlpProblem,
    opts: *const AvlpOptions,
    value: *mut f64,
    iterations: *mut usize,
) -> AvlpStatus {
    guard(|| {
        let p = handle(problem)?;
        let v = out(value, "value")?;
        let u = worst_upper_bound(p, &options(opts))?;
        *v = u.value;
        if let Some(it) = iterations.as_mut() {
            *it = u.log.len();
        }
        Ok(())
    })
}

/// All range quantities. On a partial failure the missing fields are NaN and
/// the status of the first failure is returned.
#[no_mangle]
pub unsafe extern "C" fn avlp_range(
    problem: *const AvlpProblem,
    opts: *const AvlpOptions,
    result: *mut AvlpRange,
) -> AvlpStatus {
    guard(|| {
        let p = handle(problem)?;
        let res = out(result, "result")?;
        let r = full_range(p, &options(opts));
        *res = AvlpRange {
            best: r.best.as_ref().map_or(f64::NAN, |b| b.value),
            worst_lower: r.worst_lower.as_ref().map_or(f64::NAN, |l| l.value),
            worst_upper: r.worst_upper.as_ref().map_or(f64::NAN, |u| u.value),
            worst: r.worst_exact().unwrap_or(f64::NAN),
            lower_tight: i32::from(r.lower_tight() == Some(true)),
        };
        match r.failures.first() {
            None => Ok(()),
            Some(f) => {
                let status = match f.kind {
                    ErrorKind::Input => AvlpStatus::InvalidInput,
                    ErrorKind::SizeCap => AvlpStatus::SizeCap,
                    ErrorKind::Numerical => AvlpStatus::Numerical,
                };
                Err(Fail(status, format!("{}: {}", f.field, f.message)))
            }
        }
    })
}

/// Stability certificate of the basis given by `len` 1-based row indices.
/// An unverified basis is reported through `result->status`, not as an error.
#[no_mangle]
pub unsafe extern "C" fn avlp_stability(
    problem: *const AvlpProblem,
    basis_rows: *const usize,
    len: usize,
    tol: f64,
    result: *mut AvlpCertificate,
) -> AvlpStatus {
    guard(|| {
        let p = handle(problem)?;
        let res = out(result, "result")?;
        let b = basis(p, basis_rows, len)?;
        let cert = verify_b_stability(p, &b, tol)?;
        *res = AvlpCertificate {
            status: match cert.status {
                StabilityStatus::VerifiedNondegenerate => AvlpStability::VerifiedNondegenerate,
                StabilityStatus::Verified => AvlpStability::Verified,
                StabilityStatus::Unknown => AvlpStability::Unknown,
            },
            primal_margin: cert.primal_margin.unwrap_or(f64::NAN),
            dual_margin: cert.dual_margin.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Best case under stability. Returns `Inconclusive` unless the basis is
/// certified.
#[no_mangle]
pub unsafe extern "C" fn avlp_best_case_bstable(
    problem: *const AvlpProblem,
    basis_rows: *const usize,
    len: usize,
    tol: f64,
    value: *mut f64,
) -> AvlpStatus {
    guard(|| {
        let p = handle(problem)?;
        let v = out(value, "value")?;
        let b = basis(p, basis_rows, len)?;
        let cert = verify_b_stability(p, &b, tol)?;
        if !cert.is_verified() {
            return Err(Fail(
                AvlpStatus::Inconclusive,
                format!("basis stability not verified: {}", cert.failed.unwrap_or_default()),
            ));
        }
        *v = best_case_bstable(p, &b, tol)?;
        Ok(())
    })
}

/// Worst case under nondegenerate stability. `x` (length n, may be NULL)
/// receives the solution of the basic absolute value system.
#[no_mangle]
pub unsafe extern "C" fn avlp_worst_case_bstable(
    problem: *const AvlpProblem,
    basis_rows: *const usize,
    len: usize,
    opts: *const AvlpOptions,
    value: *mut f64,
    x: *mut f64,
) -> AvlpStatus {
    guard(|| {
        let p = handle(problem)?;
        let v = out(value, "value")?;
        let opts = options(opts);
        let b = basis(p, basis_rows, len)?;
        let cert = verify_b_stability(p, &b, opts.tol)?;
        if cert.status != StabilityStatus::VerifiedNondegenerate {
            return Err(Fail(
                AvlpStatus::Inconclusive,
                format!(
                    "nondegenerate basis stability not verified: {}",
                    cert.failed.unwrap_or_else(|| "degenerate dual".into())
                ),
            ));
        }
        let w = worst_case_bstable(p, &b, opts.orthant_cap)?;
        *v = w.value;
        write_x(&w.x, x);
        Ok(())
    })
}

/// Solves `M x + F |x| = g` with `M`, `F` row-major `n x n`. `unique` (may be
/// NULL) is set to 1 when uniqueness was verified.
#[no_mangle]
pub unsafe extern "C" fn avlp_solve_gave(
    n: usize,
    m: *const f64,
    f: *const f64,
    g: *const f64,
    orthant_cap: usize,
    x: *mut f64,
    unique: *mut i32,
) -> AvlpStatus {
    guard(|| {
        if x.is_null() {
            return Err(null("x"));
        }
        let sys = GaveSystem::new(
            DMatrix::from_row_slice(n, n, array(m, n * n, "M")?),
            DMatrix::from_row_slice(n, n, array(f, n * n, "F")?),
            DVector::from_column_slice(array(g, n, "g")?),
        )?;
        let sol = solve_gave(&sys, orthant_cap)?;
        write_x(&sol.x, x);
        if let Some(u) = unique.as_mut() {
            *u = i32::from(sol.unique);
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_statuses() {
        let status = |e: Error| Fail::from(e).0;
        assert_eq!(status(Error::Input("x".into())), AvlpStatus::InvalidInput);
        assert_eq!(status(Error::SizeCap { n: 20, cap: 16 }), AvlpStatus::SizeCap);
        assert_eq!(status(Error::NumericalFailure { iterations: 3 }), AvlpStatus::Numerical);
        assert_eq!(status(Error::UnknownRegularity), AvlpStatus::Inconclusive);
        let nested = Error::Orthant {
            orthant: "(+)".into(),
            source: Box::new(Error::Dimension("d".into())),
        };
        assert_eq!(status(nested), AvlpStatus::InvalidInput);
    }

    #[test]
    fn panics_are_caught() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, AvlpStatus::Panic);
        let msg = unsafe { CStr::from_ptr(avlp_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("boom"));
    }
}
