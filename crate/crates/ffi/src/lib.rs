//! C interface to `formula_lift`.
//!
//! Formulas and polytopes cross the boundary as opaque handles that the caller
//! releases with the matching `*_free` function. Every fallible call returns a
//! [`FlStatus`]; on failure `fl_last_error` describes the most recent error of
//! the calling thread. Rational numbers travel as text (`3`, `-1/2`), vectors as
//! comma separated lists. Strings returned through `char **` belong to the
//! caller and are released with `fl_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use formula_lift::lp::{self, LpStatus, Sense};
use formula_lift::polytope::iterate_lift;
use formula_lift::rational::{fmt_rational, parse_vec};
use formula_lift::{Error, ExtendedFormulation, Formula};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Format = 4,
    Dimension = 5,
    LimitExceeded = 6,
    NotReduced = 7,
    EmptyInput = 8,
    Unbounded = 9,
    Infeasible = 10,
    Invalid = 11,
    Panic = 12,
}

/// A parsed Boolean formula.
pub struct FlFormula(Formula);

/// An extended formulation `{x : ∃y, Ay ≥ b, x = Ty + t}`.
pub struct FlPolytope(ExtendedFormulation);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FlStatus {
    match e {
        Error::Syntax { .. } | Error::VarOutOfRange { .. } => FlStatus::Syntax,
        Error::Format { .. } => FlStatus::Format,
        Error::Dimension { .. } => FlStatus::Dimension,
        Error::LimitExceeded { .. } => FlStatus::LimitExceeded,
        Error::NotReduced => FlStatus::NotReduced,
        Error::EmptyInput => FlStatus::EmptyInput,
        Error::Unbounded => FlStatus::Unbounded,
        Error::ZeroRow(_) | Error::Invalid(_) => FlStatus::Invalid,
    }
}

struct Fail(FlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> FlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FlStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(FlStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(FlStatus::NullArgument, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(FlStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn fl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a formula over `n` variables; `n = 0` infers it from the largest index.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_parse(text: *const c_char, n: usize, out: *mut *mut FlFormula) -> FlStatus {
    guard(|| {
        let t = c_str(text, "text")?;
        let f = if n == 0 { Formula::parse_infer(t)? } else { Formula::parse(t, n)? };
        put(out, Box::into_raw(Box::new(FlFormula(f))))
    })
}

/// # Safety
/// `f` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_free(f: *mut FlFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Equivalent formula with negations only on literals.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_reduce(f: *const FlFormula, out: *mut *mut FlFormula) -> FlStatus {
    guard(|| {
        let f = get(f, "formula")?;
        put(out, Box::into_raw(Box::new(FlFormula(f.0.reduce()))))
    })
}

/// Number of literal leaves.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_size(f: *const FlFormula, out: *mut usize) -> FlStatus {
    guard(|| put(out, get(f, "formula")?.0.size()))
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_nvars(f: *const FlFormula, out: *mut usize) -> FlStatus {
    guard(|| put(out, get(f, "formula")?.0.n()))
}

/// Canonical text of the formula.
///
/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_to_string(f: *const FlFormula, out: *mut *mut c_char) -> FlStatus {
    guard(|| put(out, owned_string(get(f, "formula")?.0.to_string())))
}

/// Evaluates at `x`, given as `len` bytes that are 0 or nonzero.
///
/// # Safety
/// `x` must point to `len` readable bytes and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn fl_formula_evaluate(
    f: *const FlFormula,
    x: *const u8,
    len: usize,
    out: *mut bool,
) -> FlStatus {
    guard(|| {
        let f = get(f, "formula")?;
        if x.is_null() && len > 0 {
            return Err(Fail(FlStatus::NullArgument, "x is null".into()));
        }
        let bits: Vec<bool> = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(x, len).iter().map(|&b| b != 0).collect()
        };
        put(out, f.0.evaluate(&bits)?)
    })
}

/// The unit cube `[0,1]^n`. Never fails.
#[no_mangle]
pub extern "C" fn fl_polytope_cube(n: usize) -> *mut FlPolytope {
    Box::into_raw(Box::new(FlPolytope(ExtendedFormulation::cube(n))))
}

/// Reads the EF text format.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_polytope_parse(text: *const c_char, out: *mut *mut FlPolytope) -> FlStatus {
    guard(|| {
        let ef = ExtendedFormulation::parse_text(c_str(text, "text")?)?;
        put(out, Box::into_raw(Box::new(FlPolytope(ef))))
    })
}

/// # Safety
/// `p` must come from this library and not have been freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fl_polytope_free(p: *mut FlPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the EF text format.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_polytope_to_text(p: *const FlPolytope, out: *mut *mut c_char) -> FlStatus {
    guard(|| put(out, owned_string(get(p, "polytope")?.0.to_text())))
}

/// Number of inequality rows.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_polytope_rows(p: *const FlPolytope, out: *mut usize) -> FlStatus {
    guard(|| put(out, get(p, "polytope")?.0.ef_rows()))
}

/// `φ^rounds(Q)`; the formula must be reduced.
///
/// # Safety
/// `f` and `q` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_lift(
    f: *const FlFormula,
    q: *const FlPolytope,
    rounds: usize,
    out: *mut *mut FlPolytope,
) -> FlStatus {
    guard(|| {
        let f = get(f, "formula")?;
        let q = get(q, "polytope")?;
        let ef = iterate_lift(&f.0, &q.0, rounds)?;
        put(out, Box::into_raw(Box::new(FlPolytope(ef))))
    })
}

/// Optimal value of `c·x` over the polytope, as exact text. Returns
/// `FL_STATUS_INFEASIBLE` or `FL_STATUS_UNBOUNDED` when there is no optimum.
///
/// # Safety
/// `p` must be a live handle, `objective` a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_optimize(
    p: *const FlPolytope,
    objective: *const c_char,
    minimize: bool,
    out: *mut *mut c_char,
) -> FlStatus {
    guard(|| {
        let p = get(p, "polytope")?;
        let c = parse_vec(c_str(objective, "objective")?)?;
        let sense = if minimize { Sense::Min } else { Sense::Max };
        let outcome = match lp::optimize(&p.0, &c, sense) {
            Err(Error::EmptyInput) => None,
            other => Some(other?),
        };
        match outcome {
            Some(o) if o.status == LpStatus::Optimal => {
                put(out, owned_string(fmt_rational(o.value.as_ref().expect("optimal value"))))
            }
            _ => Err(Fail(FlStatus::Infeasible, "polytope is empty".into())),
        }
    })
}

/// Whether the point (comma separated rationals) lies in the polytope.
///
/// # Safety
/// `p` must be a live handle, `point` a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_contains(p: *const FlPolytope, point: *const c_char, out: *mut bool) -> FlStatus {
    guard(|| {
        let p = get(p, "polytope")?;
        let x = parse_vec(c_str(point, "point")?)?;
        put(out, lp::contains_point(&p.0, &x)?)
    })
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_is_empty(p: *const FlPolytope, out: *mut bool) -> FlStatus {
    guard(|| put(out, lp::is_empty(&get(p, "polytope")?.0).empty))
}
