//! C ABI over the `subdesign` library.
//!
//! Every fallible call returns an [`SdStatus`]. On failure the message is kept
//! per thread and read back with [`sd_last_error`]. Handles are opaque and
//! freed with their matching `_free` function; strings handed out by the
//! library are freed with [`sd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use subdesign::constructions::{build_design, find_omega, CoefficientScheme, Design, Family};
use subdesign::designs::{hp_check, lower_bound, measure, Scan};
use subdesign::grassmann::gaussian_binomial;
use subdesign::{Error, Field};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidField = 4,
    InvalidParameter = 5,
    BudgetExceeded = 6,
    HypothesisViolated = 7,
    Inconsistent = 8,
    Internal = 9,
}

/// A finite field GF(p^h).
pub struct SdField(Field);

/// A constructed moment-curve design.
pub struct SdDesign(Design);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SdStatus {
    match err {
        Error::Parse(_) => SdStatus::Parse,
        Error::NonPrimeCharacteristic(_)
        | Error::ReducibleModulus { .. }
        | Error::InvalidModulus(_)
        | Error::FieldTooLarge(_)
        | Error::FieldMismatch => SdStatus::InvalidField,
        Error::BudgetExceeded { .. } | Error::BaseCaseBudgetExceeded { .. } => {
            SdStatus::BudgetExceeded
        }
        Error::HypothesisViolated { .. } => SdStatus::HypothesisViolated,
        Error::Inconsistent(_) => SdStatus::Inconsistent,
        _ => SdStatus::InvalidParameter,
    }
}

struct Fail(SdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SdStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside subdesign".into());
            SdStatus::Internal
        }
    }
}

fn null() -> Fail {
    Fail(SdStatus::NullPointer, "null pointer argument".into())
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SdStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

fn string_out(s: String) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a field such as `"7"`, `"3^2"` or `"2^3:modulus=1,1,0,1"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sd_field_parse(spec: *const c_char, out: *mut *mut SdField) -> SdStatus {
    guard(|| {
        let out = out_arg(out)?;
        let field: Field = str_arg(spec)?.parse()?;
        *out = Box::into_raw(Box::new(SdField(field)));
        Ok(())
    })
}

/// Number of elements of the field.
///
/// # Safety
/// `field` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sd_field_order(field: *const SdField) -> u64 {
    field.as_ref().map_or(0, |f| f.0.order())
}

/// # Safety
/// `field` must come from [`sd_field_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sd_field_free(field: *mut SdField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Builds the design of `family` (`"tangent"`, `"diverted"` or `"secant"`).
/// A negative `omega` picks the smallest valid ω; tangent ignores it.
///
/// # Safety
/// `field` must be a live handle, `family` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sd_design_build(
    field: *const SdField,
    family: *const c_char,
    r: usize,
    s: usize,
    omega: i64,
    out: *mut *mut SdDesign,
) -> SdStatus {
    guard(|| {
        let out = out_arg(out)?;
        let field = &ref_arg(field)?.0;
        let family: Family = str_arg(family)?.parse()?;
        let omega = match family {
            Family::Tangent => None,
            _ if omega < 0 => Some(find_omega(field, r, s, family)?.ok_or_else(|| {
                Fail(
                    SdStatus::InvalidParameter,
                    format!("no valid omega for {family} over {field}"),
                )
            })?),
            _ => Some(field.element(omega as u64)?),
        };
        let scheme = CoefficientScheme::new(field, family, r, s, omega)?;
        scheme.validate()?;
        *out = Box::into_raw(Box::new(SdDesign(build_design(&scheme)?)));
        Ok(())
    })
}

/// Number of members.
///
/// # Safety
/// `design` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sd_design_len(design: *const SdDesign) -> usize {
    design.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `design` must come from [`sd_design_build`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sd_design_free(design: *mut SdDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// JSON form of the design, the same document `subdesign construct` prints.
/// Free the result with [`sd_string_free`].
///
/// # Safety
/// `design` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sd_design_to_json(
    design: *const SdDesign,
    out: *mut *mut c_char,
) -> SdStatus {
    guard(|| {
        let out = out_arg(out)?;
        let design = &ref_arg(design)?.0;
        *out = string_out(subdesign::cli::design_json(design).to_string());
        Ok(())
    })
}

/// Measures the weak and strong parameters against codimension-`s`
/// subspaces. `samples == 0` scans exhaustively; otherwise `samples` random
/// subspaces drawn from `seed` give lower bounds.
///
/// # Safety
/// `design` must be a live handle; `weak` and `strong` writable.
#[no_mangle]
pub unsafe extern "C" fn sd_design_measure(
    design: *const SdDesign,
    samples: u64,
    seed: u64,
    budget: u64,
    weak: *mut usize,
    strong: *mut usize,
) -> SdStatus {
    guard(|| {
        let weak = out_arg(weak)?;
        let strong = out_arg(strong)?;
        let design = &ref_arg(design)?.0;
        let scan = if samples == 0 {
            Scan::exhaustive()
        } else {
            Scan::sampled(samples, seed)
        };
        let m = measure(
            &design.subspaces(),
            design.scheme().s(),
            &scan.with_budget(budget),
        )?;
        *weak = m.weak.value;
        *strong = m.strong.value;
        Ok(())
    })
}

/// Whether the members form a 1-generator set, scanned exhaustively.
/// `equivalence_failed` is set when there are more members than field
/// elements, where a missing blocker no longer follows.
///
/// # Safety
/// `design` must be a live handle; the out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn sd_design_hp_check(
    design: *const SdDesign,
    budget: u64,
    is_generator: *mut bool,
    equivalence_failed: *mut bool,
) -> SdStatus {
    guard(|| {
        let is_generator = out_arg(is_generator)?;
        let equivalence_failed = out_arg(equivalence_failed)?;
        let design = &ref_arg(design)?.0;
        let v = hp_check(&design.subspaces(), budget)?;
        *is_generator = v.is_generator;
        *equivalence_failed = v.equivalence_hypothesis_failed;
        Ok(())
    })
}

/// Lower bounds on the size of a `k`-generator set for degree `d`. Pass
/// `q == 0` for no field-size cap.
///
/// # Safety
/// `finite_bound` and `closed_field_bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_lower_bound(
    d: u64,
    k: u64,
    q: u64,
    finite_bound: *mut u64,
    closed_field_bound: *mut u64,
) -> SdStatus {
    guard(|| {
        let finite_bound = out_arg(finite_bound)?;
        let closed_field_bound = out_arg(closed_field_bound)?;
        let lb = lower_bound(d, k, (q != 0).then_some(q))?;
        *finite_bound = lb.finite_bound;
        *closed_field_bound = lb.closed_field_bound;
        Ok(())
    })
}

/// Gaussian binomial `[m choose r]_q` as a decimal string. Free the result
/// with [`sd_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_gaussian_binomial(
    m: usize,
    r: usize,
    q: u64,
    out: *mut *mut c_char,
) -> SdStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = string_out(gaussian_binomial(m, r, q)?.to_string());
        Ok(())
    })
}
