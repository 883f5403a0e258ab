//! C ABI over `psmono`.
//!
//! Every function returns a [`PsmStatus`]. On failure the message is kept per
//! thread and read back with [`psm_last_error`]. Handles are opaque; free
//! them with the matching `*_free` function. Strings returned by the library
//! are released with [`psm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use psmono::fueter::{full_fueter_evaluate, FueterTable, Side};
use psmono::kernel::{kernel_e, slice_cauchy_kernel};
use psmono::mobius::{grav_generator, jacobian_weight, mobius_apply, GravGenerator, VahlenMatrix};
use psmono::{CliffordPolynomial, Error, MultiIndex, Multivector, SliceContext, SliceUnit};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Dimension = 3,
    Singularity = 4,
    Domain = 5,
    IndexOutOfRange = 6,
    Parse = 7,
    KindMismatch = 8,
    NotMonogenic = 9,
    DegreeCap = 10,
    Unsupported = 11,
    Pole = 12,
    Conditioning = 13,
    Refused = 14,
    Json = 15,
    Io = 16,
    Panic = 99,
}

impl From<&Error> for PsmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Dimension(_) => PsmStatus::Dimension,
            Error::Singularity(_) => PsmStatus::Singularity,
            Error::Domain(_) => PsmStatus::Domain,
            Error::IndexOutOfRange(_) => PsmStatus::IndexOutOfRange,
            Error::Parse(_) => PsmStatus::Parse,
            Error::KindMismatch(_) => PsmStatus::KindMismatch,
            Error::NotMonogenic { .. } => PsmStatus::NotMonogenic,
            Error::DegreeCap { .. } => PsmStatus::DegreeCap,
            Error::Unsupported(_) => PsmStatus::Unsupported,
            Error::Pole(_) => PsmStatus::Pole,
            Error::Conditioning(_) => PsmStatus::Conditioning,
            Error::Refused(_) => PsmStatus::Refused,
            Error::Json(_) => PsmStatus::Json,
            Error::Io(_) => PsmStatus::Io,
        }
    }
}

/// Clifford algebra element.
pub struct PsmMultivector(Multivector);

/// Polynomial with Clifford coefficients.
pub struct PsmPolynomial(CliffordPolynomial);

/// Vahlen matrix together with its provenance.
pub struct PsmVahlen(VahlenMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Internal failure: status plus message.
struct Fail(PsmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(PsmStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(PsmStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PsmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsmStatus::Ok,
        Ok(Err(Fail(s, m))) => {
            set_error(m);
            s
        }
        Err(p) => {
            let m = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {m}"));
            PsmStatus::Panic
        }
    }
}

unsafe fn slice_in<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn str_in<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(PsmStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Fail> {
    h.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s)
        .map_err(|_| Fail(PsmStatus::InvalidUtf8, "string contains NUL".into()))?
        .into_raw();
    Ok(())
}

fn context(p: usize, q: usize) -> Result<SliceContext, Fail> {
    Ok(SliceContext::new(p, q)?)
}

fn side(right: bool) -> Side {
    if right {
        Side::Right
    } else {
        Side::Left
    }
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn psm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn psm_clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn psm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- multivectors

/// Build an element of R_n from 2^n coefficients indexed by blade bitmask.
///
/// # Safety
/// `coeffs` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_mv_new(n: usize, coeffs: *const f64, len: usize, out: *mut *mut PsmMultivector) -> PsmStatus {
    guard(|| {
        let c = slice_in(coeffs, len, "coeffs")?;
        put(out, PsmMultivector(Multivector::from_coeffs(n, c.to_vec())?))
    })
}

/// Parse text such as `2 + 6*e2 - 3*e12` in R_n.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_mv_parse(n: usize, text: *const c_char, out: *mut *mut PsmMultivector) -> PsmStatus {
    guard(|| {
        let s = str_in(text, "text")?;
        put(out, PsmMultivector(Multivector::parse(n, s)?))
    })
}

/// # Safety
/// `mv` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn psm_mv_free(mv: *mut PsmMultivector) {
    if !mv.is_null() {
        drop(Box::from_raw(mv));
    }
}

/// Number of generators n; 0 for NULL.
///
/// # Safety
/// `mv` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn psm_mv_dim(mv: *const PsmMultivector) -> usize {
    mv.as_ref().map_or(0, |m| m.0.n())
}

/// Copy the 2^n coefficients into `out`, which holds `len` doubles.
///
/// # Safety
/// `mv` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn psm_mv_coeffs(mv: *const PsmMultivector, out: *mut f64, len: usize) -> PsmStatus {
    guard(|| {
        let m = &handle(mv, "multivector")?.0;
        let c = m.coeffs();
        if len < c.len() {
            return Err(Fail(PsmStatus::Dimension, format!("buffer holds {len}, need {}", c.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(c.as_ptr(), out, c.len());
        Ok(())
    })
}

/// Geometric product a b.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_mv_mul(
    a: *const PsmMultivector,
    b: *const PsmMultivector,
    out: *mut *mut PsmMultivector,
) -> PsmStatus {
    guard(|| {
        let (a, b) = (&handle(a, "a")?.0, &handle(b, "b")?.0);
        put(out, PsmMultivector(a.geometric_product(b)?))
    })
}

/// Text form; release with `psm_string_free`.
///
/// # Safety
/// `mv` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_mv_to_string(mv: *const PsmMultivector, out: *mut *mut c_char) -> PsmStatus {
    guard(|| put_string(out, handle(mv, "multivector")?.0.to_string()))
}

// ---- Fueter polynomials

/// Slice Fueter polynomial P_k for slice unit `eta` (q components).
///
/// # Safety
/// `k` holds `p + 1` entries, `eta` holds `q`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_fueter_polynomial(
    p: usize,
    q: usize,
    k: *const u32,
    eta: *const f64,
    right: bool,
    out: *mut *mut PsmPolynomial,
) -> PsmStatus {
    guard(|| {
        let c = context(p, q)?;
        let k = MultiIndex::new(slice_in(k, p + 1, "k")?.to_vec());
        let eta = SliceUnit::new(c, slice_in(eta, q, "eta")?)?;
        let order = k.order();
        let table = FueterTable::with_cap(c, &eta, side(right), order.max(1))?;
        let poly = table.get(&k)?;
        put(out, PsmPolynomial((*poly).clone()))
    })
}

/// # Safety
/// `poly` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn psm_poly_free(poly: *mut PsmPolynomial) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// Evaluate at `len` coordinates (slice or full, matching the polynomial).
///
/// # Safety
/// `poly` must be a live handle, `x` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn psm_poly_evaluate(
    poly: *const PsmPolynomial,
    x: *const f64,
    len: usize,
    out: *mut *mut PsmMultivector,
) -> PsmStatus {
    guard(|| {
        let poly = &handle(poly, "polynomial")?.0;
        put(out, PsmMultivector(poly.evaluate(slice_in(x, len, "x")?)?))
    })
}

/// JSON form; release with `psm_string_free`.
///
/// # Safety
/// `poly` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_poly_to_json(poly: *const PsmPolynomial, out: *mut *mut c_char) -> PsmStatus {
    guard(|| put_string(out, handle(poly, "polynomial")?.0.to_json().to_string()))
}

/// Fueter polynomial in full variables, P_k evaluated at x (p + q + 1 coordinates).
///
/// # Safety
/// `k` holds `p + 1` entries, `x` holds `p + q + 1`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_fueter_eval_full(
    p: usize,
    q: usize,
    k: *const u32,
    x: *const f64,
    right: bool,
    out: *mut *mut PsmMultivector,
) -> PsmStatus {
    guard(|| {
        let c = context(p, q)?;
        let k = MultiIndex::new(slice_in(k, p + 1, "k")?.to_vec());
        let x = c.point(slice_in(x, c.full_arity(), "x")?)?;
        put(out, PsmMultivector(full_fueter_evaluate(c, &k, &x, side(right))?))
    })
}

// ---- kernels

/// Cauchy kernel E at x (p + q + 1 coordinates).
///
/// # Safety
/// `x` holds `p + q + 1` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_kernel_e(p: usize, q: usize, x: *const f64, out: *mut *mut PsmMultivector) -> PsmStatus {
    guard(|| {
        let c = context(p, q)?;
        let x = c.point(slice_in(x, c.full_arity(), "x")?)?;
        put(out, PsmMultivector(kernel_e(c, &x)?))
    })
}

/// Slice Cauchy kernel S(y, x); `y` and `x` hold p + q + 1 doubles each.
///
/// # Safety
/// Pointers as documented; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_slice_cauchy_kernel(
    p: usize,
    q: usize,
    y: *const f64,
    x: *const f64,
    right: bool,
    out: *mut *mut PsmMultivector,
) -> PsmStatus {
    guard(|| {
        let c = context(p, q)?;
        let y = c.point(slice_in(y, c.full_arity(), "y")?)?;
        let x = c.point(slice_in(x, c.full_arity(), "x")?)?;
        put(out, PsmMultivector(slice_cauchy_kernel(c, &y, &x, side(right))?))
    })
}

// ---- Mobius

/// Generator matrix from text: `translation:1,0`, `rotation:e2`, `inversion`, `dilation:2`.
///
/// # Safety
/// `generator` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_mobius_generator(
    p: usize,
    q: usize,
    generator: *const c_char,
    out: *mut *mut PsmVahlen,
) -> PsmStatus {
    guard(|| {
        let c = context(p, q)?;
        let g = GravGenerator::parse(c, str_in(generator, "generator")?)?;
        put(out, PsmVahlen(grav_generator(c, g)?))
    })
}

/// Matrix product a b.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_mobius_mul(a: *const PsmVahlen, b: *const PsmVahlen, out: *mut *mut PsmVahlen) -> PsmStatus {
    guard(|| {
        let (a, b) = (&handle(a, "a")?.0, &handle(b, "b")?.0);
        put(out, PsmVahlen(a.mul(b)?))
    })
}

/// # Safety
/// `m` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn psm_vahlen_free(m: *mut PsmVahlen) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Image of the paravector x; `x` and `out` hold `len` = n + 1 doubles.
///
/// # Safety
/// `m` must be a live handle; `x`, `out` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn psm_mobius_apply(m: *const PsmVahlen, x: *const f64, out: *mut f64, len: usize) -> PsmStatus {
    guard(|| {
        let m = &handle(m, "matrix")?.0;
        let x = psmono::Paravector::new(slice_in(x, len, "x")?.to_vec())?;
        if x.n() != m.n() {
            return Err(Fail(PsmStatus::Dimension, format!("point has n = {}, matrix n = {}", x.n(), m.n())));
        }
        let y = mobius_apply(m, &x)?;
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(y.coords().as_ptr(), out, len);
        Ok(())
    })
}

/// Conformal weight J(M, x) for dimension parameter p.
///
/// # Safety
/// `m` must be a live handle; `x` holds `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn psm_mobius_jacobian(
    m: *const PsmVahlen,
    x: *const f64,
    len: usize,
    p: usize,
    out: *mut *mut PsmMultivector,
) -> PsmStatus {
    guard(|| {
        let m = &handle(m, "matrix")?.0;
        let x = psmono::Paravector::new(slice_in(x, len, "x")?.to_vec())?;
        if x.n() != m.n() {
            return Err(Fail(PsmStatus::Dimension, format!("point has n = {}, matrix n = {}", x.n(), m.n())));
        }
        put(out, PsmMultivector(jacobian_weight(m, &x, p)?))
    })
}
