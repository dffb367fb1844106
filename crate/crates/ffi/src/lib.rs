//! C ABI for qukit.
//!
//! States cross the boundary as opaque handles (`QkState`, `QkSymState`) that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a `QkStatus`; on failure `qk_last_error_message` describes the
//! error for the calling thread. Basis labels are 1..K as in the Rust API.
//! Compressed symmetric coefficients use the unnormalized Dicke convention.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use num_complex::Complex64;
use qukit::io::{parse_any, state_to_json, sym_to_json, AnyState};
use qukit::{
    brute_force_is_product, classify_symmetric, coherent_displace, coherent_product, dicke_normalized, expand,
    is_product, project_symmetric, symmetric_witness, CoherentParams, DisplacementParams, Error, Occupation,
    ProductFactors, StateVector, SymStateCompressed, Verdict,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkStatus {
    Ok = 0,
    NullPointer = 1,
    Index = 2,
    Shape = 3,
    DegenerateInput = 4,
    Size = 5,
    ChartSingularity = 6,
    WitnessFailure = 7,
    InvalidParam = 8,
    Format = 9,
    Io = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QkComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for QkComplex {
    fn from(c: Complex64) -> Self {
        QkComplex { re: c.re, im: c.im }
    }
}

impl From<QkComplex> for Complex64 {
    fn from(c: QkComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// Full-space state handle.
pub struct QkState(StateVector);

/// Compressed symmetric state handle.
pub struct QkSymState(SymStateCompressed);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

struct Failure(QkStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let status = match &err {
            Error::Index(_) => QkStatus::Index,
            Error::Shape(_) => QkStatus::Shape,
            Error::DegenerateInput(_) => QkStatus::DegenerateInput,
            Error::Size(_) => QkStatus::Size,
            Error::ChartSingularity(_) => QkStatus::ChartSingularity,
            Error::WitnessFailure { .. } => QkStatus::WitnessFailure,
            Error::InvalidParam(_) => QkStatus::InvalidParam,
            Error::Format(_) => QkStatus::Format,
            Error::Io(_) => QkStatus::Io,
        };
        Failure(status, err.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QkStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QkStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            QkStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn complex_vec(p: *const QkComplex, len: usize, what: &str) -> Result<Vec<Complex64>, Failure> {
    Ok(as_slice(p, len, what)?.iter().map(|&c| c.into()).collect())
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn copy_out(values: &[Complex64], out: *mut QkComplex, len: usize) -> Result<(), Failure> {
    if len != values.len() {
        return Err(Failure(QkStatus::Shape, format!("buffer holds {len} entries, need {}", values.len())));
    }
    if len == 0 {
        return Ok(());
    }
    if out.is_null() {
        return Err(null("output buffer"));
    }
    let out = slice::from_raw_parts_mut(out, len);
    for (dst, &src) in out.iter_mut().zip(values) {
        *dst = src.into();
    }
    Ok(())
}

unsafe fn write_string(text: String, out: *mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(text).map_err(|e| Failure(QkStatus::Format, e.to_string()))?;
    write_out(out, c.into_raw(), "output string")
}

fn new_state(psi: StateVector) -> *mut QkState {
    Box::into_raw(Box::new(QkState(psi)))
}

fn new_sym(sym: SymStateCompressed) -> *mut QkSymState {
    Box::into_raw(Box::new(QkSymState(sym)))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from a `qk_*_to_json` call, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn qk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a state from `len = K^N` amplitudes in basis-index order.
///
/// # Safety
/// `amps` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_state_new(
    n_sites: usize,
    local_dim: usize,
    amps: *const QkComplex,
    len: usize,
    out: *mut *mut QkState,
) -> QkStatus {
    guard(|| {
        let psi = StateVector::new(n_sites, local_dim, complex_vec(amps, len, "amps")?)?;
        write_out(out, new_state(psi), "out")
    })
}

/// # Safety
/// `state` must come from this library and not be used afterwards, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn qk_state_free(state: *mut QkState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of sites, or 0 for NULL.
///
/// # Safety
/// `state` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qk_state_n_sites(state: *const QkState) -> usize {
    state.as_ref().map_or(0, |s| s.0.n_sites())
}

/// Local dimension, or 0 for NULL.
///
/// # Safety
/// `state` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qk_state_local_dim(state: *const QkState) -> usize {
    state.as_ref().map_or(0, |s| s.0.local_dim())
}

/// Number of amplitudes K^N, or 0 for NULL.
///
/// # Safety
/// `state` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qk_state_dim(state: *const QkState) -> usize {
    state.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the amplitudes into `out`, which must hold exactly `qk_state_dim` entries.
///
/// # Safety
/// `state` must be a live handle; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn qk_state_amps(state: *const QkState, out: *mut QkComplex, len: usize) -> QkStatus {
    guard(|| copy_out(as_ref(state, "state")?.0.amps(), out, len))
}

/// Normalized Dicke state for `local_dim` occupation counts.
///
/// # Safety
/// `counts` must point to `local_dim` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_dicke(counts: *const usize, local_dim: usize, out: *mut *mut QkState) -> QkStatus {
    guard(|| {
        let occ = Occupation::new(as_slice(counts, local_dim, "counts")?.to_vec())?;
        write_out(out, new_state(dicke_normalized(&occ)?), "out")
    })
}

/// Coherent state as the N-fold product of the site state built from
/// `tau_2..tau_K` (`tau_len = K - 1`).
///
/// # Safety
/// `tau` must point to `tau_len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_coherent_product(
    n_sites: usize,
    local_dim: usize,
    tau: *const QkComplex,
    tau_len: usize,
    out: *mut *mut QkState,
) -> QkStatus {
    guard(|| {
        let params = CoherentParams::new(n_sites, local_dim, complex_vec(tau, tau_len, "tau")?)?;
        write_out(out, new_state(coherent_product(&params)?), "out")
    })
}

/// Coherent state from the displacement exponential with `eta_2..eta_K`.
///
/// # Safety
/// `eta` must point to `eta_len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_coherent_displace(
    n_sites: usize,
    local_dim: usize,
    eta: *const QkComplex,
    eta_len: usize,
    out: *mut *mut QkState,
) -> QkStatus {
    guard(|| {
        let params = DisplacementParams::new(n_sites, local_dim, complex_vec(eta, eta_len, "eta")?)?;
        write_out(out, new_state(coherent_displace(&params)?), "out")
    })
}

/// Product-state test. `out_defect` may be NULL.
///
/// # Safety
/// `state` must be a live handle; `out_product` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_is_product(
    state: *const QkState,
    tol: f64,
    out_product: *mut bool,
    out_defect: *mut f64,
) -> QkStatus {
    guard(|| {
        let cls = is_product(&as_ref(state, "state")?.0, tol)?;
        write_out(out_product, cls.verdict == Verdict::Product, "out_product")?;
        if !out_defect.is_null() {
            out_defect.write(cls.defect);
        }
        Ok(())
    })
}

/// Singular-value product test, limited to K^N <= 4096.
///
/// # Safety
/// `state` must be a live handle; `out_product` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_brute_force_is_product(
    state: *const QkState,
    tol: f64,
    out_product: *mut bool,
) -> QkStatus {
    guard(|| {
        let product = brute_force_is_product(&as_ref(state, "state")?.0, tol)?;
        write_out(out_product, product, "out_product")
    })
}

/// Parses a full-space or compressed state file. Exactly one of `out_state`
/// and `out_sym` is set to a new handle; the other is set to NULL.
///
/// # Safety
/// `json` must be a NUL-terminated string; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_parse_json(
    json: *const c_char,
    out_state: *mut *mut QkState,
    out_sym: *mut *mut QkSymState,
) -> QkStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out_state.is_null() || out_sym.is_null() {
            return Err(null("output handle"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Failure(QkStatus::Format, e.to_string()))?;
        match parse_any(text)? {
            AnyState::Full(psi) => {
                out_state.write(new_state(psi));
                out_sym.write(ptr::null_mut());
            }
            AnyState::Symmetric(sym) => {
                out_state.write(ptr::null_mut());
                out_sym.write(new_sym(sym));
            }
        }
        Ok(())
    })
}

/// Serializes a state; release the result with `qk_string_free`.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_state_to_json(state: *const QkState, out: *mut *mut c_char) -> QkStatus {
    guard(|| write_string(state_to_json(&as_ref(state, "state")?.0), out))
}

/// Orthogonal projection onto the symmetric subspace. `out_residual`
/// (distance to the subspace) may be NULL.
///
/// # Safety
/// `state` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_project_symmetric(
    state: *const QkState,
    out: *mut *mut QkSymState,
    out_residual: *mut f64,
) -> QkStatus {
    guard(|| {
        let (sym, residual) = project_symmetric(&as_ref(state, "state")?.0)?;
        write_out(out, new_sym(sym), "out")?;
        if !out_residual.is_null() {
            out_residual.write(residual);
        }
        Ok(())
    })
}

/// Builds a compressed state from unnormalized Dicke coefficients in
/// canonical occupation order (`len = dim S`).
///
/// # Safety
/// `coeffs` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_sym_new(
    n_sites: usize,
    local_dim: usize,
    coeffs: *const QkComplex,
    len: usize,
    out: *mut *mut QkSymState,
) -> QkStatus {
    guard(|| {
        let sym = SymStateCompressed::new(n_sites, local_dim, complex_vec(coeffs, len, "coeffs")?)?;
        write_out(out, new_sym(sym), "out")
    })
}

/// # Safety
/// `sym` must come from this library and not be used afterwards, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn qk_sym_free(sym: *mut QkSymState) {
    if !sym.is_null() {
        drop(Box::from_raw(sym));
    }
}

/// Number of coefficients dim S, or 0 for NULL.
///
/// # Safety
/// `sym` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn qk_sym_dim(sym: *const QkSymState) -> usize {
    sym.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the unnormalized coefficients into `out` (`len = dim S`).
///
/// # Safety
/// `sym` must be a live handle; `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn qk_sym_coeffs(sym: *const QkSymState, out: *mut QkComplex, len: usize) -> QkStatus {
    guard(|| copy_out(as_ref(sym, "sym")?.0.coeffs(), out, len))
}

/// Expands to the full space, subject to the K^N size guard.
///
/// # Safety
/// `sym` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_sym_expand(sym: *const QkSymState, out: *mut *mut QkState) -> QkStatus {
    guard(|| write_out(out, new_state(expand(&as_ref(sym, "sym")?.0)?), "out"))
}

/// Serializes a compressed state; release the result with `qk_string_free`.
///
/// # Safety
/// `sym` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_sym_to_json(sym: *const QkSymState, out: *mut *mut c_char) -> QkStatus {
    guard(|| write_string(sym_to_json(&as_ref(sym, "sym")?.0), out))
}

/// Coherent-or-entangled test on compressed coefficients. `out_defect` may be NULL.
///
/// # Safety
/// `sym` must be a live handle; `out_coherent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_classify_symmetric(
    sym: *const QkSymState,
    tol: f64,
    out_coherent: *mut bool,
    out_defect: *mut f64,
) -> QkStatus {
    guard(|| {
        let cls = classify_symmetric(&as_ref(sym, "sym")?.0, tol)?;
        write_out(out_coherent, cls.is_coherent(), "out_coherent")?;
        if !out_defect.is_null() {
            out_defect.write(cls.defect);
        }
        Ok(())
    })
}

/// Finds a Dicke state overlapping the product of `n_sites` factors, each of
/// `local_dim` entries stored site after site. Writes the occupation to
/// `out_counts` (`local_dim` entries) and the overlap to `out_overlap`.
///
/// # Safety
/// `factors` must point to `n_sites * local_dim` readable values; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_symmetric_witness(
    factors: *const QkComplex,
    n_sites: usize,
    local_dim: usize,
    tol: f64,
    out_counts: *mut usize,
    out_overlap: *mut QkComplex,
) -> QkStatus {
    guard(|| {
        let len =
            n_sites.checked_mul(local_dim).ok_or_else(|| Failure(QkStatus::Size, "factor buffer too large".into()))?;
        let flat = complex_vec(factors, len, "factors")?;
        let sites = flat.chunks(local_dim.max(1)).map(<[Complex64]>::to_vec).collect();
        let witness = symmetric_witness(&ProductFactors::new(sites)?, tol)?;
        if out_counts.is_null() {
            return Err(null("out_counts"));
        }
        slice::from_raw_parts_mut(out_counts, local_dim).copy_from_slice(witness.occupation.counts());
        write_out(out_overlap, witness.overlap.into(), "out_overlap")
    })
}
