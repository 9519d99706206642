//! C ABI for the linkstab library.
//!
//! Handles are opaque pointers created and destroyed by the paired
//! `ls_*_parse`/`ls_*_free` functions. Every fallible call returns an
//! [`LsStatus`]; on any status other than `LS_STATUS_OK` the caller
//! may read a description with [`ls_last_error_message`], which
//! points at a thread-local buffer that stays valid until the next
//! failing call on the same thread. Strings returned through `out`
//! parameters are owned by the caller and released with
//! [`ls_string_free`].
//!
//! All functions are null-safe: a null required argument yields
//! `LS_STATUS_NULL_ARGUMENT` instead of undefined behavior.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use linkstab::{
    doc, entanglement, so3, stabilizer, surgery, DenseState, Error, StabilizerTableau,
    SurgeryPresentation, TensorNetwork,
};

/// Result code of a C ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    Encoding = 2,
    /// The document failed to parse; see `ls_last_error_message`.
    Parse = 3,
    /// The input defines no state (every amplitude vanishes).
    IllDefined = 4,
    /// The state is not a stabilizer state.
    NotStabilizer = 5,
    /// Any other domain error; see `ls_last_error_message`.
    Invalid = 6,
    /// An internal invariant failed.
    Internal = 7,
}

/// Opaque handle: a parsed surgery presentation.
pub struct LsManifold {
    inner: SurgeryPresentation,
}

/// Opaque handle: a parsed tensor network.
pub struct LsNetwork {
    inner: TensorNetwork,
}

/// Opaque handle: an exact dense state.
pub struct LsState {
    inner: DenseState,
}

/// Opaque handle: a stabilizer tableau.
pub struct LsTableau {
    inner: StabilizerTableau,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("no interior nul");
    });
}

fn status_of(e: &Error) -> LsStatus {
    match e {
        Error::Parse { .. } | Error::Usage(_) | Error::Network(_) => LsStatus::Parse,
        Error::IllDefined(_) => LsStatus::IllDefined,
        Error::NotStabilizer => LsStatus::NotStabilizer,
        _ => LsStatus::Invalid,
    }
}

fn fail(e: &Error) -> LsStatus {
    set_error(&e.to_string());
    status_of(e)
}

/// Runs a closure behind a panic guard; panics become `Internal`.
fn guarded(f: impl FnOnce() -> LsStatus) -> LsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            LsStatus::Internal
        }
    }
}

/// # Safety
/// `p` must be null or point at a nul-terminated string.
unsafe fn utf8<'a>(p: *const c_char) -> Result<&'a str, LsStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(LsStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        LsStatus::Encoding
    })
}

/// # Safety
/// `names` must be null or point at `len` valid C strings.
unsafe fn name_list<'a>(
    names: *const *const c_char,
    len: usize,
) -> Result<Vec<&'a str>, LsStatus> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if names.is_null() {
        set_error("null site list");
        return Err(LsStatus::NullArgument);
    }
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        out.push(utf8(*names.add(i))?);
    }
    Ok(out)
}

/// Writes to an out pointer; the value is only constructed once the
/// pointer is known to be non-null, so nothing leaks on bad input.
fn write_out<T>(out: *mut T, make: impl FnOnce() -> T) -> LsStatus {
    if out.is_null() {
        set_error("null output pointer");
        return LsStatus::NullArgument;
    }
    unsafe { ptr::write(out, make()) };
    LsStatus::Ok
}

fn write_string(out: *mut *mut c_char, s: String) -> LsStatus {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => {
            set_error("output contained an interior nul byte");
            return LsStatus::Internal;
        }
    };
    write_out(out, || c.into_raw())
}

/// Parses a manifold document. On success `*out` owns the handle.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_manifold_parse(
    text: *const c_char,
    out: *mut *mut LsManifold,
) -> LsStatus {
    guarded(|| {
        let text = match utf8(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match doc::parse_manifold(text) {
            Ok(inner) => write_out(out, || Box::into_raw(Box::new(LsManifold { inner }))),
            Err(e) => fail(&e),
        }
    })
}

/// Releases a manifold handle; null is ignored.
///
/// # Safety
/// `m` must be null or a pointer from `ls_manifold_parse`.
#[no_mangle]
pub unsafe extern "C" fn ls_manifold_free(m: *mut LsManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Parses a network document. On success `*out` owns the handle.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_network_parse(
    text: *const c_char,
    out: *mut *mut LsNetwork,
) -> LsStatus {
    guarded(|| {
        let text = match utf8(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match doc::parse_network(text) {
            Ok(inner) => write_out(out, || Box::into_raw(Box::new(LsNetwork { inner }))),
            Err(e) => fail(&e),
        }
    })
}

/// Releases a network handle; null is ignored.
///
/// # Safety
/// `n` must be null or a pointer from `ls_network_parse`.
#[no_mangle]
pub unsafe extern "C" fn ls_network_free(n: *mut LsNetwork) {
    if !n.is_null() {
        drop(Box::from_raw(n));
    }
}

/// Evaluates a manifold to its boundary state. A presentation whose
/// amplitudes all vanish yields `LS_STATUS_ILL_DEFINED`.
///
/// # Safety
/// `m` must come from `ls_manifold_parse`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_manifold_state(
    m: *const LsManifold,
    sign_flip: bool,
    out: *mut *mut LsState,
) -> LsStatus {
    guarded(|| {
        let Some(m) = m.as_ref() else {
            set_error("null manifold handle");
            return LsStatus::NullArgument;
        };
        match surgery::state_from_presentation(&m.inner, sign_flip) {
            Ok(state) if state.is_zero() => fail(&Error::IllDefined(
                "surgery sums annihilate every boundary amplitude".into(),
            )),
            Ok(inner) => write_out(out, || Box::into_raw(Box::new(LsState { inner }))),
            Err(e) => fail(&e),
        }
    })
}

/// Contracts a network to its open-leg state.
///
/// # Safety
/// `n` must come from `ls_network_parse`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_network_state(
    n: *const LsNetwork,
    out: *mut *mut LsState,
) -> LsStatus {
    guarded(|| {
        let Some(n) = n.as_ref() else {
            set_error("null network handle");
            return LsStatus::NullArgument;
        };
        match n.inner.contract() {
            Ok(inner) => write_out(out, || Box::into_raw(Box::new(LsState { inner }))),
            Err(e) => fail(&e),
        }
    })
}

/// Releases a state handle; null is ignored.
///
/// # Safety
/// `s` must be null or a pointer from a state-producing call.
#[no_mangle]
pub unsafe extern "C" fn ls_state_free(s: *mut LsState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of sites of the state; 0 for a null handle.
///
/// # Safety
/// `s` must be null or a valid state handle.
#[no_mangle]
pub unsafe extern "C" fn ls_state_site_count(s: *const LsState) -> usize {
    s.as_ref().map_or(0, |s| s.inner.site_count())
}

/// Qudit dimension of the state; 0 for a null handle.
///
/// # Safety
/// `s` must be null or a valid state handle.
#[no_mangle]
pub unsafe extern "C" fn ls_state_level(s: *const LsState) -> u64 {
    s.as_ref().map_or(0, |s| s.inner.level().k())
}

/// Serializes the state as a JSON object with the level, the site
/// names, and one entry per nonzero amplitude carrying the exact
/// coefficient vector and a float pair.
///
/// # Safety
/// `s` must be a valid state handle; `out` receives a string owned by
/// the caller and released with `ls_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ls_state_json(
    s: *const LsState,
    out: *mut *mut c_char,
) -> LsStatus {
    guarded(|| {
        let Some(s) = s.as_ref() else {
            set_error("null state handle");
            return LsStatus::NullArgument;
        };
        let state = &s.inner;
        let names: Vec<&str> = state.sites().iter().map(|x| x.name.as_str()).collect();
        let amps: Vec<serde_json::Value> = state
            .amps()
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| {
                let z = a.to_complex();
                serde_json::json!({
                    "values": state.values_at(i),
                    "coeffs": a.coeffs(),
                    "kden": a.kden(),
                    "re": z.re,
                    "im": z.im,
                })
            })
            .collect();
        let v = serde_json::json!({
            "level": state.level().k(),
            "sites": names,
            "amplitudes": amps,
        });
        write_string(out, v.to_string())
    })
}

/// Tests whether the state is a pure stabilizer state.
///
/// # Safety
/// `s` must be a valid state handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_state_is_stabilizer(
    s: *const LsState,
    out: *mut bool,
) -> LsStatus {
    guarded(|| {
        let Some(s) = s.as_ref() else {
            set_error("null state handle");
            return LsStatus::NullArgument;
        };
        match stabilizer::is_stabilizer(&s.inner) {
            Ok(v) => write_out(out, || v),
            Err(e) => fail(&e),
        }
    })
}

/// Entanglement entropy of the named region, in dits and nats.
///
/// # Safety
/// `s` must be a valid state handle; `sites` must hold `n_sites`
/// valid C strings; `dits` and `nats` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ls_state_entropy(
    s: *const LsState,
    sites: *const *const c_char,
    n_sites: usize,
    dits: *mut f64,
    nats: *mut f64,
) -> LsStatus {
    guarded(|| {
        let Some(s) = s.as_ref() else {
            set_error("null state handle");
            return LsStatus::NullArgument;
        };
        let region = match name_list(sites, n_sites) {
            Ok(r) => r,
            Err(st) => return st,
        };
        match entanglement::flat_entropy(&s.inner, &region) {
            Ok(v) => {
                let st = write_out(dits, || v.dits);
                if st != LsStatus::Ok {
                    return st;
                }
                write_out(nats, || v.nats)
            }
            Err(e) => fail(&e),
        }
    })
}

/// GHZ count of the tripartition `(a, b, c)` of the state's sites.
///
/// # Safety
/// `s` must be a valid state handle; each list must hold the stated
/// number of valid C strings; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_state_ghz_count(
    s: *const LsState,
    a: *const *const c_char,
    n_a: usize,
    b: *const *const c_char,
    n_b: usize,
    c: *const *const c_char,
    n_c: usize,
    out: *mut i64,
) -> LsStatus {
    guarded(|| {
        let Some(s) = s.as_ref() else {
            set_error("null state handle");
            return LsStatus::NullArgument;
        };
        let (ra, rb, rc) = match (name_list(a, n_a), name_list(b, n_b), name_list(c, n_c)) {
            (Ok(ra), Ok(rb), Ok(rc)) => (ra, rb, rc),
            (Err(st), _, _) | (_, Err(st), _) | (_, _, Err(st)) => return st,
        };
        match entanglement::ghz_count(&s.inner, &ra, &rb, &rc) {
            Ok(g) => write_out(out, || g),
            Err(e) => fail(&e),
        }
    })
}

/// Compiles a manifold directly to a stabilizer tableau.
///
/// # Safety
/// `m` must come from `ls_manifold_parse`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_manifold_tableau(
    m: *const LsManifold,
    sign_flip: bool,
    out: *mut *mut LsTableau,
) -> LsStatus {
    guarded(|| {
        let Some(m) = m.as_ref() else {
            set_error("null manifold handle");
            return LsStatus::NullArgument;
        };
        match surgery::tableau_from_presentation(&m.inner, sign_flip) {
            Ok(inner) => write_out(out, || Box::into_raw(Box::new(LsTableau { inner }))),
            Err(e) => fail(&e),
        }
    })
}

/// Finds the stabilizer tableau of a state by exhaustive search.
///
/// # Safety
/// `s` must be a valid state handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ls_state_tableau(
    s: *const LsState,
    out: *mut *mut LsTableau,
) -> LsStatus {
    guarded(|| {
        let Some(s) = s.as_ref() else {
            set_error("null state handle");
            return LsStatus::NullArgument;
        };
        match stabilizer::stabilizer_group_search(&s.inner) {
            Ok(inner) => write_out(out, || Box::into_raw(Box::new(LsTableau { inner }))),
            Err(e) => fail(&e),
        }
    })
}

/// Releases a tableau handle; null is ignored.
///
/// # Safety
/// `t` must be null or a pointer from a tableau-producing call.
#[no_mangle]
pub unsafe extern "C" fn ls_tableau_free(t: *mut LsTableau) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of generators; 0 for a null handle.
///
/// # Safety
/// `t` must be null or a valid tableau handle.
#[no_mangle]
pub unsafe extern "C" fn ls_tableau_generator_count(t: *const LsTableau) -> usize {
    t.as_ref().map_or(0, |t| t.inner.generators().len())
}

/// Renders the tableau, one generator per line.
///
/// # Safety
/// `t` must be a valid tableau handle; `out` receives a string owned
/// by the caller and released with `ls_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ls_tableau_text(
    t: *const LsTableau,
    out: *mut *mut c_char,
) -> LsStatus {
    guarded(|| {
        let Some(t) = t.as_ref() else {
            set_error("null tableau handle");
            return LsStatus::NullArgument;
        };
        write_string(out, t.inner.to_text())
    })
}

/// Verlinde dimension of the genus-`genus` space at odd prime `r`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ls_verlinde_dim(r: u64, genus: u64, out: *mut u64) -> LsStatus {
    guarded(|| match so3::verlinde_dim(r, genus) {
        Ok(d) => write_out(out, || d),
        Err(e) => fail(&e),
    })
}

/// Message of the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread; do not
/// free it.
#[no_mangle]
pub extern "C" fn ls_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned through an `out` parameter; null is
/// ignored.
///
/// # Safety
/// `s` must be null or a string pointer obtained from this library.
#[no_mangle]
pub unsafe extern "C" fn ls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
