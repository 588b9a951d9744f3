//! C ABI over the `hyshift` core.
//!
//! Every function returns a [`HyStatus`]; on failure `hy_last_error` describes the
//! cause. Handles are opaque and owned by the caller until passed to the
//! matching `_free` function. Strings returned through `char **` are released
//! with `hy_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hyshift::criteria::{subspace_verdict, Outcome};
use hyshift::spaces::{parse_space_spec, Horizons, SpaceModel};
use hyshift::weights::{parse_weight_spec, WeightSequence};
use hyshift::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    InvalidCertificate = 5,
    Overflow = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HyOutcome {
    HasSubspace = 0,
    NoSubspace = 1,
    NotHypercyclic = 2,
    UnknownAtHorizon = 3,
    Boundary = 4,
}

impl From<Outcome> for HyOutcome {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::HasSubspace => HyOutcome::HasSubspace,
            Outcome::NoSubspace => HyOutcome::NoSubspace,
            Outcome::NotHypercyclic => HyOutcome::NotHypercyclic,
            Outcome::UnknownAtHorizon => HyOutcome::UnknownAtHorizon,
            Outcome::Boundary => HyOutcome::Boundary,
        }
    }
}

/// Opaque weight sequence.
pub struct HyWeights(WeightSequence);

/// Opaque sequence space.
pub struct HySpace(SpaceModel);

/// Horizons for `hy_analyze`; zero fields take the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HyHorizons {
    pub j_max: usize,
    pub m_max: usize,
    pub n_max: usize,
    pub k_horizon: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HyStatus {
    match e {
        Error::Parse { .. } => HyStatus::Parse,
        Error::Domain(_) => HyStatus::Domain,
        Error::InvalidCertificate(_) => HyStatus::InvalidCertificate,
        Error::Overflow(_) => HyStatus::Overflow,
        Error::Io(_) => HyStatus::Io,
    }
}

struct Fail(HyStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(HyStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HyStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HyStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(HyStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(HyStatus::Domain, "report contains a NUL byte".into()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hy_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a weight spec such as `const:2` or `periodic:[1,3]`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hy_weights_parse(spec: *const c_char, out: *mut *mut HyWeights) -> HyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let w = parse_weight_spec(read_str(spec, "spec")?)?;
        *out = Box::into_raw(Box::new(HyWeights(w)));
        Ok(())
    })
}

/// # Safety
/// `w` must come from `hy_weights_parse` and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hy_weights_free(w: *mut HyWeights) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Parses a space spec such as `lp:2` or `entire`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hy_space_parse(spec: *const c_char, out: *mut *mut HySpace) -> HyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let s = parse_space_spec(read_str(spec, "spec")?)?;
        *out = Box::into_raw(Box::new(HySpace(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from `hy_space_parse` and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hy_space_free(s: *mut HySpace) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// `ln prod_{v=1..n} |w_{k+v}|`.
///
/// # Safety
/// `w` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hy_window_log(w: *const HyWeights, n: usize, k: i64, out: *mut f64) -> HyStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("w"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = w.0.window_log(n, k)?;
        Ok(())
    })
}

/// Runs the subspace verdict. `outcome` receives the verdict; when `json` is not
/// null it receives the full JSON report, to be released with `hy_string_free`.
/// `horizons` may be null for the defaults.
///
/// # Safety
/// `w` and `s` must be live handles; `outcome` must be valid; `json` and
/// `horizons` may be null.
#[no_mangle]
pub unsafe extern "C" fn hy_analyze(
    w: *const HyWeights,
    s: *const HySpace,
    horizons: *const HyHorizons,
    outcome: *mut HyOutcome,
    json: *mut *mut c_char,
) -> HyStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("w"))?;
        let s = s.as_ref().ok_or_else(|| null("s"))?;
        if outcome.is_null() {
            return Err(null("outcome"));
        }
        if !json.is_null() {
            *json = ptr::null_mut();
        }
        let d = Horizons::default();
        let h = match horizons.as_ref() {
            None => d,
            Some(h) => Horizons {
                j_max: if h.j_max == 0 { d.j_max } else { h.j_max },
                m_max: if h.m_max == 0 { d.m_max } else { h.m_max },
                n_max: if h.n_max == 0 { d.n_max } else { h.n_max },
                k_horizon: if h.k_horizon == 0 { d.k_horizon } else { h.k_horizon },
            },
        };
        let v = subspace_verdict(&w.0, &s.0, &h)?;
        *outcome = v.outcome.into();
        if !json.is_null() {
            let mut value = serde_json::to_value(&v).map_err(|e| Fail(HyStatus::Io, e.to_string()))?;
            if let serde_json::Value::Object(map) = &mut value {
                map.insert("schema".into(), hyshift::cli::SCHEMA_VERSION.into());
            }
            *json = into_c_string(value.to_string())?;
        }
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hy_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
