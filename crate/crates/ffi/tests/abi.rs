use std::ffi::{CStr, CString};
use std::ptr;

use hyshift_ffi::*;

fn parse_weights(spec: &str) -> *mut HyWeights {
    let c = CString::new(spec).unwrap();
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { hy_weights_parse(c.as_ptr(), &mut w) }, HyStatus::Ok);
    w
}

fn parse_space(spec: &str) -> *mut HySpace {
    let c = CString::new(spec).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { hy_space_parse(c.as_ptr(), &mut s) }, HyStatus::Ok);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(hy_last_error()) }.to_str().unwrap().to_owned()
}

#[test]
fn window_log_of_constant_weights() {
    let w = parse_weights("const:2");
    let mut out = 0.0;
    assert_eq!(unsafe { hy_window_log(w, 3, 5, &mut out) }, HyStatus::Ok);
    assert!((out - 3.0 * 2f64.ln()).abs() < 1e-12);
    unsafe { hy_weights_free(w) };
}

#[test]
fn analyze_returns_outcome_and_json() {
    let w = parse_weights("const:2");
    let s = parse_space("lp:2");
    let mut outcome = HyOutcome::Boundary;
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { hy_analyze(w, s, ptr::null(), &mut outcome, &mut json) }, HyStatus::Ok);
    assert_eq!(outcome, HyOutcome::NoSubspace);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["outcome"], "NoSubspace");
    unsafe {
        hy_string_free(json);
        hy_weights_free(w);
        hy_space_free(s);
    }

    let w = parse_weights("linear");
    let s = parse_space("entire");
    let h = HyHorizons {
        n_max: 8,
        ..HyHorizons::default()
    };
    assert_eq!(unsafe { hy_analyze(w, s, &h, &mut outcome, ptr::null_mut()) }, HyStatus::Ok);
    assert_eq!(outcome, HyOutcome::HasSubspace);
    unsafe {
        hy_weights_free(w);
        hy_space_free(s);
    }
}

#[test]
fn errors_set_codes_and_messages() {
    let bad = CString::new("cnst:2").unwrap();
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { hy_weights_parse(bad.as_ptr(), &mut w) }, HyStatus::Parse);
    assert!(w.is_null());
    assert!(last_error().contains("cnst"));

    assert_eq!(unsafe { hy_weights_parse(ptr::null(), &mut w) }, HyStatus::NullPointer);
    let mut out = 0.0;
    assert_eq!(unsafe { hy_window_log(ptr::null(), 1, 1, &mut out) }, HyStatus::NullPointer);

    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { hy_space_parse(invalid.as_ptr().cast(), &mut ptr::null_mut()) },
        HyStatus::InvalidUtf8
    );

    let w = parse_weights("const:2");
    assert_eq!(unsafe { hy_window_log(w, 2, -5, &mut out) }, HyStatus::Domain);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { hy_window_log(w, 2, 1, &mut out) }, HyStatus::Ok);
    assert!(last_error().is_empty());
    unsafe {
        hy_weights_free(w);
        hy_weights_free(ptr::null_mut());
        hy_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/hyshift.h");
    for name in [
        "hy_last_error",
        "hy_weights_parse",
        "hy_weights_free",
        "hy_space_parse",
        "hy_space_free",
        "hy_window_log",
        "hy_analyze",
        "hy_string_free",
        "typedef struct HyWeights HyWeights",
        "HY_STATUS_PARSE = 3",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
