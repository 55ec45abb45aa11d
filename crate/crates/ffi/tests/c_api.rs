use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use core_entropy_ffi::*;

fn portrait(json: &str) -> *mut CePortrait {
    let json = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ce_portrait_from_json(json.as_ptr(), &mut p) }, CeStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let mut len = 0usize;
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let st = unsafe { ce_last_error_message(buf.as_mut_ptr(), buf.len(), &mut len) };
    assert_eq!(st, CeStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string()
}

#[test]
fn entropy_through_handles() {
    let p = portrait(r#"{"degree":3,"leaves":[["0","1/3"],["7/15","4/5"]]}"#);
    let (mut rho, mut h) = (0.0, 0.0);
    assert_eq!(unsafe { ce_core_entropy(p, &mut rho, &mut h) }, CeStatus::Ok);
    assert!((rho - 1.395336994).abs() < 1e-8);
    assert!((h - rho.ln()).abs() < 1e-12);
    let mut degree = 0u32;
    let mut size = 0usize;
    let mut prim = -1;
    unsafe {
        assert_eq!(ce_portrait_degree(p, &mut degree), CeStatus::Ok);
        assert_eq!(ce_portrait_size(p, &mut size), CeStatus::Ok);
        assert_eq!(ce_portrait_is_primitive(p, &mut prim), CeStatus::Ok);
    }
    assert_eq!((degree, size, prim), (3, 2, 1));
    let mut rate = 0.0;
    assert_eq!(unsafe { ce_growth_rate(p, 30, &mut rate) }, CeStatus::Ok);
    assert!((rate - rho).abs() < 1e-6);
    unsafe { ce_portrait_free(p) };
}

#[test]
fn distances() {
    let a = portrait(r#"{"degree":2,"leaves":[["1/4","3/4"]]}"#);
    let b = portrait(r#"{"degree":2,"leaves":[["0","1/2"]]}"#);
    let (mut v, mut u, mut hd) = (1.0, 1.0, 1.0);
    unsafe {
        assert_eq!(ce_major_distance(a, a, 4, &mut v, &mut u), CeStatus::Ok);
        assert_eq!(v, 0.0);
        assert!(u >= v);
        assert_eq!(ce_hausdorff_distance(a, a, &mut hd), CeStatus::Ok);
        assert!(hd < 1e-12);
        assert_eq!(ce_major_distance(a, b, 4, &mut v, &mut u), CeStatus::Ok);
        assert!(v > 0.0 && u >= v);
        ce_portrait_free(a);
        ce_portrait_free(b);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new(r#"{"degree":3,"leaves":[["0","1/2"]]}"#).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ce_portrait_from_json(bad.as_ptr(), &mut p) }, CeStatus::InvalidPortrait);
    assert!(p.is_null());
    assert!(last_error().contains("not identified"));

    assert_eq!(unsafe { ce_portrait_from_json(ptr::null(), &mut p) }, CeStatus::NullPointer);
    let mut h = 0.0;
    assert_eq!(unsafe { ce_core_entropy(ptr::null(), ptr::null_mut(), &mut h) }, CeStatus::NullPointer);

    let q = portrait(r#"{"degree":3,"leaves":[["0","1/3"],["7/15","4/5"]]}"#);
    let mut rate = 0.0;
    assert_eq!(unsafe { ce_growth_rate(q, 0, &mut rate) }, CeStatus::InvalidArgument);
    let mut len = 0usize;
    assert_eq!(unsafe { ce_last_error_message(ptr::null_mut(), 0, &mut len) }, CeStatus::BufferTooSmall);
    assert!(len > 0);
    unsafe { ce_portrait_free(q) };
    unsafe { ce_portrait_free(ptr::null_mut()) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ce_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/core_entropy.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["ce_portrait_from_json", "ce_core_entropy", "ce_last_error_message", "CE_STATUS_BUDGET"] {
        assert!(text.contains(name), "{name}");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99", "-Wall", "-Werror", header])
        .output()
    else {
        eprintln!("no C compiler found; skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
