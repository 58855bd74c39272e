use std::ffi::{CStr, CString};
use std::ptr;

use simplex_embed_ffi::*;

fn parse(text: &str) -> *mut HsDiagram {
    let c = CString::new(text).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { hs_diagram_parse(c.as_ptr(), &mut d) }, HsStatus::Ok);
    assert!(!d.is_null());
    d
}

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { hs_string_free(s) };
    out
}

#[test]
fn parse_classify_and_free() {
    let d = parse("(2,3,7)");
    assert_eq!(unsafe { hs_diagram_rank(d) }, 3);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { hs_diagram_classify(d, &mut json) }, HsStatus::Ok);
    assert!(take(json).contains("compact"));
    unsafe { hs_diagram_free(d) };

    let d = parse("rank 3\nedge 1 2 4\nedge 2 3 4\nedge 1 3 3\n");
    assert_eq!(unsafe { hs_diagram_rank(d) }, 3);
    unsafe { hs_diagram_free(d) };
}

#[test]
fn embed_and_verify_round_trip() {
    let h = parse("(3,3,7)");
    let g = parse("(2,3,7)");
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { hs_embed(h, g, 0, &mut json) }, HsStatus::NotExists);
    let report = take(json);
    let c = CString::new(report.clone()).unwrap();
    assert_eq!(unsafe { hs_verify_json(c.as_ptr()) }, HsStatus::Ok);

    let mut v: serde_json::Value = serde_json::from_str(&report).unwrap();
    v["runs"][0]["frontier"].as_array_mut().unwrap().pop();
    let c = CString::new(v.to_string()).unwrap();
    assert_eq!(unsafe { hs_verify_json(c.as_ptr()) }, HsStatus::InvalidArgument);
    assert!(!hs_last_error_message().is_null());

    let h2 = parse("(0,0,3)");
    let g2 = parse("[3^{[3,3]}]");
    assert_eq!(unsafe { hs_embed(h2, g2, 0, &mut json) }, HsStatus::Ok);
    let c = CString::new(take(json)).unwrap();
    assert_eq!(unsafe { hs_verify_json(c.as_ptr()) }, HsStatus::Ok);
    for d in [h, g, h2, g2] {
        unsafe { hs_diagram_free(d) };
    }
}

#[test]
fn errors_and_nulls() {
    let mut d = ptr::null_mut();
    let bad = CString::new("not a diagram").unwrap();
    assert_eq!(unsafe { hs_diagram_parse(bad.as_ptr(), &mut d) }, HsStatus::ParseError);
    assert!(d.is_null());
    let msg = unsafe { CStr::from_ptr(hs_last_error_message()) };
    assert!(!msg.to_bytes().is_empty());

    assert_eq!(unsafe { hs_diagram_parse(ptr::null(), &mut d) }, HsStatus::InvalidArgument);
    assert_eq!(unsafe { hs_diagram_parse(bad.as_ptr(), ptr::null_mut()) }, HsStatus::InvalidArgument);
    assert_eq!(unsafe { hs_diagram_rank(ptr::null()) }, 0);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { hs_diagram_classify(ptr::null(), &mut json) }, HsStatus::InvalidArgument);
    assert_eq!(unsafe { hs_embed(ptr::null(), ptr::null(), 0, &mut json) }, HsStatus::InvalidArgument);
    assert_eq!(unsafe { hs_verify_json(ptr::null()) }, HsStatus::InvalidArgument);
    let junk = CString::new("{}").unwrap();
    assert_eq!(unsafe { hs_verify_json(junk.as_ptr()) }, HsStatus::ParseError);
    unsafe {
        hs_diagram_free(ptr::null_mut());
        hs_string_free(ptr::null_mut());
    }

    // a successful call clears the previous message
    let d = parse("(2,3,7)");
    assert!(hs_last_error_message().is_null());
    let h = parse("[3^{[3,3]}]");
    assert_eq!(unsafe { hs_embed(h, d, 0, &mut json) }, HsStatus::InvalidArgument);
    unsafe {
        hs_diagram_free(d);
        hs_diagram_free(h);
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/simplex_embed.h")).unwrap();
    for name in ["hs_diagram_parse", "hs_diagram_free", "hs_embed", "hs_verify_json", "hs_last_error_message", "HS_STATUS_NOT_EXISTS"] {
        assert!(header.contains(name), "{name}");
    }
    let cc = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-xc", "-std=c99", "-Wall", "-Werror"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/simplex_embed.h"))
        .status();
    if let Ok(status) = cc {
        assert!(status.success());
    }
}
