use std::ffi::{c_char, CStr, CString};
use std::ptr;

use greedy_lab_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { gl_string_free(p) };
    s
}

fn last_error() -> String {
    let p = gl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

struct Engine(*mut GlEngine);

impl Engine {
    fn new(space: &str) -> Engine {
        let mut e = ptr::null_mut();
        assert_eq!(unsafe { gl_engine_new(c(space).as_ptr(), &mut e) }, GlStatus::Ok);
        Engine(e)
    }
}

impl Drop for Engine {
    fn drop(&mut self) {
        unsafe { gl_engine_free(self.0) };
    }
}

#[test]
fn norms_and_names() {
    let e = Engine::new("spreading:3");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gl_engine_name(e.0, &mut out) }, GlStatus::Ok);
    assert_eq!(take(out), "spreading:3");
    assert_eq!(unsafe { gl_norm(e.0, c("7:1,8:1,9:1,10:1,11:1,12:1").as_ptr(), &mut out) }, GlStatus::Ok);
    assert_eq!(take(out), "6");
    let mut v = 0.0;
    assert_eq!(unsafe { gl_norm_f64(e.0, c("1:1,2:1,3:1,4:1,5:1,6:1").as_ptr(), &mut v) }, GlStatus::Ok);
    assert_eq!(v, 2.0);

    let l2 = Engine::new("lp:2");
    assert_eq!(unsafe { gl_norm(l2.0, c("1:3,2:-4").as_ptr(), &mut out) }, GlStatus::ModeUnsupported);
    assert_eq!(unsafe { gl_norm_f64(l2.0, c("1:3,2:-4").as_ptr(), &mut v) }, GlStatus::Ok);
    assert!((v - 5.0).abs() < 1e-12);
}

#[test]
fn dual_norm() {
    let e = Engine::new("spreading:2");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gl_dual_norm(e.0, c("3:1,4:1").as_ptr(), &mut out) }, GlStatus::Ok);
    assert_eq!(take(out), "1");
    let l1 = Engine::new("lp:1");
    assert_eq!(unsafe { gl_dual_norm(l1.0, c("1:1").as_ptr(), &mut out) }, GlStatus::InvalidArgument);
    assert!(last_error().contains("spreading"));
}

#[test]
fn errors_set_status_and_message() {
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { gl_engine_new(c("no-such-space").as_ptr(), &mut e) }, GlStatus::Parse);
    assert!(e.is_null());
    assert!(!last_error().is_empty());

    let s = Engine::new("spreading:3");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gl_norm(s.0, c("13:1").as_ptr(), &mut out) }, GlStatus::OutsideWindow);
    assert_eq!(unsafe { gl_norm(s.0, c("1:1,1:2").as_ptr(), &mut out) }, GlStatus::Parse);
    assert_eq!(unsafe { gl_norm(ptr::null(), c("1:1").as_ptr(), &mut out) }, GlStatus::NullPointer);
    assert_eq!(unsafe { gl_norm(s.0, ptr::null(), &mut out) }, GlStatus::NullPointer);
    assert_eq!(unsafe { gl_norm(s.0, c("1:1").as_ptr(), ptr::null_mut()) }, GlStatus::NullPointer);
    assert_eq!(unsafe { gl_norm(s.0, c("1:1").as_ptr(), &mut out) }, GlStatus::Ok);
    assert!(gl_last_error_message().is_null());
    take(out);

    unsafe {
        gl_engine_free(ptr::null_mut());
        gl_string_free(ptr::null_mut());
    }
}

#[test]
fn tga_run() {
    let e = Engine::new("lp:1");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gl_tga_run(e.0, c("1:1,2:3,3:-1,4:3").as_ptr(), 2, ptr::null(), &mut out) }, GlStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["choices"][0]["lambda"], "{2,4}");
    assert_eq!(v["choices"][0]["residual_norm"], "2");

    assert_eq!(unsafe { gl_tga_run(e.0, c("1:1,2:1,3:1").as_ptr(), 2, c("enumerate").as_ptr(), &mut out) }, GlStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["choices"].as_array().unwrap().len(), 3);
    assert_eq!(unsafe { gl_tga_run(e.0, c("1:1").as_ptr(), 1, c("random").as_ptr(), &mut out) }, GlStatus::Parse);
}

#[test]
fn claims() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gl_list_claims(c("conservative").as_ptr(), &mut out) }, GlStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);

    let e = Engine::new("lp:inf");
    let mut passed = false;
    let status = unsafe { gl_verify_claim(e.0, c("L38").as_ptr(), ptr::null(), 8, 500, 7, &mut out, &mut passed) };
    assert_eq!(status, GlStatus::Ok, "{}", last_error());
    assert!(passed);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["instances"], 500);
    assert!(v["max_slack_f64"].as_f64().unwrap() <= 0.5);

    let status = unsafe { gl_verify_claim(e.0, c("X99").as_ptr(), ptr::null(), 8, 10, 7, &mut out, ptr::null_mut()) };
    assert_eq!(status, GlStatus::Parse);
    let status = unsafe { gl_verify_claim(e.0, c("P43").as_ptr(), c("ones").as_ptr(), 8, 10, 7, &mut out, ptr::null_mut()) };
    assert_eq!(status, GlStatus::NotApplicable);
}

#[test]
fn examples_and_version() {
    let mut out = ptr::null_mut();
    let mut passed = false;
    assert_eq!(unsafe { gl_reproduce_examples(0, &mut out, &mut passed) }, GlStatus::Ok);
    assert!(passed);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["passed"], true);
    let version = unsafe { CStr::from_ptr(gl_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}
