//! Exercises the C ABI exactly as a foreign binding would: through the
//! exported extern "C" functions, raw pointers and status codes.

use std::ffi::{CStr, CString};
use std::ptr;

use kfree_capi::*;

fn cjson(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn take_string(ptr: *mut std::ffi::c_char) -> String {
    assert!(!ptr.is_null());
    let s = unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string();
    kf_string_free(ptr);
    s
}

#[test]
fn sieve_density_and_json_roundtrip() {
    let spec = cjson(r#"{"kind":"visible","d":2}"#);
    let mut handle: *mut KfPointSet = ptr::null_mut();
    let status = kf_pointset_sieve(spec.as_ptr(), 1, 1, &mut handle);
    assert_eq!(status, KfStatus::Ok);
    assert_eq!(kf_pointset_dim(handle), 2);
    assert_eq!(kf_pointset_len(handle), 8); // everything but the origin

    let mut num = 0u64;
    let mut den = 0u64;
    assert_eq!(kf_pointset_density(handle, &mut num, &mut den), KfStatus::Ok);
    assert_eq!((num, den), (8, 9));

    let needed = kf_pointset_coords(handle, ptr::null_mut(), 0);
    assert_eq!(needed, 16);
    let mut buf = vec![0i64; needed as usize];
    assert_eq!(kf_pointset_coords(handle, buf.as_mut_ptr(), needed), needed);
    assert_eq!(&buf[0..2], &[-1, -1]);

    let mut json: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(kf_pointset_to_json(handle, &mut json), KfStatus::Ok);
    let text = take_string(json);
    assert!(text.starts_with("{\"schema\":\"pointset/1\""));

    let mut back: *mut KfPointSet = ptr::null_mut();
    let ctext = cjson(&text);
    assert_eq!(kf_pointset_from_json(ctext.as_ptr(), &mut back), KfStatus::Ok);
    assert_eq!(kf_pointset_len(back), 8);

    kf_pointset_free(handle);
    kf_pointset_free(back);
}

#[test]
fn status_codes_and_error_messages() {
    let bad = cjson(r#"{"kind":"nope"}"#);
    let mut handle: *mut KfPointSet = ptr::null_mut();
    assert_eq!(
        kf_pointset_sieve(bad.as_ptr(), 5, 1, &mut handle),
        KfStatus::InvalidInput
    );
    let msg = take_string(kf_last_error_message());
    assert!(!msg.is_empty());

    let spec = cjson(r#"{"kind":"visible","d":2}"#);
    assert_eq!(
        kf_pointset_sieve(spec.as_ptr(), 0, 1, &mut handle),
        KfStatus::InvalidInput
    );
    assert_eq!(
        kf_pointset_sieve(spec.as_ptr(), 2_000_000_000, 1, &mut handle),
        KfStatus::Resource
    );
    assert_eq!(
        kf_pointset_sieve(ptr::null(), 5, 1, &mut handle),
        KfStatus::InvalidInput
    );

    let mut out = 0.0f64;
    assert_eq!(kf_zeta(1.2, 1e-10, &mut out), KfStatus::Domain);
}

#[test]
fn zeta_and_entropy() {
    let mut out = 0.0f64;
    assert_eq!(kf_zeta(2.0, 1e-12, &mut out), KfStatus::Ok);
    assert!((out - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);

    let spec = cjson(r#"{"kind":"visible","d":2}"#);
    let mut ext = true;
    assert_eq!(kf_entropy(spec.as_ptr(), &mut out, &mut ext), KfStatus::Ok);
    assert!(!ext);
    assert!((out - 6.0 / std::f64::consts::PI.powi(2) * std::f64::consts::LN_2).abs() < 1e-12);

    let ring_spec = cjson(r#"{"kind":"kfree_ring","ring":"gauss","k":2}"#);
    let mut dens = 0.0f64;
    assert_eq!(
        kf_theoretical_density(ring_spec.as_ptr(), 10_000, &mut dens, &mut ext),
        KfStatus::Ok
    );
    assert!(ext);
    assert!(dens > 0.0 && dens < 1.0);
}

#[test]
fn admissibility_and_locator() {
    let spec = cjson(r#"{"kind":"visible","d":2}"#);
    let square: Vec<i64> = vec![0, 0, 0, 1, 1, 0, 1, 1];
    let mut verdict = true;
    let mut report: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        kf_admissible(spec.as_ptr(), square.as_ptr(), 4, &mut verdict, &mut report),
        KfStatus::Ok
    );
    assert!(!verdict);
    let report_text = take_string(report);
    assert!(report_text.contains("\"admissible\":false"));

    let mut found = false;
    let mut outcome: *mut std::ffi::c_char = ptr::null_mut();
    let p: Vec<i64> = vec![0, 0];
    assert_eq!(
        kf_locate(spec.as_ptr(), p.as_ptr(), 1, ptr::null(), 0, 50, false, &mut found, &mut outcome),
        KfStatus::Ok
    );
    assert!(found);
    assert!(take_string(outcome).contains("\"result\":\"found\""));

    let mut bound = 0.0f64;
    assert_eq!(
        kf_locator_density_bound(spec.as_ptr(), p.as_ptr(), 1, 2, &mut bound),
        KfStatus::Ok
    );
    assert!((bound - 0.75).abs() < 1e-14);
}

#[test]
fn stab_search_and_witness() {
    let spec = cjson(r#"{"kind":"kfree_ring","ring":"gauss","k":2}"#);
    let mut exact = false;
    let mut report: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        kf_stab_search(spec.as_ptr(), 1, 24, 1, &mut exact, &mut report),
        KfStatus::Ok
    );
    assert!(exact);
    let text = take_string(report);
    assert!(text.contains("\"schema\":\"stabreport/1\""));

    let ring = cjson("gauss");
    let shear = [1i64, 1, 0, 1];
    let mut wit: *mut std::ffi::c_char = ptr::null_mut();
    assert_eq!(
        kf_witness(ring.as_ptr(), 2, shear.as_ptr(), 64, &mut wit),
        KfStatus::Ok
    );
    let wtext = take_string(wit);
    assert!(wtext.contains("\"schema\":\"witness/1\""));
    assert!(wtext.contains("\"admissible\":true"));
    assert!(wtext.contains("\"admissible\":false"));

    // a stabiliser element is a precondition error
    let rot = [0i64, -1, 1, 0];
    assert_eq!(
        kf_witness(ring.as_ptr(), 2, rot.as_ptr(), 64, &mut wit),
        KfStatus::Precondition
    );
}
