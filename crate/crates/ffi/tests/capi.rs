use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use subdesign_ffi::*;

fn field(spec: &str) -> *mut SdField {
    let spec = CString::new(spec).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { sd_field_parse(spec.as_ptr(), &mut f) },
        SdStatus::Ok
    );
    f
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sd_last_error()) }
        .to_str()
        .unwrap()
        .to_owned()
}

#[test]
fn secant_design_over_gf5() {
    let f = field("5");
    assert_eq!(unsafe { sd_field_order(f) }, 5);
    let fam = CString::new("secant").unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { sd_design_build(f, fam.as_ptr(), 2, 2, -1, &mut d) },
        SdStatus::Ok
    );
    assert_eq!(unsafe { sd_design_len(d) }, 5);

    let (mut weak, mut strong) = (0usize, 0usize);
    assert_eq!(
        unsafe { sd_design_measure(d, 0, 0, 10_000_000, &mut weak, &mut strong) },
        SdStatus::Ok
    );
    assert_eq!(weak, 4);
    assert!(strong >= weak);

    let (mut gen, mut flag) = (false, true);
    assert_eq!(
        unsafe { sd_design_hp_check(d, 10_000_000, &mut gen, &mut flag) },
        SdStatus::Ok
    );
    assert!(gen);
    assert!(!flag);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { sd_design_to_json(d, &mut json) }, SdStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["family"], "secant");
    assert_eq!(v["omega"], 2);
    unsafe {
        sd_string_free(json);
        sd_design_free(d);
        sd_field_free(f);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let spec = CString::new("6").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { sd_field_parse(spec.as_ptr(), &mut f) },
        SdStatus::InvalidField
    );
    assert!(f.is_null());
    assert!(last_error().contains('6'));

    let spec = CString::new("x^2").unwrap();
    assert_eq!(
        unsafe { sd_field_parse(spec.as_ptr(), &mut f) },
        SdStatus::Parse
    );
    assert_eq!(
        unsafe { sd_field_parse(ptr::null(), &mut f) },
        SdStatus::NullPointer
    );

    let f3 = field("3");
    let fam = CString::new("tangent").unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { sd_design_build(f3, fam.as_ptr(), 2, 2, -1, &mut d) },
        SdStatus::InvalidParameter
    );
    assert!(last_error().contains("characteristic"));
    unsafe { sd_field_free(f3) };
}

#[test]
fn bounds_and_counts() {
    let (mut fin, mut closed) = (0u64, 0u64);
    assert_eq!(
        unsafe { sd_lower_bound(4, 1, 9, &mut fin, &mut closed) },
        SdStatus::Ok
    );
    assert_eq!((fin, closed), (6, 7));
    assert_eq!(
        unsafe { sd_lower_bound(4, 1, 0, &mut fin, &mut closed) },
        SdStatus::Ok
    );
    assert_eq!(fin, 6);

    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { sd_gaussian_binomial(4, 2, 2, &mut s) },
        SdStatus::Ok
    );
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "35");
    unsafe { sd_string_free(s) };
}

#[test]
fn header_compiles_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(format!("{dir}/include"))
        .arg(format!("{dir}/tests/smoke.c"))
        .status()
    else {
        eprintln!("no C compiler; skipping header check");
        return;
    };
    assert!(status.success());
}
