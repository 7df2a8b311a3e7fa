use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use weyl_cones_ffi::*;

fn string_from(f: impl Fn(*mut std::ffi::c_char, usize, *mut usize) -> WcStatus) -> (WcStatus, String) {
    let mut needed = 0usize;
    let probe = f(ptr::null_mut(), 0, &mut needed);
    if probe != WcStatus::BufferTooSmall {
        return (probe, String::new());
    }
    let mut buf = vec![0 as std::ffi::c_char; needed];
    let s = f(buf.as_mut_ptr(), buf.len(), &mut needed);
    let text = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_owned();
    (s, text)
}

#[test]
fn counts_as_strings() {
    let (s, v) = string_from(|b, c, n| unsafe { wc_region_count(WcFamily::A, 4, 3, b, c, n) });
    assert_eq!((s, v.as_str()), (WcStatus::Ok, "24"));
    let (s, v) = string_from(|b, c, n| unsafe { wc_total_face_count(WcFamily::B, 2, 2, 1, b, c, n) });
    assert_eq!((s, v.as_str()), (WcStatus::Ok, "8"));
    let (s, _) = string_from(|b, c, n| unsafe { wc_total_face_count(WcFamily::Generic, 4, 2, 1, b, c, n) });
    assert_eq!(s, WcStatus::Unsupported);
    let (_, msg) = string_from(|b, c, n| unsafe { wc_last_error(b, c, n) });
    assert!(msg.contains("Generic"), "{msg}");
}

#[test]
fn short_buffers_report_their_size() {
    let mut buf = [0 as std::ffi::c_char; 2];
    let mut needed = 0;
    let s = unsafe { wc_region_count(WcFamily::A, 6, 3, buf.as_mut_ptr(), buf.len(), &mut needed) };
    assert_eq!(s, WcStatus::BufferTooSmall);
    assert_eq!(needed, 4);
}

#[test]
fn config_handles() {
    let json = CString::new(r#"{"family":"B","d":2,"points":[["1/2",3],[-1,"2/7"],[5,1]]}"#).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { wc_config_from_json(json.as_ptr(), &mut cfg) }, WcStatus::Ok);
    assert_eq!(unsafe { (wc_config_n(cfg), wc_config_d(cfg)) }, (3, 2));
    let (s, back) = string_from(|b, c, n| unsafe { wc_config_to_json(cfg, b, c, n) });
    assert_eq!(s, WcStatus::Ok);
    assert!(back.contains("\"1/2\""));
    let (mut chain, mut lattice) = (false, false);
    assert_eq!(unsafe { wc_gp_check(cfg, &mut chain, &mut lattice) }, WcStatus::Ok);
    assert_eq!(chain, lattice);
    unsafe { wc_config_free(cfg) };

    let mut sampled = ptr::null_mut();
    assert_eq!(unsafe { wc_config_sample(WcFamily::B, WcDistribution::Sphere, 3, 2, 5, &mut sampled) }, WcStatus::Ok);
    let mut cones = 0;
    assert_eq!(unsafe { wc_count_cones(sampled, 0, &mut cones) }, WcStatus::Ok);
    assert_eq!(cones, 18);
    let mut faces = 0;
    assert_eq!(unsafe { wc_count_faces(sampled, 1, 0, &mut faces) }, WcStatus::Ok);
    assert_eq!(faces, 18);
    assert_eq!(unsafe { wc_count_faces(sampled, 5, 0, &mut faces) }, WcStatus::OutOfRange);
    unsafe { wc_config_free(sampled) };
}

#[test]
fn errors_map_to_codes() {
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { wc_config_from_json(ptr::null(), &mut cfg) }, WcStatus::NullPointer);
    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { wc_config_from_json(bad.as_ptr(), &mut cfg) }, WcStatus::InvalidArgument);
    assert_eq!(unsafe { wc_config_sample(WcFamily::A, WcDistribution::Gaussian, 2, 2, 0, &mut cfg) }, WcStatus::OutOfRange);
    assert_eq!(unsafe { wc_config_sample(WcFamily::B, WcDistribution::Gaussian, 7, 2, 0, &mut cfg) }, WcStatus::Ok);
    let mut out = 0;
    assert_eq!(unsafe { wc_count_cones(cfg, 0, &mut out) }, WcStatus::Budget);
    unsafe { wc_config_free(cfg) };
    assert_eq!(unsafe { wc_count_cones(ptr::null(), 0, &mut out) }, WcStatus::NullPointer);
    unsafe { wc_config_free(ptr::null_mut()) };
    let msg = unsafe { CStr::from_ptr(wc_status_message(WcStatus::Budget)) };
    assert_eq!(msg.to_str().unwrap(), "combinatorial budget exceeded");
}

#[test]
fn experiments_through_the_boundary() {
    let spec = CString::new(r#"{"quantity":"acceptance","family":"A","n":3,"d":2,"trials":50,"seed":1}"#).unwrap();
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { wc_run_experiment(spec.as_ptr(), 0, &mut report) }, WcStatus::Ok);
    let (mut mean, mut se, mut passed) = (0.0, 0.0, false);
    assert_eq!(unsafe { wc_report_summary(report, &mut mean, &mut se, &mut passed) }, WcStatus::Ok);
    assert_eq!((mean, se, passed), (1.0, 0.0, true));
    let (s, json) = string_from(|b, c, n| unsafe { wc_report_json(report, b, c, n) });
    assert_eq!(s, WcStatus::Ok);
    assert!(json.contains("\"schema\": 1"));
    unsafe { wc_report_free(report) };
}

#[test]
fn header_declares_the_interface() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/weyl_cones.h")).unwrap();
    for name in ["wc_config_sample", "wc_count_cones", "wc_run_experiment", "wc_report_free", "typedef struct WcConfig WcConfig", "WC_STATUS_BUDGET = 5"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles a C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = dir.join("../../target/debug");
    let lib = target.join("libweyl_cones_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or no static library at {}", lib.display());
        return;
    }
    let exe = std::env::temp_dir().join(format!("weyl_cones_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "cones=24 faces=36");
}
