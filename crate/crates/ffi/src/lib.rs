//! C interface to `weyl-cones`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `_free`. Every fallible call returns a
//! [`WcStatus`]; the message of the last failure on the calling thread is
//! available from [`wc_last_error`]. Strings are copied into caller
//! buffers: `needed` always receives the size including the terminating
//! NUL, and a short buffer yields `WC_STATUS_BUFFER_TOO_SMALL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use weyl_cones::combinatorics::{region_count, total_face_count};
use weyl_cones::estimators::{run_experiment, sample_config, ExperimentSpec, Report};
use weyl_cones::rng::{PointDistribution, RngSpec};
use weyl_cones::tessellation::{check_gp_chainwise, check_gp_lattice, enumerate_cones, enumerate_faces, Budget, PointConfig};
use weyl_cones::{Error, Family};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    GeneralPosition = 4,
    Budget = 5,
    Unsupported = 6,
    Exhausted = 7,
    BufferTooSmall = 8,
    Panic = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcFamily {
    A = 0,
    B = 1,
    Generic = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcDistribution {
    Gaussian = 0,
    Sphere = 1,
    SymmetricExponential = 2,
}

/// A point configuration with its family tag.
pub struct WcConfig(PointConfig);

/// A finished Monte Carlo experiment.
pub struct WcReport {
    report: Report,
    json: String,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> WcStatus {
    match e {
        Error::DimensionMismatch { .. } | Error::Invalid(_) | Error::Json(_) => WcStatus::InvalidArgument,
        Error::OutOfRange(_) => WcStatus::OutOfRange,
        Error::GeneralPosition(_) => WcStatus::GeneralPosition,
        Error::Budget(_) => WcStatus::Budget,
        Error::UnsupportedFamily { .. } => WcStatus::Unsupported,
        Error::Exhausted { .. } => WcStatus::Exhausted,
        Error::ProjectionTie | Error::Io(_) => WcStatus::Internal,
    }
}

fn fail(e: Error) -> WcStatus {
    set_error(e.to_string());
    status_of(&e)
}

/// Runs `f`, turning panics into `WC_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> WcStatus) -> WcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == WcStatus::Ok {
                set_error("");
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            WcStatus::Panic
        }
    }
}

fn family(f: WcFamily) -> Family {
    match f {
        WcFamily::A => Family::A,
        WcFamily::B => Family::B,
        WcFamily::Generic => Family::Generic,
    }
}

fn distribution(d: WcDistribution) -> PointDistribution {
    match d {
        WcDistribution::Gaussian => PointDistribution::Gaussian,
        WcDistribution::Sphere => PointDistribution::Sphere,
        WcDistribution::SymmetricExponential => PointDistribution::SymmetricExponential,
    }
}

fn budget(max_candidates: u64) -> Budget {
    if max_candidates == 0 {
        Budget::default()
    } else {
        Budget::candidates(max_candidates)
    }
}

unsafe fn copy_out(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> WcStatus {
    let len = s.len() + 1;
    if !needed.is_null() {
        *needed = len;
    }
    if buf.is_null() || cap < len {
        return WcStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    WcStatus::Ok
}

unsafe fn write_string(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> WcStatus {
    let status = copy_out(s, buf, cap, needed);
    if status == WcStatus::BufferTooSmall {
        set_error(format!("buffer of {cap} bytes is too small, {} needed", s.len() + 1));
    }
    status
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, WcStatus> {
    if p.is_null() {
        set_error("null string");
        return Err(WcStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not UTF-8");
        WcStatus::InvalidArgument
    })
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return WcStatus::NullPointer;
        })+
    };
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn wc_status_message(status: WcStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        WcStatus::Ok => b"ok\0",
        WcStatus::NullPointer => b"null pointer argument\0",
        WcStatus::InvalidArgument => b"invalid argument\0",
        WcStatus::OutOfRange => b"parameter out of range\0",
        WcStatus::GeneralPosition => b"configuration not in general position\0",
        WcStatus::Budget => b"combinatorial budget exceeded\0",
        WcStatus::Unsupported => b"operation not supported for this family\0",
        WcStatus::Exhausted => b"sampler exhausted its attempts\0",
        WcStatus::BufferTooSmall => b"output buffer too small\0",
        WcStatus::Panic => b"internal panic\0",
        WcStatus::Internal => b"internal error\0",
    };
    s.as_ptr() as *const c_char
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the last failed call on this thread (empty after a success).
/// Reading it never changes it.
///
/// # Safety
/// `buf` must point to `cap` writable bytes or be null; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn wc_last_error(buf: *mut c_char, cap: usize, needed: *mut usize) -> WcStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    copy_out(&msg, buf, cap, needed)
}

/// Number of cones of the tessellation as a decimal string.
///
/// # Safety
/// `buf` must point to `cap` writable bytes or be null; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn wc_region_count(fam: WcFamily, n: usize, d: usize, buf: *mut c_char, cap: usize, needed: *mut usize) -> WcStatus {
    guard(|| write_string(&region_count(family(fam), n, d).to_string(), buf, cap, needed))
}

/// Number of `k`-faces of the tessellation as a decimal string.
///
/// # Safety
/// `buf` must point to `cap` writable bytes or be null; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn wc_total_face_count(fam: WcFamily, n: usize, d: usize, k: usize, buf: *mut c_char, cap: usize, needed: *mut usize) -> WcStatus {
    guard(|| match total_face_count(family(fam), n, d, k) {
        Ok(v) => write_string(&v.to_string(), buf, cap, needed),
        Err(e) => fail(e),
    })
}

/// Parses `{"family", "d", "points"}` JSON into a new configuration.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_config_from_json(json: *const c_char, out: *mut *mut WcConfig) -> WcStatus {
    guard(|| {
        non_null!(out);
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match PointConfig::from_json(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(WcConfig(cfg)));
                WcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Draws a configuration of `n` i.i.d. points in general position.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_config_sample(fam: WcFamily, dist: WcDistribution, n: usize, d: usize, seed: u64, out: *mut *mut WcConfig) -> WcStatus {
    guard(|| {
        non_null!(out);
        match sample_config(distribution(dist), family(fam), n, d, RngSpec::new(seed, 0)) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(WcConfig(cfg)));
                WcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a configuration; null is ignored.
///
/// # Safety
/// `cfg` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wc_config_free(cfg: *mut WcConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Exact JSON of a configuration.
///
/// # Safety
/// `cfg` must be a live handle; `buf` must point to `cap` writable bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn wc_config_to_json(cfg: *const WcConfig, buf: *mut c_char, cap: usize, needed: *mut usize) -> WcStatus {
    guard(|| {
        non_null!(cfg);
        write_string(&(*cfg).0.to_json(), buf, cap, needed)
    })
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `cfg` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wc_config_n(cfg: *const WcConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.0.n())
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `cfg` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn wc_config_d(cfg: *const WcConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.0.d())
}

/// Both general-position checks.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wc_gp_check(cfg: *const WcConfig, chainwise: *mut bool, lattice: *mut bool) -> WcStatus {
    guard(|| {
        non_null!(cfg, chainwise, lattice);
        *chainwise = check_gp_chainwise(&(*cfg).0);
        *lattice = check_gp_lattice(&(*cfg).0);
        WcStatus::Ok
    })
}

/// Enumerates the cones; `max_candidates = 0` keeps the default limits.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wc_count_cones(cfg: *const WcConfig, max_candidates: u64, out: *mut u64) -> WcStatus {
    guard(|| {
        non_null!(cfg, out);
        match enumerate_cones(&(*cfg).0, &budget(max_candidates)) {
            Ok(c) => {
                *out = c.len() as u64;
                WcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Enumerates the `k`-faces; `max_candidates = 0` keeps the default limits.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wc_count_faces(cfg: *const WcConfig, k: usize, max_candidates: u64, out: *mut u64) -> WcStatus {
    guard(|| {
        non_null!(cfg, out);
        match enumerate_faces(&(*cfg).0, k, &budget(max_candidates)) {
            Ok(f) => {
                *out = f.len() as u64;
                WcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Runs an experiment described by JSON (the format `montecarlo --input`
/// reads).
///
/// # Safety
/// `spec_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_run_experiment(spec_json: *const c_char, max_candidates: u64, out: *mut *mut WcReport) -> WcStatus {
    guard(|| {
        non_null!(out);
        let text = match read_str(spec_json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let spec: ExperimentSpec = match serde_json::from_str(text) {
            Ok(s) => s,
            Err(e) => return fail(e.into()),
        };
        match run_experiment(&spec, &budget(max_candidates)) {
            Ok(report) => {
                let json = report.to_json();
                *out = Box::into_raw(Box::new(WcReport { report, json }));
                WcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// The report as JSON.
///
/// # Safety
/// `report` must be a live handle; `buf` must point to `cap` writable bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn wc_report_json(report: *const WcReport, buf: *mut c_char, cap: usize, needed: *mut usize) -> WcStatus {
    guard(|| {
        non_null!(report);
        write_string(&(*report).json, buf, cap, needed)
    })
}

/// Estimated mean, its standard error, and whether it agreed with the
/// closed form.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn wc_report_summary(report: *const WcReport, mean: *mut f64, stderr: *mut f64, passed: *mut bool) -> WcStatus {
    guard(|| {
        non_null!(report, mean, stderr, passed);
        let r = &(*report).report;
        *mean = r.estimate.mean;
        *stderr = r.estimate.stderr;
        *passed = r.passed;
        WcStatus::Ok
    })
}

/// Releases a report; null is ignored.
///
/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wc_report_free(report: *mut WcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
