//! C ABI for the Betti-number engine: opaque complex handles, status codes,
//! and JSON report strings. The generated header lives in `include/betti.h`.
//!
//! Ownership rules: every `*_new`/`*_generate`/`from_json`/`double_cover`
//! constructor hands the caller a handle to release with
//! [`betti_complex_free`]; strings returned through out-parameters are
//! released with [`betti_string_free`]. Handles are immutable after
//! construction and safe to share across threads for reads.

use betti_core::cli::{InputSource, MethodChoice, RunConfig};
use betti_core::hodge::{betti_via_cohomology, betti_via_homology_oracle, CohomologyOptions};
use betti_core::{BettiError, SimplicialComplex};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

/// Status codes mirroring the CLI exit-code taxonomy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BettiStatus {
    Ok = 0,
    ParseError = 1,
    ValidationError = 2,
    VerifyMismatch = 3,
    IoError = 4,
    NullPointer = 5,
}

/// Opaque simplicial complex handle.
pub struct BettiComplex {
    inner: SimplicialComplex,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).ok();
    });
}

fn status_of(err: &BettiError) -> BettiStatus {
    match err.exit_code() {
        1 => BettiStatus::ParseError,
        2 => BettiStatus::ValidationError,
        3 => BettiStatus::VerifyMismatch,
        4 => BettiStatus::IoError,
        _ => BettiStatus::ValidationError,
    }
}

fn fail(err: BettiError) -> BettiStatus {
    set_error(&err.to_string());
    status_of(&err)
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, BettiStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(BettiStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        BettiStatus::ParseError
    })
}

/// Message describing the most recent error on this thread, or NULL.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn betti_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr())
    })
}

/// Build a complex from the canonical JSON format
/// `{"n_points": N, "top_simplexes": [[...], ...], "coords": optional}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn betti_complex_from_json(
    json: *const c_char,
    out: *mut *mut BettiComplex,
) -> BettiStatus {
    if out.is_null() {
        set_error("null output pointer");
        return BettiStatus::NullPointer;
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match betti_core::io::parse_complex_json(text) {
        Ok(k) => {
            *out = Box::into_raw(Box::new(BettiComplex { inner: k }));
            BettiStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Generate a named fixture, e.g. `"torus:8,8"`, `"sphere:icosa"`,
/// `"genus:2"`, `"three_torus:3"`.
///
/// # Safety
/// `shape` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn betti_complex_generate(
    shape: *const c_char,
    out: *mut *mut BettiComplex,
) -> BettiStatus {
    if out.is_null() {
        set_error("null output pointer");
        return BettiStatus::NullPointer;
    }
    let text = match read_str(shape) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let parsed = match text.parse::<betti_core::Shape>() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    match parsed.generate() {
        Ok(k) => {
            *out = Box::into_raw(Box::new(BettiComplex { inner: k }));
            BettiStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Glue two copies of an open complex along its boundary.
///
/// # Safety
/// `k` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn betti_complex_double_cover(
    k: *const BettiComplex,
    out: *mut *mut BettiComplex,
) -> BettiStatus {
    if k.is_null() || out.is_null() {
        set_error("null pointer");
        return BettiStatus::NullPointer;
    }
    match (*k).inner.double_cover() {
        Ok(d) => {
            *out = Box::into_raw(Box::new(BettiComplex { inner: d }));
            BettiStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a complex handle. NULL is ignored.
///
/// # Safety
/// `k` must come from a constructor in this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn betti_complex_free(k: *mut BettiComplex) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Top dimension, or -1 for NULL.
///
/// # Safety
/// `k` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn betti_complex_dim(k: *const BettiComplex) -> i32 {
    if k.is_null() {
        return -1;
    }
    (*k).inner.dim() as i32
}

/// Number of r-simplexes, or -1 for NULL.
///
/// # Safety
/// `k` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn betti_complex_skeleton_size(
    k: *const BettiComplex,
    degree: u32,
) -> i64 {
    if k.is_null() {
        return -1;
    }
    (*k).inner.skeleton_size(degree as usize) as i64
}

/// 1 when every codimension-one cell bounds exactly two top cells, else 0
/// (-1 for NULL).
///
/// # Safety
/// `k` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn betti_complex_is_closed(k: *const BettiComplex) -> i32 {
    if k.is_null() {
        return -1;
    }
    (*k).inner.validate_closed_manifold().is_closed() as i32
}

/// Euler characteristic.
///
/// # Safety
/// `k` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn betti_complex_euler(k: *const BettiComplex) -> i64 {
    if k.is_null() {
        return 0;
    }
    (*k).inner.euler_characteristic()
}

/// Exact Betti number from the integer homology oracle.
///
/// # Safety
/// `k` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn betti_number_oracle(
    k: *const BettiComplex,
    degree: u32,
    out: *mut i64,
) -> BettiStatus {
    if k.is_null() || out.is_null() {
        set_error("null pointer");
        return BettiStatus::NullPointer;
    }
    match betti_via_homology_oracle(&(*k).inner, degree as usize) {
        Ok(report) => {
            *out = report.betti as i64;
            BettiStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Betti number through the harmonic-projection pipeline (uniform measures,
/// exact rank) with the given seed.
///
/// # Safety
/// `k` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn betti_number_cohomology(
    k: *const BettiComplex,
    degree: u32,
    seed: u64,
    out: *mut i64,
) -> BettiStatus {
    if k.is_null() || out.is_null() {
        set_error("null pointer");
        return BettiStatus::NullPointer;
    }
    let opts = CohomologyOptions { seed, ..Default::default() };
    match betti_via_cohomology(&(*k).inner, degree as usize, &opts) {
        Ok(report) => {
            *out = report.betti as i64;
            BettiStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Run the full pipeline over a generated fixture or a complex file path and
/// return the JSON report; mirrors the `betti` CLI. `spec` accepts
/// `"generate:torus:8,8"` or `"path:/some/file.json"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn betti_run_json(
    spec: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
) -> BettiStatus {
    if out_json.is_null() {
        set_error("null output pointer");
        return BettiStatus::NullPointer;
    }
    let text = match read_str(spec) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let input = if let Some(rest) = text.strip_prefix("generate:") {
        match rest.parse::<betti_core::Shape>() {
            Ok(s) => InputSource::Generate(s),
            Err(e) => return fail(e),
        }
    } else if let Some(rest) = text.strip_prefix("path:") {
        InputSource::Path(std::path::PathBuf::from(rest))
    } else {
        return fail(BettiError::Parse(
            "spec must start with \"generate:\" or \"path:\"".into(),
        ));
    };
    let cfg = RunConfig { input, seed, method: MethodChoice::ExactRank, ..Default::default() };
    match betti_core::cli::run(&cfg) {
        Ok(outcome) => {
            let rendered = match betti_core::report::render_json(&outcome.report) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            match CString::new(rendered) {
                Ok(c) => {
                    *out_json = c.into_raw();
                    if outcome.exit_code == 3 {
                        set_error("cohomology pipeline disagreed with the homology oracle");
                        return BettiStatus::VerifyMismatch;
                    }
                    BettiStatus::Ok
                }
                Err(_) => {
                    set_error("report contained an interior NUL");
                    BettiStatus::IoError
                }
            }
        }
        Err(e) => fail(e),
    }
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn betti_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_and_query() {
        let shape = CString::new("torus:4,4").unwrap();
        let mut handle: *mut BettiComplex = std::ptr::null_mut();
        unsafe {
            assert_eq!(betti_complex_generate(shape.as_ptr(), &mut handle), BettiStatus::Ok);
            assert_eq!(betti_complex_dim(handle), 2);
            assert_eq!(betti_complex_skeleton_size(handle, 1), 48);
            assert_eq!(betti_complex_is_closed(handle), 1);
            assert_eq!(betti_complex_euler(handle), 0);
            let mut b = -1i64;
            assert_eq!(betti_number_oracle(handle, 1, &mut b), BettiStatus::Ok);
            assert_eq!(b, 2);
            assert_eq!(betti_number_cohomology(handle, 1, 7, &mut b), BettiStatus::Ok);
            assert_eq!(b, 2);
            betti_complex_free(handle);
        }
    }

    #[test]
    fn json_constructor_and_errors() {
        let good = CString::new(
            r#"{"n_points": 4, "top_simplexes": [[0,1,2],[0,1,3],[0,2,3],[1,2,3]]}"#,
        )
        .unwrap();
        let mut handle: *mut BettiComplex = std::ptr::null_mut();
        unsafe {
            assert_eq!(betti_complex_from_json(good.as_ptr(), &mut handle), BettiStatus::Ok);
            assert_eq!(betti_complex_skeleton_size(handle, 2), 4);
            betti_complex_free(handle);

            let bad = CString::new("{not json").unwrap();
            let mut h2: *mut BettiComplex = std::ptr::null_mut();
            assert_eq!(
                betti_complex_from_json(bad.as_ptr(), &mut h2),
                BettiStatus::ParseError
            );
            assert!(h2.is_null());
            let msg = CStr::from_ptr(betti_last_error()).to_str().unwrap();
            assert!(msg.contains("JSON"), "{msg}");
            assert_eq!(
                betti_complex_from_json(std::ptr::null(), &mut h2),
                BettiStatus::NullPointer
            );
        }
    }

    #[test]
    fn double_cover_roundtrip() {
        let open = CString::new(r#"{"n_points": 3, "top_simplexes": [[0,1,2]]}"#).unwrap();
        unsafe {
            let mut h: *mut BettiComplex = std::ptr::null_mut();
            assert_eq!(betti_complex_from_json(open.as_ptr(), &mut h), BettiStatus::Ok);
            assert_eq!(betti_complex_is_closed(h), 0);
            let mut d: *mut BettiComplex = std::ptr::null_mut();
            assert_eq!(betti_complex_double_cover(h, &mut d), BettiStatus::Ok);
            assert_eq!(betti_complex_is_closed(d), 1);
            let mut b = -1i64;
            assert_eq!(betti_number_oracle(d, 2, &mut b), BettiStatus::Ok);
            assert_eq!(b, 1);
            betti_complex_free(h);
            betti_complex_free(d);
        }
    }

    #[test]
    fn run_json_end_to_end() {
        let spec = CString::new("generate:sphere:icosa").unwrap();
        let mut out: *mut c_char = std::ptr::null_mut();
        unsafe {
            assert_eq!(betti_run_json(spec.as_ptr(), 0, &mut out), BettiStatus::Ok);
            let text = CStr::from_ptr(out).to_str().unwrap().to_string();
            betti_string_free(out);
            let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
            let betti: Vec<i64> = parsed["reports"]
                .as_array()
                .unwrap()
                .iter()
                .map(|r| r["betti"].as_i64().unwrap())
                .collect();
            assert_eq!(betti, vec![1, 0, 1]);
        }
    }
}
