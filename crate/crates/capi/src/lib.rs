//! C ABI for the strata pipeline: opaque handles, integer status codes and
//! a thread-local last-error message. All returned strings are owned by the
//! library and released with `strata_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use strata_core::error::Error;
use strata_core::geometry::PointCloud;
use strata_core::io::digest_bytes;
use strata_core::pipeline::{run_pipeline, PipelineConfig};
use strata_core::scaffolding::EdgeRule;
use strata_core::synth::{generate, Shape, SynthSpec};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrataStatus {
    StrataOk = 0,
    /// Bad input (file, CSV, parameter).
    StrataInputError = 1,
    /// Internal invariant violation.
    StrataInvariantError = 2,
    /// A required pointer argument was null.
    StrataNullPointer = 3,
    /// A string argument was not valid UTF-8.
    StrataUtf8Error = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let safe = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = safe);
}

fn fail(err: &Error) -> StrataStatus {
    set_error(&err.to_string());
    match err.exit_code() {
        2 => StrataStatus::StrataInvariantError,
        _ => StrataStatus::StrataInputError,
    }
}

fn null_arg(name: &str) -> StrataStatus {
    set_error(&format!("null pointer argument: {name}"));
    StrataStatus::StrataNullPointer
}

/// # Safety
/// `s` must be a valid NUL-terminated string or null.
unsafe fn utf8_arg<'a>(s: *const c_char, name: &str) -> Result<&'a str, StrataStatus> {
    if s.is_null() {
        return Err(null_arg(name));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(&format!("argument {name} is not valid UTF-8"));
        StrataStatus::StrataUtf8Error
    })
}

/// Message describing the most recent error on this thread. The pointer is
/// owned by the library and valid until the next failing call.
#[no_mangle]
pub extern "C" fn strata_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// An immutable point cloud.
pub struct StrataCloud {
    cloud: PointCloud,
    digest: String,
}

/// Pipeline configuration; create with `strata_config_new`, adjust with the
/// setters, pass to `strata_run_pipeline`.
pub struct StrataConfig {
    inner: PipelineConfig,
}

/// Results of one pipeline run: scaffolding and spine graph documents
/// (JSON) and a human-readable summary.
pub struct StrataOutput {
    scaffolding_json: CString,
    spine_json: CString,
    summary: CString,
}

/// Load a point cloud from a CSV file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn strata_cloud_from_csv_file(
    path: *const c_char,
    has_header: bool,
    out: *mut *mut StrataCloud,
) -> StrataStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let path = match utf8_arg(path, "path") {
        Ok(p) => p,
        Err(s) => return s,
    };
    let bytes = match std::fs::read(Path::new(path)) {
        Ok(b) => b,
        Err(e) => return fail(&Error::from(e)),
    };
    let text = String::from_utf8_lossy(&bytes);
    match strata_core::io::cloud_from_csv(&text, has_header) {
        Ok(cloud) => {
            *out = Box::into_raw(Box::new(StrataCloud {
                cloud,
                digest: digest_bytes(&bytes),
            }));
            StrataStatus::StrataOk
        }
        Err(e) => fail(&e),
    }
}

/// Build a cloud from a dense row-major array of `len` points with `dim`
/// coordinates each.
///
/// # Safety
/// `data` must point to `len * dim` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn strata_cloud_from_rows(
    data: *const f64,
    len: usize,
    dim: usize,
    out: *mut *mut StrataCloud,
) -> StrataStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if data.is_null() {
        return null_arg("data");
    }
    let flat = std::slice::from_raw_parts(data, len * dim);
    let rows: Vec<Vec<f64>> = flat.chunks(dim).map(|c| c.to_vec()).collect();
    match PointCloud::new(rows) {
        Ok(cloud) => {
            let digest = digest_bytes(
                &flat
                    .iter()
                    .flat_map(|x| x.to_le_bytes())
                    .collect::<Vec<u8>>(),
            );
            *out = Box::into_raw(Box::new(StrataCloud { cloud, digest }));
            StrataStatus::StrataOk
        }
        Err(e) => fail(&e),
    }
}

/// Generate one of the built-in synthetic shapes (see the CLI for names).
///
/// # Safety
/// `shape` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn strata_cloud_synth(
    shape: *const c_char,
    seed: u64,
    noise_sigma: f64,
    out: *mut *mut StrataCloud,
) -> StrataStatus {
    if out.is_null() {
        return null_arg("out");
    }
    let name = match utf8_arg(shape, "shape") {
        Ok(s) => s,
        Err(s) => return s,
    };
    let shape: Shape = match name.parse() {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let spec = SynthSpec {
        noise_sigma,
        ..SynthSpec::new(shape, seed)
    };
    match generate(&spec) {
        Ok(res) => {
            let digest = format!("synth:{name}:{seed}:{noise_sigma}");
            *out = Box::into_raw(Box::new(StrataCloud {
                cloud: res.cloud,
                digest,
            }));
            StrataStatus::StrataOk
        }
        Err(e) => fail(&e),
    }
}

/// Number of points, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn strata_cloud_len(cloud: *const StrataCloud) -> usize {
    if cloud.is_null() {
        return 0;
    }
    unsafe { (*cloud).cloud.len() }
}

/// Ambient dimension, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn strata_cloud_dim(cloud: *const StrataCloud) -> usize {
    if cloud.is_null() {
        return 0;
    }
    unsafe { (*cloud).cloud.dim() }
}

/// Release a cloud handle; null is a no-op.
#[no_mangle]
pub extern "C" fn strata_cloud_free(cloud: *mut StrataCloud) {
    if !cloud.is_null() {
        drop(unsafe { Box::from_raw(cloud) });
    }
}

/// New configuration with the default parameters.
#[no_mangle]
pub extern "C" fn strata_config_new() -> *mut StrataConfig {
    Box::into_raw(Box::new(StrataConfig {
        inner: PipelineConfig::default(),
    }))
}

/// Release a configuration; null is a no-op.
#[no_mangle]
pub extern "C" fn strata_config_free(config: *mut StrataConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

macro_rules! config_setter {
    ($(#[$doc:meta])* $name:ident, $field:ident, $ty:ty, $conv:expr) => {
        $(#[$doc])*
        #[no_mangle]
        pub extern "C" fn $name(config: *mut StrataConfig, value: $ty) -> StrataStatus {
            if config.is_null() {
                return null_arg("config");
            }
            #[allow(clippy::redundant_closure_call)]
            {
                unsafe { (*config).inner.$field = ($conv)(value) };
            }
            StrataStatus::StrataOk
        }
    };
}

config_setter!(
    /// Eigenthreshold for cover-tree subdivision.
    strata_config_set_tau, tau, f64, |v| v);
config_setter!(
    /// Scaffolding distance threshold; negative restores automatic choice.
    strata_config_set_delta, delta, f64, |v: f64| if v > 0.0 { Some(v) } else { None });
config_setter!(
    /// Persistent-H0 subdivision threshold; non-positive disables it.
    strata_config_set_h0_thresh, h0_thresh, f64,
    |v: f64| if v > 0.0 { Some(v) } else { None });
config_setter!(
    /// Higher-persistence subdivision threshold; non-positive disables it.
    strata_config_set_pers_thresh, higher_pers_thresh, f64,
    |v: f64| if v > 0.0 { Some(v) } else { None });
config_setter!(
    /// Decorate spine vertices with persistent Betti vectors.
    strata_config_set_betti, betti, bool, |v| v);
config_setter!(
    /// Seed recorded in provenance.
    strata_config_set_seed, seed, u64, |v| v);

/// Edge rule: 0 joins nodes by center distance, 1 by minimum cluster
/// distance.
#[no_mangle]
pub extern "C" fn strata_config_set_edge_rule(
    config: *mut StrataConfig,
    rule: i32,
) -> StrataStatus {
    if config.is_null() {
        return null_arg("config");
    }
    let rule = match rule {
        0 => EdgeRule::Centers,
        1 => EdgeRule::Clusters,
        other => {
            set_error(&format!("edge rule must be 0 or 1, got {other}"));
            return StrataStatus::StrataInputError;
        }
    };
    unsafe { (*config).inner.edge_rule = rule };
    StrataStatus::StrataOk
}

/// Run the full pipeline. On success `out` receives an output handle.
///
/// # Safety
/// All pointers must be valid handles from this library.
#[no_mangle]
pub unsafe extern "C" fn strata_run_pipeline(
    cloud: *const StrataCloud,
    config: *const StrataConfig,
    out: *mut *mut StrataOutput,
) -> StrataStatus {
    if out.is_null() {
        return null_arg("out");
    }
    if cloud.is_null() {
        return null_arg("cloud");
    }
    if config.is_null() {
        return null_arg("config");
    }
    let cloud = &*cloud;
    let config = &(*config).inner;
    match run_pipeline(&cloud.cloud, config, &cloud.digest) {
        Ok(res) => {
            let pack = |s: String| CString::new(s.replace('\0', " ")).unwrap();
            let scaffolding_json = match res.scaffolding_doc.to_json() {
                Ok(j) => pack(j),
                Err(e) => return fail(&e),
            };
            let spine_json = match res.spine_doc.to_json() {
                Ok(j) => pack(j),
                Err(e) => return fail(&e),
            };
            let summary = pack(res.summary.render());
            *out = Box::into_raw(Box::new(StrataOutput {
                scaffolding_json,
                spine_json,
                summary,
            }));
            StrataStatus::StrataOk
        }
        Err(e) => fail(&e),
    }
}

fn dup_cstring(s: &CString) -> *mut c_char {
    // hand the caller an owned copy released via strata_string_free
    s.clone().into_raw()
}

/// Scaffolding graph document as JSON (caller frees with
/// `strata_string_free`).
#[no_mangle]
pub extern "C" fn strata_output_scaffolding_json(out: *const StrataOutput) -> *mut c_char {
    if out.is_null() {
        return ptr::null_mut();
    }
    unsafe { dup_cstring(&(*out).scaffolding_json) }
}

/// Spine graph document as JSON (caller frees with `strata_string_free`).
#[no_mangle]
pub extern "C" fn strata_output_spine_json(out: *const StrataOutput) -> *mut c_char {
    if out.is_null() {
        return ptr::null_mut();
    }
    unsafe { dup_cstring(&(*out).spine_json) }
}

/// Human-readable run summary (caller frees with `strata_string_free`).
#[no_mangle]
pub extern "C" fn strata_output_summary(out: *const StrataOutput) -> *mut c_char {
    if out.is_null() {
        return ptr::null_mut();
    }
    unsafe { dup_cstring(&(*out).summary) }
}

/// Release an output handle; null is a no-op.
#[no_mangle]
pub extern "C" fn strata_output_free(out: *mut StrataOutput) {
    if !out.is_null() {
        drop(unsafe { Box::from_raw(out) });
    }
}

/// Release a string returned by this library; null is a no-op.
#[no_mangle]
pub extern "C" fn strata_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synth_pipeline_round_trip_through_the_c_surface() {
        unsafe {
            let mut cloud: *mut StrataCloud = ptr::null_mut();
            let shape = CString::new("plane_one_line").unwrap();
            let status = strata_cloud_synth(shape.as_ptr(), 3, 0.01, &mut cloud);
            assert_eq!(status, StrataStatus::StrataOk);
            assert_eq!(strata_cloud_dim(cloud), 3);
            assert!(strata_cloud_len(cloud) > 0);

            let config = strata_config_new();
            assert_eq!(strata_config_set_tau(config, 0.1), StrataStatus::StrataOk);
            assert_eq!(strata_config_set_delta(config, 1.0), StrataStatus::StrataOk);
            assert_eq!(strata_config_set_edge_rule(config, 1), StrataStatus::StrataOk);

            let mut out: *mut StrataOutput = ptr::null_mut();
            let status = strata_run_pipeline(cloud, config, &mut out);
            assert_eq!(status, StrataStatus::StrataOk);
            let json = strata_output_spine_json(out);
            assert!(!json.is_null());
            let text = CStr::from_ptr(json).to_str().unwrap();
            assert!(text.contains("\"format_version\""));
            strata_string_free(json);
            let summary = strata_output_summary(out);
            assert!(CStr::from_ptr(summary).to_str().unwrap().contains("points:"));
            strata_string_free(summary);

            strata_output_free(out);
            strata_config_free(config);
            strata_cloud_free(cloud);
        }
    }

    #[test]
    fn errors_set_status_and_message() {
        unsafe {
            let mut cloud: *mut StrataCloud = ptr::null_mut();
            let shape = CString::new("no_such_shape").unwrap();
            let status = strata_cloud_synth(shape.as_ptr(), 0, 0.0, &mut cloud);
            assert_eq!(status, StrataStatus::StrataInputError);
            let msg = CStr::from_ptr(strata_last_error()).to_str().unwrap();
            assert!(msg.contains("unknown shape"));

            assert_eq!(
                strata_cloud_synth(shape.as_ptr(), 0, 0.0, ptr::null_mut()),
                StrataStatus::StrataNullPointer
            );
            assert_eq!(strata_config_set_edge_rule(ptr::null_mut(), 0), StrataStatus::StrataNullPointer);
        }
    }

    #[test]
    fn null_handles_are_safe() {
        assert_eq!(strata_cloud_len(ptr::null()), 0);
        assert_eq!(strata_cloud_dim(ptr::null()), 0);
        strata_cloud_free(ptr::null_mut());
        strata_output_free(ptr::null_mut());
        strata_config_free(ptr::null_mut());
        strata_string_free(ptr::null_mut());
        assert!(strata_output_spine_json(ptr::null()).is_null());
    }

    #[test]
    fn rows_constructor_validates() {
        unsafe {
            let data = [0.0, 0.0, 1.0, 1.0, 2.0, 4.0];
            let mut cloud: *mut StrataCloud = ptr::null_mut();
            let status = strata_cloud_from_rows(data.as_ptr(), 3, 2, &mut cloud);
            assert_eq!(status, StrataStatus::StrataOk);
            assert_eq!(strata_cloud_len(cloud), 3);
            assert_eq!(strata_cloud_dim(cloud), 2);
            strata_cloud_free(cloud);
        }
    }
}
