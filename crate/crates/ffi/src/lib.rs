//! C ABI for the vvlab experiment driver.
//!
//! Conventions:
//!
//! - Functions return [`VvlabStatus`]; `VvlabOk` (0) means success.
//! - On failure a thread-local message is set; fetch it with
//!   [`vvlab_last_error_message`]. The pointer stays valid until the next
//!   failing call on the same thread.
//! - Strings returned through out-parameters are heap-allocated and must be
//!   released with [`vvlab_string_free`]; opaque handles have matching
//!   `_free` functions. Passing any foreign pointer to a `_free` function
//!   is undefined behavior.
//! - Experiments are addressed by catalog name and configured with the same
//!   `key=value` lines the CLI accepts in `--config` files, so any language
//!   that can call C can drive the full experiment registry.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use vvlab::cli;
use vvlab::hashfam::AffineHash;
use vvlab::verifier::{PromiseInstance, TmappClass, UniqueClass};

/// Result codes for every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VvlabStatus {
    /// Success.
    VvlabOk = 0,
    /// A required pointer argument was null.
    VvlabNullArgument = 1,
    /// A string argument was not valid UTF-8.
    VvlabInvalidUtf8 = 2,
    /// The configuration failed validation; see the error message.
    VvlabInvalidConfig = 3,
    /// The experiment ran but could not complete.
    VvlabRunFailed = 4,
    /// A numeric argument was out of range.
    VvlabOutOfRange = 5,
}

use VvlabStatus::*;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl AsRef<str>) {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(sanitized).expect("nul-free"));
    });
}

/// Message describing the most recent failure on this thread, or null if
/// none has occurred. Owned by the library; do not free.
#[no_mangle]
pub extern "C" fn vvlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |msg| msg.as_ptr())
    })
}

/// Crate version as a static string; do not free.
#[no_mangle]
pub extern "C" fn vvlab_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through an out-parameter of
/// this library (or null), not yet freed.
#[no_mangle]
pub unsafe extern "C" fn vvlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, VvlabStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is null"));
        return Err(VvlabNullArgument);
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        VvlabInvalidUtf8
    })
}

fn give_string(out: *mut *mut c_char, value: String) -> VvlabStatus {
    let c = CString::new(value.replace('\0', " ")).expect("nul-free");
    unsafe { *out = c.into_raw() };
    VvlabOk
}

// ---------------------------------------------------------------------------
// Experiment driver
// ---------------------------------------------------------------------------

/// JSON catalog of every experiment: name, parameters, defaults. Free the
/// result with [`vvlab_string_free`].
///
/// # Safety
/// `json_out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn vvlab_catalog_json(json_out: *mut *mut c_char) -> VvlabStatus {
    if json_out.is_null() {
        set_error("json_out is null");
        return VvlabNullArgument;
    }
    let json = serde_json::to_string_pretty(&cli::catalog()).expect("catalog serializes");
    give_string(json_out, json)
}

/// Run a catalog experiment.
///
/// `config_text` holds `key=value` lines (the CLI's `--config` format and
/// parameter names); `out_dir` receives the CSV/JSON artifacts. On success
/// `pass_out` is 1 when every embedded bound-check passed and
/// `summary_json_out` (free with [`vvlab_string_free`]) carries the summary
/// document.
///
/// # Safety
/// All pointer arguments must be valid; string arguments are NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn vvlab_run_experiment(
    name: *const c_char,
    config_text: *const c_char,
    out_dir: *const c_char,
    pass_out: *mut u8,
    summary_json_out: *mut *mut c_char,
) -> VvlabStatus {
    if pass_out.is_null() || summary_json_out.is_null() {
        set_error("output pointer is null");
        return VvlabNullArgument;
    }
    let name = match unsafe { read_str(name, "experiment name") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let config_text = match unsafe { read_str(config_text, "config text") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let out_dir = match unsafe { read_str(out_dir, "output directory") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let config =
        match cli::ExperimentConfig::resolve(name, Path::new(out_dir), Some(config_text), &[]) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return VvlabInvalidConfig;
            }
        };
    match cli::run(&config) {
        Ok(outcome) => {
            unsafe { *pass_out = outcome.pass as u8 };
            let summary_path = config
                .out_dir
                .join(format!("{}_summary.json", config.experiment.name));
            let summary = std::fs::read_to_string(&summary_path).unwrap_or_default();
            give_string(summary_json_out, summary)
        }
        Err(e) => {
            set_error(e.to_string());
            VvlabRunFailed
        }
    }
}

// ---------------------------------------------------------------------------
// Hash handles
// ---------------------------------------------------------------------------

/// Opaque handle to a sampled hash-family member.
pub struct VvlabHash {
    inner: AffineHash,
}

/// Draw a uniformly random member of the affine family
/// `{0,1}^l -> {0,1}^m`, deterministically from `seed`.
///
/// # Safety
/// `hash_out` must be a valid writable pointer; free the handle with
/// [`vvlab_hash_free`].
#[no_mangle]
pub unsafe extern "C" fn vvlab_hash_sample(
    input_bits: u32,
    output_bits: u32,
    seed: u64,
    hash_out: *mut *mut VvlabHash,
) -> VvlabStatus {
    if hash_out.is_null() {
        set_error("hash_out is null");
        return VvlabNullArgument;
    }
    let mut rng = vvlab::seedstream::setup_rng(seed);
    match AffineHash::sample(input_bits, output_bits, &mut rng) {
        Ok(inner) => {
            unsafe { *hash_out = Box::into_raw(Box::new(VvlabHash { inner })) };
            VvlabOk
        }
        Err(e) => {
            set_error(e.to_string());
            VvlabOutOfRange
        }
    }
}

/// Evaluate `h(y)`; the result's low `m` bits are the output string.
///
/// # Safety
/// `hash` must be a live handle from this library; `value_out` valid.
#[no_mangle]
pub unsafe extern "C" fn vvlab_hash_evaluate(
    hash: *const VvlabHash,
    input: u64,
    value_out: *mut u64,
) -> VvlabStatus {
    if hash.is_null() || value_out.is_null() {
        set_error("hash or value_out is null");
        return VvlabNullArgument;
    }
    match unsafe { &*hash }.inner.evaluate(input) {
        Ok(v) => {
            unsafe { *value_out = v };
            VvlabOk
        }
        Err(e) => {
            set_error(e.to_string());
            VvlabOutOfRange
        }
    }
}

/// Serialize a hash to its text encoding (header plus hex rows). Free the
/// string with [`vvlab_string_free`].
///
/// # Safety
/// `hash` must be a live handle; `text_out` valid.
#[no_mangle]
pub unsafe extern "C" fn vvlab_hash_encode(
    hash: *const VvlabHash,
    text_out: *mut *mut c_char,
) -> VvlabStatus {
    if hash.is_null() || text_out.is_null() {
        set_error("hash or text_out is null");
        return VvlabNullArgument;
    }
    give_string(text_out, unsafe { &*hash }.inner.to_string())
}

/// Parse a hash from its text encoding.
///
/// # Safety
/// `text` must be NUL-terminated; `hash_out` valid; free the handle with
/// [`vvlab_hash_free`].
#[no_mangle]
pub unsafe extern "C" fn vvlab_hash_decode(
    text: *const c_char,
    hash_out: *mut *mut VvlabHash,
) -> VvlabStatus {
    if hash_out.is_null() {
        set_error("hash_out is null");
        return VvlabNullArgument;
    }
    let text = match unsafe { read_str(text, "hash text") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    match text.parse::<AffineHash>() {
        Ok(inner) => {
            unsafe { *hash_out = Box::into_raw(Box::new(VvlabHash { inner })) };
            VvlabOk
        }
        Err(e) => {
            set_error(e.to_string());
            VvlabInvalidConfig
        }
    }
}

/// Release a hash handle.
///
/// # Safety
/// `hash` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vvlab_hash_free(hash: *mut VvlabHash) {
    if !hash.is_null() {
        drop(unsafe { Box::from_raw(hash) });
    }
}

// ---------------------------------------------------------------------------
// Promise-instance handles
// ---------------------------------------------------------------------------

/// Opaque handle to a witness table with thresholds.
pub struct VvlabInstance {
    inner: PromiseInstance,
}

/// Three-way classification values returned by
/// [`vvlab_instance_classify`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VvlabClassification {
    VvlabNo = 0,
    VvlabYes = 1,
    VvlabPromiseViolated = 2,
}

/// Unique-promise classification values returned by
/// [`vvlab_instance_classify_unique`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VvlabUniqueClassification {
    VvlabUniqueNo = 0,
    VvlabUniqueYes = 1,
    VvlabNeither = 2,
}

/// Parse an instance from the witness-table text format
/// (`l=`, `p1=`, `p2=` headers then one probability per line).
///
/// # Safety
/// `text` NUL-terminated; `instance_out` valid; free with
/// [`vvlab_instance_free`].
#[no_mangle]
pub unsafe extern "C" fn vvlab_instance_from_text(
    text: *const c_char,
    instance_out: *mut *mut VvlabInstance,
) -> VvlabStatus {
    if instance_out.is_null() {
        set_error("instance_out is null");
        return VvlabNullArgument;
    }
    let text = match unsafe { read_str(text, "instance text") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    match text.parse::<PromiseInstance>() {
        Ok(inner) => {
            unsafe { *instance_out = Box::into_raw(Box::new(VvlabInstance { inner })) };
            VvlabOk
        }
        Err(e) => {
            set_error(e.to_string());
            VvlabInvalidConfig
        }
    }
}

/// Classify against the plain promise.
///
/// # Safety
/// `instance` must be a live handle; `class_out` valid.
#[no_mangle]
pub unsafe extern "C" fn vvlab_instance_classify(
    instance: *const VvlabInstance,
    class_out: *mut VvlabClassification,
) -> VvlabStatus {
    if instance.is_null() || class_out.is_null() {
        set_error("instance or class_out is null");
        return VvlabNullArgument;
    }
    let class = match unsafe { &*instance }.inner.classify() {
        TmappClass::TmappNo => VvlabClassification::VvlabNo,
        TmappClass::TmappYes => VvlabClassification::VvlabYes,
        TmappClass::PromiseViolated => VvlabClassification::VvlabPromiseViolated,
    };
    unsafe { *class_out = class };
    VvlabOk
}

/// Classify against the unique-witness promise.
///
/// # Safety
/// `instance` must be a live handle; `class_out` valid.
#[no_mangle]
pub unsafe extern "C" fn vvlab_instance_classify_unique(
    instance: *const VvlabInstance,
    class_out: *mut VvlabUniqueClassification,
) -> VvlabStatus {
    if instance.is_null() || class_out.is_null() {
        set_error("instance or class_out is null");
        return VvlabNullArgument;
    }
    let class = match unsafe { &*instance }.inner.classify_unique() {
        UniqueClass::UmappNo => VvlabUniqueClassification::VvlabUniqueNo,
        UniqueClass::UmappYes => VvlabUniqueClassification::VvlabUniqueYes,
        UniqueClass::Neither => VvlabUniqueClassification::VvlabNeither,
    };
    unsafe { *class_out = class };
    VvlabOk
}

/// Release an instance handle.
///
/// # Safety
/// `instance` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vvlab_instance_free(instance: *mut VvlabInstance) {
    if !instance.is_null() {
        drop(unsafe { Box::from_raw(instance) });
    }
}
