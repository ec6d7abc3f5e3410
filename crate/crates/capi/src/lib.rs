//! C ABI for the gptkit toolkit. Theories are opaque handles; results
//! come back as JSON strings with the same schema the CLI emits. Every
//! function returns a status code, and `gpt_last_error` exposes the
//! message of the most recent failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use gptkit::audit;
use gptkit::instances;
use gptkit::report::{to_json_string, ReportFile};
use gptkit::spec_file::TheorySpecFile;
use gptkit::TheoryInstance;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GptStatus {
    Ok = 0,
    InvalidArgument = 1,
    BadSpec = 2,
    ComputeFailed = 3,
}

/// Opaque theory handle; create with `gpt_theory_new`, release with
/// `gpt_theory_free`.
pub struct GptTheory {
    inner: TheoryInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).ok();
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

/// Message of the most recent error on this thread, or NULL when the last
/// call succeeded. The pointer stays valid until the next failing call on
/// the same thread; do not free it.
#[no_mangle]
pub extern "C" fn gpt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(ptr::null())
    })
}

unsafe fn read_utf8<'a>(ptr: *const c_char, field: &str) -> Result<&'a str, GptStatus> {
    if ptr.is_null() {
        set_error(format!("{field} must not be NULL"));
        return Err(GptStatus::InvalidArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{field} must be valid UTF-8"));
        GptStatus::InvalidArgument
    })
}

fn export_string(s: String, out: *mut *mut c_char) -> GptStatus {
    match CString::new(s) {
        Ok(cs) => {
            unsafe { *out = cs.into_raw() };
            clear_error();
            GptStatus::Ok
        }
        Err(_) => {
            set_error("result contained an interior NUL byte");
            GptStatus::ComputeFailed
        }
    }
}

/// Creates a theory from a built-in name (`classical:<c>`, `quantum:<c>`,
/// `ball:<d2>`, `boxworld`, `boxworld-pair`) or from the JSON text of a
/// theory spec document (detected by a leading `{`).
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer; the
/// returned handle must be released with [`gpt_theory_free`].
#[no_mangle]
pub unsafe extern "C" fn gpt_theory_new(
    spec: *const c_char,
    out: *mut *mut GptTheory,
) -> GptStatus {
    if out.is_null() {
        set_error("out must not be NULL");
        return GptStatus::InvalidArgument;
    }
    let text = match read_utf8(spec, "spec") {
        Ok(t) => t,
        Err(code) => return code,
    };
    let built = if text.trim_start().starts_with('{') {
        TheorySpecFile::parse(text).and_then(|f| f.build())
    } else {
        instances::by_name(text.trim())
    };
    match built {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(GptTheory { inner }));
            clear_error();
            GptStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            *out = ptr::null_mut();
            GptStatus::BadSpec
        }
    }
}

/// Releases a theory handle. NULL is ignored.
///
/// # Safety
/// `theory` must be a pointer from [`gpt_theory_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gpt_theory_free(theory: *mut GptTheory) {
    if !theory.is_null() {
        drop(Box::from_raw(theory));
    }
}

/// Name of the theory as a newly allocated string (free with
/// [`gpt_string_free`]).
///
/// # Safety
/// `theory` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpt_theory_name(
    theory: *const GptTheory,
    out: *mut *mut c_char,
) -> GptStatus {
    if theory.is_null() || out.is_null() {
        set_error("theory and out must not be NULL");
        return GptStatus::InvalidArgument;
    }
    export_string((*theory).inner.name.clone(), out)
}

/// Runs requirement audits. `requirements` is a comma-separated subset of
/// `1,2,3,4,5,5p` (NULL audits all of them). The report JSON lands in
/// `out` (free with [`gpt_string_free`]); the verdict summary is the same
/// one the CLI maps to exit codes.
///
/// # Safety
/// `theory` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpt_audit(
    theory: *const GptTheory,
    requirements: *const c_char,
    seed: u64,
    samples: usize,
    out: *mut *mut c_char,
) -> GptStatus {
    if theory.is_null() || out.is_null() {
        set_error("theory and out must not be NULL");
        return GptStatus::InvalidArgument;
    }
    let labels: Vec<String> = if requirements.is_null() {
        audit::all_requirements()
    } else {
        match read_utf8(requirements, "requirements") {
            Ok(t) => t
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect(),
            Err(code) => return code,
        }
    };
    let instance = &(*theory).inner;
    let start = std::time::Instant::now();
    match audit::run_requirements(instance, &labels, seed, samples.max(16)) {
        Ok(requirements) => {
            let mut report = ReportFile::new(&instance.name, seed);
            report.requirements = requirements;
            report.runtime_ms = start.elapsed().as_millis() as u64;
            match to_json_string(&report) {
                Ok(json) => export_string(json, out),
                Err(e) => {
                    set_error(e.to_string());
                    GptStatus::ComputeFailed
                }
            }
        }
        Err(e) => {
            set_error(e.to_string());
            GptStatus::ComputeFailed
        }
    }
}

/// Runs the theorem battery for the given orbit-rank grid (`grid` such as
/// `"3,5,7"`, NULL for the default).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gpt_theorems(
    seed: u64,
    grid: *const c_char,
    out: *mut *mut c_char,
) -> GptStatus {
    if out.is_null() {
        set_error("out must not be NULL");
        return GptStatus::InvalidArgument;
    }
    let dims: Vec<usize> = if grid.is_null() {
        vec![3, 5, 7]
    } else {
        let text = match read_utf8(grid, "grid") {
            Ok(t) => t,
            Err(code) => return code,
        };
        let parsed: Result<Vec<usize>, _> = text
            .split(',')
            .map(|tok| tok.trim().parse::<usize>())
            .collect();
        match parsed {
            Ok(v) if !v.is_empty() => v,
            _ => {
                set_error(format!("grid must be comma-separated dimensions, got '{text}'"));
                return GptStatus::InvalidArgument;
            }
        }
    };
    let start = std::time::Instant::now();
    match audit::run_theorem_suite_with_grid(seed, &dims) {
        Ok(checks) => {
            let mut report = ReportFile::new("theorem-suite", seed);
            report.theorems = checks;
            report.runtime_ms = start.elapsed().as_millis() as u64;
            match to_json_string(&report) {
                Ok(json) => export_string(json, out),
                Err(e) => {
                    set_error(e.to_string());
                    GptStatus::ComputeFailed
                }
            }
        }
        Err(e) => {
            set_error(e.to_string());
            GptStatus::ComputeFailed
        }
    }
}

/// Capacity certificate of the theory: the certified value and the
/// delta-condition residual of the returned measurement.
///
/// # Safety
/// `theory` must be a live handle; `value` and `residual` must be valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn gpt_capacity(
    theory: *const GptTheory,
    seed: u64,
    value: *mut usize,
    residual: *mut f64,
) -> GptStatus {
    if theory.is_null() || value.is_null() || residual.is_null() {
        set_error("theory, value and residual must not be NULL");
        return GptStatus::InvalidArgument;
    }
    let instance = &(*theory).inner;
    let mut rng = gptkit::groups::seeded_rng(seed, 0xCA);
    let mut pool = Vec::new();
    if let gptkit::SpaceRep::Ball = instance.space.rep() {
        let d = instance.space.dim();
        let mut plus = vec![0.5; d];
        let mut minus = vec![0.5; d];
        plus[0] = 1.0;
        minus[0] = 0.0;
        pool.push(gptkit::StateVector::from_probabilities(&plus));
        pool.push(gptkit::StateVector::from_probabilities(&minus));
    }
    if let gptkit::SpaceRep::PsdConeSlice { capacity } = instance.space.rep() {
        for v in instances::classical_vertices(*capacity) {
            match instances::embed_classical_in_quantum(&v, *capacity) {
                Ok(s) => pool.push(s),
                Err(e) => {
                    set_error(e.to_string());
                    return GptStatus::ComputeFailed;
                }
            }
        }
    }
    pool.extend(instance.space.pure_candidates(48, &mut rng));
    match gptkit::lp::capacity(&instance.space, 8.min(instance.space.dim() + 2), &pool) {
        Ok(cert) => {
            *value = cert.value;
            *residual = cert.delta_residual();
            clear_error();
            GptStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            GptStatus::ComputeFailed
        }
    }
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from a gptkit-capi function and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gpt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
