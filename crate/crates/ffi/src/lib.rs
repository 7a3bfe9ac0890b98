//! C ABI for flrank.
//!
//! Objects cross the boundary as opaque handles that the caller frees with the
//! matching `*_free` function. Every fallible call returns an [`FlStatus`];
//! on failure, [`fl_last_error_message`] describes the most recent error on
//! the calling thread. Panics never unwind into C: they become
//! [`FlStatus::Panic`].

use flrank::corpus::{load_defect_bundle, DefectBundle};
use flrank::rafl::{ce_aggregate, sbir_localize_with, AggregationConfig, Distance, RaflError, SbirOptions};
use flrank::{blues, sbfl, RankedList};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An argument was out of range or inconsistent.
    InvalidArgument = 3,
    /// Input data could not be read or is malformed.
    Data = 4,
    /// The bundle lacks what the technique needs.
    NotRunnable = 5,
    /// An internal panic was caught.
    Panic = 6,
}

/// Loaded defect bundle.
pub struct FlBundle {
    inner: DefectBundle,
}

/// Ranked list of statement ids. Item strings live as long as the list.
pub struct FlRankedList {
    inner: RankedList,
    ids: Vec<CString>,
}

impl FlRankedList {
    fn new(inner: RankedList) -> Self {
        // Ids come from Rust strings; interior NULs cannot be passed to C, so
        // they are replaced rather than rejected.
        let ids = inner
            .items()
            .map(|s| CString::new(s.replace('\0', "\u{FFFD}")).expect("no interior NUL"))
            .collect();
        Self { inner, ids }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("NULs stripped"));
}

struct Failure(FlStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn fail<T>(status: FlStatus, msg: impl Into<String>) -> FfiResult<T> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> FlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            FlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(FlStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(FlStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .map_or_else(|| fail(FlStatus::NullPointer, format!("{what} is null")), Ok)
}

fn out_arg<T>(p: *mut *mut T) -> FfiResult<()> {
    if p.is_null() {
        fail(FlStatus::NullPointer, "output pointer is null")
    } else {
        Ok(())
    }
}

fn rafl_failure(e: RaflError) -> Failure {
    let status = match &e {
        RaflError::NotRunnable(_) | RaflError::Sbfl(_) | RaflError::Blues(_) => FlStatus::NotRunnable,
        _ => FlStatus::InvalidArgument,
    };
    Failure(status, e.to_string())
}

fn emit_list(list: RankedList, out: *mut *mut FlRankedList) {
    // SAFETY: callers checked `out` with `out_arg`.
    unsafe { *out = Box::into_raw(Box::new(FlRankedList::new(list))) };
}

/// Library version, e.g. `0.1.0 (format 1)`. The string is static.
#[no_mangle]
pub extern "C" fn fl_version() -> *const c_char {
    static VERSION: &CStr = c"0.1.0 (format 1)";
    VERSION.as_ptr()
}

/// Message for the last failed call on this thread, or an empty string.
/// Valid until the next flrank call on the same thread.
#[no_mangle]
pub extern "C" fn fl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads the bundle in directory `path` into `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_bundle_load(path: *const c_char, out: *mut *mut FlBundle) -> FlStatus {
    guard(|| {
        out_arg(out)?;
        let path = str_arg(path, "path")?;
        let inner = load_defect_bundle(Path::new(path)).map_err(|e| Failure(FlStatus::Data, e.to_string()))?;
        *out = Box::into_raw(Box::new(FlBundle { inner }));
        Ok(())
    })
}

/// Frees a bundle. Null is ignored.
///
/// # Safety
/// `bundle` must come from [`fl_bundle_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fl_bundle_free(bundle: *mut FlBundle) {
    if !bundle.is_null() {
        drop(Box::from_raw(bundle));
    }
}

/// Number of statements in the bundle, or 0 for null.
///
/// # Safety
/// `bundle` must be null or a live bundle handle.
#[no_mangle]
pub unsafe extern "C" fn fl_bundle_statement_count(bundle: *const FlBundle) -> usize {
    bundle.as_ref().map_or(0, |b| b.inner.statements.len())
}

/// Ranks statements by Ochiai suspiciousness.
///
/// # Safety
/// `bundle` must be a live bundle handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_rank_sbfl(bundle: *const FlBundle, out: *mut *mut FlRankedList) -> FlStatus {
    guard(|| {
        out_arg(out)?;
        let b = ref_arg(bundle, "bundle")?;
        let list = sbfl::rank_sbfl(&b.inner).map_err(|e| Failure(FlStatus::NotRunnable, e.to_string()))?;
        emit_list(list, out);
        Ok(())
    })
}

/// Ranks statements by bug-report similarity (the six-configuration ensemble).
///
/// # Safety
/// `bundle` must be a live bundle handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_rank_blues(bundle: *const FlBundle, out: *mut *mut FlRankedList) -> FlStatus {
    guard(|| {
        out_arg(out)?;
        let b = ref_arg(bundle, "bundle")?;
        let list = blues::blues_ensemble(&b.inner).map_err(|e| Failure(FlStatus::NotRunnable, e.to_string()))?;
        emit_list(list, out);
        Ok(())
    })
}

/// Fuses the spectrum and bug-report rankings with the given seed.
///
/// # Safety
/// `bundle` must be a live bundle handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_rank_sbir(bundle: *const FlBundle, seed: u64, out: *mut *mut FlRankedList) -> FlStatus {
    guard(|| {
        out_arg(out)?;
        let b = ref_arg(bundle, "bundle")?;
        let mut opts = SbirOptions::default();
        opts.aggregation.seed = seed;
        let run = sbir_localize_with(&b.inner, &opts).map_err(rafl_failure)?;
        emit_list(run.ranked, out);
        Ok(())
    })
}

/// Aggregates `count` lists into one top-`k` list.
///
/// `distance` is 0 for Spearman footrule, 1 for Kendall tau. `weights` may be
/// null for equal weights.
///
/// # Safety
/// `lists` must point to `count` live list handles, `weights` (if non-null) to
/// `count` doubles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fl_rank_aggregate(
    lists: *const *const FlRankedList,
    weights: *const f64,
    count: usize,
    k: usize,
    distance: u32,
    seed: u64,
    out: *mut *mut FlRankedList,
) -> FlStatus {
    guard(|| {
        out_arg(out)?;
        if lists.is_null() && count > 0 {
            return fail(FlStatus::NullPointer, "lists is null");
        }
        let handles: &[*const FlRankedList] = if count == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(lists, count)
        };
        let inputs = handles
            .iter()
            .map(|&h| ref_arg(h, "list").map(|l| l.inner.items().map(str::to_string).collect::<Vec<_>>()))
            .collect::<FfiResult<Vec<_>>>()?;
        let weights = if weights.is_null() {
            vec![1.0; count]
        } else {
            std::slice::from_raw_parts(weights, count).to_vec()
        };
        let distance = match distance {
            0 => Distance::Spearman,
            1 => Distance::Kendall,
            d => return fail(FlStatus::InvalidArgument, format!("unknown distance code {d}")),
        };
        let cfg = AggregationConfig {
            k,
            seed,
            distance,
            ..AggregationConfig::default()
        };
        let outcome = ce_aggregate(&inputs, &weights, &cfg).map_err(rafl_failure)?;
        emit_list(
            RankedList::from_order(outcome.items).expect("aggregate items are distinct"),
            out,
        );
        Ok(())
    })
}

/// Number of entries, or 0 for null.
///
/// # Safety
/// `list` must be null or a live list handle.
#[no_mangle]
pub unsafe extern "C" fn fl_ranked_list_len(list: *const FlRankedList) -> usize {
    list.as_ref().map_or(0, |l| l.ids.len())
}

/// Item id at 0-based `index`, or null when out of range. The string is
/// owned by the list.
///
/// # Safety
/// `list` must be null or a live list handle.
#[no_mangle]
pub unsafe extern "C" fn fl_ranked_list_item(list: *const FlRankedList, index: usize) -> *const c_char {
    list.as_ref()
        .and_then(|l| l.ids.get(index))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Score at 0-based `index`, or NaN when out of range.
///
/// # Safety
/// `list` must be null or a live list handle.
#[no_mangle]
pub unsafe extern "C" fn fl_ranked_list_score(list: *const FlRankedList, index: usize) -> f64 {
    list.as_ref()
        .and_then(|l| l.inner.get(index))
        .map_or(f64::NAN, |e| e.score)
}

/// 1-based rank of `item`, or 0 when absent.
///
/// # Safety
/// `list` must be null or a live list handle; `item` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fl_ranked_list_rank_of(list: *const FlRankedList, item: *const c_char) -> usize {
    let (Some(l), Ok(item)) = (list.as_ref(), str_arg(item, "item")) else {
        return 0;
    };
    l.inner.rank_of(item).unwrap_or(0)
}

/// Serializes the list as JSON into `*out`; free it with [`fl_string_free`].
///
/// # Safety
/// `list` must be a live list handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_ranked_list_to_json(list: *const FlRankedList, out: *mut *mut c_char) -> FlStatus {
    guard(|| {
        out_arg(out)?;
        let l = ref_arg(list, "list")?;
        let json = CString::new(l.inner.to_json()).map_err(|e| Failure(FlStatus::Data, e.to_string()))?;
        *out = json.into_raw();
        Ok(())
    })
}

/// Frees a list. Null is ignored.
///
/// # Safety
/// `list` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fl_ranked_list_free(list: *mut FlRankedList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(fl_last_error_message()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn panics_become_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, FlStatus::Panic);
        assert!(last_error().contains("boom"));
        assert_eq!(guard(|| Ok(())), FlStatus::Ok);
        assert_eq!(last_error(), "");
    }

    #[test]
    fn null_arguments() {
        let mut b = ptr::null_mut();
        assert_eq!(unsafe { fl_bundle_load(ptr::null(), &mut b) }, FlStatus::NullPointer);
        assert!(b.is_null());
        assert_eq!(
            unsafe { fl_bundle_load(c"x".as_ptr(), ptr::null_mut()) },
            FlStatus::NullPointer
        );
        let mut l = ptr::null_mut();
        assert_eq!(unsafe { fl_rank_sbfl(ptr::null(), &mut l) }, FlStatus::NullPointer);
        assert_eq!(unsafe { fl_ranked_list_len(ptr::null()) }, 0);
        assert!(unsafe { fl_ranked_list_item(ptr::null(), 0) }.is_null());
    }

    #[test]
    fn version_matches_core() {
        let v = unsafe { CStr::from_ptr(fl_version()) }.to_str().unwrap();
        assert_eq!(v, flrank::cli::VERSION);
    }
}
