//! C ABI for the tiled-QR elimination-scheme toolkit: opaque list handles,
//! integer status codes, and plain-C entry points for generating, parsing,
//! validating, rewriting and simulating elimination lists, plus the
//! performance-prediction formula. The header is generated by cbindgen into
//! `include/tiledqr.h`.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use tiledqr::dynamic::generate_dynamic;
use tiledqr::grid::{GridShape, KernelFamily};
use tiledqr::list::{total_weight, EliminationList};
use tiledqr::perf::{predict, PerfModelInput, Regime};
use tiledqr::schemes::{generate_list, SchemeSpec};
use tiledqr::sim::{critical_path, simulate, streaming_makespan};
use tiledqr::QrError;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TqrStatus {
    TqrOk = 0,
    /// A pointer argument was null or an argument value was out of range.
    TqrInvalidArgument = 1,
    /// The grid shape is not a valid p x q tiling.
    TqrInvalidShape = 2,
    /// The elimination list violates an ordering or pivot rule.
    TqrInvalidList = 3,
    /// Text input could not be parsed.
    TqrParseError = 4,
    /// The scheme name is unknown or not applicable to the operation.
    TqrUnknownScheme = 5,
}

fn status_of(e: &QrError) -> TqrStatus {
    match e {
        QrError::InvalidShape { .. } => TqrStatus::TqrInvalidShape,
        QrError::InvalidElimination { .. } | QrError::InvalidList(_) => TqrStatus::TqrInvalidList,
        QrError::Parse(_) => TqrStatus::TqrParseError,
        QrError::SchemeNotApplicable(_) => TqrStatus::TqrUnknownScheme,
        _ => TqrStatus::TqrInvalidArgument,
    }
}

/// Opaque handle to an elimination list (an ordered sequence of row
/// eliminations on a p x q tile grid).
pub struct TqrList {
    inner: EliminationList,
}

fn parse_scheme(name: &str, param: usize) -> Result<SchemeSpec, TqrStatus> {
    match name {
        "flattree" => Ok(SchemeSpec::FlatTree),
        "fibonacci" => Ok(SchemeSpec::Fibonacci),
        "greedy" => Ok(SchemeSpec::Greedy),
        "binarytree" => Ok(SchemeSpec::BinaryTree),
        "plasmatree" => Ok(SchemeSpec::PlasmaTree { bs: param }),
        "asap" => Ok(SchemeSpec::Asap),
        "grasap" => Ok(SchemeSpec::Grasap { kswitch: param }),
        _ => Err(TqrStatus::TqrUnknownScheme),
    }
}

unsafe fn cstr<'a>(s: *const c_char) -> Result<&'a str, TqrStatus> {
    if s.is_null() {
        return Err(TqrStatus::TqrInvalidArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| TqrStatus::TqrParseError)
}

fn family_of(name: &str) -> Result<KernelFamily, TqrStatus> {
    name.parse().map_err(|_| TqrStatus::TqrInvalidArgument)
}

fn hand_out(list: EliminationList, out: *mut *mut TqrList) -> TqrStatus {
    let boxed = Box::new(TqrList { inner: list });
    unsafe { *out = Box::into_raw(boxed) };
    TqrStatus::TqrOk
}

/// Generate the elimination list of a named scheme on a p x q grid and store
/// a new handle in `out`.
///
/// `scheme` is one of "flattree", "fibonacci", "greedy", "binarytree",
/// "plasmatree", "asap", "grasap". `param` is the domain size for
/// "plasmatree" and the column switch point for "grasap"; it is ignored for
/// the other schemes. `family` ("tt" or "ts") only affects the decisions of
/// the dynamic schemes ("asap", "grasap").
///
/// # Safety
/// `scheme` and `family` must be valid NUL-terminated strings and `out` a
/// valid pointer; on `TqrOk` the caller owns the handle and must release it
/// with [`tqr_list_free`].
#[no_mangle]
pub unsafe extern "C" fn tqr_list_generate(
    scheme: *const c_char,
    p: usize,
    q: usize,
    param: usize,
    family: *const c_char,
    out: *mut *mut TqrList,
) -> TqrStatus {
    if out.is_null() {
        return TqrStatus::TqrInvalidArgument;
    }
    let (name, fam) = match (cstr(scheme), cstr(family)) {
        (Ok(n), Ok(f)) => (n, f),
        (Err(e), _) | (_, Err(e)) => return e,
    };
    let spec = match parse_scheme(name, param) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let fam = match family_of(fam) {
        Ok(f) => f,
        Err(e) => return e,
    };
    let shape = match GridShape::new(p, q) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    let list = if spec.is_dynamic() {
        generate_dynamic(&spec, shape, fam).map(|r| r.list)
    } else {
        generate_list(&spec, shape)
    };
    match list {
        Ok(l) => hand_out(l, out),
        Err(e) => status_of(&e),
    }
}

/// Parse an elimination list from its text form (header "p q", then one
/// "k i piv" triple per line) and store a new handle in `out`. The parsed
/// list is also validated.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer;
/// on `TqrOk` the caller owns the handle and must release it with
/// [`tqr_list_free`].
#[no_mangle]
pub unsafe extern "C" fn tqr_list_parse(text: *const c_char, out: *mut *mut TqrList) -> TqrStatus {
    if out.is_null() {
        return TqrStatus::TqrInvalidArgument;
    }
    let text = match cstr(text) {
        Ok(t) => t,
        Err(e) => return e,
    };
    match EliminationList::from_text(text) {
        Ok(list) => {
            if !list.validate().is_ok() {
                return TqrStatus::TqrInvalidList;
            }
            hand_out(list, out)
        }
        Err(e) => status_of(&e),
    }
}

/// Render a list in the same text form accepted by [`tqr_list_parse`].
/// Returns a newly allocated string, or NULL if `list` is NULL; the caller
/// must release it with [`tqr_string_free`].
///
/// # Safety
/// `list` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tqr_list_to_text(list: *const TqrList) -> *mut c_char {
    let Some(list) = list.as_ref() else {
        return ptr::null_mut();
    };
    CString::new(list.inner.to_text()).map_or(ptr::null_mut(), CString::into_raw)
}

/// Check the ordering and pivot rules of a list: `TqrOk` if valid,
/// `TqrInvalidList` otherwise.
///
/// # Safety
/// `list` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tqr_list_validate(list: *const TqrList) -> TqrStatus {
    let Some(list) = list.as_ref() else {
        return TqrStatus::TqrInvalidArgument;
    };
    if list.inner.validate().is_ok() {
        TqrStatus::TqrOk
    } else {
        TqrStatus::TqrInvalidList
    }
}

/// Rewrite a list so that every elimination pivots on a higher row
/// (`row > piv`) without changing its execution time, storing a new handle
/// in `out`. The input handle is left untouched.
///
/// # Safety
/// `list` must be a live handle and `out` a valid pointer; on `TqrOk` the
/// caller owns the new handle and must release it with [`tqr_list_free`].
#[no_mangle]
pub unsafe extern "C" fn tqr_list_normalize(
    list: *const TqrList,
    out: *mut *mut TqrList,
) -> TqrStatus {
    if out.is_null() {
        return TqrStatus::TqrInvalidArgument;
    }
    let Some(list) = list.as_ref() else {
        return TqrStatus::TqrInvalidArgument;
    };
    match list.inner.normalize_no_reverse() {
        Ok(norm) => hand_out(norm, out),
        Err(e) => status_of(&e),
    }
}

/// Total kernel work of any complete factorization of the list's grid, in
/// time-units (6pq^2 - 2q^3, independent of the elimination order and kernel
/// family). Returns 0 if `list` is NULL.
///
/// # Safety
/// `list` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tqr_list_total_weight(list: *const TqrList) -> u64 {
    list.as_ref().map_or(0, |l| total_weight(l.inner.shape()))
}

/// Simulate the list's kernel task graph and store the makespan in `out`.
/// `family` is "tt" or "ts"; `processors` is the processor count, with 0
/// meaning unbounded.
///
/// # Safety
/// `list` must be a live handle, `family` a valid NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tqr_list_makespan(
    list: *const TqrList,
    family: *const c_char,
    processors: usize,
    out: *mut u64,
) -> TqrStatus {
    if out.is_null() {
        return TqrStatus::TqrInvalidArgument;
    }
    let Some(list) = list.as_ref() else {
        return TqrStatus::TqrInvalidArgument;
    };
    let fam = match cstr(family).and_then(family_of) {
        Ok(f) => f,
        Err(e) => return e,
    };
    let result = if processors == 0 {
        streaming_makespan(&list.inner, fam)
    } else {
        tiledqr::graph::expand(&list.inner, fam)
            .and_then(|g| simulate(&g, Some(processors)))
            .map(|s| s.makespan)
    };
    match result {
        Ok(m) => {
            *out = m;
            TqrStatus::TqrOk
        }
        Err(e) => status_of(&e),
    }
}

/// Critical path (unbounded-processor makespan) of a named scheme on a p x q
/// grid, stored in `out`. Arguments as in [`tqr_list_generate`].
///
/// # Safety
/// `scheme` and `family` must be valid NUL-terminated strings and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tqr_critical_path(
    scheme: *const c_char,
    p: usize,
    q: usize,
    param: usize,
    family: *const c_char,
    out: *mut u64,
) -> TqrStatus {
    if out.is_null() {
        return TqrStatus::TqrInvalidArgument;
    }
    let (name, fam) = match (cstr(scheme), cstr(family)) {
        (Ok(n), Ok(f)) => (n, f),
        (Err(e), _) | (_, Err(e)) => return e,
    };
    let spec = match parse_scheme(name, param) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let fam = match family_of(fam) {
        Ok(f) => f,
        Err(e) => return e,
    };
    let shape = match GridShape::new(p, q) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    match critical_path(&spec, shape, fam) {
        Ok(cp) => {
            *out = cp;
            TqrStatus::TqrOk
        }
        Err(e) => status_of(&e),
    }
}

/// Predicted parallel rate gamma_seq * T / max(T/P, cp) in Gflop/s for a
/// factorization with total work `total` time-units and critical path `cp`
/// on `processors` processors. Stores the rate in `out_gflops` and writes 1
/// to `out_work_bound` when the work term T/P dominates (prediction equals
/// gamma_seq * P), 0 when the critical path dominates.
///
/// # Safety
/// `out_gflops` and `out_work_bound` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tqr_predict(
    gamma_seq: f64,
    processors: usize,
    n_b: usize,
    p: usize,
    q: usize,
    cp: u64,
    total: u64,
    out_gflops: *mut f64,
    out_work_bound: *mut i32,
) -> TqrStatus {
    if out_gflops.is_null() || out_work_bound.is_null() {
        return TqrStatus::TqrInvalidArgument;
    }
    let shape = match GridShape::new(p, q) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    let input = PerfModelInput { gamma_seq, processors, n_b, shape, cp, total };
    match predict(&input) {
        Ok(pred) => {
            *out_gflops = pred.gflops;
            *out_work_bound = i32::from(pred.regime == Regime::Work);
            TqrStatus::TqrOk
        }
        Err(e) => status_of(&e),
    }
}

/// Release a list handle. NULL is a no-op.
///
/// # Safety
/// `list` must be NULL or a handle returned by this library that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn tqr_list_free(list: *mut TqrList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Release a string returned by [`tqr_list_to_text`]. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string returned by this library that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn tqr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn generate_roundtrip_and_makespan() {
        unsafe {
            let mut list: *mut TqrList = ptr::null_mut();
            let st = tqr_list_generate(
                c("greedy").as_ptr(),
                15,
                6,
                0,
                c("tt").as_ptr(),
                &mut list,
            );
            assert_eq!(st, TqrStatus::TqrOk);
            assert_eq!(tqr_list_validate(list), TqrStatus::TqrOk);
            assert_eq!(tqr_list_total_weight(list), 2808);

            let text = tqr_list_to_text(list);
            assert!(!text.is_null());
            let mut reparsed: *mut TqrList = ptr::null_mut();
            assert_eq!(tqr_list_parse(text, &mut reparsed), TqrStatus::TqrOk);

            let mut m = 0u64;
            assert_eq!(tqr_list_makespan(reparsed, c("tt").as_ptr(), 0, &mut m), TqrStatus::TqrOk);
            assert_eq!(m, 128);
            assert_eq!(tqr_list_makespan(reparsed, c("tt").as_ptr(), 1, &mut m), TqrStatus::TqrOk);
            assert_eq!(m, 2808);

            tqr_string_free(text);
            tqr_list_free(reparsed);
            tqr_list_free(list);
        }
    }

    #[test]
    fn normalize_reverse_list() {
        unsafe {
            // elim(2;3,1) is a reverse elimination; normalization flips it.
            let text = c("3 1\n1 2 3\n1 3 1\n");
            let mut list: *mut TqrList = ptr::null_mut();
            assert_eq!(tqr_list_parse(text.as_ptr(), &mut list), TqrStatus::TqrOk);
            let mut norm: *mut TqrList = ptr::null_mut();
            assert_eq!(tqr_list_normalize(list, &mut norm), TqrStatus::TqrOk);
            let out = tqr_list_to_text(norm);
            let rendered = CStr::from_ptr(out).to_str().unwrap().to_string();
            assert_eq!(rendered, "3 1\n1 3 2\n1 2 1\n");
            tqr_string_free(out);
            tqr_list_free(norm);
            tqr_list_free(list);
        }
    }

    #[test]
    fn critical_path_and_predict() {
        unsafe {
            let mut cp = 0u64;
            let st = tqr_critical_path(c("greedy").as_ptr(), 40, 40, 0, c("tt").as_ptr(), &mut cp);
            assert_eq!(st, TqrStatus::TqrOk);
            assert_eq!(cp, 826);

            let mut gflops = 0f64;
            let mut work = -1i32;
            let st = tqr_predict(3.1860, 48, 200, 40, 40, cp, 256_000, &mut gflops, &mut work);
            assert_eq!(st, TqrStatus::TqrOk);
            assert_eq!(work, 1);
            assert!((gflops - 152.928).abs() / 152.928 < 1e-9);
        }
    }

    #[test]
    fn error_paths() {
        unsafe {
            let mut list: *mut TqrList = ptr::null_mut();
            assert_eq!(
                tqr_list_generate(c("nosuch").as_ptr(), 4, 2, 0, c("tt").as_ptr(), &mut list),
                TqrStatus::TqrUnknownScheme
            );
            assert_eq!(
                tqr_list_generate(c("greedy").as_ptr(), 2, 4, 0, c("tt").as_ptr(), &mut list),
                TqrStatus::TqrInvalidShape
            );
            assert_eq!(
                tqr_list_generate(ptr::null(), 4, 2, 0, c("tt").as_ptr(), &mut list),
                TqrStatus::TqrInvalidArgument
            );
            // Out-of-order list: row 3 pivots on already-zeroed row 2.
            let bad = c("3 1\n1 2 1\n1 3 2\n");
            assert_eq!(tqr_list_parse(bad.as_ptr(), &mut list), TqrStatus::TqrInvalidList);
            let garbled = c("not a list");
            assert_eq!(tqr_list_parse(garbled.as_ptr(), &mut list), TqrStatus::TqrParseError);
            assert_eq!(tqr_list_validate(ptr::null()), TqrStatus::TqrInvalidArgument);
            assert_eq!(tqr_list_total_weight(ptr::null()), 0);
            assert!(tqr_list_to_text(ptr::null()).is_null());
            tqr_list_free(ptr::null_mut());
            tqr_string_free(ptr::null_mut());
        }
    }
}
