//! C ABI over `trajql`.
//!
//! Objects cross the boundary as opaque heap handles created by `*_new`,
//! `*_load` or `*_parse` and released by the matching `*_free`. Every
//! fallible call returns a [`TrajqlStatus`]; on failure the message is
//! available from [`trajql_last_error`] on the same thread. Strings passed
//! in must be NUL-terminated UTF-8.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use trajql::eval::{select_st, EvalEnv, StrategyRegistry, Strictness};
use trajql::geometry::{Interval, Region};
use trajql::io::{ingest_csv, Dataset};
use trajql::predicate::{format_predicate, parse_predicate, Predicate};
use trajql::relations::{classify_allen, classify_de9im, AllenLabel, De9imLabel};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajqlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Dataset = 3,
    Syntax = 4,
    Validation = 5,
    Geometry = 6,
    Strictness = 7,
    OutOfRange = 8,
    Degenerate = 9,
    Panic = 10,
}

/// A loaded dataset.
pub struct TrajqlDataset {
    inner: Dataset,
    tids: Vec<CString>,
}

/// A parsed predicate.
pub struct TrajqlPredicate {
    inner: Predicate,
}

/// Named regions and intervals.
pub struct TrajqlEnv {
    inner: EvalEnv,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

type Outcome<T> = Result<T, (TrajqlStatus, String)>;

fn guard(body: impl FnOnce() -> Outcome<()>) -> TrajqlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            TrajqlStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TrajqlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err((TrajqlStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        (
            TrajqlStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref()
        .ok_or_else(|| (TrajqlStatus::NullArgument, format!("{what} is null")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Outcome<&'a mut T> {
    p.as_mut()
        .ok_or_else(|| (TrajqlStatus::NullArgument, format!("{what} is null")))
}

fn strictness(text: &str) -> Outcome<Strictness> {
    StrategyRegistry::new()
        .parse_strictness(text)
        .map_err(|e| (TrajqlStatus::Strictness, e.to_string()))
}

fn trajectory(ds: &TrajqlDataset, index: usize) -> Outcome<&trajql::model::Trajectory> {
    ds.inner
        .trajectories
        .rows()
        .get(index)
        .map(|(_, t)| t)
        .ok_or_else(|| {
            (
                TrajqlStatus::OutOfRange,
                format!("no trajectory at index {index}"),
            )
        })
}

/// Message describing the last failure on this thread, or an empty string.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn trajql_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn trajql_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads `path` (plus sibling property files) into `*out`.
#[no_mangle]
pub unsafe extern "C" fn trajql_dataset_load(
    path: *const c_char,
    out: *mut *mut TrajqlDataset,
) -> TrajqlStatus {
    guard(|| {
        let path = text(path, "path")?;
        let out = deref_mut(out, "out")?;
        let inner = ingest_csv(path).map_err(|e| (TrajqlStatus::Dataset, e.to_string()))?;
        let tids = inner
            .trajectories
            .tids()
            .map(|t| CString::new(t.replace('\0', " ")).unwrap_or_default())
            .collect();
        *out = Box::into_raw(Box::new(TrajqlDataset { inner, tids }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn trajql_dataset_free(ds: *mut TrajqlDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of trajectories; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn trajql_dataset_len(ds: *const TrajqlDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.tids.len())
}

/// Identifier of the trajectory at `index`, owned by the dataset; null when
/// out of range.
#[no_mangle]
pub unsafe extern "C" fn trajql_dataset_tid(
    ds: *const TrajqlDataset,
    index: usize,
) -> *const c_char {
    ds.as_ref()
        .and_then(|d| d.tids.get(index))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Parses predicate text into `*out`.
#[no_mangle]
pub unsafe extern "C" fn trajql_predicate_parse(
    src: *const c_char,
    out: *mut *mut TrajqlPredicate,
) -> TrajqlStatus {
    guard(|| {
        let src = text(src, "predicate text")?;
        let out = deref_mut(out, "out")?;
        let inner = parse_predicate(src).map_err(|e| (TrajqlStatus::Syntax, e.to_string()))?;
        *out = Box::into_raw(Box::new(TrajqlPredicate { inner }));
        Ok(())
    })
}

/// Canonical text of a predicate; release with [`trajql_string_free`].
#[no_mangle]
pub unsafe extern "C" fn trajql_predicate_format(p: *const TrajqlPredicate) -> *mut c_char {
    match p.as_ref() {
        Some(p) => {
            CString::new(format_predicate(&p.inner)).map_or(ptr::null_mut(), CString::into_raw)
        }
        None => ptr::null_mut(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn trajql_predicate_free(p: *mut TrajqlPredicate) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

#[no_mangle]
pub extern "C" fn trajql_env_new() -> *mut TrajqlEnv {
    Box::into_raw(Box::new(TrajqlEnv {
        inner: EvalEnv::new(),
    }))
}

#[no_mangle]
pub unsafe extern "C" fn trajql_env_free(env: *mut TrajqlEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

#[no_mangle]
pub unsafe extern "C" fn trajql_env_add_region(
    env: *mut TrajqlEnv,
    name: *const c_char,
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
) -> TrajqlStatus {
    guard(|| {
        let env = deref_mut(env, "env")?;
        let name = text(name, "name")?;
        let r = Region::new(x_min, y_min, x_max, y_max)
            .map_err(|e| (TrajqlStatus::Geometry, e.to_string()))?;
        env.inner
            .add_region(name, r)
            .map_err(|e| (TrajqlStatus::Validation, e.to_string()))
    })
}

#[no_mangle]
pub unsafe extern "C" fn trajql_env_add_interval(
    env: *mut TrajqlEnv,
    name: *const c_char,
    start: f64,
    end: f64,
) -> TrajqlStatus {
    guard(|| {
        let env = deref_mut(env, "env")?;
        let name = text(name, "name")?;
        let i = Interval::new(start, end).map_err(|e| (TrajqlStatus::Geometry, e.to_string()))?;
        env.inner
            .add_interval(name, i)
            .map_err(|e| (TrajqlStatus::Validation, e.to_string()))
    })
}

/// Evaluates `p` on every trajectory of `ds`. Writes 1 (selected) or 0 into
/// `mask[i]` for trajectory `i`; `mask_len` must equal the dataset length.
/// `strictness` is `strict`, `relaxed` or `approx:<name>[:k]`.
#[no_mangle]
pub unsafe extern "C" fn trajql_select(
    ds: *const TrajqlDataset,
    p: *const TrajqlPredicate,
    env: *const TrajqlEnv,
    strictness_text: *const c_char,
    mask: *mut u8,
    mask_len: usize,
) -> TrajqlStatus {
    guard(|| {
        let ds = deref(ds, "dataset")?;
        let p = deref(p, "predicate")?;
        let env = deref(env, "env")?;
        let s = strictness(text(strictness_text, "strictness")?)?;
        if mask.is_null() {
            return Err((TrajqlStatus::NullArgument, "mask is null".into()));
        }
        let rows = ds.inner.trajectories.rows();
        if mask_len != rows.len() {
            return Err((
                TrajqlStatus::OutOfRange,
                format!("mask has {mask_len} slots for {} trajectories", rows.len()),
            ));
        }
        let selected = select_st(&ds.inner.trajectories, &p.inner, &env.inner, &s)
            .map_err(|e| (TrajqlStatus::Validation, e.to_string()))?;
        let out = std::slice::from_raw_parts_mut(mask, mask_len);
        for ((tid, _), slot) in rows.iter().zip(out.iter_mut()) {
            *slot = u8::from(selected.get(tid).is_some());
        }
        Ok(())
    })
}

/// Interval relation of trajectory `index` against `(start, end)`, as a
/// position in the list returned by [`trajql_allen_label_name`].
#[no_mangle]
pub unsafe extern "C" fn trajql_classify_allen(
    ds: *const TrajqlDataset,
    index: usize,
    start: f64,
    end: f64,
    out_label: *mut u32,
) -> TrajqlStatus {
    guard(|| {
        let t = trajectory(deref(ds, "dataset")?, index)?;
        let out = deref_mut(out_label, "out_label")?;
        let i = Interval::new(start, end).map_err(|e| (TrajqlStatus::Geometry, e.to_string()))?;
        let label = classify_allen(t, &i).map_err(|e| (TrajqlStatus::Degenerate, e.to_string()))?;
        *out = AllenLabel::ALL
            .iter()
            .position(|&l| l == label)
            .expect("label is listed") as u32;
        Ok(())
    })
}

/// Topological relations of trajectory `index` against the rectangle, as a
/// bit mask: bit `k` set means label `k` of [`trajql_de9im_label_name`] holds.
#[no_mangle]
pub unsafe extern "C" fn trajql_classify_de9im(
    ds: *const TrajqlDataset,
    index: usize,
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
    strictness_text: *const c_char,
    normalize_orientation: bool,
    out_mask: *mut u32,
) -> TrajqlStatus {
    guard(|| {
        let t = trajectory(deref(ds, "dataset")?, index)?;
        let out = deref_mut(out_mask, "out_mask")?;
        let s = strictness(text(strictness_text, "strictness")?)?;
        let r = Region::new(x_min, y_min, x_max, y_max)
            .map_err(|e| (TrajqlStatus::Geometry, e.to_string()))?;
        let labels = classify_de9im(t, &r, &s, normalize_orientation)
            .map_err(|e| (TrajqlStatus::Validation, e.to_string()))?;
        *out = De9imLabel::ALL
            .iter()
            .enumerate()
            .filter(|(_, l)| labels.contains(l))
            .fold(0u32, |acc, (k, _)| acc | (1 << k));
        Ok(())
    })
}

fn names(
    cache: &'static OnceLock<Vec<CString>>,
    all: impl Fn() -> Vec<&'static str>,
) -> &'static [CString] {
    cache.get_or_init(|| {
        all()
            .into_iter()
            .map(|n| CString::new(n).expect("label names have no NUL"))
            .collect()
    })
}

/// Name of topological label `k` (0..19), or null.
#[no_mangle]
pub extern "C" fn trajql_de9im_label_name(k: u32) -> *const c_char {
    static CACHE: OnceLock<Vec<CString>> = OnceLock::new();
    names(&CACHE, || {
        De9imLabel::ALL.iter().map(|l| l.name()).collect()
    })
    .get(k as usize)
    .map_or(ptr::null(), |s| s.as_ptr())
}

/// Name of interval label `k` (0..13), or null.
#[no_mangle]
pub extern "C" fn trajql_allen_label_name(k: u32) -> *const c_char {
    static CACHE: OnceLock<Vec<CString>> = OnceLock::new();
    names(&CACHE, || {
        AllenLabel::ALL.iter().map(|l| l.name()).collect()
    })
    .get(k as usize)
    .map_or(ptr::null(), |s| s.as_ptr())
}
