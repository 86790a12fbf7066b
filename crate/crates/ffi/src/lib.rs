//! C ABI over the `invgc` crate.
//!
//! Embedding sets and relevance maps cross the boundary as opaque handles
//! that the caller frees. Every fallible call returns an [`InvgcStatus`];
//! on failure a description is available from [`invgc_last_error`] on the
//! same thread. Panics are caught at the boundary and reported as
//! `INVGC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use invgc::{
    cap_fraction_exact, cap_fraction_mc, degeneration_score, evaluate, inverse_convolve_dual, load_embeddings,
    load_relevance, save_embeddings, EmbeddingFormat, EmbeddingSet, Error, InvGcConfig, RelevanceMap, Variant,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvgcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    /// Malformed file contents, duplicate ids or non-finite values.
    Format = 4,
    DimensionMismatch = 5,
    /// Too few points, or queries without a resolvable relevant item.
    InsufficientData = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvgcVariant {
    Full = 0,
    /// Top-k% neighbourhood with raw weights; `param` is k.
    Local = 1,
    /// Top-p% neighbourhood with unit weights; `param` is p.
    Avgpool = 2,
}

/// Retrieval metrics; recalls are percentages.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InvgcMetrics {
    pub recall_at_1: f64,
    pub recall_at_5: f64,
    pub recall_at_10: f64,
    pub median_rank: f64,
    pub mean_rank: f64,
}

/// Opaque embedding set.
pub struct InvgcEmbeddings(EmbeddingSet);

/// Opaque query-to-gallery relevance map.
pub struct InvgcRelevance(RelevanceMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(InvgcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => InvgcStatus::Io,
            Error::Format { .. } | Error::DuplicateId { .. } | Error::NonFinite { .. } => InvgcStatus::Format,
            Error::DimensionMismatch { .. } => InvgcStatus::DimensionMismatch,
            Error::ZeroNorm { .. } | Error::InvalidParameter(_) => InvgcStatus::InvalidArgument,
            Error::InsufficientData(_) | Error::MissingRelevance(_) => InvgcStatus::InsufficientData,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(InvgcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> InvgcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InvgcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            InvgcStatus::Panic
        }
    }
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a str, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Failure(InvgcStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Failure> {
    h.as_ref().ok_or_else(|| null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn invgc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failed call on this thread, or NULL. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn invgc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a set from `rows * dim` row-major values, with ids "0".."rows-1".
///
/// # Safety
/// `data` must point to `rows * dim` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invgc_embeddings_new(
    data: *const f64,
    rows: usize,
    dim: usize,
    out: *mut *mut InvgcEmbeddings,
) -> InvgcStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let len = rows
            .checked_mul(dim)
            .ok_or_else(|| Failure(InvgcStatus::InvalidArgument, "rows * dim overflows".into()))?;
        let values = std::slice::from_raw_parts(data, len).to_vec();
        let ids = (0..rows).map(|i| i.to_string()).collect();
        store(out, InvgcEmbeddings(EmbeddingSet::new(ids, values, dim)?))
    })
}

/// Loads a binary (`IGCE`) or, for `.tsv`/`.txt` paths, TSV embedding file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invgc_embeddings_load(path: *const c_char, out: *mut *mut InvgcEmbeddings) -> InvgcStatus {
    guard(|| {
        let path = path_arg(path)?;
        let set = load_embeddings(path, EmbeddingFormat::from_path(path.as_ref()))?;
        store(out, InvgcEmbeddings(set))
    })
}

/// Saves in the format implied by the path, as [`invgc_embeddings_load`].
///
/// # Safety
/// `set` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn invgc_embeddings_save(set: *const InvgcEmbeddings, path: *const c_char) -> InvgcStatus {
    guard(|| {
        let set = handle(set, "set")?;
        let path = path_arg(path)?;
        Ok(save_embeddings(
            &set.0,
            path,
            EmbeddingFormat::from_path(path.as_ref()),
        )?)
    })
}

/// # Safety
/// `set` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn invgc_embeddings_free(set: *mut InvgcEmbeddings) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Row count, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn invgc_embeddings_rows(set: *const InvgcEmbeddings) -> usize {
    set.as_ref().map_or(0, |s| s.0.n())
}

/// Dimension, or 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn invgc_embeddings_dim(set: *const InvgcEmbeddings) -> usize {
    set.as_ref().map_or(0, |s| s.0.dim())
}

/// Copies the row-major values into `buf`, which holds `len` doubles and
/// must fit `rows * dim` of them.
///
/// # Safety
/// `set` must be a live handle; `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn invgc_embeddings_copy_data(
    set: *const InvgcEmbeddings,
    buf: *mut f64,
    len: usize,
) -> InvgcStatus {
    guard(|| {
        let set = handle(set, "set")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let data = set.0.data();
        if len < data.len() {
            return Err(Failure(
                InvgcStatus::InvalidArgument,
                format!("buffer holds {len} values, need {}", data.len()),
            ));
        }
        ptr::copy_nonoverlapping(data.as_ptr(), buf, data.len());
        Ok(())
    })
}

/// Applies inverse graph convolution to `gallery` and returns a new set.
/// `param` is the neighbourhood percentage for `LOCAL` and `AVGPOOL` and is
/// ignored for `FULL`.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invgc_apply(
    gallery: *const InvgcEmbeddings,
    ref_gallery: *const InvgcEmbeddings,
    ref_query: *const InvgcEmbeddings,
    variant: InvgcVariant,
    param: f64,
    r_g: f64,
    r_q: f64,
    out: *mut *mut InvgcEmbeddings,
) -> InvgcStatus {
    guard(|| {
        let g = handle(gallery, "gallery")?;
        let rg = handle(ref_gallery, "ref_gallery")?;
        let rq = handle(ref_query, "ref_query")?;
        let variant = match variant {
            InvgcVariant::Full => Variant::Full,
            InvgcVariant::Local => Variant::Local { k_percent: param },
            InvgcVariant::Avgpool => Variant::Binary { p_percent: param },
        };
        let cfg = InvGcConfig::new(variant, r_g, r_q)?;
        store(out, InvgcEmbeddings(inverse_convolve_dual(&g.0, &rg.0, &rq.0, &cfg)?))
    })
}

/// Mean similarity of every point to its nearest neighbour in the set.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invgc_degeneration_score(set: *const InvgcEmbeddings, out: *mut f64) -> InvgcStatus {
    guard(|| {
        let set = handle(set, "set")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = degeneration_score(&set.0)?;
        Ok(())
    })
}

/// Loads `query_id<TAB>gallery_id` lines.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invgc_relevance_load(path: *const c_char, out: *mut *mut InvgcRelevance) -> InvgcStatus {
    guard(|| {
        let path = path_arg(path)?;
        store(out, InvgcRelevance(load_relevance(path)?))
    })
}

/// # Safety
/// `rel` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn invgc_relevance_free(rel: *mut InvgcRelevance) {
    if !rel.is_null() {
        drop(Box::from_raw(rel));
    }
}

/// R@1/5/10, median and mean rank of `queries` against `gallery`.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invgc_evaluate(
    queries: *const InvgcEmbeddings,
    gallery: *const InvgcEmbeddings,
    rel: *const InvgcRelevance,
    out: *mut InvgcMetrics,
) -> InvgcStatus {
    guard(|| {
        let q = handle(queries, "queries")?;
        let g = handle(gallery, "gallery")?;
        let rel = handle(rel, "rel")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = evaluate(&q.0, &g.0, &rel.0, &[1, 5, 10])?;
        *out = InvgcMetrics {
            recall_at_1: r.recall_at[&1],
            recall_at_5: r.recall_at[&5],
            recall_at_10: r.recall_at[&10],
            median_rank: r.median_rank,
            mean_rank: r.mean_rank,
        };
        Ok(())
    })
}

/// Exact fraction of the unit `n`-ball cut off by a cap of radius `b`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invgc_cap_fraction_exact(n: usize, b: f64, out: *mut f64) -> InvgcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = cap_fraction_exact(n, b)?;
        Ok(())
    })
}

/// Monte Carlo estimate of [`invgc_cap_fraction_exact`] and its standard
/// error. Deterministic for a given seed.
///
/// # Safety
/// `estimate` and `stderr_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invgc_cap_fraction_mc(
    n: usize,
    b: f64,
    samples: u64,
    seed: u64,
    estimate: *mut f64,
    stderr_out: *mut f64,
) -> InvgcStatus {
    guard(|| {
        if estimate.is_null() || stderr_out.is_null() {
            return Err(null("output pointer"));
        }
        let m = cap_fraction_mc(n, b, samples, seed)?;
        *estimate = m.estimate;
        *stderr_out = m.stderr;
        Ok(())
    })
}
