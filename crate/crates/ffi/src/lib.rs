//! C ABI over the flowcomm engine.
//!
//! Objects are opaque heap handles released with their `*_free` function.
//! Every fallible call returns an [`FcStatus`]; on failure the message is
//! available from [`fc_last_error`] on the same thread. Strings returned
//! through `char **` out-parameters are released with [`fc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use flowcomm::community::{detect, LouvainConfig, Partition, Variant};
use flowcomm::csng::{build_csng, Csng, CsngConfig};
use flowcomm::metrics::weighted_jaccard;
use flowcomm::neighbor::{NeighborQueryConfig, ProximityMeasure};
use flowcomm::session::{Command, Session, SessionConfig};
use flowcomm::streamline::{load_streamlines, InputFormat};
use flowcomm::synth::{bundles, BundleParams};
use flowcomm::{Error, Level, Point3, StreamlineSet};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    MalformedInput = 3,
    EmptyDataset = 4,
    LevelMismatch = 5,
    InvalidId = 6,
    Conflict = 7,
    DegenerateGraph = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcLevel {
    Segment = 0,
    SubCurve = 1,
    Streamline = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcMeasure {
    Shortest = 0,
    Longest = 1,
    Average = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcVariant {
    Segment = 0,
    SubCurve = 1,
    Streamline = 2,
}

impl From<FcLevel> for Level {
    fn from(l: FcLevel) -> Self {
        match l {
            FcLevel::Segment => Level::Segment,
            FcLevel::SubCurve => Level::SubCurve,
            FcLevel::Streamline => Level::Streamline,
        }
    }
}

impl From<FcMeasure> for ProximityMeasure {
    fn from(m: FcMeasure) -> Self {
        match m {
            FcMeasure::Shortest => ProximityMeasure::Shortest,
            FcMeasure::Longest => ProximityMeasure::Longest,
            FcMeasure::Average => ProximityMeasure::Average,
        }
    }
}

impl From<FcVariant> for Variant {
    fn from(v: FcVariant) -> Self {
        match v {
            FcVariant::Segment => Variant::Segment,
            FcVariant::SubCurve => Variant::SubCurve,
            FcVariant::Streamline => Variant::Streamline,
        }
    }
}

/// Loaded streamline dataset.
pub struct FcDataset {
    set: Arc<StreamlineSet>,
}

/// Neighborhood graph at one level.
pub struct FcCsng {
    graph: Csng,
}

/// Community assignment.
pub struct FcPartition {
    partition: Partition,
}

/// Exploration session.
pub struct FcSession {
    session: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FcStatus {
    match e {
        Error::MalformedInput(_) => FcStatus::MalformedInput,
        Error::EmptyDataset | Error::EmptySelection => FcStatus::EmptyDataset,
        Error::LevelMismatch { .. } => FcStatus::LevelMismatch,
        Error::InvalidId { .. } | Error::InvalidNode(_) => FcStatus::InvalidId,
        Error::NotALeaf(_) | Error::NotInternal(_) | Error::NotSiblings | Error::InvalidOperation(_) => {
            FcStatus::Conflict
        }
        Error::DegenerateGraph => FcStatus::DegenerateGraph,
        Error::Io(_) => FcStatus::Io,
        _ => FcStatus::InvalidArgument,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (FcStatus, String)>) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FcStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FcStatus::Panic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, (FcStatus, String)>;
}

impl<T> OrStatus<T> for flowcomm::Result<T> {
    fn or_status(self) -> Result<T, (FcStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (FcStatus, String) {
    (FcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, (FcStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (FcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (FcStatus::MalformedInput, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (FcStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), (FcStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s).expect("JSON has no nul bytes").into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a dataset from a JSON document `{"streamlines": [...], "labels": [...]}`.
///
/// # Safety
/// `json` must be a valid C string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_from_json(json: *const c_char, out: *mut *mut FcDataset) -> FcStatus {
    guard(|| {
        let text = c_str(json, "json")?;
        let (set, _) = load_streamlines(text.as_bytes(), InputFormat::Json).or_status()?;
        put(out, FcDataset { set: Arc::new(set) })
    })
}

/// Builds a dataset from packed coordinates: `xyz` holds `3 * Σ lengths`
/// doubles, streamline `i` taking the next `lengths[i]` points.
///
/// # Safety
/// `xyz` and `lengths` must point to arrays of the stated sizes.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_from_points(
    xyz: *const f64,
    lengths: *const usize,
    n_lines: usize,
    out: *mut *mut FcDataset,
) -> FcStatus {
    guard(|| {
        if n_lines > 0 && (xyz.is_null() || lengths.is_null()) {
            return Err(null("xyz or lengths"));
        }
        let lengths = if n_lines == 0 { &[][..] } else { std::slice::from_raw_parts(lengths, n_lines) };
        let total: usize = lengths.iter().sum();
        let coords = if total == 0 { &[][..] } else { std::slice::from_raw_parts(xyz, 3 * total) };
        let mut lines = Vec::with_capacity(n_lines);
        let mut at = 0;
        for &len in lengths {
            let line = (0..len)
                .map(|i| {
                    let c = &coords[3 * (at + i)..3 * (at + i) + 3];
                    Point3::new(c[0], c[1], c[2])
                })
                .collect();
            at += len;
            lines.push(line);
        }
        let (set, _) = StreamlineSet::from_polylines(lines, None).or_status()?;
        put(out, FcDataset { set: Arc::new(set) })
    })
}

/// Generates labeled parallel bundles.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_synth_bundles(
    bundle_count: usize,
    lines_per_bundle: usize,
    points_per_line: usize,
    gap: f64,
    jitter: f64,
    seed: u64,
    out: *mut *mut FcDataset,
) -> FcStatus {
    guard(|| {
        let set = bundles(&BundleParams {
            bundles: bundle_count,
            lines_per_bundle,
            points_per_line,
            gap,
            jitter,
            seed,
        })
        .or_status()?;
        put(out, FcDataset { set: Arc::new(set) })
    })
}

/// # Safety
/// `ds` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_free(ds: *mut FcDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Number of streamlines, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_streamline_count(ds: *const FcDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.set.streamlines().len())
}

/// Number of segments, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_segment_count(ds: *const FcDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.set.segments().len())
}

/// Copies the construction labels into `out` (`len` entries). Fails when
/// the dataset has no labels or `len` differs from the streamline count.
///
/// # Safety
/// `out` must hold `len` writable entries.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_labels(ds: *const FcDataset, out: *mut i64, len: usize) -> FcStatus {
    guard(|| {
        let ds = borrow(ds, "dataset")?;
        let labels = ds
            .set
            .labels()
            .ok_or((FcStatus::InvalidArgument, "dataset has no labels".to_string()))?;
        if len != labels.len() || out.is_null() {
            return Err((FcStatus::InvalidArgument, format!("expected a buffer of {} labels", labels.len())));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(labels);
        Ok(())
    })
}

/// Builds a neighborhood graph. `k > 0` selects kNN; otherwise `radius`
/// selects radius search (`radius <= 0` means 10% of the bounding-box
/// diagonal).
///
/// # Safety
/// `ds` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_csng_build(
    ds: *const FcDataset,
    level: FcLevel,
    k: usize,
    radius: f64,
    measure: FcMeasure,
    subcurve_len: usize,
    out: *mut *mut FcCsng,
) -> FcStatus {
    guard(|| {
        let ds = borrow(ds, "dataset")?;
        let neighbor = if k > 0 {
            NeighborQueryConfig::knn(k, measure.into())
        } else if radius > 0.0 {
            NeighborQueryConfig::rbn(radius, measure.into())
        } else {
            NeighborQueryConfig::default_rbn(&ds.set, measure.into())
        };
        let cfg = CsngConfig {
            neighbor,
            subcurve_len: subcurve_len.max(1),
        };
        let graph = build_csng(&ds.set, level.into(), &cfg).or_status()?;
        put(out, FcCsng { graph })
    })
}

/// # Safety
/// `g` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fc_csng_free(g: *mut FcCsng) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_csng_node_count(g: *const FcCsng) -> usize {
    g.as_ref().map_or(0, |g| g.graph.n_nodes())
}

/// Number of edges (directed edges for kNN graphs).
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_csng_edge_count(g: *const FcCsng) -> usize {
    g.as_ref().map_or(0, |g| g.graph.n_edges())
}

/// Whether the graph is directed (kNN).
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_csng_is_directed(g: *const FcCsng) -> bool {
    g.as_ref().is_some_and(|g| g.graph.is_directed())
}

/// Runs Louvain detection of the given variant.
///
/// # Safety
/// `ds` and `g` must be live handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_detect(
    ds: *const FcDataset,
    g: *const FcCsng,
    variant: FcVariant,
    resolution: f64,
    seed: u64,
    out: *mut *mut FcPartition,
) -> FcStatus {
    guard(|| {
        let ds = borrow(ds, "dataset")?;
        let g = borrow(g, "graph")?;
        let cfg = LouvainConfig {
            resolution,
            seed,
            ..Default::default()
        };
        let partition = detect(&ds.set, &g.graph, variant.into(), &cfg).or_status()?;
        put(out, FcPartition { partition })
    })
}

/// # Safety
/// `p` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fc_partition_free(p: *mut FcPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_partition_len(p: *const FcPartition) -> usize {
    p.as_ref().map_or(0, |p| p.partition.assignment.len())
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_partition_community_count(p: *const FcPartition) -> usize {
    p.as_ref().map_or(0, |p| p.partition.n_communities)
}

/// Modularity, or NaN for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_partition_modularity(p: *const FcPartition) -> f64 {
    p.as_ref().map_or(f64::NAN, |p| p.partition.modularity)
}

/// Copies the assignment into `out`, which must hold exactly
/// `fc_partition_len` entries.
///
/// # Safety
/// `out` must hold `len` writable entries.
#[no_mangle]
pub unsafe extern "C" fn fc_partition_assignment(p: *const FcPartition, out: *mut usize, len: usize) -> FcStatus {
    guard(|| {
        let p = borrow(p, "partition")?;
        let a = &p.partition.assignment;
        if len != a.len() || out.is_null() {
            return Err((FcStatus::InvalidArgument, format!("expected a buffer of {} entries", a.len())));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(a);
        Ok(())
    })
}

/// Weighted Jaccard of an assignment against labels, both of length `n`.
///
/// # Safety
/// Both arrays must hold `n` entries; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fc_weighted_jaccard(
    assignment: *const usize,
    labels: *const i64,
    n: usize,
    out: *mut f64,
) -> FcStatus {
    guard(|| {
        if out.is_null() || (n > 0 && (assignment.is_null() || labels.is_null())) {
            return Err(null("argument"));
        }
        let (a, l) = if n == 0 {
            (&[][..], &[][..])
        } else {
            (std::slice::from_raw_parts(assignment, n), std::slice::from_raw_parts(labels, n))
        };
        *out = weighted_jaccard(a, l).or_status()?;
        Ok(())
    })
}

/// Creates a session from a JSON configuration, e.g.
/// `{"strategy":"knn","k":3,"level":"streamline"}`.
///
/// # Safety
/// `ds` must be live, `config_json` a valid C string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fc_session_create(
    ds: *const FcDataset,
    config_json: *const c_char,
    out: *mut *mut FcSession,
) -> FcStatus {
    guard(|| {
        let ds = borrow(ds, "dataset")?;
        let cfg: SessionConfig = serde_json::from_str(c_str(config_json, "config")?)
            .map_err(|e| (FcStatus::MalformedInput, e.to_string()))?;
        let session = Session::create("ffi", Arc::clone(&ds.set), cfg).or_status()?;
        put(out, FcSession { session })
    })
}

/// # Safety
/// `s` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fc_session_free(s: *mut FcSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Applies a command such as `{"op":"split","args":{"node":0}}` and writes
/// the outcome as JSON to `out_json`.
///
/// # Safety
/// `s` must be live, `command_json` a valid C string, `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn fc_session_apply(
    s: *mut FcSession,
    command_json: *const c_char,
    out_json: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("session"))?;
        let cmd: Command = serde_json::from_str(c_str(command_json, "command")?)
            .map_err(|e| (FcStatus::MalformedInput, e.to_string()))?;
        let outcome = s.session.apply(cmd).or_status()?;
        put_string(out_json, serde_json::to_string(&outcome).expect("outcome serializes"))
    })
}

/// Number of leaf communities.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fc_session_leaf_count(s: *const FcSession) -> usize {
    s.as_ref().map_or(0, |s| s.session.leaves().len())
}

/// Community summary graph as JSON.
///
/// # Safety
/// `s` must be live and `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn fc_session_summary_json(s: *const FcSession, out_json: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let s = borrow(s, "session")?;
        put_string(out_json, serde_json::to_string(&s.session.summary_graph()).expect("summary serializes"))
    })
}

/// Configuration and command log as JSON.
///
/// # Safety
/// `s` must be live and `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn fc_session_export_json(s: *const FcSession, out_json: *mut *mut c_char) -> FcStatus {
    guard(|| {
        let s = borrow(s, "session")?;
        put_string(out_json, s.session.export_json())
    })
}

/// Leaf node id per segment; `out` must hold the dataset's segment count.
///
/// # Safety
/// `out` must hold `len` writable entries.
#[no_mangle]
pub unsafe extern "C" fn fc_session_colors(s: *const FcSession, out: *mut u64, len: usize) -> FcStatus {
    guard(|| {
        let s = borrow(s, "session")?;
        let colors = s.session.element_colors();
        if len != colors.len() || out.is_null() {
            return Err((FcStatus::InvalidArgument, format!("expected a buffer of {} entries", colors.len())));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&colors);
        Ok(())
    })
}
