//! C ABI over `gnn_reduce`.
//!
//! Objects are opaque handles created by `gr_*_new`/`gr_*` constructors and
//! released with the matching `gr_*_free`. Fallible calls return a
//! [`GrStatus`]; on failure [`gr_last_error`] describes what went wrong on
//! the calling thread. No call unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use gnn_reduce::io::{self, LoadedGraph};
use gnn_reduce::reduct::Compression;
use gnn_reduce::{ColoredMultigraph, Depth, Error, Grade, Policy, RefinementResult};

/// Passed as depth or grade to mean "unbounded".
pub const GR_UNBOUNDED: u64 = u64::MAX;

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed input file or string.
    Format = 3,
    Io = 4,
    Invariant = 5,
    VerificationFailed = 6,
    Panic = 7,
}

/// Representative choice for [`gr_compress`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrPolicy {
    MinIncidence = 0,
    FirstNode = 1,
}

/// A colored multigraph plus the external id of each node.
pub struct GrGraph {
    inner: LoadedGraph,
}

/// Refinement partitions of a graph.
pub struct GrRefinement {
    inner: RefinementResult,
}

/// A reduct together with the refinement and substitution that produced it.
pub struct GrReduct {
    inner: Compression,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> GrStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) | Error::SchemaVersion { .. } => GrStatus::Format,
        Error::Io { .. } => GrStatus::Io,
        Error::Invariant(_) => GrStatus::Invariant,
        _ => GrStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (GrStatus, String)>) -> GrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GrStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GrStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (GrStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GrStatus, String) {
    (GrStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (GrStatus, String) {
    (GrStatus::InvalidArgument, msg.into())
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (GrStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (GrStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GrStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (GrStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], (GrStatus, String)> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn depth_of(d: u64) -> Depth {
    if d == GR_UNBOUNDED {
        Depth::Infinite
    } else {
        Depth::Finite(d as usize)
    }
}

fn grade_of(c: u64) -> Result<Grade, (GrStatus, String)> {
    if c == GR_UNBOUNDED {
        Ok(Grade::Infinite)
    } else {
        Grade::new(c).map_err(lib_err)
    }
}

fn check_capacity(len: usize, need: usize) -> Result<(), (GrStatus, String)> {
    if len < need {
        Err(invalid(format!("buffer holds {len} entries, {need} needed")))
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a graph on nodes `0..node_count` from `edge_count` edges.
/// `mult` may be null (all multiplicities 1); `colors` may be null (one color
/// for all nodes), otherwise it holds `node_count` color strings.
///
/// # Safety
/// Non-null array arguments must point to at least the stated number of
/// elements; color strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_new(
    node_count: usize,
    src: *const u64,
    dst: *const u64,
    mult: *const u64,
    edge_count: usize,
    colors: *const *const c_char,
    out: *mut *mut GrGraph,
) -> GrStatus {
    guard(|| {
        let src = slice(src, edge_count, "src")?;
        let dst = slice(dst, edge_count, "dst")?;
        let mult = if mult.is_null() { None } else { Some(slice(mult, edge_count, "mult")?) };
        let edges: Vec<(usize, usize, u64)> = (0..edge_count)
            .map(|i| (src[i] as usize, dst[i] as usize, mult.map_or(1, |m| m[i])))
            .collect();
        let graph = if colors.is_null() {
            ColoredMultigraph::uncolored(node_count, edges)
        } else {
            let ptrs = slice(colors, node_count, "colors")?;
            let names = ptrs
                .iter()
                .map(|&p| c_str(p, "color"))
                .collect::<Result<Vec<_>, _>>()?;
            ColoredMultigraph::from_edges(node_count, edges, &names)
        }
        .map_err(lib_err)?;
        let handle = Box::new(GrGraph {
            inner: LoadedGraph {
                graph,
                ids: (0..node_count as u64).collect(),
            },
        });
        write_out(out, Box::into_raw(handle))
    })
}

/// Loads an edge list and optional color file (null for none).
///
/// # Safety
/// Paths must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_load(
    edge_path: *const c_char,
    color_path: *const c_char,
    undirected: bool,
    out: *mut *mut GrGraph,
) -> GrStatus {
    guard(|| {
        let edges = c_str(edge_path, "edge_path")?;
        let colors = if color_path.is_null() { None } else { Some(c_str(color_path, "color_path")?) };
        let loaded = io::load_graph(Path::new(edges), colors.map(Path::new), undirected).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(GrGraph { inner: loaded })))
    })
}

/// # Safety
/// `graph` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_free(graph: *mut GrGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Node count (0 for a null handle).
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_node_count(graph: *const GrGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.graph.node_count())
}

/// Number of distinct (source, target) pairs (0 for a null handle).
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_edge_count(graph: *const GrGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.graph.simple_edge_count())
}

/// External id of node `index` (its index for graphs built in memory).
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gr_graph_node_id(graph: *const GrGraph, index: usize, out: *mut u64) -> GrStatus {
    guard(|| {
        let g = as_ref(graph, "graph")?;
        let id = *g
            .inner
            .ids
            .get(index)
            .ok_or_else(|| invalid(format!("node {index} out of range")))?;
        write_out(out, id)
    })
}

/// Refines `graph` for `depth` rounds (or [`GR_UNBOUNDED`]) at grade
/// `grade` (or [`GR_UNBOUNDED`] for ungraded).
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gr_refine(
    graph: *const GrGraph,
    depth: u64,
    grade: u64,
    out: *mut *mut GrRefinement,
) -> GrStatus {
    guard(|| {
        let g = as_ref(graph, "graph")?;
        let inner = gnn_reduce::refine(&g.inner.graph, depth_of(depth), grade_of(grade)?);
        write_out(out, Box::into_raw(Box::new(GrRefinement { inner })))
    })
}

/// # Safety
/// `refinement` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn gr_refinement_free(refinement: *mut GrRefinement) {
    if !refinement.is_null() {
        drop(Box::from_raw(refinement));
    }
}

/// Writes the stable round into `out`, or returns `InvalidArgument` if the
/// requested depth was reached first.
///
/// # Safety
/// `refinement` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gr_refinement_stable_round(refinement: *const GrRefinement, out: *mut u64) -> GrStatus {
    guard(|| {
        let r = as_ref(refinement, "refinement")?;
        let s = r
            .inner
            .stable_round()
            .ok_or_else(|| invalid("refinement stopped before stabilizing"))?;
        write_out(out, s as u64)
    })
}

/// Number of classes at `round`.
///
/// # Safety
/// `refinement` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gr_refinement_class_count(
    refinement: *const GrRefinement,
    round: usize,
    out: *mut usize,
) -> GrStatus {
    guard(|| {
        let r = as_ref(refinement, "refinement")?;
        let p = r.inner.classes(round).map_err(lib_err)?;
        write_out(out, p.class_count())
    })
}

/// Writes the class id of every node at `round` into `classes`, which must
/// hold at least node-count entries. Ids number classes by first occurrence.
///
/// # Safety
/// `refinement` must be a live handle; `classes` must hold `len` entries.
#[no_mangle]
pub unsafe extern "C" fn gr_refinement_classes(
    refinement: *const GrRefinement,
    round: usize,
    classes: *mut u32,
    len: usize,
) -> GrStatus {
    guard(|| {
        let r = as_ref(refinement, "refinement")?;
        let p = r.inner.classes(round).map_err(lib_err)?;
        let ids = p.class_ids();
        check_capacity(len, ids.len())?;
        slice_mut(classes, len, "classes")?[..ids.len()].copy_from_slice(ids);
        Ok(())
    })
}

/// Builds the reduct of `graph` at (`depth`, `grade`).
///
/// # Safety
/// `graph` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gr_compress(
    graph: *const GrGraph,
    depth: u64,
    grade: u64,
    policy: GrPolicy,
    out: *mut *mut GrReduct,
) -> GrStatus {
    guard(|| {
        let g = as_ref(graph, "graph")?;
        let policy = match policy {
            GrPolicy::MinIncidence => Policy::MinIncidence,
            GrPolicy::FirstNode => Policy::FirstNode,
        };
        let inner = gnn_reduce::compress_graph(&g.inner.graph, depth_of(depth), grade_of(grade)?, policy);
        write_out(out, Box::into_raw(Box::new(GrReduct { inner })))
    })
}

/// # Safety
/// `reduct` must be null or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn gr_reduct_free(reduct: *mut GrReduct) {
    if !reduct.is_null() {
        drop(Box::from_raw(reduct));
    }
}

/// Reduct node count (0 for a null handle).
///
/// # Safety
/// `reduct` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gr_reduct_node_count(reduct: *const GrReduct) -> usize {
    reduct.as_ref().map_or(0, |r| r.inner.reduct.graph.node_count())
}

/// Reduct edge count, one per distinct (source, target) pair.
///
/// # Safety
/// `reduct` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gr_reduct_edge_count(reduct: *const GrReduct) -> usize {
    reduct.as_ref().map_or(0, |r| r.inner.reduct.graph.simple_edge_count())
}

/// Writes reduct edges as original node indices, sorted by (source, target).
/// Each array must hold at least edge-count entries.
///
/// # Safety
/// `reduct` must be a live handle; arrays must hold `len` entries.
#[no_mangle]
pub unsafe extern "C" fn gr_reduct_edges(
    reduct: *const GrReduct,
    src: *mut u64,
    dst: *mut u64,
    mult: *mut u64,
    len: usize,
) -> GrStatus {
    guard(|| {
        let r = &as_ref(reduct, "reduct")?.inner.reduct;
        check_capacity(len, r.graph.simple_edge_count())?;
        let (src, dst, mult) = (
            slice_mut(src, len, "src")?,
            slice_mut(dst, len, "dst")?,
            slice_mut(mult, len, "mult")?,
        );
        for (i, (u, v, m)) in r.graph.edges().enumerate() {
            src[i] = r.nodes[u] as u64;
            dst[i] = r.nodes[v] as u64;
            mult[i] = m;
        }
        Ok(())
    })
}

/// Writes, for every original node, the original index of its
/// representative. `out` must hold at least original node-count entries.
///
/// # Safety
/// `reduct` must be a live handle; `out` must hold `len` entries.
#[no_mangle]
pub unsafe extern "C" fn gr_reduct_representatives(reduct: *const GrReduct, out: *mut u64, len: usize) -> GrStatus {
    guard(|| {
        let r = &as_ref(reduct, "reduct")?.inner.reduct;
        check_capacity(len, r.index_of.len())?;
        let out = slice_mut(out, len, "out")?;
        for (v, &i) in r.index_of.iter().enumerate() {
            out[v] = r.nodes[i] as u64;
        }
        Ok(())
    })
}

/// Checks that every node and its representative get equal colors in
/// every round up to the reduct's depth. Returns `VerificationFailed` with
/// the witness in [`gr_last_error`] otherwise.
///
/// # Safety
/// Both handles must be live, and `reduct` must come from `graph`.
#[no_mangle]
pub unsafe extern "C" fn gr_reduct_verify(graph: *const GrGraph, reduct: *const GrReduct) -> GrStatus {
    guard(|| {
        let g = &as_ref(graph, "graph")?.inner.graph;
        let c = &as_ref(reduct, "reduct")?.inner;
        let s = &c.substitution;
        let v = gnn_reduce::verify_reduct(g, &c.reduct.graph, &c.reduct.index_of, s.depth(), s.grade())
            .map_err(lib_err)?;
        match v.witness {
            None => Ok(()),
            Some((node, round)) => Err((
                GrStatus::VerificationFailed,
                format!("node {node} differs from its representative in round {round}"),
            )),
        }
    })
}
