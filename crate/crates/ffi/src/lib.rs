//! C interface to the shortest-path solvers.
//!
//! Graphs and solutions are opaque heap handles released with their `_free`
//! functions. Every fallible call returns an [`ApspStatus`]; on failure the
//! message is available from [`apsp_last_error`] on the same thread.
//! Vertices are 0-based. Distances use `APSP_INF` and `APSP_NEG_INF` for the
//! infinities.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bridging_apsp::approx::approx_short_path_with;
use bridging_apsp::approx::approx_params;
use bridging_apsp::exact::{solve, Algorithm, SolverConfig};
use bridging_apsp::graph::{load_dimacs_str, Edge, Graph};
use bridging_apsp::matrix::{SuccessorMatrix, WeightMatrix, WitnessMatrix};
use bridging_apsp::paths::{reconstruct_path, trace_simple_path};
use bridging_apsp::ApspError;

pub const APSP_INF: i64 = i64::MAX;
pub const APSP_NEG_INF: i64 = i64::MIN;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApspStatus {
    Ok = 0,
    /// The solve finished and the graph has a negative cycle; the solution
    /// handle is still filled in.
    NegativeCycle = 1,
    NullPointer = -1,
    InvalidArgument = -2,
    ParseError = -3,
    OutOfRange = -4,
    NoPath = -5,
    BufferTooSmall = -6,
    Overflow = -7,
    Internal = -8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApspAlgorithm {
    Rand = 0,
    Det = 1,
    Unweighted = 2,
    Naive = 3,
}

/// A directed graph under construction.
pub struct ApspGraph {
    n: usize,
    edges: Vec<Edge>,
}

enum Paths {
    Successors(SuccessorMatrix),
    Witnesses(WitnessMatrix),
}

/// Distances plus whatever is needed to recover paths.
pub struct ApspSolution {
    distances: WeightMatrix,
    arcs: WeightMatrix,
    paths: Paths,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &ApspError) -> ApspStatus {
    match err {
        ApspError::Parse { .. } => ApspStatus::ParseError,
        ApspError::OutOfRange(_) => ApspStatus::OutOfRange,
        ApspError::Overflow(_) => ApspStatus::Overflow,
        ApspError::NoPath { .. } => ApspStatus::NoPath,
        ApspError::Config(_) | ApspError::Contract(_) | ApspError::DimensionMismatch(_) => {
            ApspStatus::InvalidArgument
        }
        ApspError::MalformedWitness(_) | ApspError::MalformedSuccessor(_) | ApspError::Io(_) => {
            ApspStatus::Internal
        }
    }
}

fn fail(err: ApspError) -> ApspStatus {
    set_error(err.to_string());
    status_of(&err)
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> ApspStatus) -> ApspStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            ApspStatus::Internal
        }
    }
}

/// Message for the last failed call on this thread. Valid until the next
/// call that fails.
#[no_mangle]
pub extern "C" fn apsp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates an empty graph on `n` vertices.
///
/// # Safety
/// `out` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn apsp_graph_new(n: usize, out: *mut *mut ApspGraph) -> ApspStatus {
    if out.is_null() {
        return ApspStatus::NullPointer;
    }
    *out = Box::into_raw(Box::new(ApspGraph { n, edges: Vec::new() }));
    ApspStatus::Ok
}

/// Adds the arc `from -> to`. Parallel arcs keep the lightest.
///
/// # Safety
/// `graph` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn apsp_graph_add_arc(graph: *mut ApspGraph, from: usize, to: usize, weight: i64) -> ApspStatus {
    let Some(g) = graph.as_mut() else { return ApspStatus::NullPointer };
    if from >= g.n || to >= g.n {
        set_error(format!("arc ({from}, {to}) outside 0..{}", g.n));
        return ApspStatus::OutOfRange;
    }
    g.edges.push(Edge { from, to, weight });
    ApspStatus::Ok
}

/// Parses a DIMACS shortest-path file held in a NUL-terminated string.
///
/// # Safety
/// `text` must be a valid C string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn apsp_graph_from_dimacs(text: *const c_char, out: *mut *mut ApspGraph) -> ApspStatus {
    if text.is_null() || out.is_null() {
        return ApspStatus::NullPointer;
    }
    guard(|| {
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            set_error("input is not UTF-8");
            return ApspStatus::ParseError;
        };
        match load_dimacs_str(s) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(ApspGraph { n: g.n(), edges: g.edges().to_vec() }));
                ApspStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `graph` must be null or come from this library, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn apsp_graph_free(graph: *mut ApspGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn apsp_graph_vertex_count(graph: *const ApspGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.n)
}

fn build(g: &ApspGraph) -> Result<Graph, ApspError> {
    Graph::new(g.n, g.edges.iter().copied())
}

/// Exact distances. Returns `NegativeCycle` with `*out` set when some
/// distances are `APSP_NEG_INF`.
///
/// # Safety
/// `graph` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apsp_solve(
    graph: *const ApspGraph,
    algorithm: ApspAlgorithm,
    seed: u64,
    out: *mut *mut ApspSolution,
) -> ApspStatus {
    let (Some(g), false) = (graph.as_ref(), out.is_null()) else { return ApspStatus::NullPointer };
    guard(|| {
        let alg = match algorithm {
            ApspAlgorithm::Rand => Algorithm::Rand,
            ApspAlgorithm::Det => Algorithm::Det,
            ApspAlgorithm::Unweighted => Algorithm::Unweighted,
            ApspAlgorithm::Naive => Algorithm::Naive,
        };
        let graph = match build(g) {
            Ok(graph) => graph,
            Err(e) => return fail(e),
        };
        let d = graph.to_weight_matrix();
        match solve(alg, &d, &SolverConfig::with_seed(seed)) {
            Ok(r) => {
                let status = if r.negative_cycle.is_some() { ApspStatus::NegativeCycle } else { ApspStatus::Ok };
                let paths = Paths::Successors(r.successors(&d));
                *out = Box::into_raw(Box::new(ApspSolution { distances: r.distances, arcs: d, paths }));
                status
            }
            Err(e) => fail(e),
        }
    })
}

/// Distances within a factor `1 + epsilon` for nonnegative weights.
///
/// # Safety
/// `graph` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apsp_approx(
    graph: *const ApspGraph,
    epsilon: f64,
    seed: u64,
    out: *mut *mut ApspSolution,
) -> ApspStatus {
    let (Some(g), false) = (graph.as_ref(), out.is_null()) else { return ApspStatus::NullPointer };
    guard(|| {
        let run = || -> Result<ApspSolution, ApspError> {
            let d = build(g)?.to_weight_matrix();
            let params = approx_params(d.rows(), d.max_abs_finite(), epsilon)?;
            let r = approx_short_path_with(&d, params, epsilon, seed)?;
            Ok(ApspSolution { distances: r.distances, arcs: d, paths: Paths::Witnesses(r.witnesses) })
        };
        match run() {
            Ok(sol) => {
                *out = Box::into_raw(Box::new(sol));
                ApspStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `solution` must be null or come from this library, and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn apsp_solution_free(solution: *mut ApspSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `solution` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn apsp_solution_vertex_count(solution: *const ApspSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.distances.rows())
}

/// # Safety
/// `solution` must come from this library and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apsp_solution_distance(
    solution: *const ApspSolution,
    from: usize,
    to: usize,
    out: *mut i64,
) -> ApspStatus {
    let (Some(s), false) = (solution.as_ref(), out.is_null()) else { return ApspStatus::NullPointer };
    let n = s.distances.rows();
    if from >= n || to >= n {
        set_error(format!("pair ({from}, {to}) outside 0..{n}"));
        return ApspStatus::OutOfRange;
    }
    *out = s.distances.get(from, to).to_raw();
    ApspStatus::Ok
}

/// Copies the row-major `n * n` distance matrix into `buf`.
///
/// # Safety
/// `buf` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn apsp_solution_distances(solution: *const ApspSolution, buf: *mut i64, len: usize) -> ApspStatus {
    let (Some(s), false) = (solution.as_ref(), buf.is_null()) else { return ApspStatus::NullPointer };
    let cells = s.distances.as_slice();
    if len < cells.len() {
        set_error(format!("buffer holds {len} values, need {}", cells.len()));
        return ApspStatus::BufferTooSmall;
    }
    for (k, w) in cells.iter().enumerate() {
        *buf.add(k) = w.to_raw();
    }
    ApspStatus::Ok
}

/// Writes a shortest path from `from` to `to` into `buf` and its vertex
/// count into `*len`. When `cap` is too small, only `*len` is written and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// `buf` must have room for `cap` values and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn apsp_solution_path(
    solution: *const ApspSolution,
    from: usize,
    to: usize,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> ApspStatus {
    let (Some(s), false) = (solution.as_ref(), len.is_null()) else { return ApspStatus::NullPointer };
    guard(|| {
        let n = s.distances.rows();
        if from >= n || to >= n {
            set_error(format!("pair ({from}, {to}) outside 0..{n}"));
            return ApspStatus::OutOfRange;
        }
        let d = *s.distances.get(from, to);
        if d.is_neg_inf() {
            set_error("a negative cycle lies between the endpoints");
            return ApspStatus::NegativeCycle;
        }
        let vertices = match &s.paths {
            Paths::Successors(succ) => trace_simple_path(succ, &s.arcs, from, to).map(|p| p.vertices),
            Paths::Witnesses(w) => reconstruct_path(w, &s.arcs, from, to).and_then(|p| {
                if p.weight.is_inf() {
                    Err(ApspError::NoPath { from, to })
                } else {
                    Ok(p.vertices)
                }
            }),
        };
        let vertices = match vertices {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        *len = vertices.len();
        if vertices.len() > cap {
            return ApspStatus::BufferTooSmall;
        }
        if buf.is_null() {
            return ApspStatus::NullPointer;
        }
        ptr::copy_nonoverlapping(vertices.as_ptr(), buf, vertices.len());
        ApspStatus::Ok
    })
}
