//! C interface to argmine.
//!
//! Graphs and pipelines are opaque handles owned by the caller and released
//! with their `_free` function. Every function returns an [`ArgmineStatus`];
//! on failure a description is available from [`argmine_last_error_message`]
//! on the same thread. Strings handed out by the library must be released
//! with [`argmine_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::time::Duration;

use argmine::graph::ArgumentGraph;
use argmine::metrics;
use argmine::pipeline::{ConfigError, Outcome, Pipeline, PipelineConfig, PipelineError};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgmineStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed graph document.
    Parse = 3,
    /// The graph breaks a structural invariant.
    InvalidGraph = 4,
    Io = 5,
    Config = 6,
    /// The pipeline found no argumentative unit in the text.
    NoArgument = 7,
    /// Any other failure, including a caught panic.
    Internal = 8,
}

pub struct ArgmineGraph {
    inner: ArgumentGraph,
}

pub struct ArgminePipeline {
    inner: Pipeline,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ArgmineCounts {
    pub inodes: usize,
    pub snodes: usize,
    pub edges: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ArgmineReport {
    pub inode: f64,
    pub major_claim: u8,
    pub snode: f64,
    pub edge: f64,
    pub time_s: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(ArgmineStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(ArgmineStatus::NullPointer, format!("{what} is null"))
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ArgmineStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ArgmineStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal error: {message}"));
            ArgmineStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(ArgmineStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn graph_arg<'a>(p: *const ArgmineGraph, what: &str) -> Result<&'a ArgumentGraph, Failure> {
    p.as_ref().map(|g| &g.inner).ok_or_else(|| Failure::null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::null(what))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| Failure(ArgmineStatus::Internal, e.to_string()))
}

fn invalid(e: impl ToString) -> Failure {
    Failure(ArgmineStatus::InvalidGraph, e.to_string())
}

fn pipeline_failure(e: PipelineError) -> Failure {
    let status = match &e {
        PipelineError::Config(ConfigError::Io { .. } | ConfigError::MissingFile { .. }) => ArgmineStatus::Io,
        PipelineError::Config(_) => ArgmineStatus::Config,
        PipelineError::Resource { .. } => ArgmineStatus::Io,
        _ => ArgmineStatus::Internal,
    };
    Failure(status, e.to_string())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn argmine_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn argmine_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn argmine_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an AIF JSON document. The major claim is optional.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_graph_from_json(json: *const c_char, out: *mut *mut ArgmineGraph) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let json = str_arg(json, "json")?;
        let graph = ArgumentGraph::from_aif_json(json.as_bytes())
            .map_err(|e| Failure(ArgmineStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(ArgmineGraph { inner: graph }));
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn argmine_graph_free(graph: *mut ArgmineGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_graph_to_json(graph: *const ArgmineGraph, out: *mut *mut c_char) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let g = graph_arg(graph, "graph")?;
        let json = String::from_utf8(g.to_aif_json()).map_err(|e| Failure(ArgmineStatus::Internal, e.to_string()))?;
        *out = into_c_string(json)?;
        Ok(())
    })
}

/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_graph_to_dot(graph: *const ArgmineGraph, out: *mut *mut c_char) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let dot = graph_arg(graph, "graph")?.to_dot().map_err(invalid)?;
        *out = into_c_string(dot)?;
        Ok(())
    })
}

/// Writes the number of invariant violations to `count`. A non-zero count
/// still returns `Ok`; the violations are joined into the last error message.
///
/// # Safety
/// `graph` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_graph_validate(graph: *const ArgmineGraph, count: *mut usize) -> ArgmineStatus {
    let mut report = None;
    let status = guard(|| {
        let count = out_arg(count, "count")?;
        let violations = graph_arg(graph, "graph")?.validate();
        *count = violations.len();
        if !violations.is_empty() {
            report = Some(violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "));
        }
        Ok(())
    });
    if let Some(r) = report {
        set_error(&r);
    }
    status
}

/// Number of layers of a valid graph.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_graph_depth(graph: *const ArgmineGraph, out: *mut usize) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = graph_arg(graph, "graph")?.depth().map_err(invalid)?;
        Ok(())
    })
}

/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_graph_counts(graph: *const ArgmineGraph, out: *mut ArgmineCounts) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = graph_arg(graph, "graph")?;
        *out = ArgmineCounts {
            inodes: g.inodes().len(),
            snodes: g.snodes().len(),
            edges: g.edges().len(),
        };
        Ok(())
    })
}

/// Edit distance in characters.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_levenshtein(a: *const c_char, b: *const c_char, out: *mut usize) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = metrics::levenshtein(str_arg(a, "a")?, str_arg(b, "b")?);
        Ok(())
    })
}

/// Normalized similarity of two node texts in [0, 1].
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_node_similarity(a: *const c_char, b: *const c_char, out: *mut f64) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = metrics::node_similarity(str_arg(a, "a")?, str_arg(b, "b")?);
        Ok(())
    })
}

/// Scores `generated` against `benchmark`, reading stances from the
/// generated graph. `elapsed_s` is copied into the report.
///
/// # Safety
/// Both graphs must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_evaluate_pair(
    benchmark: *const ArgmineGraph,
    generated: *const ArgmineGraph,
    elapsed_s: f64,
    out: *mut ArgmineReport,
) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let elapsed = Duration::try_from_secs_f64(elapsed_s)
            .map_err(|e| Failure(ArgmineStatus::Config, format!("elapsed_s: {e}")))?;
        let r = metrics::evaluate_pair(graph_arg(benchmark, "benchmark")?, graph_arg(generated, "generated")?, elapsed)
            .map_err(invalid)?;
        *out = ArgmineReport {
            inode: r.inode,
            major_claim: r.major_claim,
            snode: r.snode,
            edge: r.edge,
            time_s: r.time_s,
        };
        Ok(())
    })
}

/// Builds a pipeline from a config file, or from the defaults and bundled
/// sample models when `config_path` is null.
///
/// # Safety
/// `config_path` must be null or a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn argmine_pipeline_new(config_path: *const c_char, out: *mut *mut ArgminePipeline) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let config = if config_path.is_null() {
            PipelineConfig::default()
        } else {
            PipelineConfig::load(Path::new(str_arg(config_path, "config_path")?))
                .map_err(|e| pipeline_failure(e.into()))?
        };
        let pipeline = Pipeline::new(config).map_err(pipeline_failure)?;
        *out = Box::into_raw(Box::new(ArgminePipeline { inner: pipeline }));
        Ok(())
    })
}

/// # Safety
/// `pipeline` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn argmine_pipeline_free(pipeline: *mut ArgminePipeline) {
    if !pipeline.is_null() {
        drop(Box::from_raw(pipeline));
    }
}

/// Mines `text` into a new graph handle. Returns `NoArgument` with a null
/// graph when nothing argumentative is found; `elapsed_s` may be null.
///
/// # Safety
/// `pipeline` must be a live handle, `text` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn argmine_pipeline_mine(
    pipeline: *const ArgminePipeline,
    text: *const c_char,
    out: *mut *mut ArgmineGraph,
    elapsed_s: *mut f64,
) -> ArgmineStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let p = &pipeline.as_ref().ok_or_else(|| Failure::null("pipeline"))?.inner;
        let outcome = p.mine_text(str_arg(text, "text")?).map_err(pipeline_failure)?;
        if let Some(e) = elapsed_s.as_mut() {
            *e = outcome.elapsed().as_secs_f64();
        }
        match outcome {
            Outcome::Graph(m) => {
                *out = Box::into_raw(Box::new(ArgmineGraph { inner: m.graph }));
                Ok(())
            }
            Outcome::NoArgumentFound { .. } => {
                Err(Failure(ArgmineStatus::NoArgument, "no argumentative unit found".into()))
            }
        }
    })
}
