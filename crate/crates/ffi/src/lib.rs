//! C ABI over `cocoonsim`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`, `*_parse`
//! or a simulation call and released with the matching `*_free`. Every
//! fallible call returns a [`CsStatus`]; on failure a description is kept per
//! thread and can be read with [`cs_last_error`]. Output pointers are only
//! written on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cocoonsim::config::{parse_config, ExperimentConfig, Topology};
use cocoonsim::dynamics::{logistic_density, run, Run};
use cocoonsim::ensemble::{ra_sweep, run_ensemble, EnsembleStats};
use cocoonsim::graph::{Layer, SocialGraph};
use cocoonsim::io::{export_graph, import_graph};
use cocoonsim::metrics::{comment_network_summary, emotion_range};
use cocoonsim::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    ParseError = 3,
    DataError = 4,
    IoError = 5,
    GraphError = 6,
    InvalidUtf8 = 7,
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsLayer {
    Relationship = 0,
    Comment = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsTopology {
    BarabasiAlbert = 0,
    WattsStrogatz = 1,
}

/// One trajectory row. `delta_m` is NaN at t = 0.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CsStepRecord {
    pub t: usize,
    pub i: f64,
    pub mean_m: f64,
    pub delta_m: f64,
    pub new_comments: usize,
    pub rewired: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CsEmotionRange {
    pub initial: f64,
    pub minimum: f64,
    pub maximum: f64,
    pub difference: f64,
}

/// Comment layer after removing silent nodes.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CsCommentSummary {
    pub node_count: usize,
    pub edge_count: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CsEnsembleStep {
    pub t: usize,
    pub mean_i: f64,
    pub std_i: f64,
    pub mean_m: f64,
    pub std_m: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CsSweepRow {
    pub ra: f64,
    pub initial_m: f64,
    pub mean_difference: f64,
    pub min_m: f64,
    pub max_m: f64,
}

/// Experiment configuration.
pub struct CsConfig {
    inner: ExperimentConfig,
}

/// Social graph with both layers.
pub struct CsGraph {
    inner: SocialGraph,
}

/// Finished single run: trajectory plus evolved graph.
pub struct CsRun {
    inner: Run,
}

/// Aggregated ensemble statistics.
pub struct CsEnsemble {
    inner: EnsembleStats,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CsStatus {
    match e {
        Error::Parameter { .. } | Error::EmptyInput(_) | Error::Usage(_) => {
            CsStatus::InvalidParameter
        }
        Error::Parse { .. } => CsStatus::ParseError,
        Error::Data(_) => CsStatus::DataError,
        Error::Io(_) => CsStatus::IoError,
        Error::SelfLoop(_) | Error::InvalidNode { .. } | Error::DegenerateGraph(_) => {
            CsStatus::GraphError
        }
    }
}

struct Fail(CsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type Outcome = Result<(), Fail>;

fn guard(f: impl FnOnce() -> Outcome) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            CsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(CsStatus::NullPointer, format!("null {what}")))
}

unsafe fn deref_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| Fail(CsStatus::NullPointer, format!("null {what}")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CsStatus::NullPointer, format!("null {what}")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(CsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn out_of_range(index: usize, len: usize) -> Fail {
    Fail(
        CsStatus::OutOfRange,
        format!("index {index} out of range for length {len}"),
    )
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `i0 e^{rt} / (1 - i0 + i0 e^{rt})`.
#[no_mangle]
pub extern "C" fn cs_logistic_density(t: f64, i0: f64, rate: f64) -> f64 {
    logistic_density(t, i0, rate)
}

/// Default configuration. `ra` is unset until [`cs_config_set_ra`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn cs_config_new(out: *mut *mut CsConfig) -> CsStatus {
    guard(|| {
        let out = deref_mut(out, "output pointer")?;
        *out = boxed(CsConfig {
            inner: ExperimentConfig::default(),
        });
        Ok(())
    })
}

/// Parse a `key = value` document.
///
/// # Safety
/// `document` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_config_parse(
    document: *const c_char,
    out: *mut *mut CsConfig,
) -> CsStatus {
    guard(|| {
        let doc = text(document, "config text")?;
        let out = deref_mut(out, "output pointer")?;
        *out = boxed(CsConfig {
            inner: parse_config(doc)?,
        });
        Ok(())
    })
}

/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_config_free(config: *mut CsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

fn set_field(config: *mut CsConfig, apply: impl FnOnce(&mut ExperimentConfig)) -> CsStatus {
    guard(|| {
        let c = unsafe { deref_mut(config, "config") }?;
        let mut next = c.inner.clone();
        apply(&mut next);
        next.validate()?;
        c.inner = next;
        Ok(())
    })
}

/// Set the recommendation accuracy. The config is unchanged on error.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_config_set_ra(config: *mut CsConfig, ra: f64) -> CsStatus {
    set_field(config, |c| c.ra = Some(ra))
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_config_set_seed(config: *mut CsConfig, seed: u64) -> CsStatus {
    set_field(config, |c| c.seed = seed)
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_config_set_runs(config: *mut CsConfig, runs: usize) -> CsStatus {
    set_field(config, |c| c.runs = runs)
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_config_set_nodes(config: *mut CsConfig, n: usize) -> CsStatus {
    set_field(config, |c| c.n = n)
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_config_set_horizon(config: *mut CsConfig, horizon: usize) -> CsStatus {
    set_field(config, |c| c.horizon = horizon)
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_config_set_topology(
    config: *mut CsConfig,
    topology: CsTopology,
    mean_degree: f64,
) -> CsStatus {
    set_field(config, |c| {
        c.topology = match topology {
            CsTopology::BarabasiAlbert => Topology::BarabasiAlbert,
            CsTopology::WattsStrogatz => Topology::WattsStrogatz,
        };
        c.target_mean_degree = mean_degree;
    })
}

/// Generate the initial graph the config describes.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_generate(
    config: *const CsConfig,
    seed: u64,
    out: *mut *mut CsGraph,
) -> CsStatus {
    guard(|| {
        let c = deref(config, "config")?;
        let out = deref_mut(out, "output pointer")?;
        *out = boxed(CsGraph {
            inner: c.inner.build_graph(seed)?,
        });
        Ok(())
    })
}

/// Read `nodes.csv` and `edges.csv` from a directory.
///
/// # Safety
/// `dir` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_import(dir: *const c_char, out: *mut *mut CsGraph) -> CsStatus {
    guard(|| {
        let d = text(dir, "directory")?;
        let out = deref_mut(out, "output pointer")?;
        *out = boxed(CsGraph {
            inner: import_graph(Path::new(d))?,
        });
        Ok(())
    })
}

/// Write `nodes.csv` and `edges.csv` into a directory.
///
/// # Safety
/// `graph` must be a live handle; `dir` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_export(graph: *const CsGraph, dir: *const c_char) -> CsStatus {
    guard(|| {
        let g = deref(graph, "graph")?;
        let d = text(dir, "directory")?;
        export_graph(&g.inner, Path::new(d))?;
        Ok(())
    })
}

/// Node count, or 0 for NULL.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_node_count(graph: *const CsGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.inner.len())
}

/// Edge count of one layer, or 0 for NULL.
///
/// # Safety
/// `graph` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_edge_count(graph: *const CsGraph, layer: CsLayer) -> usize {
    let layer = match layer {
        CsLayer::Relationship => Layer::Relationship,
        CsLayer::Comment => Layer::Comment,
    };
    graph.as_ref().map_or(0, |g| g.inner.edge_count(layer))
}

/// # Safety
/// `graph` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_graph_free(graph: *mut CsGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Generate a graph from `seed` and simulate it. `ra` must be set.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_run(
    config: *const CsConfig,
    seed: u64,
    out: *mut *mut CsRun,
) -> CsStatus {
    guard(|| {
        let c = &deref(config, "config")?.inner;
        let out = deref_mut(out, "output pointer")?;
        let params = c.spread_params()?;
        *out = boxed(CsRun {
            inner: run(c.build_graph(seed)?, &params, seed)?,
        });
        Ok(())
    })
}

/// Simulate a copy of an existing graph; the input graph is not modified.
///
/// # Safety
/// `config` and `graph` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_run_on_graph(
    config: *const CsConfig,
    graph: *const CsGraph,
    seed: u64,
    out: *mut *mut CsRun,
) -> CsStatus {
    guard(|| {
        let c = &deref(config, "config")?.inner;
        let g = deref(graph, "graph")?;
        let out = deref_mut(out, "output pointer")?;
        let params = c.spread_params()?;
        *out = boxed(CsRun {
            inner: run(g.inner.clone(), &params, seed)?,
        });
        Ok(())
    })
}

/// Number of recorded steps including t = 0, or 0 for NULL.
///
/// # Safety
/// `run` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_run_step_count(run: *const CsRun) -> usize {
    run.as_ref().map_or(0, |r| r.inner.trajectory.len())
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_run_step(
    run: *const CsRun,
    index: usize,
    out: *mut CsStepRecord,
) -> CsStatus {
    guard(|| {
        let r = deref(run, "run")?;
        let out = deref_mut(out, "output pointer")?;
        let steps = &r.inner.trajectory.steps;
        let s = steps
            .get(index)
            .ok_or_else(|| out_of_range(index, steps.len()))?;
        *out = CsStepRecord {
            t: s.t,
            i: s.i,
            mean_m: s.mean_m,
            delta_m: s.delta_m.unwrap_or(f64::NAN),
            new_comments: s.new_comments,
            rewired: s.rewired,
        };
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_run_emotion_range(
    run: *const CsRun,
    out: *mut CsEmotionRange,
) -> CsStatus {
    guard(|| {
        let r = deref(run, "run")?;
        let out = deref_mut(out, "output pointer")?;
        let e = emotion_range(&r.inner.trajectory)?;
        *out = CsEmotionRange {
            initial: e.initial,
            minimum: e.minimum,
            maximum: e.maximum,
            difference: e.difference,
        };
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_run_comment_summary(
    run: *const CsRun,
    out: *mut CsCommentSummary,
) -> CsStatus {
    guard(|| {
        let r = deref(run, "run")?;
        let out = deref_mut(out, "output pointer")?;
        let s = comment_network_summary(&r.inner.graph, true);
        *out = CsCommentSummary {
            node_count: s.node_count,
            edge_count: s.edge_count,
            mean_degree: s.mean_degree,
            max_degree: s.max_degree,
        };
        Ok(())
    })
}

/// Copy of the evolved graph as a new handle.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_run_graph(run: *const CsRun, out: *mut *mut CsGraph) -> CsStatus {
    guard(|| {
        let r = deref(run, "run")?;
        let out = deref_mut(out, "output pointer")?;
        *out = boxed(CsGraph {
            inner: r.inner.graph.clone(),
        });
        Ok(())
    })
}

/// # Safety
/// `run` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_run_free(run: *mut CsRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Run `runs` members in parallel with seeds `seed + i`.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble(
    config: *const CsConfig,
    out: *mut *mut CsEnsemble,
) -> CsStatus {
    guard(|| {
        let c = deref(config, "config")?;
        let out = deref_mut(out, "output pointer")?;
        *out = boxed(CsEnsemble {
            inner: run_ensemble(&c.inner)?,
        });
        Ok(())
    })
}

/// # Safety
/// `ensemble` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble_step_count(ensemble: *const CsEnsemble) -> usize {
    ensemble.as_ref().map_or(0, |e| e.inner.steps.len())
}

/// # Safety
/// `ensemble` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble_step(
    ensemble: *const CsEnsemble,
    index: usize,
    out: *mut CsEnsembleStep,
) -> CsStatus {
    guard(|| {
        let e = deref(ensemble, "ensemble")?;
        let out = deref_mut(out, "output pointer")?;
        let steps = &e.inner.steps;
        let s = steps
            .get(index)
            .ok_or_else(|| out_of_range(index, steps.len()))?;
        *out = CsEnsembleStep {
            t: s.t,
            mean_i: s.mean_i,
            std_i: s.std_i,
            mean_m: s.mean_m,
            std_m: s.std_m,
        };
        Ok(())
    })
}

/// Mean over members of the population-emotion range.
///
/// # Safety
/// `ensemble` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble_mean_difference(
    ensemble: *const CsEnsemble,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let e = deref(ensemble, "ensemble")?;
        *deref_mut(out, "output pointer")? = e.inner.mean_difference;
        Ok(())
    })
}

/// # Safety
/// `ensemble` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble_free(ensemble: *mut CsEnsemble) {
    if !ensemble.is_null() {
        drop(Box::from_raw(ensemble));
    }
}

/// Sweep `count` RA values over shared initial graphs. `rows` must hold
/// `count` entries and is filled in input order.
///
/// # Safety
/// `ra_values` and `rows` must point to `count` readable/writable elements.
#[no_mangle]
pub unsafe extern "C" fn cs_ra_sweep(
    config: *const CsConfig,
    ra_values: *const f64,
    count: usize,
    rows: *mut CsSweepRow,
) -> CsStatus {
    guard(|| {
        let c = deref(config, "config")?;
        if ra_values.is_null() || rows.is_null() {
            return Err(Fail(CsStatus::NullPointer, "null ra_values or rows".into()));
        }
        let ras = std::slice::from_raw_parts(ra_values, count);
        let result = ra_sweep(&c.inner, ras)?;
        let dst = std::slice::from_raw_parts_mut(rows, count);
        for (d, r) in dst.iter_mut().zip(result) {
            *d = CsSweepRow {
                ra: r.ra,
                initial_m: r.initial_m,
                mean_difference: r.mean_difference,
                min_m: r.min_m,
                max_m: r.max_m,
            };
        }
        Ok(())
    })
}
