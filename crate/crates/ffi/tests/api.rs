use std::ffi::{CStr, CString};
use std::ptr;

use cocoonsim_ffi::*;

fn last_error() -> String {
    let p = cs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn small_config(ra: Option<f64>) -> *mut CsConfig {
    let doc = CString::new("n = 300\ni0 = 0.02\nhorizon = 30\nruns = 3\nseed = 5\n").unwrap();
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(cs_config_parse(doc.as_ptr(), &mut cfg), CsStatus::Ok);
        if let Some(ra) = ra {
            assert_eq!(cs_config_set_ra(cfg, ra), CsStatus::Ok);
        }
    }
    cfg
}

#[test]
fn version_and_logistic() {
    let v = unsafe { CStr::from_ptr(cs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    assert!((cs_logistic_density(0.0, 0.006, 0.3) - 0.006).abs() < 1e-15);
}

#[test]
fn null_pointers_are_reported() {
    unsafe {
        assert_eq!(cs_config_new(ptr::null_mut()), CsStatus::NullPointer);
        assert!(last_error().contains("null"));
        let mut out = ptr::null_mut();
        assert_eq!(
            cs_config_parse(ptr::null(), &mut out),
            CsStatus::NullPointer
        );
        assert!(out.is_null());
        assert_eq!(
            cs_run(ptr::null(), 0, &mut ptr::null_mut()),
            CsStatus::NullPointer
        );
        assert_eq!(cs_graph_node_count(ptr::null()), 0);
        assert_eq!(cs_run_step_count(ptr::null()), 0);
        cs_config_free(ptr::null_mut());
        cs_graph_free(ptr::null_mut());
        cs_run_free(ptr::null_mut());
        cs_ensemble_free(ptr::null_mut());
    }
}

#[test]
fn parse_and_parameter_errors() {
    unsafe {
        let mut cfg = ptr::null_mut();
        let bad = CString::new("n = 10\nwhat = 3\n").unwrap();
        assert_eq!(
            cs_config_parse(bad.as_ptr(), &mut cfg),
            CsStatus::ParseError
        );
        assert!(last_error().contains("line 2"));
        assert!(cfg.is_null());

        let bad_utf8 = [0xffu8, 0xfe, 0];
        assert_eq!(
            cs_config_parse(bad_utf8.as_ptr().cast(), &mut cfg),
            CsStatus::InvalidUtf8
        );

        let cfg = small_config(None);
        assert_eq!(cs_config_set_ra(cfg, 1.5), CsStatus::InvalidParameter);
        assert!(last_error().contains("ra"));
        let mut run = ptr::null_mut();
        // ra still unset after the rejected update
        assert_eq!(cs_run(cfg, 1, &mut run), CsStatus::InvalidParameter);
        assert!(run.is_null());
        assert_eq!(
            cs_config_set_topology(cfg, CsTopology::WattsStrogatz, 5.0),
            CsStatus::InvalidParameter
        );
        assert_eq!(cs_config_set_runs(cfg, 0), CsStatus::InvalidParameter);
        cs_config_free(cfg);
    }
}

#[test]
fn single_run_accessors() {
    unsafe {
        let cfg = small_config(Some(0.5));
        let mut run = ptr::null_mut();
        assert_eq!(cs_run(cfg, 9, &mut run), CsStatus::Ok);
        let n = cs_run_step_count(run);
        assert_eq!(n, 31);

        let mut rec = CsStepRecord::default();
        assert_eq!(cs_run_step(run, 0, &mut rec), CsStatus::Ok);
        assert_eq!(rec.t, 0);
        assert_eq!(rec.i, 0.02);
        assert!(rec.delta_m.is_nan());
        let mut prev = rec.i;
        for k in 1..n {
            assert_eq!(cs_run_step(run, k, &mut rec), CsStatus::Ok);
            assert_eq!(rec.t, k);
            assert!(rec.i >= prev && !rec.delta_m.is_nan());
            prev = rec.i;
        }
        assert_eq!(cs_run_step(run, n, &mut rec), CsStatus::OutOfRange);

        let mut range = CsEmotionRange::default();
        assert_eq!(cs_run_emotion_range(run, &mut range), CsStatus::Ok);
        assert!(range.minimum <= range.initial && range.initial <= range.maximum);
        assert_eq!(range.difference, range.maximum - range.minimum);

        let mut summary = CsCommentSummary::default();
        assert_eq!(cs_run_comment_summary(run, &mut summary), CsStatus::Ok);
        let mut graph = ptr::null_mut();
        assert_eq!(cs_run_graph(run, &mut graph), CsStatus::Ok);
        assert_eq!(cs_graph_node_count(graph), 300);
        assert_eq!(
            cs_graph_edge_count(graph, CsLayer::Comment),
            summary.edge_count
        );
        cs_graph_free(graph);
        cs_run_free(run);
        cs_config_free(cfg);
    }
}

#[test]
fn run_on_graph_leaves_input_alone() {
    unsafe {
        let cfg = small_config(Some(0.0));
        let mut g = ptr::null_mut();
        assert_eq!(cs_graph_generate(cfg, 3, &mut g), CsStatus::Ok);
        let r_edges = cs_graph_edge_count(g, CsLayer::Relationship);
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(cs_run_on_graph(cfg, g, 3, &mut a), CsStatus::Ok);
        assert_eq!(cs_run(cfg, 3, &mut b), CsStatus::Ok);
        assert_eq!(cs_graph_edge_count(g, CsLayer::Comment), 0);
        assert_eq!(cs_graph_edge_count(g, CsLayer::Relationship), r_edges);

        // same seed for graph and dynamics either way
        let (mut ra, mut rb) = (CsEmotionRange::default(), CsEmotionRange::default());
        cs_run_emotion_range(a, &mut ra);
        cs_run_emotion_range(b, &mut rb);
        assert_eq!(ra, rb);
        cs_run_free(a);
        cs_run_free(b);
        cs_graph_free(g);
        cs_config_free(cfg);
    }
}

#[test]
fn export_import_through_handles() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    unsafe {
        let cfg = small_config(Some(0.5));
        let mut run = ptr::null_mut();
        assert_eq!(cs_run(cfg, 2, &mut run), CsStatus::Ok);
        let mut g = ptr::null_mut();
        cs_run_graph(run, &mut g);
        assert_eq!(cs_graph_export(g, path.as_ptr()), CsStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(cs_graph_import(path.as_ptr(), &mut back), CsStatus::Ok);
        for layer in [CsLayer::Relationship, CsLayer::Comment] {
            assert_eq!(
                cs_graph_edge_count(back, layer),
                cs_graph_edge_count(g, layer)
            );
        }
        let missing = CString::new(dir.path().join("nope").to_str().unwrap()).unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(
            cs_graph_import(missing.as_ptr(), &mut none),
            CsStatus::IoError
        );
        cs_graph_free(back);
        cs_graph_free(g);
        cs_run_free(run);
        cs_config_free(cfg);
    }
}

#[test]
fn ensemble_and_sweep() {
    unsafe {
        let cfg = small_config(Some(0.5));
        let mut e = ptr::null_mut();
        assert_eq!(cs_ensemble(cfg, &mut e), CsStatus::Ok);
        assert_eq!(cs_ensemble_step_count(e), 31);
        let mut s = CsEnsembleStep::default();
        assert_eq!(cs_ensemble_step(e, 0, &mut s), CsStatus::Ok);
        assert_eq!(s.mean_i, 0.02);
        assert_eq!(s.std_i, 0.0);
        let mut d = -1.0;
        assert_eq!(cs_ensemble_mean_difference(e, &mut d), CsStatus::Ok);
        assert!(d >= 0.0);

        let ras = [0.0, 1.0];
        let mut rows = [CsSweepRow::default(); 2];
        assert_eq!(
            cs_ra_sweep(cfg, ras.as_ptr(), 2, rows.as_mut_ptr()),
            CsStatus::Ok
        );
        assert_eq!(rows[0].ra, 0.0);
        assert_eq!(rows[1].mean_difference, 0.0);
        assert_eq!(rows[0].initial_m, rows[1].initial_m);
        assert_eq!(
            cs_ra_sweep(cfg, ptr::null(), 2, rows.as_mut_ptr()),
            CsStatus::NullPointer
        );
        cs_ensemble_free(e);
        cs_config_free(cfg);
    }
}
