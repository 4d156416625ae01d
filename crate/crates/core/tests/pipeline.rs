use std::collections::BTreeSet;

use cocoonsim::config::{parse_config, ExperimentConfig};
use cocoonsim::dynamics::{logistic_density, run};
use cocoonsim::empirical::{compare_to_empirical, curve_rmse, EmpiricalSeries};
use cocoonsim::ensemble::{aggregate, run_ensemble, run_member};
use cocoonsim::graph::{degree_stats, Direction, Layer, NodeAttributes, NodeId, SocialGraph};
use cocoonsim::io::{export_graph, import_graph};
use cocoonsim::metrics::comment_network_summary;

fn complete_graph(n: usize) -> SocialGraph {
    let attrs = (0..n)
        .map(|k| NodeAttributes {
            viewpoint: (k as f64 + 0.5) / n as f64,
            emotion: 0.0,
            faith: 0.5,
        })
        .collect();
    let mut g = SocialGraph::from_attributes(attrs);
    for a in 0..n {
        for b in a + 1..n {
            g.add_relationship_edge(NodeId::from(a), NodeId::from(b))
                .unwrap();
        }
    }
    g
}

/// On a complete graph every spreader tries every susceptible node once per
/// step with the same rate `beta`, so the expected next density given the
/// current one is `i + s (1 - (1 - beta)^(N i))`.
#[test]
fn complete_graph_follows_mean_field_recurrence() {
    let n = 200;
    let cfg = ExperimentConfig {
        n,
        alpha0: 0.4,
        lambda: 0.0,
        i0: 0.01,
        ra: Some(0.5),
        horizon: 12,
        ..ExperimentConfig::default()
    };
    let params = cfg.spread_params().unwrap();
    let beta = 0.25 * cfg.alpha0;
    let g = complete_graph(n);
    let trajs: Vec<_> = (0..200)
        .map(|k| run(g.clone(), &params, k).unwrap().trajectory)
        .collect();
    let stats = aggregate(&trajs).unwrap();

    let mut i = 0.01;
    let mut worst: f64 = 0.0;
    for step in &stats.steps {
        worst = worst.max((step.mean_i - i).abs());
        let s = 1.0 - i;
        i += s * (1.0 - (1.0 - beta).powf(n as f64 * i));
    }
    // exact in expectation for the first step, mean-field afterwards
    let first = (2.0 + 198.0 * (1.0 - (1.0 - beta).powi(2))) / n as f64;
    assert!(
        (stats.steps[1].mean_i - first).abs() < 0.01,
        "step 1: {} vs {first}",
        stats.steps[1].mean_i
    );
    assert!(worst < 0.04, "max deviation {worst}");
}

#[test]
fn export_import_preserves_summaries() {
    let cfg = parse_config("n = 600\nra = 0.5\nhorizon = 60\nseed = 17\ni0 = 0.01").unwrap();
    let params = cfg.spread_params().unwrap();
    let graph = run_member(&cfg, &params, 0).unwrap().graph;
    let dir = tempfile::tempdir().unwrap();
    export_graph(&graph, dir.path()).unwrap();
    let back = import_graph(dir.path()).unwrap();

    assert_eq!(
        comment_network_summary(&back, true),
        comment_network_summary(&graph, true)
    );
    for layer in [Layer::Relationship, Layer::Comment] {
        for dir in [Direction::In, Direction::Out, Direction::Total] {
            assert_eq!(
                degree_stats(&back, layer, dir),
                degree_stats(&graph, layer, dir)
            );
        }
        let a: BTreeSet<_> = graph.edges(layer).collect();
        let b: BTreeSet<_> = back.edges(layer).collect();
        assert_eq!(a, b);
    }
    assert_eq!(back.all_attributes(), graph.all_attributes());
    assert_eq!(back.published_count(), graph.published_count());
}

#[test]
fn ensemble_against_its_own_curve() {
    let cfg = parse_config("n = 500\nra = 0.85\nruns = 4\nhorizon = 40").unwrap();
    let stats = run_ensemble(&cfg).unwrap();
    let curve = stats.mean_density();
    let last = (curve.len() - 1) as f64;
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .enumerate()
        .map(|(t, &v)| (t as f64 / last, v))
        .collect();
    let emp = EmpiricalSeries::new("self", pts).unwrap();
    assert!(compare_to_empirical(&stats, &emp).unwrap() < 1e-12);
}

#[test]
fn logistic_curves_agree_under_resampling() {
    let (i0, r) = (0.006, 0.3);
    let fine: Vec<f64> = (0..=100)
        .map(|t| logistic_density(t as f64, i0, r))
        .collect();
    let pts: Vec<(f64, f64)> = (0..=20)
        .map(|k| (k as f64 / 20.0, logistic_density(5.0 * k as f64, i0, r)))
        .collect();
    let emp = EmpiricalSeries::new("law", pts).unwrap();
    assert!(curve_rmse(&fine, &emp).unwrap() < 0.02);
}

#[test]
fn horizon_caps_trajectory_length() {
    let cfg = parse_config("n = 300\nra = 0.2\nhorizon = 7\ni0 = 0.02").unwrap();
    let r = run_member(&cfg, &cfg.spread_params().unwrap(), 0).unwrap();
    assert_eq!(r.trajectory.len(), 8);
    assert_eq!(r.trajectory.steps.last().unwrap().t, 7);
}
