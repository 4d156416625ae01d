//! Trajectory statistics and comment-network summaries.

use std::collections::BTreeMap;
use std::io::Write;

use crate::dynamics::SimulationState;
use crate::error::{Error, Result};
use crate::graph::{Direction, Layer, SocialGraph};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub i: f64,
    pub mean_m: f64,
    /// `mean_m(t) - mean_m(t-1)`; absent at t = 0.
    pub delta_m: Option<f64>,
    pub new_comments: usize,
    pub rewired: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<StepRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn densities(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.i).collect()
    }

    pub fn mean_emotions(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.mean_m).collect()
    }

    /// CSV with header `t,i,mean_m,delta_m,new_comments,rewired`; `delta_m`
    /// is empty on the first row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,i,mean_m,delta_m,new_comments,rewired")?;
        for s in &self.steps {
            let delta = s.delta_m.map(|d| d.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                s.t, s.i, s.mean_m, delta, s.new_comments, s.rewired
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmotionRange {
    pub initial: f64,
    pub minimum: f64,
    pub maximum: f64,
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSummary {
    pub node_count: usize,
    pub edge_count: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    /// total comment degree -> node count, over retained nodes
    pub degree_histogram: BTreeMap<usize, usize>,
    pub log_bins: Vec<LogBin>,
}

/// Degree bin `[low, high]` (inclusive) with base-2 edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogBin {
    pub low: usize,
    pub high: usize,
    pub count: usize,
}

/// `(s, i)` with `s = 1 - i` exactly.
pub fn densities(state: &SimulationState) -> (f64, f64) {
    density_pair(state.spreader_count(), state.graph.len())
}

pub(crate) fn density_pair(published: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let i = published as f64 / n as f64;
    (1.0 - i, i)
}

pub fn mean_emotion(graph: &SocialGraph) -> Result<f64> {
    if graph.is_empty() {
        return Err(Error::EmptyInput("mean emotion of an empty graph"));
    }
    let sum: f64 = graph.all_attributes().iter().map(|a| a.emotion).sum();
    Ok(sum / graph.len() as f64)
}

pub fn delta_mean_series(traj: &Trajectory) -> Result<Vec<f64>> {
    if traj.len() < 2 {
        return Err(Error::Data(format!(
            "need at least 2 steps for differences, got {}",
            traj.len()
        )));
    }
    Ok(traj
        .steps
        .windows(2)
        .map(|w| w[1].mean_m - w[0].mean_m)
        .collect())
}

pub fn emotion_range(traj: &Trajectory) -> Result<EmotionRange> {
    let first = traj
        .steps
        .first()
        .ok_or(Error::EmptyInput("emotion range of an empty trajectory"))?;
    let (mut lo, mut hi) = (first.mean_m, first.mean_m);
    for s in &traj.steps[1..] {
        lo = lo.min(s.mean_m);
        hi = hi.max(s.mean_m);
    }
    Ok(EmotionRange {
        initial: first.mean_m,
        minimum: lo,
        maximum: hi,
        difference: hi - lo,
    })
}

/// Base-2 bins `[1,1], [2,3], [4,7], ...` over a degree histogram. Degree 0
/// gets its own `[0,0]` bin when present.
pub fn log_bins(histogram: &BTreeMap<usize, usize>) -> Vec<LogBin> {
    let mut bins: Vec<LogBin> = Vec::new();
    if let Some(&c) = histogram.get(&0) {
        bins.push(LogBin {
            low: 0,
            high: 0,
            count: c,
        });
    }
    let max = histogram.keys().next_back().copied().unwrap_or(0);
    let mut low = 1usize;
    while low <= max {
        let high = low * 2 - 1;
        let count = histogram.range(low..=high).map(|(_, c)| c).sum();
        bins.push(LogBin { low, high, count });
        low *= 2;
    }
    bins
}

/// Statistics over the comment layer using total (in + out) degree. With
/// `drop_silent`, nodes that neither commented nor were commented on are
/// left out of the node count and the mean.
pub fn comment_network_summary(graph: &SocialGraph, drop_silent: bool) -> NetworkSummary {
    let mut histogram = BTreeMap::new();
    let (mut nodes, mut sum, mut max) = (0usize, 0usize, 0usize);
    for v in graph.nodes() {
        let d = graph.degree(Layer::Comment, Direction::Total, v);
        if drop_silent && d == 0 {
            continue;
        }
        nodes += 1;
        sum += d;
        max = max.max(d);
        *histogram.entry(d).or_insert(0) += 1;
    }
    let log = log_bins(&histogram);
    NetworkSummary {
        node_count: nodes,
        edge_count: graph.edge_count(Layer::Comment),
        mean_degree: if nodes == 0 {
            0.0
        } else {
            sum as f64 / nodes as f64
        },
        max_degree: max,
        degree_histogram: histogram,
        log_bins: log,
    }
}

impl NetworkSummary {
    /// `metric,value` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "metric,value")?;
        writeln!(w, "node_count,{}", self.node_count)?;
        writeln!(w, "edge_count,{}", self.edge_count)?;
        writeln!(w, "mean_degree,{}", self.mean_degree)?;
        writeln!(w, "max_degree,{}", self.max_degree)?;
        Ok(())
    }

    /// `degree_bin_low,degree_bin_high,count` rows over the log bins.
    pub fn write_histogram_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "degree_bin_low,degree_bin_high,count")?;
        for b in &self.log_bins {
            writeln!(w, "{},{},{}", b.low, b.high, b.count)?;
        }
        Ok(())
    }

    /// Same schema with one row per raw degree.
    pub fn write_raw_histogram_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "degree_bin_low,degree_bin_high,count")?;
        for (d, c) in &self.degree_histogram {
            writeln!(w, "{d},{d},{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{NodeAttributes, NodeId};
    use proptest::prelude::*;

    fn with_emotions(ms: &[f64]) -> SocialGraph {
        SocialGraph::from_attributes(
            ms.iter()
                .map(|&m| NodeAttributes {
                    viewpoint: 0.5,
                    emotion: m,
                    faith: 0.5,
                })
                .collect(),
        )
    }

    fn traj(ms: &[f64]) -> Trajectory {
        Trajectory {
            steps: ms
                .iter()
                .enumerate()
                .map(|(t, &m)| StepRecord {
                    t,
                    i: 0.0,
                    mean_m: m,
                    delta_m: None,
                    new_comments: 0,
                    rewired: 0,
                })
                .collect(),
        }
    }

    #[test]
    fn density_examples() {
        assert_eq!(density_pair(6, 3000), (0.998, 0.002));
        assert_eq!(density_pair(3000, 3000), (0.0, 1.0));
        assert_eq!(density_pair(0, 3000), (1.0, 0.0));
    }

    #[test]
    fn mean_emotion_examples() {
        assert_eq!(mean_emotion(&with_emotions(&[0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(mean_emotion(&with_emotions(&[0.5, -0.5])).unwrap(), 0.0);
        assert!((mean_emotion(&with_emotions(&[0.2, 0.4, 0.6])).unwrap() - 0.4).abs() < 1e-15);
        assert!(mean_emotion(&with_emotions(&[])).is_err());
    }

    #[test]
    fn delta_series() {
        assert_eq!(delta_mean_series(&traj(&[0.3; 5])).unwrap(), vec![0.0; 4]);
        let d = delta_mean_series(&traj(&[-0.01588, -0.00588])).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0] - 0.01).abs() < 1e-15);
        assert!(delta_mean_series(&traj(&[0.1])).is_err());
    }

    #[test]
    fn range_examples() {
        let flat = emotion_range(&traj(&[-0.01588; 10])).unwrap();
        assert_eq!(flat.difference, 0.0);

        let r = emotion_range(&traj(&[-0.01588, -0.005, 0.01104, 0.0])).unwrap();
        assert_eq!(r.initial, -0.01588);
        assert!((r.difference - 0.02692).abs() < 1e-12);

        let single = emotion_range(&traj(&[0.2])).unwrap();
        assert_eq!(
            (single.minimum, single.maximum, single.difference),
            (0.2, 0.2, 0.0)
        );
        assert!(emotion_range(&traj(&[])).is_err());
    }

    #[test]
    fn summary_silent_removal() {
        let mut g = with_emotions(&[0.0; 5]);
        g.add_comment_edge(NodeId(1), NodeId(2)).unwrap();
        g.add_comment_edge(NodeId(3), NodeId(2)).unwrap();
        let s = comment_network_summary(&g, true);
        assert_eq!(s.node_count, 3);
        assert_eq!(s.edge_count, 2);
        assert!((s.mean_degree - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(comment_network_summary(&g, false).node_count, 5);
        assert_eq!(
            comment_network_summary(&with_emotions(&[0.0; 4]), true).node_count,
            0
        );
    }

    #[test]
    fn log_bin_edges() {
        let h: BTreeMap<usize, usize> = [(0, 4), (1, 3), (2, 2), (3, 1), (9, 1)]
            .into_iter()
            .collect();
        let bins = log_bins(&h);
        let shape: Vec<_> = bins.iter().map(|b| (b.low, b.high, b.count)).collect();
        assert_eq!(
            shape,
            vec![(0, 0, 4), (1, 1, 3), (2, 3, 3), (4, 7, 0), (8, 15, 1)]
        );
    }

    proptest! {
        #[test]
        fn range_ignores_interior_order(mut ms in prop::collection::vec(-0.9f64..0.9, 3..30), rot in 0usize..30) {
            let a = emotion_range(&traj(&ms)).unwrap();
            let last = ms.len() - 1;
            let interior = &mut ms[1..last];
            let r = rot % interior.len();
            interior.rotate_left(r);
            let b = emotion_range(&traj(&ms)).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
