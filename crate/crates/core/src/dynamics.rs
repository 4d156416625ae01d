//! Discrete-time spreading and emotion engine.
//!
//! Each step has two phases. In the diffusion phase every node that was
//! published at the start of the step tries each relationship tie (both
//! directions) with its own spreading rate. A successful try reaches the
//! neighbour: an unpublished neighbour becomes published at step end, and
//! the neighbour may comment on the spreader's post. A first-time comment
//! exposes the commenter to the filtered comment area of that post and pulls
//! its emotion toward the mean of `(m_source + m_commenter_k) / 2`. In the
//! topology phase relationship edges are rewired toward similar viewpoints.
//!
//! All draws in a step read the state as it was at the start of the step.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::Rng;

use crate::cocoon::build_hcac;
use crate::dynamics_rng;
use crate::error::{Error, Result};
use crate::graph::{degree_stats, DegreeStats, Direction, Layer, NodeId, SocialGraph, SpreadState};
use crate::metrics::{mean_emotion, StepRecord, Trajectory};
use crate::recommend::{rewire_with_index, RecommendationAccuracy, ViewpointIndex};

/// Largest emotion magnitude representable strictly inside (-1, 1).
const EMOTION_BOUND: f64 = 1.0 - f64::EPSILON / 2.0;

/// Steps with everyone published and nothing else changing (no comments,
/// emotion updates or rewiring) after which a run stops before its horizon.
pub const QUIESCENT_STEPS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadParams {
    pub alpha0: f64,
    pub theta0: f64,
    pub lambda: f64,
    pub i0: f64,
    pub ra: RecommendationAccuracy,
    pub horizon: usize,
}

impl SpreadParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &'static str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be in [0,1], got {v}")))
            }
        };
        unit("alpha0", self.alpha0)?;
        unit("theta0", self.theta0)?;
        unit("lambda", self.lambda)?;
        if !(self.i0 > 0.0 && self.i0 < 1.0) {
            return Err(Error::param(
                "i0",
                format!("must be in (0,1), got {}", self.i0),
            ));
        }
        Ok(())
    }

    pub fn initial_spreaders(&self, n: usize) -> usize {
        (self.i0 * n as f64).floor() as usize
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepReport {
    pub new_spreaders: usize,
    pub new_comment_edges: usize,
    pub rewired_edges: usize,
    pub emotion_updates: usize,
}

#[derive(Clone, Debug)]
pub struct SimulationState {
    pub t: usize,
    pub graph: SocialGraph,
    spreader_count: usize,
    newly_published: Vec<NodeId>,
    index: ViewpointIndex,
}

impl SimulationState {
    pub fn new(graph: SocialGraph) -> Self {
        let index = ViewpointIndex::new(&graph);
        let spreader_count = graph.published_count();
        SimulationState {
            t: 0,
            graph,
            spreader_count,
            newly_published: Vec::new(),
            index,
        }
    }

    /// Publish `count` uniformly chosen nodes.
    pub fn seed_spreaders<R: Rng + ?Sized>(&mut self, count: usize, rng: &mut R) {
        let n = self.graph.len();
        for i in index::sample(rng, n, count.min(n)).into_iter() {
            self.publish(NodeId::from(i));
        }
    }

    /// Mark a node published outside of the step loop.
    pub fn publish(&mut self, id: NodeId) {
        let s = self.graph.state_mut(id);
        if !s.is_published() {
            s.state = SpreadState::Published;
            self.spreader_count += 1;
        }
    }

    pub fn spreader_count(&self) -> usize {
        self.spreader_count
    }

    pub fn susceptible_count(&self) -> usize {
        self.graph.len() - self.spreader_count
    }

    /// Nodes reached during the most recent step.
    pub fn newly_published(&self) -> &[NodeId] {
        &self.newly_published
    }
}

/// Spreading rate of a node:
/// `alpha0 / 2 * (f + (k - <k>) / k_max)` over total relationship degree,
/// clamped to `[0,1]`.
pub fn spread_rate(
    node: NodeId,
    graph: &SocialGraph,
    stats: &DegreeStats,
    alpha0: f64,
) -> Result<f64> {
    if stats.max_degree == 0 {
        return Err(Error::DegenerateGraph("relationship layer has no edges"));
    }
    let k = graph.relationship_degree(node) as f64;
    let raw =
        alpha0 / 2.0 * (graph.faith(node) + (k - stats.mean_degree) / stats.max_degree as f64);
    Ok(raw.clamp(0.0, 1.0))
}

/// Chance that `commenter` comments on `parent`'s post:
/// `theta0 * (f_parent + (1 - 2|p_commenter - p_parent|)^2) / 2`.
pub fn comment_probability(
    commenter: NodeId,
    parent: NodeId,
    graph: &SocialGraph,
    theta0: f64,
) -> f64 {
    let dp = (graph.viewpoint(commenter) - graph.viewpoint(parent)).abs();
    let align = 1.0 - 2.0 * dp;
    theta0 * (graph.faith(parent) + align * align) / 2.0
}

/// Mean over contributions of `(m_source + m_commenter) / 2 - m_target`.
/// No contributions means no perturbation.
pub fn emotion_perturbation(contributions: &[(f64, f64)], target_emotion: f64) -> f64 {
    if contributions.is_empty() {
        return 0.0;
    }
    let sum: f64 = contributions
        .iter()
        .map(|&(m_src, m_k)| (m_src + m_k) / 2.0 - target_emotion)
        .sum();
    sum / contributions.len() as f64
}

pub fn apply_emotion_update(graph: &mut SocialGraph, target: NodeId, delta: f64) -> f64 {
    let m = (graph.emotion(target) + delta).clamp(-EMOTION_BOUND, EMOTION_BOUND);
    graph.set_emotion(target, m);
    m
}

/// Advance one step. Returns `None` once the horizon is reached.
pub fn step<R: Rng + ?Sized>(
    state: &mut SimulationState,
    params: &SpreadParams,
    rng: &mut R,
) -> Option<StepReport> {
    if state.t >= params.horizon {
        return None;
    }
    let mut report = StepReport::default();
    let graph = &state.graph;
    let stats = degree_stats(graph, Layer::Relationship, Direction::Total);

    let spreaders: Vec<NodeId> = graph
        .nodes()
        .filter(|&v| graph.state(v).is_published())
        .collect();
    let mut reached = vec![false; graph.len()];
    let mut newly = Vec::new();
    let mut comments: Vec<(NodeId, NodeId)> = Vec::new();
    let mut commented: HashSet<(NodeId, NodeId)> = HashSet::new();

    if stats.max_degree > 0 && params.alpha0 > 0.0 {
        for &src in &spreaders {
            let alpha = spread_rate(src, graph, &stats, params.alpha0).expect("non-degenerate");
            let ties = graph
                .out_neighbors(Layer::Relationship, src)
                .iter()
                .chain(graph.in_neighbors(Layer::Relationship, src));
            for &u in ties {
                if rng.random::<f64>() >= alpha {
                    continue;
                }
                if !graph.state(u).is_published() && !reached[u.index()] {
                    reached[u.index()] = true;
                    newly.push(u);
                }
                let theta = comment_probability(u, src, graph, params.theta0);
                if rng.random::<f64>() < theta
                    && !graph.has_edge(Layer::Comment, u, src)
                    && commented.insert((u, src))
                {
                    comments.push((u, src));
                }
            }
        }
    }

    // contributions are read before any of this step's comments or updates land
    let mut pooled: BTreeMap<NodeId, Vec<(f64, f64)>> = BTreeMap::new();
    for &(u, src) in &comments {
        let cocoon = build_hcac(graph, src, u, params.ra);
        let m_src = graph.emotion(src);
        let entry = pooled.entry(u).or_default();
        entry.extend(
            cocoon
                .filtered_commenters
                .iter()
                .map(|&k| (m_src, graph.emotion(k))),
        );
    }

    let graph = &mut state.graph;
    for &(u, src) in &comments {
        graph.add_comment_edge(u, src).expect("valid comment edge");
    }
    report.new_comment_edges = comments.len();

    for (u, contributions) in pooled {
        if contributions.is_empty() {
            continue;
        }
        let delta = emotion_perturbation(&contributions, graph.emotion(u));
        apply_emotion_update(graph, u, delta);
        report.emotion_updates += 1;
    }

    report.rewired_edges = rewire_with_index(graph, &state.index, params.lambda, params.ra, rng);

    for &u in &newly {
        let s = graph.state_mut(u);
        s.state = SpreadState::Published;
        s.newly_published = false;
    }
    report.new_spreaders = newly.len();
    state.spreader_count += newly.len();
    state.newly_published = newly;
    state.t += 1;
    Some(report)
}

/// A finished run: the per-step trajectory and the evolved graph.
#[derive(Clone, Debug)]
pub struct Run {
    pub trajectory: Trajectory,
    pub graph: SocialGraph,
}

/// Seed `floor(i0 * N)` spreaders uniformly at random and step until the
/// horizon, or until everyone is published and nothing has moved for
/// [`QUIESCENT_STEPS`] steps.
pub fn run(graph: SocialGraph, params: &SpreadParams, seed: u64) -> Result<Run> {
    params.validate()?;
    if graph.is_empty() {
        return Err(Error::EmptyInput("cannot run on an empty graph"));
    }
    let seeds = params.initial_spreaders(graph.len());
    if seeds == 0 {
        return Err(Error::param(
            "i0",
            format!(
                "floor(i0 * N) = 0 for i0 = {} and N = {}",
                params.i0,
                graph.len()
            ),
        ));
    }

    let mut rng = dynamics_rng(seed);
    let mut graph = graph;
    graph.reset_states();
    let mut state = SimulationState::new(graph);
    state.seed_spreaders(seeds, &mut rng);

    let n = state.graph.len() as f64;
    let mut trajectory = Trajectory::default();
    let mut prev_m = mean_emotion(&state.graph)?;
    trajectory.steps.push(StepRecord {
        t: 0,
        i: state.spreader_count() as f64 / n,
        mean_m: prev_m,
        delta_m: None,
        new_comments: 0,
        rewired: 0,
    });

    let mut quiet = 0;
    while let Some(report) = step(&mut state, params, &mut rng) {
        let m = mean_emotion(&state.graph)?;
        trajectory.steps.push(StepRecord {
            t: state.t,
            i: state.spreader_count() as f64 / n,
            mean_m: m,
            delta_m: Some(m - prev_m),
            new_comments: report.new_comment_edges,
            rewired: report.rewired_edges,
        });
        prev_m = m;

        let settled = state.susceptible_count() == 0 && report == StepReport::default();
        quiet = if settled { quiet + 1 } else { 0 };
        if quiet >= QUIESCENT_STEPS {
            break;
        }
    }
    Ok(Run {
        trajectory,
        graph: state.graph,
    })
}

/// Closed-form logistic spreader density `i0 e^{rt} / (1 - i0 + i0 e^{rt})`,
/// evaluated in a form that does not overflow for large `r t`.
pub fn logistic_density(t: f64, i0: f64, rate: f64) -> f64 {
    1.0 / (1.0 + (1.0 - i0) / i0 * (-rate * t).exp())
}
