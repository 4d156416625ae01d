//! Two-layer social graph: directed relationship ties that carry information,
//! and directed comment edges (commenter -> post author) that accumulate as
//! the spreading process runs.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng_from_seed;

/// Dense node index, `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    #[inline]
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Per-node scalars. `viewpoint` and `faith` live in (0,1), `emotion` in (-1,1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeAttributes {
    pub viewpoint: f64,
    pub emotion: f64,
    pub faith: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SpreadState {
    #[default]
    Unpublished,
    Published,
}

impl SpreadState {
    pub fn code(self) -> char {
        match self {
            SpreadState::Unpublished => 'S',
            SpreadState::Published => 'I',
        }
    }
}

/// Spreading state of a node. `newly_published` is only meaningful inside a
/// step: the node was reached this step and becomes a spreader at step end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct NodeState {
    pub state: SpreadState,
    pub newly_published: bool,
}

impl NodeState {
    pub fn is_published(&self) -> bool {
        self.state == SpreadState::Published
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Relationship,
    Comment,
}

impl Layer {
    pub fn tag(self) -> char {
        match self {
            Layer::Relationship => 'R',
            Layer::Comment => 'C',
        }
    }

    pub fn from_tag(s: &str) -> Option<Layer> {
        match s {
            "R" => Some(Layer::Relationship),
            "C" => Some(Layer::Comment),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
    Total,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStats {
    pub mean_degree: f64,
    pub max_degree: usize,
    /// degree -> number of nodes with that degree
    pub histogram: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SocialGraph {
    attributes: Vec<NodeAttributes>,
    states: Vec<NodeState>,
    r_out: Vec<Vec<NodeId>>,
    r_in: Vec<Vec<NodeId>>,
    c_out: Vec<Vec<NodeId>>,
    c_in: Vec<Vec<NodeId>>,
}

impl SocialGraph {
    /// Graph with the given attributes, no edges and every node unpublished.
    pub fn from_attributes(attributes: Vec<NodeAttributes>) -> Self {
        let n = attributes.len();
        SocialGraph {
            attributes,
            states: vec![NodeState::default(); n],
            r_out: vec![Vec::new(); n],
            r_in: vec![Vec::new(); n],
            c_out: vec![Vec::new(); n],
            c_in: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.len()).map(NodeId::from)
    }

    pub fn check(&self, id: NodeId) -> Result<()> {
        if id.index() < self.len() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                id: id.index(),
                n: self.len(),
            })
        }
    }

    #[inline]
    pub fn attributes(&self, id: NodeId) -> &NodeAttributes {
        &self.attributes[id.index()]
    }

    pub fn all_attributes(&self) -> &[NodeAttributes] {
        &self.attributes
    }

    #[inline]
    pub fn viewpoint(&self, id: NodeId) -> f64 {
        self.attributes[id.index()].viewpoint
    }

    #[inline]
    pub fn emotion(&self, id: NodeId) -> f64 {
        self.attributes[id.index()].emotion
    }

    #[inline]
    pub fn faith(&self, id: NodeId) -> f64 {
        self.attributes[id.index()].faith
    }

    pub(crate) fn set_emotion(&mut self, id: NodeId, m: f64) {
        self.attributes[id.index()].emotion = m;
    }

    /// Overwrite every node's faith. Used for homogeneous test populations.
    pub fn set_all_faith(&mut self, f: f64) {
        for a in &mut self.attributes {
            a.faith = f;
        }
    }

    #[inline]
    pub fn state(&self, id: NodeId) -> NodeState {
        self.states[id.index()]
    }

    pub fn states(&self) -> &[NodeState] {
        &self.states
    }

    pub(crate) fn state_mut(&mut self, id: NodeId) -> &mut NodeState {
        &mut self.states[id.index()]
    }

    /// Reset every node to unpublished.
    pub fn reset_states(&mut self) {
        self.states.fill(NodeState::default());
    }

    pub fn published_count(&self) -> usize {
        self.states.iter().filter(|s| s.is_published()).count()
    }

    pub fn out_neighbors(&self, layer: Layer, id: NodeId) -> &[NodeId] {
        match layer {
            Layer::Relationship => &self.r_out[id.index()],
            Layer::Comment => &self.c_out[id.index()],
        }
    }

    pub fn in_neighbors(&self, layer: Layer, id: NodeId) -> &[NodeId] {
        match layer {
            Layer::Relationship => &self.r_in[id.index()],
            Layer::Comment => &self.c_in[id.index()],
        }
    }

    pub fn has_edge(&self, layer: Layer, from: NodeId, to: NodeId) -> bool {
        self.out_neighbors(layer, from).contains(&to)
    }

    pub fn edge_count(&self, layer: Layer) -> usize {
        match layer {
            Layer::Relationship => self.r_out.iter().map(Vec::len).sum(),
            Layer::Comment => self.c_out.iter().map(Vec::len).sum(),
        }
    }

    /// Edges of a layer ordered by source, then by insertion order.
    pub fn edges(&self, layer: Layer) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let adj = match layer {
            Layer::Relationship => &self.r_out,
            Layer::Comment => &self.c_out,
        };
        adj.iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&t| (NodeId::from(s), t)))
    }

    /// Total relationship degree (in + out) of a node.
    #[inline]
    pub fn relationship_degree(&self, id: NodeId) -> usize {
        self.r_out[id.index()].len() + self.r_in[id.index()].len()
    }

    /// Insert a relationship edge. Returns `false` when the ordered pair exists.
    pub fn add_relationship_edge(&mut self, from: NodeId, to: NodeId) -> Result<bool> {
        self.check(from)?;
        self.check(to)?;
        if from == to {
            return Err(Error::SelfLoop(from.index()));
        }
        if self.has_edge(Layer::Relationship, from, to) {
            return Ok(false);
        }
        self.r_out[from.index()].push(to);
        self.r_in[to.index()].push(from);
        Ok(true)
    }

    /// Replace relationship edge `from -> old` with `from -> new`.
    pub(crate) fn retarget_relationship_edge(&mut self, from: NodeId, old: NodeId, new: NodeId) {
        let out = &mut self.r_out[from.index()];
        if let Some(slot) = out.iter_mut().find(|t| **t == old) {
            *slot = new;
        }
        let inc = &mut self.r_in[old.index()];
        if let Some(pos) = inc.iter().position(|s| *s == from) {
            inc.swap_remove(pos);
        }
        self.r_in[new.index()].push(from);
    }

    /// Add the comment edge `commenter -> parent` unless it already exists.
    /// Repeat comments on the same post author are ignored.
    pub fn add_comment_edge(&mut self, commenter: NodeId, parent: NodeId) -> Result<bool> {
        self.check(commenter)?;
        self.check(parent)?;
        if commenter == parent {
            return Err(Error::SelfLoop(commenter.index()));
        }
        if self.has_edge(Layer::Comment, commenter, parent) {
            return Ok(false);
        }
        self.c_out[commenter.index()].push(parent);
        self.c_in[parent.index()].push(commenter);
        Ok(true)
    }

    pub fn degree(&self, layer: Layer, direction: Direction, id: NodeId) -> usize {
        match direction {
            Direction::In => self.in_neighbors(layer, id).len(),
            Direction::Out => self.out_neighbors(layer, id).len(),
            Direction::Total => {
                self.in_neighbors(layer, id).len() + self.out_neighbors(layer, id).len()
            }
        }
    }
}

/// Exact degree statistics over one layer and direction.
pub fn degree_stats(graph: &SocialGraph, layer: Layer, direction: Direction) -> DegreeStats {
    let mut histogram = BTreeMap::new();
    let mut sum = 0usize;
    let mut max = 0usize;
    for id in graph.nodes() {
        let d = graph.degree(layer, direction, id);
        sum += d;
        max = max.max(d);
        *histogram.entry(d).or_insert(0) += 1;
    }
    let mean_degree = if graph.is_empty() {
        0.0
    } else {
        sum as f64 / graph.len() as f64
    };
    DegreeStats {
        mean_degree,
        max_degree: max,
        histogram,
    }
}

fn sample_open<R: Rng + ?Sized>(dist: &Normal<f64>, lo: f64, hi: f64, rng: &mut R) -> f64 {
    loop {
        let x = dist.sample(rng);
        if x > lo && x < hi {
            return x;
        }
    }
}

/// Draw node attributes: viewpoint and faith from N(1/2, 1/4) restricted to
/// (0,1), emotion from N(0,1) restricted to (-1,1). Out-of-range draws are
/// redrawn so the density shape inside the interval is preserved.
pub fn sample_attributes_with<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<Vec<NodeAttributes>> {
    if n == 0 {
        return Err(Error::EmptyInput("attribute sampling needs n >= 1"));
    }
    let unit = Normal::new(0.5, 0.25).expect("valid normal");
    let standard = Normal::new(0.0, 1.0).expect("valid normal");
    Ok((0..n)
        .map(|_| {
            let viewpoint = sample_open(&unit, 0.0, 1.0, rng);
            let emotion = sample_open(&standard, -1.0, 1.0, rng);
            let faith = sample_open(&unit, 0.0, 1.0, rng);
            NodeAttributes {
                viewpoint,
                emotion,
                faith,
            }
        })
        .collect())
}

pub fn sample_attributes(n: usize, seed: u64) -> Result<Vec<NodeAttributes>> {
    sample_attributes_with(n, &mut rng_from_seed(seed))
}

/// Size of the complete seed graph used by [`generate_ba`].
pub fn ba_seed_size(target_mean_degree: f64) -> usize {
    ((target_mean_degree / 2.0).ceil() as usize + 1).max(3)
}

/// Preferential-attachment graph. Each new node links to `floor(k/2)` or
/// `ceil(k/2)` existing nodes (Bernoulli on the fractional part of `k/2`),
/// chosen with probability proportional to current degree. Edges point from
/// the new node to the existing one.
pub fn generate_ba(n: usize, target_mean_degree: f64, seed: u64) -> Result<SocialGraph> {
    if n < 3 {
        return Err(Error::param("n", format!("BA needs n >= 3, got {n}")));
    }
    if target_mean_degree.is_nan() || target_mean_degree < 2.0 {
        return Err(Error::param(
            "target_mean_degree",
            format!("must be >= 2, got {target_mean_degree}"),
        ));
    }
    if target_mean_degree >= n as f64 {
        return Err(Error::param(
            "target_mean_degree",
            format!("{target_mean_degree} must be below n = {n}"),
        ));
    }

    let mut rng = rng_from_seed(seed);
    let attributes = sample_attributes_with(n, &mut rng)?;
    let mut g = SocialGraph::from_attributes(attributes);

    let seed_size = ba_seed_size(target_mean_degree).min(n);
    // one entry per edge endpoint, so uniform draws are degree-proportional
    let mut endpoints: Vec<NodeId> =
        Vec::with_capacity((n as f64 * target_mean_degree) as usize + 8);
    for new in 1..seed_size {
        for old in 0..new {
            g.add_relationship_edge(NodeId::from(new), NodeId::from(old))?;
            endpoints.push(NodeId::from(new));
            endpoints.push(NodeId::from(old));
        }
    }

    let half = target_mean_degree / 2.0;
    let lo = half.floor() as usize;
    let frac = half - half.floor();
    let mut chosen: Vec<NodeId> = Vec::with_capacity(lo + 1);
    for new in seed_size..n {
        let m = if frac > 0.0 && rng.random::<f64>() < frac {
            lo + 1
        } else {
            lo
        };
        let m = m.min(new);
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        let new_id = NodeId::from(new);
        for &t in &chosen {
            g.add_relationship_edge(new_id, t)?;
            endpoints.push(new_id);
            endpoints.push(t);
        }
    }
    Ok(g)
}

/// Watts-Strogatz small world: ring lattice where each node links to its
/// `ring_degree / 2` clockwise neighbours, then every lattice edge has its
/// far end moved with probability `rewire_beta` to a uniformly chosen node
/// that is not already adjacent.
pub fn generate_ws(
    n: usize,
    ring_degree: usize,
    rewire_beta: f64,
    seed: u64,
) -> Result<SocialGraph> {
    if !ring_degree.is_multiple_of(2) {
        return Err(Error::param(
            "ring_degree",
            format!("must be even, got {ring_degree}"),
        ));
    }
    if ring_degree >= n {
        return Err(Error::param(
            "ring_degree",
            format!("{ring_degree} must be below n = {n}"),
        ));
    }
    if !(0.0..=1.0).contains(&rewire_beta) {
        return Err(Error::param(
            "ws_beta",
            format!("must be in [0,1], got {rewire_beta}"),
        ));
    }

    let mut rng = rng_from_seed(seed);
    let attributes = sample_attributes_with(n, &mut rng)?;
    let mut g = SocialGraph::from_attributes(attributes);

    let half = ring_degree / 2;
    for i in 0..n {
        for j in 1..=half {
            g.add_relationship_edge(NodeId::from(i), NodeId::from((i + j) % n))?;
        }
    }
    if rewire_beta == 0.0 {
        return Ok(g);
    }

    let lattice: Vec<(NodeId, NodeId)> = g.edges(Layer::Relationship).collect();
    for (s, t) in lattice {
        if rng.random::<f64>() >= rewire_beta {
            continue;
        }
        // saturated node: nothing to move to
        if g.relationship_degree(s) >= n - 1 {
            continue;
        }
        let new_t = loop {
            let c = NodeId::from(rng.random_range(0..n));
            if c != s
                && !g.has_edge(Layer::Relationship, s, c)
                && !g.has_edge(Layer::Relationship, c, s)
            {
                break c;
            }
        };
        g.retarget_relationship_edge(s, t, new_t);
    }
    Ok(g)
}
