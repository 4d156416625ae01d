//! Viewpoint-similarity recommendation under a global accuracy level, and
//! the relationship-edge rewiring it drives.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Layer, NodeId, SocialGraph};

/// Global recommendation accuracy in `[0,1]`. Higher values keep a narrower,
/// more viewpoint-similar slice of the candidates.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct RecommendationAccuracy(f64);

impl RecommendationAccuracy {
    pub fn new(ra: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&ra) {
            Ok(RecommendationAccuracy(ra))
        } else {
            Err(Error::param("ra", format!("must be in [0,1], got {ra}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `floor(total * (1 - ra))`. The 1e-9 guard keeps decimal accuracies such
    /// as 0.9 from losing a whole candidate to binary rounding.
    pub fn keep_count(self, total: usize) -> usize {
        let k = (total as f64 * (1.0 - self.0) + 1e-9).floor() as usize;
        k.min(total)
    }
}

#[inline]
fn closeness_key(graph: &SocialGraph, anchor_p: f64, c: NodeId) -> (f64, NodeId) {
    ((anchor_p - graph.viewpoint(c)).abs(), c)
}

#[inline]
fn cmp_key(a: &(f64, NodeId), b: &(f64, NodeId)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Keep the `floor(|candidates| * (1 - ra))` candidates whose viewpoint is
/// closest to the anchor's, nearest first. Equal distances go to the lower id.
pub fn viewpoint_filter(
    graph: &SocialGraph,
    anchor: NodeId,
    candidates: &[NodeId],
    ra: RecommendationAccuracy,
) -> Vec<NodeId> {
    let anchor_p = graph.viewpoint(anchor);
    let mut keyed: Vec<(f64, NodeId)> = candidates
        .iter()
        .filter(|&&c| c != anchor)
        .map(|&c| closeness_key(graph, anchor_p, c))
        .collect();
    let k = ra.keep_count(keyed.len());
    keyed.sort_unstable_by(cmp_key);
    keyed.truncate(k);
    keyed.into_iter().map(|(_, c)| c).collect()
}

/// Nodes sorted by viewpoint. The `k` nodes most similar to an anchor are a
/// run on each side of the anchor's slot, so a window is found by binary
/// search instead of a full sort.
#[derive(Clone, Debug)]
pub struct ViewpointIndex {
    order: Vec<NodeId>,
    rank: Vec<usize>,
}

/// `left` nodes taken walking down from the anchor's slot, `right` walking up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pos: usize,
    left: usize,
    right: usize,
}

impl Window {
    pub fn len(&self) -> usize {
        self.left + self.right
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ViewpointIndex {
    pub fn new(graph: &SocialGraph) -> Self {
        let mut order: Vec<NodeId> = graph.nodes().collect();
        order.sort_by(|&a, &b| {
            graph
                .viewpoint(a)
                .total_cmp(&graph.viewpoint(b))
                .then(a.cmp(&b))
        });
        let mut rank = vec![0; order.len()];
        for (r, id) in order.iter().enumerate() {
            rank[id.index()] = r;
        }
        ViewpointIndex { order, rank }
    }

    /// Window holding exactly the `k` most similar nodes to `anchor`, or
    /// `None` when a distance tie sits on the window boundary (the caller
    /// then falls back to [`viewpoint_filter`]).
    pub fn nearest(&self, graph: &SocialGraph, anchor: NodeId, k: usize) -> Option<Window> {
        let pos = self.rank[anchor.index()];
        let nl = pos;
        let nr = self.order.len() - pos - 1;
        let k = k.min(nl + nr);
        let p = graph.viewpoint(anchor);
        let dl = |i: usize| (p - graph.viewpoint(self.order[pos - 1 - i])).abs();
        let dr = |j: usize| (p - graph.viewpoint(self.order[pos + 1 + j])).abs();

        let (mut lo, mut hi) = (k.saturating_sub(nr), k.min(nl));
        while lo < hi {
            let a = (lo + hi) / 2;
            let b = k - a;
            if b > 0 && a < nl && dl(a) < dr(b - 1) {
                lo = a + 1;
            } else {
                hi = a;
            }
        }
        let (a, b) = (lo, k - lo);

        let strict = |x: f64, y: f64| x < y;
        let ok = (a == 0 || a == nl || strict(dl(a - 1), dl(a)))
            && (b == 0 || b == nr || strict(dr(b - 1), dr(b)))
            && (a == 0 || b == nr || strict(dl(a - 1), dr(b)))
            && (b == 0 || a == nl || strict(dr(b - 1), dl(a)));
        ok.then_some(Window {
            pos,
            left: a,
            right: b,
        })
    }

    #[inline]
    pub fn nth(&self, w: &Window, r: usize) -> NodeId {
        if r < w.left {
            self.order[w.pos - 1 - r]
        } else {
            self.order[w.pos + 1 + (r - w.left)]
        }
    }

    #[inline]
    pub fn contains(&self, w: &Window, id: NodeId) -> bool {
        let r = self.rank[id.index()];
        match r.cmp(&w.pos) {
            Ordering::Less => w.pos - r <= w.left,
            Ordering::Greater => r - w.pos <= w.right,
            Ordering::Equal => false,
        }
    }

    pub fn members(&self, w: &Window) -> Vec<NodeId> {
        (0..w.len()).map(|r| self.nth(w, r)).collect()
    }
}

fn pick_uniform<R: Rng + ?Sized>(
    index: &ViewpointIndex,
    w: &Window,
    excluded: &[NodeId],
    rng: &mut R,
) -> Option<NodeId> {
    let blocked = excluded.iter().filter(|&&z| index.contains(w, z)).count();
    let eligible = w.len() - blocked;
    if eligible == 0 {
        return None;
    }
    if eligible * 2 >= w.len() {
        loop {
            let c = index.nth(w, rng.random_range(0..w.len()));
            if !excluded.contains(&c) {
                return Some(c);
            }
        }
    }
    let pool: Vec<NodeId> = index
        .members(w)
        .into_iter()
        .filter(|c| !excluded.contains(c))
        .collect();
    Some(pool[rng.random_range(0..pool.len())])
}

/// Rewire relationship edges. Every edge `(x, y)` present at the start of the
/// call is independently selected with probability `lambda`; a selected edge
/// moves to a uniform draw from `viewpoint_filter(x, all others, ra)` minus
/// `y` and minus `x`'s current out-neighbours. Edges with no eligible
/// replacement stay put. Returns the number of edges moved.
pub fn rewire_step<R: Rng + ?Sized>(
    graph: &mut SocialGraph,
    lambda: f64,
    ra: RecommendationAccuracy,
    rng: &mut R,
) -> usize {
    if lambda <= 0.0 || graph.len() < 2 {
        return 0;
    }
    let index = ViewpointIndex::new(graph);
    rewire_with_index(graph, &index, lambda, ra, rng)
}

pub(crate) fn rewire_with_index<R: Rng + ?Sized>(
    graph: &mut SocialGraph,
    index: &ViewpointIndex,
    lambda: f64,
    ra: RecommendationAccuracy,
    rng: &mut R,
) -> usize {
    if lambda <= 0.0 || graph.len() < 2 {
        return 0;
    }
    let k = ra.keep_count(graph.len() - 1);
    let edges: Vec<(NodeId, NodeId)> = graph.edges(Layer::Relationship).collect();
    let mut rewired = 0;
    for (x, y) in edges {
        if rng.random::<f64>() >= lambda || k == 0 {
            continue;
        }
        let excluded = graph.out_neighbors(Layer::Relationship, x);
        let pick = match index.nearest(graph, x, k) {
            Some(w) => pick_uniform(index, &w, excluded, rng),
            None => {
                let all: Vec<NodeId> = graph.nodes().filter(|&c| c != x).collect();
                let pool: Vec<NodeId> = viewpoint_filter(graph, x, &all, ra)
                    .into_iter()
                    .filter(|c| !excluded.contains(c))
                    .collect();
                (!pool.is_empty()).then(|| pool[rng.random_range(0..pool.len())])
            }
        };
        if let Some(y_new) = pick {
            graph.retarget_relationship_edge(x, y, y_new);
            rewired += 1;
        }
    }
    rewired
}
