//! Hidden comment-area cocoons.
//!
//! When a published node reaches one of its neighbours, the neighbour is
//! virtually exposed to everyone who has commented on that node's post (the
//! comment area). Recommendation then narrows that area to the commenters
//! whose viewpoints sit closest to the neighbour's. Neither the full area nor
//! the filtered subset is stored as edges; both are derived from the comment
//! layer on demand.

use crate::graph::{Layer, NodeId, SocialGraph};
use crate::recommend::{viewpoint_filter, RecommendationAccuracy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommentArea {
    pub source: NodeId,
    pub commenters: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocoonStructure {
    pub source: NodeId,
    pub target: NodeId,
    /// Commenters left visible to `target`, most similar first.
    pub filtered_commenters: Vec<NodeId>,
}

/// Everyone with a comment edge pointing at `source`.
pub fn comment_area(graph: &SocialGraph, source: NodeId) -> CommentArea {
    CommentArea {
        source,
        commenters: graph.in_neighbors(Layer::Comment, source).to_vec(),
    }
}

/// Narrow a comment area to what `target` gets to see. The target never sees
/// its own comment.
pub fn filter_cocoon(
    area: &CommentArea,
    target: NodeId,
    graph: &SocialGraph,
    ra: RecommendationAccuracy,
) -> Vec<NodeId> {
    let candidates: Vec<NodeId> = area
        .commenters
        .iter()
        .copied()
        .filter(|&c| c != target)
        .collect();
    viewpoint_filter(graph, target, &candidates, ra)
}

pub fn build_hcac(
    graph: &SocialGraph,
    source: NodeId,
    target: NodeId,
    ra: RecommendationAccuracy,
) -> CocoonStructure {
    let area = comment_area(graph, source);
    let filtered_commenters = filter_cocoon(&area, target, graph, ra);
    CocoonStructure {
        source,
        target,
        filtered_commenters,
    }
}
