//! Shared machinery of the two embedding cases: anchored candidate pools and
//! the failure-trace type every phase reports through.
//!
//! A placement is always "lowest host id adjacent to the images of all
//! already-embedded tree neighbours, inside the phase's pool". Validity of
//! the final embedding is therefore maintained by construction; a phase that
//! runs out of candidates fails loudly with a trace, never silently.

use serde::Serialize;

use crate::bits::VertexSet;
use crate::embedding::PartialEmbedding;
use crate::graph::Graph;
use crate::tree::RootedTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Case1Anchors,
    Case1Interior,
    Case1Leaves,
    Case2D1,
    Case2Split,
    Case2SPrimeFill,
    Case2R1,
    Case2Sample,
    Case2Walk,
    Case2PathEnd,
    Case2Endgame,
    Case2Final,
}

/// Exhaustion record: which phase gave up on which tree vertex, how many
/// candidates it saw, and how much of the host was used at that point.
#[derive(Clone, Debug, Serialize)]
pub struct FailureTrace {
    pub phase: Phase,
    pub tree_vertex: Option<usize>,
    pub candidates: usize,
    pub used: usize,
    pub note: Option<String>,
}

impl FailureTrace {
    pub fn exhausted(phase: Phase, tree_vertex: usize, used: usize) -> Self {
        FailureTrace {
            phase,
            tree_vertex: Some(tree_vertex),
            candidates: 0,
            used,
            note: None,
        }
    }

    pub fn note(phase: Phase, note: impl Into<String>, used: usize) -> Self {
        FailureTrace {
            phase,
            tree_vertex: None,
            candidates: 0,
            used,
            note: Some(note.into()),
        }
    }
}

/// One step of a run, recorded under `--trace`.
#[derive(Clone, Debug, Serialize)]
pub struct TraceEvent {
    pub phase: Phase,
    pub tree_vertex: usize,
    pub host_vertex: usize,
    pub pool_size: usize,
}

/// `pool ∖ used`, intersected with the host neighbourhood of every embedded
/// tree neighbour of `tv`.
pub fn anchored_pool(
    g: &Graph,
    t: &RootedTree,
    emb: &PartialEmbedding,
    tv: usize,
    pool: &VertexSet,
) -> VertexSet {
    let mut out = pool.clone();
    out.subtract(emb.used());
    for nb in t.neighbors(tv) {
        if let Some(h) = emb.image_of(nb) {
            out.intersect_with(g.neighbors(h));
        }
    }
    out
}

/// Images of the embedded tree neighbours of `tv`.
pub fn embedded_anchor_images(t: &RootedTree, emb: &PartialEmbedding, tv: usize) -> Vec<usize> {
    t.neighbors(tv).filter_map(|nb| emb.image_of(nb)).collect()
}

/// Places `tv` on the lowest-id candidate, or fails with a trace.
pub fn place_lowest(
    g: &Graph,
    t: &RootedTree,
    emb: &mut PartialEmbedding,
    tv: usize,
    pool: &VertexSet,
    phase: Phase,
    trace: &mut Vec<TraceEvent>,
) -> Result<usize, FailureTrace> {
    let candidates = anchored_pool(g, t, emb, tv, pool);
    match candidates.min() {
        Some(hv) => {
            emb.place(tv, hv);
            trace.push(TraceEvent {
                phase,
                tree_vertex: tv,
                host_vertex: hv,
                pool_size: candidates.len(),
            });
            Ok(hv)
        }
        None => Err(FailureTrace::exhausted(phase, tv, emb.used().len())),
    }
}
