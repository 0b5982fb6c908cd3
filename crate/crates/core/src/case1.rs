//! The many-leaf case. A block of leaves is set aside; their parents (and the
//! closure needed to make the parent forest hang together) are pinned into
//! the high-degree set H, the rest of the tree is embedded top-down through
//! G', and the reserved leaves are greedily attached at the very end — their
//! parents sit on degree ≥ k vertices, so room is guaranteed in the regime.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::VertexSet;
use crate::classify::Classification;
use crate::embedding::PartialEmbedding;
use crate::engine::{place_lowest, FailureTrace, Phase, TraceEvent};
use crate::graph::Graph;
use crate::params::ParameterSet;
use crate::tree::RootedTree;

/// Tree-vertex sets of the leaf apparatus. All sets live over tree ids.
#[derive(Clone, Debug)]
pub struct LeafApparatus {
    /// The reserved leaves (never the root).
    pub leaves: Vec<usize>,
    /// Parents of the reserved leaves.
    pub p1: VertexSet,
    /// Closure of `p1 ∪ {root}` under "two children already inside".
    pub p2: VertexSet,
    /// Parents of p2-vertices.
    pub p3: VertexSet,
}

/// Leaf count here is the unrooted one (a degree-1 root counts).
pub fn has_many_leaves(t: &RootedTree, k: usize, params: &ParameterSet) -> bool {
    debug_assert_eq!(t.edge_count(), k);
    t.leaf_count() >= params.leaf_threshold(k)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LeafChoice {
    /// Lowest-id leaves; the reproducible default.
    #[default]
    Lowest,
    /// Uniform sample, for fuzzing.
    Sampled,
}

pub fn build_leaf_apparatus(
    t: &RootedTree,
    k: usize,
    params: &ParameterSet,
    choice: LeafChoice,
    rng: &mut impl Rng,
) -> LeafApparatus {
    let n = t.vertex_count();
    // Only non-root leaves can be deferred: the reserved block is embedded
    // through parents, and the root has none.
    let mut pool: Vec<usize> = t.leaves().filter(|&v| v != t.root()).collect();
    let want = params.leaf_threshold(k).min(pool.len());
    let leaves: Vec<usize> = match choice {
        LeafChoice::Lowest => pool[..want].to_vec(),
        LeafChoice::Sampled => {
            pool.shuffle(rng);
            let mut chosen = pool[..want].to_vec();
            chosen.sort_unstable();
            chosen
        }
    };

    let mut p1 = VertexSet::empty(n);
    for &l in &leaves {
        p1.insert(t.parent(l).expect("non-root leaf has a parent"));
    }

    let mut p2 = p1.clone();
    p2.insert(t.root());
    // closure: counting children inside p2, a queue of vertices crossing 2
    let mut inside_children = vec![0usize; n];
    let mut queue: Vec<usize> = Vec::new();
    for v in p2.iter() {
        if let Some(p) = t.parent(v) {
            inside_children[p] += 1;
            if inside_children[p] == 2 && !p2.contains(p) {
                queue.push(p);
            }
        }
    }
    while let Some(v) = queue.pop() {
        if !p2.insert(v) {
            continue;
        }
        if let Some(p) = t.parent(v) {
            inside_children[p] += 1;
            if inside_children[p] == 2 && !p2.contains(p) {
                queue.push(p);
            }
        }
    }

    let mut p3 = VertexSet::empty(n);
    for v in p2.iter() {
        if let Some(p) = t.parent(v) {
            p3.insert(p);
        }
    }

    LeafApparatus { leaves, p1, p2, p3 }
}

#[derive(Clone, Debug, Default)]
pub struct Case1Counts {
    pub anchors: usize,
    pub interior: usize,
    pub leaves: usize,
}

/// Runs the three phases. On success the embedding is total and valid by
/// construction; every phase exhaustion returns a trace.
pub fn embed_case1(
    g: &Graph,
    t: &RootedTree,
    class: &Classification,
    app: &LeafApparatus,
    trace: &mut Vec<TraceEvent>,
) -> Result<(PartialEmbedding, Case1Counts), FailureTrace> {
    let n = g.vertex_count();
    let mut emb = PartialEmbedding::new(t.vertex_count(), n);
    let mut counts = Case1Counts::default();
    let leaf_set = VertexSet::from_iter(t.vertex_count(), app.leaves.iter().copied());

    // Phase (i): T[P2] into H, each vertex adjacent to its embedded
    // P2-parent. Prefer H \ S' so phase (ii) keeps the G' degree guarantee.
    let h_preferred = class.high.difference(&class.s_prime);
    let h_rest = class.high.intersection(&class.s_prime);
    for v in t.bfs_order() {
        if !app.p2.contains(v) {
            continue;
        }
        match place_lowest(g, t, &mut emb, v, &h_preferred, Phase::Case1Anchors, trace) {
            Ok(_) => {}
            Err(_) => {
                // fall back to the H ∩ S' overflow before giving up
                place_lowest(g, t, &mut emb, v, &h_rest, Phase::Case1Anchors, trace)?;
            }
        }
        counts.anchors += 1;
    }

    // Phase (ii): the rest of T - L, top-down through G'. A vertex with a
    // child pinned in phase (i) is double-constrained (its pool is a common
    // neighbourhood), which is the P3 step.
    for v in t.bfs_order() {
        if app.p2.contains(v) || leaf_set.contains(v) {
            continue;
        }
        place_lowest(
            g,
            t,
            &mut emb,
            v,
            &class.g_prime,
            Phase::Case1Interior,
            trace,
        )?;
        debug_assert!(!class.s_prime.contains(emb.image_of(v).unwrap()));
        counts.interior += 1;
    }
    debug_assert_eq!(
        emb.placed_count(),
        t.vertex_count() - app.leaves.len(),
        "everything but the reserved leaves is embedded before phase (iii)"
    );

    // Phase (iii): reserved leaves, greedily anywhere in G.
    let everything = VertexSet::full(n);
    for &l in &app.leaves {
        place_lowest(g, t, &mut emb, l, &everything, Phase::Case1Leaves, trace)?;
        counts.leaves += 1;
    }

    debug_assert!(emb.is_total());
    Ok((emb, counts))
}
