//! Exact tree-containment oracle: backtracking search specialized to trees.
//!
//! The oracle serves three duties: it discharges the dense-spot step (where
//! the spanning-tree theorem would apply), it is the ground truth for fuzzing
//! the greedy engine, and it powers exhaustive conjecture verification at
//! tiny scale. Decisions are deterministic; the pruning rules only change the
//! node counts, never the answer.

use std::time::{Duration, Instant};

use crate::bits::VertexSet;
use crate::embedding::PartialEmbedding;
use crate::graph::Graph;
use crate::tree::RootedTree;

#[derive(Clone, Debug)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub max_depth: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub enum Containment {
    /// A total valid embedding.
    Embedded(PartialEmbedding),
    /// Exhaustive search proved there is none.
    Absent,
    /// Deadline hit before the search finished; explicitly not a "no".
    Indeterminate,
}

impl Containment {
    pub fn is_embedded(&self) -> bool {
        matches!(self, Containment::Embedded(_))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    pub deadline: Option<Duration>,
    /// Candidate filtering by free-neighbourhood capacity. Sound: disabling
    /// it changes stats only.
    pub prune: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            deadline: None,
            prune: true,
        }
    }
}

/// Static assignment order: BFS from a centroid, children visited
/// largest-subtree-first. Fail-fast and decision-invariant.
struct SearchOrder {
    /// Tree vertices in assignment order.
    order: Vec<usize>,
    /// For position i > 0, the position of the ordered parent.
    parent_pos: Vec<Option<usize>>,
    /// Number of still-unassigned tree neighbours at each position.
    pending_need: Vec<usize>,
}

fn search_order(t: &RootedTree) -> SearchOrder {
    let rooted = if t.vertex_count() > 1 {
        t.rerooted(t.centroid())
    } else {
        t.clone()
    };
    let sizes = rooted.subtree_sizes();
    let n = rooted.vertex_count();
    let mut order = Vec::with_capacity(n);
    let mut pos_of = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::from([rooted.root()]);
    while let Some(v) = queue.pop_front() {
        pos_of[v] = order.len();
        order.push(v);
        let mut kids: Vec<usize> = rooted.children(v).to_vec();
        kids.sort_by_key(|&c| (std::cmp::Reverse(sizes[c]), c));
        queue.extend(kids);
    }
    let parent_pos = order
        .iter()
        .map(|&v| rooted.parent(v).map(|p| pos_of[p]))
        .collect();
    // In BFS order the unassigned neighbours of v at assignment time are
    // exactly its children in the re-rooted tree.
    let pending_need = order.iter().map(|&v| rooted.children(v).len()).collect();
    SearchOrder {
        order,
        parent_pos,
        pending_need,
    }
}

pub fn contains_tree_exact(
    g: &Graph,
    t: &RootedTree,
    deadline: Option<Duration>,
) -> (Containment, SearchStats) {
    contains_tree_exact_with(
        g,
        t,
        OracleOptions {
            deadline,
            prune: true,
        },
    )
}

pub fn contains_tree_exact_with(
    g: &Graph,
    t: &RootedTree,
    opts: OracleOptions,
) -> (Containment, SearchStats) {
    let start = Instant::now();
    let mut stats = SearchStats {
        nodes_expanded: 0,
        max_depth: 0,
        elapsed: Duration::ZERO,
    };
    if t.vertex_count() > g.vertex_count() {
        stats.elapsed = start.elapsed();
        return (Containment::Absent, stats);
    }
    let ord = search_order(t);
    let mut emb = PartialEmbedding::new(t.vertex_count(), g.vertex_count());
    let mut images = vec![usize::MAX; ord.order.len()];
    let outcome = assign(g, &ord, &opts, start, &mut emb, &mut images, 0, &mut stats);
    stats.elapsed = start.elapsed();
    match outcome {
        Assign::Found => {
            // re-index images from order positions to tree vertices
            let mut total = PartialEmbedding::new(t.vertex_count(), g.vertex_count());
            for (pos, &tv) in ord.order.iter().enumerate() {
                total.place(tv, images[pos]);
            }
            (Containment::Embedded(total), stats)
        }
        Assign::Exhausted => (Containment::Absent, stats),
        Assign::DeadlineHit => (Containment::Indeterminate, stats),
    }
}

enum Assign {
    Found,
    Exhausted,
    DeadlineHit,
}

#[allow(clippy::too_many_arguments)]
fn assign(
    g: &Graph,
    ord: &SearchOrder,
    opts: &OracleOptions,
    start: Instant,
    emb: &mut PartialEmbedding,
    images: &mut Vec<usize>,
    pos: usize,
    stats: &mut SearchStats,
) -> Assign {
    if pos == ord.order.len() {
        return Assign::Found;
    }
    if let Some(deadline) = opts.deadline {
        if stats.nodes_expanded.is_multiple_of(1024) && start.elapsed() > deadline {
            return Assign::DeadlineHit;
        }
    }
    let candidates: VertexSet = match ord.parent_pos[pos] {
        None => emb.used().complement(),
        Some(pp) => {
            let mut c = g.neighbors(images[pp]).clone();
            c.subtract(emb.used());
            c
        }
    };
    let tv = ord.order[pos];
    for hv in candidates.iter() {
        if opts.prune {
            // hv must still have room for tv's unassigned tree neighbours
            let free_neighbors = g.degree(hv) - g.neighbors(hv).intersection_len(emb.used());
            if free_neighbors < ord.pending_need[pos] {
                continue;
            }
        }
        stats.nodes_expanded += 1;
        stats.max_depth = stats.max_depth.max(pos + 1);
        emb.place(tv, hv);
        images[pos] = hv;
        match assign(g, ord, opts, start, emb, images, pos + 1, stats) {
            Assign::Exhausted => {
                emb.unplace(tv);
            }
            found_or_deadline => return found_or_deadline,
        }
    }
    Assign::Exhausted
}

/// Independent ground truth: enumerates every injection of V(T) into V(G)
/// in plain id order and checks all tree edges only on complete assignments.
/// No ordering heuristics, no pruning; deliberately separate from the
/// backtracking path above.
pub fn naive_contains(g: &Graph, t: &RootedTree) -> bool {
    let tn = t.vertex_count();
    let gn = g.vertex_count();
    if tn > gn {
        return false;
    }
    let edges = t.edges();
    let mut map = vec![usize::MAX; tn];
    let mut used = vec![false; gn];
    fn rec(
        tv: usize,
        tn: usize,
        gn: usize,
        edges: &[(usize, usize)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        g: &Graph,
    ) -> bool {
        if tv == tn {
            return edges.iter().all(|&(u, v)| g.has_edge(map[u], map[v]));
        }
        for hv in 0..gn {
            if used[hv] {
                continue;
            }
            used[hv] = true;
            map[tv] = hv;
            if rec(tv + 1, tn, gn, edges, map, used, g) {
                return true;
            }
            used[hv] = false;
        }
        false
    }
    rec(0, tn, gn, &edges, &mut map, &mut used, g)
}
