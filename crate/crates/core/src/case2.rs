//! The few-leaf case. Vertices of degree ≠ 2 and an early block of degree-2
//! paths are embedded into G' first, consuming all of S' via every third path
//! position; the remaining paths are then threaded along a random permutation
//! of the unused host, with certified conditions (A) and (B), and the tail is
//! finished through a reserved set of well-connected vertices.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::bits::VertexSet;
use crate::classify::Classification;
use crate::embedding::PartialEmbedding;
use crate::engine::{
    anchored_pool, embedded_anchor_images, place_lowest, FailureTrace, Phase, TraceEvent,
};
use crate::graph::Graph;
use crate::params::{floor_mul_sqrt, ParameterSet, Rat};
use crate::tree::RootedTree;

/// D1/D2 split and the maximal degree-2 paths.
#[derive(Clone, Debug)]
pub struct PathDecomposition {
    /// Tree vertices of degree ≠ 2.
    pub d1: VertexSet,
    /// Tree vertices of degree exactly 2.
    pub d2: VertexSet,
    /// Components of `T[D2]`, each an ordered path. Discovery order by lowest
    /// member id; each path oriented from its lower-id endpoint.
    pub paths: Vec<Vec<usize>>,
}

pub fn decompose_degree2(t: &RootedTree) -> PathDecomposition {
    let n = t.vertex_count();
    let d2 = VertexSet::from_iter(n, (0..n).filter(|&v| t.degree(v) == 2));
    let d1 = d2.complement();
    let mut seen = VertexSet::empty(n);
    let mut paths = Vec::new();
    for start in d2.iter() {
        if seen.contains(start) {
            continue;
        }
        // collect the component of start inside D2
        let mut comp = vec![start];
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in t.neighbors(v) {
                if d2.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        // orient from the lower-id endpoint (≤ 1 in-component neighbour)
        let in_comp = VertexSet::from_iter(n, comp.iter().copied());
        let ends: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|&v| t.neighbors(v).filter(|&w| in_comp.contains(w)).count() <= 1)
            .collect();
        let first = ends.iter().copied().min().expect("path has an endpoint");
        let mut ordered = vec![first];
        let mut prev = usize::MAX;
        let mut cur = first;
        while ordered.len() < comp.len() {
            let next = t
                .neighbors(cur)
                .find(|&w| in_comp.contains(w) && w != prev)
                .expect("interior path vertex has a successor");
            ordered.push(next);
            prev = cur;
            cur = next;
        }
        paths.push(ordered);
    }
    PathDecomposition { d1, d2, paths }
}

/// The early/late split of the degree-2 paths.
#[derive(Clone, Debug)]
pub struct SplitPaths {
    /// Early block, covering exactly the target vertex count.
    pub r1: Vec<Vec<usize>>,
    /// Late block, sorted by non-decreasing length (ties by first vertex id).
    pub r2: Vec<Vec<usize>>,
    /// The tree edge cut when trimming the crossing path. It is still an
    /// edge of T: both sides are embedded and validation checks it.
    pub severed: Option<(usize, usize)>,
    /// Vertices covered by `r1`.
    pub covered: usize,
}

/// Takes the minimal prefix of the discovery-ordered paths covering at least
/// `⌊c_r1·√δ·k⌋` vertices, then trims the last path so coverage is exact.
pub fn split_paths(
    d: &PathDecomposition,
    k: usize,
    params: &ParameterSet,
) -> Result<SplitPaths, FailureTrace> {
    let target = params.r1_target(k);
    let total: usize = d.paths.iter().map(Vec::len).sum();
    if total < target {
        return Err(FailureTrace::note(
            Phase::Case2Split,
            format!("degree-2 mass {total} below early-block target {target}"),
            0,
        ));
    }
    let mut r1: Vec<Vec<usize>> = Vec::new();
    let mut r2: Vec<Vec<usize>> = Vec::new();
    let mut severed = None;
    let mut covered = 0usize;
    let mut iter = d.paths.iter();
    if target > 0 {
        for path in iter.by_ref() {
            if covered + path.len() < target {
                covered += path.len();
                r1.push(path.clone());
                continue;
            }
            // this path crosses the target: trim the excess into r2
            let cut = target - covered;
            covered = target;
            if cut == path.len() {
                r1.push(path.clone());
            } else {
                r1.push(path[..cut].to_vec());
                r2.push(path[cut..].to_vec());
                severed = Some((path[cut - 1], path[cut]));
            }
            break;
        }
    }
    r2.extend(iter.cloned());
    r2.sort_by_key(|p| (p.len(), p.first().copied()));
    Ok(SplitPaths {
        r1,
        r2,
        severed,
        covered,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct R1Counts {
    pub d1: usize,
    pub s_prime_fill: usize,
    pub r1_rest: usize,
}

/// Embeds D1 into G' (respecting the tree edges inside D1), fills all of S'
/// with every-third positions of the early paths, and completes the early
/// paths inside G'.
pub fn embed_d1_and_r1(
    g: &Graph,
    t: &RootedTree,
    class: &Classification,
    split: &SplitPaths,
    trace: &mut Vec<TraceEvent>,
) -> Result<(PartialEmbedding, R1Counts), FailureTrace> {
    let mut emb = PartialEmbedding::new(t.vertex_count(), g.vertex_count());
    let mut counts = R1Counts::default();
    let d = decomposed_d1_order(t);

    for tv in d {
        place_lowest(g, t, &mut emb, tv, &class.g_prime, Phase::Case2D1, trace)?;
        counts.d1 += 1;
    }

    // Every-third positions (1-based 2, 5, 8, …; never a path end) across the
    // early paths, in order.
    let x_positions: Vec<usize> = split
        .r1
        .iter()
        .flat_map(|path| (0..path.len() / 3).map(move |i| path[1 + 3 * i]))
        .collect();
    let s_prime_ids = class.s_prime.to_vec();
    if x_positions.len() < s_prime_ids.len() {
        return Err(FailureTrace::note(
            Phase::Case2SPrimeFill,
            format!(
                "only {} every-third slots for {} trim vertices",
                x_positions.len(),
                s_prime_ids.len()
            ),
            emb.used().len(),
        ));
    }
    let x_prime = &x_positions[..s_prime_ids.len()];
    for (&tv, &hv) in x_prime.iter().zip(&s_prime_ids) {
        debug_assert!(
            embedded_anchor_images(t, &emb, tv).is_empty(),
            "every-third slots are isolated at fill time"
        );
        emb.place(tv, hv);
        trace.push(TraceEvent {
            phase: Phase::Case2SPrimeFill,
            tree_vertex: tv,
            host_vertex: hv,
            pool_size: s_prime_ids.len(),
        });
        counts.s_prime_fill += 1;
    }

    let x_prime_set = VertexSet::from_iter(t.vertex_count(), x_prime.iter().copied());
    for path in &split.r1 {
        for &tv in path {
            if x_prime_set.contains(tv) {
                continue;
            }
            let anchors = embedded_anchor_images(t, &emb, tv);
            debug_assert!(
                anchors.len() <= 2,
                "early path vertex with >2 embedded neighbours"
            );
            debug_assert!(
                anchors
                    .iter()
                    .filter(|&&h| class.s_prime.contains(h))
                    .count()
                    <= 1,
                "early path vertex with two trim-set neighbours"
            );
            place_lowest(g, t, &mut emb, tv, &class.g_prime, Phase::Case2R1, trace)?;
            counts.r1_rest += 1;
        }
    }

    debug_assert!(class.s_prime.is_subset(emb.used()));
    Ok((emb, counts))
}

/// D1 in BFS order, so embedded tree neighbours of each new vertex are
/// exactly its earlier D1 neighbours.
fn decomposed_d1_order(t: &RootedTree) -> Vec<usize> {
    t.bfs_order()
        .into_iter()
        .filter(|&v| t.degree(v) != 2)
        .collect()
}

/// A sampled permutation of the unused host with its certification data.
#[derive(Clone, Debug)]
pub struct PermutationSample {
    /// Permutation of `V(G) ∖ used`.
    pub pi: Vec<usize>,
    /// Number of prefix elements (`⌈c_prefix·k⌉`).
    pub prefix_len: usize,
    /// Prefix as a set.
    pub v_pi: VertexSet,
    /// 0-based indices `i` with `pi[i]` not adjacent to `pi[i+1]`, both in
    /// the prefix.
    pub j_pi: Vec<usize>,
    /// Unused high vertices beyond the prefix with few non-neighbours among
    /// the unused part of G' beyond the prefix.
    pub h_pi: VertexSet,
    pub passes_a: bool,
    pub passes_b: bool,
}

pub fn sample_permutation(
    g: &Graph,
    class: &Classification,
    used: &VertexSet,
    k: usize,
    params: &ParameterSet,
    rng: &mut impl Rng,
) -> Result<PermutationSample, FailureTrace> {
    let n = g.vertex_count();
    let mut pi: Vec<usize> = used.complement().to_vec();
    let prefix_len = params.prefix_len(k);
    if pi.len() < prefix_len {
        return Err(FailureTrace::note(
            Phase::Case2Sample,
            format!(
                "prefix {prefix_len} exceeds {} available vertices",
                pi.len()
            ),
            used.len(),
        ));
    }
    pi.shuffle(rng);

    let v_pi = VertexSet::from_iter(n, pi[..prefix_len].iter().copied());
    // consecutive pairs with both endpoints inside the prefix
    let j_pi: Vec<usize> = (0..prefix_len.saturating_sub(1))
        .filter(|&i| !g.has_edge(pi[i], pi[i + 1]))
        .collect();

    // leftover part of G': beyond used and beyond the prefix
    let mut leftover_gprime = class.g_prime.clone();
    leftover_gprime.subtract(used);
    leftover_gprime.subtract(&v_pi);
    let leftover_len = leftover_gprime.len();

    let mut h_pi = VertexSet::empty(n);
    let mut high_free = class.high.clone();
    high_free.subtract(used);
    high_free.subtract(&v_pi);
    for v in high_free.iter() {
        let self_in = usize::from(leftover_gprime.contains(v));
        let non_neighbors = leftover_len - self_in - g.degree_in(v, &leftover_gprime);
        if params.few_nonneighbors(non_neighbors, class.a) {
            h_pi.insert(v);
        }
    }

    let passes_a = params.passes_a(j_pi.len(), k);
    let passes_b = params.passes_b(h_pi.len(), k);
    Ok(PermutationSample {
        pi,
        prefix_len,
        v_pi,
        j_pi,
        h_pi,
        passes_a,
        passes_b,
    })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RetryStats {
    pub attempts: usize,
    pub failed_a: usize,
    pub failed_b: usize,
}

/// Resamples until both conditions hold or the budget is exhausted.
pub fn retry_sample(
    g: &Graph,
    class: &Classification,
    used: &VertexSet,
    k: usize,
    params: &ParameterSet,
    rng: &mut impl Rng,
    budget: usize,
) -> Result<(PermutationSample, RetryStats), FailureTrace> {
    let mut stats = RetryStats::default();
    for attempt in 1..=budget.max(1) {
        stats.attempts = attempt;
        let sample = sample_permutation(g, class, used, k, params, rng)?;
        if !sample.passes_a {
            stats.failed_a += 1;
        }
        if !sample.passes_b {
            stats.failed_b += 1;
        }
        if sample.passes_a && sample.passes_b {
            return Ok((sample, stats));
        }
    }
    Err(FailureTrace::note(
        Phase::Case2Sample,
        format!(
            "no certified permutation in {} attempts (A failed {}, B failed {})",
            stats.attempts, stats.failed_a, stats.failed_b
        ),
        used.len(),
    ))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct WalkLedger {
    pub r2_paths: usize,
    pub r2_vertices: usize,
    pub j_len: usize,
    pub landed: usize,
    pub bridges: usize,
    pub path_ends: usize,
    /// Vertices used by the walk outside the permutation prefix.
    pub off_prefix: usize,
}

/// Threads the late paths along the permutation prefix: each non-final vertex
/// lands on the lowest unused prefix vertex when that vertex fits, otherwise
/// on a bridge (a common neighbour of the blocked prefix vertex and the
/// previous image, off the prefix so the prefix is consumed strictly in
/// order); the final vertex of each path joins its two embedded neighbours
/// through a common neighbour. Stops when the prefix is exhausted and returns
/// the unembedded tails.
#[allow(clippy::too_many_arguments)]
pub fn embed_r2_along_permutation(
    g: &Graph,
    t: &RootedTree,
    class: &Classification,
    sample: &PermutationSample,
    h_prime: &VertexSet,
    emb: &mut PartialEmbedding,
    split: &SplitPaths,
    trace: &mut Vec<TraceEvent>,
) -> Result<(Vec<Vec<usize>>, WalkLedger), FailureTrace> {
    let mut ledger = WalkLedger {
        r2_paths: split.r2.len(),
        r2_vertices: split.r2.iter().map(Vec::len).sum(),
        j_len: sample.j_pi.len(),
        ..WalkLedger::default()
    };

    // Bridges live in G' off the reserved set and off the prefix; path ends
    // anywhere off the reserved set and off the prefix. S' is already fully
    // used, so pools need no explicit trim exclusion.
    let mut bridge_base = class.g_prime.clone();
    bridge_base.subtract(h_prime);
    bridge_base.subtract(&sample.v_pi);
    let mut end_base = VertexSet::full(g.vertex_count());
    end_base.subtract(h_prime);
    end_base.subtract(&sample.v_pi);

    let mut pointer = 0usize;
    let mut prefix_used = 0usize;

    for (path_idx, path) in split.r2.iter().enumerate() {
        for (j, &tv) in path.iter().enumerate() {
            while pointer < sample.prefix_len && emb.used().contains(sample.pi[pointer]) {
                pointer += 1;
            }
            if prefix_used >= sample.prefix_len || pointer >= sample.prefix_len {
                // prefix exhausted: the rest of this path and all later paths
                // form the endgame input
                let mut r3 = vec![path[j..].to_vec()];
                r3.extend(split.r2[path_idx + 1..].iter().cloned());
                return Ok((r3, ledger));
            }
            let anchors = embedded_anchor_images(t, emb, tv);
            if j + 1 == path.len() {
                // final path vertex: common neighbour of its two embedded
                // neighbours, avoiding the reserved set
                debug_assert_eq!(anchors.len(), 2, "path end has two embedded neighbours");
                debug_assert!(
                    anchors.iter().all(|&h| !class.s_prime.contains(h)),
                    "path-end anchors stay clear of the trim set"
                );
                place_lowest(g, t, emb, tv, &end_base, Phase::Case2PathEnd, trace)?;
                ledger.path_ends += 1;
                ledger.off_prefix += 1;
            } else {
                debug_assert_eq!(anchors.len(), 1, "walk vertex has one embedded neighbour");
                let vi = sample.pi[pointer];
                debug_assert!(!h_prime.contains(vi));
                if anchors.iter().all(|&h| g.has_edge(h, vi)) {
                    emb.place(tv, vi);
                    trace.push(TraceEvent {
                        phase: Phase::Case2Walk,
                        tree_vertex: tv,
                        host_vertex: vi,
                        pool_size: 1,
                    });
                    pointer += 1;
                    prefix_used += 1;
                    ledger.landed += 1;
                } else {
                    // bridge next to v_i so the following vertex lands on it
                    let mut pool = bridge_base.intersection(g.neighbors(vi));
                    pool = anchored_pool(g, t, emb, tv, &pool);
                    match pool.min() {
                        Some(hv) => {
                            emb.place(tv, hv);
                            trace.push(TraceEvent {
                                phase: Phase::Case2Walk,
                                tree_vertex: tv,
                                host_vertex: hv,
                                pool_size: pool.len(),
                            });
                            ledger.bridges += 1;
                            ledger.off_prefix += 1;
                        }
                        None => {
                            return Err(FailureTrace::exhausted(
                                Phase::Case2Walk,
                                tv,
                                emb.used().len(),
                            ))
                        }
                    }
                }
            }
            if prefix_used == sample.prefix_len {
                let mut r3 = Vec::new();
                if j + 1 < path.len() {
                    r3.push(path[j + 1..].to_vec());
                }
                r3.extend(split.r2[path_idx + 1..].iter().cloned());
                debug_assert!(ledger.off_prefix <= 2 * ledger.r2_paths + ledger.j_len);
                return Ok((r3, ledger));
            }
        }
    }
    debug_assert!(ledger.off_prefix <= 2 * ledger.r2_paths + ledger.j_len);
    Ok((Vec::new(), ledger))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EndgameCounts {
    pub r3_paths: usize,
    pub r3_vertices: usize,
    pub reserved_evens: usize,
    pub interior: usize,
    pub deferred: usize,
}

/// Finishes the tails: even positions go to the reserved set while it lasts,
/// odd vertices flanked by two reserved images are deferred, everything else
/// is threaded through G', and the deferred vertices close the embedding via
/// common neighbours of their reserved flanks.
pub fn embed_r3_endgame(
    g: &Graph,
    t: &RootedTree,
    class: &Classification,
    h_prime: &VertexSet,
    r3: &[Vec<usize>],
    emb: &mut PartialEmbedding,
    trace: &mut Vec<TraceEvent>,
) -> Result<EndgameCounts, FailureTrace> {
    let mut counts = EndgameCounts {
        r3_paths: r3.len(),
        r3_vertices: r3.iter().map(Vec::len).sum(),
        ..EndgameCounts::default()
    };
    if r3.is_empty() {
        return Ok(counts);
    }
    debug_assert!(
        h_prime.is_disjoint(emb.used()),
        "reserved set untouched before endgame"
    );

    // Even positions (1-based, never the path end) into the reserved set
    // while supply lasts. These placements are unconstrained now; their
    // edges are realized when the flanking odd vertices are embedded.
    let mut supply = h_prime.iter();
    'evens: for path in r3 {
        let m = path.len();
        for (i, &tv) in path.iter().enumerate() {
            let pos_even = (i + 1) % 2 == 0;
            if !pos_even || i + 1 == m {
                continue;
            }
            let Some(hv) = supply.next() else {
                break 'evens;
            };
            debug_assert!(embedded_anchor_images(t, emb, tv).is_empty());
            emb.place(tv, hv);
            trace.push(TraceEvent {
                phase: Phase::Case2Endgame,
                tree_vertex: tv,
                host_vertex: hv,
                pool_size: 1,
            });
            counts.reserved_evens += 1;
        }
    }

    // Deferred set: odd interior positions flanked by reserved images.
    let in_h_prime =
        |emb: &PartialEmbedding, tv: usize| emb.image_of(tv).is_some_and(|h| h_prime.contains(h));
    let mut deferred = Vec::new();
    let mut deferred_set = VertexSet::empty(t.vertex_count());
    for path in r3 {
        let m = path.len();
        for (i, &tv) in path.iter().enumerate() {
            let pos = i + 1;
            if pos % 2 == 1
                && pos != 1
                && pos != m.saturating_sub(1)
                && pos != m
                && in_h_prime(emb, path[i - 1])
                && in_h_prime(emb, path[i + 1])
            {
                deferred.push(tv);
                deferred_set.insert(tv);
            }
        }
    }

    // Everything else, in path order, through G'.
    for path in r3 {
        for &tv in path {
            if emb.image_of(tv).is_some() || deferred_set.contains(tv) {
                continue;
            }
            place_lowest(g, t, emb, tv, &class.g_prime, Phase::Case2Endgame, trace)?;
            counts.interior += 1;
        }
    }

    // Deferred vertices last: common neighbours of their two reserved flanks,
    // anywhere unused.
    let everything = VertexSet::full(g.vertex_count());
    for tv in deferred {
        let anchors = embedded_anchor_images(t, emb, tv);
        debug_assert_eq!(anchors.len(), 2);
        debug_assert!(anchors.iter().all(|&h| h_prime.contains(h)));
        place_lowest(g, t, emb, tv, &everything, Phase::Case2Final, trace)?;
        counts.deferred += 1;
    }
    Ok(counts)
}

/// End-to-end ledger of a successful few-leaf run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Case2Ledger {
    pub r1: R1Counts,
    pub s_prime_size: usize,
    pub u_after_early: usize,
    pub retry: RetryStats,
    pub walk: WalkLedger,
    pub endgame: EndgameCounts,
    pub severed_edge: Option<(usize, usize)>,
    /// `|U| ≤ 120·√δ·k` held after the early block.
    pub early_used_budget: bool,
    /// `|R3| ≤ |R2|/50 + 1` held at the stop.
    pub tail_count_bound: bool,
}

pub fn embed_case2(
    g: &Graph,
    t: &RootedTree,
    class: &Classification,
    params: &ParameterSet,
    rng: &mut impl Rng,
    trace: &mut Vec<TraceEvent>,
) -> Result<(PartialEmbedding, Case2Ledger), FailureTrace> {
    let k = t.edge_count();
    let d = decompose_degree2(t);
    let split = split_paths(&d, k, params)?;
    let (mut emb, r1) = embed_d1_and_r1(g, t, class, &split, trace)?;
    let u_after_early = emb.used().len();

    let (sample, retry) = retry_sample(g, class, emb.used(), k, params, rng, params.retry_budget)?;
    let h_prime_ids: Vec<usize> = sample.h_pi.iter().take(params.h_prime_size(k)).collect();
    let h_prime = VertexSet::from_iter(g.vertex_count(), h_prime_ids);

    let (r3, walk) =
        embed_r2_along_permutation(g, t, class, &sample, &h_prime, &mut emb, &split, trace)?;
    let endgame = embed_r3_endgame(g, t, class, &h_prime, &r3, &mut emb, trace)?;

    debug_assert!(emb.is_total());
    let ledger = Case2Ledger {
        s_prime_size: class.s_prime.len(),
        u_after_early,
        early_used_budget: u_after_early <= floor_mul_sqrt(Rat::from_integer(120), params.delta, k),
        tail_count_bound: 50 * endgame.r3_paths <= walk.r2_paths + 50,
        r1,
        retry,
        walk,
        endgame,
        severed_edge: split.severed,
    };
    Ok((emb, ledger))
}
