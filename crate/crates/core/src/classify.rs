//! Host preprocessing: the minimal-counterexample reduction, the derived
//! degree classes (a, S, b, S', H, G'), and the dense-spot test that routes
//! an instance to the exact oracle when a very high degree vertex exists.

use serde_json::{json, Value};

use crate::bits::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::params::{floor_mul_sqrt, ParameterSet, Rat};

/// Result of the minimal-counterexample reduction: the induced subgraph on
/// the surviving vertices, plus the original ids of those vertices.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub graph: Graph,
    pub original_ids: Vec<usize>,
}

/// Repeatedly deletes vertices of degree `< k/2`. Each deletion preserves
/// `d(G) > k-1` (since `2·deg(v) ≤ k-1` implies the average cannot drop to
/// `k-1`), so the survivor satisfies both `d > k-1` and `δ ≥ k/2`.
pub fn minimal_reduction(g: &Graph, k: usize) -> Result<Reduction> {
    if !g.hypothesis_holds(k) {
        return Err(Error::HypothesisFailed {
            average_degree: g.average_degree()?,
            k,
        });
    }
    let alive = peel_low_degree(g, k, |candidates| {
        candidates.min().expect("nonempty candidate set")
    });
    let (graph, original_ids) = g.induced(&alive);
    debug_assert!(graph.hypothesis_holds(k));
    Ok(Reduction {
        graph,
        original_ids,
    })
}

/// Peeling loop with a pluggable choice of which qualifying vertex to delete
/// next. The final surviving set is the same for every choice function
/// (it is the unique maximal induced subgraph of minimum degree ≥ k/2);
/// the parameter exists so tests can replay random deletion orders.
pub fn peel_low_degree(
    g: &Graph,
    k: usize,
    mut choose: impl FnMut(&VertexSet) -> usize,
) -> VertexSet {
    let n = g.vertex_count();
    let mut alive = VertexSet::full(n);
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    loop {
        let low = VertexSet::from_iter(n, alive.iter().filter(|&v| 2 * deg[v] < k));
        if low.is_empty() {
            return alive;
        }
        let v = choose(&low);
        debug_assert!(low.contains(v));
        alive.remove(v);
        for u in g.neighbors(v).intersection(&alive).iter() {
            deg[u] -= 1;
        }
    }
}

/// The derived vertex classes of the preprocessing stage, over the reduced
/// host's local ids.
#[derive(Clone, Debug)]
pub struct Classification {
    pub k: usize,
    /// `a = n - k` (0 when the host is smaller than the tree).
    pub a: usize,
    /// Small set `S`: degree at most `c_small_k·k + c_small_a·a`.
    pub small: VertexSet,
    /// `b = |S|`.
    pub b: usize,
    /// The `⌈c_sprime·√δ·k⌉` vertices of lowest degree (ties by id).
    pub s_prime: VertexSet,
    /// High set `H`: degree at least `k`.
    pub high: VertexSet,
    /// `G' = V \ S'`.
    pub g_prime: VertexSet,
    pub flags: RegimeFlags,
}

/// Which of the proof's numeric inequalities hold for this instance. At desk
/// scale most of them fail; the engine records them and continues
/// heuristically.
#[derive(Clone, Copy, Debug, Default, serde::Serialize)]
pub struct RegimeFlags {
    /// Minimum degree ≥ k/2 (guaranteed after reduction).
    pub min_degree: bool,
    /// `|H| > k/6`.
    pub high_set_large: bool,
    /// `δ(G') ≥ k - 4√δ·k`.
    pub g_prime_min_degree: bool,
    /// Every pair in G' has ≥ `k - 9√δ·k` common neighbours inside G'.
    pub codegree_bound: bool,
    /// `n ≤ (1+δ)k`.
    pub n_within_regime: bool,
}

pub fn classify(g: &Graph, k: usize, params: &ParameterSet) -> Classification {
    let n = g.vertex_count();
    let a = n.saturating_sub(k);

    let small = VertexSet::from_iter(
        n,
        (0..n).filter(|&v| params.is_small_degree(g.degree(v), k, a)),
    );
    let b = small.len();

    // S': lowest degrees, ties by vertex id ascending.
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (g.degree(v), v));
    let s_prime_size = params.s_prime_size(k, n);
    let s_prime = VertexSet::from_iter(n, by_degree[..s_prime_size].iter().copied());
    let g_prime = s_prime.complement();

    let high = VertexSet::from_iter(n, (0..n).filter(|&v| g.degree(v) >= k));

    let min_degree = (0..n).all(|v| 2 * g.degree(v) >= k);
    let high_set_large = 6 * high.len() > k;
    let g_prime_min_degree = {
        let min_in = g.min_degree_in(&g_prime);
        g_prime.is_empty()
            || k.saturating_sub(min_in) <= floor_mul_sqrt(Rat::from_integer(4), params.delta, k)
    };
    let codegree_bound = {
        let bound = floor_mul_sqrt(Rat::from_integer(9), params.delta, k);
        let verts = g_prime.to_vec();
        let mut ok = true;
        'outer: for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                let co = g
                    .common_neighbors(u, v, &g_prime)
                    .expect("distinct vertices")
                    .len();
                if k.saturating_sub(co) > bound {
                    ok = false;
                    break 'outer;
                }
            }
        }
        ok
    };

    Classification {
        k,
        a,
        small,
        b,
        s_prime,
        high,
        g_prime,
        flags: RegimeFlags {
            min_degree,
            high_set_large,
            g_prime_min_degree,
            codegree_bound,
            n_within_regime: params.n_within_regime(n, k),
        },
    }
}

impl Classification {
    /// JSON view with sets as sorted id arrays.
    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "a": self.a,
            "b": self.b,
            "small": self.small.to_vec(),
            "s_prime": self.s_prime.to_vec(),
            "high": self.high.to_vec(),
            "g_prime": self.g_prime.to_vec(),
            "flags": serde_json::to_value(self.flags).expect("flags serialize"),
        })
    }
}

/// A dense spot: a vertex of degree ≥ k + b together with its closed
/// neighbourhood minus S. Inside the regime this subgraph has ≥ k+1 vertices
/// and minimum degree > 2k/3, which is exactly where the spanning-tree
/// theorem (discharged here by the exact oracle) applies.
#[derive(Clone, Debug)]
pub struct DenseSpot {
    pub center: usize,
    pub vertices: VertexSet,
}

/// Returns a spot iff some vertex has degree ≥ k + b; absent certifies
/// `Δ(G) < k + b`. Lowest qualifying vertex wins for determinism.
pub fn dense_spot_test(g: &Graph, k: usize, class: &Classification) -> Option<DenseSpot> {
    let n = g.vertex_count();
    let center = (0..n).find(|&v| g.degree(v) >= k + class.b)?;
    let mut vertices = g.neighbors(center).clone();
    vertices.subtract(&class.small);
    vertices.insert(center);
    Some(DenseSpot { center, vertices })
}
