//! The experiment pipeline behind the CLI: one embedding run (or permutation
//! statistics run) in, one machine-readable report out. Reports are
//! deterministic byte-for-byte given the same config and seed; anything
//! wall-clock flavoured stays out of them.

use std::collections::BTreeMap;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bits::VertexSet;
use crate::case1::{build_leaf_apparatus, embed_case1, has_many_leaves, LeafChoice};
use crate::case2::{embed_case2, sample_permutation, Case2Ledger};
use crate::classify::{classify, dense_spot_test, minimal_reduction};
use crate::embedding::{validate_embedding, PartialEmbedding};
use crate::engine::{FailureTrace, TraceEvent};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::{contains_tree_exact, Containment, SearchStats};
use crate::params::ParameterSet;
use crate::tree::RootedTree;

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub params: ParameterSet,
    pub seed: u64,
    /// Run the oracle on the full host when the engine fails. Opt-in; the
    /// provenance of every embedding stays explicit in `branch`.
    pub fallback: bool,
    /// Skip the dense-spot shortcut so the two greedy cases are exercised.
    pub skip_dense_spot: bool,
    pub deadline: Option<Duration>,
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    EmbeddedByEngine,
    EmbeddedByOracleFallback,
    NoEmbedding,
    Indeterminate,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::EmbeddedByEngine | Outcome::EmbeddedByOracleFallback => 0,
            Outcome::NoEmbedding => 1,
            Outcome::Indeterminate => 2,
        }
    }

    pub fn is_embedded(self) -> bool {
        matches!(
            self,
            Outcome::EmbeddedByEngine | Outcome::EmbeddedByOracleFallback
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Resolved without search (k = 0, or the host is smaller than the tree).
    Trivial,
    /// Hypothesis fails, so the greedy engine does not apply; the oracle
    /// decides directly.
    OracleDirect,
    DenseSpot,
    Case1,
    Case2,
    OracleFallback,
}

/// Numeric regime record: which of the proof's inequalities held.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct RegimeReport {
    pub min_degree_half_k: bool,
    /// Max degree below k + b, i.e. no dense spot.
    pub max_degree_bounded: bool,
    pub high_set_large: bool,
    pub g_prime_min_degree: bool,
    pub codegree_bound: bool,
    pub n_within_regime: bool,
    pub early_used_budget: Option<bool>,
    pub tail_count_bound: Option<bool>,
    pub cond_a: Option<bool>,
    pub cond_b: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub nodes_expanded: u64,
    pub max_depth: usize,
}

impl From<&SearchStats> for OracleReport {
    fn from(s: &SearchStats) -> Self {
        OracleReport {
            nodes_expanded: s.nodes_expanded,
            max_depth: s.max_depth,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub digest: String,
    pub seed: u64,
    pub k: usize,
    pub host_n: usize,
    pub host_m: usize,
    pub average_degree: String,
    pub hypothesis_holds: bool,
    pub delta_eff: String,
    pub outcome: Outcome,
    pub branch: Branch,
    pub regime: Option<RegimeReport>,
    pub phase_counts: BTreeMap<String, usize>,
    pub case2_ledger: Option<Case2Ledger>,
    pub oracle: Option<OracleReport>,
    /// Tree-vertex indexed images in original host ids; present on success
    /// and re-validated before the report exists.
    pub embedding: Option<Vec<usize>>,
    pub failure: Option<FailureTrace>,
    pub notes: Vec<String>,
    pub trace: Option<Vec<TraceEvent>>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:?},{:?},{}\n",
            self.digest,
            self.seed,
            self.k,
            self.host_n,
            self.host_m,
            self.outcome,
            self.branch,
            self.embedding.is_some()
        )
    }

    pub fn csv_header() -> &'static str {
        "digest,seed,k,host_n,host_m,outcome,branch,embedded\n"
    }
}

pub fn instance_digest(g: &Graph, t: Option<&RootedTree>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(crate::formats::format_graph(g).as_bytes());
    if let Some(t) = t {
        hasher.update(b"\n");
        hasher.update(crate::formats::format_tree(t).as_bytes());
    }
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Translates an embedding over subgraph-local host ids back through an id
/// map.
fn map_images(emb: &PartialEmbedding, ids: &[usize]) -> Vec<usize> {
    emb.images()
        .iter()
        .map(|h| ids[h.expect("total embedding")])
        .collect()
}

/// The full instance pipeline: reduction, classification, dense-spot
/// shortcut, case dispatch, optional oracle fallback.
pub fn run_embed(g: &Graph, t: &RootedTree, cfg: &RunConfig) -> Result<RunReport> {
    cfg.params.validate()?;
    let k = t.edge_count();
    let mut report = RunReport {
        digest: instance_digest(g, Some(t)),
        seed: cfg.seed,
        k,
        host_n: g.vertex_count(),
        host_m: g.edge_count(),
        average_degree: g
            .average_degree()
            .map(|d| d.to_string())
            .unwrap_or_default(),
        hypothesis_holds: g.vertex_count() > 0 && g.hypothesis_holds(k),
        delta_eff: cfg.params.delta.to_string(),
        outcome: Outcome::Indeterminate,
        branch: Branch::Trivial,
        regime: None,
        phase_counts: BTreeMap::new(),
        case2_ledger: None,
        oracle: None,
        embedding: None,
        failure: None,
        notes: Vec::new(),
        trace: cfg.trace.then(Vec::new),
    };

    if g.vertex_count() < t.vertex_count() {
        report.outcome = Outcome::NoEmbedding;
        report.notes.push(format!(
            "host has {} vertices, tree needs {}",
            g.vertex_count(),
            t.vertex_count()
        ));
        return Ok(report);
    }
    if k == 0 {
        let mut emb = PartialEmbedding::new(1, g.vertex_count());
        emb.place(0, 0);
        attach_embedding(&mut report, g, t, emb.to_total_vec())?;
        report.outcome = Outcome::EmbeddedByEngine;
        return Ok(report);
    }

    if !report.hypothesis_holds {
        // The reduction's precondition fails; only the oracle can decide.
        report.branch = Branch::OracleDirect;
        let (res, stats) = contains_tree_exact(g, t, cfg.deadline);
        report.oracle = Some((&stats).into());
        match res {
            Containment::Embedded(emb) => {
                attach_embedding(&mut report, g, t, emb.to_total_vec())?;
                report.outcome = Outcome::EmbeddedByOracleFallback;
            }
            Containment::Absent => report.outcome = Outcome::NoEmbedding,
            Containment::Indeterminate => report.outcome = Outcome::Indeterminate,
        }
        return Ok(report);
    }

    let reduction = minimal_reduction(g, k)?;
    let gr = &reduction.graph;
    if gr.vertex_count() < g.vertex_count() {
        report.notes.push(format!(
            "reduction removed {} low-degree vertices",
            g.vertex_count() - gr.vertex_count()
        ));
    }
    let class = classify(gr, k, &cfg.params);
    let spot = dense_spot_test(gr, k, &class);
    report.regime = Some(RegimeReport {
        min_degree_half_k: class.flags.min_degree,
        max_degree_bounded: spot.is_none(),
        high_set_large: class.flags.high_set_large,
        g_prime_min_degree: class.flags.g_prime_min_degree,
        codegree_bound: class.flags.codegree_bound,
        n_within_regime: class.flags.n_within_regime,
        ..RegimeReport::default()
    });

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    if !cfg.skip_dense_spot {
        if let Some(spot) = &spot {
            if spot.vertices.len() >= t.vertex_count() {
                let (spot_graph, spot_ids) = gr.induced(&spot.vertices);
                let (res, stats) = contains_tree_exact(&spot_graph, t, cfg.deadline);
                report.oracle = Some((&stats).into());
                match res {
                    Containment::Embedded(emb) => {
                        let in_reduced = map_images(&emb, &spot_ids);
                        let in_original: Vec<usize> = in_reduced
                            .iter()
                            .map(|&v| reduction.original_ids[v])
                            .collect();
                        attach_embedding(&mut report, g, t, in_original)?;
                        report.outcome = Outcome::EmbeddedByEngine;
                        report.branch = Branch::DenseSpot;
                        report
                            .phase_counts
                            .insert("dense_spot".into(), t.vertex_count());
                        return Ok(report);
                    }
                    Containment::Absent => {
                        report
                            .notes
                            .push("dense spot did not contain the tree".into());
                    }
                    Containment::Indeterminate => {
                        report
                            .notes
                            .push("dense-spot oracle hit the deadline".into());
                    }
                }
            } else {
                report.notes.push(format!(
                    "dense spot too small ({} vertices) for the tree",
                    spot.vertices.len()
                ));
            }
        }
    }

    let mut trace_events: Vec<TraceEvent> = Vec::new();
    let engine_result = if has_many_leaves(t, k, &cfg.params) {
        report.branch = Branch::Case1;
        let app = build_leaf_apparatus(t, k, &cfg.params, LeafChoice::Lowest, &mut rng);
        embed_case1(gr, t, &class, &app, &mut trace_events).map(|(emb, counts)| {
            report
                .phase_counts
                .insert("case1_anchors".into(), counts.anchors);
            report
                .phase_counts
                .insert("case1_interior".into(), counts.interior);
            report
                .phase_counts
                .insert("case1_leaves".into(), counts.leaves);
            emb
        })
    } else {
        report.branch = Branch::Case2;
        embed_case2(gr, t, &class, &cfg.params, &mut rng, &mut trace_events).map(|(emb, ledger)| {
            record_case2(&mut report, &ledger);
            emb
        })
    };
    if let Some(events) = report.trace.as_mut() {
        events.extend(trace_events);
    }

    match engine_result {
        Ok(emb) => {
            let in_original = map_images(&emb, &reduction.original_ids);
            attach_embedding(&mut report, g, t, in_original)?;
            report.outcome = Outcome::EmbeddedByEngine;
            Ok(report)
        }
        Err(failure) => {
            report.failure = Some(failure);
            if cfg.fallback {
                let (res, stats) = contains_tree_exact(g, t, cfg.deadline);
                report.oracle = Some((&stats).into());
                report.branch = Branch::OracleFallback;
                match res {
                    Containment::Embedded(emb) => {
                        attach_embedding(&mut report, g, t, emb.to_total_vec())?;
                        report.outcome = Outcome::EmbeddedByOracleFallback;
                    }
                    Containment::Absent => report.outcome = Outcome::NoEmbedding,
                    Containment::Indeterminate => report.outcome = Outcome::Indeterminate,
                }
            } else {
                report.outcome = Outcome::Indeterminate;
            }
            Ok(report)
        }
    }
}

fn record_case2(report: &mut RunReport, ledger: &Case2Ledger) {
    report.phase_counts.insert("case2_d1".into(), ledger.r1.d1);
    report
        .phase_counts
        .insert("case2_s_prime_fill".into(), ledger.r1.s_prime_fill);
    report
        .phase_counts
        .insert("case2_r1".into(), ledger.r1.r1_rest);
    report
        .phase_counts
        .insert("case2_landed".into(), ledger.walk.landed);
    report
        .phase_counts
        .insert("case2_bridges".into(), ledger.walk.bridges);
    report
        .phase_counts
        .insert("case2_path_ends".into(), ledger.walk.path_ends);
    report
        .phase_counts
        .insert("case2_reserved_evens".into(), ledger.endgame.reserved_evens);
    report
        .phase_counts
        .insert("case2_endgame_interior".into(), ledger.endgame.interior);
    report
        .phase_counts
        .insert("case2_deferred".into(), ledger.endgame.deferred);
    if let Some(regime) = report.regime.as_mut() {
        regime.early_used_budget = Some(ledger.early_used_budget);
        regime.tail_count_bound = Some(ledger.tail_count_bound);
        regime.cond_a = Some(true);
        regime.cond_b = Some(true);
    }
    report.case2_ledger = Some(ledger.clone());
}

/// Re-validates before the embedding enters the report; a success report with
/// an invalid embedding cannot be constructed.
fn attach_embedding(
    report: &mut RunReport,
    g: &Graph,
    t: &RootedTree,
    images: Vec<usize>,
) -> Result<()> {
    let emb =
        PartialEmbedding::from_images(images.iter().map(|&h| Some(h)).collect(), g.vertex_count());
    let validation = validate_embedding(g, t, &emb);
    if !validation.certifies_containment() {
        return Err(Error::InvalidInstance(format!(
            "internal error: produced embedding fails validation: {validation:?}"
        )));
    }
    report.embedding = Some(images);
    Ok(())
}

/// Permutation statistics for one host: empirical distribution of |J|, |H|,
/// and the joint acceptance frequency, with exact rational frequencies.
#[derive(Clone, Debug, Serialize)]
pub struct StatsReport {
    pub digest: String,
    pub seed: u64,
    pub k: usize,
    pub host_n: usize,
    pub samples: usize,
    pub prefix_len: usize,
    pub j_min: usize,
    pub j_max: usize,
    pub j_mean: String,
    pub h_min: usize,
    pub h_max: usize,
    pub h_mean: String,
    pub freq_a: String,
    pub freq_b: String,
    pub freq_joint: String,
}

pub fn run_stats(
    g: &Graph,
    k: usize,
    params: &ParameterSet,
    samples: usize,
    seed: u64,
) -> Result<StatsReport> {
    params.validate()?;
    if samples == 0 {
        return Err(Error::InvalidParameters("samples must be positive".into()));
    }
    // Classification on the host as given; the used set is the filled trim
    // set, matching the state the permutation phase sees.
    let class = classify(g, k, params);
    let used: VertexSet = class.s_prime.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut j_min, mut j_max, mut j_sum) = (usize::MAX, 0usize, 0u64);
    let (mut h_min, mut h_max, mut h_sum) = (usize::MAX, 0usize, 0u64);
    let (mut a_ok, mut b_ok, mut joint) = (0usize, 0usize, 0usize);
    let mut prefix_len = 0;
    for _ in 0..samples {
        let s = sample_permutation(g, &class, &used, k, params, &mut rng).map_err(|f| {
            Error::InvalidInstance(format!("sampling failed: {}", f.note.unwrap_or_default()))
        })?;
        prefix_len = s.prefix_len;
        let j = s.j_pi.len();
        let h = s.h_pi.len();
        j_min = j_min.min(j);
        j_max = j_max.max(j);
        j_sum += j as u64;
        h_min = h_min.min(h);
        h_max = h_max.max(h);
        h_sum += h as u64;
        a_ok += usize::from(s.passes_a);
        b_ok += usize::from(s.passes_b);
        joint += usize::from(s.passes_a && s.passes_b);
    }
    let ratio = |num: u64| num_rational::Ratio::new(num, samples as u64).to_string();
    Ok(StatsReport {
        digest: instance_digest(g, None),
        seed,
        k,
        host_n: g.vertex_count(),
        samples,
        prefix_len,
        j_min,
        j_max,
        j_mean: ratio(j_sum),
        h_min,
        h_max,
        h_mean: ratio(h_sum),
        freq_a: ratio(a_ok as u64),
        freq_b: ratio(b_ok as u64),
        freq_joint: ratio(joint as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_host, gen_tree, HostFamily, TreeFamily};
    use crate::params::Rat;

    #[test]
    fn complete_host_with_star_embeds() {
        let k = 8;
        let g = Graph::complete(k + 1);
        let t = gen_tree(&TreeFamily::Star, k, 0).unwrap();
        let report = run_embed(&g, &t, &RunConfig::default()).unwrap();
        assert!(report.outcome.is_embedded());
        assert_eq!(report.branch, Branch::DenseSpot);
        assert!(report.embedding.is_some());
    }

    #[test]
    fn skip_dense_spot_reaches_case1() {
        let k = 8;
        let g = Graph::complete(k + 1);
        let t = gen_tree(&TreeFamily::Star, k, 0).unwrap();
        let cfg = RunConfig {
            skip_dense_spot: true,
            ..RunConfig::default()
        };
        let report = run_embed(&g, &t, &cfg).unwrap();
        assert_eq!(report.branch, Branch::Case1);
        assert_eq!(report.outcome, Outcome::EmbeddedByEngine);
    }

    /// A K_{k+1} core with three medium-degree pendants keeps every degree
    /// below k + b, so the pipeline reaches the many-leaf case without any
    /// flag: the natural route past the dense-spot test.
    #[test]
    fn spot_free_host_routes_to_case1_naturally() {
        let k = 30;
        let mut edges = Vec::new();
        for i in 0..=k {
            for j in (i + 1)..=k {
                edges.push((i, j));
            }
        }
        // extras 31..34, each adjacent to 16 clique vertices, spread so no
        // clique vertex carries more than two extras
        for (e, extra) in (31..34).enumerate() {
            for x in 0..16 {
                edges.push(((e * 10 + x) % (k + 1), extra));
            }
        }
        let g = Graph::from_edges(34, &edges).unwrap();
        let params = ParameterSet::default().with_delta(Rat::new(1, 10_000));
        let class_probe = crate::classify::classify(&g, k, &params);
        assert!(class_probe.b >= 3, "extras must land in the small set");
        assert!(
            g.max_degree() < k + class_probe.b,
            "host must stay spot-free"
        );

        let t = gen_tree(&TreeFamily::Caterpillar { spine: 15 }, k, 0).unwrap();
        let cfg = RunConfig {
            params,
            seed: 3,
            ..RunConfig::default()
        };
        let report = run_embed(&g, &t, &cfg).unwrap();
        assert_eq!(report.branch, Branch::Case1);
        assert_eq!(report.outcome, Outcome::EmbeddedByEngine);
        assert!(report.regime.unwrap().max_degree_bounded);
    }

    #[test]
    fn boundary_instance_is_oracle_confirmed_no_embedding() {
        let g = gen_host(
            &HostFamily::DisjointCliques {
                clique: 5,
                copies: 2,
            },
            0,
        )
        .unwrap();
        let t = gen_tree(&TreeFamily::Path, 5, 0).unwrap();
        let report = run_embed(&g, &t, &RunConfig::default()).unwrap();
        assert!(!report.hypothesis_holds);
        assert_eq!(report.branch, Branch::OracleDirect);
        assert_eq!(report.outcome, Outcome::NoEmbedding);
        assert_eq!(report.outcome.exit_code(), 1);
    }

    #[test]
    fn host_smaller_than_tree_is_trivially_negative() {
        let g = Graph::complete(4);
        let t = gen_tree(&TreeFamily::Path, 5, 0).unwrap();
        let report = run_embed(&g, &t, &RunConfig::default()).unwrap();
        assert_eq!(report.outcome, Outcome::NoEmbedding);
        assert_eq!(report.branch, Branch::Trivial);
    }

    #[test]
    fn engine_failure_without_fallback_is_indeterminate() {
        // Inflated δ sends the path to the few-leaf case with an early-block
        // target beyond the whole tree: the engine must fail with a trace,
        // and only --fallback may rescue the run.
        let k = 60;
        let g = gen_host(
            &HostFamily::PaperRegime {
                k,
                delta: Rat::new(1, 20),
            },
            2,
        )
        .unwrap();
        let t = gen_tree(&TreeFamily::Path, k, 0).unwrap();
        let params = ParameterSet::default().with_delta(Rat::new(1, 100));
        let cfg = RunConfig {
            params: params.clone(),
            skip_dense_spot: true,
            ..RunConfig::default()
        };
        let report = run_embed(&g, &t, &cfg).unwrap();
        assert_eq!(report.branch, Branch::Case2);
        assert_eq!(report.outcome, Outcome::Indeterminate);
        assert!(report.failure.is_some());
        assert_eq!(report.outcome.exit_code(), 2);

        let cfg = RunConfig {
            params,
            skip_dense_spot: true,
            fallback: true,
            ..RunConfig::default()
        };
        let report = run_embed(&g, &t, &cfg).unwrap();
        assert_eq!(report.outcome, Outcome::EmbeddedByOracleFallback);
        assert_eq!(report.branch, Branch::OracleFallback);
    }

    #[test]
    fn reports_are_byte_identical_for_same_seed() {
        let g = gen_host(
            &HostFamily::PaperRegime {
                k: 60,
                delta: Rat::new(1, 20),
            },
            5,
        )
        .unwrap();
        let t = gen_tree(&TreeFamily::PruferRandom, 60, 5).unwrap();
        let cfg = RunConfig {
            seed: 99,
            trace: true,
            ..RunConfig::default()
        };
        let a = run_embed(&g, &t, &cfg).unwrap().to_json();
        let b = run_embed(&g, &t, &cfg).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn stats_on_complete_and_empty_hosts() {
        let g = Graph::complete(60);
        let params = ParameterSet::default().with_delta(Rat::new(1, 10_000));
        let s = run_stats(&g, 50, &params, 20, 1).unwrap();
        assert_eq!(s.freq_a, "1");
        assert_eq!(s.j_max, 0);

        let empty = Graph::empty(60);
        let s = run_stats(&empty, 50, &params, 20, 1).unwrap();
        assert_eq!(s.freq_a, "0");
        assert_eq!(s.j_min, s.prefix_len - 1);
    }

    #[test]
    fn stats_replay_bit_for_bit() {
        let g = gen_host(
            &HostFamily::GnpDense {
                n: 80,
                p: Rat::new(9, 10),
            },
            3,
        )
        .unwrap();
        let params = ParameterSet::default().with_delta(Rat::new(1, 40_000));
        let a = serde_json::to_string(&run_stats(&g, 70, &params, 50, 7).unwrap()).unwrap();
        let b = serde_json::to_string(&run_stats(&g, 70, &params, 50, 7).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_edge_tree_embeds_anywhere() {
        let g = Graph::complete(3);
        let t = RootedTree::from_parents(vec![None]).unwrap();
        let report = run_embed(&g, &t, &RunConfig::default()).unwrap();
        assert_eq!(report.outcome, Outcome::EmbeddedByEngine);
        assert_eq!(report.embedding, Some(vec![0]));
    }
}
