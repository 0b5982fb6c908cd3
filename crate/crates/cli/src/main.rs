//! `esos` — reproducible tree-embedding experiments on dense hosts.
//!
//! Exit codes: 0 success/contained, 1 not contained, 2 indeterminate,
//! 3 error.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use esos_core::classify::{classify, dense_spot_test, minimal_reduction};
use esos_core::enumerate::{enumerate_trees, verify_conjecture, VerifyMode};
use esos_core::formats::{format_graph, format_tree, parse_graph, parse_tree};
use esos_core::gen::{gen_host, gen_tree, HostFamily, TreeFamily};
use esos_core::graph6::{decode_graph6, encode_graph6};
use esos_core::oracle::{contains_tree_exact, Containment};
use esos_core::params::{parse_rat, ParameterSet};
use esos_core::pipeline::{run_embed, run_stats, RunConfig, RunReport};
use esos_core::{Graph, RootedTree};

#[derive(Parser)]
#[command(
    name = "esos",
    version,
    about = "Tree embedding engine, exact containment oracle, and instance generators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// RNG seed; always recorded in the output.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Effective delta as a rational ("1/100", "0.01", "1e-10").
    #[arg(long = "delta-eff")]
    delta_eff: Option<String>,
    /// Maximum permutation resamples in the few-leaf case.
    #[arg(long = "retry-budget")]
    retry_budget: Option<usize>,
    /// Oracle wall-clock budget in milliseconds.
    #[arg(long)]
    deadline: Option<u64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run the embedding pipeline on one instance.
    Embed {
        #[command(flatten)]
        common: CommonOpts,
        /// Host graph file ("n m" + edge lines).
        #[arg(long, conflicts_with = "host")]
        graph: Option<PathBuf>,
        /// Tree file ("n; parents...").
        #[arg(long, conflicts_with = "tree_spec", requires = "graph")]
        tree: Option<PathBuf>,
        /// Generated host, e.g. "paper-regime:k=100,delta=1/20".
        #[arg(long, requires = "tree_spec")]
        host: Option<String>,
        /// Generated tree, e.g. "prufer:k=100".
        #[arg(long = "tree-spec")]
        tree_spec: Option<String>,
        /// Run the oracle on the full host if the engine fails.
        #[arg(long)]
        fallback: bool,
        /// Skip the dense-spot shortcut to exercise the greedy cases.
        #[arg(long = "skip-dense-spot")]
        skip_dense_spot: bool,
        /// Record a phase-by-phase placement trace in the report.
        #[arg(long)]
        trace: bool,
    },
    /// Check every small host against every tree with k edges.
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        k: usize,
        /// Largest host order for internal enumeration.
        #[arg(long = "n-max", conflicts_with = "graph6")]
        n_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = VerifyModeArg::Exhaustive)]
        mode: VerifyModeArg,
        /// Instance budget in sampled mode.
        #[arg(long, default_value_t = 100)]
        budget: usize,
        /// graph6 stream file ("-" for stdin); one host per line.
        #[arg(long)]
        graph6: Option<String>,
    },
    /// Monte-Carlo permutation statistics for one host.
    Stats {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, conflicts_with = "host")]
        graph: Option<PathBuf>,
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Generate an instance file.
    Gen {
        #[command(flatten)]
        common: CommonOpts,
        /// Tree spec, e.g. "caterpillar:k=40,spine=20".
        #[arg(long, conflicts_with = "host")]
        tree: Option<String>,
        /// Host spec, e.g. "gnp:n=50,p=9/10".
        #[arg(long)]
        host: Option<String>,
        /// Emit the host as a graph6 line instead of the edge-list format.
        #[arg(long)]
        g6: bool,
    },
    /// Print the derived vertex classes of a host.
    Explain {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VerifyModeArg {
    Exhaustive,
    Sampled,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Embed {
            common,
            graph,
            tree,
            host,
            tree_spec,
            fallback,
            skip_dense_spot,
            trace,
        } => cmd_embed(
            common,
            graph,
            tree,
            host,
            tree_spec,
            fallback,
            skip_dense_spot,
            trace,
        ),
        Command::Verify {
            common,
            k,
            n_max,
            mode,
            budget,
            graph6,
        } => cmd_verify(common, k, n_max, mode, budget, graph6),
        Command::Stats {
            common,
            graph,
            host,
            k,
            samples,
        } => cmd_stats(common, graph, host, k, samples),
        Command::Gen {
            common,
            tree,
            host,
            g6,
        } => cmd_gen(common, tree, host, g6),
        Command::Explain { common, graph, k } => cmd_explain(common, graph, k),
    }
}

fn build_params(common: &CommonOpts) -> Result<ParameterSet> {
    let mut params = ParameterSet::default();
    if let Some(d) = &common.delta_eff {
        params.delta = parse_rat(d)?;
    }
    if let Some(b) = common.retry_budget {
        params.retry_budget = b;
    }
    params.validate()?;
    Ok(params)
}

fn deadline_of(common: &CommonOpts) -> Option<Duration> {
    common.deadline.map(Duration::from_millis)
}

fn write_output(common: &CommonOpts, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// "family:key=value,key=value" instance specs.
fn spec_fields(spec: &str) -> Result<(&str, Vec<(&str, &str)>)> {
    let (family, rest) = match spec.split_once(':') {
        Some((f, r)) => (f.trim(), r),
        None => (spec.trim(), ""),
    };
    let mut fields = Vec::new();
    for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("bad spec field {part:?} (expected key=value)"))?;
        fields.push((key.trim(), value.trim()));
    }
    Ok((family, fields))
}

fn field<'a>(fields: &[(&str, &'a str)], key: &str) -> Option<&'a str> {
    fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

fn need_usize(fields: &[(&str, &str)], key: &str, spec: &str) -> Result<usize> {
    field(fields, key)
        .ok_or_else(|| anyhow!("spec {spec:?} is missing {key}"))?
        .parse()
        .with_context(|| format!("field {key} in {spec:?}"))
}

fn parse_tree_spec(spec: &str) -> Result<(TreeFamily, usize)> {
    let (family, fields) = spec_fields(spec)?;
    let k = need_usize(&fields, "k", spec)?;
    let fam = match family {
        "path" => TreeFamily::Path,
        "star" => TreeFamily::Star,
        "spider" => TreeFamily::Spider {
            legs: need_usize(&fields, "legs", spec)?,
        },
        "caterpillar" => TreeFamily::Caterpillar {
            spine: need_usize(&fields, "spine", spec)?,
        },
        "broom" => TreeFamily::Broom {
            handle: need_usize(&fields, "handle", spec)?,
        },
        "prufer" | "prufer-random" => TreeFamily::PruferRandom,
        other => bail!("unknown tree family {other:?}"),
    };
    Ok((fam, k))
}

fn parse_host_spec(spec: &str) -> Result<HostFamily> {
    let (family, fields) = spec_fields(spec)?;
    Ok(match family {
        "complete" => HostFamily::Complete {
            n: need_usize(&fields, "n", spec)?,
        },
        "complete-minus-matching" => HostFamily::CompleteMinusMatching {
            n: need_usize(&fields, "n", spec)?,
        },
        "gnp" | "gnp-dense" => HostFamily::GnpDense {
            n: need_usize(&fields, "n", spec)?,
            p: parse_rat(
                field(&fields, "p").ok_or_else(|| anyhow!("spec {spec:?} is missing p"))?,
            )?,
        },
        "cliques" | "disjoint-cliques" => HostFamily::DisjointCliques {
            clique: need_usize(&fields, "clique", spec)?,
            copies: need_usize(&fields, "copies", spec)?,
        },
        "paper-regime" => HostFamily::PaperRegime {
            k: need_usize(&fields, "k", spec)?,
            delta: parse_rat(
                field(&fields, "delta").ok_or_else(|| anyhow!("spec {spec:?} is missing delta"))?,
            )?,
        },
        other => bail!("unknown host family {other:?}"),
    })
}

fn load_instance(
    common: &CommonOpts,
    graph: Option<PathBuf>,
    tree: Option<PathBuf>,
    host: Option<String>,
    tree_spec: Option<String>,
) -> Result<(Graph, RootedTree)> {
    let g = match (&graph, &host) {
        (Some(path), None) => parse_graph(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )?,
        (None, Some(spec)) => gen_host(&parse_host_spec(spec)?, common.seed)?,
        _ => bail!("exactly one host source required: --graph FILE or --host SPEC"),
    };
    let t = match (&tree, &tree_spec) {
        (Some(path), None) => parse_tree(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )?,
        (None, Some(spec)) => {
            let (fam, k) = parse_tree_spec(spec)?;
            gen_tree(&fam, k, common.seed)?
        }
        _ => bail!("exactly one tree source required: --tree FILE or --tree-spec SPEC"),
    };
    Ok((g, t))
}

#[allow(clippy::too_many_arguments)]
fn cmd_embed(
    common: CommonOpts,
    graph: Option<PathBuf>,
    tree: Option<PathBuf>,
    host: Option<String>,
    tree_spec: Option<String>,
    fallback: bool,
    skip_dense_spot: bool,
    trace: bool,
) -> Result<ExitCode> {
    let params = build_params(&common)?;
    let (g, t) = load_instance(&common, graph, tree, host, tree_spec)?;
    let cfg = RunConfig {
        params,
        seed: common.seed,
        fallback,
        skip_dense_spot,
        deadline: deadline_of(&common),
        trace,
    };
    let report = run_embed(&g, &t, &cfg)?;
    let text = match common.format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => format!("{}{}", RunReport::csv_header(), report.to_csv_line()),
    };
    write_output(&common, &text)?;
    Ok(ExitCode::from(report.outcome.exit_code() as u8))
}

fn cmd_verify(
    common: CommonOpts,
    k: usize,
    n_max: Option<usize>,
    mode: VerifyModeArg,
    budget: usize,
    graph6: Option<String>,
) -> Result<ExitCode> {
    let params = build_params(&common)?;
    let mut out = String::new();

    if let Some(source) = graph6 {
        // stream mode: each line is one host, checked against all trees
        let text = if source == "-" {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        } else {
            std::fs::read_to_string(&source).with_context(|| format!("reading {source}"))?
        };
        let trees = enumerate_trees(k)?;
        let deadline = deadline_of(&common);
        let mut counterexamples = 0usize;
        let mut indeterminate = 0usize;
        let mut checked = 0usize;
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let g = decode_graph6(line, idx + 1)?;
            checked += 1;
            let mut missing: Option<String> = None;
            let mut undecided = false;
            let mut nodes = 0u64;
            for t in &trees {
                let (res, stats) = contains_tree_exact(&g, t, deadline);
                nodes += stats.nodes_expanded;
                match res {
                    Containment::Embedded(_) => {}
                    Containment::Absent => {
                        missing = Some(format_tree(t).trim_end().to_string());
                        break;
                    }
                    Containment::Indeterminate => {
                        undecided = true;
                        break;
                    }
                }
            }
            if missing.is_some() {
                counterexamples += 1;
            }
            if undecided {
                indeterminate += 1;
            }
            out.push_str(
                &serde_json::json!({
                    "instance": line.trim(),
                    "n": g.vertex_count(),
                    "m": g.edge_count(),
                    "hypothesis": g.hypothesis_holds(k),
                    "contains_all": missing.is_none() && !undecided,
                    "missing_tree": missing,
                    "indeterminate": undecided,
                    "nodes": nodes,
                })
                .to_string(),
            );
            out.push('\n');
            let _ = checked;
        }
        write_output(&common, &out)?;
        eprintln!(
            "checked {checked} hosts against {} trees: {counterexamples} counterexamples, {indeterminate} indeterminate",
            trees.len()
        );
        return Ok(match (counterexamples, indeterminate) {
            (0, 0) => ExitCode::SUCCESS,
            (0, _) => ExitCode::from(2),
            _ => ExitCode::from(1),
        });
    }

    let n_max = n_max.ok_or_else(|| anyhow!("--n-max or --graph6 required"))?;
    let mode = match mode {
        VerifyModeArg::Exhaustive => VerifyMode::Exhaustive,
        VerifyModeArg::Sampled => VerifyMode::Sampled,
    };
    let report = verify_conjecture(k, n_max, mode, budget, common.seed, &params, |line| {
        out.push_str(&serde_json::to_string(line).expect("instance line serializes"));
        out.push('\n');
    })?;
    out.push_str(&serde_json::to_string(&report).expect("report serializes"));
    out.push('\n');
    write_output(&common, &out)?;
    eprintln!(
        "checked {} hosts x {} trees: {} counterexamples",
        report.graphs_checked,
        report.trees_checked,
        report.counterexamples.len()
    );
    Ok(if report.counterexamples.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_stats(
    common: CommonOpts,
    graph: Option<PathBuf>,
    host: Option<String>,
    k: usize,
    samples: usize,
) -> Result<ExitCode> {
    let params = build_params(&common)?;
    let g = match (&graph, &host) {
        (Some(path), None) => parse_graph(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
        )?,
        (None, Some(spec)) => gen_host(&parse_host_spec(spec)?, common.seed)?,
        _ => bail!("exactly one host source required: --graph FILE or --host SPEC"),
    };
    let report = run_stats(&g, k, &params, samples, common.seed)?;
    let text = match common.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report)?),
        Format::Csv => format!(
            "digest,seed,k,host_n,samples,prefix_len,j_min,j_max,j_mean,h_min,h_max,h_mean,freq_a,freq_b,freq_joint\n{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            report.digest,
            report.seed,
            report.k,
            report.host_n,
            report.samples,
            report.prefix_len,
            report.j_min,
            report.j_max,
            report.j_mean,
            report.h_min,
            report.h_max,
            report.h_mean,
            report.freq_a,
            report.freq_b,
            report.freq_joint,
        ),
    };
    write_output(&common, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(
    common: CommonOpts,
    tree: Option<String>,
    host: Option<String>,
    g6: bool,
) -> Result<ExitCode> {
    let text = match (&tree, &host) {
        (Some(spec), None) => {
            let (fam, k) = parse_tree_spec(spec)?;
            format_tree(&gen_tree(&fam, k, common.seed)?)
        }
        (None, Some(spec)) => {
            let g = gen_host(&parse_host_spec(spec)?, common.seed)?;
            if g6 {
                format!("{}\n", encode_graph6(&g)?)
            } else {
                format_graph(&g)
            }
        }
        _ => bail!("exactly one of --tree SPEC or --host SPEC required"),
    };
    write_output(&common, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_explain(common: CommonOpts, graph: PathBuf, k: usize) -> Result<ExitCode> {
    let params = build_params(&common)?;
    let g = parse_graph(
        &std::fs::read_to_string(&graph).with_context(|| format!("reading {}", graph.display()))?,
    )?;
    let reduction = minimal_reduction(&g, k)?;
    let class = classify(&reduction.graph, k, &params);
    let spot = dense_spot_test(&reduction.graph, k, &class);
    let mut doc = class.to_json();
    doc["reduced_n"] = serde_json::json!(reduction.graph.vertex_count());
    doc["reduced_original_ids"] = serde_json::json!(reduction.original_ids);
    doc["dense_spot"] = match spot {
        Some(s) => serde_json::json!({
            "center": s.center,
            "vertices": s.vertices.to_vec(),
        }),
        None => serde_json::Value::Null,
    };
    write_output(
        &common,
        &format!("{}\n", serde_json::to_string_pretty(&doc)?),
    )?;
    Ok(ExitCode::SUCCESS)
}
