//! Command-line interface.
//!
//! Exit codes: 0 success, 2 malformed input or flags, 3 invariant
//! violation, 4 verification failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench;
use crate::bound::{Depth, Grade};
use crate::error::Error;
use crate::io::{self, LoadedGraph, ProblemFiles};
use crate::problem::{self, EquivalenceOptions, EquivalenceStatus, Hypothesis, LossKind};
use crate::reduct::{self, Policy, ReductReport, Substitution};
use crate::refine;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "gnn-reduce", version, about = "Compress GNN learning problems by color refinement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Edge list: `src<TAB>dst[<TAB>mult]` per line.
    #[arg(long)]
    pub graph: PathBuf,
    /// Color file: `node<TAB>color` per line; unlisted nodes share one color.
    #[arg(long)]
    pub colors: Option<PathBuf>,
    /// Add the reverse of every edge.
    #[arg(long)]
    pub undirected: bool,
}

impl GraphArgs {
    fn load(&self) -> Result<LoadedGraph, Error> {
        io::load_graph(&self.graph, self.colors.as_deref(), self.undirected)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute refinement classes.
    Refine {
        #[command(flatten)]
        input: GraphArgs,
        /// Rounds (integer or `inf`).
        #[arg(long)]
        depth: Depth,
        #[arg(long, default_value = "inf")]
        grade: Grade,
        /// Write `node<TAB>class_id` for the final round here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compress a graph and (optionally) its training set into a bundle.
    Compress {
        #[command(flatten)]
        input: GraphArgs,
        #[arg(long)]
        depth: Depth,
        #[arg(long, default_value = "inf")]
        grade: Grade,
        /// Training file: `node<TAB>target` per line.
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long, default_value = "xent")]
        loss: LossKind,
        #[arg(long, default_value = "min-incidence")]
        policy: Policy,
        /// Output bundle directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a bundle against the problem it was built from.
    Verify {
        #[arg(long)]
        bundle: PathBuf,
        /// Original edge list.
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        colors: Option<PathBuf>,
        #[arg(long)]
        undirected: bool,
        #[arg(long)]
        train: Option<PathBuf>,
        /// Number of sampled GNNs.
        #[arg(long, default_value_t = 5)]
        gnns: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Width of the sampled GNNs (defaults to the bundle's grade).
        #[arg(long)]
        width: Option<Grade>,
        #[arg(long, default_value_t = 16)]
        hidden: usize,
    },
    /// Reduct sizes per refinement round.
    Stats {
        #[command(flatten)]
        input: GraphArgs,
        /// Largest depth to report (`inf` runs to stability).
        #[arg(long, default_value = "inf")]
        max_depth: Depth,
        #[arg(long, default_value = "inf")]
        grade: Grade,
    },
    /// Time refinement on seeded random graphs.
    Bench {
        /// Comma-separated `n + m` values, e.g. `1e4,2e4,4e4`.
        #[arg(long, value_delimiter = ',', value_parser = parse_size)]
        sizes: Vec<usize>,
        /// Average out-degree `m / n`.
        #[arg(long, default_value_t = 4.0)]
        density: f64,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_size(s: &str) -> Result<usize, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("invalid size {s:?}"))?;
    if !(x.is_finite() && x >= 1.0) {
        return Err(format!("invalid size {s:?}"));
    }
    Ok(x.round() as usize)
}

fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_INVARIANT
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn w(out: &mut dyn Write, s: std::fmt::Arguments<'_>) -> Result<(), Error> {
    out.write_fmt(s).map_err(|e| Error::io("<stdout>", e))
}

macro_rules! outln {
    ($out:expr, $($t:tt)*) => { w($out, format_args!("{}\n", format_args!($($t)*))) };
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Error> {
    match command {
        Command::Refine {
            input,
            depth,
            grade,
            out: path,
        } => cmd_refine(&input, depth, grade, path.as_deref(), out),
        Command::Compress {
            input,
            depth,
            grade,
            train,
            loss,
            policy,
            out: dir,
        } => cmd_compress(&input, depth, grade, train.as_deref(), loss, policy, &dir, out),
        Command::Verify {
            bundle,
            original,
            colors,
            undirected,
            train,
            gnns,
            seed,
            tol,
            width,
            hidden,
        } => {
            let opts = EquivalenceOptions {
                gnns,
                seed,
                tolerance: tol,
                hidden_dim: hidden,
                unbounded_depth: None,
                width,
            };
            cmd_verify(&bundle, &original, colors.as_deref(), undirected, train.as_deref(), &opts, out)
        }
        Command::Stats {
            input,
            max_depth,
            grade,
        } => cmd_stats(&input, max_depth, grade, out),
        Command::Bench {
            sizes,
            density,
            repeats,
            seed,
        } => cmd_bench(&sizes, density, repeats, seed, out),
    }
}

fn arrow_join(counts: &[usize]) -> String {
    counts.iter().map(usize::to_string).collect::<Vec<_>>().join("→")
}

fn cmd_refine(
    input: &GraphArgs,
    depth: Depth,
    grade: Grade,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    let loaded = input.load()?;
    let result = refine::refine(&loaded.graph, depth, grade);
    let counts = arrow_join(&result.class_counts());
    match result.stable_round() {
        Some(s) => outln!(out, "stable at round {s}; classes: {counts}")?,
        None => outln!(out, "depth {depth} reached; classes: {counts}")?,
    }
    if let Some(path) = path {
        let p = result.final_partition();
        let mut s = String::new();
        for (v, id) in loaded.ids.iter().enumerate() {
            s.push_str(&format!("{id}\t{}\n", p.class_of(v)));
        }
        std::fs::write(path, s).map_err(|e| Error::io(path, e))?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_compress(
    input: &GraphArgs,
    depth: Depth,
    grade: Grade,
    train: Option<&Path>,
    loss: LossKind,
    policy: Policy,
    dir: &Path,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    let files = ProblemFiles {
        edges: &input.graph,
        colors: input.colors.as_deref(),
        train,
        undirected: input.undirected,
        loss,
    };
    let p = io::load_problem(&files, Hypothesis { depth, width: grade })?;
    let cp = problem::compress_problem(&p, policy)?;
    io::save_bundle(&cp, dir)?;
    let report = ReductReport::new(p.graph.size(), cp.graph.size(), cp.provenance.rounds);
    outln!(out, "{report}")?;
    outln!(
        out,
        "depth {depth}, grade {grade}, policy {policy}, refinement steps {}; {} training nodes -> {} weighted entries",
        cp.provenance.rounds,
        p.train.len(),
        cp.train.len()
    )?;
    Ok(EXIT_OK)
}

fn cmd_verify(
    bundle: &Path,
    original: &Path,
    colors: Option<&Path>,
    undirected: bool,
    train: Option<&Path>,
    opts: &EquivalenceOptions,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    let cp = io::load_bundle(bundle)?;
    let files = ProblemFiles {
        edges: original,
        colors,
        train,
        undirected,
        loss: cp.loss,
    };
    let p = io::load_problem(&files, cp.hypothesis())?;
    if p.node_ids != cp.original_ids {
        return Err(Error::InvalidArgument(
            "bundle map does not cover exactly the original graph's nodes".into(),
        ));
    }
    let Hypothesis { depth, width: grade } = cp.hypothesis();

    let check = reduct::verify_reduct(&p.graph, &cp.graph, &cp.rep_of_node, depth, grade)?;
    if let Some((v, round)) = check.witness {
        outln!(
            out,
            "FAIL: node {} and its representative {} differ after {round} refinement round(s)",
            p.node_ids[v],
            cp.node_id(cp.rep_of_node[v])
        )?;
        return Ok(EXIT_VERIFY);
    }
    outln!(out, "reduct colors agree over {} round(s)", check.rounds_checked)?;

    for (i, &v) in cp.nodes.iter().enumerate() {
        if cp.features.row(i) != p.features.row(v) {
            outln!(out, "FAIL: features of node {} differ from the original", cp.node_id(i))?;
            return Ok(EXIT_VERIFY);
        }
    }

    if p.class_names != cp.class_names {
        outln!(out, "FAIL: class vocabulary differs from the original training file")?;
        return Ok(EXIT_VERIFY);
    }
    let expected = problem::weigh_targets(p.train.iter().map(|(v, t)| (*v, t)), &cp.rep_of_node);
    if expected != cp.train {
        let node = expected
            .iter()
            .zip(&cp.train)
            .find(|(a, b)| a != b)
            .map(|(a, b)| a.node.min(b.node))
            .or_else(|| expected.get(cp.train.len()).or(cp.train.get(expected.len())).map(|w| w.node))
            .expect("lists differ");
        outln!(out, "FAIL: training weights differ at node {}", cp.node_id(node))?;
        return Ok(EXIT_VERIFY);
    }
    outln!(out, "training weights match ({} total)", cp.total_weight())?;

    if depth == Depth::Finite(0) {
        outln!(out, "PASS (depth 0: no GNN layers to sample)")?;
        return Ok(EXIT_OK);
    }
    let report = problem::equivalence_report(&p, &cp, opts)?;
    outln!(
        out,
        "{} GNNs ({} layers, width {}): max loss discrepancy {:.3e}, max output discrepancy {:.3e}",
        report.samples,
        report.layers,
        report.width,
        report.max_loss_discrepancy,
        report.max_output_discrepancy
    )?;
    match report.status {
        EquivalenceStatus::Pass => {
            outln!(out, "PASS")?;
            Ok(EXIT_OK)
        }
        EquivalenceStatus::Approximate => {
            outln!(out, "APPROXIMATE: hypothesis width exceeds compression grade")?;
            Ok(EXIT_OK)
        }
        EquivalenceStatus::Fail => {
            let node = report.worst_node.map_or("-".to_string(), |v| p.node_ids[v].to_string());
            outln!(out, "FAIL: outputs differ at node {node}")?;
            Ok(EXIT_VERIFY)
        }
    }
}

fn cmd_stats(input: &GraphArgs, max_depth: Depth, grade: Grade, out: &mut dyn Write) -> Result<i32, Error> {
    let loaded = input.load()?;
    let g = &loaded.graph;
    let result = refine::refine(g, max_depth, grade);
    outln!(out, "round\tclasses\tnodes\tedges\tnode_pct\tedge_pct")?;
    for (d, partition) in result.partitions().iter().enumerate() {
        let s = Substitution::choose(g, partition, Policy::MinIncidence, Depth::Finite(d), grade);
        let r = reduct::reduce_graph(g, &s);
        let report = ReductReport::new(g.size(), r.size(), d);
        outln!(
            out,
            "{d}\t{}\t{}\t{}\t{:.2}\t{:.2}",
            partition.class_count(),
            report.reduced.nodes,
            report.reduced.simple_edges,
            100.0 * report.node_ratio,
            100.0 * report.edge_ratio
        )?;
    }
    if let Some(s) = result.stable_round() {
        outln!(out, "# stable at round {s}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_bench(sizes: &[usize], density: f64, repeats: usize, seed: u64, out: &mut dyn Write) -> Result<i32, Error> {
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("--sizes must list at least one size".into()));
    }
    if !(density.is_finite() && density >= 0.0) {
        return Err(Error::InvalidArgument("--density must be non-negative".into()));
    }
    let rows = bench::run(sizes, density, repeats, seed);
    let ratios = bench::doubling_ratios(&rows);
    outln!(out, "n+m\tn\tm\trounds\tmedian_ms\tratio")?;
    for (i, r) in rows.iter().enumerate() {
        let ratio = if i == 0 { "-".to_string() } else { format!("{:.2}", ratios[i - 1]) };
        outln!(
            out,
            "{}\t{}\t{}\t{}\t{:.3}\t{ratio}",
            r.size,
            r.nodes,
            r.edges,
            r.rounds,
            r.median.as_secs_f64() * 1e3
        )?;
    }
    Ok(EXIT_OK)
}
