//! Text formats: edge lists, color files, training files and compressed bundles.
//!
//! Files carry external node ids, which may be sparse. On load they are
//! remapped to dense ids in ascending order of the external id.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bound::{Depth, Grade};
use crate::error::{Error, Result};
use crate::features::{format_vector, parse_vector, FeatureMatrix};
use crate::graph::{ColoredMultigraph, GraphSize, Multiplicity};
use crate::problem::{
    CompressedProblem, Hypothesis, LearningProblem, LossKind, Provenance, Target, WeightedTarget,
};
use crate::reduct::Policy;

/// Color of nodes not listed in a color file.
pub const DEFAULT_COLOR: &str = "*";

/// Version written to and expected in `meta.json`.
pub const BUNDLE_SCHEMA_VERSION: u32 = 1;

/// A graph together with the external id of every dense node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedGraph {
    pub graph: ColoredMultigraph,
    /// Dense node -> external id, strictly ascending.
    pub ids: Vec<u64>,
}

impl LoadedGraph {
    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_id(token: Option<&str>, line: usize, what: &str) -> Result<u64> {
    let t = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    t.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} {t:?}")))
}

/// Splits `id<ws>rest` into the id token and the trimmed remainder.
fn split_first(line: &str) -> (&str, &str) {
    match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], line[i..].trim()),
        None => (line, ""),
    }
}

/// Parses `src<TAB>dst[<TAB>mult]` lines (any whitespace separates fields).
pub fn parse_edge_list(text: &str) -> Result<Vec<(u64, u64, Multiplicity)>> {
    data_lines(text)
        .map(|(n, line)| {
            let mut fields = line.split_whitespace();
            let src = parse_id(fields.next(), n, "source")?;
            let dst = parse_id(fields.next(), n, "target")?;
            let mult = match fields.next() {
                Some(t) => t
                    .parse::<u64>()
                    .map_err(|_| Error::parse(n, format!("invalid multiplicity {t:?}")))?,
                None => 1,
            };
            if mult == 0 {
                return Err(Error::parse(n, "multiplicity must be at least 1"));
            }
            if fields.next().is_some() {
                return Err(Error::parse(n, "too many fields"));
            }
            Ok((src, dst, mult))
        })
        .collect()
}

/// Parses `node<TAB>color_token` lines; duplicate nodes are rejected.
pub fn parse_color_file(text: &str) -> Result<Vec<(u64, String)>> {
    let mut seen = HashMap::new();
    data_lines(text)
        .map(|(n, line)| {
            let (id, token) = split_first(line);
            let id = parse_id(Some(id), n, "node")?;
            if token.is_empty() {
                return Err(Error::parse(n, "missing color token"));
            }
            if let Some(prev) = seen.insert(id, n) {
                return Err(Error::parse(n, format!("node {id} already colored on line {prev}")));
            }
            Ok((id, token.to_owned()))
        })
        .collect()
}

/// Builds a graph from parsed edges and colors. The node set is every id
/// that occurs in either list.
pub fn assemble_graph(
    edges: &[(u64, u64, Multiplicity)],
    colors: &[(u64, String)],
    undirected: bool,
) -> Result<LoadedGraph> {
    let ids: Vec<u64> = edges
        .iter()
        .flat_map(|&(s, d, _)| [s, d])
        .chain(colors.iter().map(|(v, _)| *v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let dense = |id: u64| ids.binary_search(&id).expect("id collected above");
    let mut payloads = vec![DEFAULT_COLOR; ids.len()];
    for (v, c) in colors {
        payloads[dense(*v)] = c;
    }
    let mut list: Vec<(usize, usize, Multiplicity)> =
        edges.iter().map(|&(s, d, m)| (dense(s), dense(d), m)).collect();
    if undirected {
        let reversed: Vec<_> = list.iter().map(|&(s, d, m)| (d, s, m)).collect();
        list.extend(reversed);
    }
    let graph = ColoredMultigraph::from_edges(ids.len(), list, &payloads)?;
    Ok(LoadedGraph { graph, ids })
}

/// Reads an edge list and optional color file.
///
/// With `undirected`, the reverse of every edge is added (multiplicities
/// add up, so a listed pair `u v` / `v u` ends up with multiplicity 2 each way).
pub fn load_graph(edge_path: &Path, color_path: Option<&Path>, undirected: bool) -> Result<LoadedGraph> {
    let edges = parse_edge_list(&read(edge_path)?).map_err(|e| e.in_file(edge_path))?;
    let colors = match color_path {
        Some(p) => parse_color_file(&read(p)?).map_err(|e| e.in_file(p))?,
        None => Vec::new(),
    };
    assemble_graph(&edges, &colors, undirected)
}

/// Serializes edges as `src<TAB>dst<TAB>mult` using external ids.
pub fn format_edge_list(graph: &ColoredMultigraph, ids: &[u64]) -> String {
    let mut s = String::new();
    for (u, v, m) in graph.edges() {
        let _ = writeln!(s, "{}\t{}\t{}", ids[u], ids[v], m);
    }
    s
}

/// Serializes every node's color as `node<TAB>color`.
pub fn format_color_file(graph: &ColoredMultigraph, ids: &[u64]) -> String {
    let mut s = String::new();
    for (v, id) in ids.iter().enumerate().take(graph.node_count()) {
        let _ = writeln!(s, "{id}\t{}", graph.color_payload(v));
    }
    s
}

fn parse_target(token: &str, loss: LossKind, classes: &HashMap<&str, usize>, line: usize) -> Result<Target> {
    match loss {
        LossKind::CrossEntropy => classes
            .get(token)
            .map(|&k| Target::Class(k))
            .ok_or_else(|| Error::parse(line, format!("unknown class {token:?}"))),
        LossKind::SquaredError => parse_vector(token)
            .map(Target::Vector)
            .map_err(|m| Error::parse(line, m)),
    }
}

fn format_target(t: &Target, class_names: &[String]) -> String {
    match t {
        Target::Class(k) => class_names[*k].clone(),
        Target::Vector(v) => format_vector(v),
    }
}

/// Sorted class vocabulary: numerically if every label is an integer.
fn class_vocabulary<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut set: Vec<String> = labels.map(str::to_owned).collect::<BTreeSet<_>>().into_iter().collect();
    if set.iter().all(|l| l.parse::<u64>().is_ok()) {
        set.sort_by_key(|l| l.parse::<u64>().unwrap());
    }
    set
}

/// Training nodes with targets, and the class vocabulary (empty for regression).
pub type ParsedTrain = (Vec<(usize, Target)>, Vec<String>);

/// Parses `node<TAB>target` lines against a loaded graph.
pub fn parse_train_file(text: &str, loss: LossKind, graph: &LoadedGraph) -> Result<ParsedTrain> {
    let mut rows = Vec::new();
    let mut seen = HashMap::new();
    for (n, line) in data_lines(text) {
        let (id, token) = split_first(line);
        let id = parse_id(Some(id), n, "node")?;
        let v = graph
            .index_of(id)
            .ok_or_else(|| Error::parse(n, format!("dangling node id {id}")))?;
        if token.is_empty() {
            return Err(Error::parse(n, "missing target"));
        }
        if let Some(prev) = seen.insert(id, n) {
            return Err(Error::parse(n, format!("node {id} already listed on line {prev}")));
        }
        rows.push((n, v, token));
    }
    let class_names = match loss {
        LossKind::CrossEntropy => class_vocabulary(rows.iter().map(|r| r.2)),
        LossKind::SquaredError => Vec::new(),
    };
    let index: HashMap<&str, usize> = class_names.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut train = Vec::with_capacity(rows.len());
    let mut dim = None;
    for (n, v, token) in rows {
        let t = parse_target(token, loss, &index, n)?;
        if let Target::Vector(x) = &t {
            if *dim.get_or_insert(x.len()) != x.len() {
                return Err(Error::parse(n, "target dimension differs from earlier lines"));
            }
        }
        train.push((v, t));
    }
    Ok((train, class_names))
}

/// Paths making up a learning problem on disk.
#[derive(Debug, Clone)]
pub struct ProblemFiles<'a> {
    pub edges: &'a Path,
    pub colors: Option<&'a Path>,
    pub train: Option<&'a Path>,
    pub undirected: bool,
    pub loss: LossKind,
}

/// Loads graph, colors and training set. Features are derived from colors
/// (see [`FeatureMatrix::from_colors`]).
pub fn load_problem(files: &ProblemFiles<'_>, hypothesis: Hypothesis) -> Result<LearningProblem> {
    let loaded = load_graph(files.edges, files.colors, files.undirected)?;
    let (train, class_names) = match files.train {
        Some(p) => parse_train_file(&read(p)?, files.loss, &loaded).map_err(|e| e.in_file(p))?,
        None => (Vec::new(), Vec::new()),
    };
    let features = FeatureMatrix::from_colors(&loaded.graph);
    let mut problem = LearningProblem::new(loaded.graph, features, train, files.loss, hypothesis)?;
    problem.node_ids = loaded.ids;
    if files.loss == LossKind::CrossEntropy {
        problem.class_names = class_names;
    }
    Ok(problem)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BundleMeta {
    schema_version: u32,
    depth: Depth,
    grade: Grade,
    policy: Policy,
    loss: LossKind,
    rounds: usize,
    stable_round: Option<usize>,
    classes: Vec<String>,
    feature_dim: usize,
    original: GraphSize,
    reduced: GraphSize,
    total_weight: u64,
}

/// File names inside a bundle directory.
pub mod bundle_files {
    pub const GRAPH: &str = "graph.tsv";
    pub const COLORS: &str = "colors.tsv";
    pub const MAP: &str = "map.tsv";
    pub const TRAIN: &str = "train.tsv";
    pub const FEATURES: &str = "features.tsv";
    pub const META: &str = "meta.json";
}

/// Writes a compressed problem to `dir` (created if missing).
pub fn save_bundle(cp: &CompressedProblem, dir: &Path) -> Result<()> {
    use bundle_files::*;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ids: Vec<u64> = (0..cp.graph.node_count()).map(|i| cp.node_id(i)).collect();
    write(&dir.join(GRAPH), &format_edge_list(&cp.graph, &ids))?;
    write(&dir.join(COLORS), &format_color_file(&cp.graph, &ids))?;

    let mut map = String::new();
    for (v, &r) in cp.rep_of_node.iter().enumerate() {
        let _ = writeln!(map, "{}\t{}", cp.original_ids[v], ids[r]);
    }
    write(&dir.join(MAP), &map)?;

    let mut train = String::new();
    for w in &cp.train {
        let _ = writeln!(train, "{}\t{}\t{}", ids[w.node], format_target(&w.target, &cp.class_names), w.weight);
    }
    write(&dir.join(TRAIN), &train)?;

    let mut features = String::new();
    for (i, id) in ids.iter().enumerate() {
        let _ = writeln!(features, "{}\t{}", id, format_vector(cp.features.row(i)));
    }
    write(&dir.join(FEATURES), &features)?;

    let meta = BundleMeta {
        schema_version: BUNDLE_SCHEMA_VERSION,
        depth: cp.provenance.depth,
        grade: cp.provenance.grade,
        policy: cp.provenance.policy,
        loss: cp.loss,
        rounds: cp.provenance.rounds,
        stable_round: cp.provenance.stable_round,
        classes: cp.class_names.clone(),
        feature_dim: cp.features.cols(),
        original: cp.provenance.original,
        reduced: cp.graph.size(),
        total_weight: cp.total_weight(),
    };
    write(&dir.join(META), &(serde_json::to_string_pretty(&meta)? + "\n"))
}

fn bundle_err(file: &str, dir: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::parse(line, msg).in_file(&dir.join(file))
}

/// Reads a bundle written by [`save_bundle`].
pub fn load_bundle(dir: &Path) -> Result<CompressedProblem> {
    use bundle_files::*;
    let path = |f: &str| -> PathBuf { dir.join(f) };
    let meta: BundleMeta = serde_json::from_str(&read(&path(META))?)?;
    if meta.schema_version != BUNDLE_SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found: meta.schema_version,
            expected: BUNDLE_SCHEMA_VERSION,
        });
    }

    let edges = parse_edge_list(&read(&path(GRAPH))?).map_err(|e| e.in_file(&path(GRAPH)))?;
    let colors = parse_color_file(&read(&path(COLORS))?).map_err(|e| e.in_file(&path(COLORS)))?;
    let reduct = assemble_graph(&edges, &colors, false)?;

    let mut pairs = Vec::new();
    let mut seen = HashMap::new();
    for (n, line) in data_lines(&read(&path(MAP))?) {
        let mut f = line.split_whitespace();
        let orig = parse_id(f.next(), n, "node").map_err(|e| e.in_file(&path(MAP)))?;
        let rep = parse_id(f.next(), n, "representative").map_err(|e| e.in_file(&path(MAP)))?;
        if seen.insert(orig, n).is_some() {
            return Err(bundle_err(MAP, dir, n, format!("node {orig} mapped twice")));
        }
        let r = reduct
            .index_of(rep)
            .ok_or_else(|| bundle_err(MAP, dir, n, format!("representative {rep} missing from reduct")))?;
        pairs.push((orig, r, n));
    }
    pairs.sort_unstable_by_key(|p| p.0);
    let original_ids: Vec<u64> = pairs.iter().map(|p| p.0).collect();
    let rep_of_node: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let mut nodes = Vec::with_capacity(reduct.ids.len());
    for (i, &id) in reduct.ids.iter().enumerate() {
        let v = original_ids
            .binary_search(&id)
            .map_err(|_| bundle_err(MAP, dir, 0, format!("reduct node {id} has no map entry")))?;
        if rep_of_node[v] != i {
            return Err(bundle_err(MAP, dir, pairs[v].2, format!("representative {id} is not mapped to itself")));
        }
        nodes.push(v);
    }

    let class_index: HashMap<&str, usize> = meta.classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut train = Vec::new();
    for (n, line) in data_lines(&read(&path(TRAIN))?) {
        let f: Vec<&str> = line.split('\t').map(str::trim).collect();
        if f.len() != 3 {
            return Err(bundle_err(TRAIN, dir, n, "expected node, target and weight"));
        }
        let id = parse_id(Some(f[0]), n, "node").map_err(|e| e.in_file(&path(TRAIN)))?;
        let node = reduct
            .index_of(id)
            .ok_or_else(|| bundle_err(TRAIN, dir, n, format!("node {id} is not in the reduct")))?;
        let target = parse_target(f[1], meta.loss, &class_index, n).map_err(|e| e.in_file(&path(TRAIN)))?;
        let weight: u64 = f[2]
            .parse()
            .map_err(|_| bundle_err(TRAIN, dir, n, format!("invalid weight {:?}", f[2])))?;
        if weight == 0 {
            return Err(bundle_err(TRAIN, dir, n, "weight must be a positive integer"));
        }
        train.push(WeightedTarget { node, target, weight });
    }

    let mut rows: Vec<Option<Vec<f64>>> = vec![None; reduct.ids.len()];
    for (n, line) in data_lines(&read(&path(FEATURES))?) {
        let (id, vec) = split_first(line);
        let id = parse_id(Some(id), n, "node").map_err(|e| e.in_file(&path(FEATURES)))?;
        let i = reduct
            .index_of(id)
            .ok_or_else(|| bundle_err(FEATURES, dir, n, format!("node {id} is not in the reduct")))?;
        let x = parse_vector(vec).map_err(|m| bundle_err(FEATURES, dir, n, m))?;
        if x.len() != meta.feature_dim {
            return Err(bundle_err(FEATURES, dir, n, "feature dimension differs from meta.json"));
        }
        rows[i] = Some(x);
    }
    let rows: Vec<Vec<f64>> = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| bundle_err(FEATURES, dir, 0, format!("no features for node {}", reduct.ids[i]))))
        .collect::<Result<_>>()?;
    let features = if rows.is_empty() {
        FeatureMatrix::zeros(0, meta.feature_dim)
    } else {
        FeatureMatrix::from_rows(&rows)?
    };

    let cp = CompressedProblem {
        graph: reduct.graph,
        features,
        nodes,
        rep_of_node,
        original_ids,
        train,
        loss: meta.loss,
        class_names: meta.classes,
        provenance: Provenance {
            depth: meta.depth,
            grade: meta.grade,
            policy: meta.policy,
            rounds: meta.rounds,
            stable_round: meta.stable_round,
            original: meta.original,
        },
    };
    // The recorded total is informational; `verify` recomputes the weights
    // from the original training file and names the first differing node.
    let _ = meta.total_weight;
    Ok(cp)
}
