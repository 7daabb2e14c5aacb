//! Substitutions and reducts.
//!
//! A substitution picks one representative per refinement class. The
//! reduct keeps only representatives; the multiplicity of `v -> w` is the
//! total multiplicity of edges from `v`'s whole class into `w`, capped at
//! the grade.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bound::{Depth, Grade};
use crate::error::{Error, Result};
use crate::graph::{ColoredMultigraph, GraphSize};
use crate::refine::{self, Partition, RefinementResult};

/// How representatives are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Minimal incidence, ties to the smallest node id. Yields a smallest reduct.
    #[default]
    MinIncidence,
    /// Smallest node id of each class.
    FirstNode,
    /// Caller-supplied representatives.
    Custom,
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-incidence" => Ok(Policy::MinIncidence),
            "first-node" => Ok(Policy::FirstNode),
            "custom" => Ok(Policy::Custom),
            _ => Err(Error::InvalidArgument(format!(
                "unknown policy {s:?} (expected min-incidence or first-node)"
            ))),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::MinIncidence => "min-incidence",
            Policy::FirstNode => "first-node",
            Policy::Custom => "custom",
        })
    }
}

/// Number of distinct classes among the in-neighbors of `w`.
pub fn incidence(g: &ColoredMultigraph, partition: &Partition, w: usize) -> usize {
    let mut classes: Vec<usize> = g.in_edges(w).map(|(u, _)| partition.class_of(u)).collect();
    classes.sort_unstable();
    classes.dedup();
    classes.len()
}

/// `ρ`: one representative per class, extended to all nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    rep_of_class: Vec<usize>,
    rep_of_node: Vec<usize>,
    depth: Depth,
    grade: Grade,
    policy: Policy,
}

impl Substitution {
    /// Representatives chosen by `policy`. `Policy::Custom` falls back to `FirstNode`.
    pub fn choose(
        g: &ColoredMultigraph,
        partition: &Partition,
        policy: Policy,
        depth: Depth,
        grade: Grade,
    ) -> Substitution {
        let reps = partition
            .classes()
            .map(|members| match policy {
                Policy::MinIncidence => members
                    .iter()
                    .map(|&v| v as usize)
                    .min_by_key(|&v| (incidence(g, partition, v), v))
                    .expect("classes are non-empty"),
                Policy::FirstNode | Policy::Custom => members[0] as usize,
            })
            .collect();
        Self::assemble(partition, reps, policy, depth, grade)
    }

    /// Validates caller-supplied representatives (one per class, each a member of its class).
    pub fn from_representatives(
        partition: &Partition,
        reps: Vec<usize>,
        depth: Depth,
        grade: Grade,
    ) -> Result<Substitution> {
        if reps.len() != partition.class_count() {
            return Err(Error::InvalidArgument(format!(
                "{} representatives for {} classes",
                reps.len(),
                partition.class_count()
            )));
        }
        for (k, &r) in reps.iter().enumerate() {
            if r >= partition.node_count() || partition.class_of(r) != k {
                return Err(Error::InvalidArgument(format!(
                    "representative {r} is not a member of class {k}"
                )));
            }
        }
        Ok(Self::assemble(partition, reps, Policy::Custom, depth, grade))
    }

    fn assemble(
        partition: &Partition,
        rep_of_class: Vec<usize>,
        policy: Policy,
        depth: Depth,
        grade: Grade,
    ) -> Substitution {
        let rep_of_node = (0..partition.node_count())
            .map(|v| rep_of_class[partition.class_of(v)])
            .collect();
        Substitution {
            rep_of_class,
            rep_of_node,
            depth,
            grade,
            policy,
        }
    }

    pub fn rep_of_class(&self, k: usize) -> usize {
        self.rep_of_class[k]
    }

    pub fn representatives(&self) -> &[usize] {
        &self.rep_of_class
    }

    pub fn rep_of_node(&self, v: usize) -> usize {
        self.rep_of_node[v]
    }

    pub fn node_map(&self) -> &[usize] {
        &self.rep_of_node
    }

    pub fn depth(&self) -> Depth {
        self.depth
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }
}

/// `G/ρ` with the correspondence to the original graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduct {
    /// Reduct over dense ids `0..k`; node `i` is original node `nodes[i]`.
    pub graph: ColoredMultigraph,
    /// Reduct node -> original node (ascending).
    pub nodes: Vec<usize>,
    /// Original node -> reduct node of its representative.
    pub index_of: Vec<usize>,
}

impl Reduct {
    pub fn size(&self) -> GraphSize {
        self.graph.size()
    }
}

/// Builds `G/ρ`.
///
/// For representatives `v, w`: `E(v -> w) = min(Σ_{v' ∈ [v]} G(v' -> w), c)`.
/// Only edges into representatives are kept; colors are carried over.
pub fn reduce_graph(g: &ColoredMultigraph, s: &Substitution) -> Reduct {
    let mut nodes: Vec<usize> = s.representatives().to_vec();
    nodes.sort_unstable();
    let mut local = vec![usize::MAX; g.node_count()];
    for (i, &r) in nodes.iter().enumerate() {
        local[r] = i;
    }
    let index_of: Vec<usize> = s.node_map().iter().map(|&r| local[r]).collect();

    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    for (wi, &w) in nodes.iter().enumerate() {
        let start = edges.len();
        edges.extend(g.in_edges(w).map(|(u, m)| (index_of[u], wi, m)));
        let block = &mut edges[start..];
        block.sort_unstable_by_key(|e| e.0);
        // merge per source class, then cap
        let mut write = start;
        let mut read = start;
        while read < edges.len() {
            let (src, dst, mut total) = edges[read];
            read += 1;
            while read < edges.len() && edges[read].0 == src {
                total += edges[read].2;
                read += 1;
            }
            edges[write] = (src, dst, s.grade().cap(total));
            write += 1;
        }
        edges.truncate(write);
    }
    let colors: Vec<&str> = nodes.iter().map(|&v| g.color_payload(v)).collect();
    let graph = ColoredMultigraph::from_edges(nodes.len(), edges, &colors)
        .expect("reduct of a valid graph is valid");
    Reduct {
        graph,
        nodes,
        index_of,
    }
}

/// Refinement, substitution and reduct for one `(c, d)` request.
#[derive(Debug, Clone)]
pub struct Compression {
    pub refinement: RefinementResult,
    pub substitution: Substitution,
    pub reduct: Reduct,
}

impl Compression {
    pub fn report(&self, original: &ColoredMultigraph) -> ReductReport {
        ReductReport::new(original.size(), self.reduct.size(), self.refinement.steps())
    }
}

/// Refines `g` at `(grade, depth)`, picks representatives by `policy` and reduces.
pub fn compress_graph(g: &ColoredMultigraph, depth: Depth, grade: Grade, policy: Policy) -> Compression {
    let refinement = refine::refine(g, depth, grade);
    let substitution = Substitution::choose(g, refinement.final_partition(), policy, depth, grade);
    let reduct = reduce_graph(g, &substitution);
    Compression {
        refinement,
        substitution,
        reduct,
    }
}

/// Result of [`verify_reduct`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    /// First `(original node, round)` whose color differs from its representative's.
    pub witness: Option<(usize, usize)>,
    pub rounds_checked: usize,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks `colr_c^r(G)(v) = colr_c^r(H)(ρ(v))` for every `v` and every
/// round `r <= d` (up to joint stability when `d = ∞`), by refining the
/// disjoint union of `g` and `h`.
pub fn verify_reduct(
    g: &ColoredMultigraph,
    h: &ColoredMultigraph,
    index_of: &[usize],
    depth: Depth,
    grade: Grade,
) -> Result<Verification> {
    let n = g.node_count();
    if index_of.len() != n {
        return Err(Error::Dimension(format!(
            "node map covers {} of {n} nodes",
            index_of.len()
        )));
    }
    if let Some(&bad) = index_of.iter().find(|&&i| i >= h.node_count()) {
        return Err(Error::NodeOutOfRange {
            node: bad,
            node_count: h.node_count(),
        });
    }
    let union = g.disjoint_union(h);
    let joint = refine::refine(&union, depth, grade);
    let rounds = joint.partitions().len();
    for (r, p) in joint.partitions().iter().enumerate() {
        for (v, &i) in index_of.iter().enumerate() {
            if p.class_of(v) != p.class_of(n + i) {
                return Ok(Verification {
                    witness: Some((v, r)),
                    rounds_checked: r + 1,
                });
            }
        }
    }
    Ok(Verification {
        witness: None,
        rounds_checked: rounds,
    })
}

/// Size comparison between a graph and its reduct.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductReport {
    pub original: GraphSize,
    pub reduced: GraphSize,
    pub node_ratio: f64,
    pub edge_ratio: f64,
    pub rounds: usize,
}

impl ReductReport {
    pub fn new(original: GraphSize, reduced: GraphSize, rounds: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
        ReductReport {
            original,
            reduced,
            node_ratio: ratio(reduced.nodes, original.nodes),
            edge_ratio: ratio(reduced.simple_edges, original.simple_edges),
            rounds,
        }
    }
}

impl fmt::Display for ReductReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes {:.2}% ({}/{}), edges {:.2}% ({}/{})",
            100.0 * self.node_ratio,
            self.reduced.nodes,
            self.original.nodes,
            100.0 * self.edge_ratio,
            self.reduced.simple_edges,
            self.original.simple_edges
        )
    }
}
