//! Node-level learning problems and their exact compression.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bound::{Depth, Grade};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::gnn::{self, Aggregation, Gnn, GnnConfig};
use crate::graph::{ColoredMultigraph, GraphSize};
use crate::reduct::{self, Policy};

/// Pointwise loss between a prediction and a stored target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LossKind {
    /// Softmax cross-entropy against a class index.
    #[serde(rename = "xent")]
    CrossEntropy,
    /// Squared Euclidean distance to a target vector.
    #[serde(rename = "sq")]
    SquaredError,
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xent" => Ok(LossKind::CrossEntropy),
            "sq" => Ok(LossKind::SquaredError),
            _ => Err(Error::InvalidArgument(format!("unknown loss {s:?} (expected xent or sq)"))),
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::CrossEntropy => "xent",
            LossKind::SquaredError => "sq",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Class(usize),
    Vector(Vec<f64>),
}

impl Target {
    /// Exact equality (bitwise for vectors).
    fn same(&self, other: &Target) -> bool {
        match (self, other) {
            (Target::Class(a), Target::Class(b)) => a == b,
            (Target::Vector(a), Target::Vector(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
            }
            _ => false,
        }
    }
}

impl LossKind {
    pub fn evaluate(self, prediction: &[f64], target: &Target) -> Result<f64> {
        match (self, target) {
            (LossKind::CrossEntropy, Target::Class(k)) => {
                if *k >= prediction.len() {
                    return Err(Error::Dimension(format!(
                        "class {k} but output dimension {}",
                        prediction.len()
                    )));
                }
                let max = prediction.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lse = max + prediction.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
                Ok(lse - prediction[*k])
            }
            (LossKind::SquaredError, Target::Vector(t)) => {
                if t.len() != prediction.len() {
                    return Err(Error::Dimension(format!(
                        "target dimension {} but output dimension {}",
                        t.len(),
                        prediction.len()
                    )));
                }
                Ok(prediction.iter().zip(t).map(|(p, y)| (p - y) * (p - y)).sum())
            }
            _ => Err(Error::InvalidArgument(format!("target kind does not match loss {self}"))),
        }
    }
}

/// The hypothesis space `S`: GNNs of at most `depth` layers and width `width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub depth: Depth,
    pub width: Grade,
}

/// `P = (G, T, loss, S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningProblem {
    pub graph: ColoredMultigraph,
    pub features: FeatureMatrix,
    /// Training nodes with targets, ascending by node, each node at most once.
    pub train: Vec<(usize, Target)>,
    pub loss: LossKind,
    pub hypothesis: Hypothesis,
    /// External id of every node (defaults to `0..n`).
    pub node_ids: Vec<u64>,
    /// Class label tokens, indexed by class (classification only).
    pub class_names: Vec<String>,
}

impl LearningProblem {
    /// Checks the problem's invariants and sorts the training set.
    pub fn new(
        graph: ColoredMultigraph,
        features: FeatureMatrix,
        mut train: Vec<(usize, Target)>,
        loss: LossKind,
        hypothesis: Hypothesis,
    ) -> Result<Self> {
        let n = graph.node_count();
        if features.rows() != n {
            return Err(Error::Dimension(format!("{} feature rows for {n} nodes", features.rows())));
        }
        train.sort_by_key(|(v, _)| *v);
        for pair in train.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidArgument(format!("node {} trained twice", pair[0].0)));
            }
        }
        let mut vector_dim = None;
        for (v, t) in &train {
            if *v >= n {
                return Err(Error::NodeOutOfRange { node: *v, node_count: n });
            }
            match (loss, t) {
                (LossKind::CrossEntropy, Target::Class(_)) => {}
                (LossKind::SquaredError, Target::Vector(x)) => {
                    if *vector_dim.get_or_insert(x.len()) != x.len() {
                        return Err(Error::Dimension("regression targets differ in dimension".into()));
                    }
                }
                _ => return Err(Error::InvalidArgument(format!("target of node {v} does not match loss {loss}"))),
            }
        }
        let max_class = train
            .iter()
            .filter_map(|(_, t)| match t {
                Target::Class(k) => Some(*k + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        Ok(LearningProblem {
            node_ids: (0..n as u64).collect(),
            class_names: (0..max_class).map(|k| k.to_string()).collect(),
            graph,
            features,
            train,
            loss,
            hypothesis,
        })
    }

    /// Output dimension implied by the targets.
    pub fn output_dim(&self) -> usize {
        match self.loss {
            LossKind::CrossEntropy => self.class_names.len().max(1),
            LossKind::SquaredError => self
                .train
                .iter()
                .find_map(|(_, t)| match t {
                    Target::Vector(x) => Some(x.len()),
                    _ => None,
                })
                .unwrap_or(1),
        }
    }
}

/// One weighted entry of `T/ρ`: `weight` original training nodes of the
/// representative's class share `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTarget {
    pub node: usize,
    pub target: Target,
    pub weight: u64,
}

/// Compression parameters and sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub depth: Depth,
    pub grade: Grade,
    pub policy: Policy,
    /// Refinement steps performed.
    pub rounds: usize,
    pub stable_round: Option<usize>,
    pub original: GraphSize,
}

/// `P/ρ = (G/ρ, T/ρ, loss/ρ, S)` with `loss/ρ` stored as target weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedProblem {
    pub graph: ColoredMultigraph,
    pub features: FeatureMatrix,
    /// Reduct node -> original node (ascending).
    pub nodes: Vec<usize>,
    /// Original node -> reduct node.
    pub rep_of_node: Vec<usize>,
    pub original_ids: Vec<u64>,
    pub train: Vec<WeightedTarget>,
    pub loss: LossKind,
    pub class_names: Vec<String>,
    pub provenance: Provenance,
}

impl CompressedProblem {
    pub fn total_weight(&self) -> u64 {
        self.train.iter().map(|t| t.weight).sum()
    }

    /// External id of reduct node `i`.
    pub fn node_id(&self, i: usize) -> u64 {
        self.original_ids[self.nodes[i]]
    }

    pub fn hypothesis(&self) -> Hypothesis {
        Hypothesis {
            depth: self.provenance.depth,
            width: self.provenance.grade,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self.loss {
            LossKind::CrossEntropy => self.class_names.len().max(1),
            LossKind::SquaredError => self
                .train
                .iter()
                .find_map(|t| match &t.target {
                    Target::Vector(x) => Some(x.len()),
                    _ => None,
                })
                .unwrap_or(1),
        }
    }
}

/// Groups training targets of each class onto its representative.
pub(crate) fn weigh_targets<'a>(
    train: impl IntoIterator<Item = (usize, &'a Target)>,
    rep_of_node: &[usize],
) -> Vec<WeightedTarget> {
    let mut by_rep: Vec<(usize, &Target)> = train.into_iter().map(|(v, t)| (rep_of_node[v], t)).collect();
    by_rep.sort_by_key(|(r, _)| *r);
    let mut out: Vec<WeightedTarget> = Vec::new();
    let mut start = 0;
    for (node, target) in by_rep.iter().copied() {
        if out.last().is_some_and(|w| w.node != node) {
            start = out.len();
        }
        match out[start..].iter_mut().find(|w| w.node == node && w.target.same(target)) {
            Some(w) => w.weight += 1,
            None => out.push(WeightedTarget {
                node,
                target: target.clone(),
                weight: 1,
            }),
        }
    }
    out
}

/// Refines at the hypothesis's `(width, depth)`, reduces the graph and
/// folds the training set onto representatives.
pub fn compress_problem(p: &LearningProblem, policy: Policy) -> Result<CompressedProblem> {
    let Hypothesis { depth, width } = p.hypothesis;
    let c = reduct::compress_graph(&p.graph, depth, width, policy);
    let partition = c.refinement.final_partition();
    for members in partition.classes() {
        let first = members[0] as usize;
        let row = p.features.row(first);
        if let Some(&other) = members[1..]
            .iter()
            .find(|&&v| p.features.row(v as usize).iter().zip(row).any(|(a, b)| a.to_bits() != b.to_bits()))
        {
            return Err(Error::FeatureConflict {
                first,
                second: other as usize,
            });
        }
    }
    let report = c.report(&p.graph);
    let train = weigh_targets(p.train.iter().map(|(v, t)| (*v, t)), &c.reduct.index_of);
    Ok(CompressedProblem {
        features: p.features.select_rows(&c.reduct.nodes),
        graph: c.reduct.graph,
        nodes: c.reduct.nodes,
        rep_of_node: c.reduct.index_of,
        original_ids: p.node_ids.clone(),
        train,
        loss: p.loss,
        class_names: p.class_names.clone(),
        provenance: Provenance {
            depth,
            grade: width,
            policy,
            rounds: report.rounds,
            stable_round: c.refinement.stable_round(),
            original: report.original,
        },
    })
}

fn check_output(gnn: &Gnn, features: &FeatureMatrix, q: usize, train_empty: bool) -> Result<()> {
    if gnn.config.input_dim() != features.cols() {
        return Err(Error::Dimension(format!(
            "GNN input dimension {} but features have {}",
            gnn.config.input_dim(),
            features.cols()
        )));
    }
    if !train_empty && gnn.config.output_dim() < q {
        return Err(Error::Dimension(format!(
            "GNN output dimension {} but problem needs {q}",
            gnn.config.output_dim()
        )));
    }
    Ok(())
}

/// `Σ_{v ∈ T} loss(v, L(G)(v))`.
pub fn evaluate_loss(p: &LearningProblem, gnn: &Gnn) -> Result<f64> {
    check_output(gnn, &p.features, p.output_dim(), p.train.is_empty())?;
    if p.train.is_empty() {
        return Ok(0.0);
    }
    let out = gnn::forward(&p.graph, &p.features, gnn)?;
    p.train
        .iter()
        .map(|(v, t)| p.loss.evaluate(out.row(*v), t))
        .sum()
}

/// `Σ weight · loss(target, L(G')(v))` over the weighted training set.
pub fn evaluate_compressed_loss(cp: &CompressedProblem, gnn: &Gnn) -> Result<f64> {
    check_output(gnn, &cp.features, cp.output_dim(), cp.train.is_empty())?;
    if cp.train.is_empty() {
        return Ok(0.0);
    }
    let out = gnn::forward(&cp.graph, &cp.features, gnn)?;
    cp.train
        .iter()
        .map(|w| Ok(w.weight as f64 * cp.loss.evaluate(out.row(w.node), &w.target)?))
        .sum()
}

/// Options for [`equivalence_report`].
#[derive(Debug, Clone)]
pub struct EquivalenceOptions {
    pub gnns: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub hidden_dim: usize,
    /// Layer count used when the hypothesis depth is unbounded; defaults to
    /// the number of refinement steps plus one.
    pub unbounded_depth: Option<usize>,
    /// Width of the sampled GNNs; defaults to the compression grade.
    pub width: Option<Grade>,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions {
            gnns: 5,
            seed: 0,
            tolerance: 1e-6,
            hidden_dim: 16,
            unbounded_depth: None,
            width: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivalenceStatus {
    Pass,
    /// Discrepancies found, but the sampled GNNs are wider than the
    /// compression grade, so exactness was never promised.
    Approximate,
    Fail,
}

impl fmt::Display for EquivalenceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquivalenceStatus::Pass => "pass",
            EquivalenceStatus::Approximate => "approximate",
            EquivalenceStatus::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub samples: usize,
    pub layers: usize,
    pub width: Grade,
    /// `max |loss − loss'| / (1 + |loss|)`.
    pub max_loss_discrepancy: f64,
    /// `max_v ‖L(G)(v) − L(G')(ρ(v))‖∞ / (1 + ‖L(G)(v)‖∞)`.
    pub max_output_discrepancy: f64,
    /// Original node with the largest output discrepancy.
    pub worst_node: Option<usize>,
    pub status: EquivalenceStatus,
}

/// Samples GNNs from the hypothesis space and compares losses and per-node
/// outputs on `p` and `cp`. Aggregations cycle through sum, mean and max.
pub fn equivalence_report(
    p: &LearningProblem,
    cp: &CompressedProblem,
    opts: &EquivalenceOptions,
) -> Result<EquivalenceReport> {
    if cp.rep_of_node.len() != p.graph.node_count() {
        return Err(Error::Dimension("compressed problem does not match original".into()));
    }
    let layers = match p.hypothesis.depth {
        Depth::Finite(0) => {
            return Err(Error::InvalidArgument("hypothesis depth 0 has no GNN layers to sample".into()))
        }
        Depth::Finite(d) => d,
        Depth::Infinite => opts.unbounded_depth.unwrap_or(cp.provenance.rounds + 1).max(1),
    };
    let width = opts.width.unwrap_or(cp.provenance.grade);
    let q = p.output_dim();
    let mut dims = vec![p.features.cols()];
    dims.extend(std::iter::repeat_n(opts.hidden_dim, layers - 1));
    dims.push(q);

    let aggs = [Aggregation::Sum, Aggregation::Mean, Aggregation::Max];
    let mut max_loss = 0.0f64;
    let mut max_out = 0.0f64;
    let mut worst_node = None;
    for i in 0..opts.gnns {
        let config = GnnConfig::uniform(&dims, aggs[i % aggs.len()], width)?;
        let gnn = gnn::sample_gnn(&config, opts.seed.wrapping_add(i as u64))?;
        let loss = evaluate_loss(p, &gnn)?;
        let loss_c = evaluate_compressed_loss(cp, &gnn)?;
        max_loss = max_loss.max((loss - loss_c).abs() / (1.0 + loss.abs()));

        let out = gnn::forward(&p.graph, &p.features, &gnn)?;
        let out_c = gnn::forward(&cp.graph, &cp.features, &gnn)?;
        for v in 0..p.graph.node_count() {
            let a = out.row(v);
            let b = out_c.row(cp.rep_of_node[v]);
            let scale = 1.0 + a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale;
            if diff > max_out || diff.is_nan() {
                max_out = if diff.is_nan() { f64::INFINITY } else { diff };
                worst_node = Some(v);
            }
        }
    }
    let ok = max_loss <= opts.tolerance && max_out <= opts.tolerance;
    let status = if ok {
        EquivalenceStatus::Pass
    } else if !cp.provenance.grade.covers(width) {
        EquivalenceStatus::Approximate
    } else {
        EquivalenceStatus::Fail
    };
    Ok(EquivalenceReport {
        samples: opts.gnns,
        layers,
        width,
        max_loss_discrepancy: max_loss,
        max_output_discrepancy: max_out,
        worst_node,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn example_problem(depth: Depth, train: Vec<(usize, Target)>) -> LearningProblem {
        let g = fixtures::worked_example();
        let x = FeatureMatrix::zeros(6, 1);
        // features must agree within classes: use a constant feature
        let x = FeatureMatrix::new(6, 1, x.as_slice().iter().map(|_| 1.0).collect()).unwrap();
        let mut p = LearningProblem::new(
            g,
            x,
            train,
            LossKind::CrossEntropy,
            Hypothesis {
                depth,
                width: Grade::Infinite,
            },
        )
        .unwrap();
        p.class_names = vec!["y".into(), "z".into()];
        p
    }

    #[test]
    fn example_weights_land_on_b3() {
        let p = example_problem(Depth::Finite(1), vec![(3, Target::Class(0)), (4, Target::Class(0))]);
        let cp = compress_problem(&p, Policy::MinIncidence).unwrap();
        assert_eq!(
            cp.train,
            vec![WeightedTarget {
                node: 2,
                target: Target::Class(0),
                weight: 2
            }]
        );
        assert_eq!(cp.node_id(2), 5);
        assert_eq!(cp.total_weight(), 2);
    }

    #[test]
    fn mixed_targets_split_by_value() {
        let p = example_problem(
            Depth::Finite(1),
            vec![(3, Target::Class(1)), (4, Target::Class(0)), (5, Target::Class(1))],
        );
        let cp = compress_problem(&p, Policy::MinIncidence).unwrap();
        let w: Vec<_> = cp.train.iter().map(|w| (w.node, w.target.clone(), w.weight)).collect();
        assert_eq!(w, vec![(2, Target::Class(1), 2), (2, Target::Class(0), 1)]);
    }

    #[test]
    fn empty_training_set() {
        let p = example_problem(Depth::Finite(1), vec![]);
        let cp = compress_problem(&p, Policy::MinIncidence).unwrap();
        assert!(cp.train.is_empty());
        assert_eq!(cp.graph.node_count(), 3);
        let config = GnnConfig::uniform(&[1, 2], Aggregation::Sum, Grade::Infinite).unwrap();
        let gnn = gnn::sample_gnn(&config, 3).unwrap();
        assert_eq!(evaluate_loss(&p, &gnn).unwrap(), 0.0);
        assert_eq!(evaluate_compressed_loss(&cp, &gnn).unwrap(), 0.0);
    }

    #[test]
    fn discrete_partition_keeps_unit_weights() {
        let g = ColoredMultigraph::from_edges(3, [(0, 1, 1), (1, 2, 1)], &["p", "q", "r"]).unwrap();
        let x = FeatureMatrix::from_colors(&g);
        let p = LearningProblem::new(
            g.clone(),
            x,
            vec![(0, Target::Vector(vec![1.0])), (2, Target::Vector(vec![0.5]))],
            LossKind::SquaredError,
            Hypothesis {
                depth: Depth::Infinite,
                width: Grade::Infinite,
            },
        )
        .unwrap();
        let cp = compress_problem(&p, Policy::MinIncidence).unwrap();
        assert_eq!(cp.graph, g);
        assert!(cp.train.iter().all(|w| w.weight == 1));
    }

    #[test]
    fn feature_conflict_is_rejected() {
        let g = ColoredMultigraph::uncolored(2, []).unwrap();
        let x = FeatureMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let p = LearningProblem::new(
            g,
            x,
            vec![],
            LossKind::SquaredError,
            Hypothesis {
                depth: Depth::Finite(1),
                width: Grade::Infinite,
            },
        )
        .unwrap();
        assert!(matches!(
            compress_problem(&p, Policy::MinIncidence),
            Err(Error::FeatureConflict { first: 0, second: 1 })
        ));
    }

    #[test]
    fn losses() {
        let sq = LossKind::SquaredError;
        assert_eq!(sq.evaluate(&[1.0, 2.0], &Target::Vector(vec![1.0, 2.0])).unwrap(), 0.0);
        let xe = LossKind::CrossEntropy.evaluate(&[0.0, 0.0], &Target::Class(1)).unwrap();
        assert!((xe - 2f64.ln()).abs() < 1e-15);
        assert!(sq.evaluate(&[1.0], &Target::Class(0)).is_err());
        assert!(LossKind::CrossEntropy.evaluate(&[1.0], &Target::Class(3)).is_err());
    }

    #[test]
    fn invalid_problems_rejected() {
        let g = ColoredMultigraph::uncolored(2, []).unwrap();
        let x = FeatureMatrix::zeros(2, 1);
        let h = Hypothesis {
            depth: Depth::Finite(1),
            width: Grade::Infinite,
        };
        assert!(LearningProblem::new(g.clone(), x.clone(), vec![(2, Target::Class(0))], LossKind::CrossEntropy, h).is_err());
        assert!(LearningProblem::new(g.clone(), x.clone(), vec![(0, Target::Class(0))], LossKind::SquaredError, h).is_err());
        assert!(LearningProblem::new(
            g.clone(),
            x.clone(),
            vec![(0, Target::Class(0)), (0, Target::Class(1))],
            LossKind::CrossEntropy,
            h
        )
        .is_err());
        assert!(LearningProblem::new(g, FeatureMatrix::zeros(3, 1), vec![], LossKind::CrossEntropy, h).is_err());
    }

    #[test]
    fn example_equivalence() {
        let p = example_problem(Depth::Finite(1), vec![(3, Target::Class(0)), (4, Target::Class(1))]);
        let cp = compress_problem(&p, Policy::MinIncidence).unwrap();
        let report = equivalence_report(&p, &cp, &EquivalenceOptions::default()).unwrap();
        assert_eq!(report.status, EquivalenceStatus::Pass);
        assert!(report.max_loss_discrepancy <= 1e-6);
    }

    #[test]
    fn graded_compression_is_approximate_for_wider_gnns() {
        let g = fixtures::star_of_stars(3, 4);
        let x = FeatureMatrix::from_colors(&g);
        let p = LearningProblem::new(
            g,
            x,
            vec![(0, Target::Vector(vec![1.0]))],
            LossKind::SquaredError,
            Hypothesis {
                depth: Depth::Finite(2),
                width: Grade::Finite(1),
            },
        )
        .unwrap();
        let cp = compress_problem(&p, Policy::MinIncidence).unwrap();
        let exact = equivalence_report(&p, &cp, &EquivalenceOptions::default()).unwrap();
        assert_eq!(exact.status, EquivalenceStatus::Pass);
        let wide = equivalence_report(
            &p,
            &cp,
            &EquivalenceOptions {
                width: Some(Grade::Infinite),
                gnns: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(wide.status, EquivalenceStatus::Approximate);
    }
}
