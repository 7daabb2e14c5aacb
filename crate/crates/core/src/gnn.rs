//! Reference aggregate-combine GNN evaluator on colored multigraphs.
//!
//! Each layer computes `act(W_self · x[v] + W_agg · agg(⌊{{x[w] | w ∈ inc(v)}}⌋_c) + b)`.
//! The neighbor multiset is a multiset of *feature vectors*: neighbors with
//! bitwise identical rows are grouped, their multiplicities summed and then
//! capped at the width `c`. Groups are visited in a fixed order of their
//! bit patterns, so the aggregate depends only on the multiset, never on
//! node ids. Two nodes whose capped multisets agree therefore get bitwise
//! identical outputs, which is what makes equivalence checks exact.

use std::cmp::Ordering;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bound::Grade;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::graph::ColoredMultigraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Sum,
    Mean,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub input_dim: usize,
    pub output_dim: usize,
    pub aggregation: Aggregation,
    pub activation: Activation,
}

/// Shape of a GNN: its layers and the width `c` of every aggregation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnnConfig {
    pub width: Grade,
    pub layers: Vec<LayerSpec>,
}

impl GnnConfig {
    /// `dims = [p, h1, ..., q]`; hidden layers use ReLU, the last layer is linear.
    pub fn uniform(dims: &[usize], aggregation: Aggregation, width: Grade) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidArgument("a GNN needs at least one layer".into()));
        }
        let k = dims.len() - 1;
        let layers = (0..k)
            .map(|i| LayerSpec {
                input_dim: dims[i],
                output_dim: dims[i + 1],
                aggregation,
                activation: if i + 1 == k {
                    Activation::Identity
                } else {
                    Activation::Relu
                },
            })
            .collect();
        let config = GnnConfig { width, layers };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidArgument("a GNN needs at least one layer".into()));
        }
        for (i, pair) in self.layers.windows(2).enumerate() {
            if pair[0].output_dim != pair[1].input_dim {
                return Err(Error::Dimension(format!(
                    "layer {i} outputs {} but layer {} expects {}",
                    pair[0].output_dim,
                    i + 1,
                    pair[1].input_dim
                )));
            }
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.output_dim)
    }
}

/// Parameters of one layer; matrices are row-major `output_dim × input_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub w_self: Vec<f64>,
    pub w_agg: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gnn {
    pub config: GnnConfig,
    pub params: Vec<LayerParams>,
}

impl Gnn {
    pub fn new(config: GnnConfig, params: Vec<LayerParams>) -> Result<Self> {
        let gnn = Gnn { config, params };
        gnn.validate()?;
        Ok(gnn)
    }

    fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.params.len() != self.config.layers.len() {
            return Err(Error::Dimension(format!(
                "{} parameter sets for {} layers",
                self.params.len(),
                self.config.layers.len()
            )));
        }
        for (i, (spec, p)) in self.config.layers.iter().zip(&self.params).enumerate() {
            let mat = spec.input_dim * spec.output_dim;
            if p.w_self.len() != mat || p.w_agg.len() != mat || p.bias.len() != spec.output_dim {
                return Err(Error::Dimension(format!("layer {i} parameter shapes")));
            }
            if p.w_self.iter().chain(&p.w_agg).chain(&p.bias).any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("layer {i} parameters")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and shape-checks a serialized GNN.
    pub fn from_json(s: &str) -> Result<Self> {
        let gnn: Gnn = serde_json::from_str(s)?;
        gnn.validate()?;
        Ok(gnn)
    }
}

/// Draws every parameter uniformly from `[-1, 1]` with ChaCha8 seeded by
/// `seed`, layer by layer in the order `w_self`, `w_agg`, `bias` (row-major).
pub fn sample_gnn(config: &GnnConfig, seed: u64) -> Result<Gnn> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-1.0f64, 1.0);
    let params = config
        .layers
        .iter()
        .map(|l| {
            let mat = l.input_dim * l.output_dim;
            let w_self = (0..mat).map(|_| dist.sample(&mut rng)).collect();
            let w_agg = (0..mat).map(|_| dist.sample(&mut rng)).collect();
            let bias = (0..l.output_dim).map(|_| dist.sample(&mut rng)).collect();
            LayerParams { w_self, w_agg, bias }
        })
        .collect();
    Gnn::new(config.clone(), params)
}

fn cmp_bits(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().map(|x| x.to_bits()).cmp(b.iter().map(|x| x.to_bits()))
}

/// Aggregates the capped in-neighbor multiset of `v` into `out` (length `p`).
fn aggregate(
    g: &ColoredMultigraph,
    x: &FeatureMatrix,
    v: usize,
    aggregation: Aggregation,
    width: Grade,
    scratch: &mut Vec<(usize, u64)>,
    out: &mut [f64],
) {
    out.iter_mut().for_each(|o| *o = 0.0);
    scratch.clear();
    scratch.extend(g.in_edges(v));
    if scratch.is_empty() {
        return;
    }
    scratch.sort_by(|a, b| cmp_bits(x.row(a.0), x.row(b.0)));
    // collapse neighbors with identical rows into (row owner, capped count)
    let mut groups = 0;
    let mut i = 0;
    while i < scratch.len() {
        let (u, mut count) = scratch[i];
        i += 1;
        while i < scratch.len() && cmp_bits(x.row(scratch[i].0), x.row(u)) == Ordering::Equal {
            count = count.saturating_add(scratch[i].1);
            i += 1;
        }
        scratch[groups] = (u, width.cap(count));
        groups += 1;
    }
    scratch.truncate(groups);

    match aggregation {
        Aggregation::Sum | Aggregation::Mean => {
            let mut total = 0u64;
            for &(u, k) in scratch.iter() {
                let k_f = k as f64;
                for (o, xi) in out.iter_mut().zip(x.row(u)) {
                    *o += k_f * xi;
                }
                total = total.saturating_add(k);
            }
            if aggregation == Aggregation::Mean {
                let t = total as f64;
                out.iter_mut().for_each(|o| *o /= t);
            }
        }
        Aggregation::Max => {
            out.copy_from_slice(x.row(scratch[0].0));
            for &(u, _) in &scratch[1..] {
                for (o, xi) in out.iter_mut().zip(x.row(u)) {
                    *o = o.max(*xi);
                }
            }
        }
    }
}

/// One layer applied to every node.
pub fn forward_layer(
    g: &ColoredMultigraph,
    x: &FeatureMatrix,
    spec: &LayerSpec,
    params: &LayerParams,
    width: Grade,
) -> Result<FeatureMatrix> {
    if x.rows() != g.node_count() {
        return Err(Error::Dimension(format!(
            "{} feature rows for {} nodes",
            x.rows(),
            g.node_count()
        )));
    }
    if x.cols() != spec.input_dim {
        return Err(Error::Dimension(format!(
            "features have {} columns, layer expects {}",
            x.cols(),
            spec.input_dim
        )));
    }
    let (p, q) = (spec.input_dim, spec.output_dim);
    let mut out = FeatureMatrix::zeros(g.node_count(), q);
    let mut agg = vec![0.0; p];
    let mut scratch = Vec::new();
    for v in 0..g.node_count() {
        aggregate(g, x, v, spec.aggregation, width, &mut scratch, &mut agg);
        let own = x.row(v);
        let row = out.row_mut(v);
        for (j, o) in row.iter_mut().enumerate() {
            let ws = &params.w_self[j * p..(j + 1) * p];
            let wa = &params.w_agg[j * p..(j + 1) * p];
            let mut acc = params.bias[j];
            for k in 0..p {
                acc += ws[k] * own[k] + wa[k] * agg[k];
            }
            *o = spec.activation.apply(acc);
        }
    }
    Ok(out)
}

/// `(L_k ∘ ... ∘ L_1)(G)`.
pub fn forward(g: &ColoredMultigraph, x: &FeatureMatrix, gnn: &Gnn) -> Result<FeatureMatrix> {
    let mut h = x.clone();
    for (spec, params) in gnn.config.layers.iter().zip(&gnn.params) {
        h = forward_layer(g, &h, spec, params, gnn.config.width)?;
    }
    Ok(h)
}
