use crate::error::{Error, Result};
use crate::graph::ColoredMultigraph;

/// Node-indexed real feature map, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "feature buffer of length {} for {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("feature matrix".into()));
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        FeatureMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged feature rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Derives features from color payloads.
    ///
    /// If every payload is a comma-separated list of reals of one common
    /// length, those vectors are the features. Otherwise each node gets the
    /// one-hot encoding of its payload's rank among the distinct payloads in
    /// lexicographic order.
    pub fn from_colors(graph: &ColoredMultigraph) -> Self {
        let table = graph.color_table();
        let parsed: Option<Vec<Vec<f64>>> = table
            .payloads()
            .iter()
            .map(|p| parse_vector(p).ok())
            .collect();
        if let Some(vectors) = parsed {
            let dim = vectors.first().map_or(0, Vec::len);
            if dim > 0 && vectors.iter().all(|v| v.len() == dim) {
                let mut data = Vec::with_capacity(graph.node_count() * dim);
                for v in 0..graph.node_count() {
                    data.extend_from_slice(&vectors[graph.color(v).0 as usize]);
                }
                return FeatureMatrix {
                    rows: graph.node_count(),
                    cols: dim,
                    data,
                };
            }
        }
        let mut order: Vec<usize> = (0..table.len()).collect();
        order.sort_by(|&a, &b| table.payloads()[a].cmp(&table.payloads()[b]));
        let mut rank = vec![0; table.len()];
        for (r, &id) in order.iter().enumerate() {
            rank[id] = r;
        }
        let cols = table.len();
        let mut m = FeatureMatrix::zeros(graph.node_count(), cols);
        for v in 0..graph.node_count() {
            m.data[v * cols + rank[graph.color(v).0 as usize]] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.cols..(v + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, v: usize) -> &mut [f64] {
        &mut self.data[v * self.cols..(v + 1) * self.cols]
    }

    /// New matrix made of the given rows, in order.
    pub fn select_rows(&self, nodes: &[usize]) -> Self {
        let mut data = Vec::with_capacity(nodes.len() * self.cols);
        for &v in nodes {
            data.extend_from_slice(self.row(v));
        }
        FeatureMatrix {
            rows: nodes.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Parses `x1,x2,...` into finite reals.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty vector".into());
    }
    s.split(',')
        .map(|t| {
            let x: f64 = t.trim().parse().map_err(|_| format!("invalid real {t:?}"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("non-finite value {t:?}"))
            }
        })
        .collect()
}

/// Inverse of [`parse_vector`]; uses shortest round-trip formatting.
pub fn format_vector(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hot_from_labels() {
        let g = ColoredMultigraph::from_edges(3, [], &["y", "x", "y"]).unwrap();
        let f = FeatureMatrix::from_colors(&g);
        assert_eq!(f.cols(), 2);
        assert_eq!(f.row(0), &[0.0, 1.0]);
        assert_eq!(f.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn numeric_payloads_are_features() {
        let g = ColoredMultigraph::from_edges(2, [], &["1,0.5", "-2,3"]).unwrap();
        let f = FeatureMatrix::from_colors(&g);
        assert_eq!(f.row(1), &[-2.0, 3.0]);
        // mixed dimensions fall back to one-hot
        let g = ColoredMultigraph::from_edges(2, [], &["1", "1,2"]).unwrap();
        assert_eq!(FeatureMatrix::from_colors(&g).cols(), 2);
    }

    #[test]
    fn vector_format_round_trips() {
        let v = vec![0.1, -1e-300, 12345.678, 1.0 / 3.0];
        assert_eq!(parse_vector(&format_vector(&v)).unwrap(), v);
        assert!(parse_vector("1,nan").is_err());
        assert!(FeatureMatrix::new(1, 1, vec![f64::INFINITY]).is_err());
    }
}
