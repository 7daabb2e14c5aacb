//! Directed node-colored multigraphs and multiset helpers.
//!
//! Nodes are dense indices `0..n`. Edges carry integer multiplicities; an
//! absent edge has multiplicity 0 and is never stored. Both adjacency
//! directions are kept in compressed sparse form, each list sorted by
//! neighbor id with no duplicate neighbors.

use std::collections::HashMap;

use crate::bound::Grade;
use crate::error::{Error, Result};

/// Edge multiplicity. Stored entries are always `>= 1`.
pub type Multiplicity = u64;

/// Interned color token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorId(pub u32);

/// A finite multiset as a sorted list of `(element, multiplicity)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Multiset<T> {
    entries: Vec<(T, Multiplicity)>,
}

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Multiset { entries: Vec::new() }
    }

    /// Builds a multiset, merging repeated elements and dropping zero counts.
    pub fn from_counts(items: impl IntoIterator<Item = (T, Multiplicity)>) -> Self {
        let mut entries: Vec<(T, Multiplicity)> =
            items.into_iter().filter(|(_, m)| *m > 0).collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(T, Multiplicity)> = Vec::with_capacity(entries.len());
        for (x, m) in entries {
            match merged.last_mut() {
                Some((y, n)) if *y == x => *n = n.saturating_add(m),
                _ => merged.push((x, m)),
            }
        }
        Multiset { entries: merged }
    }

    pub fn get(&self, x: &T) -> Multiplicity {
        self.entries
            .binary_search_by(|(y, _)| y.cmp(x))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// `⌊M⌋_c`: every multiplicity becomes `min(M(x), c)`.
    pub fn restrict(&self, c: Grade) -> Self
    where
        T: Clone,
    {
        Multiset {
            entries: self.entries.iter().map(|(x, m)| (x.clone(), c.cap(*m))).collect(),
        }
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(x, _)| x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, Multiplicity)> {
        self.entries.iter().map(|(x, m)| (x, *m))
    }

    pub fn total(&self) -> Multiplicity {
        self.entries.iter().map(|(_, m)| *m).sum()
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn into_entries(self) -> Vec<(T, Multiplicity)> {
        self.entries
    }
}

/// Free-function form of [`Multiset::restrict`].
pub fn restrict_multiset<T: Ord + Clone>(m: &Multiset<T>, c: Grade) -> Multiset<T> {
    m.restrict(c)
}

/// Maps color payloads to dense ids in order of first interning.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ColorTable {
    payloads: Vec<String>,
    index: HashMap<String, ColorId>,
}

impl ColorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, payload: &str) -> ColorId {
        if let Some(&id) = self.index.get(payload) {
            return id;
        }
        let id = ColorId(self.payloads.len() as u32);
        self.payloads.push(payload.to_owned());
        self.index.insert(payload.to_owned(), id);
        id
    }

    pub fn lookup(&self, payload: &str) -> Option<ColorId> {
        self.index.get(payload).copied()
    }

    pub fn payload(&self, id: ColorId) -> &str {
        &self.payloads[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.payloads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payloads.is_empty()
    }

    pub fn payloads(&self) -> &[String] {
        &self.payloads
    }
}

/// `(|V|, |supp(E)|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct GraphSize {
    pub nodes: usize,
    pub simple_edges: usize,
}

impl GraphSize {
    pub fn total(&self) -> usize {
        self.nodes + self.simple_edges
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Adjacency {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    mult: Vec<Multiplicity>,
}

impl Adjacency {
    /// `edges` must be sorted by `(key, other)` and duplicate-free.
    fn from_sorted(n: usize, edges: &[(u32, u32, Multiplicity)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(k, _, _) in edges {
            offsets[k as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Adjacency {
            offsets,
            neighbors: edges.iter().map(|e| e.1).collect(),
            mult: edges.iter().map(|e| e.2).collect(),
        }
    }

    #[inline]
    fn range(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }
}

/// `G = (V, E, g)` with interned colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredMultigraph {
    node_count: usize,
    out_adj: Adjacency,
    in_adj: Adjacency,
    colors: Vec<ColorId>,
    color_table: ColorTable,
}

impl ColoredMultigraph {
    /// Builds a graph from an edge list and one color payload per node.
    ///
    /// Repeated `(src, dst)` pairs are merged by summing multiplicities.
    /// Colors are interned in order of first occurrence by ascending node id.
    pub fn from_edges<S: AsRef<str>>(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, Multiplicity)>,
        colors: &[S],
    ) -> Result<Self> {
        if colors.len() != node_count {
            return Err(Error::ColorCount {
                expected: node_count,
                actual: colors.len(),
            });
        }
        let mut table = ColorTable::new();
        let ids = colors.iter().map(|c| table.intern(c.as_ref())).collect();
        Self::from_parts(node_count, edges, ids, table)
    }

    /// Builds a graph whose nodes all carry the same color.
    pub fn uncolored(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, Multiplicity)>,
    ) -> Result<Self> {
        let colors = vec![crate::io::DEFAULT_COLOR; node_count];
        Self::from_edges(node_count, edges, &colors)
    }

    /// Builds from pre-interned colors. The table is re-interned canonically
    /// so that structurally equal graphs compare equal.
    pub(crate) fn from_parts(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, Multiplicity)>,
        colors: Vec<ColorId>,
        table: ColorTable,
    ) -> Result<Self> {
        if node_count > u32::MAX as usize {
            return Err(Error::InvalidArgument("too many nodes".into()));
        }
        let mut list = Vec::new();
        for (src, dst, m) in edges {
            for node in [src, dst] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if m == 0 {
                return Err(Error::ZeroMultiplicity { src, dst });
            }
            list.push((src as u32, dst as u32, m));
        }
        list.sort_unstable_by_key(|&(s, d, _)| (s, d));
        let mut merged: Vec<(u32, u32, Multiplicity)> = Vec::with_capacity(list.len());
        for (s, d, m) in list {
            match merged.last_mut() {
                Some(last) if last.0 == s && last.1 == d => {
                    last.2 = last
                        .2
                        .checked_add(m)
                        .ok_or(Error::MultiplicityOverflow { node: d as usize })?;
                }
                _ => merged.push((s, d, m)),
            }
        }

        // Total in-multiplicity per node must fit so that per-class counts never overflow.
        let mut in_total = vec![0u64; node_count];
        for &(_, d, m) in &merged {
            let t = &mut in_total[d as usize];
            *t = t
                .checked_add(m)
                .ok_or(Error::MultiplicityOverflow { node: d as usize })?;
        }

        let out_adj = Adjacency::from_sorted(node_count, &merged);
        let mut transposed: Vec<(u32, u32, Multiplicity)> =
            merged.iter().map(|&(s, d, m)| (d, s, m)).collect();
        transposed.sort_unstable_by_key(|&(d, s, _)| (d, s));
        let in_adj = Adjacency::from_sorted(node_count, &transposed);

        let mut canonical = ColorTable::new();
        let colors = colors
            .iter()
            .map(|&c| canonical.intern(table.payload(c)))
            .collect();

        Ok(ColoredMultigraph {
            node_count,
            out_adj,
            in_adj,
            colors,
            color_table: canonical,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of distinct `(u, v)` pairs with nonzero multiplicity.
    pub fn simple_edge_count(&self) -> usize {
        self.out_adj.neighbors.len()
    }

    pub fn size(&self) -> GraphSize {
        GraphSize {
            nodes: self.node_count,
            simple_edges: self.simple_edge_count(),
        }
    }

    pub fn color(&self, v: usize) -> ColorId {
        self.colors[v]
    }

    pub fn colors(&self) -> &[ColorId] {
        &self.colors
    }

    pub fn color_payload(&self, v: usize) -> &str {
        self.color_table.payload(self.colors[v])
    }

    pub fn color_table(&self) -> &ColorTable {
        &self.color_table
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.node_count {
            return Err(Error::NodeOutOfRange {
                node: v,
                node_count: self.node_count,
            });
        }
        Ok(())
    }

    /// `inc_G(v)`: in-neighbors with multiplicities, ascending by node.
    pub fn in_neighbors(&self, v: usize) -> Result<Multiset<usize>> {
        self.check_node(v)?;
        Ok(Multiset {
            entries: self.in_edges(v).collect(),
        })
    }

    pub fn out_neighbors(&self, v: usize) -> Result<Multiset<usize>> {
        self.check_node(v)?;
        Ok(Multiset {
            entries: self.out_edges(v).collect(),
        })
    }

    /// Unchecked in-edge iterator `(source, multiplicity)`; panics if `v` is out of range.
    #[inline]
    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = (usize, Multiplicity)> + '_ {
        self.in_adj
            .range(v)
            .map(move |i| (self.in_adj.neighbors[i] as usize, self.in_adj.mult[i]))
    }

    #[inline]
    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = (usize, Multiplicity)> + '_ {
        self.out_adj
            .range(v)
            .map(move |i| (self.out_adj.neighbors[i] as usize, self.out_adj.mult[i]))
    }

    #[inline]
    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj.range(v).len()
    }

    /// `G(u -> v)`, zero when absent.
    pub fn multiplicity(&self, u: usize, v: usize) -> Multiplicity {
        if u >= self.node_count || v >= self.node_count {
            return 0;
        }
        let r = self.out_adj.range(u);
        let slice = &self.out_adj.neighbors[r.clone()];
        match slice.binary_search(&(v as u32)) {
            Ok(i) => self.out_adj.mult[r.start + i],
            Err(_) => 0,
        }
    }

    /// All edges as `(src, dst, multiplicity)`, sorted by `(src, dst)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Multiplicity)> + '_ {
        (0..self.node_count).flat_map(move |u| self.out_edges(u).map(move |(v, m)| (u, v, m)))
    }

    /// Reverses every edge; colors are kept.
    pub fn transpose(&self) -> ColoredMultigraph {
        ColoredMultigraph {
            node_count: self.node_count,
            out_adj: self.in_adj.clone(),
            in_adj: self.out_adj.clone(),
            colors: self.colors.clone(),
            color_table: self.color_table.clone(),
        }
    }

    /// Disjoint union with `other`'s nodes shifted by `self.node_count()`.
    /// Colors are identified by payload.
    pub fn disjoint_union(&self, other: &ColoredMultigraph) -> ColoredMultigraph {
        let n = self.node_count;
        let payloads: Vec<&str> = (0..n)
            .map(|v| self.color_payload(v))
            .chain((0..other.node_count).map(|v| other.color_payload(v)))
            .collect();
        let edges = self
            .edges()
            .chain(other.edges().map(|(u, v, m)| (u + n, v + n, m)));
        ColoredMultigraph::from_edges(n + other.node_count, edges, &payloads)
            .expect("union of valid graphs is valid")
    }

    /// Relabels nodes: node `v` becomes `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<ColoredMultigraph> {
        if perm.len() != self.node_count {
            return Err(Error::InvalidArgument("permutation length mismatch".into()));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        let mut payloads = vec![""; self.node_count];
        for v in 0..self.node_count {
            payloads[perm[v]] = self.color_payload(v);
        }
        ColoredMultigraph::from_edges(
            self.node_count,
            self.edges().map(|(u, v, m)| (perm[u], perm[v], m)),
            &payloads,
        )
    }

    /// Checks that both adjacency directions encode the same sorted,
    /// duplicate-free edge multiset.
    pub fn check_consistency(&self) -> Result<()> {
        for adj in [&self.out_adj, &self.in_adj] {
            if adj.offsets.len() != self.node_count + 1 {
                return Err(Error::Invariant("adjacency offsets length".into()));
            }
            for v in 0..self.node_count {
                let slice = &adj.neighbors[adj.range(v)];
                if slice.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Invariant(format!("unsorted or duplicate neighbors at {v}")));
                }
            }
            if adj.mult.contains(&0) {
                return Err(Error::Invariant("stored zero multiplicity".into()));
            }
        }
        let mut from_in: Vec<(usize, usize, Multiplicity)> = (0..self.node_count)
            .flat_map(|v| self.in_edges(v).map(move |(u, m)| (u, v, m)))
            .collect();
        from_in.sort_unstable();
        let from_out: Vec<_> = self.edges().collect();
        if from_in != from_out {
            return Err(Error::Invariant("in/out adjacency disagree".into()));
        }
        Ok(())
    }
}
