//! (Graded) color refinement.
//!
//! Round 0 partitions nodes by initial color. Each further round splits a
//! class by the multiset of classes of in-neighbors, counted with edge
//! multiplicity and capped at the grade `c`. Class ids are assigned in
//! order of first occurrence by ascending node id, so a partition has
//! exactly one representation as a `class_of` array.

pub mod oracle;

use std::collections::HashMap;

use rustc_hash::FxHashMap;

use crate::bound::{Depth, Grade};
use crate::error::{Error, Result};
use crate::graph::ColoredMultigraph;

/// A partition of the node set into refinement classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<u32>,
    offsets: Vec<usize>,
    members: Vec<u32>,
    round: usize,
}

impl Partition {
    /// Builds a partition from arbitrary class labels, renumbering them canonically.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T], round: usize) -> Self {
        let mut ids: HashMap<&T, u32> = HashMap::new();
        let class_of: Vec<u32> = labels
            .iter()
            .map(|l| {
                let next = ids.len() as u32;
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Self::from_canonical(class_of, ids.len(), round)
    }

    fn from_canonical(class_of: Vec<u32>, count: usize, round: usize) -> Self {
        let mut offsets = vec![0usize; count + 1];
        for &k in &class_of {
            offsets[k as usize + 1] += 1;
        }
        for i in 0..count {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut members = vec![0u32; class_of.len()];
        for (v, &k) in class_of.iter().enumerate() {
            members[cursor[k as usize]] = v as u32;
            cursor[k as usize] += 1;
        }
        Partition {
            class_of,
            offsets,
            members,
            round,
        }
    }

    /// Round-0 partition by initial colors.
    pub fn initial(g: &ColoredMultigraph) -> Self {
        Self::from_labels(g.colors(), 0)
    }

    pub fn node_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v] as usize
    }

    pub fn class_ids(&self) -> &[u32] {
        &self.class_of
    }

    /// Members of class `k`, ascending.
    pub fn members(&self, k: usize) -> &[u32] {
        &self.members[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn classes(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.class_count()).map(|k| self.members(k))
    }

    /// Refinement round this partition belongs to.
    pub fn round(&self) -> usize {
        self.round
    }

    /// Same grouping of nodes, regardless of round.
    pub fn same_classes(&self, other: &Partition) -> bool {
        self.class_of == other.class_of
    }

    /// Every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.node_count() == coarser.node_count()
            && self.classes().all(|members| {
                let k = coarser.class_of(members[0] as usize);
                members.iter().all(|&v| coarser.class_of(v as usize) == k)
            })
    }

    fn with_round(&self, round: usize) -> Partition {
        Partition {
            round,
            ..self.clone()
        }
    }
}

/// One refinement step: nodes stay together iff they share their current
/// class and the capped multiset of in-neighbor classes.
pub fn refine_step(g: &ColoredMultigraph, current: &Partition, grade: Grade) -> Partition {
    assert_eq!(current.node_count(), g.node_count(), "partition does not cover graph");
    step(g, current, None, grade)
}

/// Appends `v`'s signature `[own class, (class, capped count)...]` to `data`.
fn push_signature(
    g: &ColoredMultigraph,
    class: &[u32],
    v: usize,
    grade: Grade,
    counts: &mut Vec<(u32, u64)>,
    data: &mut Vec<u64>,
) {
    counts.clear();
    counts.extend(g.in_edges(v).map(|(u, m)| (class[u], m)));
    counts.sort_unstable_by_key(|e| e.0);
    data.push(class[v] as u64);
    let mut i = 0;
    while i < counts.len() {
        let k = counts[i].0;
        let mut total = 0u64;
        while i < counts.len() && counts[i].0 == k {
            // fits: per-node in-multiplicity totals are checked at construction
            total += counts[i].1;
            i += 1;
        }
        data.push(k as u64);
        data.push(grade.cap(total));
    }
}

/// Nodes whose class split going from `prev` to `cur`, plus their out-neighbors.
fn affected_nodes(g: &ColoredMultigraph, prev: &Partition, cur: &Partition) -> Vec<bool> {
    let mut affected = vec![false; g.node_count()];
    for members in cur.classes() {
        let old = prev.members(prev.class_of(members[0] as usize));
        if old.len() == members.len() {
            continue;
        }
        for &v in members {
            affected[v as usize] = true;
            for (w, _) in g.out_edges(v as usize) {
                affected[w] = true;
            }
        }
    }
    affected
}

/// Refines `cur`. With `prev` given (the partition `cur` was refined from),
/// only affected nodes are recomputed: within a class, nodes that are not
/// affected had equal signatures last round and still do, so one of them
/// stands in for all.
fn step(g: &ColoredMultigraph, cur: &Partition, prev: Option<&Partition>, grade: Grade) -> Partition {
    let n = g.node_count();
    let class = cur.class_ids();
    let affected = prev.map(|p| affected_nodes(g, p, cur));
    let is_affected = |v: usize| affected.as_ref().is_none_or(|a| a[v]);

    // Pass 1: signatures of the nodes that need one, in one flat buffer.
    // `stand_in[k]` is the unaffected member of class k whose signature
    // speaks for the unaffected rest, when the class has affected members.
    let mut data: Vec<u64> = Vec::new();
    let mut offsets: Vec<usize> = vec![0];
    let mut slot = vec![u32::MAX; n];
    let mut counts: Vec<(u32, u64)> = Vec::new();
    let mut stand_in: Vec<Option<usize>> = vec![None; cur.class_count()];
    for (k, members) in cur.classes().enumerate() {
        if !members.iter().any(|&v| is_affected(v as usize)) {
            continue;
        }
        for &v in members {
            let v = v as usize;
            if !is_affected(v) {
                if stand_in[k].is_some() {
                    continue;
                }
                stand_in[k] = Some(v);
            }
            slot[v] = (offsets.len() - 1) as u32;
            push_signature(g, class, v, grade, &mut counts, &mut data);
            offsets.push(data.len());
        }
    }

    // Pass 2: label nodes (arbitrary ids), then renumber canonically.
    let mut ids: FxHashMap<&[u64], u32> = FxHashMap::default();
    let mut whole: Vec<u32> = vec![u32::MAX; cur.class_count()];
    let mut next = 0u32;
    let mut raw = Vec::with_capacity(n);
    for v in 0..n {
        let k = class[v] as usize;
        let s = if slot[v] != u32::MAX {
            slot[v] as usize
        } else if let Some(u) = stand_in[k] {
            slot[u] as usize
        } else {
            // class untouched this round: it stays whole
            if whole[k] == u32::MAX {
                whole[k] = next;
                next += 1;
            }
            raw.push(whole[k]);
            continue;
        };
        let id = *ids.entry(&data[offsets[s]..offsets[s + 1]]).or_insert_with(|| {
            next += 1;
            next - 1
        });
        raw.push(id);
    }
    let mut canon = vec![u32::MAX; next as usize];
    let mut count = 0u32;
    let class_of = raw
        .into_iter()
        .map(|r| {
            if canon[r as usize] == u32::MAX {
                canon[r as usize] = count;
                count += 1;
            }
            canon[r as usize]
        })
        .collect();
    Partition::from_canonical(class_of, count as usize, cur.round + 1)
}

/// Outcome of iterated refinement.
#[derive(Debug, Clone)]
pub struct RefinementResult {
    partitions: Vec<Partition>,
    stable_round: Option<usize>,
    depth: Depth,
    grade: Grade,
}

impl RefinementResult {
    /// Smallest `s` with partition(s) = partition(s+1), if it was reached.
    pub fn stable_round(&self) -> Option<usize> {
        self.stable_round
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }

    pub fn depth(&self) -> Depth {
        self.depth
    }

    /// Partitions actually materialized, round 0 first.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Number of refinement steps performed, including the one that
    /// confirmed stability.
    pub fn steps(&self) -> usize {
        self.partitions.len() - 1 + usize::from(self.stable_round.is_some())
    }

    /// Partition at `round`; rounds past stabilization give the stable one.
    pub fn classes(&self, round: usize) -> Result<Partition> {
        if let Depth::Finite(d) = self.depth {
            if round > d {
                return Err(Error::RoundOutOfRange {
                    requested: round,
                    depth: d,
                });
            }
        }
        match self.partitions.get(round) {
            Some(p) => Ok(p.clone()),
            None => Ok(self.final_partition().with_round(round)),
        }
    }

    /// Partition at the requested depth (or the stable one for `d = ∞`).
    pub fn final_partition(&self) -> &Partition {
        self.partitions.last().expect("round 0 always present")
    }

    /// Class counts per computed round; when stable, the confirming round is repeated.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts: Vec<usize> = self.partitions.iter().map(Partition::class_count).collect();
        if self.stable_round.is_some() {
            counts.push(*counts.last().unwrap());
        }
        counts
    }
}

/// Runs refinement up to `depth` rounds (or until stable for `Depth::Infinite`).
///
/// Refinement stops early once a round leaves the partition unchanged.
pub fn refine(g: &ColoredMultigraph, depth: Depth, grade: Grade) -> RefinementResult {
    refine_from(g, Partition::initial(g), depth, grade)
}

/// Like [`refine`], starting from an arbitrary round-0 partition.
pub fn refine_from(
    g: &ColoredMultigraph,
    initial: Partition,
    depth: Depth,
    grade: Grade,
) -> RefinementResult {
    // A partition of n nodes can strictly refine at most n - 1 times.
    let limit = match depth {
        Depth::Finite(d) => d,
        Depth::Infinite => g.node_count().max(1),
    };
    let mut partitions = vec![initial];
    let mut stable_round = None;
    assert_eq!(partitions[0].node_count(), g.node_count(), "partition does not cover graph");
    while partitions.len() - 1 < limit {
        let k = partitions.len();
        let last = &partitions[k - 1];
        let prev = k.checked_sub(2).map(|i| &partitions[i]);
        let next = step(g, last, prev, grade);
        // next always refines last, so equal class counts means equal partitions
        if next.class_count() == last.class_count() {
            stable_round = Some(last.round());
            break;
        }
        partitions.push(next);
    }
    RefinementResult {
        partitions,
        stable_round,
        depth,
        grade,
    }
}
