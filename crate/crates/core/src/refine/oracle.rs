//! Naive color-term oracle.
//!
//! Builds the nested color terms `(own term, {{neighbor terms}})` literally
//! and compares them structurally. It shares nothing with the partition
//! machinery in the parent module and is only meant for small graphs.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::bound::Grade;
use crate::error::{Error, Result};
use crate::graph::ColoredMultigraph;

/// Largest depth the oracle accepts.
pub const MAX_ORACLE_DEPTH: usize = 6;
/// Largest graph the oracle accepts.
pub const MAX_ORACLE_NODES: usize = 512;

/// A color after `d` refinement steps, written out in full.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ColorTerm {
    Initial(String),
    Refined {
        own: Box<ColorTerm>,
        neighbors: Vec<(ColorTerm, u64)>,
    },
}

impl fmt::Display for ColorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorTerm::Initial(s) => f.write_str(s),
            ColorTerm::Refined { own, neighbors } => {
                write!(f, "({own},{{{{")?;
                let mut first = true;
                for (t, m) in neighbors {
                    for _ in 0..*m {
                        if !first {
                            f.write_str(",")?;
                        }
                        first = false;
                        write!(f, "{t}")?;
                    }
                }
                f.write_str("}})")
            }
        }
    }
}

fn check_budget(g: &ColoredMultigraph, depth: usize) -> Result<()> {
    if depth > MAX_ORACLE_DEPTH {
        return Err(Error::OracleBudget(format!(
            "depth {depth} > {MAX_ORACLE_DEPTH}"
        )));
    }
    if g.node_count() > MAX_ORACLE_NODES {
        return Err(Error::OracleBudget(format!(
            "{} nodes > {MAX_ORACLE_NODES}",
            g.node_count()
        )));
    }
    Ok(())
}

/// `colr_c^d(G)(v)` as an explicit term, neighbor multisets sorted and capped at `c`.
pub fn naive_color(g: &ColoredMultigraph, v: usize, depth: usize, grade: Grade) -> Result<ColorTerm> {
    check_budget(g, depth)?;
    if v >= g.node_count() {
        return Err(Error::NodeOutOfRange {
            node: v,
            node_count: g.node_count(),
        });
    }
    Ok(term(g, v, depth, grade))
}

fn term(g: &ColoredMultigraph, v: usize, depth: usize, grade: Grade) -> ColorTerm {
    if depth == 0 {
        return ColorTerm::Initial(g.color_payload(v).to_owned());
    }
    let own = term(g, v, depth - 1, grade);
    let mut raw: Vec<(ColorTerm, u64)> = g
        .in_edges(v)
        .map(|(u, m)| (term(g, u, depth - 1, grade), m))
        .collect();
    raw.sort_by(|a, b| a.0.cmp(&b.0));
    let mut neighbors: Vec<(ColorTerm, u64)> = Vec::new();
    for (t, m) in raw {
        match neighbors.last_mut() {
            Some((last, k)) if *last == t => *k += m,
            _ => neighbors.push((t, m)),
        }
    }
    for (_, k) in &mut neighbors {
        *k = grade.cap(*k);
    }
    ColorTerm::Refined {
        own: Box::new(own),
        neighbors,
    }
}

/// Term arena with memoized structural comparison; avoids the exponential
/// blow-up of materializing [`ColorTerm`]s for every node.
struct Arena {
    terms: Vec<Node>,
    memo: RefCell<HashMap<(usize, usize), Ordering>>,
}

enum Node {
    Leaf(String),
    Pair { own: usize, neighbors: Vec<(usize, u64)> },
}

impl Arena {
    fn cmp(&self, a: usize, b: usize) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        if let Some(&o) = self.memo.borrow().get(&(a, b)) {
            return o;
        }
        let o = match (&self.terms[a], &self.terms[b]) {
            (Node::Leaf(x), Node::Leaf(y)) => x.cmp(y),
            (Node::Leaf(_), Node::Pair { .. }) => Ordering::Less,
            (Node::Pair { .. }, Node::Leaf(_)) => Ordering::Greater,
            (
                Node::Pair { own: oa, neighbors: na },
                Node::Pair { own: ob, neighbors: nb },
            ) => self.cmp(*oa, *ob).then_with(|| {
                for (x, y) in na.iter().zip(nb) {
                    let o = self.cmp(x.0, y.0).then(x.1.cmp(&y.1));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                na.len().cmp(&nb.len())
            }),
        };
        let mut memo = self.memo.borrow_mut();
        memo.insert((a, b), o);
        memo.insert((b, a), o.reverse());
        o
    }
}

/// Partition of the nodes by equality of depth-`d` color terms, as sorted
/// member lists ordered by smallest member.
pub fn naive_partition(g: &ColoredMultigraph, depth: usize, grade: Grade) -> Result<Vec<Vec<usize>>> {
    check_budget(g, depth)?;
    let n = g.node_count();
    let mut arena = Arena {
        terms: Vec::new(),
        memo: RefCell::new(HashMap::new()),
    };
    let mut level: Vec<usize> = (0..n)
        .map(|v| {
            arena.terms.push(Node::Leaf(g.color_payload(v).to_owned()));
            arena.terms.len() - 1
        })
        .collect();
    for _ in 0..depth {
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut raw: Vec<(usize, u64)> = g.in_edges(v).map(|(u, m)| (level[u], m)).collect();
            raw.sort_by(|a, b| arena.cmp(a.0, b.0));
            let mut neighbors: Vec<(usize, u64)> = Vec::new();
            for (t, m) in raw {
                match neighbors.last_mut() {
                    Some((last, k)) if arena.cmp(*last, t) == Ordering::Equal => *k += m,
                    _ => neighbors.push((t, m)),
                }
            }
            for (_, k) in &mut neighbors {
                *k = grade.cap(*k);
            }
            arena.terms.push(Node::Pair {
                own: level[v],
                neighbors,
            });
            next.push(arena.terms.len() - 1);
        }
        level = next;
    }

    let mut classes: Vec<Vec<usize>> = Vec::new();
    'nodes: for v in 0..n {
        for class in &mut classes {
            if arena.cmp(level[class[0]], level[v]) == Ordering::Equal {
                class.push(v);
                continue 'nodes;
            }
        }
        classes.push(vec![v]);
    }
    Ok(classes)
}
