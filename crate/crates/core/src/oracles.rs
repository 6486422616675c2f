//! Classical reference algorithms in exact arithmetic. They favour being
//! obviously correct over being fast.

use std::collections::VecDeque;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::maxflow::{flow_value, FlowNetwork};
use crate::mst::{pair_count, pairs};
use crate::num::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("brute force is limited to n <= {limit}, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("expected {expected} weights, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
    count: usize,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
            count: n,
        }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns whether `u` and `v` were in different sets.
    pub fn union(&mut self, u: usize, v: usize) -> bool {
        let (mut a, mut b) = (self.find(u), self.find(v));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.count -= 1;
        true
    }

    /// Number of sets.
    pub fn count(&self) -> usize {
        self.count
    }
}

fn check_len(n: usize, x: &[Rational]) -> Result<(), OracleError> {
    if x.len() != pair_count(n) {
        return Err(OracleError::Dimension {
            expected: pair_count(n),
            got: x.len(),
        });
    }
    Ok(())
}

/// Minimum spanning tree value of the complete graph on `n` vertices with
/// weights `x` in canonical pair order.
pub fn kruskal(n: usize, x: &[Rational]) -> Result<Rational, OracleError> {
    check_len(n, x)?;
    let mut edges: Vec<((usize, usize), &Rational)> = pairs(n).zip(x).collect();
    edges.sort_by(|a, b| a.1.cmp(b.1));
    let mut dsu = DisjointSets::new(n);
    let mut total = Rational::zero();
    for ((i, j), w) in edges {
        if dsu.union(i, j) {
            total += w;
        }
    }
    Ok(total)
}

pub const BRUTE_FORCE_LIMIT: usize = 7;

/// Minimum over all `n^(n−2)` labelled spanning trees, enumerated through
/// their Prüfer sequences.
pub fn brute_force_mst(n: usize, x: &[Rational]) -> Result<Rational, OracleError> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    check_len(n, x)?;
    if n < 2 {
        return Ok(Rational::zero());
    }
    let weight = |i: usize, j: usize| &x[crate::mst::pair_index(n, i, j)];
    let len = n - 2;
    let mut seq = vec![0usize; len];
    let mut best: Option<Rational> = None;
    loop {
        let tree = prufer_edges(n, &seq);
        let total = tree.iter().fold(Rational::zero(), |acc, &(i, j)| acc + weight(i, j));
        if best.as_ref().is_none_or(|b| total < *b) {
            best = Some(total);
        }
        // Next sequence in lexicographic order.
        let mut pos = len;
        loop {
            if pos == 0 {
                return Ok(best.expect("at least one tree"));
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < n {
                break;
            }
            seq[pos] = 0;
        }
    }
}

fn prufer_edges(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf exists");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// A maximum flow on forward arcs and its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxFlow {
    pub flow: Vec<Rational>,
    pub value: Rational,
}

/// Shortest augmenting paths by breadth-first search. Capacities are in
/// canonical arc order.
pub fn edmonds_karp(net: &FlowNetwork, nu: &[Rational]) -> MaxFlow {
    let n = net.node_count();
    let (s, t) = (net.source(), net.sink());
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, (u, _)) in net.arcs().enumerate() {
        out_arcs[u].push(a);
    }
    let mut residual: Vec<Rational> = nu.to_vec();
    let mut flow = vec![Rational::zero(); net.forward_arcs().len()];
    loop {
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &out_arcs[u] {
                let (_, v) = net.arc(a);
                if !seen[v] && residual[a].is_positive() {
                    seen[v] = true;
                    via[v] = Some(a);
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            break;
        }
        let mut path = Vec::new();
        let mut v = t;
        while let Some(a) = via[v] {
            path.push(a);
            v = net.arc(a).0;
        }
        let delta = path
            .iter()
            .map(|&a| residual[a].clone())
            .min()
            .expect("path is non-empty");
        for &a in &path {
            residual[a] -= &delta;
            residual[a ^ 1] += &delta;
            if a % 2 == 0 {
                flow[a / 2] += &delta;
            } else {
                flow[a / 2] -= &delta;
            }
        }
    }
    let value = flow_value(net, &flow);
    MaxFlow { flow, value }
}

/// Brute-force minimum `s`-`t` cut over all `2^(n−2)` node partitions.
pub fn min_cut_value(net: &FlowNetwork, nu: &[Rational]) -> Result<Rational, OracleError> {
    let n = net.node_count();
    const LIMIT: usize = 16;
    if n > LIMIT {
        return Err(OracleError::TooLarge { n, limit: LIMIT });
    }
    let (s, t) = (net.source(), net.sink());
    let inner: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << inner.len()) {
        let mut source_side = vec![false; n];
        source_side[s] = true;
        for (bit, &v) in inner.iter().enumerate() {
            source_side[v] = mask & (1 << bit) != 0;
        }
        let cut = net
            .arcs()
            .zip(nu)
            .filter(|((u, v), _)| source_side[*u] && !source_side[*v])
            .fold(Rational::zero(), |acc, (_, c)| acc + c);
        if best.as_ref().is_none_or(|b| cut < *b) {
            best = Some(cut);
        }
    }
    Ok(best.expect("at least one cut"))
}

/// Breadth-first distance from the source; `Infinite` sorts after every
/// finite distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Distances from the source over arcs with positive residual capacity
/// (`c` in canonical arc order).
pub fn residual_distances(net: &FlowNetwork, c: &[Rational]) -> Vec<Distance> {
    let n = net.node_count();
    let mut dist = vec![Distance::Infinite; n];
    let s = net.source();
    dist[s] = Distance::Finite(0);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let Distance::Finite(du) = dist[u] else { unreachable!() };
        for &v in net.neighbors(u) {
            let a = net.arc_index(u, v).expect("neighbor arc");
            if dist[v] == Distance::Infinite && c[a].is_positive() {
                dist[v] = Distance::Finite(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlowViolation {
    /// `y_uv > ν_uv` on forward arc `arc`.
    AboveCapacity {
        arc: usize,
        flow: Rational,
        capacity: Rational,
    },
    /// `y_uv < −ν_vu` on forward arc `arc`.
    BelowReverseCapacity {
        arc: usize,
        flow: Rational,
        capacity: Rational,
    },
    /// Inflow minus outflow at an inner node.
    Conservation { node: usize, excess: Rational },
}

impl fmt::Display for FlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowViolation::AboveCapacity { arc, flow, capacity } => {
                write!(f, "forward arc {arc}: flow {flow} exceeds capacity {capacity}")
            }
            FlowViolation::BelowReverseCapacity { arc, flow, capacity } => {
                write!(
                    f,
                    "forward arc {arc}: flow {flow} below minus reverse capacity {capacity}"
                )
            }
            FlowViolation::Conservation { node, excess } => write!(f, "node {node}: excess {excess}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowReport {
    pub feasible: bool,
    pub violations: Vec<FlowViolation>,
}

/// Checks `−ν_vu ≤ y_uv ≤ ν_uv` on every forward arc and conservation at
/// every node other than source and sink.
pub fn check_flow(net: &FlowNetwork, nu: &[Rational], y: &[Rational]) -> FlowReport {
    let mut violations = Vec::new();
    let mut excess = vec![Rational::zero(); net.node_count()];
    for (e, (&(u, v), ye)) in net.forward_arcs().iter().zip(y).enumerate() {
        if *ye > nu[2 * e] {
            violations.push(FlowViolation::AboveCapacity {
                arc: e,
                flow: ye.clone(),
                capacity: nu[2 * e].clone(),
            });
        }
        if *ye < -&nu[2 * e + 1] {
            violations.push(FlowViolation::BelowReverseCapacity {
                arc: e,
                flow: ye.clone(),
                capacity: nu[2 * e + 1].clone(),
            });
        }
        excess[u] -= ye;
        excess[v] += ye;
    }
    for (node, ex) in excess.into_iter().enumerate() {
        if node != net.source() && node != net.sink() && !ex.is_zero() {
            violations.push(FlowViolation::Conservation { node, excess: ex });
        }
    }
    FlowReport {
        feasible: violations.is_empty(),
        violations,
    }
}
