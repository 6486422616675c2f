use std::str::FromStr;

use num_traits::Signed;
use thiserror::Error;

use crate::num::{parse_rational, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("a flow network needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("arc ({0}, {1}) is a self-loop or leaves the node range")]
    BadArc(usize, usize),
    #[error("arc ({0}, {1}) listed twice")]
    DuplicateArc(usize, usize),
    #[error("capacity of arc ({0}, {1}) is negative")]
    NegativeCapacity(usize, usize),
    #[error("path length k = {k} outside 1..={max}")]
    PathLength { k: usize, max: usize },
    #[error("expected {expected} capacities, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A fixed digraph on nodes `0..n` with source `0` and sink `n − 1`, closed
/// under reversal.
///
/// Arcs are indexed canonically: forward arc `e` (the `e`-th pair `(u, v)`,
/// `u < v`, in lexicographic order) has index `2e`, its reverse `(v, u)` has
/// index `2e + 1`. Capacity and residual vectors use this order; flow
/// vectors are indexed by forward arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowNetwork {
    n: usize,
    forward: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl FlowNetwork {
    /// Builds the network from arcs given in either direction; each
    /// unordered pair yields one forward arc and its reverse.
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, FlowError> {
        if n < 2 {
            return Err(FlowError::TooFewNodes(n));
        }
        let mut forward = Vec::new();
        for (u, v) in arcs {
            if u >= n || v >= n || u == v {
                return Err(FlowError::BadArc(u, v));
            }
            forward.push((u.min(v), u.max(v)));
        }
        forward.sort_unstable();
        forward.dedup();
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in &forward {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(FlowNetwork { n, forward, neighbors })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.n - 1
    }

    /// Forward arcs `(u, v)` with `u < v`, in canonical order.
    pub fn forward_arcs(&self) -> &[(usize, usize)] {
        &self.forward
    }

    /// `m = |E|`, counting both directions.
    pub fn arc_count(&self) -> usize {
        2 * self.forward.len()
    }

    /// Endpoints of arc `a` in the canonical order.
    pub fn arc(&self, a: usize) -> (usize, usize) {
        let (u, v) = self.forward[a / 2];
        if a.is_multiple_of(2) {
            (u, v)
        } else {
            (v, u)
        }
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.arc_count()).map(|a| self.arc(a))
    }

    pub fn forward_index(&self, u: usize, v: usize) -> Option<usize> {
        self.forward.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn arc_index(&self, u: usize, v: usize) -> Option<usize> {
        self.forward_index(u, v).map(|e| 2 * e + usize::from(u > v))
    }

    /// Successors of `v` in ascending order; equal to its predecessors since
    /// the arc set is closed under reversal.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }
}

/// A network together with capacities in canonical arc order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowInstance {
    pub network: FlowNetwork,
    pub capacities: Vec<Rational>,
}

impl FlowInstance {
    /// Pairs `(u, v, capacity)` with 0-based nodes; absent reverse arcs get
    /// capacity 0.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize, Rational)]) -> Result<Self, FlowError> {
        let network = FlowNetwork::new(n, arcs.iter().map(|a| (a.0, a.1)))?;
        let mut capacities: Vec<Option<Rational>> = vec![None; network.arc_count()];
        for (u, v, cap) in arcs {
            if cap.is_negative() {
                return Err(FlowError::NegativeCapacity(*u, *v));
            }
            let slot = &mut capacities[network.arc_index(*u, *v).expect("arc was just added")];
            if slot.is_some() {
                return Err(FlowError::DuplicateArc(*u, *v));
            }
            *slot = Some(cap.clone());
        }
        Ok(FlowInstance {
            network,
            capacities: capacities.into_iter().map(Option::unwrap_or_default).collect(),
        })
    }
}

impl FromStr for FlowInstance {
    type Err = FlowError;

    /// Header `n m directed source=1 sink=n`, then `m` lines
    /// `u v capacity` with 1-based nodes. Blank lines and `#` comments are
    /// skipped. The source must be node 1 and the sink node `n`.
    fn from_str(text: &str) -> Result<Self, FlowError> {
        let err = |line: usize, message: &str| FlowError::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [n, m, "directed", rest @ ..] = fields.as_slice() else {
            return Err(err(hline, "expected header `n m directed source=1 sink=n`"));
        };
        let n: usize = n.parse().map_err(|_| err(hline, "bad node count"))?;
        let m: usize = m.parse().map_err(|_| err(hline, "bad arc count"))?;
        for field in rest {
            let ok = match field.split_once('=') {
                Some(("source", s)) => s == "1",
                Some(("sink", t)) => t == "n" || t.parse::<usize>() == Ok(n),
                _ => false,
            };
            if !ok {
                return Err(err(hline, &format!("unsupported header field `{field}`")));
            }
        }
        let mut arcs = Vec::with_capacity(m);
        for (line, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            let [u, v, c] = f.as_slice() else {
                return Err(err(line, "expected `u v capacity`"));
            };
            let u: usize = u.parse().map_err(|_| err(line, "bad node"))?;
            let v: usize = v.parse().map_err(|_| err(line, "bad node"))?;
            let c = parse_rational(c).map_err(|e| err(line, &e.to_string()))?;
            if u == 0 || v == 0 {
                return Err(err(line, "nodes are numbered from 1"));
            }
            arcs.push((u - 1, v - 1, c));
        }
        if arcs.len() != m {
            return Err(err(hline, &format!("header announces {m} arcs, found {}", arcs.len())));
        }
        FlowInstance::from_arcs(n, &arcs)
    }
}

/// Net flow out of the source for a flow given on forward arcs.
pub fn flow_value(net: &FlowNetwork, y: &[Rational]) -> Rational {
    let s = net.source();
    let mut value = Rational::default();
    for (&(u, v), ye) in net.forward_arcs().iter().zip(y) {
        if u == s {
            value += ye;
        } else if v == s {
            value -= ye;
        }
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::int;

    #[test]
    fn canonical_arc_order() {
        let net = FlowNetwork::new(3, [(1, 0), (1, 2)]).unwrap();
        assert_eq!(net.forward_arcs(), &[(0, 1), (1, 2)]);
        assert_eq!(net.arcs().collect::<Vec<_>>(), vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
        assert_eq!(net.arc_index(2, 1), Some(3));
        assert_eq!(net.arc_index(0, 2), None);
        assert_eq!(net.neighbors(1), &[0, 2]);
    }

    #[test]
    fn parses_edge_list_and_adds_reverses() {
        let inst: FlowInstance = "3 3 directed source=1 sink=3\n1 2 5\n2 3 3\n3 2 1\n".parse().unwrap();
        assert_eq!(inst.capacities, vec![int(5), int(0), int(3), int(1)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            "2 1 directed\n1 1 3\n".parse::<FlowInstance>(),
            Err(FlowError::BadArc(0, 0))
        ));
        assert!(matches!(
            "2 2 directed\n1 2 3\n1 2 4\n".parse::<FlowInstance>(),
            Err(FlowError::DuplicateArc(0, 1))
        ));
        assert!(matches!(
            "2 1 directed\n1 2 -3\n".parse::<FlowInstance>(),
            Err(FlowError::NegativeCapacity(0, 1))
        ));
        assert!(matches!(
            "3 1 directed source=2 sink=3\n1 2 3\n".parse::<FlowInstance>(),
            Err(FlowError::Parse { .. })
        ));
        assert!(matches!("".parse::<FlowInstance>(), Err(FlowError::Parse { .. })));
    }

    #[test]
    fn flow_value_sums_source_arcs() {
        let net = FlowNetwork::new(2, [(0, 1)]).unwrap();
        assert_eq!(flow_value(&net, &[int(0)]), int(0));
        assert_eq!(flow_value(&net, &[int(7)]), int(7));
    }
}
