//! The recursive minimum spanning tree program for the complete graph.
//!
//! `MST_n` eliminates vertex `n` by a star-mesh step,
//!
//! ```text
//! y_n    ← min_{i<n} x_in
//! x'_ij  ← min{x_ij, x_in + x_jn − y_n}      for all 1 ≤ i < j ≤ n−1, in parallel
//! return   y_n + MST_{n−1}(x')
//! ```
//!
//! and `MST_2` returns its single edge weight. Vertices are 0-based in this
//! module; edge weights are ordered lexicographically by pair `(i, j)`, `i < j`.

use std::str::FromStr;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::num::{int, parse_rational, Rational};
use crate::program::{AffineExpr, Block, Instruction, MaapProgram, VarId, VarTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MstError {
    #[error("the spanning tree program needs n >= 2, got {0}")]
    Arity(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("big-M {big_m} must exceed {bound}")]
    BigMTooSmall { big_m: Box<Rational>, bound: Box<Rational> },
    #[error("edge ({0}, {1}) is not a pair of distinct vertices in range")]
    BadEdge(usize, usize),
    #[error("edge ({0}, {1}) listed twice")]
    DuplicateEdge(usize, usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Number of unordered pairs of `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of edge `{i, j}` (0-based, `i != j`) in the canonical order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)`, `i < j`, in canonical order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Builds `MST_n` with inputs `x_ij` in canonical order and one output.
pub fn build_mst_program(n: usize) -> Result<MaapProgram, MstError> {
    if n < 2 {
        return Err(MstError::Arity(n));
    }
    let mut vars = VarTable::new();
    let inputs: Vec<VarId> = pairs(n)
        .map(|(i, j)| vars.fresh(format!("x{}_{}", i + 1, j + 1)))
        .collect();
    let mut body = Vec::new();
    let value = eliminate(n, &inputs, &mut vars, &mut body);
    let out = vars.fresh("mst");
    body.push(Instruction::assign(out, value));
    Ok(MaapProgram::new(vars, inputs, vec![out], Instruction::seq(body)))
}

/// Emits the instructions of `MST_n` on weights `x` and returns the
/// variable holding its value.
fn eliminate(n: usize, x: &[VarId], vars: &mut VarTable, body: &mut Vec<Instruction>) -> VarId {
    if n == 2 {
        return x[0];
    }
    let last = n - 1;
    let y = vars.fresh(format!("y{n}"));
    body.push(Instruction::min(
        y,
        (0..last).map(|i| x[pair_index(n, i, last)].into()).collect(),
    ));

    let mut reduced = Vec::with_capacity(pair_count(last));
    let mut blocks = Vec::with_capacity(pair_count(last));
    for (i, j) in pairs(last) {
        let xp = vars.fresh(format!("x{}_{}@{}", i + 1, j + 1, last));
        let through = AffineExpr::from(x[pair_index(n, i, last)]) + x[pair_index(n, j, last)] - y;
        blocks.push(Block::new(vec![Instruction::min(
            xp,
            vec![x[pair_index(n, i, j)].into(), through],
        )]));
        reduced.push(xp);
    }
    body.push(Instruction::for_par(blocks));

    let rest = eliminate(last, &reduced, vars, body);
    let total = vars.fresh(format!("mst{n}"));
    body.push(Instruction::assign(total, y + rest));
    total
}

/// An undirected weighted graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, Rational)>,
}

impl WeightedGraph {
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut dsu = crate::oracles::DisjointSets::new(self.n);
        for &(u, v, _) in &self.edges {
            dsu.union(u, v);
        }
        dsu.count() == 1
    }
}

impl FromStr for WeightedGraph {
    type Err = MstError;

    /// Header `n m undirected`, then `m` lines `u v weight` with 1-based
    /// vertices. Blank lines and `#` comments are skipped.
    fn from_str(text: &str) -> Result<Self, MstError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, message: &str| MstError::Parse {
            line,
            message: message.to_string(),
        };
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (n, m) = match fields.as_slice() {
            [n, m, "undirected"] => (
                n.parse::<usize>().map_err(|_| parse_err(hline, "bad vertex count"))?,
                m.parse::<usize>().map_err(|_| parse_err(hline, "bad edge count"))?,
            ),
            _ => return Err(parse_err(hline, "expected header `n m undirected`")),
        };
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            let [u, v, w] = f.as_slice() else {
                return Err(parse_err(line, "expected `u v weight`"));
            };
            let u: usize = u.parse().map_err(|_| parse_err(line, "bad vertex"))?;
            let v: usize = v.parse().map_err(|_| parse_err(line, "bad vertex"))?;
            let w = parse_rational(w).map_err(|e| parse_err(line, &e.to_string()))?;
            if u == 0 || v == 0 || u > n || v > n || u == v {
                return Err(MstError::BadEdge(u, v));
            }
            edges.push((u - 1, v - 1, w));
        }
        if edges.len() != m {
            return Err(parse_err(
                hline,
                &format!("header announces {m} edges, found {}", edges.len()),
            ));
        }
        Ok(WeightedGraph { n, edges })
    }
}

/// The default big-M for a graph: `1 + n · max |w|`.
pub fn default_big_m(graph: &WeightedGraph) -> Rational {
    let max_abs = graph
        .edges
        .iter()
        .map(|e| e.2.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    int(1) + int(graph.n as i64) * max_abs
}

/// Packs a connected graph into the canonical weight vector of `MST_n`,
/// using `big_m` for absent pairs. `big_m` must exceed both the largest
/// weight and `(n − 1)` times it, so that no absent pair enters a minimum
/// spanning tree.
pub fn mst_input_vector(graph: &WeightedGraph, big_m: &Rational) -> Result<Vec<Rational>, MstError> {
    let n = graph.n;
    if n < 2 {
        return Err(MstError::Arity(n));
    }
    let mut x: Vec<Option<Rational>> = vec![None; pair_count(n)];
    for (u, v, w) in &graph.edges {
        if *u >= n || *v >= n || u == v {
            return Err(MstError::BadEdge(u + 1, v + 1));
        }
        let slot = &mut x[pair_index(n, *u, *v)];
        if slot.is_some() {
            return Err(MstError::DuplicateEdge(u.min(v) + 1, u.max(v) + 1));
        }
        *slot = Some(w.clone());
    }
    if !graph.is_connected() {
        return Err(MstError::Disconnected);
    }
    if x.iter().any(Option::is_none) {
        let max_w = graph
            .edges
            .iter()
            .map(|e| e.2.clone())
            .max()
            .expect("connected graph has edges");
        let scaled = int(n as i64 - 1) * &max_w;
        let bound = if scaled > max_w { scaled } else { max_w };
        if *big_m <= bound {
            return Err(MstError::BigMTooSmall {
                big_m: Box::new(big_m.clone()),
                bound: Box::new(bound),
            });
        }
    }
    Ok(x.into_iter().map(|w| w.unwrap_or_else(|| big_m.clone())).collect())
}
