#![allow(dead_code)]

use maap::num::{int, ratio, Rational};
use maap::program::{AffineExpr, Block, Instruction, MaapProgram, VarId, VarTable};
use maap::random::{rng, InstanceRng};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

/// Random valid programs: nested sequences with locals, For loops that
/// overwrite outer variables, and parallel blocks that share a local name
/// but otherwise write only their own fresh variables.
pub struct ProgramGen {
    rng: InstanceRng,
    vars: VarTable,
}

impl ProgramGen {
    fn coeff(&mut self) -> Rational {
        let choices = [ratio(-2, 1), int(-1), ratio(-1, 2), ratio(1, 2), int(1), int(2), int(3)];
        choices.choose(&mut self.rng).unwrap().clone()
    }

    fn expr(&mut self, scope: &[VarId]) -> AffineExpr {
        let k = self.rng.random_range(1..=3);
        let terms: Vec<(Rational, VarId)> = (0..k)
            .map(|_| (self.coeff(), *scope.choose(&mut self.rng).unwrap()))
            .collect();
        let constant = if self.rng.random_bool(0.3) {
            [int(-1), ratio(1, 2), int(2)].choose(&mut self.rng).unwrap().clone()
        } else {
            int(0)
        };
        AffineExpr::new(constant, terms)
    }

    fn target(&mut self, scope: &mut Vec<VarId>, assignable: &mut Vec<VarId>, fresh: &mut Vec<VarId>) -> VarId {
        if !assignable.is_empty() && self.rng.random_bool(0.4) {
            return *assignable.choose(&mut self.rng).unwrap();
        }
        let v = self.vars.fresh(format!("v{}", self.vars.len()));
        scope.push(v);
        assignable.push(v);
        fresh.push(v);
        v
    }

    /// Appends `len` instructions; returns the variables it created that
    /// stay visible afterwards.
    fn body(
        &mut self,
        out: &mut Vec<Instruction>,
        scope: &mut Vec<VarId>,
        assignable: &mut Vec<VarId>,
        depth: u32,
        len: usize,
    ) -> Vec<VarId> {
        let mut fresh = Vec::new();
        for _ in 0..len {
            let kind = if depth == 0 {
                self.rng.random_range(0..3)
            } else {
                self.rng.random_range(0..7)
            };
            match kind {
                0 => {
                    let e = self.expr(scope);
                    let t = self.target(scope, assignable, &mut fresh);
                    out.push(Instruction::assign(t, e));
                }
                1 | 2 => {
                    let k = self.rng.random_range(2..=5);
                    let terms: Vec<AffineExpr> = (0..k).map(|_| self.expr(scope)).collect();
                    let t = self.target(scope, assignable, &mut fresh);
                    out.push(if kind == 1 {
                        Instruction::max(t, terms)
                    } else {
                        Instruction::min(t, terms)
                    });
                }
                3 => {
                    let local = self.vars.fresh(format!("l{}", self.vars.len()));
                    let mut inner = vec![Instruction::assign(local, self.expr(scope))];
                    let mut s = scope.clone();
                    s.push(local);
                    let mut a = assignable.clone();
                    a.push(local);
                    let len = self.rng.random_range(1..=3);
                    let made = self.body(&mut inner, &mut s, &mut a, depth - 1, len);
                    scope.extend(&made);
                    assignable.extend(&made);
                    fresh.extend(made);
                    out.push(Instruction::Seq(Block::with_locals(vec![local], inner)));
                }
                4 => {
                    let iterations = self.rng.random_range(1..=3);
                    let mut blocks = Vec::new();
                    for _ in 0..iterations {
                        let mut inner = Vec::new();
                        let len = self.rng.random_range(1..=3);
                        let made = self.body(&mut inner, scope, assignable, depth - 1, len);
                        fresh.extend(made);
                        blocks.push(Block::new(inner));
                    }
                    out.push(Instruction::for_do(blocks));
                }
                _ => {
                    let shared = self.vars.fresh(format!("p{}", self.vars.len()));
                    let siblings = self.rng.random_range(2..=3);
                    let mut blocks = Vec::new();
                    let mut made_all = Vec::new();
                    for _ in 0..siblings {
                        let mut inner = vec![Instruction::assign(shared, self.expr(scope))];
                        let mut s = scope.clone();
                        s.push(shared);
                        let mut a = vec![shared];
                        let len = self.rng.random_range(1..=3);
                        let made = self.body(&mut inner, &mut s, &mut a, depth - 1, len);
                        made_all.extend(made);
                        blocks.push(Block::with_locals(vec![shared], inner));
                    }
                    scope.extend(&made_all);
                    assignable.extend(&made_all);
                    fresh.extend(made_all);
                    out.push(if kind == 5 {
                        Instruction::par(blocks)
                    } else {
                        Instruction::for_par(blocks)
                    });
                }
            }
        }
        fresh
    }
}

/// A random valid program with `inputs` inputs, seeded by `seed`.
pub fn random_program(seed: u64, inputs: usize, depth: u32, len: usize) -> MaapProgram {
    let mut g = ProgramGen {
        rng: rng(seed),
        vars: VarTable::new(),
    };
    let xs: Vec<VarId> = (0..inputs).map(|i| g.vars.fresh(format!("x{i}"))).collect();
    let mut scope = xs.clone();
    let mut assignable = Vec::new();
    let mut body = Vec::new();
    let made = g.body(&mut body, &mut scope, &mut assignable, depth, len.max(1));
    let mut outputs: Vec<VarId> = made.choose_multiple(&mut g.rng, 3).copied().collect();
    if outputs.is_empty() {
        outputs.push(xs[0]);
    }
    MaapProgram::new(g.vars, xs, outputs, Instruction::seq(body))
}

/// `k / 8` with `k` uniform in `-40..=40`.
pub fn random_point(seed: u64, len: usize) -> Vec<Rational> {
    let mut r = rng(seed);
    (0..len).map(|_| ratio(r.random_range(-40..=40), 8)).collect()
}

pub fn to_f64(xs: &[Rational]) -> Vec<f64> {
    use maap::num::Scalar;
    xs.iter().map(|x| x.to_f64()).collect()
}

/// A residual instance with `dist(s, t) ≥ target` by construction: inner
/// nodes get levels in `1..target`, the sink level `target`, and arc `uv`
/// may be open only if `level(v) ≤ level(u) + 1`. Every pair is an arc of
/// the underlying network with probability `density`.
pub fn layered_residual(
    n: usize,
    target: usize,
    density: f64,
    r: &mut InstanceRng,
) -> (maap::maxflow::FlowNetwork, Vec<Rational>) {
    use maap::maxflow::FlowNetwork;
    let mut level = vec![0; n];
    level[n - 1] = target;
    // Cover every level below the sink first so that `dist = target` is
    // common, then place the remaining inner nodes at random.
    let mut inner: Vec<usize> = (1..n - 1).collect();
    inner.shuffle(r);
    for (i, &v) in inner.iter().enumerate() {
        level[v] = if i + 1 < target {
            i + 1
        } else {
            r.random_range(1..target.max(2))
        };
    }
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random_bool(density) {
                arcs.push((u, v));
            }
        }
    }
    let net = FlowNetwork::new(n, arcs).unwrap();
    let c = net
        .arcs()
        .map(|(u, v)| {
            if level[v] <= level[u] + 1 && r.random_bool(0.85) {
                int(r.random_range(1..=10))
            } else {
                int(0)
            }
        })
        .collect();
    (net, c)
}

/// Distances to the sink over arcs with positive capacity.
pub fn distances_to_sink(net: &maap::maxflow::FlowNetwork, c: &[Rational]) -> Vec<Option<usize>> {
    use num_traits::Signed;
    let n = net.node_count();
    let mut dist = vec![None; n];
    dist[net.sink()] = Some(0);
    let mut queue = std::collections::VecDeque::from([net.sink()]);
    while let Some(v) = queue.pop_front() {
        for &u in net.neighbors(v) {
            if dist[u].is_none() && c[net.arc_index(u, v).unwrap()].is_positive() {
                dist[u] = Some(dist[v].unwrap() + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// What the augmenting-flow subroutine promises for residual capacities
/// `c` with `dist(s, t) ≥ k`; `y` is its output on forward arcs.
#[derive(Debug, PartialEq, Eq)]
pub struct ContractReport {
    pub dist: maap::oracles::Distance,
    pub feasible: bool,
    pub on_k_paths: bool,
    pub positive_value: bool,
    pub saturates: bool,
}

impl ContractReport {
    pub fn holds(&self, k: usize) -> bool {
        use maap::oracles::Distance;
        let base = self.feasible && self.on_k_paths;
        match self.dist {
            Distance::Finite(d) if d == k => base && self.positive_value && self.saturates,
            Distance::Finite(d) if d < k => false,
            _ => base && !self.positive_value,
        }
    }
}

pub fn check_contract(net: &maap::maxflow::FlowNetwork, c: &[Rational], k: usize, y: &[Rational]) -> ContractReport {
    use maap::oracles::{check_flow, residual_distances, Distance};
    use num_traits::{Signed, Zero};
    let ds = residual_distances(net, c);
    let dt = distances_to_sink(net, c);
    // Arc uv lies on an s-t path of length exactly k iff it is open and
    // some walk s⇝u, uv, v⇝t has length k; with dist(s, t) ≥ k the
    // shortest pieces must add up to k.
    let on_k_path = |u: usize, v: usize| -> bool {
        let a = net.arc_index(u, v).unwrap();
        match (ds[u], dt[v]) {
            (Distance::Finite(x), Some(z)) => c[a].is_positive() && x + 1 + z == k,
            _ => false,
        }
    };
    let mut on_k_paths = true;
    let mut saturates = false;
    for (&(u, v), ye) in net.forward_arcs().iter().zip(y) {
        let (from, to) = if ye.is_negative() { (v, u) } else { (u, v) };
        if !ye.is_zero() {
            on_k_paths &= on_k_path(from, to);
            saturates |= ye.abs() == c[net.arc_index(from, to).unwrap()];
        }
    }
    ContractReport {
        dist: ds[net.sink()],
        feasible: check_flow(net, c, y).feasible,
        on_k_paths,
        positive_value: maap::maxflow::flow_value(net, y).is_positive(),
        saturates,
    }
}
