use super::{FlowError, FlowNetwork};
use crate::program::{AffineExpr, Block, Instruction, MaapProgram, VarId, VarTable};

/// Where the subroutine keeps its state. Node-indexed tables cover every
/// node except the sink; `excess[i - 1][v]` is `Y_v^i` and
/// `fattest[i - 1][v]` is `a_{i,v}`.
#[derive(Clone, Debug)]
pub struct AugmentLayout {
    pub k: usize,
    /// Residual capacities, canonical arc order.
    pub c: Vec<VarId>,
    /// Result flow, per forward arc.
    pub y: Vec<VarId>,
    /// Push flow, canonical arc order.
    pub z: Vec<VarId>,
    pub excess: Vec<Vec<VarId>>,
    pub fattest: Vec<Vec<VarId>>,
}

/// Indices of the subroutine's phases within its block.
pub mod phase {
    pub const INIT_FLOW: usize = 0;
    pub const INIT_TABLES: usize = 1;
    pub const FATTEST_FIRST: usize = 2;
    pub const FATTEST_REST: usize = 3;
    pub const SEED_SOURCE: usize = 4;
    pub const PUSH: usize = 5;
    /// Last instruction of the push procedure.
    pub const PUSH_TO_SINK: usize = 6;
    pub const CLEAN_UP: usize = 7;
    pub const RESULT: usize = 8;
}

/// Emits the subroutine for path length `k` reading residual capacities
/// `c` and writing `y`. All internal state is local to the returned block.
fn augment_block(net: &FlowNetwork, k: usize, c: &[VarId], y: &[VarId], vars: &mut VarTable) -> (Block, AugmentLayout) {
    let n = net.node_count();
    let t = net.sink();
    let s = net.source();
    let zero = || AffineExpr::zero();
    let arc = |u: usize, v: usize| net.arc_index(u, v).expect("arc exists");

    let z: Vec<VarId> = net.arcs().map(|(u, v)| vars.fresh(format!("z{u}_{v}"))).collect();
    let excess: Vec<Vec<VarId>> = (1..=k)
        .map(|i| (0..t).map(|v| vars.fresh(format!("Y{v}^{i}"))).collect())
        .collect();
    let fattest: Vec<Vec<VarId>> = (1..=k)
        .map(|i| (0..t).map(|v| vars.fresh(format!("a{i}_{v}"))).collect())
        .collect();
    let hop: Vec<VarId> = (0..n).map(|w| vars.fresh(format!("m{w}"))).collect();
    let f = vars.fresh("f");
    let b = vars.fresh("b");
    let big_y = |i: usize, v: usize| excess[i - 1][v];
    let a = |i: usize, v: usize| fattest[i - 1][v];
    let inner = |v: usize| net.neighbors(v).iter().copied().filter(move |&w| w != t);

    let mut body = Vec::with_capacity(9);
    body.push(Instruction::for_par(
        net.forward_arcs()
            .iter()
            .map(|&(v, w)| {
                Block::new(vec![
                    Instruction::assign(z[arc(v, w)], zero()),
                    Instruction::assign(z[arc(w, v)], zero()),
                ])
            })
            .collect(),
    ));
    body.push(Instruction::for_par(
        (1..=k)
            .flat_map(|i| (0..t).map(move |v| (i, v)))
            .map(|(i, v)| {
                Block::new(vec![
                    Instruction::assign(big_y(i, v), zero()),
                    Instruction::assign(a(i, v), zero()),
                ])
            })
            .collect(),
    ));

    body.push(Instruction::for_par(
        net.neighbors(t)
            .iter()
            .map(|&v| Block::new(vec![Instruction::assign(a(1, v), c[arc(v, t)])]))
            .collect(),
    ));
    body.push(Instruction::for_do(
        (2..=k)
            .map(|i| {
                let nodes = (0..t)
                    .filter(|&v| inner(v).next().is_some())
                    .map(|v| {
                        let ws: Vec<usize> = inner(v).collect();
                        let hops = Instruction::for_par(
                            ws.iter()
                                .map(|&w| {
                                    Block::new(vec![Instruction::min(
                                        hop[w],
                                        vec![a(i - 1, w).into(), c[arc(v, w)].into()],
                                    )])
                                })
                                .collect(),
                        );
                        let best = Instruction::max(a(i, v), ws.iter().map(|&w| hop[w].into()).collect());
                        Block::with_locals(ws.iter().map(|&w| hop[w]).collect(), vec![hops, best])
                    })
                    .collect();
                Block::new(vec![Instruction::for_par(nodes)])
            })
            .collect(),
    ));

    body.push(Instruction::assign(big_y(k, s), a(k, s)));
    body.push(Instruction::for_do(
        (2..=k)
            .rev()
            .map(|i| {
                let nodes = (0..t)
                    .map(|v| {
                        let arcs = inner(v)
                            .map(|w| {
                                Block::with_locals(
                                    vec![f],
                                    vec![
                                        Instruction::min(
                                            f,
                                            vec![
                                                big_y(i, v).into(),
                                                c[arc(v, w)].into(),
                                                AffineExpr::from(a(i - 1, w)) - big_y(i - 1, w),
                                            ],
                                        ),
                                        Instruction::assign(z[arc(v, w)], z[arc(v, w)] + f),
                                        Instruction::assign(big_y(i, v), big_y(i, v) - f),
                                        Instruction::assign(big_y(i - 1, w), big_y(i - 1, w) + f),
                                    ],
                                )
                            })
                            .collect();
                        Block::new(vec![Instruction::for_do(arcs)])
                    })
                    .collect();
                Block::new(vec![Instruction::for_do(nodes)])
            })
            .collect(),
    ));
    body.push(Instruction::for_par(
        net.neighbors(t)
            .iter()
            .map(|&v| {
                Block::new(vec![
                    Instruction::assign(z[arc(v, t)], big_y(1, v)),
                    Instruction::assign(big_y(1, v), zero()),
                ])
            })
            .collect(),
    ));

    body.push(Instruction::for_do(
        (2..k)
            .map(|i| {
                let nodes = (0..t)
                    .rev()
                    .map(|w| {
                        let arcs = inner(w)
                            .rev()
                            .map(|v| {
                                Block::with_locals(
                                    vec![b],
                                    vec![
                                        Instruction::min(b, vec![big_y(i, w).into(), z[arc(v, w)].into()]),
                                        Instruction::assign(z[arc(v, w)], z[arc(v, w)] - b),
                                        Instruction::assign(big_y(i, w), big_y(i, w) - b),
                                        Instruction::assign(big_y(i + 1, v), big_y(i + 1, v) + b),
                                    ],
                                )
                            })
                            .collect();
                        Block::new(vec![Instruction::for_do(arcs)])
                    })
                    .collect();
                Block::new(vec![Instruction::for_do(nodes)])
            })
            .collect(),
    ));

    body.push(Instruction::for_par(
        net.forward_arcs()
            .iter()
            .enumerate()
            .map(|(e, &(v, w))| Block::new(vec![Instruction::assign(y[e], z[arc(v, w)] - z[arc(w, v)])]))
            .collect(),
    ));

    let mut locals: Vec<VarId> = z.clone();
    locals.extend(excess.iter().flatten());
    locals.extend(fattest.iter().flatten());
    let block = Block::with_locals(locals, body);
    let layout = AugmentLayout {
        k,
        c: c.to_vec(),
        y: y.to_vec(),
        z,
        excess,
        fattest,
    };
    (block, layout)
}

fn check_k(net: &FlowNetwork, k: usize) -> Result<(), FlowError> {
    let max = net.node_count() - 1;
    if k == 0 || k > max {
        return Err(FlowError::PathLength { k, max });
    }
    Ok(())
}

/// The augmenting-flow subroutine as a standalone program: inputs are the
/// residual capacities in canonical arc order, outputs the flow on forward
/// arcs. Its body is a single block whose instructions are the phases
/// listed in [`phase`].
pub fn build_find_augmenting_flow(net: &FlowNetwork, k: usize) -> Result<(MaapProgram, AugmentLayout), FlowError> {
    check_k(net, k)?;
    let mut vars = VarTable::new();
    let c: Vec<VarId> = net.arcs().map(|(u, v)| vars.fresh(format!("c{u}_{v}"))).collect();
    let y: Vec<VarId> = net
        .forward_arcs()
        .iter()
        .map(|(u, v)| vars.fresh(format!("y{u}_{v}")))
        .collect();
    let (block, layout) = augment_block(net, k, &c, &y, &mut vars);
    let prog = MaapProgram::new(vars, c, y, Instruction::Seq(block));
    Ok((prog, layout))
}

/// Variables of the max-flow program.
#[derive(Clone, Debug)]
pub struct MaxFlowLayout {
    /// Capacities (program inputs), canonical arc order.
    pub nu: Vec<VarId>,
    /// Flow (program outputs), per forward arc.
    pub x: Vec<VarId>,
    /// Residual capacities, canonical arc order.
    pub c: Vec<VarId>,
    /// Number of inner iterations per path length, `m`.
    pub inner: usize,
}

impl MaxFlowLayout {
    /// Recognizes the observer path reported right after the augment step
    /// of iteration `(k, i)` (both 1-based).
    pub fn augment_step(&self, path: &[usize]) -> Option<(usize, usize)> {
        match path {
            [1, kb, 0, ib, 1] => Some((kb + 1, ib + 1)),
            _ => None,
        }
    }

    /// Observer path right after outer iteration `k` has finished.
    pub fn outer_step(&self, path: &[usize]) -> Option<usize> {
        match path {
            [1, kb, 0] => Some(kb + 1),
            _ => None,
        }
    }
}

/// The max-flow program: start from the zero flow and, for each path
/// length `k = 1..n−1`, run `m` rounds of the subroutine followed by an
/// augment. Inputs are the capacities in canonical arc order, outputs the
/// flow on forward arcs.
pub fn build_maxflow_program(net: &FlowNetwork) -> (MaapProgram, MaxFlowLayout) {
    let mut vars = VarTable::new();
    let nu: Vec<VarId> = net.arcs().map(|(u, v)| vars.fresh(format!("nu{u}_{v}"))).collect();
    let x: Vec<VarId> = net
        .forward_arcs()
        .iter()
        .map(|(u, v)| vars.fresh(format!("x{u}_{v}")))
        .collect();
    let c: Vec<VarId> = net.arcs().map(|(u, v)| vars.fresh(format!("c{u}_{v}"))).collect();
    let y: Vec<VarId> = net
        .forward_arcs()
        .iter()
        .map(|(u, v)| vars.fresh(format!("y{u}_{v}")))
        .collect();
    let m = net.arc_count();

    let forward_blocks = |f: &dyn Fn(usize) -> Vec<Instruction>| -> Instruction {
        Instruction::for_par((0..net.forward_arcs().len()).map(|e| Block::new(f(e))).collect())
    };
    let init = forward_blocks(&|e| {
        vec![
            Instruction::assign(x[e], AffineExpr::zero()),
            Instruction::assign(c[2 * e], nu[2 * e]),
            Instruction::assign(c[2 * e + 1], nu[2 * e + 1]),
        ]
    });
    let augment = forward_blocks(&|e| {
        vec![
            Instruction::assign(x[e], x[e] + y[e]),
            Instruction::assign(c[2 * e], c[2 * e] - y[e]),
            Instruction::assign(c[2 * e + 1], c[2 * e + 1] + y[e]),
        ]
    });

    let mut outer = Vec::with_capacity(net.node_count() - 1);
    for k in 1..net.node_count() {
        let (sub, _) = augment_block(net, k, &c, &y, &mut vars);
        let rounds = (0..m)
            .map(|_| Block::with_locals(y.clone(), vec![Instruction::Seq(sub.clone()), augment.clone()]))
            .collect();
        outer.push(Block::new(vec![Instruction::for_do(rounds)]));
    }
    let body = Instruction::seq(vec![init, Instruction::for_do(outer)]);
    let prog = MaapProgram::new(vars, nu.clone(), x.clone(), body);
    (prog, MaxFlowLayout { nu, x, c, inner: m })
}
