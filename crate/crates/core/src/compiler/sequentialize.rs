use crate::program::{AffineExpr, Block, Instruction, MaapProgram, VarTable};

/// Removes all parallelism: parallel blocks run one after another and every
/// max or min of more than two terms becomes a chain of binary ones through
/// a block-local accumulator. The result has ledger width at most 4.
pub fn sequentialize(prog: &MaapProgram) -> MaapProgram {
    let mut vars = VarTable::from_names(prog.variables.clone());
    let body = instruction(&prog.body, &mut vars);
    MaapProgram::new(vars, prog.inputs.clone(), prog.outputs.clone(), body)
}

fn block(b: &Block, vars: &mut VarTable) -> Block {
    Block::with_locals(b.locals.clone(), b.body.iter().map(|i| instruction(i, vars)).collect())
}

fn sequence(blocks: &[Block], vars: &mut VarTable) -> Instruction {
    Instruction::seq(blocks.iter().map(|b| Instruction::Seq(block(b, vars))).collect())
}

fn chain(target: crate::program::VarId, terms: &[AffineExpr], is_max: bool, vars: &mut VarTable) -> Instruction {
    let op = |t, ts| {
        if is_max {
            Instruction::max(t, ts)
        } else {
            Instruction::min(t, ts)
        }
    };
    if terms.len() <= 2 {
        return op(target, terms.to_vec());
    }
    let acc = vars.fresh(format!("acc{}", vars.len()));
    let last = terms.len() - 1;
    let mut body = vec![op(acc, vec![terms[0].clone(), terms[1].clone()])];
    for t in &terms[2..last] {
        body.push(op(acc, vec![acc.into(), t.clone()]));
    }
    body.push(op(target, vec![acc.into(), terms[last].clone()]));
    Instruction::Seq(Block::with_locals(vec![acc], body))
}

fn instruction(ins: &Instruction, vars: &mut VarTable) -> Instruction {
    match ins {
        Instruction::Affine { .. } => ins.clone(),
        Instruction::Max { target, terms } => chain(*target, terms, true, vars),
        Instruction::Min { target, terms } => chain(*target, terms, false, vars),
        Instruction::Seq(b) => Instruction::Seq(block(b, vars)),
        Instruction::For { blocks } => Instruction::for_do(blocks.iter().map(|b| block(b, vars)).collect()),
        Instruction::Par { blocks } | Instruction::ForPar { blocks } => sequence(blocks, vars),
    }
}
