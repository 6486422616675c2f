use super::{Block, Instruction, MaapProgram};

/// Replaces every For-Do loop by a sequence of its iteration blocks and every
/// For-Do-Parallel loop by a Do-Parallel over them. Programs without loops
/// come back unchanged.
pub fn unroll(prog: &MaapProgram) -> MaapProgram {
    MaapProgram {
        inputs: prog.inputs.clone(),
        outputs: prog.outputs.clone(),
        body: unroll_instruction(&prog.body),
        variables: prog.variables.clone(),
    }
}

fn unroll_block(b: &Block) -> Block {
    Block {
        locals: b.locals.clone(),
        body: b.body.iter().map(unroll_instruction).collect(),
    }
}

fn unroll_instruction(ins: &Instruction) -> Instruction {
    match ins {
        Instruction::Affine { .. } | Instruction::Max { .. } | Instruction::Min { .. } => ins.clone(),
        Instruction::Seq(b) => Instruction::Seq(unroll_block(b)),
        Instruction::Par { blocks } => Instruction::par(blocks.iter().map(unroll_block).collect()),
        Instruction::For { blocks } => {
            Instruction::seq(blocks.iter().map(|b| Instruction::Seq(unroll_block(b))).collect())
        }
        Instruction::ForPar { blocks } => Instruction::par(blocks.iter().map(unroll_block).collect()),
    }
}
