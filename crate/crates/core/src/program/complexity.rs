use std::fmt;

use serde::Serialize;

use super::{Block, Instruction, MaapProgram};

/// The `(d, w, s)` ledger of a program. For a program compiled to a ReLU
/// network these bound depth − 1, width and size respectively.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Complexity {
    pub depth: u64,
    pub width: u64,
    pub size: u64,
}

impl Complexity {
    pub const ZERO: Complexity = Complexity {
        depth: 0,
        width: 0,
        size: 0,
    };

    pub fn new(depth: u64, width: u64, size: u64) -> Self {
        Complexity { depth, width, size }
    }

    /// Rule for a k-term max or min: `(⌈log2 k⌉, 2k, 4k)`.
    pub fn extremum(k: usize) -> Self {
        if k < 2 {
            return Self::ZERO;
        }
        let k = k as u64;
        Complexity::new(ceil_log2(k), 2 * k, 4 * k)
    }

    pub fn then(self, next: Complexity) -> Self {
        Complexity::new(
            self.depth + next.depth,
            self.width.max(next.width),
            self.size + next.size,
        )
    }

    pub fn beside(self, other: Complexity) -> Self {
        Complexity::new(
            self.depth.max(other.depth),
            self.width + other.width,
            self.size + other.size,
        )
    }
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} w={} s={}", self.depth, self.width, self.size)
    }
}

pub fn ceil_log2(k: u64) -> u64 {
    if k <= 1 {
        0
    } else {
        64 - u64::from((k - 1).leading_zeros())
    }
}

pub fn complexity(prog: &MaapProgram) -> Complexity {
    instruction(&prog.body)
}

fn block(b: &Block) -> Complexity {
    b.body.iter().map(instruction).fold(Complexity::ZERO, Complexity::then)
}

pub(crate) fn instruction(ins: &Instruction) -> Complexity {
    match ins {
        Instruction::Affine { .. } => Complexity::ZERO,
        Instruction::Max { terms, .. } | Instruction::Min { terms, .. } => Complexity::extremum(terms.len()),
        Instruction::Seq(b) => block(b),
        Instruction::For { blocks } => blocks.iter().map(block).fold(Complexity::ZERO, Complexity::then),
        Instruction::Par { blocks } | Instruction::ForPar { blocks } => {
            blocks.iter().map(block).fold(Complexity::ZERO, Complexity::beside)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{AffineExpr, VarId, VarTable};

    fn max4(vars: &mut VarTable, inputs: &[VarId]) -> Instruction {
        let y = vars.fresh("y");
        Instruction::max(y, inputs.iter().map(|&v| AffineExpr::var(v)).collect())
    }

    fn prog(vars: VarTable, inputs: Vec<VarId>, body: Instruction) -> MaapProgram {
        MaapProgram::new(vars, inputs, vec![], body)
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<u64> = (1..=9).map(ceil_log2).collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn four_term_max() {
        let mut vars = VarTable::new();
        let xs: Vec<VarId> = (0..4).map(|i| vars.fresh(format!("x{i}"))).collect();
        let ins = max4(&mut vars, &xs);
        assert_eq!(complexity(&prog(vars, xs, ins)), Complexity::new(2, 8, 16));
    }

    #[test]
    fn sequence_and_parallel_rules() {
        let mut vars = VarTable::new();
        let xs: Vec<VarId> = (0..4).map(|i| vars.fresh(format!("x{i}"))).collect();
        let a = max4(&mut vars, &xs);
        let b = max4(&mut vars, &xs);
        let seq = Instruction::seq(vec![a.clone(), b.clone()]);
        let par = Instruction::par(vec![Block::new(vec![a]), Block::new(vec![b])]);
        assert_eq!(instruction(&seq), Complexity::new(4, 8, 32));
        assert_eq!(instruction(&par), Complexity::new(2, 16, 32));
        let _ = prog(vars, xs, seq);
    }

    #[test]
    fn affine_only_is_free() {
        let mut vars = VarTable::new();
        let x = vars.fresh("x");
        let y = vars.fresh("y");
        let body = Instruction::for_do(vec![Block::new(vec![Instruction::assign(y, x + x)]); 3]);
        assert_eq!(complexity(&prog(vars, vec![x], body)), Complexity::ZERO);
    }
}
