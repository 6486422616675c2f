//! Translation between programs and ReLU networks.

mod decompile;
mod lower;
mod sequentialize;

use thiserror::Error;

use crate::net::{NetViolation, ReluNet};
use crate::program::{Instruction, MaapProgram, VarId, VarTable, Violation};

pub use decompile::decompile;
pub use lower::compile;
pub use sequentialize::sequentialize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("a max/min gadget needs at least 2 inputs, got {0}")]
    Arity(usize),
    #[error("invalid program: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidProgram(Vec<Violation>),
    #[error("invalid network: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidNet(Vec<NetViolation>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

/// A network with `k` inputs computing their maximum or minimum as a
/// balanced tree of pairwise gadgets, one hidden neuron per pair.
pub fn max_gadget(k: usize, mode: Extremum) -> Result<ReluNet, CompileError> {
    if k < 2 {
        return Err(CompileError::Arity(k));
    }
    let mut vars = VarTable::new();
    let xs: Vec<VarId> = (1..=k).map(|i| vars.fresh(format!("x{i}"))).collect();
    let y = vars.fresh("y");
    let terms = xs.iter().map(|&v| v.into()).collect();
    let body = match mode {
        Extremum::Max => Instruction::max(y, terms),
        Extremum::Min => Instruction::min(y, terms),
    };
    compile(&MaapProgram::new(vars, xs, vec![y], body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{forward, min_two_net, validate_net, NetStats};
    use crate::num::{int, Rational};
    use crate::program::{complexity, interpret, min_of_two, AffineExpr};

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn binary_min_gadget_is_the_min_two_net() {
        let net = max_gadget(2, Extremum::Min).unwrap();
        assert_eq!(net, min_two_net());
        assert_eq!(net.stats(), NetStats::new(2, 1, 1));
        assert_eq!(forward(&net, &ints(&[3, 5])).unwrap().0, ints(&[3]));
    }

    #[test]
    fn four_input_max_gadget() {
        let net = max_gadget(4, Extremum::Max).unwrap();
        assert_eq!(forward(&net, &ints(&[1, 9, 2, 8])).unwrap().0, ints(&[9]));
        assert!(net.stats().within(&NetStats::new(3, 8, 16)));
        assert_eq!(net.stats(), NetStats::new(3, 2, 3));
    }

    #[test]
    fn three_input_max_gadget_on_equal_negatives() {
        let net = max_gadget(3, Extremum::Max).unwrap();
        assert_eq!(forward(&net, &ints(&[-1, -1, -1])).unwrap().0, ints(&[-1]));
    }

    #[test]
    fn gadget_arity() {
        assert_eq!(max_gadget(1, Extremum::Max), Err(CompileError::Arity(1)));
    }

    #[test]
    fn affine_program_has_no_hidden_units() {
        let mut vars = VarTable::new();
        let x = vars.fresh("x");
        let y = vars.fresh("y");
        let p = MaapProgram::new(vars, vec![x], vec![y], Instruction::assign(y, x + x + int(1)));
        let net = compile(&p).unwrap();
        assert_eq!(net.stats(), NetStats::new(1, 0, 0));
        assert_eq!(forward(&net, &ints(&[4])).unwrap().0, ints(&[9]));
    }

    #[test]
    fn compiled_min_of_two_matches_interpreter() {
        let p = min_of_two();
        let net = compile(&p).unwrap();
        for x in [[3, 5], [5, 3], [0, 0], [-7, 2]] {
            let x = ints(&x);
            assert_eq!(forward(&net, &x).unwrap().0, interpret(&p, &x).unwrap());
        }
    }

    #[test]
    fn sequenced_extrema_occupy_separate_layers() {
        // Independent maxima in sequence must not share a layer, otherwise
        // the width of the net would exceed the program ledger.
        let mut vars = VarTable::new();
        let xs: Vec<VarId> = (0..6).map(|i| vars.fresh(format!("x{i}"))).collect();
        let ys: Vec<VarId> = (0..3).map(|i| vars.fresh(format!("y{i}"))).collect();
        let body = Instruction::seq(
            (0..3)
                .map(|i| Instruction::max(ys[i], vec![xs[2 * i].into(), xs[2 * i + 1].into()]))
                .collect(),
        );
        let p = MaapProgram::new(vars, xs, ys, body);
        let net = compile(&p).unwrap();
        let ledger = complexity(&p);
        assert_eq!(net.stats(), NetStats::new(4, 1, 3));
        assert!(net.stats().depth <= ledger.depth + 1 && net.stats().width <= ledger.width);
    }

    #[test]
    fn cancelled_gadgets_are_pruned() {
        let mut vars = VarTable::new();
        let a = vars.fresh("a");
        let b = vars.fresh("b");
        let m = vars.fresh("m");
        let y = vars.fresh("y");
        let body = Instruction::seq(vec![
            Instruction::max(m, vec![a.into(), b.into()]),
            Instruction::assign(y, AffineExpr::from(m) - m + a),
        ]);
        let net = compile(&MaapProgram::new(vars, vec![a, b], vec![y], body)).unwrap();
        assert!(validate_net(&net).is_empty());
        assert_eq!(net.stats(), NetStats::new(1, 0, 0));
    }

    #[test]
    fn constant_differences_fold() {
        let mut vars = VarTable::new();
        let a = vars.fresh("a");
        let y = vars.fresh("y");
        let body = Instruction::max(y, vec![a.into(), a + int(2)]);
        let net = compile(&MaapProgram::new(vars, vec![a], vec![y], body)).unwrap();
        assert_eq!(net.stats(), NetStats::new(1, 0, 0));
        assert_eq!(forward(&net, &ints(&[1])).unwrap().0, ints(&[3]));
    }

    #[test]
    fn decompile_then_compile_preserves_the_function() {
        let net = min_two_net();
        let again = compile(&decompile(&net).unwrap()).unwrap();
        for x in [[3, 5], [5, 3], [1, 1]] {
            let x = ints(&x);
            assert_eq!(forward(&again, &x).unwrap().0, forward(&net, &x).unwrap().0);
        }
    }
}
