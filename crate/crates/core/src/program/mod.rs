//! Max-affine arithmetic programs (MAAPs).
//!
//! A MAAP is a branch-free program over real variables. Every assignment is
//! either an affine combination `b + Σ c_j v_j` or the maximum (minimum) of
//! several affine combinations. Control flow consists of sequences, parallel
//! blocks and loops with compile-time trip counts. Loops are stored already
//! unrolled: each iteration owns its own [`Block`].
//!
//! Blocks may declare *locals*. A local is scoped to its block: it must be
//! assigned inside the block before it is read, its value is discarded when
//! the block ends, and sibling parallel blocks may reuse the same id.

mod complexity;
mod interpret;
mod transform;
mod validate;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::num::{num_den, Rational};

pub(crate) use complexity::instruction as instruction_complexity;
pub use complexity::{ceil_log2, complexity, Complexity};
pub use interpret::{interpret, EvalError, Interpreter, RunOptions};
pub use transform::unroll;
pub use validate::{validate_program, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "num_den")]
    pub coeff: Rational,
    pub var: VarId,
}

/// `constant + Σ coeff·var`, kept sorted by variable with no duplicate
/// variables and no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RawAffine")]
pub struct AffineExpr {
    #[serde(with = "num_den")]
    constant: Rational,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
struct RawAffine {
    #[serde(with = "num_den")]
    constant: Rational,
    terms: Vec<Term>,
}

impl From<RawAffine> for AffineExpr {
    fn from(raw: RawAffine) -> Self {
        AffineExpr::new(raw.constant, raw.terms.into_iter().map(|t| (t.coeff, t.var)))
    }
}

impl AffineExpr {
    /// Builds an expression, merging repeated variables and dropping zero coefficients.
    pub fn new(constant: Rational, terms: impl IntoIterator<Item = (Rational, VarId)>) -> Self {
        let mut raw: Vec<(Rational, VarId)> = terms.into_iter().collect();
        raw.sort_by_key(|(_, v)| *v);
        let mut merged: Vec<Term> = Vec::with_capacity(raw.len());
        for (coeff, var) in raw {
            match merged.last_mut() {
                Some(last) if last.var == var => last.coeff += coeff,
                _ => merged.push(Term { coeff, var }),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        AffineExpr {
            constant,
            terms: merged,
        }
    }

    pub fn constant(value: Rational) -> Self {
        AffineExpr {
            constant: value,
            terms: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn var(v: VarId) -> Self {
        AffineExpr {
            constant: Rational::zero(),
            terms: vec![Term {
                coeff: Rational::one(),
                var: v,
            }],
        }
    }

    pub fn scaled(coeff: Rational, v: VarId) -> Self {
        Self::new(Rational::zero(), [(coeff, v)])
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.terms.iter().map(|t| t.var)
    }

    pub fn scale(&self, by: &Rational) -> Self {
        if by.is_zero() {
            return Self::zero();
        }
        AffineExpr {
            constant: &self.constant * by,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: &t.coeff * by,
                    var: t.var,
                })
                .collect(),
        }
    }

    fn combine(self, rhs: AffineExpr, sign: &Rational) -> Self {
        let terms = self
            .terms
            .into_iter()
            .map(|t| (t.coeff, t.var))
            .chain(rhs.terms.into_iter().map(|t| (t.coeff * sign, t.var)));
        AffineExpr::new(self.constant + rhs.constant * sign, terms)
    }
}

impl From<VarId> for AffineExpr {
    fn from(v: VarId) -> Self {
        AffineExpr::var(v)
    }
}

impl From<Rational> for AffineExpr {
    fn from(c: Rational) -> Self {
        AffineExpr::constant(c)
    }
}

impl<R: Into<AffineExpr>> Add<R> for AffineExpr {
    type Output = AffineExpr;
    fn add(self, rhs: R) -> AffineExpr {
        self.combine(rhs.into(), &Rational::one())
    }
}

impl<R: Into<AffineExpr>> Sub<R> for AffineExpr {
    type Output = AffineExpr;
    fn sub(self, rhs: R) -> AffineExpr {
        self.combine(rhs.into(), &-Rational::one())
    }
}

impl<R: Into<AffineExpr>> Add<R> for VarId {
    type Output = AffineExpr;
    fn add(self, rhs: R) -> AffineExpr {
        AffineExpr::var(self) + rhs
    }
}

impl<R: Into<AffineExpr>> Sub<R> for VarId {
    type Output = AffineExpr;
    fn sub(self, rhs: R) -> AffineExpr {
        AffineExpr::var(self) - rhs
    }
}

impl Neg for AffineExpr {
    type Output = AffineExpr;
    fn neg(self) -> AffineExpr {
        self.scale(&-Rational::one())
    }
}

impl Mul<&Rational> for AffineExpr {
    type Output = AffineExpr;
    fn mul(self, rhs: &Rational) -> AffineExpr {
        self.scale(rhs)
    }
}

impl fmt::Display for AffineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        if !self.constant.is_zero() || self.terms.is_empty() {
            write!(f, "{}", self.constant)?;
            wrote = true;
        }
        for t in &self.terms {
            if wrote {
                f.write_str(" + ")?;
            }
            if t.coeff.is_one() {
                write!(f, "{}", t.var)?;
            } else {
                write!(f, "({})·{}", t.coeff, t.var)?;
            }
            wrote = true;
        }
        Ok(())
    }
}

/// An instruction list with its own local-variable scope.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locals: Vec<VarId>,
    pub body: Vec<Instruction>,
}

impl Block {
    pub fn new(body: Vec<Instruction>) -> Self {
        Block {
            locals: Vec::new(),
            body,
        }
    }

    pub fn with_locals(locals: Vec<VarId>, body: Vec<Instruction>) -> Self {
        Block { locals, body }
    }
}

impl From<Vec<Instruction>> for Block {
    fn from(body: Vec<Instruction>) -> Self {
        Block::new(body)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instruction {
    Affine {
        target: VarId,
        expr: AffineExpr,
    },
    Max {
        target: VarId,
        terms: Vec<AffineExpr>,
    },
    Min {
        target: VarId,
        terms: Vec<AffineExpr>,
    },
    /// Instructions executed in order.
    Seq(Block),
    /// Write-disjoint blocks.
    Par {
        blocks: Vec<Block>,
    },
    /// For-Do loop, one block per iteration, executed in order.
    For {
        blocks: Vec<Block>,
    },
    /// For-Do-Parallel loop, one write-disjoint block per iteration.
    #[serde(rename = "forpar")]
    ForPar {
        blocks: Vec<Block>,
    },
}

impl Instruction {
    pub fn assign(target: VarId, expr: impl Into<AffineExpr>) -> Self {
        Instruction::Affine {
            target,
            expr: expr.into(),
        }
    }

    /// `target ← max{terms}`; a single term degenerates to an affine assignment.
    pub fn max(target: VarId, mut terms: Vec<AffineExpr>) -> Self {
        if terms.len() == 1 {
            return Instruction::assign(target, terms.pop().unwrap());
        }
        Instruction::Max { target, terms }
    }

    /// `target ← min{terms}`; a single term degenerates to an affine assignment.
    pub fn min(target: VarId, mut terms: Vec<AffineExpr>) -> Self {
        if terms.len() == 1 {
            return Instruction::assign(target, terms.pop().unwrap());
        }
        Instruction::Min { target, terms }
    }

    pub fn seq(body: Vec<Instruction>) -> Self {
        Instruction::Seq(Block::new(body))
    }

    pub fn par(blocks: Vec<Block>) -> Self {
        Instruction::Par { blocks }
    }

    pub fn for_do(blocks: Vec<Block>) -> Self {
        Instruction::For { blocks }
    }

    pub fn for_par(blocks: Vec<Block>) -> Self {
        Instruction::ForPar { blocks }
    }

    pub fn is_loop(&self) -> bool {
        matches!(self, Instruction::For { .. } | Instruction::ForPar { .. })
    }

    /// Number of assignments in the (unrolled) instruction tree.
    pub fn assignment_count(&self) -> usize {
        match self {
            Instruction::Affine { .. } | Instruction::Max { .. } | Instruction::Min { .. } => 1,
            Instruction::Seq(b) => b.body.iter().map(Self::assignment_count).sum(),
            Instruction::Par { blocks } | Instruction::For { blocks } | Instruction::ForPar { blocks } => {
                blocks.iter().flat_map(|b| &b.body).map(Self::assignment_count).sum()
            }
        }
    }
}

/// Interned variable names; a variable's id is its index.
#[derive(Clone, Debug, Default)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Continues numbering after an existing symbol table.
    pub fn from_names(names: Vec<String>) -> Self {
        VarTable { names }
    }

    pub fn fresh(&mut self, name: impl Into<String>) -> VarId {
        let id = VarId(self.names.len() as u32);
        self.names.push(name.into());
        id
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn into_names(self) -> Vec<String> {
        self.names
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaapProgram {
    pub inputs: Vec<VarId>,
    pub outputs: Vec<VarId>,
    pub body: Instruction,
    /// Variable names, indexed by [`VarId`].
    pub variables: Vec<String>,
}

impl MaapProgram {
    pub fn new(vars: VarTable, inputs: Vec<VarId>, outputs: Vec<VarId>, body: Instruction) -> Self {
        MaapProgram {
            inputs,
            outputs,
            body,
            variables: vars.into_names(),
        }
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn name(&self, v: VarId) -> &str {
        self.variables.get(v.index()).map_or("?", String::as_str)
    }

    /// Appends a new variable to the symbol table.
    pub fn fresh_var(&mut self, name: impl Into<String>) -> VarId {
        let id = VarId(self.variables.len() as u32);
        self.variables.push(name.into());
        id
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("program serialization cannot fail")
    }

    pub fn from_json(doc: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(doc)
    }
}

/// The two-variable minimum `y ← min{x1, x2}`.
pub fn min_of_two() -> MaapProgram {
    let mut vars = VarTable::new();
    let x1 = vars.fresh("x1");
    let x2 = vars.fresh("x2");
    let y = vars.fresh("y");
    let body = Instruction::seq(vec![Instruction::min(y, vec![x1.into(), x2.into()])]);
    MaapProgram::new(vars, vec![x1, x2], vec![y], body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::int;

    #[test]
    fn affine_construction_merges_duplicates_and_drops_zeros() {
        let e = AffineExpr::new(
            int(1),
            [
                (int(2), VarId(3)),
                (int(-2), VarId(3)),
                (int(5), VarId(1)),
                (int(1), VarId(1)),
            ],
        );
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.terms()[0].var, VarId(1));
        assert_eq!(e.terms()[0].coeff, int(6));

        let d = VarId(0) + VarId(1) - VarId(0);
        assert_eq!(d, AffineExpr::var(VarId(1)));
    }

    #[test]
    fn single_term_extremum_becomes_affine() {
        let ins = Instruction::max(VarId(1), vec![AffineExpr::var(VarId(0))]);
        assert!(matches!(ins, Instruction::Affine { .. }));
    }

    #[test]
    fn json_uses_kind_tags_and_num_den_rationals() {
        let p = min_of_two();
        let doc = p.to_json();
        assert!(doc.starts_with("{\"inputs\":[0,1],\"outputs\":[2],\"body\":{\"kind\":\"seq\""));
        assert!(doc.contains("\"kind\":\"min\""));
        assert!(doc.contains("{\"num\":\"1\",\"den\":\"1\"}"));
        assert_eq!(MaapProgram::from_json(&doc).unwrap(), p);
    }

    #[test]
    fn json_load_normalizes_duplicate_terms() {
        let doc = r#"{"inputs":[0],"outputs":[1],"variables":["x","y"],
            "body":{"kind":"affine","target":1,"expr":{"constant":{"num":"0","den":"1"},
            "terms":[{"coeff":{"num":"1","den":"2"},"var":0},{"coeff":{"num":"1","den":"2"},"var":0}]}}}"#;
        let p = MaapProgram::from_json(doc).unwrap();
        match &p.body {
            Instruction::Affine { expr, .. } => {
                assert_eq!(expr.terms().len(), 1);
                assert_eq!(expr.terms()[0].coeff, int(1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
