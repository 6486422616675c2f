use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{AffineExpr, Block, Instruction, MaapProgram, VarId};

/// A well-formedness violation. `path` locates the offending instruction:
/// it alternates instruction indices and block indices from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownVariable {
        var: VarId,
    },
    DuplicateInput {
        var: VarId,
    },
    UseBeforeDef {
        var: VarId,
        path: Vec<usize>,
    },
    WriteConflict {
        var: VarId,
        blocks: (usize, usize),
        path: Vec<usize>,
    },
    Arity {
        target: VarId,
        terms: usize,
        path: Vec<usize>,
    },
    UndefinedOutput {
        var: VarId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownVariable { var } => write!(f, "variable {var} is not in the symbol table"),
            Violation::DuplicateInput { var } => write!(f, "input {var} listed more than once"),
            Violation::UseBeforeDef { var, path } => {
                write!(f, "{var} read before assignment at {path:?}")
            }
            Violation::WriteConflict { var, blocks, path } => write!(
                f,
                "{var} assigned in parallel block {} and used in block {} at {path:?}",
                blocks.0, blocks.1
            ),
            Violation::Arity { target, terms, path } => write!(
                f,
                "max/min into {target} has {terms} term(s), at least 2 required, at {path:?}"
            ),
            Violation::UndefinedOutput { var } => write!(f, "output {var} is never assigned"),
        }
    }
}

/// Reports every violation of the program's static rules; an empty list
/// means the program is valid.
pub fn validate_program(prog: &MaapProgram) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = prog.var_count();

    let mut unknown = BTreeSet::new();
    let mut note = |v: VarId| {
        if v.index() >= n {
            unknown.insert(v);
        }
    };
    prog.inputs.iter().chain(&prog.outputs).copied().for_each(&mut note);
    visit_vars(&prog.body, &mut note);
    if !unknown.is_empty() {
        out.extend(unknown.into_iter().map(|var| Violation::UnknownVariable { var }));
        return out;
    }

    let mut defined = vec![false; n];
    for &v in &prog.inputs {
        if defined[v.index()] {
            out.push(Violation::DuplicateInput { var: v });
        }
        defined[v.index()] = true;
    }
    let mut checker = Checker {
        defined,
        path: Vec::new(),
        out: &mut out,
    };
    checker.instruction(&prog.body);
    let defined = checker.defined;
    for &v in &prog.outputs {
        if !defined[v.index()] {
            out.push(Violation::UndefinedOutput { var: v });
        }
    }
    out
}

fn visit_vars(ins: &Instruction, f: &mut impl FnMut(VarId)) {
    match ins {
        Instruction::Affine { target, expr } => {
            f(*target);
            expr.vars().for_each(&mut *f);
        }
        Instruction::Max { target, terms } | Instruction::Min { target, terms } => {
            f(*target);
            terms.iter().flat_map(AffineExpr::vars).for_each(&mut *f);
        }
        Instruction::Seq(b) => visit_block_vars(b, f),
        Instruction::Par { blocks } | Instruction::For { blocks } | Instruction::ForPar { blocks } => {
            blocks.iter().for_each(|b| visit_block_vars(b, f))
        }
    }
}

fn visit_block_vars(b: &Block, f: &mut impl FnMut(VarId)) {
    b.locals.iter().copied().for_each(&mut *f);
    b.body.iter().for_each(|i| visit_vars(i, f));
}

struct Checker<'a> {
    defined: Vec<bool>,
    path: Vec<usize>,
    out: &'a mut Vec<Violation>,
}

impl Checker<'_> {
    fn reads(&mut self, expr: &AffineExpr) {
        for v in expr.vars() {
            if !self.defined[v.index()] {
                self.out.push(Violation::UseBeforeDef {
                    var: v,
                    path: self.path.clone(),
                });
            }
        }
    }

    fn instruction(&mut self, ins: &Instruction) {
        match ins {
            Instruction::Affine { target, expr } => {
                self.reads(expr);
                self.defined[target.index()] = true;
            }
            Instruction::Max { target, terms } | Instruction::Min { target, terms } => {
                if terms.len() < 2 {
                    self.out.push(Violation::Arity {
                        target: *target,
                        terms: terms.len(),
                        path: self.path.clone(),
                    });
                }
                terms.iter().for_each(|t| self.reads(t));
                self.defined[target.index()] = true;
            }
            Instruction::Seq(b) => self.block(b),
            Instruction::For { blocks } => self.blocks(blocks),
            Instruction::Par { blocks } | Instruction::ForPar { blocks } => {
                self.blocks(blocks);
                self.conflicts(blocks);
            }
        }
    }

    fn blocks(&mut self, blocks: &[Block]) {
        for (j, b) in blocks.iter().enumerate() {
            self.path.push(j);
            self.block(b);
            self.path.pop();
        }
    }

    fn block(&mut self, b: &Block) {
        let saved: Vec<bool> = b.locals.iter().map(|v| self.defined[v.index()]).collect();
        for v in &b.locals {
            self.defined[v.index()] = false;
        }
        for (i, ins) in b.body.iter().enumerate() {
            self.path.push(i);
            self.instruction(ins);
            self.path.pop();
        }
        for (v, was) in b.locals.iter().zip(saved) {
            self.defined[v.index()] = was;
        }
    }

    /// A variable assigned in one parallel block may not appear in any sibling.
    fn conflicts(&mut self, blocks: &[Block]) {
        if blocks.len() < 2 {
            return;
        }
        let mut writers: HashMap<VarId, Vec<usize>> = HashMap::new();
        let mut users: HashMap<VarId, Vec<usize>> = HashMap::new();
        for (j, b) in blocks.iter().enumerate() {
            let mut acc = Access::default();
            acc.block(b);
            for v in acc.writes {
                writers.entry(v).or_default().push(j);
            }
            for v in acc.uses {
                users.entry(v).or_default().push(j);
            }
        }
        let mut found = BTreeSet::new();
        for (var, ws) in &writers {
            for &w in ws {
                for &u in users.get(var).into_iter().flatten() {
                    if u != w {
                        found.insert((*var, w.min(u), w.max(u)));
                    }
                }
            }
        }
        for (var, a, b) in found {
            self.out.push(Violation::WriteConflict {
                var,
                blocks: (a, b),
                path: self.path.clone(),
            });
        }
    }
}

/// Non-local reads and writes of a block.
#[derive(Default)]
struct Access {
    writes: BTreeSet<VarId>,
    uses: BTreeSet<VarId>,
    shadow: HashMap<VarId, usize>,
}

impl Access {
    fn visible(&self, v: VarId) -> bool {
        self.shadow.get(&v).copied().unwrap_or(0) == 0
    }

    fn write(&mut self, v: VarId) {
        if self.visible(v) {
            self.writes.insert(v);
            self.uses.insert(v);
        }
    }

    fn read(&mut self, e: &AffineExpr) {
        for v in e.vars() {
            if self.visible(v) {
                self.uses.insert(v);
            }
        }
    }

    fn block(&mut self, b: &Block) {
        for v in &b.locals {
            *self.shadow.entry(*v).or_default() += 1;
        }
        for ins in &b.body {
            self.instruction(ins);
        }
        for v in &b.locals {
            *self.shadow.get_mut(v).unwrap() -= 1;
        }
    }

    fn instruction(&mut self, ins: &Instruction) {
        match ins {
            Instruction::Affine { target, expr } => {
                self.read(expr);
                self.write(*target);
            }
            Instruction::Max { target, terms } | Instruction::Min { target, terms } => {
                terms.iter().for_each(|t| self.read(t));
                self.write(*target);
            }
            Instruction::Seq(b) => self.block(b),
            Instruction::Par { blocks } | Instruction::For { blocks } | Instruction::ForPar { blocks } => {
                blocks.iter().for_each(|b| self.block(b))
            }
        }
    }
}
