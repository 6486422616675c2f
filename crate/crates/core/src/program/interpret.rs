use thiserror::Error;

use super::{validate_program, AffineExpr, Block, Instruction, MaapProgram, Violation};
use crate::num::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("expected {expected} inputs, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("invalid program: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Execute the blocks of every parallel construct in reverse order.
    pub reverse_parallel: bool,
}

struct Expr<T> {
    constant: T,
    terms: Vec<(T, usize)>,
}

impl<T: Scalar> Expr<T> {
    fn lower(e: &AffineExpr) -> Self {
        Expr {
            constant: T::from_rational(e.constant_term()),
            terms: e
                .terms()
                .iter()
                .map(|t| (T::from_rational(&t.coeff), t.var.index()))
                .collect(),
        }
    }

    fn eval(&self, env: &[T]) -> T {
        let mut acc = self.constant.clone();
        for (c, v) in &self.terms {
            acc.mul_add_assign(c, &env[*v]);
        }
        acc
    }
}

struct Scope<T> {
    locals: Vec<usize>,
    body: Vec<Node<T>>,
}

enum Node<T> {
    Affine {
        target: usize,
        expr: Expr<T>,
    },
    Extremum {
        target: usize,
        max: bool,
        terms: Vec<Expr<T>>,
    },
    Seq(Scope<T>),
    Blocks {
        parallel: bool,
        blocks: Vec<Scope<T>>,
    },
}

impl<T: Scalar> Scope<T> {
    fn lower(b: &Block) -> Self {
        Scope {
            locals: b.locals.iter().map(|v| v.index()).collect(),
            body: b.body.iter().map(Node::lower).collect(),
        }
    }
}

impl<T: Scalar> Node<T> {
    fn lower(ins: &Instruction) -> Self {
        match ins {
            Instruction::Affine { target, expr } => Node::Affine {
                target: target.index(),
                expr: Expr::lower(expr),
            },
            Instruction::Max { target, terms } | Instruction::Min { target, terms } => Node::Extremum {
                target: target.index(),
                max: matches!(ins, Instruction::Max { .. }),
                terms: terms.iter().map(Expr::lower).collect(),
            },
            Instruction::Seq(b) => Node::Seq(Scope::lower(b)),
            Instruction::Par { blocks } | Instruction::ForPar { blocks } => Node::Blocks {
                parallel: true,
                blocks: blocks.iter().map(Scope::lower).collect(),
            },
            Instruction::For { blocks } => Node::Blocks {
                parallel: false,
                blocks: blocks.iter().map(Scope::lower).collect(),
            },
        }
    }
}

/// A validated program with its constants converted to the evaluation
/// scalar. Build once, run on many inputs.
pub struct Interpreter<T> {
    vars: usize,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    root: Node<T>,
}

struct Machine<'a, T, F> {
    env: Vec<T>,
    path: Vec<usize>,
    opts: RunOptions,
    max_depth: usize,
    on_step: &'a mut F,
}

impl<T: Scalar, F: FnMut(&[usize], &[T])> Machine<'_, T, F> {
    fn node(&mut self, node: &Node<T>) {
        match node {
            Node::Affine { target, expr } => {
                let v = expr.eval(&self.env);
                self.env[*target] = v;
            }
            Node::Extremum { target, max, terms } => {
                let mut best = terms[0].eval(&self.env);
                for t in &terms[1..] {
                    let v = t.eval(&self.env);
                    if (*max && v > best) || (!*max && v < best) {
                        best = v;
                    }
                }
                self.env[*target] = best;
            }
            Node::Seq(scope) => self.scope(scope),
            Node::Blocks { parallel, blocks } => {
                if *parallel && self.opts.reverse_parallel {
                    for (j, b) in blocks.iter().enumerate().rev() {
                        self.path.push(j);
                        self.scope(b);
                        self.path.pop();
                    }
                } else {
                    for (j, b) in blocks.iter().enumerate() {
                        self.path.push(j);
                        self.scope(b);
                        self.path.pop();
                    }
                }
            }
        }
    }

    fn scope(&mut self, scope: &Scope<T>) {
        let saved: Vec<T> = scope.locals.iter().map(|&v| self.env[v].clone()).collect();
        for (i, n) in scope.body.iter().enumerate() {
            self.path.push(i);
            self.node(n);
            if self.path.len() <= self.max_depth {
                (self.on_step)(&self.path, &self.env);
            }
            self.path.pop();
        }
        for (&v, old) in scope.locals.iter().zip(saved) {
            self.env[v] = old;
        }
    }
}

impl<T: Scalar> Interpreter<T> {
    pub fn new(prog: &MaapProgram) -> Result<Self, EvalError> {
        let violations = validate_program(prog);
        if !violations.is_empty() {
            return Err(EvalError::Invalid(violations));
        }
        Ok(Self::new_unchecked(prog))
    }

    /// Skips validation; the caller guarantees the program is valid.
    pub fn new_unchecked(prog: &MaapProgram) -> Self {
        Interpreter {
            vars: prog.var_count(),
            inputs: prog.inputs.iter().map(|v| v.index()).collect(),
            outputs: prog.outputs.iter().map(|v| v.index()).collect(),
            root: Node::lower(&prog.body),
        }
    }

    pub fn input_len(&self) -> usize {
        self.inputs.len()
    }

    pub fn run(&self, inputs: &[T]) -> Result<Vec<T>, EvalError> {
        self.run_observed(inputs, RunOptions::default(), 0, |_, _| {})
    }

    pub fn run_with(&self, inputs: &[T], opts: RunOptions) -> Result<Vec<T>, EvalError> {
        self.run_observed(inputs, opts, 0, |_, _| {})
    }

    /// Runs the program, calling `on_step(path, env)` after every instruction
    /// whose path has at most `max_depth` components. `env` is indexed by
    /// variable id. Paths alternate instruction and block indices; the root
    /// instruction itself is not reported.
    pub fn run_observed<F: FnMut(&[usize], &[T])>(
        &self,
        inputs: &[T],
        opts: RunOptions,
        max_depth: usize,
        mut on_step: F,
    ) -> Result<Vec<T>, EvalError> {
        if inputs.len() != self.inputs.len() {
            return Err(EvalError::Arity {
                expected: self.inputs.len(),
                got: inputs.len(),
            });
        }
        let mut env = vec![T::zero(); self.vars];
        for (&v, x) in self.inputs.iter().zip(inputs) {
            env[v] = x.clone();
        }
        let mut m = Machine {
            env,
            path: Vec::new(),
            opts,
            max_depth,
            on_step: &mut on_step,
        };
        m.node(&self.root);
        Ok(self.outputs.iter().map(|&v| m.env[v].clone()).collect())
    }
}

/// Validates and runs `prog` once.
pub fn interpret<T: Scalar>(prog: &MaapProgram, inputs: &[T]) -> Result<Vec<T>, EvalError> {
    Interpreter::new(prog)?.run(inputs)
}
