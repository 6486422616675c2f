//! MAAP to ReLU network lowering.
//!
//! Every variable is tracked as an affine form over neurons. Affine
//! assignments only rewrite forms; each pairwise max or min adds a single
//! hidden neuron `h = σ(b − a)` and yields `a + h` (max) or `b − h` (min).
//!
//! Neurons are placed structurally: an instruction that starts after `off`
//! layers of its enclosing sequence puts the neurons of its `j`-th gadget
//! level on layer `off + j`. Sequenced instructions therefore never share a
//! layer and parallel blocks share layers side by side, which keeps depth,
//! width and size within the program's ledger. Values from earlier layers
//! reach later neurons through skip connections.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use num_traits::{Signed, Zero};

use super::CompileError;
use crate::net::{Connection, Neuron, ReluNet, Role};
use crate::num::Rational;
use crate::program::{instruction_complexity, validate_program, AffineExpr, Block, Instruction, MaapProgram};

#[derive(Clone, Debug, Default)]
struct Form {
    constant: Rational,
    /// Sorted by neuron id, no zero coefficients.
    terms: Vec<(usize, Rational)>,
}

impl Form {
    fn neuron(id: usize) -> Self {
        Form {
            constant: Rational::zero(),
            terms: vec![(id, Rational::from_integer(1.into()))],
        }
    }

    /// `Σ coeff · form + constant`, merging equal neuron ids.
    fn combine<'a>(constant: Rational, parts: impl IntoIterator<Item = (&'a Rational, &'a Form)>) -> Self {
        let mut constant = constant;
        let mut terms: Vec<(usize, Rational)> = Vec::new();
        for (c, f) in parts {
            if !f.constant.is_zero() {
                constant += c * &f.constant;
            }
            terms.extend(f.terms.iter().map(|(v, w)| (*v, c * w)));
        }
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
        for (v, w) in terms {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += w,
                _ => merged.push((v, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        Form {
            constant,
            terms: merged,
        }
    }
}

struct Lowering {
    env: Vec<Rc<Form>>,
    neurons: Vec<Neuron>,
    arcs: Vec<Connection>,
    /// Incoming arcs of each neuron, as indices into `arcs`.
    sources: Vec<Vec<usize>>,
    /// Materialized copies of long forms, keyed by the long form's address
    /// (kept alive in the entry) and usable from the given layer on.
    shortcuts: HashMap<*const Form, (Rc<Form>, Rc<Form>, usize)>,
}

/// Operands with more terms than this are materialized before use.
const LONG_FORM: usize = 4;

fn one() -> Rational {
    Rational::from_integer(1.into())
}

impl Lowering {
    fn add_neuron(&mut self, layer: usize, pre: &Form, role: Role) -> usize {
        let id = self.neurons.len();
        self.neurons.push(Neuron {
            id,
            layer,
            bias: pre.constant.clone(),
            role,
        });
        let mut incoming = Vec::with_capacity(pre.terms.len());
        for (src, w) in &pre.terms {
            incoming.push(self.arcs.len());
            self.arcs.push(Connection {
                src: *src,
                dst: id,
                weight: w.clone(),
            });
        }
        self.sources.push(incoming);
        id
    }

    /// The form of variable `v` as seen by an instruction at offset `off`.
    fn var(&self, v: usize, off: usize) -> &Rc<Form> {
        let f = &self.env[v];
        match self.shortcuts.get(&Rc::as_ptr(f)) {
            Some((_, short, layer)) if *layer <= off => short,
            _ => f,
        }
    }

    fn eval(&self, e: &AffineExpr, off: usize) -> Rc<Form> {
        if let [t] = e.terms() {
            if e.constant_term().is_zero() && t.coeff == one() {
                return Rc::clone(self.var(t.var.index(), off));
            }
        }
        let parts: Vec<(&Rational, &Form)> = e
            .terms()
            .iter()
            .map(|t| (&t.coeff, self.var(t.var.index(), off).as_ref()))
            .collect();
        Rc::new(Form::combine(e.constant_term().clone(), parts))
    }

    /// Balanced tree of pairwise gadgets; level `j` lands on layer `off + j`.
    ///
    /// Long operands are also rewritten as `σ(F) − σ(−F)` on layer
    /// `off + 1`. The copy is exact and later instructions read it instead
    /// of `F`, which stops affine accumulators from being copied into every
    /// gadget that reads them; copies nobody reads are pruned. A `k`-term
    /// tree uses `⌊k/2⌋` neurons on its first layer and `k − 1` in total,
    /// so up to `(2k − ⌊k/2⌋) / 2` copies fit inside the ledger's `2k`
    /// width and `4k` size.
    fn extremum(&mut self, terms: &[AffineExpr], is_max: bool, off: usize) -> Rc<Form> {
        let mut level: Vec<Rc<Form>> = terms.iter().map(|t| self.eval(t, off)).collect();
        let k = level.len();
        let mut long: Vec<usize> = (0..k).filter(|&i| level[i].terms.len() > LONG_FORM).collect();
        long.sort_by_key(|&i| std::cmp::Reverse(level[i].terms.len()));
        let mut seen = HashSet::new();
        long.retain(|&i| seen.insert(Rc::as_ptr(&level[i])));
        long.truncate((2 * k - k / 2) / 2);
        for i in long {
            let short = Rc::new(self.materialize(&level[i], off + 1));
            let f = Rc::clone(&level[i]);
            self.shortcuts.insert(Rc::as_ptr(&f), (f, short, off + 1));
        }
        let mut depth = 0;
        let minus = -one();
        while level.len() > 1 {
            depth += 1;
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                match pair {
                    [a, b] => next.push(Rc::new(self.pairwise(a, b, is_max, off + depth, &minus))),
                    [a] => next.push(Rc::clone(a)),
                    _ => unreachable!(),
                }
            }
            level = next;
        }
        level.pop().expect("extremum has at least one term")
    }

    /// Two neurons `p = σ(f)`, `q = σ(−f)` with `p − q = f`.
    fn materialize(&mut self, f: &Form, layer: usize) -> Form {
        let minus = -one();
        let neg = Form::combine(Rational::zero(), [(&minus, f)]);
        let p = self.add_neuron(layer, f, Role::Hidden);
        let q = self.add_neuron(layer, &neg, Role::Hidden);
        Form {
            constant: Rational::zero(),
            terms: vec![(p, one()), (q, minus)],
        }
    }

    /// `max{a, b} = a + σ(b − a)`, `min{a, b} = b − σ(b − a)`.
    fn pairwise(&mut self, a: &Form, b: &Form, is_max: bool, layer: usize, minus: &Rational) -> Form {
        let diff = Form::combine(Rational::zero(), [(&one(), b), (minus, a)]);
        let rectified = if diff.terms.is_empty() {
            let c = if diff.constant.is_positive() {
                diff.constant
            } else {
                Rational::zero()
            };
            Form {
                constant: c,
                terms: Vec::new(),
            }
        } else {
            Form::neuron(self.add_neuron(layer, &diff, Role::Hidden))
        };
        if is_max {
            Form::combine(Rational::zero(), [(&one(), a), (&one(), &rectified)])
        } else {
            Form::combine(Rational::zero(), [(&one(), b), (minus, &rectified)])
        }
    }

    fn block(&mut self, b: &Block, off: usize) {
        let saved: Vec<Rc<Form>> = b.locals.iter().map(|v| Rc::clone(&self.env[v.index()])).collect();
        let mut at = off;
        for ins in &b.body {
            self.instruction(ins, at);
            at += instruction_complexity(ins).depth as usize;
        }
        for (v, f) in b.locals.iter().zip(saved) {
            self.env[v.index()] = f;
        }
    }

    fn instruction(&mut self, ins: &Instruction, off: usize) {
        match ins {
            Instruction::Affine { target, expr } => {
                self.env[target.index()] = self.eval(expr, off);
            }
            Instruction::Max { target, terms } => {
                self.env[target.index()] = self.extremum(terms, true, off);
            }
            Instruction::Min { target, terms } => {
                self.env[target.index()] = self.extremum(terms, false, off);
            }
            Instruction::Seq(b) => self.block(b, off),
            Instruction::For { blocks } => {
                let mut at = off;
                for b in blocks {
                    self.block(b, at);
                    at += b
                        .body
                        .iter()
                        .map(|i| instruction_complexity(i).depth as usize)
                        .sum::<usize>();
                }
            }
            Instruction::Par { blocks } | Instruction::ForPar { blocks } => {
                for b in blocks {
                    self.block(b, off);
                }
            }
        }
    }
}

/// Lowers a valid program to an equivalent network whose depth, width and
/// size are at most `d + 1`, `w` and `s` of the program's ledger.
pub fn compile(prog: &MaapProgram) -> Result<ReluNet, CompileError> {
    let violations = validate_program(prog);
    if !violations.is_empty() {
        return Err(CompileError::InvalidProgram(violations));
    }
    let mut low = Lowering {
        env: (0..prog.var_count()).map(|_| Rc::new(Form::default())).collect(),
        neurons: Vec::new(),
        arcs: Vec::new(),
        sources: Vec::new(),
        shortcuts: HashMap::new(),
    };
    for &v in &prog.inputs {
        let id = low.add_neuron(0, &Form::default(), Role::Input);
        low.env[v.index()] = Rc::new(Form::neuron(id));
    }
    low.instruction(&prog.body, 0);
    let results: Vec<Rc<Form>> = prog
        .outputs
        .iter()
        .map(|v| Rc::clone(low.var(v.index(), usize::MAX)))
        .collect();
    for f in &results {
        // Output layers are fixed after pruning.
        low.add_neuron(usize::MAX, f, Role::Output);
    }
    Ok(finish(low))
}

/// Drops hidden neurons that no output depends on, renumbers, and closes
/// gaps left by empty layers.
fn finish(low: Lowering) -> ReluNet {
    let Lowering {
        neurons, arcs, sources, ..
    } = low;
    let n = neurons.len();
    let mut live = vec![false; n];
    for v in (0..n).rev() {
        if neurons[v].role != Role::Hidden {
            live[v] = true;
        }
        if live[v] {
            for &a in &sources[v] {
                live[arcs[a].src] = true;
            }
        }
    }

    let hidden_top = neurons
        .iter()
        .filter(|v| v.role == Role::Hidden && live[v.id])
        .map(|v| v.layer)
        .max()
        .unwrap_or(0);
    let mut occupied = vec![false; hidden_top + 1];
    for v in neurons.iter().filter(|v| v.role == Role::Hidden && live[v.id]) {
        occupied[v.layer] = true;
    }
    let mut new_layer = vec![0; hidden_top + 1];
    let mut next = 0;
    for (l, &used) in occupied.iter().enumerate().skip(1) {
        if used {
            next += 1;
        }
        new_layer[l] = next;
    }
    let output_layer = next + 1;

    let mut id_map = vec![usize::MAX; n];
    let mut net = ReluNet::new();
    for v in neurons.iter().filter(|v| live[v.id]) {
        let layer = match v.role {
            Role::Input => 0,
            Role::Hidden => new_layer[v.layer],
            Role::Output => output_layer,
        };
        id_map[v.id] = net.add_neuron(layer, v.bias.clone(), v.role);
    }
    for v in (0..n).filter(|&v| live[v]) {
        for &a in &sources[v] {
            let c = &arcs[a];
            net.connect(id_map[c.src], id_map[c.dst], c.weight.clone());
        }
    }
    net
}
