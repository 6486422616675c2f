//! Randomized equivalence runs against the reference algorithms.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use maap::compiler::compile;
use maap::maxflow::{build_maxflow_program, flow_value, FlowInstance};
use maap::mst::{build_mst_program, pairs};
use maap::net::ForwardPlan;
use maap::num::{approx_eq_rel, Rational, Scalar};
use maap::oracles::{check_flow, edmonds_karp, kruskal};
use maap::program::Interpreter;
use maap::random::{flow_instance, trial_rng, weight_vector, InstanceRng};

use crate::{CliError, Problem};

/// Relative tolerance for float-mode forward passes.
pub const FLOAT_TOL: f64 = 1e-6;
/// Arc probability for random digraphs.
pub const DENSITY: f64 = 0.5;
pub const MAX_CAPACITY: i64 = 10;

/// Parses `a..b` (inclusive), `a..=b` or a single size `a`.
pub fn parse_sizes(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad size `{t}`"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(format!("empty size range `{s}`"));
    }
    Ok(lo..=hi)
}

/// The stream for one trial: it depends only on the seed, the size and the
/// trial index, so any failure can be regenerated on its own.
pub fn instance_rng(seed: u64, size: usize, trial: u64) -> InstanceRng {
    trial_rng(seed, ((size as u64) << 32) | trial)
}

pub struct SizeReport {
    pub size: usize,
    pub trials: u64,
    pub pass: u64,
    pub fail: u64,
}

pub struct Counterexample {
    pub size: usize,
    pub trial: u64,
    pub reason: String,
    /// The instance in the graph-file format `eval` reads.
    pub instance: String,
}

pub struct Report {
    pub sizes: Vec<SizeReport>,
    pub first_failure: Option<Counterexample>,
}

pub fn run(problem: Problem, sizes: RangeInclusive<usize>, trials: u64, seed: u64) -> Result<Report, CliError> {
    let mut report = Report {
        sizes: Vec::new(),
        first_failure: None,
    };
    for size in sizes {
        let mut checker = Checker::new(problem, size)?;
        let mut entry = SizeReport {
            size,
            trials,
            pass: 0,
            fail: 0,
        };
        for trial in 0..trials {
            let mut rng = instance_rng(seed, size, trial);
            match checker.trial(&mut rng)? {
                None => entry.pass += 1,
                Some((reason, instance)) => {
                    entry.fail += 1;
                    report.first_failure.get_or_insert(Counterexample {
                        size,
                        trial,
                        reason,
                        instance,
                    });
                }
            }
        }
        report.sizes.push(entry);
    }
    Ok(report)
}

/// Per-size state. The spanning-tree program and network depend only on
/// the size, so they are built once; max-flow programs are built per
/// instance because every trial draws a new digraph.
enum Checker {
    Mst {
        n: usize,
        interp: Interpreter<Rational>,
        plan: Box<ForwardPlan<f64>>,
    },
    MaxFlow {
        n: usize,
    },
}

type Failure = Option<(String, String)>;

impl Checker {
    fn new(problem: Problem, size: usize) -> Result<Self, CliError> {
        Ok(match problem {
            Problem::Mst => {
                let prog = build_mst_program(size).map_err(CliError::invalid)?;
                let net = compile(&prog).map_err(CliError::invalid)?;
                Checker::Mst {
                    n: size,
                    interp: Interpreter::new(&prog).map_err(CliError::invalid)?,
                    plan: Box::new(ForwardPlan::new(&net).map_err(CliError::invalid)?),
                }
            }
            Problem::Maxflow => {
                if size < 2 {
                    return Err(CliError::Invalid(format!(
                        "a flow network needs at least 2 nodes, got {size}"
                    )));
                }
                Checker::MaxFlow { n: size }
            }
        })
    }

    fn trial(&mut self, rng: &mut InstanceRng) -> Result<Failure, CliError> {
        match self {
            Checker::Mst { n, interp, plan } => {
                let x = weight_vector(*n, rng);
                let expected = kruskal(*n, &x).map_err(CliError::invalid)?;
                let got = interp.run(&x).map_err(CliError::invalid)?;
                let fail = |reason: String| Some((reason, mst_instance(*n, &x)));
                if got != [expected.clone()] {
                    return Ok(fail(format!("interpret={} kruskal={expected}", show(&got))));
                }
                let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
                let out = plan.run(&xf).map_err(CliError::invalid)?;
                if out.len() != 1 || !approx_eq_rel(out[0], expected.to_f64(), FLOAT_TOL) {
                    return Ok(fail(format!("forward={out:?} kruskal={expected}")));
                }
                Ok(None)
            }
            Checker::MaxFlow { n } => {
                let inst = flow_instance(*n, DENSITY, MAX_CAPACITY, rng);
                let net = &inst.network;
                let expected = edmonds_karp(net, &inst.capacities).value;
                let (prog, _) = build_maxflow_program(net);
                let fail = |reason: String| Some((reason, flow_instance_text(&inst)));
                let y = Interpreter::new(&prog)
                    .and_then(|i| i.run(&inst.capacities))
                    .map_err(CliError::invalid)?;
                let check = check_flow(net, &inst.capacities, &y);
                if !check.feasible {
                    return Ok(fail(format!(
                        "interpret gives an infeasible flow: {:?}",
                        check.violations
                    )));
                }
                let value = flow_value(net, &y);
                if value != expected {
                    return Ok(fail(format!("interpret value={value} edmonds_karp={expected}")));
                }
                let plan =
                    ForwardPlan::<f64>::new(&compile(&prog).map_err(CliError::invalid)?).map_err(CliError::invalid)?;
                let cf: Vec<f64> = inst.capacities.iter().map(Scalar::to_f64).collect();
                let yf = plan.run(&cf).map_err(CliError::invalid)?;
                let value_f = float_flow_value(net, &yf);
                if !approx_eq_rel(value_f, expected.to_f64(), FLOAT_TOL) {
                    return Ok(fail(format!("forward value={value_f} edmonds_karp={expected}")));
                }
                Ok(None)
            }
        }
    }
}

/// Net flow out of the source for a float flow on forward arcs.
pub fn float_flow_value(net: &maap::maxflow::FlowNetwork, y: &[f64]) -> f64 {
    let s = net.source();
    net.forward_arcs()
        .iter()
        .zip(y)
        .map(|(&(u, v), ye)| match (u == s, v == s) {
            (true, _) => *ye,
            (_, true) => -ye,
            _ => 0.0,
        })
        .sum()
}

fn show(xs: &[Rational]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn mst_instance(n: usize, x: &[Rational]) -> String {
    let mut out = format!("{n} {} undirected\n", x.len());
    for ((i, j), w) in pairs(n).zip(x) {
        let _ = writeln!(out, "{} {} {w}", i + 1, j + 1);
    }
    out
}

fn flow_instance_text(inst: &FlowInstance) -> String {
    let net = &inst.network;
    let n = net.node_count();
    let mut out = format!("{n} {} directed source=1 sink={n}\n", net.arc_count());
    for ((u, v), c) in net.arcs().zip(&inst.capacities) {
        let _ = writeln!(out, "{} {} {c}", u + 1, v + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_sizes("2..8").unwrap(), 2..=8);
        assert_eq!(parse_sizes("2..=8").unwrap(), 2..=8);
        assert_eq!(parse_sizes("5").unwrap(), 5..=5);
        assert!(parse_sizes("8..2").is_err());
        assert!(parse_sizes("a..2").is_err());
    }

    #[test]
    fn printed_instances_parse_back() {
        let x = weight_vector(4, &mut instance_rng(1, 4, 0));
        let g: maap::mst::WeightedGraph = mst_instance(4, &x).parse().unwrap();
        assert_eq!(maap::mst::mst_input_vector(&g, &maap::num::int(100)).unwrap(), x);
        let inst = flow_instance(5, DENSITY, MAX_CAPACITY, &mut instance_rng(1, 5, 0));
        let back: FlowInstance = flow_instance_text(&inst).parse().unwrap();
        assert_eq!(back, inst);
    }
}
