//! `maap`: build, evaluate, verify and measure max-affine programs and the
//! ReLU networks compiled from them.
//!
//! Exit status is 0 on success, 1 when a verification or bound check
//! fails, and 2 for usage, file and parse errors.

mod input;
mod verify;

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use maap::compiler::{compile, sequentialize};
use maap::maxflow::{build_maxflow_program, flow_value, FlowNetwork};
use maap::mst::build_mst_program;
use maap::net::{serialize, ForwardPlan, NetStats, ReluNet};
use maap::num::{Rational, Scalar};
use maap::program::{complexity, Interpreter, MaapProgram};
use thiserror::Error;

use input::Artifact;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    fn invalid(e: impl Display) -> Self {
        CliError::Invalid(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Mst,
    Maxflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Rational,
    Float,
}

#[derive(Parser)]
#[command(
    name = "maap",
    version,
    about = "Max-affine arithmetic programs and exact ReLU networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the program for a problem and compile it to a network.
    Build {
        problem: Problem,
        /// Number of vertices (mst) or nodes of the complete digraph (maxflow).
        #[arg(long, conflicts_with = "graph")]
        n: Option<usize>,
        /// Graph file: `n m undirected` for mst, `n m directed` for maxflow.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Remove all parallelism before compiling (constant width).
        #[arg(long)]
        sequential: bool,
        /// Directory for the written files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Write only the program, skip compilation.
        #[arg(long)]
        program_only: bool,
    },
    /// Evaluate a network or program on an instance.
    Eval {
        /// A `.relu.json` network or `.maap.json` program.
        artifact: PathBuf,
        /// A number list, an undirected graph file or a digraph file.
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Rational)]
        mode: Mode,
    },
    /// Compare programs and networks with the reference algorithms on
    /// seeded random instances.
    Verify {
        problem: Problem,
        /// Sizes, as `a..b` (inclusive) or a single number.
        #[arg(long, value_parser = verify::parse_sizes)]
        n: std::ops::RangeInclusive<usize>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the complexity of a program or the statistics of a network.
    Stats { artifact: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build {
            problem,
            n,
            graph,
            sequential,
            out,
            program_only,
        } => build(problem, n, graph.as_deref(), sequential, &out, program_only),
        Command::Eval {
            artifact,
            instance,
            mode,
        } => eval(&artifact, &instance, mode),
        Command::Verify {
            problem,
            n,
            trials,
            seed,
        } => run_verify(problem, n, trials, seed),
        Command::Stats { artifact } => stats(&artifact),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn build(
    problem: Problem,
    n: Option<usize>,
    graph: Option<&Path>,
    sequential: bool,
    out: &Path,
    program_only: bool,
) -> Result<(), CliError> {
    let (mut prog, mut stem) = match (problem, n, graph) {
        (_, None, None) => return Err(CliError::Invalid("give --n or --graph".into())),
        (Problem::Mst, Some(n), _) => (build_mst_program(n).map_err(CliError::invalid)?, format!("mst_{n}")),
        (Problem::Mst, None, Some(path)) => {
            let g = input::undirected_graph(path)?;
            (
                build_mst_program(g.n).map_err(CliError::invalid)?,
                format!("mst_{}", g.n),
            )
        }
        (Problem::Maxflow, Some(n), _) => {
            let net =
                FlowNetwork::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).map_err(CliError::invalid)?;
            (build_maxflow_program(&net).0, format!("maxflow_{n}"))
        }
        (Problem::Maxflow, None, Some(path)) => {
            let inst = input::flow_graph(path)?;
            let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("graph");
            let name = name.split('.').next().unwrap_or(name);
            (build_maxflow_program(&inst.network).0, format!("maxflow_{name}"))
        }
    };
    if sequential {
        prog = sequentialize(&prog);
        stem.push_str("_seq");
    }
    let ledger = complexity(&prog);
    let prog_path = input::output_path(out, &stem, "maap.json");
    input::write(&prog_path, &prog.to_json())?;
    println!("wrote {}", prog_path.display());
    println!(
        "program: {ledger} inputs={} outputs={}",
        prog.inputs.len(),
        prog.outputs.len()
    );
    if program_only {
        return Ok(());
    }
    let net = compile(&prog).map_err(CliError::invalid)?;
    let net_path = input::output_path(out, &stem, "relu.json");
    input::write(&net_path, &serialize(&net))?;
    println!("wrote {}", net_path.display());
    bound_check(&prog, &net)
}

/// Prints the network statistics and checks them against the bound
/// `(d + 1, w, s)` given by the program's ledger.
fn bound_check(prog: &MaapProgram, net: &ReluNet) -> Result<(), CliError> {
    let ledger = complexity(prog);
    let bound = NetStats::new(ledger.depth + 1, ledger.width, ledger.size);
    let stats = net.stats();
    println!("network: {stats} neurons={}", net.neurons.len());
    let ok = stats.within(&bound);
    println!("bound: {bound} {}", if ok { "ok" } else { "VIOLATED" });
    if ok {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("network {stats} exceeds {bound}")))
    }
}

fn eval(artifact: &Path, instance: &Path, mode: Mode) -> Result<(), CliError> {
    let artifact = input::artifact(artifact)?;
    let inst = input::instance(instance)?;
    match mode {
        Mode::Rational => {
            let y: Vec<Rational> = run(&artifact, &inst.values)?;
            print_outputs(&y);
            if let Some(net) = &inst.flow {
                check_flow_len(net, y.len())?;
                println!("flow_value: {}", flow_value(net, &y));
            }
        }
        Mode::Float => {
            let x: Vec<f64> = inst.values.iter().map(Scalar::to_f64).collect();
            let y: Vec<f64> = run(&artifact, &x)?;
            print_outputs(&y);
            if let Some(net) = &inst.flow {
                check_flow_len(net, y.len())?;
                println!("flow_value: {}", verify::float_flow_value(net, &y));
            }
        }
    }
    Ok(())
}

fn run<T: Scalar>(artifact: &Artifact, x: &[T]) -> Result<Vec<T>, CliError> {
    match artifact {
        Artifact::Net(net) => ForwardPlan::new(net).and_then(|p| p.run(x)).map_err(CliError::invalid),
        Artifact::Program(prog) => Interpreter::new(prog).and_then(|i| i.run(x)).map_err(CliError::invalid),
    }
}

fn check_flow_len(net: &FlowNetwork, len: usize) -> Result<(), CliError> {
    let arcs = net.forward_arcs().len();
    if len == arcs {
        Ok(())
    } else {
        Err(CliError::Invalid(format!(
            "{len} outputs, but the digraph has {arcs} arc pairs; this is not its max-flow network"
        )))
    }
}

fn print_outputs<T: Display>(y: &[T]) {
    let parts: Vec<String> = y.iter().map(ToString::to_string).collect();
    println!("outputs: {}", parts.join(" "));
}

fn run_verify(
    problem: Problem,
    sizes: std::ops::RangeInclusive<usize>,
    trials: u64,
    seed: u64,
) -> Result<(), CliError> {
    let report = verify::run(problem, sizes, trials, seed)?;
    for s in &report.sizes {
        println!("size={} trials={} pass={} fail={}", s.size, s.trials, s.pass, s.fail);
    }
    match report.first_failure {
        None => Ok(()),
        Some(c) => {
            println!("first counterexample: size={} trial={} seed={seed}", c.size, c.trial);
            println!("reason: {}", c.reason);
            print!("{}", c.instance);
            let failed: u64 = report.sizes.iter().map(|s| s.fail).sum();
            Err(CliError::Mismatch(format!("{failed} mismatches")))
        }
    }
}

fn stats(path: &Path) -> Result<(), CliError> {
    match input::artifact(path)? {
        Artifact::Net(net) => {
            println!("network: {} neurons={}", net.stats(), net.neurons.len());
            println!("inputs={} outputs={}", net.input_len(), net.output_len());
            println!("layers: {:?}", net.layer_sizes());
            Ok(())
        }
        Artifact::Program(prog) => {
            println!("program: {}", complexity(&prog));
            println!(
                "inputs={} outputs={} variables={} assignments={}",
                prog.inputs.len(),
                prog.outputs.len(),
                prog.var_count(),
                prog.body.assignment_count()
            );
            let net = compile(&prog).map_err(CliError::invalid)?;
            bound_check(&prog, &net)
        }
    }
}
