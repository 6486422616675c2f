//! Loading artifacts and instances from disk.

use std::fs;
use std::path::{Path, PathBuf};

use maap::maxflow::{FlowInstance, FlowNetwork};
use maap::mst::{default_big_m, mst_input_vector, WeightedGraph};
use maap::net::{deserialize, ReluNet};
use maap::num::{parse_rational, Rational};
use maap::program::MaapProgram;

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_error(path: &Path, message: impl ToString) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

/// Either kind of JSON artifact the `build` command writes.
pub enum Artifact {
    Net(ReluNet),
    Program(MaapProgram),
}

/// Reads a network or a program. Files ending in `.maap.json` are read as
/// programs, everything else is tried as a network first.
pub fn artifact(path: &Path) -> Result<Artifact, CliError> {
    let text = read(path)?;
    if text.trim().is_empty() {
        return Err(parse_error(path, "empty file"));
    }
    let as_program = |text: &str| MaapProgram::from_json(text).map(Artifact::Program);
    if path.to_string_lossy().ends_with(".maap.json") {
        return as_program(&text).map_err(|e| parse_error(path, e));
    }
    match deserialize(&text) {
        Ok(net) => Ok(Artifact::Net(net)),
        Err(net_err) => as_program(&text)
            .map_err(|prog_err| parse_error(path, format!("not a network ({net_err}) nor a program ({prog_err})"))),
    }
}

/// An input vector, plus the flow network when it came from a digraph file.
pub struct Instance {
    pub values: Vec<Rational>,
    pub flow: Option<FlowNetwork>,
}

/// Reads an instance. Accepted forms: an undirected graph file (header
/// `n m undirected`, packed with the default big-M), a digraph file (header
/// `n m directed`), or a plain list of numbers separated by whitespace or
/// commas, optionally wrapped in brackets.
pub fn instance(path: &Path) -> Result<Instance, CliError> {
    let text = read(path)?;
    let header = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .ok_or_else(|| parse_error(path, "empty file"))?;
    let kind: Vec<&str> = header.split_whitespace().take(3).collect();
    match kind.as_slice() {
        [_, _, "undirected"] => {
            let g: WeightedGraph = text.parse().map_err(|e| parse_error(path, e))?;
            let values = mst_input_vector(&g, &default_big_m(&g)).map_err(|e| parse_error(path, e))?;
            Ok(Instance { values, flow: None })
        }
        [_, _, "directed"] => {
            let inst: FlowInstance = text.parse().map_err(|e| parse_error(path, e))?;
            Ok(Instance {
                values: inst.capacities,
                flow: Some(inst.network),
            })
        }
        _ => {
            let values = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or(""))
                .flat_map(|l| l.split(|c: char| c.is_whitespace() || matches!(c, ',' | '[' | ']')))
                .filter(|t| !t.is_empty())
                .map(|t| parse_rational(t.trim_matches('"')))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| parse_error(path, e))?;
            Ok(Instance { values, flow: None })
        }
    }
}

pub fn flow_graph(path: &Path) -> Result<FlowInstance, CliError> {
    read(path)?.parse().map_err(|e| parse_error(path, e))
}

pub fn undirected_graph(path: &Path) -> Result<WeightedGraph, CliError> {
    read(path)?.parse().map_err(|e| parse_error(path, e))
}

/// `dir/stem.ext`.
pub fn output_path(dir: &Path, stem: &str, ext: &str) -> PathBuf {
    dir.join(format!("{stem}.{ext}"))
}
