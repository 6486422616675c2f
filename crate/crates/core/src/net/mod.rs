//! Feed-forward ReLU networks on a layered DAG.
//!
//! Arcs may skip layers; the only requirement is that the layer index
//! strictly increases along every arc. Hidden neurons apply `max{0, ·}`;
//! output neurons return their raw activation.

mod forward;
mod io;
mod probe;
mod validate;

use serde::{Deserialize, Serialize};

use crate::num::Rational;

pub use forward::{forward, ForwardError, ForwardPlan, ForwardTrace};
pub use io::{deserialize, serialize, NetIoError};
pub use probe::{continuity_probe, ContinuityReport};
pub use validate::{validate_net, NetViolation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Hidden,
    Output,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neuron {
    pub id: usize,
    pub layer: usize,
    pub bias: Rational,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    pub src: usize,
    pub dst: usize,
    pub weight: Rational,
}

/// Depth, width and size of a network.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NetStats {
    pub depth: u64,
    pub width: u64,
    pub size: u64,
}

impl NetStats {
    pub fn new(depth: u64, width: u64, size: u64) -> Self {
        NetStats { depth, width, size }
    }

    /// Componentwise `<=`.
    pub fn within(&self, bound: &NetStats) -> bool {
        self.depth <= bound.depth && self.width <= bound.width && self.size <= bound.size
    }
}

impl std::fmt::Display for NetStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "depth={} width={} size={}", self.depth, self.width, self.size)
    }
}

/// A ReLU network. Neuron ids equal their index in `neurons`. Inputs and
/// outputs are ordered by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReluNet {
    pub neurons: Vec<Neuron>,
    pub arcs: Vec<Connection>,
}

impl ReluNet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_neuron(&mut self, layer: usize, bias: Rational, role: Role) -> usize {
        let id = self.neurons.len();
        self.neurons.push(Neuron { id, layer, bias, role });
        id
    }

    pub fn connect(&mut self, src: usize, dst: usize, weight: Rational) {
        self.arcs.push(Connection { src, dst, weight });
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Neuron> {
        self.neurons.iter().filter(|n| n.role == Role::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Neuron> {
        self.neurons.iter().filter(|n| n.role == Role::Output)
    }

    pub fn input_len(&self) -> usize {
        self.inputs().count()
    }

    pub fn output_len(&self) -> usize {
        self.outputs().count()
    }

    /// The layer index of the output layer.
    pub fn depth(&self) -> usize {
        self.neurons.iter().map(|n| n.layer).max().unwrap_or(0)
    }

    /// Neuron counts per layer, indexed `0..=depth`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.depth() + 1];
        for n in &self.neurons {
            sizes[n.layer] += 1;
        }
        sizes
    }

    /// Depth `k` is the output layer index; width and size range over the
    /// hidden layers `1..k`.
    pub fn stats(&self) -> NetStats {
        let sizes = self.layer_sizes();
        let k = sizes.len() - 1;
        let hidden = if k >= 2 { &sizes[1..k] } else { &[][..] };
        NetStats {
            depth: k as u64,
            width: hidden.iter().copied().max().unwrap_or(0) as u64,
            size: hidden.iter().sum::<usize>() as u64,
        }
    }
}

/// The two-input network computing `min{x1, x2} = x2 − σ(x2 − x1)`.
pub fn min_two_net() -> ReluNet {
    use crate::num::int;
    let mut net = ReluNet::new();
    let x1 = net.add_neuron(0, int(0), Role::Input);
    let x2 = net.add_neuron(0, int(0), Role::Input);
    let h = net.add_neuron(1, int(0), Role::Hidden);
    let y = net.add_neuron(2, int(0), Role::Output);
    net.connect(x1, h, int(-1));
    net.connect(x2, h, int(1));
    net.connect(x2, y, int(1));
    net.connect(h, y, int(-1));
    net
}
