//! Seeded instance generators shared by tests and the command line.
//!
//! All randomness comes from a SplitMix64 stream, so a seed reproduces an
//! instance exactly on every platform. Random weights are `k / 1000` with
//! `k` uniform in `0..=1000`.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::maxflow::{FlowInstance, FlowNetwork};
use crate::mst::pair_count;
use crate::net::{ReluNet, Role};
use crate::num::{int, ratio, Rational};

pub type InstanceRng = SplitMix64;

pub fn rng(seed: u64) -> InstanceRng {
    SplitMix64::seed_from_u64(seed)
}

/// Stream for trial `trial` of a run seeded with `seed`, independent of
/// how many values earlier trials consumed.
pub fn trial_rng(seed: u64, trial: u64) -> InstanceRng {
    let mut base = rng(seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng(base.random())
}

/// `k / 1000` with `k` uniform in `0..=1000`.
pub fn unit_weight(rng: &mut InstanceRng) -> Rational {
    ratio(rng.random_range(0..=1000), 1000)
}

/// Weights for the complete graph on `n` vertices, canonical pair order.
pub fn weight_vector(n: usize, rng: &mut InstanceRng) -> Vec<Rational> {
    (0..pair_count(n)).map(|_| unit_weight(rng)).collect()
}

/// A digraph on `n` nodes in which each ordered pair is an arc with
/// probability `density`. Capacities are integers in `0..=max_capacity`;
/// reverse arcs that were not drawn get capacity 0.
pub fn flow_instance(n: usize, density: f64, max_capacity: i64, rng: &mut InstanceRng) -> FlowInstance {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(density) {
                arcs.push((u, v, int(rng.random_range(0..=max_capacity))));
            }
        }
    }
    FlowInstance::from_arcs(n, &arcs).expect("generated arcs are valid")
}

/// Integer capacities in `0..=max_capacity` for every arc of `net`.
pub fn capacities(net: &FlowNetwork, max_capacity: i64, rng: &mut InstanceRng) -> Vec<Rational> {
    (0..net.arc_count())
        .map(|_| int(rng.random_range(0..=max_capacity)))
        .collect()
}

/// Residual capacities for `net`: each arc is open with probability
/// `density`, with an integer capacity in `1..=max_capacity`.
pub fn residual_capacities(net: &FlowNetwork, density: f64, max_capacity: i64, rng: &mut InstanceRng) -> Vec<Rational> {
    (0..net.arc_count())
        .map(|_| {
            if rng.random_bool(density) {
                int(rng.random_range(1..=max_capacity))
            } else {
                int(0)
            }
        })
        .collect()
}

/// A small weight: a multiple of 1/2 in `[-3, 3]`.
fn small_weight(rng: &mut InstanceRng) -> Rational {
    ratio(rng.random_range(-6..=6), 2)
}

/// A valid random network with `inputs` inputs, `hidden_layers` hidden
/// layers of 1 to `max_width` neurons and `outputs` outputs. Every hidden
/// neuron gets an arc into the next layer, and arcs may skip layers.
pub fn relu_net(
    inputs: usize,
    hidden_layers: usize,
    max_width: usize,
    outputs: usize,
    rng: &mut InstanceRng,
) -> ReluNet {
    let mut net = ReluNet::new();
    let mut layers: Vec<Vec<usize>> = vec![(0..inputs).map(|_| net.add_neuron(0, int(0), Role::Input)).collect()];
    for l in 1..=hidden_layers + 1 {
        let (count, role) = if l <= hidden_layers {
            (rng.random_range(1..=max_width), Role::Hidden)
        } else {
            (outputs, Role::Output)
        };
        let mut layer = Vec::with_capacity(count);
        for _ in 0..count {
            let v = net.add_neuron(l, small_weight(rng), role);
            for earlier in &layers {
                for &u in earlier {
                    if rng.random_bool(0.6) {
                        net.connect(u, v, small_weight(rng));
                    }
                }
            }
            layer.push(v);
        }
        // Hidden neurons of the previous layer must feed something.
        let prev = layers.last().expect("input layer exists");
        if l >= 2 {
            for &u in prev {
                if !net.arcs.iter().any(|c| c.src == u) {
                    let v = layer[rng.random_range(0..layer.len())];
                    net.connect(u, v, small_weight(rng));
                }
            }
        }
        layers.push(layer);
    }
    net.arcs.sort_by_key(|c| (c.dst, c.src));
    net
}
