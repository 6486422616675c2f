use std::collections::VecDeque;
use std::fmt;

use num_traits::Zero;

use super::{ReluNet, Role};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetViolation {
    /// The neuron stored at `index` carries a different id.
    IdMismatch {
        index: usize,
        id: usize,
    },
    /// An arc endpoint names no neuron.
    DanglingArc {
        arc: usize,
    },
    /// The neurons listed lie on a directed cycle.
    Cycle {
        neurons: Vec<usize>,
    },
    /// Layer index does not increase along the arc.
    LayerOrder {
        arc: usize,
        src_layer: usize,
        dst_layer: usize,
    },
    InputLayer {
        neuron: usize,
        layer: usize,
    },
    InputIncoming {
        neuron: usize,
    },
    InputBias {
        neuron: usize,
    },
    /// A hidden or output neuron sits on layer 0.
    LayerZero {
        neuron: usize,
    },
    /// A hidden neuron without successors.
    DeadHidden {
        neuron: usize,
    },
    /// An output neuron with successors.
    OutputFeeds {
        neuron: usize,
    },
    /// An output neuron below the last layer.
    OutputLayer {
        neuron: usize,
        layer: usize,
        depth: usize,
    },
}

impl fmt::Display for NetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetViolation::IdMismatch { index, id } => write!(f, "neuron at index {index} has id {id}"),
            NetViolation::DanglingArc { arc } => write!(f, "arc {arc} references a missing neuron"),
            NetViolation::Cycle { neurons } => write!(f, "cycle through neurons {neurons:?}"),
            NetViolation::LayerOrder {
                arc,
                src_layer,
                dst_layer,
            } => {
                write!(f, "arc {arc} goes from layer {src_layer} to layer {dst_layer}")
            }
            NetViolation::InputLayer { neuron, layer } => write!(f, "input {neuron} on layer {layer}"),
            NetViolation::InputIncoming { neuron } => write!(f, "input {neuron} has incoming arcs"),
            NetViolation::InputBias { neuron } => write!(f, "input {neuron} has a nonzero bias"),
            NetViolation::LayerZero { neuron } => write!(f, "non-input neuron {neuron} on layer 0"),
            NetViolation::DeadHidden { neuron } => write!(f, "hidden neuron {neuron} has out-degree 0"),
            NetViolation::OutputFeeds { neuron } => write!(f, "output neuron {neuron} has outgoing arcs"),
            NetViolation::OutputLayer { neuron, layer, depth } => {
                write!(f, "output neuron {neuron} on layer {layer}, expected {depth}")
            }
        }
    }
}

/// Reports every structural problem of `net`; empty means valid.
///
/// Unused inputs (out-degree 0) are allowed: a network may ignore some
/// coordinates of its input.
pub fn validate_net(net: &ReluNet) -> Vec<NetViolation> {
    let mut out = Vec::new();
    let n = net.neurons.len();
    for (index, neuron) in net.neurons.iter().enumerate() {
        if neuron.id != index {
            out.push(NetViolation::IdMismatch { index, id: neuron.id });
        }
    }

    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (arc, c) in net.arcs.iter().enumerate() {
        if c.src >= n || c.dst >= n {
            out.push(NetViolation::DanglingArc { arc });
            continue;
        }
        indeg[c.dst] += 1;
        outdeg[c.src] += 1;
        succ[c.src].push(c.dst);
        let (src_layer, dst_layer) = (net.neurons[c.src].layer, net.neurons[c.dst].layer);
        if dst_layer <= src_layer {
            out.push(NetViolation::LayerOrder {
                arc,
                src_layer,
                dst_layer,
            });
        }
    }

    let mut remaining = indeg.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| remaining[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = queue.pop_front() {
        seen += 1;
        for &w in &succ[v] {
            remaining[w] -= 1;
            if remaining[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if seen < n {
        let neurons = (0..n).filter(|&v| remaining[v] > 0).collect();
        out.push(NetViolation::Cycle { neurons });
    }

    let depth = net.depth();
    for (v, neuron) in net.neurons.iter().enumerate() {
        match neuron.role {
            Role::Input => {
                if neuron.layer != 0 {
                    out.push(NetViolation::InputLayer {
                        neuron: v,
                        layer: neuron.layer,
                    });
                }
                if indeg[v] > 0 {
                    out.push(NetViolation::InputIncoming { neuron: v });
                }
                if !neuron.bias.is_zero() {
                    out.push(NetViolation::InputBias { neuron: v });
                }
            }
            Role::Hidden | Role::Output if neuron.layer == 0 => {
                out.push(NetViolation::LayerZero { neuron: v });
            }
            Role::Hidden => {
                if outdeg[v] == 0 {
                    out.push(NetViolation::DeadHidden { neuron: v });
                }
            }
            Role::Output => {
                if outdeg[v] > 0 {
                    out.push(NetViolation::OutputFeeds { neuron: v });
                }
                if neuron.layer != depth {
                    out.push(NetViolation::OutputLayer {
                        neuron: v,
                        layer: neuron.layer,
                        depth,
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::min_two_net;
    use crate::num::int;

    #[test]
    fn min_two_net_is_valid() {
        assert_eq!(validate_net(&min_two_net()), vec![]);
    }

    #[test]
    fn backward_arc_breaks_monotonicity() {
        let mut net = ReluNet::new();
        let x = net.add_neuron(0, int(0), Role::Input);
        let h1 = net.add_neuron(1, int(0), Role::Hidden);
        let h2 = net.add_neuron(2, int(0), Role::Hidden);
        let y = net.add_neuron(3, int(0), Role::Output);
        net.connect(x, h2, int(1));
        net.connect(h2, h1, int(1));
        net.connect(h1, y, int(1));
        net.connect(h2, y, int(1));
        let v = validate_net(&net);
        assert_eq!(
            v,
            vec![NetViolation::LayerOrder {
                arc: 1,
                src_layer: 2,
                dst_layer: 1
            }]
        );
    }

    #[test]
    fn hidden_sink_is_reported() {
        let mut net = min_two_net();
        net.add_neuron(1, int(0), Role::Hidden);
        assert_eq!(validate_net(&net), vec![NetViolation::DeadHidden { neuron: 4 }]);
    }

    #[test]
    fn cycles_and_input_rules() {
        let mut net = ReluNet::new();
        let x = net.add_neuron(0, int(1), Role::Input);
        let a = net.add_neuron(1, int(0), Role::Hidden);
        let b = net.add_neuron(1, int(0), Role::Output);
        net.connect(a, b, int(1));
        net.connect(b, a, int(1));
        net.connect(a, x, int(1));
        let v = validate_net(&net);
        assert!(v.contains(&NetViolation::Cycle { neurons: vec![0, 1, 2] }));
        assert!(v.contains(&NetViolation::InputBias { neuron: 0 }));
        assert!(v.contains(&NetViolation::InputIncoming { neuron: 0 }));
        assert!(v.contains(&NetViolation::OutputFeeds { neuron: 2 }));
    }

    #[test]
    fn outputs_must_share_the_last_layer() {
        let mut net = min_two_net();
        let extra = net.add_neuron(1, int(0), Role::Output);
        net.connect(0, extra, int(1));
        assert_eq!(
            validate_net(&net),
            vec![NetViolation::OutputLayer {
                neuron: extra,
                layer: 1,
                depth: 2
            }]
        );
    }

    #[test]
    fn dangling_arc() {
        let mut net = min_two_net();
        net.connect(0, 17, int(1));
        assert_eq!(validate_net(&net), vec![NetViolation::DanglingArc { arc: 4 }]);
    }
}
