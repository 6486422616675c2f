use thiserror::Error;

use super::{validate_net, NetViolation, ReluNet, Role};
use crate::num::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ForwardError {
    #[error("expected {expected} inputs, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid network: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<NetViolation>),
}

/// Per-neuron activations `a(v)` and outputs `o(v)`, indexed by neuron id.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardTrace<T> {
    pub activation: Vec<T>,
    pub output: Vec<T>,
}

/// A network lowered for repeated evaluation: neurons in layer order with
/// their incoming arcs gathered and weights converted to `T`.
pub struct ForwardPlan<T> {
    order: Vec<usize>,
    bias: Vec<T>,
    relu: Vec<bool>,
    /// Incoming arcs of `order[i]` are `incoming[start[i]..start[i + 1]]`.
    start: Vec<usize>,
    incoming: Vec<(usize, T)>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl<T: Scalar> ForwardPlan<T> {
    pub fn new(net: &ReluNet) -> Result<Self, ForwardError> {
        let violations = validate_net(net);
        if !violations.is_empty() {
            return Err(ForwardError::Invalid(violations));
        }
        Ok(Self::new_unchecked(net))
    }

    /// Skips validation; the caller guarantees `net` is valid.
    pub fn new_unchecked(net: &ReluNet) -> Self {
        let n = net.neurons.len();
        let mut incoming_of: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for c in &net.arcs {
            incoming_of[c.dst].push((c.src, T::from_rational(&c.weight)));
        }
        let mut order: Vec<usize> = net
            .neurons
            .iter()
            .filter(|v| v.role != Role::Input)
            .map(|v| v.id)
            .collect();
        order.sort_by_key(|&v| net.neurons[v].layer);
        let mut start = Vec::with_capacity(order.len() + 1);
        let mut incoming = Vec::with_capacity(net.arcs.len());
        start.push(0);
        for &v in &order {
            incoming.append(&mut incoming_of[v]);
            start.push(incoming.len());
        }
        ForwardPlan {
            bias: net.neurons.iter().map(|v| T::from_rational(&v.bias)).collect(),
            relu: net.neurons.iter().map(|v| v.role == Role::Hidden).collect(),
            inputs: net.inputs().map(|v| v.id).collect(),
            outputs: net.outputs().map(|v| v.id).collect(),
            order,
            start,
            incoming,
        }
    }

    pub fn input_len(&self) -> usize {
        self.inputs.len()
    }

    fn check(&self, x: &[T]) -> Result<(), ForwardError> {
        if x.len() != self.inputs.len() {
            return Err(ForwardError::Dimension {
                expected: self.inputs.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Fills `o` (indexed by neuron id) and, when requested, `a`.
    fn sweep(&self, x: &[T], o: &mut [T], mut a: Option<&mut [T]>) {
        for (&v, xi) in self.inputs.iter().zip(x) {
            o[v] = xi.clone();
            if let Some(a) = a.as_deref_mut() {
                a[v] = xi.clone();
            }
        }
        for (i, &v) in self.order.iter().enumerate() {
            let mut acc = self.bias[v].clone();
            for (u, w) in &self.incoming[self.start[i]..self.start[i + 1]] {
                acc.mul_add_assign(w, &o[*u]);
            }
            o[v] = if self.relu[v] { acc.relu() } else { acc.clone() };
            if let Some(a) = a.as_deref_mut() {
                a[v] = acc;
            }
        }
    }

    /// Output vector only.
    pub fn run(&self, x: &[T]) -> Result<Vec<T>, ForwardError> {
        self.check(x)?;
        let mut o = vec![T::zero(); self.bias.len()];
        self.sweep(x, &mut o, None);
        Ok(self.outputs.iter().map(|&v| o[v].clone()).collect())
    }

    pub fn trace(&self, x: &[T]) -> Result<(Vec<T>, ForwardTrace<T>), ForwardError> {
        self.check(x)?;
        let n = self.bias.len();
        let mut trace = ForwardTrace {
            activation: vec![T::zero(); n],
            output: vec![T::zero(); n],
        };
        self.sweep(x, &mut trace.output, Some(&mut trace.activation));
        let y = self.outputs.iter().map(|&v| trace.output[v].clone()).collect();
        Ok((y, trace))
    }
}

/// Validates `net` and evaluates it once, returning the outputs and the
/// full trace.
pub fn forward<T: Scalar>(net: &ReluNet, x: &[T]) -> Result<(Vec<T>, ForwardTrace<T>), ForwardError> {
    ForwardPlan::new(net)?.trace(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::min_two_net;
    use crate::net::tests::chained_min_nets;
    use crate::num::{int, Rational};

    #[test]
    fn min_two_net_on_three_five() {
        let (y, trace) = forward(&min_two_net(), &[int(3), int(5)]).unwrap();
        assert_eq!(y, vec![int(3)]);
        assert_eq!(trace.activation[2], int(2));
        assert_eq!(trace.output[2], int(2));
    }

    #[test]
    fn min_two_net_on_five_three() {
        let (y, trace) = forward(&min_two_net(), &[int(5), int(3)]).unwrap();
        assert_eq!(y, vec![int(3)]);
        assert_eq!(trace.activation[2], int(-2));
        assert_eq!(trace.output[2], int(0));
    }

    #[test]
    fn bias_only_net() {
        let mut net = ReluNet::new();
        net.add_neuron(1, int(7), Role::Output);
        let (y, _) = forward::<Rational>(&net, &[]).unwrap();
        assert_eq!(y, vec![int(7)]);
    }

    #[test]
    fn output_is_not_rectified() {
        let (y, _) = forward(&min_two_net(), &[-4.0, -1.0]).unwrap();
        assert_eq!(y, vec![-4.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let err = forward::<f64>(&min_two_net(), &[1.0]).unwrap_err();
        assert_eq!(err, ForwardError::Dimension { expected: 2, got: 1 });
    }

    #[test]
    fn chained_nets_compute_min_of_three() {
        let plan = ForwardPlan::<Rational>::new(&chained_min_nets()).unwrap();
        for x in [[1, 2, 3], [3, 1, 2], [2, 3, 1], [-5, 0, -5]] {
            let xs: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
            let want = xs.iter().min().unwrap().clone();
            assert_eq!(plan.run(&xs).unwrap(), vec![want]);
        }
    }
}
