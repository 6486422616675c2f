use super::CompileError;
use crate::net::{validate_net, ReluNet, Role};
use crate::num::Rational;
use crate::program::{AffineExpr, Block, Instruction, MaapProgram, VarId, VarTable};

/// The generic program executing `net` layer by layer: for each hidden
/// layer a parallel loop over its neurons computing `a(v)` and
/// `o(v) ← max{0, a(v)}`, then one affine assignment per output neuron.
pub fn decompile(net: &ReluNet) -> Result<MaapProgram, CompileError> {
    let violations = validate_net(net);
    if !violations.is_empty() {
        return Err(CompileError::InvalidNet(violations));
    }
    let n = net.neurons.len();
    let mut vars = VarTable::new();
    // o(v) for inputs and hidden neurons, a(v) for hidden and output neurons.
    let mut o: Vec<Option<VarId>> = vec![None; n];
    let mut a: Vec<Option<VarId>> = vec![None; n];
    for v in &net.neurons {
        if v.role != Role::Output {
            o[v.id] = Some(vars.fresh(format!("o{}", v.id)));
        }
        if v.role != Role::Input {
            a[v.id] = Some(vars.fresh(format!("a{}", v.id)));
        }
    }

    let mut incoming: Vec<Vec<(Rational, VarId)>> = vec![Vec::new(); n];
    for c in &net.arcs {
        incoming[c.dst].push((c.weight.clone(), o[c.src].expect("sources are not outputs")));
    }
    let activation = |v: usize| AffineExpr::new(net.neurons[v].bias.clone(), incoming[v].iter().cloned());

    let depth = net.depth();
    let mut by_layer: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    for v in &net.neurons {
        by_layer[v.layer].push(v.id);
    }

    let mut body = Vec::new();
    if depth >= 2 {
        let layers = (1..depth)
            .map(|l| {
                let neurons = by_layer[l]
                    .iter()
                    .map(|&v| {
                        let (av, ov) = (a[v].unwrap(), o[v].unwrap());
                        Block::new(vec![
                            Instruction::assign(av, activation(v)),
                            Instruction::max(ov, vec![AffineExpr::zero(), av.into()]),
                        ])
                    })
                    .collect();
                Block::new(vec![Instruction::for_par(neurons)])
            })
            .collect();
        body.push(Instruction::for_do(layers));
    }
    let outputs: Vec<usize> = net.outputs().map(|v| v.id).collect();
    body.push(Instruction::for_par(
        outputs
            .iter()
            .map(|&v| Block::new(vec![Instruction::assign(a[v].unwrap(), activation(v))]))
            .collect(),
    ));

    let inputs = net.inputs().map(|v| o[v.id].unwrap()).collect();
    let outputs = outputs.iter().map(|&v| a[v].unwrap()).collect();
    Ok(MaapProgram::new(vars, inputs, outputs, Instruction::seq(body)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{forward, min_two_net};
    use crate::num::int;
    use crate::program::{complexity, interpret, Complexity};

    #[test]
    fn min_two_net_roundtrip_semantics() {
        let p = decompile(&min_two_net()).unwrap();
        for (x1, x2) in [(3, 5), (5, 3), (-2, -2)] {
            let x = [int(x1), int(x2)];
            let want = forward(&min_two_net(), &x).unwrap().0;
            assert_eq!(interpret(&p, &x).unwrap(), want);
        }
    }

    #[test]
    fn one_relu_per_neuron_costs_a_binary_max() {
        // Each hidden neuron becomes max{0, a(v)}, a two-term max.
        let p = decompile(&min_two_net()).unwrap();
        assert_eq!(complexity(&p), Complexity::new(1, 4, 8));
    }

    #[test]
    fn zero_hidden_net_is_pure_affine() {
        let mut net = ReluNet::new();
        let x = net.add_neuron(0, int(0), Role::Input);
        let y = net.add_neuron(1, int(2), Role::Output);
        net.connect(x, y, int(3));
        let p = decompile(&net).unwrap();
        assert_eq!(complexity(&p), Complexity::ZERO);
        assert_eq!(interpret::<Rational>(&p, &[int(4)]).unwrap(), vec![int(14)]);
    }
}
