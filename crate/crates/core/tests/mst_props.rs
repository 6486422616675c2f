mod common;

use common::random_point;
use maap::compiler::compile;
use maap::mst::{build_mst_program, default_big_m, mst_input_vector, pair_count, pair_index, pairs, WeightedGraph};
use maap::net::{deserialize, forward, serialize, ForwardPlan};
use maap::num::{int, ratio, Rational};
use maap::oracles::{brute_force_mst, kruskal, DisjointSets};
use maap::program::{interpret, Interpreter};
use maap::random::{rng, weight_vector};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn permuted(n: usize, x: &[Rational], perm: &[usize]) -> Vec<Rational> {
    let mut y = vec![int(0); x.len()];
    for ((i, j), w) in pairs(n).zip(x) {
        y[pair_index(n, perm[i], perm[j])] = w.clone();
    }
    y
}

/// Kruskal restricted to the listed edges.
fn sparse_kruskal(g: &WeightedGraph) -> Rational {
    let mut edges = g.edges.clone();
    edges.sort_by(|a, b| a.2.cmp(&b.2));
    let mut dsu = DisjointSets::new(g.n);
    edges
        .into_iter()
        .filter(|(u, v, _)| dsu.union(*u, *v))
        .fold(int(0), |acc, e| acc + e.2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn program_matches_both_oracles(n in 2usize..=7, seed in any::<u64>()) {
        let p = build_mst_program(n).unwrap();
        // Signed weights: the construction never assumes non-negativity.
        let x = random_point(seed, pair_count(n));
        let expected = kruskal(n, &x).unwrap();
        prop_assert_eq!(brute_force_mst(n, &x).unwrap(), expected.clone());
        prop_assert_eq!(interpret(&p, &x).unwrap(), vec![expected]);
    }

    #[test]
    fn value_ignores_vertex_labels(n in 2usize..=8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = weight_vector(n, &mut r);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let p = Interpreter::<Rational>::new(&build_mst_program(n).unwrap()).unwrap();
        prop_assert_eq!(p.run(&permuted(n, &x, &perm)).unwrap(), p.run(&x).unwrap());
    }

    #[test]
    fn positively_homogeneous(n in 2usize..=8, seed in any::<u64>(), k in 1i64..9) {
        let x = random_point(seed, pair_count(n));
        let lambda = ratio(k, 3);
        let scaled: Vec<Rational> = x.iter().map(|v| v * &lambda).collect();
        let p = build_mst_program(n).unwrap();
        prop_assert_eq!(interpret(&p, &scaled).unwrap()[0].clone(), &interpret(&p, &x).unwrap()[0] * &lambda);
    }

    #[test]
    fn sparse_graphs_via_big_m(n in 2usize..=7, seed in any::<u64>()) {
        let mut r = rng(seed);
        // A random spanning tree plus random extra edges.
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        let mut present = vec![false; pair_count(n)];
        for i in 1..n {
            let j = order[r.random_range(0..i)];
            present[pair_index(n, order[i], j)] = true;
        }
        for slot in present.iter_mut() {
            *slot |= r.random_bool(0.3);
        }
        let edges = pairs(n)
            .zip(&present)
            .filter(|(_, &p)| p)
            .map(|((i, j), _)| (i, j, ratio(r.random_range(0..=1000), 1000)))
            .collect();
        let g = WeightedGraph { n, edges };
        let x = mst_input_vector(&g, &default_big_m(&g)).unwrap();
        let p = build_mst_program(n).unwrap();
        prop_assert_eq!(interpret(&p, &x).unwrap(), vec![sparse_kruskal(&g)]);
    }
}

#[test]
fn compiled_nets_match_kruskal() {
    for n in 2..=7 {
        let net = compile(&build_mst_program(n).unwrap()).unwrap();
        let plan = ForwardPlan::<Rational>::new(&net).unwrap();
        for trial in 0..20 {
            let x = random_point(1000 * n as u64 + trial, pair_count(n));
            assert_eq!(
                plan.run(&x).unwrap(),
                vec![kruskal(n, &x).unwrap()],
                "n={n} trial={trial}"
            );
        }
    }
}

#[test]
fn compiled_nets_have_no_biases() {
    for n in 2..=7 {
        let net = compile(&build_mst_program(n).unwrap()).unwrap();
        assert!(net.neurons.iter().all(|v| v.bias == int(0)), "n={n}");
    }
}

#[test]
fn compiled_mst5_survives_serialization() {
    let net = compile(&build_mst_program(5).unwrap()).unwrap();
    let back = deserialize(&serialize(&net)).unwrap();
    assert_eq!(back, net);
    let x = weight_vector(5, &mut rng(5));
    assert_eq!(forward(&back, &x).unwrap().0, vec![kruskal(5, &x).unwrap()]);
}

#[test]
fn equal_weights_give_n_minus_one_times_the_weight() {
    for n in 2..=8 {
        let p = build_mst_program(n).unwrap();
        let x = vec![ratio(3, 4); pair_count(n)];
        assert_eq!(interpret(&p, &x).unwrap(), vec![ratio(3 * (n as i64 - 1), 4)]);
    }
}
