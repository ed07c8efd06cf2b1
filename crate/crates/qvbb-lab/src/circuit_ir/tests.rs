use super::builder::CircuitBuilder;
use super::*;
use crate::bits::{from_str01, from_u64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Truth table computed by walking gates with a map, no shared code with `eval`.
fn truth_table_oracle(c: &BooleanCircuit) -> Vec<Vec<bool>> {
    (0..1u64 << c.n_inputs())
        .map(|x| {
            let mut val: HashMap<usize, bool> = HashMap::new();
            for i in 0..c.n_inputs() {
                val.insert(i, (x >> i) & 1 == 1);
            }
            for g in c.gates() {
                let a = g.used_inputs().first().map(|w| val[w]);
                let b = g.used_inputs().get(1).map(|w| val[w]);
                let v = match g.kind {
                    GateKind::And => a.unwrap() && b.unwrap(),
                    GateKind::Xor => a.unwrap() != b.unwrap(),
                    GateKind::Not => !a.unwrap(),
                    GateKind::Const0 => false,
                    GateKind::Const1 => true,
                    GateKind::Copy => a.unwrap(),
                };
                val.insert(g.output, v);
            }
            c.output_wires().iter().map(|w| val[w]).collect()
        })
        .collect()
}

fn parity(n: usize) -> BooleanCircuit {
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    let p = b.xor_all(&x);
    b.finish(&[p])
}

#[test]
fn parity_of_1011_is_one() {
    assert_eq!(parity(4).eval(&from_str01("1011")).unwrap(), vec![true]);
}

#[test]
fn identity_circuit_returns_input() {
    let c = BooleanCircuit::new(5, 5, vec![], (0..5).collect()).unwrap();
    let x = from_str01("10110");
    assert_eq!(c.eval(&x).unwrap(), x);
    assert_eq!(c.depth(), 0);
}

#[test]
fn wrong_input_length_is_an_arity_error() {
    assert_eq!(
        parity(3).eval(&[true]),
        Err(CircuitError::Arity { expected: 3, got: 1 })
    );
}

#[test]
fn random_six_gate_circuit_matches_truth_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let c = random_circuit(&mut rng, 4, 6, 3);
        let table = truth_table_oracle(&c);
        for (x, row) in table.iter().enumerate() {
            assert_eq!(&c.eval(&from_u64(x as u64, 4)).unwrap(), row);
        }
    }
}

#[test]
fn point_function_accepts_only_its_target() {
    let c = build_function(&FunctionSpec::point(&from_str01("101")));
    assert_eq!(c.eval(&from_str01("101")).unwrap(), vec![true]);
    assert_eq!(c.eval(&from_str01("100")).unwrap(), vec![false]);
}

#[test]
fn multibit_point_outputs_payload_on_match() {
    let alpha = from_str01("0110");
    let beta = from_str01("1101");
    let c = build_function(&FunctionSpec::multibit_point(&alpha, &beta));
    assert_eq!(c.eval(&alpha).unwrap(), beta);
    let mut other = alpha.clone();
    other[0] ^= true;
    assert_eq!(c.eval(&other).unwrap(), vec![false; 4]);
}

#[test]
fn zero_function_is_zero_everywhere() {
    let c = build_function(&FunctionSpec::zero(4));
    for x in 0..16 {
        assert_eq!(c.eval(&from_u64(x, 4)).unwrap(), vec![false; 4]);
    }
}

#[test]
fn compute_and_compare_matches_direct_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_circuit(&mut rng, 5, 12, 3);
    let y = f.eval(&from_u64(9, 5)).unwrap();
    let z = from_str01("1011");
    for spec in [FunctionSpec::cc(f.clone(), &y), FunctionSpec::multibit_cc(f.clone(), &y, &z)] {
        let c = build_function(&spec);
        for x in 0..32 {
            let xb = from_u64(x, 5);
            assert_eq!(c.eval(&xb).unwrap(), spec.evaluate(&xb));
        }
    }
}

#[test]
fn and_compiles_to_one_toffoli() {
    let mut b = CircuitBuilder::new(2);
    let x = b.inputs();
    let a = b.and(x[0], x[1]);
    let c = b.finish(&[a]);
    let r = compile_reversible(&c);
    assert_eq!(r.gates, vec![RevGate::Ccx(0, 1, 2)]);
    assert_eq!(r.ancilla_wires, vec![2]);
    for x in 0..4 {
        let xb = from_u64(x, 2);
        assert_eq!(r.eval(&xb).unwrap(), c.eval(&xb).unwrap());
    }
}

#[test]
fn xor_compiles_to_cnots() {
    let r = compile_reversible(&parity(3));
    assert!(r.gates.iter().all(|g| matches!(g, RevGate::Cnot(..))));
    for x in 0..8 {
        let xb = from_u64(x, 3);
        assert_eq!(r.eval(&xb).unwrap(), parity(3).eval(&xb).unwrap());
    }
}

#[test]
fn random_eight_gate_compilation_agrees_on_all_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let c = random_circuit(&mut rng, 5, 8, 2);
        let r = compile_reversible(&c);
        for x in 0..32 {
            let xb = from_u64(x, 5);
            assert_eq!(r.eval(&xb).unwrap(), c.eval(&xb).unwrap());
        }
    }
}

#[test]
fn twelve_input_compilation_is_exhaustively_correct() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let c = random_circuit(&mut rng, 12, 40, 4);
    let r = compile_reversible(&c);
    for x in 0..1 << 12 {
        let xb = from_u64(x, 12);
        assert_eq!(r.eval(&xb).unwrap(), c.eval(&xb).unwrap());
    }
}

#[test]
fn depth_examples() {
    let empty = BooleanCircuit::new(2, 2, vec![], vec![]).unwrap();
    assert_eq!(empty.depth(), 0);
    let one = BooleanCircuit::new(2, 3, vec![Gate::new(GateKind::And, &[0, 1], 2)], vec![2]).unwrap();
    assert_eq!(one.depth(), 1);
    let seq = BooleanCircuit::new(
        2,
        4,
        vec![Gate::new(GateKind::And, &[0, 1], 2), Gate::new(GateKind::Not, &[2], 3)],
        vec![3],
    )
    .unwrap();
    assert_eq!(seq.depth(), 2);
    let par = BooleanCircuit::new(
        2,
        4,
        vec![Gate::new(GateKind::And, &[0, 1], 2), Gate::new(GateKind::Xor, &[0, 1], 3)],
        vec![2, 3],
    )
    .unwrap();
    assert_eq!(par.depth(), 1);
}

#[test]
fn netlist_text_is_stable() {
    let c = BooleanCircuit::new(
        2,
        5,
        vec![
            Gate::new(GateKind::And, &[0, 1], 2),
            Gate::new(GateKind::Not, &[2], 3),
            Gate::new(GateKind::Const1, &[], 4),
        ],
        vec![3, 4, 3],
    )
    .unwrap();
    let text = "inputs 2 outputs 3 wires 5\nAND 0 1 2\nNOT 2 3\nCONST1 4\noutwires 3 4 3\n";
    assert_eq!(c.to_netlist(), text);
    assert_eq!(BooleanCircuit::from_netlist(text).unwrap(), c);
}

#[test]
fn netlist_rejects_malformed_input() {
    for bad in [
        "",
        "inputs 1 outputs 1\noutwires 0\n",
        "inputs 1 outputs 1 wires 2\nFOO 0 1\noutwires 1\n",
        "inputs 1 outputs 1 wires 2\nAND 0 1\noutwires 1\n",
        "inputs 1 outputs 1 wires 3\nNOT 2 1\noutwires 1\n",
        "inputs 1 outputs 2 wires 2\nNOT 0 1\noutwires 1\n",
        "inputs 1 outputs 1 wires 2\nNOT 0 1\n",
    ] {
        assert!(BooleanCircuit::from_netlist(bad).is_err(), "{bad:?}");
    }
}

proptest! {
    #[test]
    fn netlist_roundtrip_is_bit_exact(seed in any::<u64>(), n_in in 1usize..6, n_g in 0usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, n_in, n_g, 3);
        let text = c.to_netlist();
        let back = BooleanCircuit::from_netlist(&text).unwrap();
        prop_assert_eq!(back.to_netlist(), text);
        prop_assert_eq!(back, c);
    }

    #[test]
    fn reversible_then_inverse_is_identity(seed in any::<u64>(), state_seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = compile_reversible(&random_circuit(&mut rng, 6, 25, 3));
        let mut srng = ChaCha8Rng::seed_from_u64(state_seed);
        let s0: Vec<bool> = crate::bits::random(&mut srng, r.n_wires);
        let mut s = s0.clone();
        r.apply(&mut s);
        r.inverse().apply(&mut s);
        prop_assert_eq!(s, s0);
    }

    #[test]
    fn compilation_agrees_with_eval(seed in any::<u64>(), n_in in 1usize..9, n_g in 0usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, n_in, n_g, 2);
        let r = compile_reversible(&c);
        for x in 0..1u64 << n_in {
            let xb = from_u64(x, n_in);
            prop_assert_eq!(r.eval(&xb).unwrap(), c.eval(&xb).unwrap());
        }
    }

    #[test]
    fn reversible_depth_is_bounded(seed in any::<u64>(), n_g in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, 4, n_g, 1);
        // all wires are outputs so that dead gates count toward depth(c)
        let all = BooleanCircuit::new(c.n_inputs(), c.n_wires(), c.gates().to_vec(), (0..c.n_wires()).collect()).unwrap();
        let r = compile_reversible(&all);
        prop_assert!(r.depth() <= REVERSIBLE_DEPTH_FACTOR * all.depth());
    }

    #[test]
    fn fanout_split_keeps_function_and_single_readers(seed in any::<u64>(), n_in in 1usize..7, n_g in 0usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, n_in, n_g, 2);
        let s = c.split_fanout();
        let mut reads: HashMap<usize, usize> = HashMap::new();
        for g in s.gates() {
            for &w in g.used_inputs() {
                *reads.entry(w).or_default() += 1;
            }
        }
        for g in s.gates().iter().filter(|g| g.kind != GateKind::Copy) {
            for &w in g.used_inputs() {
                prop_assert_eq!(reads[&w], 1);
            }
        }
        for x in 0..1u64 << n_in {
            let xb = from_u64(x, n_in);
            prop_assert_eq!(s.eval(&xb).unwrap(), c.eval(&xb).unwrap());
        }
    }
}
