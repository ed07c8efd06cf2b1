use super::corpus::{random_circuit, recovery_corpus};
use super::*;
use crate::bits::from_str01;
use crate::circuit_ir::{build_function, random_circuit as random_bool_circuit, FunctionSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ket(bits: &str) -> DensityMatrix {
    DensityMatrix::from_bits(&from_str01(bits)).unwrap()
}

fn plus() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = StateVector::from_amplitudes(1, vec![C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
    psi.to_density().unwrap()
}

#[test]
fn empty_circuit_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rho = DensityMatrix::random(2, 2, &mut rng).unwrap();
    let c = QuantumCircuit::new(2, vec![]).unwrap();
    assert!(trace_distance(&c.run(&rho).unwrap(), &rho).unwrap() < 1e-12);
}

#[test]
fn x_flips_zero_to_one() {
    let c = QuantumCircuit::new(1, vec![Op::X(0)]).unwrap();
    assert_eq!(c.run(&ket("0")).unwrap(), ket("1"));
}

#[test]
fn hadamard_then_measure_is_maximally_mixed() {
    let c = QuantumCircuit::new(1, vec![Op::H(0), Op::Measure(0)]).unwrap();
    let out = c.run(&ket("0")).unwrap();
    assert!((out.get(0, 0).re - 0.5).abs() < 1e-12);
    assert!((out.get(1, 1).re - 0.5).abs() < 1e-12);
    assert!(out.get(0, 1).norm() < 1e-12);
}

#[test]
fn circuit_structure_is_checked() {
    assert!(QuantumCircuit::new(2, vec![Op::Cnot(0, 2)]).is_err());
    assert!(QuantumCircuit::new(2, vec![Op::Cnot(1, 1)]).is_err());
    assert!(QuantumCircuit::new(2, vec![Op::X(1), Op::Init0(1)]).is_err());
    let c = QuantumCircuit::new(2, vec![Op::Init0(1)]).unwrap();
    assert!(matches!(c.run(&ket("00")), Err(QsimError::Dimension(1, 2))));
}

#[test]
fn size_limits_are_enforced() {
    assert!(DensityMatrix::basis(MAX_DENSITY_QUBITS + 1, 0).is_err());
    assert!(StateVector::basis(MAX_STATEVECTOR_QUBITS + 1, 0).is_err());
}

#[test]
fn measurement_free_circuit_is_its_own_coherent_form() {
    let c = QuantumCircuit::new(3, vec![Op::H(0), Op::Ccx(0, 1, 2), Op::Z(1)]).unwrap();
    let u = make_coherent(&c);
    assert_eq!(&u.base, &c);
    assert!(u.record_wires.is_empty());
}

#[test]
fn single_measurement_becomes_one_cnot_onto_fresh_wire() {
    let c = QuantumCircuit::new(1, vec![Op::Measure(0)]).unwrap();
    let u = make_coherent(&c);
    assert_eq!(u.base.ops(), &[Op::Cnot(0, 1)]);
    assert_eq!(u.record_wires, vec![1]);
    assert_eq!(u.aux_inputs, vec![1]);
}

#[test]
fn deferred_measurements_reproduce_the_channel() {
    let c = QuantumCircuit::new(
        3,
        vec![Op::H(0), Op::Cnot(0, 1), Op::Measure(1), Op::H(2), Op::Ccx(0, 2, 1), Op::Measure(0), Op::H(1)],
    )
    .unwrap();
    let u = make_coherent(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let rho = DensityMatrix::random(3, 2, &mut rng).unwrap();
        let a = c.run(&rho).unwrap();
        let b = u.channel(&rho).unwrap();
        assert!(trace_distance(&a, &b).unwrap() < 1e-9);
    }
}

#[test]
fn trace_distance_examples() {
    let r = ket("0");
    assert!(trace_distance(&r, &r).unwrap() < 1e-12);
    assert!((trace_distance(&ket("0"), &ket("1")).unwrap() - 1.0).abs() < 1e-12);
    // eigenvalues of |0><0| - |+><+| are ±1/√2
    let d = trace_distance(&ket("0"), &plus()).unwrap();
    assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    assert!(trace_distance(&ket("0"), &ket("00")).is_err());
}

#[test]
fn recovery_of_classical_circuit_on_basis_input_is_exact() {
    // 2-bit AND computed onto an initialized wire
    let c = QuantumCircuit::new(3, vec![Op::Init0(2), Op::Ccx(0, 1, 2)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for x in ["00", "01", "10", "11"] {
        let input = ket(x);
        let run = input_recover_run(&c, &[2], &input, &mut rng).unwrap();
        assert!(trace_distance(&run.recovered, &input).unwrap() < 1e-9);
        assert_eq!(run.outcome, vec![x == "11"]);
    }
}

#[test]
fn recovery_bound_is_vacuous_for_identity_on_plus() {
    let c = QuantumCircuit::new(1, vec![]).unwrap();
    let out = c.run(&plus()).unwrap();
    let eps = trace_distance(&out, &ket("0")).unwrap();
    assert!((eps - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    assert!(2.0 * eps.sqrt() > 1.0);
}

#[test]
fn contrived_one_percent_error_recovers_within_two_root_eps() {
    // data wire in sqrt(.99)|0> + sqrt(.01)|1>, copied to the output wire
    let psi = StateVector::from_amplitudes(1, vec![C64::new(0.99f64.sqrt(), 0.0), C64::new(0.1, 0.0)]).unwrap();
    let input = psi.to_density().unwrap();
    let c = QuantumCircuit::new(2, vec![Op::Init0(1), Op::Cnot(0, 1)]).unwrap();
    let case = corpus::RecoveryCase { circuit: c, outputs: vec![1], input };
    let m = case.measure().unwrap();
    assert!((m.eps - 0.01).abs() < 1e-9);
    assert!(m.distance <= 2.0 * 0.01f64.sqrt());
}

#[test]
fn recovery_bound_holds_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for case in recovery_corpus(&mut rng, 30) {
        let m = case.measure().unwrap();
        assert!(m.distance <= 2.0 * m.eps.sqrt() + 1e-6, "{m:?}");
    }
}

#[test]
fn zero_oracle_is_identity() {
    let u = oracle_unitary(&build_function(&FunctionSpec::zero(2)));
    for j in 0..16 {
        let input = DensityMatrix::basis(4, j).unwrap();
        let out = u.apply(&input).unwrap().partial_trace(&[0, 1, 2, 3]).unwrap();
        assert_eq!(out, input);
    }
}

#[test]
fn point_oracle_flips_target_on_match() {
    let f = build_function(&FunctionSpec::point(&from_str01("11")));
    let u = oracle_unitary(&f);
    let out = u.apply(&ket("110")).unwrap().partial_trace(&[0, 1, 2]).unwrap();
    assert_eq!(out, ket("111"));
}

#[test]
fn oracle_is_self_inverse_on_all_basis_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = random_bool_circuit(&mut rng, 3, 6, 1);
    let u = oracle_unitary(&f);
    let n = u.n_qubits();
    for j in 0..16 {
        let mut s = crate::bits::from_u64(j, n);
        let mut expect = s.clone();
        let fx = f.eval(&s[..3]).unwrap();
        expect[3] ^= fx[0];
        for op in u.base.ops() {
            apply_classical(op, &mut s);
        }
        assert_eq!(s, expect);
        for op in u.base.ops() {
            apply_classical(op, &mut s);
        }
        assert_eq!(s, crate::bits::from_u64(j, n));
    }
}

fn apply_classical(op: &Op, s: &mut [bool]) {
    match *op {
        Op::X(t) => s[t] ^= true,
        Op::Cnot(c, t) => s[t] ^= s[c],
        Op::Ccx(a, b, t) => s[t] ^= s[a] & s[b],
        _ => panic!("not classical"),
    }
}

#[test]
fn coherent_unitaries_are_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let c = random_circuit(&mut rng, 4, 12);
        let u = make_coherent(&c);
        if u.n_qubits() > 8 {
            continue;
        }
        let m = u.matrix().unwrap();
        let d = m.len();
        for a in 0..d {
            for b in 0..d {
                let dot: C64 = (0..d).map(|k| m[a][k].conj() * m[b][k]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - C64::new(want, 0.0)).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn ensemble_distance_matches_dense() {
    let a = BasisEnsemble::from_components(vec![(from_str01("01"), 0.7), (from_str01("11"), 0.3)]).unwrap();
    let b = BasisEnsemble::from_components(vec![(from_str01("01"), 0.2), (from_str01("00"), 0.8)]).unwrap();
    let dense = trace_distance(&a.to_density().unwrap(), &b.to_density().unwrap()).unwrap();
    assert!((a.trace_distance(&b).unwrap() - dense).abs() < 1e-12);
    assert!((dense - 0.8).abs() < 1e-12);
}

#[test]
fn ensemble_measurement_conditions_on_outcome() {
    let e = BasisEnsemble::from_components(vec![(from_str01("01"), 0.5), (from_str01("10"), 0.5)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (y, post) = e.measure(&[0], &mut rng);
    assert_eq!(post.as_pure().unwrap()[0], y[0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_distance_is_a_metric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = DensityMatrix::random(2, 2, &mut rng).unwrap();
        let s = DensityMatrix::random(2, 3, &mut rng).unwrap();
        let t = DensityMatrix::random(2, 1, &mut rng).unwrap();
        let rs = trace_distance(&r, &s).unwrap();
        prop_assert!((rs - trace_distance(&s, &r).unwrap()).abs() < 1e-9);
        prop_assert!(rs <= trace_distance(&r, &t).unwrap() + trace_distance(&t, &s).unwrap() + 1e-9);
    }

    #[test]
    fn run_never_increases_distance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, 3, 10);
        let r = DensityMatrix::random(3, 2, &mut rng).unwrap();
        let s = DensityMatrix::random(3, 2, &mut rng).unwrap();
        let before = trace_distance(&r, &s).unwrap();
        let after = trace_distance(&c.run(&r).unwrap(), &c.run(&s).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn channel_equivalence_under_deferral(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, 3, 10);
        let u = make_coherent(&c);
        prop_assume!(u.n_qubits() <= MAX_DENSITY_QUBITS);
        let r = DensityMatrix::random(3, 2, &mut rng).unwrap();
        prop_assert!(trace_distance(&c.run(&r).unwrap(), &u.channel(&r).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn run_outputs_valid_states(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, 3, 12);
        let r = DensityMatrix::random(3, 2, &mut rng).unwrap();
        prop_assert!(c.run(&r).unwrap().validate().is_ok());
    }
}
