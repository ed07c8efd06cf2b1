//! Randomized (circuit, input) pairs for checking the input-recovery bound.

use super::{input_recover_channel, DensityMatrix, Op, QsimError, QuantumCircuit, StateVector, C64};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct RecoveryCase {
    pub circuit: QuantumCircuit,
    pub outputs: Vec<usize>,
    pub input: DensityMatrix,
}

#[derive(Debug, Clone, Copy)]
pub struct RecoveryMeasurement {
    /// Distance of the output marginal from its nearest basis state.
    pub eps: f64,
    /// Distance of the recovered joint state from `input ⊗ |x><x|`.
    pub distance: f64,
}

impl RecoveryCase {
    pub fn measure(&self) -> Result<RecoveryMeasurement, QsimError> {
        let out = self.circuit.run(&self.input)?;
        let marg = out.partial_trace(&self.outputs)?;
        let diag = marg.diagonal();
        let (x, _) = diag
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |b, (i, &p)| if p > b.1 { (i, p) } else { b });
        let m = self.outputs.len();
        let eps = super::trace_distance(&marg, &DensityMatrix::basis(m, x)?)?;
        let joint = input_recover_channel(&self.circuit, &self.outputs, &self.input)?;
        let target = self.input.tensor(&DensityMatrix::basis(m, x)?)?;
        let distance = super::trace_distance(&joint, &target)?;
        Ok(RecoveryMeasurement { eps, distance })
    }
}

fn random_ops(rng: &mut impl Rng, n: usize, count: usize, with_quantum: bool) -> Vec<Op> {
    let mut ops = Vec::with_capacity(count);
    while ops.len() < count {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let c = rng.gen_range(0..n);
        let op = match rng.gen_range(0..if with_quantum { 7 } else { 4 }) {
            0 => Op::X(a),
            1 | 2 if a != b => Op::Cnot(a, b),
            3 if a != b && b != c && a != c => Op::Ccx(a, b, c),
            4 => Op::Z(a),
            5 => Op::H(a),
            6 => Op::Measure(a),
            _ => continue,
        };
        ops.push(op);
    }
    ops
}

/// `sqrt(1-p)|x0> + sqrt(p)|phi>` normalized, for random `x0`, `phi`.
fn perturbed_basis(rng: &mut impl Rng, n: usize, p: f64) -> StateVector {
    let x0 = rng.gen_range(0..1usize << n);
    let phi = StateVector::random(n, rng);
    let mut amps: Vec<C64> = phi.amplitudes().iter().map(|a| a * p.sqrt()).collect();
    amps[x0] += (1.0 - p).sqrt();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(n, amps).unwrap()
}

pub const MAX_EPS: f64 = 0.25;

/// Cases with output error at most [`MAX_EPS`]: classical reversible circuits on
/// slightly perturbed basis inputs, plus circuits with `H` and measurements
/// applied to wires that do not feed the outputs.
pub fn recovery_corpus(rng: &mut impl Rng, count: usize) -> Vec<RecoveryCase> {
    let mut cases = Vec::with_capacity(count);
    while cases.len() < count {
        let n_in = rng.gen_range(2..=3);
        let n_init = rng.gen_range(0..=1);
        let n = n_in + n_init;
        let n_out = rng.gen_range(1..=2);
        let p = match cases.len() % 4 {
            0 => 0.0,
            _ => rng.gen_range(0.0..0.3),
        };
        let mut ops: Vec<Op> = (n_in..n).map(Op::Init0).collect();
        let count = rng.gen_range(2..8);
        ops.extend(random_ops(rng, n, count, false));
        if cases.len() % 3 == 1 {
            // quantum noise on a wire we then forget about
            let spare = n_in - 1;
            ops.push(Op::H(spare));
            ops.push(Op::Measure(spare));
        }
        let outputs: Vec<usize> = (0..n_out).map(|k| n - 1 - k).collect();
        let circuit = match QuantumCircuit::new(n, ops) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let total = n + circuit.measure_count() + n_out;
        if total > super::MAX_DENSITY_QUBITS {
            continue;
        }
        let input = perturbed_basis(rng, n_in, p).to_density().unwrap();
        let case = RecoveryCase { circuit, outputs, input };
        if case.measure().map(|m| m.eps <= MAX_EPS).unwrap_or(false) {
            cases.push(case);
        }
    }
    cases
}

pub fn random_circuit(rng: &mut impl Rng, n: usize, count: usize) -> QuantumCircuit {
    QuantumCircuit::new(n, random_ops(rng, n, count, true)).unwrap()
}
