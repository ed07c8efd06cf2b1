use super::circuit::{make_coherent, QuantumCircuit};
use super::state::DensityMatrix;
use super::QsimError;
use crate::bits::Bits;
use rand::Rng;

/// The input-recovering construction: run the circuit coherently, CNOT-copy
/// the `outputs` wires into a fresh register `Y`, run the coherent circuit
/// backwards, and discard the auxiliary and record wires. Returns the joint
/// state on (input wires, `Y`), input wires first.
pub fn input_recover_channel(
    c: &QuantumCircuit,
    outputs: &[usize],
    input: &DensityMatrix,
) -> Result<DensityMatrix, QsimError> {
    let u = make_coherent(c);
    let n = u.n_qubits();
    if outputs.iter().any(|&w| w >= c.n_qubits()) {
        return Err(QsimError::Structure("output wire out of range".into()));
    }
    let total = n + outputs.len();
    if input.n_qubits() != u.input_wires.len() {
        return Err(QsimError::Dimension(u.input_wires.len(), input.n_qubits()));
    }
    let mut rho = input.embed(total, &u.input_wires)?;
    u.base.apply_dm(&mut rho);
    for (k, &w) in outputs.iter().enumerate() {
        rho.apply_cnot(w, n + k);
    }
    u.base.inverse()?.apply_dm(&mut rho);
    let mut keep = u.input_wires.clone();
    keep.extend(n..total);
    rho.partial_trace(&keep)
}

/// One run of the input-recovering circuit with `Y` measured.
#[derive(Debug, Clone)]
pub struct RecoveryRun {
    pub recovered: DensityMatrix,
    pub outcome: Bits,
    pub outcome_probability: f64,
}

pub fn input_recover_run(
    c: &QuantumCircuit,
    outputs: &[usize],
    input: &DensityMatrix,
    rng: &mut impl Rng,
) -> Result<RecoveryRun, QsimError> {
    let joint = input_recover_channel(c, outputs, input)?;
    let n_in = input.n_qubits();
    let m = outputs.len();
    let diag = joint.diagonal();
    let mut probs = vec![0.0; 1 << m];
    for (i, p) in diag.iter().enumerate() {
        probs[i >> n_in] += p;
    }
    let mut u: f64 = rng.gen();
    let mut y = probs.len() - 1;
    for (k, &p) in probs.iter().enumerate() {
        if u < p {
            y = k;
            break;
        }
        u -= p;
    }
    let d_in = 1usize << n_in;
    let dj = joint.dim();
    let py = probs[y];
    let mut rec = Vec::with_capacity(d_in * d_in);
    for a in 0..d_in {
        for b in 0..d_in {
            rec.push(joint.raw()[(y * d_in + a) * dj + (y * d_in + b)] / py);
        }
    }
    let recovered = DensityMatrix::basis(n_in, 0)?.with_entries(rec);
    Ok(RecoveryRun {
        recovered,
        outcome: (0..m).map(|k| (y >> k) & 1 == 1).collect(),
        outcome_probability: py,
    })
}
