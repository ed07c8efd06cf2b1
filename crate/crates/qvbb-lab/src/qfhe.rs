//! Quantum FHE layer: quantum-one-time-pad ciphertexts whose Pauli pad keys
//! are classical FHE ciphertexts.
//!
//! A qubit is stored as `X^a Z^b |m>` alongside `(Enc(a), Enc(b))`. `X`, `Z`
//! and `CNOT` are evaluated by updating the pad keys homomorphically; any
//! circuit containing `H`, `CCX` or a measurement goes through the sealed
//! path, which removes the pads inside the backend, runs the circuit and
//! re-pads with fresh keys at a level lowered by the circuit's sealed depth.
//!
//! States are either dense density matrices or basis ensembles (classical
//! mixtures of computational-basis states, for registers too wide for
//! dense simulation).

use crate::bits::{self, Bits};
use crate::circuit_ir::{compile_reversible, BooleanCircuit};
use crate::fhe_core::{self, Ciphertext, FheError, PublicKey, Sealed, SecretKey, CIPHERTEXT_LEN};
use crate::qsim::{BasisEnsemble, DensityMatrix, Op, QsimError, QuantumCircuit, MAX_DENSITY_QUBITS};
use rand::Rng;
use thiserror::Error;

pub const DEMOTE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QfheError {
    #[error(transparent)]
    Fhe(#[from] FheError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("padded state is not a computational-basis state")]
    NotClassical,
    #[error("expected {expected} qubits, got {got}")]
    Width { expected: usize, got: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed classical ciphertext")]
    Malformed,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QState {
    Dense(DensityMatrix),
    Ensemble(BasisEnsemble),
}

impl QState {
    pub fn basis(bits: Bits) -> QState {
        QState::Ensemble(BasisEnsemble::pure(bits))
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            QState::Dense(d) => d.n_qubits(),
            QState::Ensemble(e) => e.n_qubits(),
        }
    }

    pub fn to_dense(&self) -> Result<DensityMatrix, QsimError> {
        match self {
            QState::Dense(d) => Ok(d.clone()),
            QState::Ensemble(e) => e.to_density(),
        }
    }

    /// Diagonal of a dense state as an ensemble: what a computational-basis
    /// measurement of every qubit would see.
    fn dephased(&self) -> BasisEnsemble {
        match self {
            QState::Ensemble(e) => e.clone(),
            QState::Dense(d) => {
                let n = d.n_qubits();
                let parts: Vec<(Bits, f64)> = d
                    .diagonal()
                    .into_iter()
                    .enumerate()
                    .filter(|(_, p)| *p > 1e-15)
                    .map(|(i, p)| (bits::from_u64(i as u64, n), p))
                    .collect();
                let z: f64 = parts.iter().map(|p| p.1).sum();
                BasisEnsemble::from_components(parts.into_iter().map(|(b, p)| (b, p / z)).collect())
                    .expect("normalized diagonal")
            }
        }
    }

    /// Applies `X^a` then `Z^b` (as a state-level map, global phases dropped).
    fn apply_paulis(&mut self, a: &[bool], b: &[bool]) {
        match self {
            QState::Dense(d) => {
                for (w, (&x, &z)) in a.iter().zip(b).enumerate() {
                    if x {
                        d.apply_x(w);
                    }
                    if z {
                        d.apply_z(w);
                    }
                }
            }
            QState::Ensemble(e) => *e = e.map(|s| bits::xor(s, a)),
        }
    }

    fn apply_circuit(&mut self, c: &QuantumCircuit) -> Result<(), QfheError> {
        if let QState::Ensemble(e) = self {
            if c.ops().iter().any(|o| matches!(o, Op::H(_))) {
                if e.n_qubits() > MAX_DENSITY_QUBITS {
                    return Err(QfheError::Unsupported("H on a wide basis ensemble".into()));
                }
                *self = QState::Dense(e.to_density()?);
            }
        }
        match self {
            QState::Dense(d) => c.apply_dm(d),
            QState::Ensemble(e) => {
                *e = e.map(|s| {
                    let mut s = s.clone();
                    for op in c.ops() {
                        match *op {
                            Op::X(w) => s[w] ^= true,
                            Op::Cnot(a, t) => s[t] ^= s[a],
                            Op::Ccx(a, b, t) => s[t] ^= s[a] & s[b],
                            Op::Z(_) | Op::Measure(_) | Op::Init0(_) | Op::H(_) => {}
                        }
                    }
                    s
                })
            }
        }
        Ok(())
    }

    /// Places this state on `positions` of a `total`-qubit register, `|0>` elsewhere.
    fn embed(&self, total: usize, positions: &[usize]) -> Result<QState, QsimError> {
        Ok(match self {
            QState::Dense(d) => QState::Dense(d.embed(total, positions)?),
            QState::Ensemble(e) => QState::Ensemble(e.map(|s| {
                let mut out = vec![false; total];
                positions.iter().zip(s).for_each(|(&p, &v)| out[p] = v);
                out
            })),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadKeys {
    pub a: Ciphertext,
    pub b: Ciphertext,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QCiphertext {
    state: QState,
    pads: Vec<PadKeys>,
}

impl QCiphertext {
    pub fn n_qubits(&self) -> usize {
        self.pads.len()
    }
    pub fn padded_state(&self) -> &QState {
        &self.state
    }
    pub fn pads(&self) -> &[PadKeys] {
        &self.pads
    }
    /// Remaining level: the minimum over all pad-key ciphertexts.
    pub fn level(&self) -> usize {
        self.pads.iter().map(|p| p.a.level.min(p.b.level) as usize).min().unwrap_or(usize::MAX)
    }

    /// Joint ciphertext of two registers, `self` on the low qubits.
    pub fn tensor(self, other: QCiphertext) -> Result<QCiphertext, QfheError> {
        let state = match (self.state, other.state) {
            (QState::Ensemble(x), QState::Ensemble(y)) => QState::Ensemble(x.tensor(&y)),
            (x, y) => QState::Dense(x.to_dense()?.tensor(&y.to_dense()?)?),
        };
        let mut pads = self.pads;
        pads.extend(other.pads);
        Ok(QCiphertext { state, pads })
    }
}

/// `(m ⊕ a, Enc(a), Enc(b))` per qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalQCiphertext {
    pub masked: Bits,
    pub pads: Vec<PadKeys>,
}

impl ClassicalQCiphertext {
    /// `n (4, big-endian) || masked bits (packed, MSB first) || (Enc(a) || Enc(b)) per qubit`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = (self.masked.len() as u32).to_be_bytes().to_vec();
        v.extend(bits::to_bytes(&self.masked));
        for p in &self.pads {
            v.extend(p.a.to_bytes());
            v.extend(p.b.to_bytes());
        }
        v
    }

    pub fn from_bytes(b: &[u8]) -> Result<ClassicalQCiphertext, QfheError> {
        let n = u32::from_be_bytes(b.get(..4).ok_or(QfheError::Malformed)?.try_into().unwrap()) as usize;
        let packed = n.div_ceil(8);
        if b.len() != 4 + packed + 2 * CIPHERTEXT_LEN * n {
            return Err(QfheError::Malformed);
        }
        let masked = bits::from_bytes(&b[4..4 + packed])[..n].to_vec();
        let cts = fhe_core::deserialize_cts(&b[4 + packed..])?;
        let pads = cts.chunks(2).map(|c| PadKeys { a: c[0], b: c[1] }).collect();
        Ok(ClassicalQCiphertext { masked, pads })
    }

    pub fn to_quantum(&self) -> QCiphertext {
        QCiphertext { state: QState::basis(self.masked.clone()), pads: self.pads.clone() }
    }
}

fn encrypt_pads(v: &Sealed, a: &[bool], b: &[bool], level: u16, rng: &mut impl Rng) -> Vec<PadKeys> {
    a.iter()
        .zip(b)
        .map(|(&x, &z)| PadKeys { a: v.seal(x, level, rng.gen()), b: v.seal(z, level, rng.gen()) })
        .collect()
}

/// Encrypts under explicit pad keys.
pub fn qenc_with_keys(pk: &PublicKey, state: QState, a: &[bool], b: &[bool], rng: &mut impl Rng) -> QCiphertext {
    assert_eq!((a.len(), b.len()), (state.n_qubits(), state.n_qubits()));
    let v = Sealed::new(pk);
    let mut state = state;
    state.apply_paulis(&vec![false; a.len()], b);
    state.apply_paulis(a, &vec![false; a.len()]);
    QCiphertext { state, pads: encrypt_pads(&v, a, b, v.level, rng) }
}

pub fn qenc(pk: &PublicKey, state: QState, rng: &mut impl Rng) -> QCiphertext {
    let n = state.n_qubits();
    let a = bits::random(rng, n);
    let b = bits::random(rng, n);
    qenc_with_keys(pk, state, &a, &b, rng)
}

fn undo_pads(state: &mut QState, a: &[bool], b: &[bool]) {
    state.apply_paulis(a, &vec![false; a.len()]);
    state.apply_paulis(&vec![false; b.len()], b);
}

pub fn qdec(sk: &SecretKey, qc: &QCiphertext) -> Result<QState, QfheError> {
    let a = fhe_core::dec(sk, &qc.pads.iter().map(|p| p.a).collect::<Vec<_>>())?;
    let b = fhe_core::dec(sk, &qc.pads.iter().map(|p| p.b).collect::<Vec<_>>())?;
    let mut state = qc.state.clone();
    undo_pads(&mut state, &a, &b);
    Ok(state)
}

/// Classical ciphertexts of `m` as `|0> ⊗ |Enc(m), Enc(0)>`.
pub fn promote(pk: &PublicKey, cts: &[Ciphertext], rng: &mut impl Rng) -> QCiphertext {
    let v = Sealed::new(pk);
    let pads = cts
        .iter()
        .map(|&a| PadKeys { a, b: v.seal(false, a.level, rng.gen()) })
        .collect();
    QCiphertext { state: QState::basis(vec![false; cts.len()]), pads }
}

fn classical_value(state: &QState) -> Result<Bits, QfheError> {
    match state {
        QState::Ensemble(e) => e.as_pure().cloned().ok_or(QfheError::NotClassical),
        QState::Dense(d) => {
            let diag = d.diagonal();
            let (i, p) = diag
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.total_cmp(y.1))
                .expect("non-empty");
            if *p < 1.0 - DEMOTE_TOLERANCE {
                return Err(QfheError::NotClassical);
            }
            Ok(bits::from_u64(i as u64, d.n_qubits()))
        }
    }
}

/// Absorbs the masked bits into `Enc(a)`: returns `Enc(m)` per qubit.
pub fn demote_classical(pk: &PublicKey, c: &ClassicalQCiphertext) -> Result<Vec<Ciphertext>, QfheError> {
    Ok(c.masked
        .iter()
        .zip(&c.pads)
        .map(|(&x, p)| fhe_core::xor_const(pk, &p.a, x))
        .collect::<Result<_, _>>()?)
}

pub fn demote(pk: &PublicKey, qc: &QCiphertext) -> Result<Vec<Ciphertext>, QfheError> {
    let masked = classical_value(&qc.state)?;
    demote_classical(pk, &ClassicalQCiphertext { masked, pads: qc.pads.clone() })
}

/// Measures every padded qubit in the computational basis.
pub fn measure(qc: QCiphertext, rng: &mut impl Rng) -> ClassicalQCiphertext {
    let e = qc.state.dephased();
    let masked = e.sample(rng);
    ClassicalQCiphertext { masked, pads: qc.pads }
}

fn only_pauli(c: &QuantumCircuit) -> bool {
    c.ops().iter().all(|o| matches!(o, Op::X(_) | Op::Z(_) | Op::Cnot(..)))
}

/// Brings the register up to the circuit's width: `INIT0` wires get `|0>`
/// under encryptions of zero pads.
fn widen(pk: &PublicKey, c: &QuantumCircuit, qc: QCiphertext, rng: &mut impl Rng) -> Result<QCiphertext, QfheError> {
    let inw = c.input_wires();
    if qc.n_qubits() != inw.len() {
        return Err(QfheError::Width { expected: inw.len(), got: qc.n_qubits() });
    }
    if inw.len() == c.n_qubits() {
        return Ok(qc);
    }
    let v = Sealed::new(pk);
    let level = qc.level().min(v.level as usize) as u16;
    let n = c.n_qubits();
    let zero = vec![false; n];
    let mut pads = encrypt_pads(&v, &zero, &zero, level, rng);
    for (k, &w) in inw.iter().enumerate() {
        pads[w] = qc.pads[k];
    }
    Ok(QCiphertext { state: qc.state.embed(n, &inw)?, pads })
}

/// Homomorphic evaluation. Pauli-only circuits update the pad keys; all
/// others take the sealed path.
pub fn qeval(pk: &PublicKey, c: &QuantumCircuit, qc: QCiphertext, rng: &mut impl Rng) -> Result<QCiphertext, QfheError> {
    if only_pauli(c) {
        qeval_pauli(pk, c, qc, rng)
    } else {
        qeval_sealed(pk, c, qc, rng)
    }
}

pub fn qeval_pauli(pk: &PublicKey, c: &QuantumCircuit, qc: QCiphertext, rng: &mut impl Rng) -> Result<QCiphertext, QfheError> {
    if !only_pauli(c) {
        return Err(QfheError::Unsupported("non-Pauli op on the key-update path".into()));
    }
    let mut qc = widen(pk, c, qc, rng)?;
    qc.state.apply_circuit(c)?;
    for op in c.ops() {
        if let Op::Cnot(ctl, t) = *op {
            qc.pads[t].a = fhe_core::add(pk, &qc.pads[t].a, &qc.pads[ctl].a)?;
            qc.pads[ctl].b = fhe_core::add(pk, &qc.pads[ctl].b, &qc.pads[t].b)?;
        }
    }
    Ok(qc)
}

fn open_pads(v: &Sealed, pads: &[PadKeys]) -> Result<(Bits, Bits), QfheError> {
    let a = pads.iter().map(|p| v.open(&p.a)).collect::<Result<Bits, _>>()?;
    let b = pads.iter().map(|p| v.open(&p.b)).collect::<Result<Bits, _>>()?;
    Ok((a, b))
}

fn budget(qc: &QCiphertext, need: usize) -> Result<u16, QfheError> {
    let have = qc.level();
    if need > have {
        return Err(FheError::DepthExceeded { need, have }.into());
    }
    Ok((have - need) as u16)
}

pub fn qeval_sealed(pk: &PublicKey, c: &QuantumCircuit, qc: QCiphertext, rng: &mut impl Rng) -> Result<QCiphertext, QfheError> {
    let qc = widen(pk, c, qc, rng)?;
    let level = budget(&qc, c.sealed_depth())?;
    let v = Sealed::new(pk);
    let (a, b) = open_pads(&v, &qc.pads)?;
    let mut state = qc.state;
    undo_pads(&mut state, &a, &b);
    state.apply_circuit(c)?;
    let n = state.n_qubits();
    let (a2, b2) = (bits::random(rng, n), bits::random(rng, n));
    state.apply_paulis(&vec![false; n], &b2);
    state.apply_paulis(&a2, &vec![false; n]);
    Ok(QCiphertext { state, pads: encrypt_pads(&v, &a2, &b2, level, rng) })
}

/// A classical function evaluated coherently, with the sealed depth its
/// reversible realization consumes.
pub trait ClassicalProgram: Sync {
    fn n_inputs(&self) -> usize;
    fn n_outputs(&self) -> usize;
    fn sealed_depth(&self) -> usize;
    fn run(&self, x: &[bool]) -> Bits;
}

impl ClassicalProgram for BooleanCircuit {
    fn n_inputs(&self) -> usize {
        BooleanCircuit::n_inputs(self)
    }
    fn n_outputs(&self) -> usize {
        self.output_wires().len()
    }
    fn sealed_depth(&self) -> usize {
        let r = compile_reversible(&self.split_fanout());
        let ops = r.gates.iter().map(|&g| Op::from(g)).collect();
        QuantumCircuit::new(r.n_wires, ops).expect("compiled circuit").sealed_depth()
    }
    fn run(&self, x: &[bool]) -> Bits {
        self.eval(x).expect("arity checked by caller")
    }
}

/// Coherent evaluation of `p` on the encrypted register; returns only the
/// encrypted output register. The input register stays entangled with the
/// output inside the evaluation and is not handed back.
pub fn qeval_program(
    pk: &PublicKey,
    p: &dyn ClassicalProgram,
    qc: QCiphertext,
    rng: &mut impl Rng,
) -> Result<QCiphertext, QfheError> {
    if qc.n_qubits() != p.n_inputs() {
        return Err(QfheError::Width { expected: p.n_inputs(), got: qc.n_qubits() });
    }
    let level = budget(&qc, p.sealed_depth())?;
    let v = Sealed::new(pk);
    let (a, b) = open_pads(&v, &qc.pads)?;
    let mut state = qc.state;
    undo_pads(&mut state, &a, &b);
    let input = state.dephased();
    let out = {
        use rayon::prelude::*;
        let parts: Vec<(Bits, f64)> = input.components().par_iter().map(|(x, w)| (p.run(x), *w)).collect();
        BasisEnsemble::from_components(parts)?
    };
    let n = p.n_outputs();
    let (a2, b2) = (bits::random(rng, n), bits::random(rng, n));
    let mut state = QState::Ensemble(out);
    state.apply_paulis(&a2, &b2);
    Ok(QCiphertext { state, pads: encrypt_pads(&v, &a2, &b2, level, rng) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fhe_core::{enc, keygen, FheParams, KeyPair, RandomTape};
    use crate::prf::stream_rng;
    use crate::qsim::{trace_distance, StateVector};

    fn keys(d: usize, t: u64) -> KeyPair {
        keygen(FheParams::new(6, d), &RandomTape::new(bits::from_u64(t, 6)))
    }

    fn dense(bits: &[bool]) -> QState {
        QState::Dense(DensityMatrix::from_bits(bits).unwrap())
    }

    fn plus() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = StateVector::from_amplitudes(1, vec![crate::qsim::C64::new(h, 0.0); 2]).unwrap();
        DensityMatrix::from_pure(&psi).unwrap()
    }

    fn dist(s: &QState, r: &DensityMatrix) -> f64 {
        trace_distance(&s.to_dense().unwrap(), r).unwrap()
    }

    #[test]
    fn zero_pads_leave_the_state_alone() {
        let k = keys(2, 1);
        let mut rng = stream_rng(1, "qfhe", &[]);
        let rho = plus();
        let qc = qenc_with_keys(&k.pk, QState::Dense(rho.clone()), &[false], &[false], &mut rng);
        assert!(dist(qc.padded_state(), &rho) < 1e-12);
    }

    #[test]
    fn roundtrips() {
        let k = keys(2, 2);
        let mut rng = stream_rng(2, "qfhe", &[]);
        let qc = qenc(&k.pk, dense(&[false, true]), &mut rng);
        assert!(dist(&qdec(&k.sk, &qc).unwrap(), &DensityMatrix::from_bits(&[false, true]).unwrap()) < 1e-12);
        let mut states = vec![DensityMatrix::from_bits(&[false]).unwrap(), DensityMatrix::from_bits(&[true]).unwrap(), plus()];
        states.push(DensityMatrix::from_pure(&StateVector::random(3, &mut rng)).unwrap());
        for rho in states {
            for _ in 0..8 {
                let qc = qenc(&k.pk, QState::Dense(rho.clone()), &mut rng);
                assert!(dist(&qdec(&k.sk, &qc).unwrap(), &rho) < 1e-9);
            }
        }
        let other = keys(2, 3);
        let qc = qenc(&k.pk, dense(&[true]), &mut rng);
        assert!(matches!(qdec(&other.sk, &qc), Err(QfheError::Fhe(FheError::WrongKey))));
    }

    #[test]
    fn averaged_padding_is_maximally_mixed() {
        let k = keys(1, 4);
        let mut rng = stream_rng(3, "qfhe", &[]);
        let rho = DensityMatrix::from_pure(&StateVector::random(1, &mut rng)).unwrap();
        let mut acc = [0.0f64; 4];
        let mut off = crate::qsim::C64::new(0.0, 0.0);
        let n = 200;
        for _ in 0..n {
            let qc = qenc(&k.pk, QState::Dense(rho.clone()), &mut rng);
            let s = qc.padded_state().to_dense().unwrap();
            acc[0] += s.get(0, 0).re;
            acc[3] += s.get(1, 1).re;
            off += s.get(0, 1);
        }
        let (p0, c) = (acc[0] / n as f64, off / n as f64);
        // trace distance of a qubit state to I/2 is the Bloch-vector length / 2
        let r = ((2.0 * p0 - 1.0).powi(2) + 4.0 * c.norm_sqr()).sqrt() / 2.0;
        assert!(r <= 0.05, "distance {r}");
    }

    #[test]
    fn promote_and_demote() {
        let k = keys(3, 5);
        let mut rng = stream_rng(4, "qfhe", &[]);
        for b in [false, true] {
            let qc = promote(&k.pk, &enc(&k.pk, &[b], &mut rng), &mut rng);
            assert_eq!(qdec(&k.sk, &qc).unwrap(), QState::basis(vec![b]));
        }
        let m = vec![true, false, true, true];
        let cts = enc(&k.pk, &m, &mut rng);
        let qc = promote(&k.pk, &cts, &mut rng);
        assert_eq!(qdec(&k.sk, &qc).unwrap(), QState::basis(m.clone()));
        assert_eq!(fhe_core::dec(&k.sk, &demote(&k.pk, &qc).unwrap()).unwrap(), m);
        let qx = qenc(&k.pk, dense(&m), &mut rng);
        assert_eq!(fhe_core::dec(&k.sk, &demote(&k.pk, &qx).unwrap()).unwrap(), m);
        let qp = qenc(&k.pk, QState::Dense(plus()), &mut rng);
        assert_eq!(demote(&k.pk, &qp), Err(QfheError::NotClassical));
    }

    #[test]
    fn x_and_cnot_by_key_update() {
        let k = keys(2, 6);
        let mut rng = stream_rng(5, "qfhe", &[]);
        let qc = qenc(&k.pk, dense(&[false]), &mut rng);
        let pads = qc.pads().to_vec();
        let x = QuantumCircuit::new(1, vec![Op::X(0)]).unwrap();
        let out = qeval(&k.pk, &x, qc, &mut rng).unwrap();
        assert_eq!(out.pads(), &pads[..]);
        assert!(dist(&qdec(&k.sk, &out).unwrap(), &DensityMatrix::from_bits(&[true]).unwrap()) < 1e-12);

        let cx = QuantumCircuit::new(2, vec![Op::Cnot(0, 1)]).unwrap();
        let out = qeval(&k.pk, &cx, qenc(&k.pk, dense(&[true, false]), &mut rng), &mut rng).unwrap();
        assert!(dist(&qdec(&k.sk, &out).unwrap(), &DensityMatrix::from_bits(&[true, true]).unwrap()) < 1e-12);
        assert_eq!(out.level(), 2);
    }

    #[test]
    fn homomorphic_correctness_on_corpus() {
        let k = keys(40, 7);
        let mut rng = stream_rng(6, "qfhe", &[]);
        for i in 0..24 {
            let n = 2 + i % 7;
            let c = crate::qsim::corpus::random_circuit(&mut rng, n, 12);
            let inw = c.input_wires().len();
            let rho = DensityMatrix::random(inw, 2, &mut rng).unwrap();
            let want = c.run(&rho).unwrap();
            let out = qeval(&k.pk, &c, qenc(&k.pk, QState::Dense(rho), &mut rng), &mut rng).unwrap();
            assert!(dist(&qdec(&k.sk, &out).unwrap(), &want) < 1e-6);
            assert_eq!(out.level(), 40 - c.sealed_depth().min(40) * !only_pauli(&c) as usize);
        }
    }

    #[test]
    fn pauli_and_sealed_paths_agree() {
        let k = keys(4, 8);
        let mut rng = stream_rng(7, "qfhe", &[]);
        for _ in 0..10 {
            let ops: Vec<Op> = (0..10)
                .map(|_| match rng.gen_range(0..3) {
                    0 => Op::X(rng.gen_range(0..3)),
                    1 => Op::Z(rng.gen_range(0..3)),
                    _ => {
                        let c = rng.gen_range(0..3);
                        Op::Cnot(c, (c + rng.gen_range(1..3)) % 3)
                    }
                })
                .collect();
            let c = QuantumCircuit::new(3, ops).unwrap();
            let rho = DensityMatrix::random(3, 2, &mut rng).unwrap();
            let p = qeval_pauli(&k.pk, &c, qenc(&k.pk, QState::Dense(rho.clone()), &mut rng), &mut rng).unwrap();
            let s = qeval_sealed(&k.pk, &c, qenc(&k.pk, QState::Dense(rho), &mut rng), &mut rng).unwrap();
            let (dp, ds) = (qdec(&k.sk, &p).unwrap(), qdec(&k.sk, &s).unwrap());
            assert!(trace_distance(&dp.to_dense().unwrap(), &ds.to_dense().unwrap()).unwrap() < 1e-9);
        }
    }

    #[test]
    fn sealed_budget_is_enforced() {
        let k = keys(1, 9);
        let mut rng = stream_rng(8, "qfhe", &[]);
        let c = QuantumCircuit::new(1, vec![Op::H(0), Op::H(0)]).unwrap();
        let r = qeval(&k.pk, &c, qenc(&k.pk, dense(&[false]), &mut rng), &mut rng);
        assert_eq!(r, Err(QfheError::Fhe(FheError::DepthExceeded { need: 2, have: 1 })));
    }

    #[test]
    fn program_on_ensemble_returns_output_register() {
        let k = keys(5, 10);
        let mut rng = stream_rng(9, "qfhe", &[]);
        let mut b = crate::circuit_ir::builder::CircuitBuilder::new(3);
        let x = b.inputs();
        let t = b.and(x[0], x[1]);
        let y = b.xor(t, x[2]);
        let f = b.finish(&[y]);
        let mix = BasisEnsemble::from_components(vec![
            (vec![true, true, false], 0.75),
            (vec![false, true, false], 0.25),
        ])
        .unwrap();
        let qc = qenc(&k.pk, QState::Ensemble(mix), &mut rng);
        let out = qeval_program(&k.pk, &f, qc, &mut rng).unwrap();
        assert_eq!(out.n_qubits(), 1);
        assert_eq!(out.level(), 5 - ClassicalProgram::sealed_depth(&f));
        match qdec(&k.sk, &out).unwrap() {
            QState::Ensemble(e) => assert!((e.probability(&[true]) - 0.75).abs() < 1e-12),
            _ => panic!("ensemble expected"),
        }
    }

    #[test]
    fn classical_form_roundtrips() {
        let k = keys(2, 11);
        let mut rng = stream_rng(10, "qfhe", &[]);
        let m = bits::from_u64(0b1011001, 7);
        let c = measure(qenc(&k.pk, QState::basis(m.clone()), &mut rng), &mut rng);
        let b = c.to_bytes();
        assert_eq!(b.len(), 4 + 1 + 7 * 2 * CIPHERTEXT_LEN);
        let back = ClassicalQCiphertext::from_bytes(&b).unwrap();
        assert_eq!(back, c);
        assert_eq!(qdec(&k.sk, &back.to_quantum()).unwrap(), QState::basis(m.clone()));
        assert_eq!(fhe_core::dec(&k.sk, &demote_classical(&k.pk, &back).unwrap()).unwrap(), m);
        assert!(ClassicalQCiphertext::from_bytes(&b[..b.len() - 1]).is_err());
    }
}
