//! Black-box access: counted oracles, the choice-oracle adapter, the
//! rewriting of member oracles into point-oracle access, and baseline
//! simulators that only ever see the oracle and the auxiliary input.

mod baselines;

pub use baselines::{run_baseline, simulator_experiment, Baseline, SimReport};

use crate::bits::{self, Bits};
use crate::circuit_ir::builder::{Bit, CircuitBuilder};
use crate::circuit_ir::BooleanCircuit;
use crate::families::{payload_len, AuxInfo, MemberAux};
use crate::pk_decompose::{sim_blocks, DecomposeError, KeyBlock, Strategy};
use crate::qsim::{QsimError, StateVector, C64};
use serde::Serialize;
use thiserror::Error;

/// Widest `n_in + n_out` whose truth table a superposition oracle keeps.
pub const MAX_SUPERPOSITION_WIDTH: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("width: expected {expected}, got {got}")]
    Width { expected: usize, got: usize },
    #[error("superposition queries are disabled for this oracle")]
    ClassicalOnly,
    #[error("oracle too wide for superposition queries")]
    TooWide,
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    Classical,
    Superposition,
}

/// One transcript line. Superposition queries carry no input or output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscriptEntry {
    pub index: usize,
    pub mode: QueryMode,
    pub input: Option<String>,
    pub output: Option<String>,
}

/// An oracle for `f` that counts every query it answers.
#[derive(Debug, Clone)]
pub struct OracleHandle {
    f: BooleanCircuit,
    table: Option<Vec<usize>>,
    superposition: bool,
    classical_count: usize,
    superposition_count: usize,
    transcript: Vec<TranscriptEntry>,
}

impl OracleHandle {
    /// Classical and superposition access.
    pub fn new(f: BooleanCircuit) -> OracleHandle {
        let mut h = OracleHandle::classical_only(f);
        h.superposition = true;
        h
    }

    pub fn classical_only(f: BooleanCircuit) -> OracleHandle {
        OracleHandle { f, table: None, superposition: false, classical_count: 0, superposition_count: 0, transcript: Vec::new() }
    }

    pub fn n_in(&self) -> usize {
        self.f.n_inputs()
    }
    pub fn n_out(&self) -> usize {
        self.f.n_outputs()
    }
    pub fn classical_queries(&self) -> usize {
        self.classical_count
    }
    pub fn superposition_queries(&self) -> usize {
        self.superposition_count
    }
    pub fn queries(&self) -> usize {
        self.classical_count + self.superposition_count
    }
    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn transcript_jsonl(&self) -> String {
        self.transcript.iter().map(|e| serde_json::to_string(e).expect("plain record") + "\n").collect()
    }

    pub fn query(&mut self, x: &[bool]) -> Result<Bits, OracleError> {
        if x.len() != self.n_in() {
            return Err(OracleError::Width { expected: self.n_in(), got: x.len() });
        }
        let y = self.f.eval(x).expect("width checked");
        self.transcript.push(TranscriptEntry {
            index: self.queries(),
            mode: QueryMode::Classical,
            input: Some(bits::to_str01(x)),
            output: Some(bits::to_str01(&y)),
        });
        self.classical_count += 1;
        Ok(y)
    }

    /// `|x>|z> -> |x>|z ⊕ f(x)>` on the given wires of `psi`.
    pub fn squery(&mut self, psi: &mut StateVector, x_wires: &[usize], z_wires: &[usize]) -> Result<(), OracleError> {
        if !self.superposition {
            return Err(OracleError::ClassicalOnly);
        }
        if x_wires.len() != self.n_in() {
            return Err(OracleError::Width { expected: self.n_in(), got: x_wires.len() });
        }
        if z_wires.len() != self.n_out() {
            return Err(OracleError::Width { expected: self.n_out(), got: z_wires.len() });
        }
        if self.n_in() + self.n_out() > MAX_SUPERPOSITION_WIDTH {
            return Err(OracleError::TooWide);
        }
        let table = self.table.get_or_insert_with(|| {
            let n = self.f.n_inputs();
            (0..1usize << n).map(|x| bits::to_u64(&self.f.eval(&bits::from_u64(x as u64, n)).unwrap()) as usize).collect()
        });
        psi.permute(|i| {
            let x = x_wires.iter().enumerate().fold(0, |a, (k, &w)| a | ((i >> w) & 1) << k);
            let y = table[x];
            z_wires.iter().enumerate().fold(i, |a, (k, &w)| a ^ (((y >> k) & 1) << w))
        });
        self.transcript.push(TranscriptEntry { index: self.queries(), mode: QueryMode::Superposition, input: None, output: None });
        self.superposition_count += 1;
        Ok(())
    }
}

/// `f(b, x) = c` if `b = 0`, else `g(x)`, answered with two `g` queries
/// per `f` query. Input layout is `b ‖ x`.
#[derive(Debug, Clone)]
pub struct ChoiceOracleAdapter {
    g: OracleHandle,
    c: Bits,
    f_count: usize,
}

impl ChoiceOracleAdapter {
    pub fn new(g: OracleHandle, c: &[bool]) -> Result<ChoiceOracleAdapter, OracleError> {
        if c.len() != g.n_out() {
            return Err(OracleError::Width { expected: g.n_out(), got: c.len() });
        }
        Ok(ChoiceOracleAdapter { g, c: c.to_vec(), f_count: 0 })
    }

    pub fn g(&self) -> &OracleHandle {
        &self.g
    }
    pub fn f_queries(&self) -> usize {
        self.f_count
    }

    pub fn query(&mut self, bx: &[bool]) -> Result<Bits, OracleError> {
        if bx.len() != 1 + self.g.n_in() {
            return Err(OracleError::Width { expected: 1 + self.g.n_in(), got: bx.len() });
        }
        let (b, x) = (bx[0], &bx[1..]);
        let anc = self.g.query(x)?;
        let mut z = vec![false; self.c.len()];
        if b {
            z = bits::xor(&z, &anc);
        } else {
            z = bits::xor(&z, &self.c);
        }
        // the second query returns the work register to zero
        let cleared = bits::xor(&anc, &self.g.query(x)?);
        debug_assert!(cleared.iter().all(|&v| !v));
        self.f_count += 1;
        Ok(z)
    }

    /// Superposition `f` query on `psi = |b>|x>|z>` (wire 0 is `b`).
    /// Runs `g`, a `b`-controlled copy of the work register into `z`,
    /// `X(b)`, a `b`-controlled XOR of `c`, `X(b)`, and `g` again.
    pub fn squery(&mut self, psi: &StateVector) -> Result<StateVector, OracleError> {
        let (n, m) = (self.g.n_in(), self.g.n_out());
        if psi.n_qubits() != 1 + n + m {
            return Err(OracleError::Width { expected: 1 + n + m, got: psi.n_qubits() });
        }
        let total = 1 + n + 2 * m;
        let mut amps = psi.amplitudes().to_vec();
        amps.resize(1 << total, C64::new(0.0, 0.0));
        let mut s = StateVector::from_amplitudes(total, amps)?;
        let x: Vec<usize> = (1..1 + n).collect();
        let z: Vec<usize> = (1 + n..1 + n + m).collect();
        let anc: Vec<usize> = (1 + n + m..total).collect();
        self.g.squery(&mut s, &x, &anc)?;
        for k in 0..m {
            s.apply_ccx(0, anc[k], z[k]);
        }
        s.apply_x(0);
        for k in (0..m).filter(|&k| self.c[k]) {
            s.apply_cnot(0, z[k]);
        }
        s.apply_x(0);
        self.g.squery(&mut s, &x, &anc)?;
        let keep = 1usize << (1 + n + m);
        let out = s.amplitudes()[..keep].to_vec();
        self.f_count += 1;
        Ok(StateVector::from_amplitudes(1 + n + m, out)?)
    }
}

/// The circuit `f(b, x)` the adapter simulates, built directly.
pub fn choice_circuit(g: &BooleanCircuit, c: &[bool]) -> BooleanCircuit {
    let mut b = CircuitBuilder::new(1 + g.n_inputs());
    let ins = b.inputs();
    let gx = b.append(g, &ins[1..]);
    let outs: Vec<_> = gx.iter().zip(c).map(|(&y, &ck)| b.mux(ins[0], Bit::Const(ck), y)).collect();
    b.finish(&outs)
}

/// Classical access to a member-shaped oracle: `b` in `0..4`, `x` of `λ` bits.
pub trait MemberOracle {
    fn lambda(&self) -> usize;
    fn query_member(&mut self, b: u8, x: &[bool]) -> Result<Bits, OracleError>;
}

/// A member answered by its own circuit.
pub struct DirectMember {
    pub lambda: usize,
    pub oracle: OracleHandle,
}

impl MemberOracle for DirectMember {
    fn lambda(&self) -> usize {
        self.lambda
    }
    fn query_member(&mut self, b: u8, x: &[bool]) -> Result<Bits, OracleError> {
        self.oracle.query(&crate::families::member_input(b, x))
    }
}

/// A member answered from a point (or zero) oracle plus explicit inputs:
/// the aux payload, simulated key blocks, and a constant `⊥`.
pub struct ComposedMember {
    lambda: usize,
    point: OracleHandle,
    aux_payload: Bits,
    blocks: Vec<KeyBlock>,
}

fn framed(lambda: usize, payload: Option<&[bool]>) -> Bits {
    let width = payload_len(lambda);
    match payload {
        None => vec![true; width + 1],
        Some(p) => {
            let mut out = vec![false];
            out.extend_from_slice(p);
            out.resize(width + 1, false);
            out
        }
    }
}

/// Rewrites access to a member oracle into access to `point` alone, given
/// `(Enc(α), o, pk)`; blocks come from the key simulator.
pub fn compose_adapters(lambda: usize, point: OracleHandle, aux: &AuxInfo, seed: &[u8]) -> Result<ComposedMember, OracleError> {
    let blocks = sim_blocks(lambda, &aux.pk, Strategy::Bootstrapped, seed)?;
    let payload = bits::from_bytes(&MemberAux { alpha_ct: aux.alpha_ct.clone(), o: aux.o.clone() }.to_bytes());
    Ok(ComposedMember { lambda, point, aux_payload: payload, blocks })
}

impl ComposedMember {
    pub fn point(&self) -> &OracleHandle {
        &self.point
    }
}

impl MemberOracle for ComposedMember {
    fn lambda(&self) -> usize {
        self.lambda
    }
    fn query_member(&mut self, b: u8, x: &[bool]) -> Result<Bits, OracleError> {
        if x.len() != self.lambda {
            return Err(OracleError::Width { expected: self.lambda, got: x.len() });
        }
        Ok(match b {
            0 => framed(self.lambda, Some(&self.aux_payload)),
            1 => {
                let i = bits::to_u64(x) as usize;
                match self.blocks.get(i) {
                    Some(block) => framed(self.lambda, Some(&bits::from_bytes(&block.to_bytes()))),
                    None => framed(self.lambda, None),
                }
            }
            2 => framed(self.lambda, Some(&self.point.query(x)?)),
            _ => framed(self.lambda, None),
        })
    }
}
