//! Candidate quantum obfuscators and their public interpreter.
//!
//! Every shipped candidate encodes a circuit as a fixed-width description
//! `desc` and hands out a mixture of basis states built from it. The
//! interpreter `J` is a universal netlist evaluator whose shape depends only
//! on the input and output widths, so it exists before any circuit is chosen.

mod interpreter;

pub use interpreter::{decode_desc, encode_desc, jacobi_eval, Desc, Interpreter, InterpreterShape, Record, SWEEPS};

use crate::bits::Bits;
use crate::circuit_ir::BooleanCircuit;
use crate::prf::stream_rng;
use crate::qsim::{BasisEnsemble, QsimError};
use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CandidateError {
    #[error("circuit does not fit interpreter shape: {0}")]
    Unsupported(String),
    #[error("unknown candidate {0:?}")]
    Unknown(String),
    #[error("input width: expected {expected}, got {got}")]
    Width { expected: usize, got: usize },
    #[error("interpreter too large to materialize ({0} gates)")]
    TooLarge(usize),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// An obfuscated program: an `m`-qubit state and the public `J` it runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct Obfuscation {
    pub candidate: String,
    pub interpreter: Interpreter,
    pub state: BasisEnsemble,
}

impl Obfuscation {
    pub fn m(&self) -> usize {
        self.state.n_qubits()
    }
}

pub trait Candidate: Send + Sync {
    fn name(&self) -> String;
    /// Functional-equivalence error the candidate promises.
    fn epsilon(&self) -> f64;
    fn obfuscate(&self, c: &BooleanCircuit, seed: u64) -> Result<Obfuscation, CandidateError>;

    fn interpreter(&self, n_in: usize, n_out: usize) -> Interpreter {
        Interpreter::new(InterpreterShape::for_io(n_in, n_out))
    }
}

/// `|desc(C)><desc(C)|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BasisCandidate;

impl Candidate for BasisCandidate {
    fn name(&self) -> String {
        "basis".into()
    }
    fn epsilon(&self) -> f64 {
        0.0
    }
    fn obfuscate(&self, c: &BooleanCircuit, _seed: u64) -> Result<Obfuscation, CandidateError> {
        let j = self.interpreter(c.n_inputs(), c.n_outputs());
        let desc = encode_desc(j.shape(), c)?;
        Ok(Obfuscation { candidate: self.name(), interpreter: j, state: BasisEnsemble::pure(desc) })
    }
}

/// `(1-ε)|desc><desc| + ε/k Σ_j |desc ⊕ e_j><desc ⊕ e_j|` with `k`
/// single-bit flips `e_j` drawn from the seed inside the used part of desc.
#[derive(Debug, Clone, Copy)]
pub struct NoisyCandidate {
    pub epsilon: f64,
    pub flips: usize,
}

pub const DEFAULT_NOISE: f64 = 0.05;
pub const DEFAULT_FLIPS: usize = 8;

impl Default for NoisyCandidate {
    fn default() -> NoisyCandidate {
        NoisyCandidate { epsilon: DEFAULT_NOISE, flips: DEFAULT_FLIPS }
    }
}

impl Candidate for NoisyCandidate {
    fn name(&self) -> String {
        if self.epsilon == DEFAULT_NOISE {
            "noisy".into()
        } else {
            format!("noisy:{}", self.epsilon)
        }
    }
    fn epsilon(&self) -> f64 {
        self.epsilon
    }
    fn obfuscate(&self, c: &BooleanCircuit, seed: u64) -> Result<Obfuscation, CandidateError> {
        let j = self.interpreter(c.n_inputs(), c.n_outputs());
        let desc = encode_desc(j.shape(), c)?;
        let region = j.shape().used_positions(c.gates().len());
        let mut rng = stream_rng(seed, "noisy-candidate", &[]);
        let mut parts = vec![(desc.clone(), 1.0 - self.epsilon)];
        for _ in 0..self.flips {
            let mut v = desc.clone();
            v[region[rng.gen_range(0..region.len())]] ^= true;
            parts.push((v, self.epsilon / self.flips as f64));
        }
        Ok(Obfuscation { candidate: self.name(), interpreter: j, state: BasisEnsemble::from_components(parts)? })
    }
}

/// Candidates by name. `noisy:<eps>` builds a noisy candidate on the fly.
#[derive(Clone)]
pub struct Registry {
    entries: BTreeMap<String, Arc<dyn Candidate>>,
}

impl Default for Registry {
    fn default() -> Registry {
        let mut r = Registry { entries: BTreeMap::new() };
        r.register(Arc::new(BasisCandidate));
        r.register(Arc::new(NoisyCandidate::default()));
        r
    }
}

impl Registry {
    pub fn register(&mut self, c: Arc<dyn Candidate>) {
        self.entries.insert(c.name(), c);
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Candidate>, CandidateError> {
        if let Some(c) = self.entries.get(name) {
            return Ok(c.clone());
        }
        match name.strip_prefix("noisy:").map(str::parse::<f64>) {
            Some(Ok(eps)) if (0.0..=1.0).contains(&eps) => {
                Ok(Arc::new(NoisyCandidate { epsilon: eps, flips: DEFAULT_FLIPS }))
            }
            _ => Err(CandidateError::Unknown(name.into())),
        }
    }
}

fn check_width(o: &Obfuscation, x: &[bool]) -> Result<(), CandidateError> {
    let n = o.interpreter.shape().n_in;
    if x.len() != n {
        return Err(CandidateError::Width { expected: n, got: x.len() });
    }
    Ok(())
}

fn run_on(o: &Obfuscation, desc: &[bool], x: &[bool]) -> Bits {
    jacobi_eval(o.interpreter.shape(), desc, x)
}

/// `J(ρ ⊗ |x><x|)`, measured.
pub fn interpret(o: &Obfuscation, x: &[bool], rng: &mut impl Rng) -> Result<Bits, CandidateError> {
    check_width(o, x)?;
    Ok(run_on(o, &o.state.sample(rng), x))
}

/// Exact distribution of `J(ρ ⊗ |x><x|)` over output strings.
pub fn output_distribution(o: &Obfuscation, x: &[bool]) -> Result<BasisEnsemble, CandidateError> {
    check_width(o, x)?;
    let parts = o.state.components().iter().map(|(d, w)| (run_on(o, d, x), *w)).collect();
    Ok(BasisEnsemble::from_components(parts)?)
}

/// Runs `J` coherently, measures the output and uncomputes: the returned
/// obfuscation is the post-measurement state of the first register.
pub fn interpret_rec(o: &Obfuscation, x: &[bool], rng: &mut impl Rng) -> Result<(Obfuscation, Bits), CandidateError> {
    check_width(o, x)?;
    let outs: Vec<Bits> = o.state.components().iter().map(|(d, _)| run_on(o, d, x)).collect();
    let joint = BasisEnsemble::from_components(
        o.state.components().iter().zip(&outs).map(|((_, w), y)| (y.clone(), *w)).collect(),
    )?;
    let y = joint.sample(rng);
    let state = o.state.condition(|i| outs[i] == y).expect("sampled outcome has positive weight");
    Ok((Obfuscation { state, ..o.clone() }, y))
}

/// Mean distance between `ρ` and the state [`interpret_rec`] leaves behind,
/// averaged over the measured outcome.
pub fn expected_recovery_distance(o: &Obfuscation, x: &[bool]) -> Result<f64, CandidateError> {
    let dist = output_distribution(o, x)?;
    let mut total = 0.0;
    let outs: Vec<Bits> = o.state.components().iter().map(|(d, _)| run_on(o, d, x)).collect();
    for (y, p) in dist.components() {
        let post = o.state.condition(|i| &outs[i] == y).expect("outcome has positive weight");
        total += p * post.trace_distance(&o.state)?;
    }
    Ok(total)
}
