//! The two distinguishers and the harness that measures them.
//!
//! Both attacks read the obfuscation only through the candidate's public
//! interpreter. The auxiliary-input attack runs `J` homomorphically on
//! `Enc(ρ) ⊗ Enc(α)` and feeds the result to the compute-and-compare
//! program. The attack without auxiliary input first pulls `(Enc(α), o)`
//! and every key block out of the obfuscated member, recovering `ρ` after
//! each run, and only then spends `ρ` on the homomorphic evaluation.

use crate::bits::{self, Bits};
use crate::candidates::{interpret_rec, Candidate, CandidateError, InterpreterShape, Obfuscation};
use crate::cc_obf::{eval_obf, CcObfuscation};
use crate::circuit_ir::{build_function, FunctionSpec};
use crate::families::{build_member, member_input, member_io, sample_d, sample_d_r, AuxInfo, BlockPath, MemberAux, MemberKind, MemberOutput};
use crate::fhe_core::chain::block_len;
use crate::fhe_core::{enc, serialize_cts, Ciphertext, PublicKey, RandomTape, MIN_LAMBDA};
use crate::pk_decompose::{assemble, KeyBlock};
use crate::prf::stream_rng;
use crate::qfhe::{demote_classical, measure, promote, qenc, qeval_program, QState};
use crate::stats::{wilson_interval, Z_95};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::Range;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Empirical stand-in for a negligible error at desk scale.
pub const DELTA: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    Aux,
    Noaux,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Aux => "aux",
            AttackKind::Noaux => "noaux",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Event {
    InterpretRec,
    Qeval,
}

/// What an attack run did, in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trace {
    pub events: Vec<Event>,
    /// Distance between `ρ` as received and as left after the last recovery.
    pub rho_reuse_distance: f64,
    /// The member answered `⊥` while key blocks were being collected.
    pub bottom: bool,
    pub diagnostic: Option<String>,
    #[serde(skip)]
    pub timings: StageTimes,
}

/// Wall time spent per attack stage; never serialized.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub interpret_rec: Duration,
    pub assemble: Duration,
    pub qeval: Duration,
}

impl Trace {
    pub fn count(&self, e: Event) -> usize {
        self.events.iter().filter(|&&x| x == e).count()
    }

    /// `qeval` ran exactly once and nothing touched `ρ` afterwards.
    pub fn qeval_last(&self) -> bool {
        self.count(Event::Qeval) == 1 && self.events.last() == Some(&Event::Qeval)
    }
}

#[derive(Debug, Error)]
enum Abort {
    #[error("{0}")]
    Msg(String),
    #[error("member returned bottom")]
    Bottom,
}

macro_rules! abort_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Abort {
            fn from(e: $t) -> Abort {
                Abort::Msg(e.to_string())
            }
        }
    )*};
}
abort_from!(
    CandidateError,
    crate::families::FamilyError,
    crate::pk_decompose::DecomposeError,
    crate::qfhe::QfheError,
    crate::cc_obf::CcError
);

fn payload_bytes(y: &[bool], len: usize) -> Result<Vec<u8>, Abort> {
    match MemberOutput::decode(y) {
        MemberOutput::Bottom => Err(Abort::Bottom),
        MemberOutput::Payload(p) if p.len() >= 8 * len => Ok(bits::to_bytes(&p[..8 * len])),
        MemberOutput::Payload(_) => Err(Abort::Msg("payload too short".into())),
    }
}

/// `qeval(pk, J, Enc(ρ) ⊗ promoted registers)`, measured and demoted; the
/// ciphertexts in `take` go to `o`.
fn evaluate_and_check(
    pk: &PublicKey,
    rho: &Obfuscation,
    registers: &[&[Ciphertext]],
    take: Range<usize>,
    o: &CcObfuscation,
    trace: &mut Trace,
    rng: &mut impl Rng,
) -> Result<bool, Abort> {
    let mut qc = qenc(pk, QState::Ensemble(rho.state.clone()), rng);
    for cts in registers {
        qc = qc.tensor(promote(pk, cts, rng))?;
    }
    trace.events.push(Event::Qeval);
    let start = Instant::now();
    let out = qeval_program(pk, &rho.interpreter, qc, rng)?;
    let cts = demote_classical(pk, &measure(out, rng))?;
    trace.timings.qeval += start.elapsed();
    if cts.len() < take.end {
        return Err(Abort::Msg("output register too narrow".into()));
    }
    let x = bits::from_bytes(&serialize_cts(&cts[take]));
    Ok(eval_obf(o, &x)? == [true])
}

fn finish(r: Result<bool, Abort>, mut trace: Trace) -> (bool, Trace) {
    match r {
        Ok(b) => (b, trace),
        Err(e) => {
            if matches!(e, Abort::Bottom) {
                trace.bottom = true;
            }
            trace.diagnostic = Some(e.to_string());
            (false, trace)
        }
    }
}

/// Distinguisher with auxiliary input `(pk, Enc(α), o)`.
pub fn attack_aux(rho: &Obfuscation, aux: &AuxInfo, rng: &mut impl Rng) -> bool {
    attack_aux_traced(rho, aux, rng).0
}

pub fn attack_aux_traced(rho: &Obfuscation, aux: &AuxInfo, rng: &mut impl Rng) -> (bool, Trace) {
    let mut trace = Trace::default();
    let n = rho.interpreter.shape().n_out;
    let r = evaluate_and_check(&aux.pk, rho, &[&aux.alpha_ct], 0..n, &aux.o, &mut trace, rng);
    finish(r, trace)
}

/// Distinguisher without auxiliary input, against obfuscated members.
pub fn attack_noaux(rho: &Obfuscation, rng: &mut impl Rng) -> bool {
    attack_noaux_traced(rho, rng).0
}

pub fn attack_noaux_traced(rho: &Obfuscation, rng: &mut impl Rng) -> (bool, Trace) {
    let mut trace = Trace::default();
    let r = noaux_steps(rho, &mut trace, rng);
    finish(r, trace)
}

fn noaux_steps(rho: &Obfuscation, trace: &mut Trace, rng: &mut impl Rng) -> Result<bool, Abort> {
    let shape = *rho.interpreter.shape();
    let lambda = shape.n_in.checked_sub(2).filter(|&l| l >= MIN_LAMBDA).ok_or(Abort::Msg("not a member-shaped obfuscation".into()))?;
    let q = rho.interpreter.q();
    if q >= 1 << lambda {
        return Err(Abort::Msg(format!("interpreter depth {q} exceeds the block index range")));
    }
    let mut cur = rho.clone();
    let run = |cur: &mut Obfuscation, b: u8, x: u64, trace: &mut Trace, rng: &mut _| -> Result<Bits, Abort> {
        let start = Instant::now();
        let (next, y) = interpret_rec(cur, &member_input(b, &bits::from_u64(x, lambda)), rng)?;
        trace.timings.interpret_rec += start.elapsed();
        trace.events.push(Event::InterpretRec);
        *cur = next;
        Ok(y)
    };

    let y = run(&mut cur, 0, 0, trace, rng)?;
    let aux = MemberAux::from_bytes(lambda, &payload_bytes(&y, MemberAux::byte_len(lambda))?)?;

    let mut blocks = Vec::with_capacity(q + 1);
    for i in 0..=q {
        let y = run(&mut cur, 1, i as u64, trace, rng);
        let bytes = y.and_then(|y| payload_bytes(&y, block_len(lambda, i)));
        if i == q || bytes.is_err() {
            trace.rho_reuse_distance = cur.state.trace_distance(&rho.state).unwrap_or(1.0);
        }
        blocks.push(KeyBlock::from_bytes(&bytes?).ok_or(Abort::Msg(format!("block {i} does not parse")))?);
    }
    let start = Instant::now();
    let pk = assemble(lambda, &blocks)?;
    trace.timings.assemble += start.elapsed();

    let choice = enc(&pk, &[false, true], rng);
    evaluate_and_check(&pk, &cur, &[&choice, &aux.alpha_ct], 1..1 + lambda, &aux.o, trace, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: AttackKind,
    pub candidate: String,
    pub trials: usize,
    pub lambda: usize,
    pub seed: u64,
    /// Key depth; the interpreter's `q` when absent.
    pub d: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: AttackKind,
    pub candidate: String,
    pub lambda: usize,
    pub trials: usize,
    pub seed: u64,
    pub d: usize,
    pub q: usize,
    pub point_ones: usize,
    pub zero_ones: usize,
    pub p_point: f64,
    pub p_zero: f64,
    pub ci_point: (f64, f64),
    pub ci_zero: (f64, f64),
    pub advantage: f64,
    /// Runs that stopped on a `⊥` answer.
    pub bottoms: usize,
    /// Runs where `qeval` was not the single, final use of `ρ`.
    pub order_violations: usize,
    pub max_rho_reuse_distance: f64,
    /// Not part of the serialized report, which must be reproducible.
    #[serde(skip)]
    pub wall_time_s: f64,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("lambda must be between {MIN_LAMBDA} and 16, got {0}")]
    Lambda(usize),
    #[error("key depth {d} does not fit a {lambda}-bit block index")]
    Depth { d: usize, lambda: usize },
    #[error(transparent)]
    Candidate(#[from] CandidateError),
}

#[derive(Debug, Clone, Default)]
struct TrialOutcome {
    point: bool,
    zero: bool,
    bottoms: usize,
    order_violations: usize,
    rho_distance: f64,
}

/// `(q, d)` for an experiment.
pub fn depths(cfg: &ExperimentConfig) -> (usize, usize) {
    let (n_in, n_out) = match cfg.kind {
        AttackKind::Aux => (cfg.lambda, cfg.lambda),
        AttackKind::Noaux => member_io(cfg.lambda),
    };
    let q = InterpreterShape::for_io(n_in, n_out).q();
    (q, cfg.d.unwrap_or(q))
}

fn outcome(traces: [(bool, Trace); 2]) -> TrialOutcome {
    let [(point, tp), (zero, tz)] = traces;
    let bad_order = |t: &Trace| !t.bottom && t.diagnostic.is_none() && !t.qeval_last();
    TrialOutcome {
        point,
        zero,
        bottoms: tp.bottom as usize + tz.bottom as usize,
        order_violations: bad_order(&tp) as usize + bad_order(&tz) as usize,
        rho_distance: tp.rho_reuse_distance.max(tz.rho_reuse_distance),
    }
}

fn aux_trial(cfg: &ExperimentConfig, cand: &dyn Candidate, d: usize, t: u64) -> Result<TrialOutcome, ExperimentError> {
    let mut rng = stream_rng(cfg.seed, "attack-trial", &[t]);
    let l = cfg.lambda;
    let alpha = bits::random_nonzero(&mut rng, l);
    let s = sample_d(l, &alpha, d, &mut rng);
    let point = cand.obfuscate(&build_function(&FunctionSpec::multibit_point(&alpha, &s.beta)), rng.gen())?;
    let zero = cand.obfuscate(&build_function(&FunctionSpec::zero(l)), rng.gen())?;
    let tp = attack_aux_traced(&point, &s.aux, &mut rng);
    let tz = attack_aux_traced(&zero, &s.aux, &mut rng);
    Ok(outcome([tp, tz]))
}

fn noaux_trial(cfg: &ExperimentConfig, cand: &dyn Candidate, d: usize, t: u64) -> Result<TrialOutcome, ExperimentError> {
    let mut rng = stream_rng(cfg.seed, "attack-trial", &[t]);
    let l = cfg.lambda;
    let alpha = bits::random_nonzero(&mut rng, l);
    let r = RandomTape::random(l, &mut rng);
    let r_prime = RandomTape::random(l, &mut rng);
    let s = sample_d_r(l, &alpha, d, &r, &mut rng);
    let member = |kind| build_member(kind, l, &alpha, &s.beta, d, &r, &r_prime, s.aux.clone(), BlockPath::Table);
    let point = cand.obfuscate(&member(MemberKind::Point).circuit, rng.gen())?;
    let zero = cand.obfuscate(&member(MemberKind::Zero).circuit, rng.gen())?;
    let tp = attack_noaux_traced(&point, &mut rng);
    let tz = attack_noaux_traced(&zero, &mut rng);
    Ok(outcome([tp, tz]))
}

/// Runs `trials` independent trials, each on a fresh POINT and ZERO pair.
/// Trial `t` draws everything from its own stream, so the report does not
/// depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig, cand: &dyn Candidate) -> Result<Report, ExperimentError> {
    if cfg.trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    if !(MIN_LAMBDA..=16).contains(&cfg.lambda) {
        return Err(ExperimentError::Lambda(cfg.lambda));
    }
    let (q, d) = depths(cfg);
    if cfg.kind == AttackKind::Noaux && d >= 1 << cfg.lambda {
        return Err(ExperimentError::Depth { d, lambda: cfg.lambda });
    }
    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| match cfg.kind {
            AttackKind::Aux => aux_trial(cfg, cand, d, t),
            AttackKind::Noaux => noaux_trial(cfg, cand, d, t),
        })
        .collect::<Result<_, _>>()?;
    let n = cfg.trials;
    let point_ones = outcomes.iter().filter(|o| o.point).count();
    let zero_ones = outcomes.iter().filter(|o| o.zero).count();
    let (p_point, p_zero) = (point_ones as f64 / n as f64, zero_ones as f64 / n as f64);
    Ok(Report {
        kind: cfg.kind,
        candidate: cand.name(),
        lambda: cfg.lambda,
        trials: n,
        seed: cfg.seed,
        d,
        q,
        point_ones,
        zero_ones,
        p_point,
        p_zero,
        ci_point: wilson_interval(point_ones as u64, n as u64, Z_95),
        ci_zero: wilson_interval(zero_ones as u64, n as u64, Z_95),
        advantage: p_point - p_zero,
        bottoms: outcomes.iter().map(|o| o.bottoms).sum(),
        order_violations: outcomes.iter().map(|o| o.order_violations).sum(),
        max_rho_reuse_distance: outcomes.iter().map(|o| o.rho_distance).fold(0.0, f64::max),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests;
