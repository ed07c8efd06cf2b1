//! Black-box simulators that see only the member oracle and the auxiliary
//! input, and the measure-a-random-query extractor used to bound them.

use super::{compose_adapters, ComposedMember, MemberOracle, OracleError, OracleHandle};
use crate::bits::{self, Bits};
use crate::circuit_ir::{build_function, FunctionSpec};
use crate::families::{sample_d, AuxInfo, MemberOutput};
use crate::prf;
use crate::stats::{wilson_interval, Z_95};
use clap::ValueEnum;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    /// Ignores everything and flips a coin.
    RandomGuess,
    /// Queries consecutive points from a random start until the budget runs out.
    ExhaustiveProbe,
    /// Queries points derived from the bytes of `Enc(α)`.
    AuxReplay,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::RandomGuess, Baseline::ExhaustiveProbe, Baseline::AuxReplay];

    pub fn name(&self) -> &'static str {
        match self {
            Baseline::RandomGuess => "random-guess",
            Baseline::ExhaustiveProbe => "exhaustive-probe",
            Baseline::AuxReplay => "aux-replay",
        }
    }
}

fn probe(oracle: &mut dyn MemberOracle, x: &[bool]) -> Result<bool, OracleError> {
    Ok(match MemberOutput::decode(&oracle.query_member(2, x)?) {
        MemberOutput::Payload(p) => p.iter().any(|&v| v),
        MemberOutput::Bottom => false,
    })
}

/// Runs one simulator; 1 means "this is a POINT member". Every strategy
/// answers 1 only after seeing a nonzero point-branch output.
pub fn run_baseline(
    which: Baseline,
    oracle: &mut dyn MemberOracle,
    aux: &AuxInfo,
    budget: usize,
    rng: &mut impl Rng,
) -> Result<bool, OracleError> {
    let lambda = oracle.lambda();
    match which {
        Baseline::RandomGuess => Ok(rng.gen()),
        Baseline::ExhaustiveProbe => {
            let start = rng.gen_range(0..1u64 << lambda);
            for k in 0..budget.min(1 << lambda) as u64 {
                if probe(oracle, &bits::from_u64((start + k) % (1 << lambda), lambda))? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Baseline::AuxReplay => {
            let ct: Vec<u8> = aux.alpha_ct.iter().flat_map(|c| c.to_bytes()).collect();
            let salt: u64 = rng.gen();
            for k in 0..budget as u64 {
                let h = prf::expand(&ct, "aux-replay", &[salt.to_be_bytes(), k.to_be_bytes()].concat(), 8);
                let x = bits::from_u64(u64::from_be_bytes(h.try_into().unwrap()), lambda);
                if probe(oracle, &x)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

/// Outcome of one simulator against both members of a sampled pair.
#[derive(Debug, Clone, PartialEq, Eq)]
struct TrialOutcome {
    point: bool,
    zero: bool,
    /// The simulator found `α` in its POINT run.
    hit: bool,
    /// The extractor's guess equals `α`.
    extracted: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SimReport {
    pub baseline: Baseline,
    pub lambda: usize,
    pub budget: usize,
    pub trials: usize,
    pub seed: u64,
    pub point_ones: usize,
    pub zero_ones: usize,
    pub advantage: f64,
    /// One standard error of the advantage estimate.
    pub advantage_sigma: f64,
    pub hits: usize,
    pub extractor_hits: usize,
    pub extractor_ci: (f64, f64),
    /// `2·d′·sqrt(upper extractor bound)` with `d′` the query budget
    /// (the baselines query sequentially, so depth equals count).
    pub o2h_bound: f64,
    pub o2h_holds: bool,
}

fn member_pair(lambda: usize, alpha: &[bool], beta: &[bool]) -> (OracleHandle, OracleHandle) {
    let point = build_function(&FunctionSpec::multibit_point(alpha, beta));
    let zero = build_function(&FunctionSpec::zero(lambda));
    (OracleHandle::classical_only(point), OracleHandle::classical_only(zero))
}

fn trial(which: Baseline, lambda: usize, budget: usize, seed: u64, t: u64) -> Result<TrialOutcome, OracleError> {
    let mut setup = prf::stream_rng(seed, "sim-setup", &[t]);
    let alpha = bits::random_nonzero(&mut setup, lambda);
    let s = sample_d(lambda, &alpha, 1, &mut setup);
    let (p, z) = member_pair(lambda, &alpha, &s.beta);
    let sim_seed = t.to_be_bytes();
    let mut on_point = compose_adapters(lambda, p, &s.aux, &sim_seed)?;
    let mut on_zero = compose_adapters(lambda, z, &s.aux, &sim_seed)?;
    // the same simulator coins for both runs
    let point = run_baseline(which, &mut on_point, &s.aux, budget, &mut prf::stream_rng(seed, "sim-coins", &[t]))?;
    let zero = run_baseline(which, &mut on_zero, &s.aux, budget, &mut prf::stream_rng(seed, "sim-coins", &[t]))?;
    let hit = found(&on_point, &alpha);
    let k = setup.gen_range(0..budget.max(1));
    let extracted = extract(&on_zero, k).is_some_and(|x| x == alpha);
    Ok(TrialOutcome { point, zero, hit, extracted })
}

fn found(m: &ComposedMember, alpha: &[bool]) -> bool {
    let target = bits::to_str01(alpha);
    m.point().transcript().iter().any(|e| e.input.as_deref() == Some(target.as_str()))
}

/// The extractor's guess: the input of the `k`-th point-oracle query the
/// simulator made against the zero oracle, if it made that many.
pub fn extract(on_zero: &ComposedMember, k: usize) -> Option<Bits> {
    on_zero.point().transcript().get(k).and_then(|e| e.input.as_deref()).map(bits::from_str01)
}

/// `trials` independent pairs `(POINT, ZERO)` sharing `α`, `β` and aux.
pub fn simulator_experiment(which: Baseline, lambda: usize, budget: usize, trials: usize, seed: u64) -> Result<SimReport, OracleError> {
    let outcomes: Vec<TrialOutcome> =
        (0..trials as u64).into_par_iter().map(|t| trial(which, lambda, budget, seed, t)).collect::<Result<_, _>>()?;
    let n = trials.max(1) as f64;
    let point_ones = outcomes.iter().filter(|o| o.point).count();
    let zero_ones = outcomes.iter().filter(|o| o.zero).count();
    let diffs: Vec<f64> = outcomes.iter().map(|o| o.point as u8 as f64 - o.zero as u8 as f64).collect();
    let (advantage, sd) = crate::stats::mean_std(&diffs);
    let advantage_sigma = sd / n.sqrt();
    let extractor_hits = outcomes.iter().filter(|o| o.extracted).count();
    let extractor_ci = wilson_interval(extractor_hits as u64, trials as u64, Z_95);
    let o2h_bound = 2.0 * budget as f64 * extractor_ci.1.sqrt();
    Ok(SimReport {
        baseline: which,
        lambda,
        budget,
        trials,
        seed,
        point_ones,
        zero_ones,
        advantage,
        advantage_sigma,
        hits: outcomes.iter().filter(|o| o.hit).count(),
        extractor_hits,
        extractor_ci,
        o2h_bound,
        o2h_holds: advantage - 3.0 * advantage_sigma <= o2h_bound,
    })
}
