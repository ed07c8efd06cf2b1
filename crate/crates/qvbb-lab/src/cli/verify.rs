//! Invariant suites behind `qvbb verify`. Each check returns `Err` with a
//! short reason instead of panicking, so one failure does not hide others.

use crate::bits::{self, Bits};
use crate::candidates::{expected_recovery_distance, interpret_rec, output_distribution, BasisCandidate, Candidate, NoisyCandidate};
use crate::circuit_ir::{build_function, random_circuit, FunctionSpec};
use crate::fhe_core::{dec, enc, keygen, FheError, FheParams, RandomTape};
use crate::garbling;
use crate::oracle_sim::{choice_circuit, ChoiceOracleAdapter, OracleHandle};
use crate::pk_decompose::{assemble, key_blocks, sim_blocks, Strategy};
use crate::prf::stream_rng;
use crate::qfhe::{demote_classical, measure, qdec, qenc, qeval_program, ClassicalProgram, QState, QfheError};
use crate::qsim::corpus::recovery_corpus;
use crate::qsim::StateVector;
use clap::ValueEnum;


#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Recovery,
    Decompose,
    Qfhe,
    Garble,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Recovery, Suite::Decompose, Suite::Qfhe, Suite::Garble, Suite::Oracle];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Recovery => "recovery",
            Suite::Decompose => "decompose",
            Suite::Qfhe => "qfhe",
            Suite::Garble => "garble",
            Suite::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub result: Result<(), String>,
}

fn check(name: impl Into<String>, ok: bool, why: impl FnOnce() -> String) -> Check {
    Check { name: name.into(), result: if ok { Ok(()) } else { Err(why()) } }
}

fn from<E: std::fmt::Display>(name: &str, r: Result<Check, E>) -> Check {
    r.unwrap_or_else(|e| Check { name: name.into(), result: Err(e.to_string()) })
}

/// Runs one suite. `inject_fault` corrupts a key block so the decomposition
/// checks must fail.
pub fn run_suite(suite: Suite, seed: u64, inject_fault: bool) -> Vec<Check> {
    match suite {
        Suite::Recovery => recovery(seed),
        Suite::Decompose => decompose(seed, inject_fault),
        Suite::Qfhe => qfhe(seed),
        Suite::Garble => garble(seed),
        Suite::Oracle => oracle(seed),
    }
}

fn recovery(seed: u64) -> Vec<Check> {
    let mut rng = stream_rng(seed, "verify-recovery", &[]);
    let mut out = Vec::new();
    let cases = recovery_corpus(&mut rng, 50);
    let worst = cases.iter().try_fold(0.0f64, |acc, c| {
        let m = c.measure()?;
        Ok::<_, crate::qsim::QsimError>(acc.max(m.distance - 2.0 * m.eps.sqrt()))
    });
    out.push(from(
        "dense-corpus-within-2sqrt-eps",
        worst.map(|w| check("dense-corpus-within-2sqrt-eps", w <= 1e-6, || format!("excess {w:.3e}"))),
    ));

    let lambda = 6;
    let alpha = bits::random_nonzero(&mut rng, lambda);
    let beta = bits::random_nonzero(&mut rng, lambda);
    let c = build_function(&FunctionSpec::multibit_point(&alpha, &beta));
    let xs: Vec<Bits> = (0..4).map(|_| bits::random(&mut rng, lambda)).chain([alpha.clone()]).collect();
    let basis = BasisCandidate.obfuscate(&c, 0).and_then(|o| {
        let mut cur = o.clone();
        let mut ok = true;
        for x in &xs {
            let (next, y) = interpret_rec(&cur, x, &mut rng)?;
            ok &= y == c.eval(x).unwrap() && next.state == o.state;
            cur = next;
        }
        Ok(check("basis-state-reused-unchanged", ok, || "state or output drifted".into()))
    });
    out.push(from("basis-state-reused-unchanged", basis));

    let noisy = NoisyCandidate::default();
    let bound = 2.0 * noisy.epsilon.sqrt() + 1e-6;
    let r = noisy.obfuscate(&c, seed).and_then(|o| {
        let mut worst_dist = 0.0f64;
        let mut worst_p = 1.0f64;
        for x in &xs {
            worst_dist = worst_dist.max(expected_recovery_distance(&o, x)?);
            worst_p = worst_p.min(output_distribution(&o, x)?.probability(&c.eval(x).unwrap()));
        }
        Ok((worst_dist, worst_p))
    });
    out.push(from(
        "noisy-recovery-within-2sqrt-eps",
        r.as_ref().map(|&(d, _)| check("noisy-recovery-within-2sqrt-eps", d <= bound, || format!("{d:.4} > {bound:.4}"))),
    ));
    out.push(from(
        "noisy-correct-output-probability",
        r.map(|(_, p)| {
            check("noisy-correct-output-probability", p >= 1.0 - noisy.epsilon - 1e-9, || format!("{p:.4}"))
        }),
    ));
    out
}

fn decompose(seed: u64, inject_fault: bool) -> Vec<Check> {
    let lambda = 6;
    let mut out = Vec::new();
    for strategy in [Strategy::Bootstrapped, Strategy::Garbled] {
        for d in 0..=4 {
            let mut rng = stream_rng(seed, "verify-decompose", &[d as u64]);
            let (r, rp) = (RandomTape::random(lambda, &mut rng), RandomTape::random(lambda, &mut rng));
            let pk = keygen(FheParams::new(lambda, d), &r).pk;
            let mut blocks = key_blocks(lambda, d, &r, &rp, strategy);
            if inject_fault {
                let last = blocks.last_mut().unwrap();
                let i = last.body.len() / 2;
                last.body[i] ^= 0x5a;
            }
            let name = format!("{strategy:?}-d{d}-assemble-equals-keygen").to_lowercase();
            out.push(match assemble(lambda, &blocks) {
                Ok(a) => check(&name, a.bytes() == pk.bytes(), || "assembled key differs".into()),
                Err(e) => check(&name, false, || e.to_string()),
            });
            let name = format!("{strategy:?}-d{d}-simulated-blocks-assemble").to_lowercase();
            out.push(from(
                &name,
                sim_blocks(lambda, &pk, strategy, &seed.to_be_bytes())
                    .and_then(|sim| assemble(lambda, &sim))
                    .map(|a| check(&name, a.bytes() == pk.bytes(), || "simulated blocks give another key".into())),
            ));
        }
    }
    out
}

fn qfhe(seed: u64) -> Vec<Check> {
    let lambda = 6;
    let mut rng = stream_rng(seed, "verify-qfhe", &[]);
    let mut out = Vec::new();
    let k = keygen(FheParams::new(lambda, 2), &RandomTape::random(lambda, &mut rng));
    let mut ok = true;
    for _ in 0..20 {
        let x = bits::random(&mut rng, 4);
        ok &= qdec(&k.sk, &qenc(&k.pk, QState::basis(x.clone()), &mut rng)).is_ok_and(|s| s == QState::basis(x));
    }
    out.push(check("qenc-qdec-roundtrip", ok, || "a basis state did not survive".into()));

    let mut mismatches = 0;
    let mut rejected = true;
    for _ in 0..20 {
        let c = random_circuit(&mut rng, 4, 10, 3);
        let d = c.sealed_depth();
        let keys = keygen(FheParams::new(lambda, d), &RandomTape::random(lambda, &mut rng));
        let x = bits::random(&mut rng, 4);
        let got = qeval_program(&keys.pk, &c, qenc(&keys.pk, QState::basis(x.clone()), &mut rng), &mut rng)
            .and_then(|o| demote_classical(&keys.pk, &measure(o, &mut rng)))
            .map_err(|e| e.to_string())
            .and_then(|cts| dec(&keys.sk, &cts).map_err(|e| e.to_string()));
        mismatches += (got != Ok(c.eval(&x).unwrap())) as usize;
        if d > 0 {
            let short = keygen(FheParams::new(lambda, d - 1), &RandomTape::random(lambda, &mut rng));
            let r = qeval_program(&short.pk, &c, qenc(&short.pk, QState::basis(x), &mut rng), &mut rng);
            rejected &= matches!(r, Err(QfheError::Fhe(FheError::DepthExceeded { .. })));
        }
    }
    out.push(check("classical-program-matches-plain-eval", mismatches == 0, || format!("{mismatches} of 20 differ")));
    out.push(check("one-level-short-key-rejected", rejected, || "an over-deep evaluation went through".into()));
    let cts = enc(&k.pk, &[true, false], &mut rng);
    out.push(check("classical-roundtrip", dec(&k.sk, &cts) == Ok(vec![true, false]), || "decryption differs".into()));
    out
}

fn garble(seed: u64) -> Vec<Check> {
    let mut rng = stream_rng(seed, "verify-garble", &[]);
    let mut bad = 0;
    let mut sim_bad = 0;
    for t in 0..20u64 {
        let c = random_circuit(&mut rng, 4, 16, 3);
        let key = t.to_be_bytes();
        let gc = garbling::garble(&c, &key);
        for v in 0..16 {
            let x = bits::from_u64(v, 4);
            let y = garbling::evaluate(&gc, &garbling::encode(&gc, &x)).map(|l| garbling::decode(&gc, &l));
            bad += (y != Ok(c.eval(&x).unwrap())) as usize;
        }
        let target = bits::random(&mut rng, 3);
        let (sgc, inputs) = garbling::simulate(&c, &target, &key);
        let y = garbling::evaluate(&sgc, &inputs).map(|l| garbling::decode(&sgc, &l));
        sim_bad += (y != Ok(target)) as usize;
    }
    let c = random_circuit(&mut rng, 4, 16, 1);
    let gc = garbling::garble(&c, b"wrong-label");
    let mut inputs = garbling::encode(&gc, &[false; 4]);
    inputs[0][0] ^= 1;
    let detected = garbling::evaluate(&gc, &inputs).is_err();
    vec![
        check("garbled-eval-matches-plain-eval", bad == 0, || format!("{bad} of 320 inputs differ")),
        check("simulator-hits-target", sim_bad == 0, || format!("{sim_bad} of 20 missed")),
        check("foreign-label-detected", detected, || "a corrupted label evaluated cleanly".into()),
    ]
}

fn oracle(seed: u64) -> Vec<Check> {
    let mut rng = stream_rng(seed, "verify-oracle", &[]);
    let (n, m) = (2, 2);
    let g = random_circuit(&mut rng, n, 6, m);
    let c = bits::random(&mut rng, m);
    let f = choice_circuit(&g, &c);
    let width = 1 + n + m;
    let wires: Vec<usize> = (0..width).collect();
    let mut direct = OracleHandle::new(f);
    let mut adapter = match ChoiceOracleAdapter::new(OracleHandle::new(g), &c) {
        Ok(a) => a,
        Err(e) => return vec![Check { name: "choice-adapter".into(), result: Err(e.to_string()) }],
    };
    let mut worst = 0.0f64;
    for t in 0..(1usize << width) + 20 {
        let psi = if t < 1 << width { StateVector::basis(width, t).unwrap() } else { StateVector::random(width, &mut rng) };
        let mut want = psi.clone();
        let got = adapter.squery(&psi);
        let r = direct.squery(&mut want, &wires[..1 + n], &wires[1 + n..]);
        worst = match (got, r) {
            (Ok(s), Ok(())) => worst.max(
                s.amplitudes().iter().zip(want.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt(),
            ),
            _ => f64::INFINITY,
        };
    }
    let psi = StateVector::random(width, &mut rng);
    let mut twice = psi.clone();
    let (xs, zs) = (&wires[..1 + n], &wires[1 + n..]);
    let inv = direct.squery(&mut twice, xs, zs).and_then(|_| direct.squery(&mut twice, xs, zs)).is_ok()
        && twice.amplitudes().iter().zip(psi.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-9);
    vec![
        check("choice-adapter-matches-direct-oracle", worst < 1e-9, || format!("distance {worst:.3e}")),
        check("two-g-queries-per-f-query", adapter.g().queries() == 2 * adapter.f_queries(), || {
            format!("{} g for {} f", adapter.g().queries(), adapter.f_queries())
        }),
        check("superposition-query-self-inverse", inv, || "second query did not undo the first".into()),
        check("query-counts-exact", direct.superposition_queries() == (1 << width) + 22, || {
            format!("{} recorded", direct.superposition_queries())
        }),
    ]
}

