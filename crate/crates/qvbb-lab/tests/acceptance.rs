//! Acceptance criteria A1 to A10. Each prints one PASS/FAIL line; the run
//! fails if any criterion does. Pass criterion ids (e.g. `A3 A7`) as
//! arguments to run a subset.

use clap::Parser;
use qvbb_lab::attack::{run_experiment, AttackKind, ExperimentConfig, Report};
use qvbb_lab::bits;
use qvbb_lab::candidates::{BasisCandidate, NoisyCandidate};
use qvbb_lab::circuit_ir::random_circuit;
use qvbb_lab::cli::{run, Cli};
use qvbb_lab::fhe_core::chain::sub_secret_key;
use qvbb_lab::fhe_core::{dec, enc, eval, keygen, FheError, FheParams, RandomTape};
use qvbb_lab::oracle_sim::{choice_circuit, simulator_experiment, Baseline, ChoiceOracleAdapter, OracleHandle};
use qvbb_lab::pk_decompose::{assemble, key_blocks, sim_blocks, Strategy};
use qvbb_lab::prf::stream_rng;
use qvbb_lab::qfhe::{qdec, qenc, qeval, QState, QfheError};
use qvbb_lab::qsim::corpus::{random_circuit as random_quantum_circuit, recovery_corpus};
use qvbb_lab::qsim::{trace_distance, DensityMatrix, StateVector};
use rand::Rng;
use std::time::{Duration, Instant};

const SEED: u64 = 2024;

type Verdict = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn experiment(kind: AttackKind, trials: usize, d: Option<usize>, noisy: bool) -> Report {
    let cfg = ExperimentConfig { kind, candidate: String::new(), trials, lambda: 6, seed: SEED, d };
    if noisy {
        run_experiment(&cfg, &NoisyCandidate { epsilon: 0.05, ..NoisyCandidate::default() })
    } else {
        run_experiment(&cfg, &BasisCandidate)
    }
    .expect("valid experiment")
}

fn summary(r: &Report) -> String {
    format!(
        "POINT {}/{} ZERO {}/{} advantage {:.3} CI_point [{:.3},{:.3}] CI_zero [{:.3},{:.3}] order violations {}",
        r.point_ones, r.trials, r.zero_ones, r.trials, r.advantage, r.ci_point.0, r.ci_point.1, r.ci_zero.0, r.ci_zero.1,
        r.order_violations
    )
}

fn attack_thresholds(kind: AttackKind) -> Verdict {
    let start = Instant::now();
    let r = experiment(kind, 100, None, false);
    let ok = r.p_point >= 0.98
        && r.p_zero <= 0.02
        && r.advantage >= 0.96
        && r.order_violations == 0
        && start.elapsed() <= Duration::from_secs(30 * 60);
    verdict(ok, summary(&r))
}

fn a1() -> Verdict {
    attack_thresholds(AttackKind::Noaux)
}

fn a2() -> Verdict {
    attack_thresholds(AttackKind::Aux)
}

fn a3() -> Verdict {
    let (lambda, budget, trials) = (12, 128, 1000);
    let p = budget as f64 / (1u64 << lambda) as f64;
    let ceiling = p + 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
    let mut ok = true;
    let mut parts = Vec::new();
    for which in Baseline::ALL {
        let r = simulator_experiment(which, lambda, budget, trials, SEED).expect("valid experiment");
        let freq = r.extractor_hits as f64 / trials as f64;
        ok &= r.advantage <= 0.05 && freq <= ceiling && r.o2h_holds;
        parts.push(format!("{} adv {:.3} extract {:.4}", which.name(), r.advantage, freq));
    }
    verdict(ok, format!("{} (extract ceiling {ceiling:.4})", parts.join(", ")))
}

fn a4() -> Verdict {
    let mut rng = stream_rng(SEED, "acceptance-a4", &[]);
    let cases = recovery_corpus(&mut rng, 60);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut ok = cases.len() >= 50;
    for c in &cases {
        let m = c.measure().expect("corpus case measures");
        ok &= (0.0..=0.25).contains(&m.eps) && m.distance <= 2.0 * m.eps.sqrt() + 1e-6;
        if m.eps <= 1e-9 {
            ok &= m.distance <= 1e-9;
        }
        worst = worst.max(m.distance - 2.0 * m.eps.sqrt());
    }
    verdict(ok, format!("{} cases, max(distance - 2sqrt(eps)) = {worst:.3e}", cases.len()))
}

fn a5() -> Verdict {
    let lambda = 6;
    let mut failures = Vec::new();
    for d in 0..=8 {
        let mut rng = stream_rng(SEED, "acceptance-a5", &[d as u64]);
        let (r, rp) = (RandomTape::random(lambda, &mut rng), RandomTape::random(lambda, &mut rng));
        let pk = keygen(FheParams::new(lambda, d), &r).pk;
        for strategy in [Strategy::Bootstrapped, Strategy::Garbled] {
            let blocks = key_blocks(lambda, d, &r, &rp, strategy);
            if assemble(lambda, &blocks).map(|a| a.bytes() == pk.bytes()) != Ok(true) {
                failures.push(format!("{strategy:?} d={d} assemble"));
            }
            if strategy == Strategy::Bootstrapped && sim_blocks(lambda, &pk, strategy, b"a5").as_ref() != Ok(&blocks) {
                failures.push(format!("d={d} simulated blocks"));
            }
        }
        for i in 1..=d {
            let sk = sub_secret_key(lambda, r.value(), i);
            if dec(&sk, &pk.bridge(i)) != Ok(sub_secret_key(lambda, r.value(), i - 1).bits()) {
                failures.push(format!("d={d} bridge {i}"));
            }
        }
    }
    verdict(failures.is_empty(), if failures.is_empty() { "d = 0..=8, both strategies".into() } else { failures.join(", ") })
}

fn a6() -> Verdict {
    let lambda = 6;
    let mut rng = stream_rng(SEED, "acceptance-a6", &[]);
    let (mut wrong, mut accepted_deep) = (0, 0);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let (gates, outs) = (rng.gen_range(4..24), rng.gen_range(1..=3));
        let c = random_circuit(&mut rng, n, gates, outs);
        let d = c.depth();
        let keys = keygen(FheParams::new(lambda, d), &RandomTape::random(lambda, &mut rng));
        let x = bits::random(&mut rng, n);
        let got = eval(&keys.pk, &c, &enc(&keys.pk, &x, &mut rng)).and_then(|cts| dec(&keys.sk, &cts));
        wrong += (got != Ok(c.eval(&x).unwrap())) as usize;
        if d > 0 {
            let short = keygen(FheParams::new(lambda, d - 1), &RandomTape::random(lambda, &mut rng));
            let r = eval(&short.pk, &c, &enc(&short.pk, &x, &mut rng));
            accepted_deep += !matches!(r, Err(FheError::DepthExceeded { .. })) as usize;
        }
    }
    let (mut worst, mut q_deep) = (0.0f64, 0);
    for i in 0..60 {
        let n = 1 + i % 8;
        let qc = random_quantum_circuit(&mut rng, n, 10);
        let d = qc.sealed_depth();
        let keys = keygen(FheParams::new(lambda, d), &RandomTape::random(lambda, &mut rng));
        let rho = DensityMatrix::random(n, 2, &mut rng).unwrap();
        let want = qc.run(&rho).unwrap();
        let out = qeval(&keys.pk, &qc, qenc(&keys.pk, QState::Dense(rho.clone()), &mut rng), &mut rng).unwrap();
        worst = worst.max(trace_distance(&qdec(&keys.sk, &out).unwrap().to_dense().unwrap(), &want).unwrap());
        if d > 0 {
            let short = keygen(FheParams::new(lambda, d - 1), &RandomTape::random(lambda, &mut rng));
            let r = qeval(&short.pk, &qc, qenc(&short.pk, QState::Dense(rho), &mut rng), &mut rng);
            q_deep += !matches!(r, Err(QfheError::Fhe(FheError::DepthExceeded { .. }))) as usize;
        }
    }
    verdict(
        wrong == 0 && accepted_deep == 0 && worst <= 1e-6 && q_deep == 0,
        format!(
            "200 classical pairs: {wrong} wrong, {accepted_deep} over-deep accepted; 60 quantum circuits: max distance {worst:.2e}, {q_deep} over-deep accepted"
        ),
    )
}

fn distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn a7() -> Verdict {
    let mut rng = stream_rng(SEED, "acceptance-a7", &[]);
    let (mut basis_bad, mut worst, mut counts_ok) = (0, 0.0f64, true);
    for n in 1..=2 {
        for m in 1..=3 {
            let g = random_circuit(&mut rng, n, 6, m);
            let c = bits::random(&mut rng, m);
            let width = 1 + n + m;
            let wires: Vec<usize> = (0..width).collect();
            let mut direct = OracleHandle::new(choice_circuit(&g, &c));
            let mut adapter = ChoiceOracleAdapter::new(OracleHandle::new(g), &c).unwrap();
            for v in 0..1usize << width {
                let psi = StateVector::basis(width, v).unwrap();
                let mut want = psi.clone();
                direct.squery(&mut want, &wires[..1 + n], &wires[1 + n..]).unwrap();
                basis_bad += (distance(&adapter.squery(&psi).unwrap(), &want) != 0.0) as usize;
            }
            for v in 0..1u64 << (1 + n) {
                let bx = bits::from_u64(v, 1 + n);
                basis_bad += (adapter.query(&bx).unwrap() != direct.query(&bx).unwrap()) as usize;
            }
            for _ in 0..100 {
                let psi = StateVector::random(width, &mut rng);
                let mut want = psi.clone();
                direct.squery(&mut want, &wires[..1 + n], &wires[1 + n..]).unwrap();
                worst = worst.max(distance(&adapter.squery(&psi).unwrap(), &want));
            }
            counts_ok &= adapter.g().queries() == 2 * adapter.f_queries();
        }
    }
    verdict(
        basis_bad == 0 && worst <= 1e-9 && counts_ok,
        format!("n<=2, m<=3: {basis_bad} basis mismatches, random-state max distance {worst:.2e}, g = 2f: {counts_ok}"),
    )
}

fn a8() -> Verdict {
    let r = experiment(AttackKind::Noaux, 300, None, true);
    verdict(r.advantage >= 0.80, summary(&r))
}

fn a9() -> Verdict {
    let q = experiment(AttackKind::Noaux, 1, None, false).q;
    let r = experiment(AttackKind::Noaux, 100, Some(q - 1), false);
    verdict(
        r.point_ones == 0 && r.zero_ones == 0 && r.bottoms == 2 * r.trials,
        format!("d = {}: {} and {} ones, {} of {} runs stopped at bottom", r.d, r.point_ones, r.zero_ones, r.bottoms, 2 * r.trials),
    )
}

fn a10() -> Verdict {
    let base = std::env::temp_dir().join(format!("qvbb-acceptance-{}", std::process::id()));
    let mut files = Vec::new();
    for k in 0..2 {
        let dir = base.join(k.to_string());
        let cli = Cli::parse_from(["qvbb", "demo-attack", "--trials", "10", "--seed", "7", "--format", "json", "--out", dir.to_str().unwrap()]);
        let mut stdout = Vec::new();
        if !matches!(run(&cli, &mut stdout), Ok(0)) {
            return Err("demo-attack failed".into());
        }
        let json = std::fs::read(dir.join("demo-attack.json")).unwrap();
        let csv = std::fs::read(dir.join("demo-attack.csv")).unwrap();
        files.push((json, csv, stdout));
    }
    std::fs::remove_dir_all(&base).ok();
    verdict(files[0] == files[1], format!("two runs, {} JSON bytes each", files[0].0.len()))
}

fn main() {
    let only: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with('A')).collect();
    let criteria: [(&str, &str, fn() -> Verdict); 10] = [
        ("A1", "attack without aux, basis candidate", a1),
        ("A2", "attack with aux, basis candidate", a2),
        ("A3", "black-box simulators fail", a3),
        ("A4", "input recovery bound", a4),
        ("A5", "decomposable key exactness", a5),
        ("A6", "homomorphic evaluation correctness", a6),
        ("A7", "choice oracle simulation", a7),
        ("A8", "noisy candidate still broken", a8),
        ("A9", "short key stops at bottom", a9),
        ("A10", "demo-attack reproducible", a10),
    ];
    let mut failed = 0;
    for (id, what, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        match v {
            Ok(d) => println!("{id:<3} PASS  {what} ({secs:.1}s): {d}"),
            Err(d) => {
                failed += 1;
                println!("{id:<3} FAIL  {what} ({secs:.1}s): {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
