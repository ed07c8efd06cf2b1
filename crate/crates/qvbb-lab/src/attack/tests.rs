use super::*;
use crate::candidates::{BasisCandidate, NoisyCandidate};

const L: usize = 6;

fn cfg(kind: AttackKind, candidate: &str, trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig { kind, candidate: candidate.into(), trials, lambda: L, seed, d: None }
}

struct Fixture {
    point: Obfuscation,
    zero: Obfuscation,
    sk_bytes: Vec<u8>,
    pk_bytes: Vec<u8>,
}

fn noaux_fixture(cand: &dyn Candidate, d_offset: usize, seed: u64) -> Fixture {
    let c = cfg(AttackKind::Noaux, "basis", 1, seed);
    let (q, _) = depths(&c);
    let d = q - d_offset;
    let mut rng = stream_rng(seed, "attack-tests", &[]);
    let alpha = bits::random_nonzero(&mut rng, L);
    let r = RandomTape::random(L, &mut rng);
    let s = sample_d_r(L, &alpha, d, &r, &mut rng);
    let member = |kind| build_member(kind, L, &alpha, &s.beta, d, &r, &r, s.aux.clone(), BlockPath::Table);
    let pk = crate::fhe_core::keygen(crate::fhe_core::FheParams::new(L, d), &r).pk;
    Fixture {
        point: cand.obfuscate(&member(MemberKind::Point).circuit, 1).unwrap(),
        zero: cand.obfuscate(&member(MemberKind::Zero).circuit, 2).unwrap(),
        sk_bytes: s.sk.to_bytes(),
        pk_bytes: pk.bytes().to_vec(),
    }
}

#[test]
fn noaux_distinguishes_and_orders_qeval_last() {
    let f = noaux_fixture(&BasisCandidate, 0, 1);
    let mut rng = stream_rng(1, "attack-run", &[]);
    let (bp, tp) = attack_noaux_traced(&f.point, &mut rng);
    let (bz, tz) = attack_noaux_traced(&f.zero, &mut rng);
    assert!(bp, "{:?}", tp.diagnostic);
    assert!(!bz);
    let q = f.point.interpreter.q();
    for t in [&tp, &tz] {
        assert_eq!(t.count(Event::InterpretRec), q + 2);
        assert!(t.qeval_last());
        assert!(t.rho_reuse_distance <= 1e-9);
    }
}

#[test]
fn noaux_short_key_stops_at_bottom() {
    let f = noaux_fixture(&BasisCandidate, 1, 2);
    let mut rng = stream_rng(2, "attack-run", &[]);
    for o in [&f.point, &f.zero] {
        let (b, t) = attack_noaux_traced(o, &mut rng);
        assert!(!b);
        assert!(t.bottom);
        assert_eq!(t.count(Event::Qeval), 0);
    }
}

#[test]
fn noisy_reuse_stays_within_iterated_bound() {
    let noisy = NoisyCandidate::default();
    let f = noaux_fixture(&noisy, 0, 3);
    let mut rng = stream_rng(3, "attack-run", &[]);
    let (_, t) = attack_noaux_traced(&f.point, &mut rng);
    let k = f.point.interpreter.q();
    assert!(t.rho_reuse_distance <= (k + 2) as f64 * 2.0 * noisy.epsilon.sqrt() + 1e-6);
}

#[test]
fn attacks_never_see_the_secret_key() {
    // the only inputs are the obfuscation and public aux; neither carries sk
    let f = noaux_fixture(&BasisCandidate, 0, 4);
    let desc = bits::to_bytes(f.point.state.components()[0].0.as_slice());
    let contains = |hay: &[u8], needle: &[u8]| hay.windows(needle.len()).any(|w| w == needle);
    assert!(!contains(&desc, &f.sk_bytes));
    assert!(!contains(&f.pk_bytes, &f.sk_bytes));
    let mut rng = stream_rng(4, "attack-tests", &[]);
    let s = sample_d(L, &bits::random_nonzero(&mut rng, L), 3, &mut rng);
    let aux_bytes = [s.aux.pk.bytes().to_vec(), s.aux.member_aux().to_bytes()].concat();
    assert!(!contains(&aux_bytes, &s.sk.to_bytes()));
}

#[test]
fn aux_attack_examples_and_wrong_key() {
    let c = cfg(AttackKind::Aux, "basis", 1, 5);
    let (q, d) = depths(&c);
    assert_eq!(q, d);
    let mut rng = stream_rng(5, "attack-tests", &[]);
    let alpha = bits::random_nonzero(&mut rng, L);
    let s = sample_d(L, &alpha, d, &mut rng);
    let point = BasisCandidate.obfuscate(&build_function(&FunctionSpec::multibit_point(&alpha, &s.beta)), 0).unwrap();
    let zero = BasisCandidate.obfuscate(&build_function(&FunctionSpec::zero(L)), 0).unwrap();
    assert!(attack_aux(&point, &s.aux, &mut rng));
    assert!(!attack_aux(&zero, &s.aux, &mut rng));
    let other = sample_d(L, &alpha, d, &mut rng);
    let wrong = AuxInfo { pk: other.aux.pk, ..s.aux.clone() };
    let (b, t) = attack_aux_traced(&point, &wrong, &mut rng);
    assert!(!b);
    assert!(t.diagnostic.is_some());
    let shallow = sample_d(L, &alpha, q - 1, &mut rng);
    let (b, t) = attack_aux_traced(&point, &shallow.aux, &mut rng);
    assert!(!b && t.diagnostic.unwrap().contains("depth"));
}

#[test]
fn member_blocks_match_the_key_chain() {
    let f = noaux_fixture(&BasisCandidate, 0, 6);
    let mut rng = stream_rng(6, "attack-tests", &[]);
    let (_, y) = interpret_rec(&f.point, &member_input(1, &bits::from_u64(0, L)), &mut rng).unwrap();
    let got = payload_bytes(&y, block_len(L, 0)).unwrap();
    assert_eq!(&got[..], &f.pk_bytes[..block_len(L, 0)]);
}

#[test]
fn experiment_rejects_bad_configs_and_is_deterministic() {
    let b = BasisCandidate;
    assert!(matches!(run_experiment(&cfg(AttackKind::Aux, "basis", 0, 0), &b), Err(ExperimentError::NoTrials)));
    let mut c = cfg(AttackKind::Noaux, "basis", 1, 0);
    c.d = Some(64);
    assert!(matches!(run_experiment(&c, &b), Err(ExperimentError::Depth { .. })));
    let a = run_experiment(&cfg(AttackKind::Aux, "basis", 4, 9), &b).unwrap();
    let again = run_experiment(&cfg(AttackKind::Aux, "basis", 4, 9), &b).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&again).unwrap());
    assert_eq!((a.point_ones, a.zero_ones, a.order_violations), (4, 0, 0));
}
