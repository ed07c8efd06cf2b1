use super::*;
use crate::cc_obf::eval_obf;
use crate::fhe_core::dec;
use crate::prf::stream_rng;
use crate::stats::{chi2_critical, chi2_uniform};

const L: usize = 6;

fn member(kind: MemberKind, d: usize, path: BlockPath, seed: u64) -> FamilyMember {
    let mut rng = stream_rng(seed, "families", &[]);
    let alpha = bits::random_nonzero(&mut rng, L);
    let r = RandomTape::random(L, &mut rng);
    let rp = RandomTape::random(L, &mut rng);
    let s = sample_d_r(L, &alpha, d, &r, &mut rng);
    build_member(kind, L, &alpha, &s.beta, d, &r, &rp, s.aux, path)
}

#[test]
fn sampled_aux_decrypts_and_locks_beta() {
    let mut rng = stream_rng(1, "families", &[]);
    let alpha = bits::from_str01("101101");
    let s = sample_d(L, &alpha, 3, &mut rng);
    assert_eq!(dec(&s.sk, &s.aux.alpha_ct).unwrap(), alpha);
    let as_input = |m: &[bool], rng: &mut _| bits::from_bytes(&serialize_cts(&enc(&s.aux.pk, m, rng)));
    assert_eq!(eval_obf(&s.aux.o, &as_input(&s.beta, &mut rng)).unwrap(), vec![true]);
    let flipped: Bits = s.beta.iter().map(|&v| !v).collect();
    assert_eq!(eval_obf(&s.aux.o, &as_input(&flipped, &mut rng)).unwrap(), vec![false]);
}

#[test]
fn beta_is_uniform_at_fixed_alpha() {
    let mut rng = stream_rng(2, "families", &[]);
    let alpha = bits::from_str01("000111");
    let mut counts = vec![0u64; 63];
    for _ in 0..1000 {
        let s = sample_d(L, &alpha, 0, &mut rng);
        counts[bits::to_u64(&s.beta) as usize - 1] += 1;
    }
    // 62 degrees of freedom, upper 1% point
    assert!(chi2_uniform(&counts) < chi2_critical(62, 2.326_347_874_040_841));
}

#[test]
fn tape_sampler_is_deterministic_and_depth_sized() {
    let alpha = bits::from_str01("110010");
    let r = RandomTape::new(bits::from_str01("011011"));
    let a = sample_d_r(L, &alpha, 4, &r, &mut stream_rng(3, "f", &[]));
    let b = sample_d_r(L, &alpha, 4, &r, &mut stream_rng(3, "f", &[]));
    assert_eq!(a.aux.to_bytes(), b.aux.to_bytes());
    for d in 0..=8 {
        let s = sample_d_r(L, &alpha, d, &r, &mut stream_rng(3, "f", &[]));
        assert_eq!(s.aux.to_bytes().len(), MemberAux::byte_len(L));
        assert_eq!(dec(&keygen(FheParams::new(L, d), &r).sk, &s.aux.alpha_ct).unwrap(), alpha);
    }
}

#[test]
fn table_member_satisfies_the_case_split() {
    for kind in [MemberKind::Point, MemberKind::Zero] {
        let m = member(kind, 11, BlockPath::Table, 4);
        for b in 0..4u8 {
            for x in 0..1u64 << L {
                let x = bits::from_u64(x, L);
                assert_eq!(m.eval(b, &x), m.reference(b, &x), "b={b} x={x:?}");
            }
        }
    }
}

#[test]
fn branch_examples() {
    let m = member(MemberKind::Point, 5, BlockPath::Table, 5);
    let width = payload_len(L);
    let payload = |v: Bits| MemberOutput::Payload([v, vec![false; width - L]].concat());
    assert_eq!(MemberOutput::decode(&m.eval(2, &m.alpha)), payload(m.beta.clone()));
    let mut other = m.alpha.clone();
    other[0] ^= true;
    assert_eq!(MemberOutput::decode(&m.eval(2, &other)), payload(vec![false; L]));
    assert_eq!(MemberOutput::decode(&m.eval(1, &bits::from_u64(6, L))), MemberOutput::Bottom);
    assert_eq!(MemberOutput::decode(&m.eval(3, &other)), MemberOutput::Bottom);
    let b5 = m.eval(1, &bits::from_u64(5, L));
    assert_eq!(bits::to_bytes(&b5[1..1 + 8 * block_len(L, 1)]), block_bytes(L, m.r.value(), 5));
    let z = member(MemberKind::Zero, 5, BlockPath::Table, 6);
    let mut rng = stream_rng(7, "families", &[]);
    for _ in 0..50 {
        let x = bits::random(&mut rng, L);
        assert_eq!(MemberOutput::decode(&z.eval(2, &x)), payload(vec![false; L]));
    }
    let aux0 = m.eval(0, &bits::from_u64(0, L));
    for x in 1..1u64 << L {
        assert_eq!(m.eval(0, &bits::from_u64(x, L)), aux0);
    }
}

#[test]
fn circuit_path_matches_table_path() {
    let t = member(MemberKind::Point, 9, BlockPath::Table, 8);
    let c = member(MemberKind::Point, 9, BlockPath::Circuit, 8);
    for b in 0..4u8 {
        for x in 0..1u64 << L {
            let x = bits::from_u64(x, L);
            assert_eq!(bits::to_bytes(&t.eval(b, &x)), bits::to_bytes(&c.eval(b, &x)));
        }
    }
}

#[test]
fn circuit_path_size_ignores_depth() {
    let sizes: Vec<(usize, usize)> = [1, 4, 8, 16]
        .iter()
        .map(|&d| {
            let m = member(MemberKind::Zero, d, BlockPath::Circuit, 9);
            (m.circuit.gates().len(), m.circuit.depth())
        })
        .collect();
    let (g0, d0) = sizes[0];
    assert!(sizes.iter().all(|&(g, d)| g.abs_diff(g0) * 50 < g0 && d.abs_diff(d0) <= 2), "{sizes:?}");
}

#[test]
fn serialization_roundtrip_and_redaction() {
    let m = member(MemberKind::Zero, 2, BlockPath::Table, 10);
    let (kind, lambda, d, c) = parse_member(&m.serialize(false)).unwrap();
    assert_eq!((kind, lambda, d, &c), (MemberKind::Zero, L, Some(2), &m.circuit));
    assert_eq!(parse_member(&m.serialize(true)).unwrap().2, None);
    assert!(parse_member("nonsense\n").is_err());
}

#[test]
fn aux_pair_for_point_and_zero() {
    let mut rng = stream_rng(11, "families", &[]);
    let alpha = bits::from_str01("010011");
    let s = sample_d(L, &alpha, 1, &mut rng);
    let (spec, aux) = build_aux_member_v4(MemberKind::Point, &alpha, &s.beta, s.aux.clone());
    assert_eq!(aux, s.aux);
    let c = aux_member_circuit(&spec);
    assert_eq!(c.eval(&alpha).unwrap(), s.beta);
    let (z, _) = build_aux_member_v4(MemberKind::Zero, &alpha, &s.beta, s.aux);
    assert_eq!(aux_member_circuit(&z).eval(&alpha).unwrap(), vec![false; L]);
    let back = MemberAux::from_bytes(L, &aux.member_aux().to_bytes()).unwrap();
    assert_eq!(back, aux.member_aux());
}
