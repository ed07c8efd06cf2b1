//! Samples a POINT/ZERO pair from the unobfuscatable family and walks
//! through its four branches.

use qvbb_lab::bits;
use qvbb_lab::families::{build_member, sample_d_r, BlockPath, MemberKind, MemberOutput};
use qvbb_lab::fhe_core::RandomTape;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    let (lambda, d) = (6, 8);
    let alpha = bits::random_nonzero(&mut rng, lambda);
    let (r, r_prime) = (RandomTape::random(lambda, &mut rng), RandomTape::random(lambda, &mut rng));
    let s = sample_d_r(lambda, &alpha, d, &r, &mut rng);
    for kind in [MemberKind::Point, MemberKind::Zero] {
        let m = build_member(kind, lambda, &alpha, &s.beta, d, &r, &r_prime, s.aux.clone(), BlockPath::Table);
        println!("{kind:?}: {} gates, depth {}", m.circuit.gates().len(), m.circuit.depth());
        let show = |b: u8, x: &[bool]| match MemberOutput::decode(&m.eval(b, x)) {
            MemberOutput::Bottom => "⊥".to_string(),
            MemberOutput::Payload(p) => format!("{} payload bits, {} set", p.len(), p.iter().filter(|&&v| v).count()),
        };
        println!("  aux branch:      {}", show(0, &[false; 6]));
        println!("  block 3:         {}", show(1, &bits::from_u64(3, lambda)));
        println!("  block d+1:       {}", show(1, &bits::from_u64(d as u64 + 1, lambda)));
        println!("  point at alpha:  {}", show(2, &alpha));
    }
}
