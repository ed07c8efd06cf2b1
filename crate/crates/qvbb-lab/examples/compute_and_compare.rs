//! Obfuscates "output z when f(x) = y" and probes it.

use qvbb_lab::bits;
use qvbb_lab::cc_obf::{eval_obf, obf_cc, Capability};
use qvbb_lab::circuit_ir::random_circuit;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    let f = random_circuit(&mut rng, 8, 40, 8);
    let x = bits::from_str01("10110010");
    let y = f.eval(&x).unwrap();
    let z = bits::from_str01("1111");
    let o = obf_cc(Capability::Circuit(f.clone()), &y, Some(&z), 6, &mut rng);
    let hits = (0..256u64).filter(|&v| eval_obf(&o, &bits::from_u64(v, 8)).unwrap() == z).count();
    println!("lock of {} bytes, {} of 256 inputs unlock z", o.lock.len(), hits);
    assert_eq!(eval_obf(&o, &x).unwrap(), z);
}
