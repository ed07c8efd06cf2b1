//! Garbles a circuit, evaluates it on encoded inputs, and fakes a garbling
//! from the output alone.

use qvbb_lab::bits;
use qvbb_lab::circuit_ir::random_circuit;
use qvbb_lab::garbling::{decode, encode, evaluate, garble, simulate};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let c = random_circuit(&mut rng, 4, 24, 2);
    let gc = garble(&c, b"seed");
    for v in 0..16 {
        let x = bits::from_u64(v, 4);
        let y = decode(&gc, &evaluate(&gc, &encode(&gc, &x)).unwrap());
        assert_eq!(y, c.eval(&x).unwrap());
    }
    println!("garbled evaluation agrees with the plain circuit on all 16 inputs");

    let (fake, inputs) = simulate(&c, &[true, false], b"sim");
    println!("simulated garbling decodes to {:?}", decode(&fake, &evaluate(&fake, &inputs).unwrap()));
}
