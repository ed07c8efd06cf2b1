//! Encrypts, evaluates a circuit under encryption, decrypts, and shows the
//! depth budget being enforced.

use qvbb_lab::bits;
use qvbb_lab::circuit_ir::{build_function, FunctionSpec};
use qvbb_lab::fhe_core::{dec, enc, eval, keygen, FheParams, RandomTape};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let c = build_function(&FunctionSpec::point(&bits::from_str01("110")));
    let d = c.depth();
    let keys = keygen(FheParams::new(6, d), &RandomTape::random(6, &mut rng));
    println!("public key: {} bytes for depth {d}", keys.pk.bytes().len());

    for x in ["110", "010"] {
        let cts = enc(&keys.pk, &bits::from_str01(x), &mut rng);
        let out = eval(&keys.pk, &c, &cts).unwrap();
        println!("Dec(Eval(point, Enc({x}))) = {}", bits::to_str01(&dec(&keys.sk, &out).unwrap()));
    }

    let shallow = keygen(FheParams::new(6, d - 1), &RandomTape::random(6, &mut rng));
    let cts = enc(&shallow.pk, &bits::from_str01("110"), &mut rng);
    println!("one level short: {}", eval(&shallow.pk, &c, &cts).unwrap_err());
}
