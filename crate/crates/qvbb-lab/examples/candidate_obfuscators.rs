//! Obfuscates a point function with the basis and noisy candidates, runs
//! the public interpreter, and measures how much a run disturbs the state.

use qvbb_lab::bits;
use qvbb_lab::candidates::{expected_recovery_distance, interpret, Registry};
use qvbb_lab::circuit_ir::{build_function, FunctionSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(19);
    let alpha = bits::from_str01("011011");
    let c = build_function(&FunctionSpec::multibit_point(&alpha, &bits::from_str01("100001")));
    let registry = Registry::default();
    for name in registry.names() {
        let cand = registry.get(&name).unwrap();
        let o = cand.obfuscate(&c, 23).unwrap();
        let y = interpret(&o, &alpha, &mut rng).unwrap();
        println!(
            "{name:<6} m = {} qubits, q = {}, J(alpha) = {}, recovery distance {:.4}",
            o.m(),
            o.interpreter.q(),
            bits::to_str01(&y),
            expected_recovery_distance(&o, &alpha).unwrap()
        );
    }
}
