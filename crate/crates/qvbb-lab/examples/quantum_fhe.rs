//! One-time-pads a quantum state under FHE-encrypted keys, evaluates a
//! circuit with a Hadamard on it, and decrypts.

use qvbb_lab::fhe_core::{keygen, FheParams, RandomTape};
use qvbb_lab::qfhe::{qdec, qenc, qeval, QState};
use qvbb_lab::qsim::{trace_distance, DensityMatrix, Op, QuantumCircuit};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let c = QuantumCircuit::new(2, vec![Op::H(0), Op::Cnot(0, 1)]).unwrap();
    let keys = keygen(FheParams::new(6, c.sealed_depth()), &RandomTape::random(6, &mut rng));

    let input = DensityMatrix::from_bits(&[false, false]).unwrap();
    let ct = qenc(&keys.pk, QState::Dense(input.clone()), &mut rng);
    let out = qeval(&keys.pk, &c, ct, &mut rng).unwrap();
    let plain = qdec(&keys.sk, &out).unwrap().to_dense().unwrap();
    let expected = c.run(&input).unwrap();
    println!("Bell pair under encryption, distance to the plain run: {:.2e}", trace_distance(&plain, &expected).unwrap());
}
