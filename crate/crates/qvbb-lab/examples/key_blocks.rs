//! Splits a public key into blocks that a small circuit can produce one at
//! a time, reassembles it, and rebuilds the blocks from the key alone.

use qvbb_lab::fhe_core::{keygen, FheParams, RandomTape};
use qvbb_lab::pk_decompose::{assemble, key_blocks, sim_blocks, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let (lambda, d) = (6, 4);
    let r = RandomTape::random(lambda, &mut rng);
    let r_prime = RandomTape::random(lambda, &mut rng);
    let pk = keygen(FheParams::new(lambda, d), &r).pk;
    for strategy in [Strategy::Bootstrapped, Strategy::Garbled] {
        let blocks = key_blocks(lambda, d, &r, &r_prime, strategy);
        let mut sizes = std::collections::BTreeMap::new();
        for b in &blocks {
            *sizes.entry(b.to_bytes().len()).or_insert(0) += 1;
        }
        println!("{strategy:?}: {} blocks, count by byte size {sizes:?}", blocks.len());
        assert_eq!(assemble(lambda, &blocks).unwrap(), pk);
        let sim = sim_blocks(lambda, &pk, strategy, b"example").unwrap();
        assert_eq!(assemble(lambda, &sim).unwrap(), pk);
    }
    println!("both strategies reassemble the key, from real and from simulated blocks");
}
