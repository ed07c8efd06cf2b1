//! Runs a circuit coherently, copies its almost-deterministic output and
//! uncomputes: the input comes back within 2*sqrt(eps).

use qvbb_lab::qsim::corpus::recovery_corpus;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    println!("{:>8} {:>10} {:>10}", "eps", "distance", "2sqrt(eps)");
    for case in recovery_corpus(&mut rng, 12) {
        let m = case.measure().unwrap();
        println!("{:>8.4} {:>10.4} {:>10.4}", m.eps, m.distance, 2.0 * m.eps.sqrt());
        assert!(m.distance <= 2.0 * m.eps.sqrt() + 1e-9);
    }
}
