//! Answers superposition queries to f(b, x) = b ? g(x) : c with two
//! queries to g.

use qvbb_lab::bits;
use qvbb_lab::circuit_ir::random_circuit;
use qvbb_lab::oracle_sim::{choice_circuit, ChoiceOracleAdapter, OracleHandle};
use qvbb_lab::qsim::StateVector;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(29);
    let g = random_circuit(&mut rng, 2, 6, 2);
    let c = bits::from_str01("10");
    let mut adapter = ChoiceOracleAdapter::new(OracleHandle::new(g.clone()), &c).unwrap();
    let mut direct = OracleHandle::new(choice_circuit(&g, &c));
    let psi = StateVector::random(5, &mut rng);
    let got = adapter.squery(&psi).unwrap();
    let mut want = psi.clone();
    direct.squery(&mut want, &[0, 1, 2], &[3, 4]).unwrap();
    let gap: f64 = got.amplitudes().iter().zip(want.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    println!("adapter vs direct oracle: {gap:.2e}; g queries {}, f queries {}", adapter.g().queries(), adapter.f_queries());
    print!("{}", direct.transcript_jsonl());
}
