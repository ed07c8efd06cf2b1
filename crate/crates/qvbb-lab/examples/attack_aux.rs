//! The distinguisher with auxiliary input, against POINT and ZERO.

use qvbb_lab::attack::{run_experiment, AttackKind, ExperimentConfig};
use qvbb_lab::candidates::BasisCandidate;

fn main() {
    let cfg = ExperimentConfig { kind: AttackKind::Aux, candidate: "basis".into(), trials: 50, lambda: 6, seed: 1, d: None };
    let r = run_experiment(&cfg, &BasisCandidate).unwrap();
    println!("POINT accepted {}/{}, ZERO accepted {}/{}, advantage {:.3}", r.point_ones, r.trials, r.zero_ones, r.trials, r.advantage);
}
