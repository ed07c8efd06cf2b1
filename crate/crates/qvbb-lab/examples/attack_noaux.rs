//! The distinguisher without auxiliary input: it pulls the key out of the
//! obfuscated member block by block, then evaluates once.

use qvbb_lab::attack::{run_experiment, AttackKind, ExperimentConfig};
use qvbb_lab::candidates::Registry;

fn main() {
    let registry = Registry::default();
    for name in ["basis", "noisy"] {
        let cfg = ExperimentConfig { kind: AttackKind::Noaux, candidate: name.into(), trials: 10, lambda: 6, seed: 2, d: None };
        let r = run_experiment(&cfg, registry.get(name).unwrap().as_ref()).unwrap();
        println!(
            "{name:<6} q = {}, POINT {}/{}, ZERO {}/{}, advantage {:.2}, max reuse distance {:.4}, {:.1}s",
            r.q, r.point_ones, r.trials, r.zero_ones, r.trials, r.advantage, r.max_rho_reuse_distance, r.wall_time_s
        );
    }
}
