//! Simulators with only oracle access, and the extractor that bounds them.

use qvbb_lab::oracle_sim::{simulator_experiment, Baseline};

fn main() {
    for which in Baseline::ALL {
        let r = simulator_experiment(which, 12, 128, 400, 3).unwrap();
        println!(
            "{:<17} advantage {:+.3} ± {:.3}, found alpha {} times, extractor hits {}, bound {:.2}",
            which.name(),
            r.advantage,
            r.advantage_sigma,
            r.hits,
            r.extractor_hits,
            r.o2h_bound
        );
    }
}
