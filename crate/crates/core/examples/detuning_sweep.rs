//! Occupations of the lowest Fock states while the drive crosses the
//! two-photon resonance near dw/g = -1/sqrt(2).
//!
//! cargo run --release --example detuning_sweep

use jc_blockade::observables::fidelity_m;
use jc_blockade::regression::linspace;
use jc_blockade::repro::tasks::steady_point;
use jc_blockade::ModelParams;
use rayon::prelude::*;

fn main() {
    // a smaller truncation is plenty at this drive strength
    let base = ModelParams::new(1000.0, 2.0, 40.0, 0.0).with_n_max(16);
    let rows: Vec<_> = linspace(-0.74, -0.68, 25)
        .into_par_iter()
        .map(|d| {
            let s = steady_point(&base.with_delta_over_g(d)).expect("steady state");
            (d, s.occupations[0], s.occupations[1], s.occupations[2], fidelity_m(&s.field, 2).unwrap(), s.inversion)
        })
        .collect();

    println!("{:>9} {:>8} {:>8} {:>8} {:>8} {:>9}", "dw/g", "P0", "P1", "P2", "F2", "<sz>");
    for (d, p0, p1, p2, f2, sz) in rows {
        println!("{d:>9.5} {p0:>8.4} {p1:>8.4} {p2:>8.4} {f2:>8.5} {sz:>9.4}");
    }
}
