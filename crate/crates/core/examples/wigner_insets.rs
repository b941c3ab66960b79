//! Wigner function of the intracavity field on both sides of the two-photon
//! resonance, with a coarse character plot of each map.
//!
//! cargo run --release --example wigner_insets

use std::f64::consts::FRAC_1_SQRT_2;

use jc_blockade::repro::tasks::steady_wigner;
use jc_blockade::ModelParams;

fn main() -> jc_blockade::Result<()> {
    let base = ModelParams::new(1000.0, 2.0, 40.0, 0.0);
    for d in [-1.0 / 1.40, -FRAC_1_SQRT_2, -1.0 / 1.42] {
        let w = steady_wigner(&base.with_delta_over_g(d))?;
        let (x, y) = w.principal_peak();
        println!("dw/g = {d:.4}: integral {:.7}, principal peak at ({x:.2}, {y:.2}), angle {:.3}", w.normalization, y.atan2(x));
        for (mx, my, v) in w.local_maxima(0.05) {
            println!("  maximum W = {v:.4} at ({mx:.2}, {my:.2})");
        }
        let top = w.values.iter().flatten().fold(0.0_f64, |m, &v| m.max(v));
        for iy in (0..w.y.len()).rev().step_by(8) {
            let row: String = (0..w.x.len())
                .step_by(4)
                .map(|ix| match w.at(ix, iy) / top {
                    r if r > 0.75 => '#',
                    r if r > 0.4 => '+',
                    r if r > 0.1 => '.',
                    r if r < -0.05 => '-',
                    _ => ' ',
                })
                .collect();
            println!("  |{row}|");
        }
    }
    Ok(())
}
