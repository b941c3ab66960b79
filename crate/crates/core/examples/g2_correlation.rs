//! Side-scattered intensity correlation of the full model from the quantum
//! regression theorem, compared with the cascade closed form, and the quantum
//! beat recovered from its Fourier transform.
//!
//! cargo run --release --example g2_correlation

use jc_blockade::effective::{derive_params, g2_analytic, resonant_detuning};
use jc_blockade::regression::{fourier_bin, fourier_grid, fourier_magnitude, TauGrid};
use jc_blockade::repro::tasks::{numeric_g2, peak_in};
use jc_blockade::ModelParams;

fn main() -> jc_blockade::Result<()> {
    let (g, eps) = (1000.0, 20.0);
    let mut p = ModelParams::new(g, 2.0, eps, 0.0);
    p.delta_omega = resonant_detuning(g, eps);
    let fp = derive_params(&p);

    let tau = TauGrid::beat_resolved(fp.nu, p.gamma)?;
    // the correlation dynamics only populate the lowest Fock states
    let numeric = numeric_g2(&p.with_n_max(12), &tau)?;
    let analytic = g2_analytic(&fp, tau.times(), true)?;

    println!("{} delays up to {:.2}/kappa", tau.len(), tau.last());
    for k in (0..tau.len()).step_by(tau.len() / 12) {
        println!("tau = {:>7.4}  numeric {:>9.5}  closed form {:>9.5}", tau.times()[k], numeric.values[k].re, analytic.values[k].re);
    }

    let ft = fourier_magnitude(&numeric, &fourier_grid(3.5 * g, tau.last()))?;
    let (w, mag) = peak_in(&ft, g, 3.5 * g).expect("grid covers the beat");
    println!(
        "beat: FFT peak at {:.5} g (|FT| = {mag:.3e}), predicted {:.5} g, bin {:.2e} g",
        w / g,
        fp.nu / g,
        fourier_bin(tau.last()) / g
    );
    Ok(())
}
