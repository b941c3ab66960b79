//! Incoherent fluorescence spectrum of the side-scattered light and the
//! positions predicted by the shifted dressed-state energies.
//!
//! cargo run --release --example fluorescence_spectrum

use std::f64::consts::PI;

use jc_blockade::effective::{derive_params, resonant_detuning};
use jc_blockade::regression::{fourier_bin, TauGrid};
use jc_blockade::repro::tasks::{dominant_maxima, fluorescence_spectrum};
use jc_blockade::ModelParams;

fn main() -> jc_blockade::Result<()> {
    let (g, eps) = (1000.0, 20.0);
    let mut p = ModelParams::new(g, 2.0, eps, 0.0);
    p.delta_omega = resonant_detuning(g, eps);

    let tau = TauGrid::uniform(2.0 * PI / (2.0 * g) / 16.0, 10.0)?;
    let bin = fourier_bin(tau.last());
    let half = (2.2 * g / bin).ceil() as i64;
    let omega: Vec<f64> = (-half..=half).map(|k| k as f64 * bin).collect();
    let s = fluorescence_spectrum(&p.with_n_max(12), &tau, &omega)?;

    println!("five highest maxima (omega - omega_d):");
    for (w, v) in dominant_maxima(&s, 5) {
        println!("  {:>9.5} g   S = {v:.3e}", w / g);
    }
    println!("predicted lines:");
    for line in derive_params(&p).spectral_lines() {
        println!("  {:>9.5} g   {}", line.omega / g, line.label);
    }
    Ok(())
}
