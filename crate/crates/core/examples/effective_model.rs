//! The four-level cascade model of the two-photon resonance: derived rates,
//! Rabi and beat frequencies, spectral line positions and the closed-form
//! g2(tau) with and without the quantum beat.
//!
//! cargo run --release --example effective_model

use jc_blockade::effective::{derive_params, g2_analytic, g2_coefficients, resonant_detuning, steady_occupations};
use jc_blockade::regression::linspace;
use jc_blockade::ModelParams;

fn main() -> jc_blockade::Result<()> {
    let (g, eps) = (1000.0, 60.0);
    let mut p = ModelParams::new(g, 2.0, eps, 0.0);
    p.delta_omega = resonant_detuning(g, eps);
    let fp = derive_params(&p);

    println!("Omega = {:.4} kappa, nu = {:.4} kappa ({:.6} g)", fp.omega, fp.nu, fp.nu / g);
    println!("Gamma31 = {:.4}, Gamma32 = {:.4}, Gamma = {:.4}", fp.gamma31, fp.gamma32, fp.gamma_c);
    let occ = steady_occupations(&fp);
    println!("stationary <s+s-> = {:.6}, populations {:.5?}", occ.excitation, occ.p);

    println!("\npredicted fluorescence lines:");
    for line in fp.spectral_lines() {
        println!("  {:<6} {:>10.5} g", line.label, line.omega / g);
    }

    let c = g2_coefficients(&fp)?;
    println!("\nc1 = {:.5}, c2 = {:.5}, c3 = {:.5}, c4 = {:.5}", c.c1, c.c2, c.c3, c.c4);
    let tau = linspace(0.0, 2.0, 11);
    let full = g2_analytic(&fp, &tau, true)?;
    let envelope = g2_analytic(&fp, &tau, false)?;
    println!("{:>6} {:>10} {:>10}", "tau", "g2", "no beat");
    for (k, t) in tau.iter().enumerate() {
        println!("{t:>6.2} {:>10.5} {:>10.5}", full.values[k].re, envelope.values[k].re);
    }
    Ok(())
}
