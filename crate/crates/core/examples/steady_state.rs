//! Steady state of the driven cavity at the shifted two-photon resonance:
//! photon-number distribution, truncation fidelities and atomic inversion.
//!
//! cargo run --release --example steady_state

use jc_blockade::effective::resonant_detuning;
use jc_blockade::observables::fidelity_m;
use jc_blockade::repro::tasks::steady_point;
use jc_blockade::ModelParams;

fn main() -> jc_blockade::Result<()> {
    let (g, gamma, eps) = (1000.0, 2.0, 40.0);
    let mut p = ModelParams::new(g, gamma, eps, 0.0);
    p.delta_omega = resonant_detuning(g, eps);

    let s = steady_point(&p)?;
    println!("g/kappa = {g}, gamma/kappa = {gamma}, eps/kappa = {eps}, dw/g = {:.5}", p.delta_over_g());
    for (n, pn) in s.occupations.iter().take(6).enumerate() {
        println!("P{n} = {pn:.5}");
    }
    for m in 1..=3 {
        println!("F{m} = {:.6}", fidelity_m(&s.field, m)?);
    }
    println!("<a+a> = {:.5}, <sigma_z> = {:.5}", s.photon_number, s.inversion);
    println!("smallest eigenvalue of rho: {:.2e}", s.rho.min_eigenvalue());
    Ok(())
}
