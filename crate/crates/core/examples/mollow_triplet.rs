//! The operator toolbox on a system other than the cavity: a resonantly
//! driven two-level atom, whose fluorescence spectrum is the Mollow triplet
//! with sidebands at the Rabi frequency.
//!
//! cargo run --release --example mollow_triplet

use jc_blockade::hilbert::atomic_lowering;
use jc_blockade::liouvillian::{dissipator, Superoperator};
use jc_blockade::regression::{first_order_for, linspace, spectrum, TauGrid};
use jc_blockade::repro::tasks::dominant_maxima;
use jc_blockade::steadystate::steady_state;
use num_complex::Complex64 as C64;

fn main() -> jc_blockade::Result<()> {
    let (rabi, gamma) = (20.0, 1.0);
    let sm = atomic_lowering();
    let h = &(&sm + &sm.dagger()) * (0.5 * rabi);
    let l = Superoperator::hamiltonian(&h).add(&dissipator(&sm).scaled(C64::new(gamma, 0.0)));
    let rho = steady_state(&l)?;

    let corr = first_order_for(&l, &rho, &sm, &TauGrid::uniform(0.005, 40.0)?)?;
    let s = spectrum(&corr, &linspace(-40.0, 40.0, 1601))?;
    println!("coherent part |<s->|^2 = {:.5}", corr.coherent.unwrap_or(0.0));
    for (w, v) in dominant_maxima(&s, 3) {
        println!("maximum at {w:>7.3} (S = {v:.4})");
    }
    let side = (rabi * rabi - gamma * gamma / 16.0_f64).sqrt();
    println!("expected: centre half-width {}, sidebands at +-{side:.3} with half-width {}", gamma / 2.0, 0.75 * gamma);
    Ok(())
}
