//! Relaxation of the empty cavity into the driven steady state, propagated
//! with the Krylov exponential action and sampled on a time grid.
//!
//! cargo run --release --example krylov_relaxation

use jc_blockade::effective::resonant_detuning;
use jc_blockade::liouvillian::trace_functional;
use jc_blockade::propagate::KrylovPropagator;
use jc_blockade::regression::linspace;
use jc_blockade::steadystate::{expectation, steady_state};
use jc_blockade::{build_liouvillian, DensityMatrix, JcOperators, ModelParams, StateVector};

fn main() -> jc_blockade::Result<()> {
    let mut p = ModelParams::new(1000.0, 2.0, 40.0, 0.0).with_n_max(12);
    p.delta_omega = resonant_detuning(p.g, p.eps_d);
    let l = build_liouvillian(&p)?;
    let ops = JcOperators::new(p.n_max)?;

    let vacuum = DensityMatrix::pure(&StateVector::fock_atom(p.n_max, 0, false));
    let photons = trace_functional(&ops.num);
    let excitation = trace_functional(&ops.excitation);
    let times = linspace(0.0, 6.0, 25);
    let samples = KrylovPropagator::new(&l).sample(&vacuum.to_vec(), &times, &[&photons, &excitation])?;

    let ss = steady_state(&l)?;
    println!("{:>6} {:>10} {:>10}", "t", "<a+a>", "<s+s->");
    for (k, t) in times.iter().enumerate() {
        println!("{t:>6.2} {:>10.5} {:>10.5}", samples[0][k].re, samples[1][k].re);
    }
    println!(
        "steady  {:>10.5} {:>10.5}",
        expectation(&ss, &ops.num)?.re,
        expectation(&ss, &ops.excitation)?.re
    );
    Ok(())
}
