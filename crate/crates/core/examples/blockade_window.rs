//! Zero-delay forwards-scattered correlations against drive strength at the
//! bare two-photon resonance.
//!
//! cargo run --release --example blockade_window

use std::f64::consts::FRAC_1_SQRT_2;

use jc_blockade::repro::tasks::{blockade_label, zero_delay_pair};
use jc_blockade::ModelParams;

fn main() -> jc_blockade::Result<()> {
    let base = ModelParams::new(1000.0, 2.0, 0.0, -FRAC_1_SQRT_2);
    println!("{:>6} {:>10} {:>10}  class", "eps", "g2(0)", "g3(0)");
    for eps in [4.0, 10.0, 12.0, 15.0, 20.0, 26.0, 30.0, 40.0] {
        let (g2, g3) = zero_delay_pair(&base.with_eps(eps))?;
        println!("{eps:>6} {g2:>10.4} {g3:>10.4}  {}", blockade_label(g2, g3));
    }
    Ok(())
}
