//! A user-defined interaction function. Break points come from the general
//! formula, equilibria from finite-difference slopes.
//!
//! ```text
//! cargo run --example custom_innovation
//! ```

use innogeo::equilibria::{find_equilibria, DEFAULT_GRID};
use innogeo::innovation::CustomInteraction;
use innogeo::thresholds::general_break_points;
use innogeo::{InnovationSpec, Model, ModelParams};

fn main() -> innogeo::Result<()> {
    // A smoothed additive rule: the weight on own-region researchers grows
    // like a logistic in the share.
    let g = CustomInteraction::new("logistic", |z: f64, b: f64| {
        let k = 4.0 * (2.0 * b - 1.0);
        let s = |x: f64| 1.0 / (1.0 + (-k * (x - 0.5)).exp());
        0.25 + 0.5 * s(z)
    });
    let spec = InnovationSpec::Custom(g);

    for b in [0.3, 0.7] {
        let p = ModelParams::new(2.0, 1.0, 5.0, b, 0.3)?;
        let gb = general_break_points(&spec, &p);
        println!(
            "b = {b}: g(1/2) = {:.3}, g'(1/2) = {:.4}, phi_b = {:.6} ({}), {:.6} ({})",
            gb.g_half, gb.g_prime_half, gb.phi_b1.value, gb.phi_b1.existence, gb.phi_b2.value, gb.phi_b2.existence
        );
        let set = find_equilibria(&Model::new(spec.clone(), p)?, DEFAULT_GRID)?;
        for e in set.upper_half() {
            println!("    z* = {:.6} {} {}", e.z_star, e.kind, e.stability);
        }
    }

    // Shape restrictions are checked when the model is built.
    let bad = InnovationSpec::Custom(CustomInteraction::new("too-big", |_, _| 1.5));
    match Model::new(bad, ModelParams::new(2.0, 1.0, 5.0, 0.3, 0.3)?) {
        Ok(_) => println!("accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
