//! The inverse equilibrium curve: the immobile mass λ*(z) that turns a share
//! z into an equilibrium, and the stability of that equilibrium.
//!
//! ```text
//! cargo run --example lambda_star
//! ```

use innogeo::equilibria::{asymmetric_stability, lambda_star};
use innogeo::thresholds::immobile_thresholds;
use innogeo::{Model, ModelParams};

fn main() -> innogeo::Result<()> {
    // λ is ignored by λ*(z); any admissible value will do.
    let p = ModelParams::new(1.0, 1.0, 8.0, 0.33, 0.3)?;
    println!("{:>6} {:>12} {:>10}", "z", "lambda*", "stability");
    for i in 1..10 {
        let z = 0.5 + 0.05 * i as f64;
        let ls = lambda_star(&p, z)?;
        if !ls.admissible {
            println!("{z:>6.2} {:>12.6} {:>10}", ls.value, "-");
            continue;
        }
        let st = asymmetric_stability(&p, z)?;
        let check = Model::additive(p.with_lambda(ls.value)?).delta_v(z);
        println!("{z:>6.2} {:>12.6} {:>10}   dv = {check:.1e}", ls.value, st);
    }

    let t = immobile_thresholds(&p, 0.75)?;
    println!("b_hat = {:.6}, b_tilde = {:.6}, b_underline = {:.6}", t.b_hat, t.b_tilde, t.b_underline);
    Ok(())
}
