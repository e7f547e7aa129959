//! Equilibria and their stability at each trade freeness of a small gallery.
//!
//! ```text
//! cargo run --example equilibria
//! ```

use innogeo::equilibria::{find_equilibria, DEFAULT_GRID};
use innogeo::{Model, ModelParams};

fn main() -> innogeo::Result<()> {
    for phi in [0.1, 0.3, 0.38, 0.4, 0.8] {
        let model = Model::additive(ModelParams::new(2.0, 1.0, 5.0, 0.342, phi)?);
        let set = find_equilibria(&model, DEFAULT_GRID)?;
        println!("phi = {phi}");
        for e in &set.equilibria {
            println!("  z* = {:<10.6} {:<14} {:<9} residual {:.1e}", e.z_star, e.kind, e.stability, e.residual);
        }
    }
    Ok(())
}
