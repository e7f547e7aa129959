//! Criticality of the pitchfork at the break points and how it moves with b.
//!
//! ```text
//! cargo run --release --example pitchfork
//! ```

use innogeo::equilibria::{find_equilibria, DEFAULT_GRID};
use innogeo::thresholds::{break_point_formulas, pitchfork_classify};
use innogeo::{Model, ModelParams};

fn main() -> innogeo::Result<()> {
    for b in [0.55, 0.7, 0.9] {
        let p = ModelParams::new(4.0, 1.0, 8.0, b, 0.5)?;
        let (r1, _) = break_point_formulas(&p);
        let pf = pitchfork_classify(&p, r1)?;
        println!("b = {b}: phi_b1 = {r1:.6}, xi = {:.4} -> {}", pf.xi, pf.class);

        // Just above the break point the bifurcating branch should be stable
        // for a supercritical pitchfork.
        let phi = (r1 + 0.02).clamp(0.001, 0.999);
        let set = find_equilibria(&Model::additive(p.with_phi(phi)?), DEFAULT_GRID)?;
        for e in set.asymmetric_upper() {
            println!("    phi = {phi:.4}: z* = {:.6} {}", e.z_star, e.stability);
        }
    }
    Ok(())
}
