//! The multiplicative interaction: the corner value, break points shared with
//! the additive case, and the dispersion structure as b rises.
//!
//! ```text
//! cargo run --release --example cobb_douglas
//! ```

use innogeo::bifurcation::{classify_scenario, format_sequence, regime_sequence, sweep, SweepOptions, SweptParameter};
use innogeo::thresholds::{break_point_formulas, general_break_points};
use innogeo::{InnovationSpec, Model, ModelParams};

fn main() -> innogeo::Result<()> {
    let p = ModelParams::new(4.0, 1.0, 8.0, 0.5, 0.3)?;
    let m = Model::new(InnovationSpec::CobbDouglas, p)?;
    // Both wages vanish at the corner, leaving only the price-index term.
    println!("dv(1) = {:.12}, -ln(phi)/(sigma-1) = {:.12}", m.delta_v(1.0), -p.phi().ln() / (p.sigma() - 1.0));

    let g = general_break_points(&InnovationSpec::CobbDouglas, &p);
    let (a1, a2) = break_point_formulas(&p);
    println!("break points: {:.10} {:.10} (additive: {a1:.10} {a2:.10})", g.phi_b1.value, g.phi_b2.value);

    for b in [0.1, 0.44, 0.45, 0.5, 0.65, 0.75] {
        let m = Model::new(InnovationSpec::CobbDouglas, p.with_b(b)?)?;
        let d = sweep(&m, SweptParameter::Phi, &SweepOptions::default())?;
        let id = classify_scenario(&d).map(|c| c.label).unwrap_or_else(|e| e.to_string());
        println!("b = {b:<5} {:<28} {id}", format_sequence(&regime_sequence(&d)));
    }
    Ok(())
}
