//! Classifies every bundled scenario and prints its regime sequence.
//!
//! ```text
//! cargo run --release --example scenario_gallery
//! ```

use innogeo::bifurcation::{classify_scenario, format_sequence, regime_sequence, sweep, SweepOptions, SweptParameter};
use innogeo::fixtures::scenarios;

fn main() -> innogeo::Result<()> {
    for sc in scenarios() {
        let d = sweep(&sc.model(0.5)?, SweptParameter::Phi, &SweepOptions::default())?;
        let got = match classify_scenario(&d) {
            Ok(c) => c.id,
            Err(_) => "unclassified".to_string(),
        };
        let mark = if got == sc.expected { "ok" } else { "MISMATCH" };
        println!(
            "{:<16} ({}, {}, {}, {:<6}) expected {:<15} got {:<15} {mark}",
            sc.name, sc.lambda, sc.gamma, sc.sigma, sc.b, sc.expected, got
        );
        println!("    {}", format_sequence(&regime_sequence(&d)));
    }
    Ok(())
}
