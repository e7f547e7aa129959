//! Bifurcation diagram over trade freeness: branches, events and the CSV
//! written by `innogeo sweep`.
//!
//! ```text
//! cargo run --release --example bifurcation_sweep [out.csv]
//! ```

use innogeo::bifurcation::{sweep, SweepOptions, SweptParameter};
use innogeo::report;
use innogeo::{Model, ModelParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = Model::additive(ModelParams::new(2.0, 1.0, 5.0, 0.342, 0.5)?);
    let d = sweep(&model, SweptParameter::Phi, &SweepOptions::default())?;

    println!("{} grid values after refinement", d.grid.len());
    for b in d.branches.iter().filter(|b| b.mirror_of.is_none()) {
        let (first, last) = (b.points[0], b.points[b.points.len() - 1]);
        println!(
            "branch {:>2} {:<14} phi {:.5}..{:.5}  z {:.4}..{:.4}",
            b.id, b.kind, first.param, last.param, first.z, last.z
        );
    }
    for e in &d.events {
        println!("{:<18} phi = {:.8}  z = {:.6}", e.kind.as_str(), e.location, e.z_location);
    }

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, report::sweep_csv(&d, report::DEFAULT_PRECISION)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
