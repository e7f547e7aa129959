//! Closed-form break and sustain thresholds, checked against direct
//! evaluation of the model.
//!
//! ```text
//! cargo run --example thresholds
//! ```

use innogeo::model::Method;
use innogeo::thresholds::{self, threshold_report, DEFAULT_Z};
use innogeo::{InnovationSpec, Model, ModelParams};

fn main() -> innogeo::Result<()> {
    let p = ModelParams::new(2.0, 1.0, 5.0, 0.342, 0.3)?;
    let r = threshold_report(&InnovationSpec::Additive, &p, DEFAULT_Z)?;

    println!("b window for break points: ({:.5}, {:.5})", r.break_points.certificate.b1, r.break_points.certificate.b2);
    for (name, root) in [("phi_b1", r.break_points.phi_b1), ("phi_b2", r.break_points.phi_b2)] {
        println!("{name} = {:.8} ({})", root.value, root.existence);
        if root.existence.exists() {
            // Symmetric dispersion changes stability exactly here.
            let slope = Model::additive(p.with_phi(root.value)?).delta_v_prime(0.5, Method::Analytic)?;
            println!("  dv'(1/2) there = {slope:.2e}");
        }
    }
    for s in &r.sustain_points {
        let corner = Model::additive(p.with_phi(*s)?).delta_v(1.0);
        println!("sustain point {s:.8}: dv(1) = {corner:.2e}");
    }
    println!("b_bar = {}, b_s = {}", r.b_bar, r.b_s);
    println!("sustain limit as phi -> 1: {:.6}", thresholds::sustain_limit(&p));
    Ok(())
}
