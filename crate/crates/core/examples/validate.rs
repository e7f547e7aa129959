//! Runs the cross-validation suite, then the same suite with the quartic
//! coefficients in their uncorrected form, which the derivative oracle rejects.
//!
//! ```text
//! cargo run --release --example validate
//! ```

use innogeo::model::QuarticForm;
use innogeo::validate::{validate, ValidateOptions};
use innogeo::ModelParams;

fn main() -> innogeo::Result<()> {
    let p = ModelParams::new(2.0, 1.0, 8.0, 0.33, 0.3)?;
    for form in [QuarticForm::Corrected, QuarticForm::AsPrinted] {
        let opts = ValidateOptions {
            quartic_form: form,
            ..Default::default()
        };
        let s = validate(&p, &opts)?;
        println!("{form:?}: {} points, seed {}", s.points, s.seed);
        for c in &s.checks {
            let status = if c.passed() { "pass" } else { "FAIL" };
            println!("  {status} {:<30} {:>5} comparisons, worst {:.2e}", c.name, c.comparisons, c.worst);
        }
    }
    Ok(())
}
