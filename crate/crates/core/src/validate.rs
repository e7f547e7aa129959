//! Cross-validation invariants run on a parameter point and a cloud of
//! seeded random perturbations around it.
//!
//! Each check compares two independent routes to the same quantity (closed
//! form against direct evaluation, analytic derivative against finite
//! differences, and so on). A failing check is reported with the first point
//! at which it failed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equilibria::{asymmetric_stability, find_equilibria, lambda_star, Stability};
use crate::error::Result;
use crate::innovation::InnovationSpec;
use crate::model::{Method, Model, QuarticForm};
use crate::params::ModelParams;
use crate::thresholds::{
    break_condition_at, break_point_formulas, break_points, general_break_points, sustain_condition_at,
    sustain_points, Existence, BREAK_RESIDUAL_TOL,
};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PERTURBATIONS: usize = 100;
/// Relative tolerance of the derivative comparisons.
pub const DERIVATIVE_RTOL: f64 = 1e-6;
/// Values within this band of zero carry no sign.
pub const SIGN_BAND: f64 = 1e-9;

const Z_SAMPLES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.45, 0.6, 0.7, 0.8, 0.9];
const EQ_GRID: usize = 1000;

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub spec: InnovationSpec,
    pub seed: u64,
    pub perturbations: usize,
    /// Coefficient set for the analytic derivative; `AsPrinted` is the
    /// negative control.
    pub quartic_form: QuarticForm,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            spec: InnovationSpec::Additive,
            seed: DEFAULT_SEED,
            perturbations: DEFAULT_PERTURBATIONS,
            quartic_form: QuarticForm::Corrected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    /// Individual comparisons performed.
    pub comparisons: usize,
    pub failures: usize,
    /// Largest normalised discrepancy seen (1.0 = at tolerance).
    pub worst: f64,
    pub first_failure: Option<String>,
}

impl CheckResult {
    fn new(name: &'static str) -> Self {
        CheckResult {
            name,
            comparisons: 0,
            failures: 0,
            worst: 0.0,
            first_failure: None,
        }
    }

    /// Records a comparison whose discrepancy, scaled by its tolerance, is
    /// `ratio`; it passes when `ratio <= 1`.
    fn record(&mut self, ratio: f64, describe: impl FnOnce() -> String) {
        self.comparisons += 1;
        let bad = !(ratio <= 1.0);
        if ratio.is_finite() {
            self.worst = self.worst.max(ratio);
        } else {
            self.worst = f64::INFINITY;
        }
        if bad {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub seed: u64,
    pub points: usize,
    pub checks: Vec<CheckResult>,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed())
    }
}

/// Draws a valid point near `base`: λ, γ, σ−1 scaled by up to ±30%, b and φ
/// moved by up to ±0.15 and kept inside (0,1).
pub fn perturb<R: Rng>(base: &ModelParams, rng: &mut R) -> ModelParams {
    loop {
        let scale = |rng: &mut R| 1.0 + rng.gen_range(-0.3..0.3);
        let lambda = base.lambda() * scale(rng);
        let gamma = base.gamma() * scale(rng);
        let sigma = 1.0 + (base.sigma() - 1.0) * scale(rng);
        let b = base.b() + rng.gen_range(-0.15..0.15);
        let phi = base.phi() + rng.gen_range(-0.15..0.15);
        if let Ok(p) = ModelParams::new(lambda, gamma, sigma, b, phi).and_then(|p| p.with_mu(base.mu())) {
            if (0.01..=0.99).contains(&b) && (0.01..=0.99).contains(&phi) {
                return p;
            }
        }
    }
}

fn sign(x: f64) -> i8 {
    if x > SIGN_BAND {
        1
    } else if x < -SIGN_BAND {
        -1
    } else {
        0
    }
}

struct Suite {
    antisymmetry: CheckResult,
    derivative: CheckResult,
    db_derivative: CheckResult,
    back_substitution: CheckResult,
    count_bound: CheckResult,
    sign_identities: CheckResult,
    lambda_star: CheckResult,
    corner: CheckResult,
}

impl Suite {
    fn new() -> Self {
        Suite {
            antisymmetry: CheckResult::new("antisymmetry"),
            derivative: CheckResult::new("derivative agreement"),
            db_derivative: CheckResult::new("d/db agreement"),
            back_substitution: CheckResult::new("threshold back-substitution"),
            count_bound: CheckResult::new("interior count bound"),
            sign_identities: CheckResult::new("sign identities"),
            lambda_star: CheckResult::new("lambda* back-substitution"),
            corner: CheckResult::new("cobb-douglas corner identity"),
        }
    }

    fn into_checks(self, spec: &InnovationSpec) -> Vec<CheckResult> {
        let mut v = vec![self.antisymmetry, self.derivative];
        if spec.is_additive() {
            v.extend([self.db_derivative, self.back_substitution, self.count_bound, self.sign_identities, self.lambda_star]);
        } else {
            v.extend([self.back_substitution, self.sign_identities]);
            if matches!(spec, InnovationSpec::CobbDouglas) {
                v.push(self.corner);
            }
        }
        v
    }

    fn run(&mut self, model: &Model) -> Result<()> {
        let p = *model.params();
        let additive = model.spec().is_additive();

        for &z in &Z_SAMPLES {
            let (a, b) = (model.delta_v(z), model.delta_v(1.0 - z));
            self.antisymmetry
                .record((a + b).abs() / (1e-12 * a.abs().max(1.0)), || format!("z={z}: {a} vs {b} at {p:?}"));
        }

        // Analytic derivative against central differences; without an
        // analytic route the FD value is checked against a Richardson estimate.
        for &z in &Z_SAMPLES {
            let fd = model.delta_v_prime(z, Method::FiniteDifference)?;
            let other = if additive {
                model.delta_v_prime(z, Method::Analytic)?
            } else {
                let h = 1e-3;
                let d = |h: f64| (model.delta_v(z + h) - model.delta_v(z - h)) / (2.0 * h);
                (4.0 * d(h / 2.0) - d(h)) / 3.0
            };
            let ratio = (other - fd).abs() / (DERIVATIVE_RTOL * fd.abs().max(1e-3));
            self.derivative.record(ratio, || format!("z={z}: {other} vs finite difference {fd} at {p:?}"));
        }

        if additive {
            for &z in &Z_SAMPLES {
                let a = model.d_delta_v_db(z)?;
                let h = 1e-6;
                let up = Model::additive(p.with_b(p.b() + h)?).delta_v(z);
                let dn = Model::additive(p.with_b(p.b() - h)?).delta_v(z);
                let fd = (up - dn) / (2.0 * h);
                let ratio = (a - fd).abs() / (DERIVATIVE_RTOL * fd.abs().max(1e-3));
                self.db_derivative.record(ratio, || format!("z={z}: {a} vs {fd} at {p:?}"));
            }
        }

        // Closed-form thresholds must zero their defining condition, and the
        // condition must vanish exactly where Δv'(1/2) does.
        if additive {
            let bp = break_points(&p);
            for r in [bp.phi_b1, bp.phi_b2] {
                if r.existence == Existence::Exists {
                    let res = break_condition_at(&p, r.value);
                    self.back_substitution
                        .record(res.abs() / BREAK_RESIDUAL_TOL, || format!("break point {}: residual {res:e} at {p:?}", r.value));
                }
            }
            for s in sustain_points(&p) {
                let res = sustain_condition_at(&p, s);
                self.back_substitution
                    .record(res.abs() / BREAK_RESIDUAL_TOL, || format!("sustain point {s}: residual {res:e} at {p:?}"));
            }
        } else {
            let g = general_break_points(model.spec(), &p);
            let (r1, r2) = break_point_formulas(&p);
            if matches!(model.spec(), InnovationSpec::CobbDouglas) {
                for (a, b) in [(g.phi_b1.value, r1), (g.phi_b2.value, r2)] {
                    // Both routes are NaN when the break points do not exist.
                    let ratio = if a.is_nan() && b.is_nan() { 0.0 } else { (a - b).abs() / 1e-10 };
                    self.back_substitution
                        .record(ratio, || format!("general break point {a} vs additive {b} at {p:?}"));
                }
            }
            for r in [g.phi_b1, g.phi_b2] {
                if r.existence == Existence::Exists {
                    let m = model.with_params(p.with_phi(r.value)?)?;
                    let d = m.delta_v_prime(0.5, Method::FiniteDifference)?;
                    self.back_substitution
                        .record(d.abs() / 1e-7, || format!("general break point {}: dv'(1/2) = {d:e} at {p:?}", r.value));
                }
            }
        }

        if additive {
            let set = find_equilibria(model, EQ_GRID)?;
            let n = set.interior_count_upper_half;
            self.count_bound.record(n as f64 / 2.0, || format!("{n} interior equilibria at {p:?}"));
        }

        let corner = model.delta_v(1.0);
        let slope = model.delta_v_prime_best(0.5);
        let b_cond = break_condition_at(&p, p.phi());
        let pairs: &[(&str, f64, f64)] = if additive {
            &[("dv(1) vs S", corner, sustain_condition_at(&p, p.phi())), ("dv'(1/2) vs B", slope, b_cond)]
        } else {
            &[("dv'(1/2) vs B", slope, b_cond)]
        };
        for &(what, x, y) in pairs {
            let (sx, sy) = (sign(x), sign(y));
            let ok = sx == 0 || sy == 0 || sx == sy;
            self.sign_identities
                .record(if ok { 0.0 } else { 2.0 }, || format!("{what}: {x:e} vs {y:e} at {p:?}"));
        }

        if matches!(model.spec(), InnovationSpec::CobbDouglas) {
            // Both wages vanish at the corner; only the price-index term is left.
            let expect = -p.mu() * p.phi().ln() / (p.sigma() - 1.0);
            self.corner
                .record((corner - expect).abs() / 1e-12, || format!("dv(1) = {corner} vs {expect} at {p:?}"));
        }

        if additive {
            for &z in &[0.6, 0.7, 0.8, 0.9] {
                let ls = match lambda_star(&p, z) {
                    Ok(ls) if ls.admissible => ls,
                    _ => continue,
                };
                let q = p.with_lambda(ls.value)?;
                let m = Model::additive(q).with_quartic_form(model.quartic_form());
                let res = m.delta_v(z);
                self.lambda_star
                    .record(res.abs() / 1e-9, || format!("z={z}: dv = {res:e} at lambda*={} {p:?}", ls.value));
                let via_g = asymmetric_stability(&q, z)?;
                let direct = m.delta_v_prime(z, Method::FiniteDifference)?;
                if direct.abs() > SIGN_BAND && via_g != Stability::Marginal {
                    let agree = via_g == Stability::from_negative(direct);
                    self.lambda_star
                        .record(if agree { 0.0 } else { 2.0 }, || format!("z={z}: stability {via_g} vs dv' = {direct:e} at {p:?}"));
                }
            }
        }
        Ok(())
    }
}

/// Runs every invariant on `base` and on `opts.perturbations` seeded
/// perturbations of it.
pub fn validate(base: &ModelParams, opts: &ValidateOptions) -> Result<ValidationSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut suite = Suite::new();
    let first = Model::new(opts.spec.clone(), *base)?.with_quartic_form(opts.quartic_form);
    suite.run(&first)?;
    for _ in 0..opts.perturbations {
        let p = perturb(base, &mut rng);
        let m = match first.with_params(p) {
            Ok(m) => m,
            Err(e) => {
                log::debug!("skipping perturbation {p:?}: {e}");
                continue;
            }
        };
        suite.run(&m)?;
    }
    Ok(ValidationSummary {
        seed: opts.seed,
        points: opts.perturbations + 1,
        checks: suite.into_checks(&opts.spec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParams {
        ModelParams::new(2.0, 1.0, 8.0, 0.33, 0.3).unwrap()
    }

    #[test]
    fn default_point_passes() {
        let s = validate(&base(), &ValidateOptions::default()).unwrap();
        for c in &s.checks {
            assert!(c.passed(), "{c:?}");
            assert!(c.comparisons > 0, "{}", c.name);
        }
    }

    #[test]
    fn uncorrected_quartic_is_caught() {
        let opts = ValidateOptions {
            quartic_form: QuarticForm::AsPrinted,
            perturbations: 5,
            ..Default::default()
        };
        let s = validate(&base(), &opts).unwrap();
        assert_eq!(s.first_failure().unwrap().name, "derivative agreement");
    }

    #[test]
    fn cobb_douglas_suite_passes() {
        let opts = ValidateOptions {
            spec: InnovationSpec::CobbDouglas,
            perturbations: 20,
            ..Default::default()
        };
        let s = validate(&base(), &opts).unwrap();
        assert!(s.passed(), "{:?}", s.first_failure());
    }

    #[test]
    fn perturbations_are_deterministic() {
        let a = perturb(&base(), &mut ChaCha8Rng::seed_from_u64(7));
        let b = perturb(&base(), &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }
}
