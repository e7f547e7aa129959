//! Primitive functions of the model: wages, the utility differential Δv(z)
//! and its derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::innovation::{InnovationSpec, Region};
use crate::params::ModelParams;

/// Step for central differences on the unit interval.
pub const FD_STEP: f64 = 1e-6;

/// How to evaluate Δv'(z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Closed-form quartic; additive specification only.
    Analytic,
    FiniteDifference,
}

/// Which coefficient set to use for the quartic numerator of Δv'.
///
/// `AsPrinted` multiplies the cubic coefficient by an extra `b` and keeps a
/// factor `μ` inside `a₁, a₂`. It does not match the finite-difference
/// derivative and exists as a negative control for the validation suite.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuarticForm {
    #[default]
    Corrected,
    AsPrinted,
}

/// Coefficients of `P(z) = a₁z⁴ + a₂z³ − 2(1−φ)a₃z² + 2(1−φ)a₄z + a₅`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    /// Multiplier applied to `a₂` in the cubic term (`b` for the uncorrected form).
    pub cubic_factor: f64,
    pub phi: f64,
}

impl QuarticCoefficients {
    pub fn eval(&self, z: f64) -> f64 {
        let om = 1.0 - self.phi;
        let z2 = z * z;
        self.a1 * z2 * z2 + self.a2 * self.cubic_factor * z2 * z - 2.0 * om * self.a3 * z2 + 2.0 * om * self.a4 * z + self.a5
    }
}

/// Quartic coefficients of the additive model.
pub fn quartic_coefficients(p: &ModelParams, form: QuarticForm) -> QuarticCoefficients {
    let (l, g, s, b, f) = (p.lambda(), p.gamma(), p.sigma(), p.b(), p.phi());
    let gs = g * (s - 1.0);
    let lead = (f - 1.0).powi(3) * (f + 1.0);
    let mut a1 = 4.0 * (1.0 - 2.0 * b) * gs * lead;
    let mut a2 = 8.0 * (2.0 * b - 1.0) * gs * lead;
    let tail = s * (f + 1.0) * (f - 1.0).powi(2);
    let a3 = gs
        * (b * (f + 1.0) * ((l - 2.0) * f * f - l + 18.0 * f - 4.0) - f * (l * (f - 1.0) * f + l + 6.0 * f) + l - 8.0 * f + 2.0)
        + tail;
    let bb = b * (f + 1.0).powi(2) - f * f - 1.0;
    let a4 = gs * (l * (f - 1.0) * bb + 2.0 * f * (b * (f + 1.0) * (f + 5.0) - f * (f + 2.0) - 3.0)) + tail;
    let a5 = gs * (l * (f * f + 1.0) * bb + 2.0 * f * (b * (f.powi(3) + 3.0 * f * f + f - 1.0) - f * (f * f + f + 1.0) + 1.0))
        - 2.0 * s * f * (f * f - 1.0);
    let cubic_factor = match form {
        QuarticForm::Corrected => 1.0,
        QuarticForm::AsPrinted => {
            a1 *= p.mu();
            a2 *= p.mu();
            b
        }
    };
    QuarticCoefficients {
        a1,
        a2,
        a3,
        a4,
        a5,
        cubic_factor,
        phi: f,
    }
}

/// An innovation specification bound to a parameter point.
#[derive(Debug, Clone)]
pub struct Model {
    spec: InnovationSpec,
    params: ModelParams,
    quartic: QuarticForm,
}

impl Model {
    /// Validates a custom interaction function against `params.b`.
    pub fn new(spec: InnovationSpec, params: ModelParams) -> Result<Self> {
        spec.validate(params.b())?;
        Ok(Model {
            spec,
            params,
            quartic: QuarticForm::Corrected,
        })
    }

    pub fn additive(params: ModelParams) -> Self {
        Model {
            spec: InnovationSpec::Additive,
            params,
            quartic: QuarticForm::Corrected,
        }
    }

    /// Test hook: choose the coefficient set used by the analytic derivative.
    pub fn with_quartic_form(mut self, form: QuarticForm) -> Self {
        self.quartic = form;
        self
    }

    /// Same specification at another parameter point. Custom functions are
    /// re-validated because their shape restriction depends on `b`.
    pub fn with_params(&self, params: ModelParams) -> Result<Self> {
        if params.b() != self.params.b() {
            self.spec.validate(params.b())?;
        }
        Ok(Model {
            spec: self.spec.clone(),
            params,
            quartic: self.quartic,
        })
    }

    pub fn spec(&self) -> &InnovationSpec {
        &self.spec
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn quartic_form(&self) -> QuarticForm {
        self.quartic
    }

    /// Nominal wage of a scientist in `region`.
    pub fn wage(&self, z: f64, region: Region) -> f64 {
        let p = &self.params;
        let (zi, zj) = region.shares(z);
        let f = p.phi();
        let half = p.lambda() / 2.0;
        let bracket = (half + zi) / (zi + f * zj) + f * (half + zj) / (f * zi + zj);
        p.mu() * p.gamma() / p.sigma() * self.spec.g(zi, p.b()) * bracket
    }

    /// Δv(z) = v₁(z) − v₂(z).
    pub fn delta_v(&self, z: f64) -> f64 {
        if z == 0.5 {
            return 0.0;
        }
        let p = &self.params;
        let f = p.phi();
        let w = self.wage(z, Region::One) - self.wage(z, Region::Two);
        let ratio = (z + f * (1.0 - z)) / ((1.0 - z) + f * z);
        w + p.mu() / (p.sigma() - 1.0) * ratio.ln()
    }

    /// Δv'(z) by the requested method.
    pub fn delta_v_prime(&self, z: f64, method: Method) -> Result<f64> {
        match method {
            Method::Analytic => {
                if !self.spec.is_additive() {
                    return Err(Error::SpecMismatch {
                        operation: "analytic delta_v_prime",
                        spec: self.spec.kind().to_string(),
                    });
                }
                Ok(self.delta_v_prime_analytic(z))
            }
            Method::FiniteDifference => Ok(self.delta_v_prime_fd(z)),
        }
    }

    /// Analytic route when available, finite differences otherwise.
    pub fn delta_v_prime_best(&self, z: f64) -> f64 {
        if self.spec.is_additive() {
            self.delta_v_prime_analytic(z)
        } else {
            self.delta_v_prime_fd(z)
        }
    }

    fn delta_v_prime_analytic(&self, z: f64) -> f64 {
        let p = &self.params;
        let f = p.phi();
        let q = quartic_coefficients(p, self.quartic);
        let d1 = z * (f - 1.0) + 1.0;
        let d2 = z * (1.0 - f) + f;
        p.mu() * q.eval(z) / (2.0 * (p.sigma() - 1.0) * p.sigma() * d1 * d1 * d2 * d2)
    }

    fn delta_v_prime_fd(&self, z: f64) -> f64 {
        let lo = (z - FD_STEP).max(0.0);
        let hi = (z + FD_STEP).min(1.0);
        (self.delta_v(hi) - self.delta_v(lo)) / (hi - lo)
    }

    /// ∂Δv/∂b for the additive specification.
    pub fn d_delta_v_db(&self, z: f64) -> Result<f64> {
        if !self.spec.is_additive() {
            return Err(Error::SpecMismatch {
                operation: "d_delta_v_db",
                spec: self.spec.kind().to_string(),
            });
        }
        Ok(d_delta_v_db(&self.params, z))
    }
}

/// ∂Δv/∂b for the additive specification.
pub fn d_delta_v_db(p: &ModelParams, z: f64) -> f64 {
    let (l, g, s, f) = (p.lambda(), p.gamma(), p.sigma(), p.phi());
    let num = g * p.mu() * (2.0 * z - 1.0) * (f + 1.0) * (l - 4.0 * z * z + f * (l + 4.0 * (z - 1.0) * z + 2.0) + 4.0 * z);
    num / (2.0 * s * (z * (f - 1.0) + 1.0) * (z * (1.0 - f) + f))
}
