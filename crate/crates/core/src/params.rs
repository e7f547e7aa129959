//! Parameter tuples.
//!
//! [`ModelParams`] holds everything the utility differential depends on. The
//! level constants that cancel out of the differential live in
//! [`DiagnosticConstants`] and are only used to report innovation probabilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Structural parameters plus the freeness of trade.
///
/// Values are validated on construction and never mutated afterwards; the
/// `with_*` methods return new, re-validated copies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    mu: f64,
    sigma: f64,
    lambda: f64,
    gamma: f64,
    b: f64,
    phi: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawParams {
    #[serde(default = "default_mu")]
    mu: f64,
    sigma: f64,
    lambda: f64,
    gamma: f64,
    b: f64,
    phi: f64,
}

fn default_mu() -> f64 {
    1.0
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::with_mu_checked(raw.lambda, raw.gamma, raw.sigma, raw.b, raw.phi, raw.mu)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            mu: p.mu,
            sigma: p.sigma,
            lambda: p.lambda,
            gamma: p.gamma,
            b: p.b,
            phi: p.phi,
        }
    }
}

fn check(name: &'static str, value: f64, ok: bool, requirement: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            requirement,
            value,
        })
    }
}

fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    check(name, value, value > 0.0 && value < 1.0, "lie in (0,1)")
}

impl ModelParams {
    /// Builds a parameter point in the `(λ, γ, σ, b)` order used for scenario
    /// tuples, with `μ = 1`.
    pub fn new(lambda: f64, gamma: f64, sigma: f64, b: f64, phi: f64) -> Result<Self> {
        Self::with_mu_checked(lambda, gamma, sigma, b, phi, 1.0)
    }

    fn with_mu_checked(lambda: f64, gamma: f64, sigma: f64, b: f64, phi: f64, mu: f64) -> Result<Self> {
        check("mu", mu, mu > 0.0, "be positive")?;
        check("sigma", sigma, sigma > 1.0, "be greater than 1")?;
        check("lambda", lambda, lambda > 0.0, "be positive")?;
        check("gamma", gamma, gamma > 0.0, "be positive")?;
        check_open_unit("b", b)?;
        check_open_unit("phi", phi)?;
        Ok(ModelParams {
            mu,
            sigma,
            lambda,
            gamma,
            b,
            phi,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::with_mu_checked(self.lambda, self.gamma, self.sigma, self.b, self.phi, mu)
    }
    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        Self::with_mu_checked(self.lambda, self.gamma, self.sigma, self.b, phi, self.mu)
    }
    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::with_mu_checked(self.lambda, self.gamma, self.sigma, b, self.phi, self.mu)
    }
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::with_mu_checked(lambda, self.gamma, self.sigma, self.b, self.phi, self.mu)
    }
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::with_mu_checked(self.lambda, gamma, self.sigma, self.b, self.phi, self.mu)
    }
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::with_mu_checked(self.lambda, self.gamma, sigma, self.b, self.phi, self.mu)
    }
}

/// Level constants of the innovation technology that cancel out of Δv.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticConstants {
    /// Aggregate quality (knowledge) index.
    a_index: f64,
    /// Quality level of the variety, above the lowest grade.
    quality: f64,
    /// Scientists per R&D firm.
    alpha: f64,
    /// Variable labour requirement.
    beta: f64,
    /// Numéraire endowment.
    b_bar: f64,
}

impl DiagnosticConstants {
    /// `b_bar` must exceed the expenditure share `mu` of the parameter point
    /// these constants are combined with.
    pub fn new(a_index: f64, quality: f64, alpha: f64, beta: f64, b_bar: f64, mu: f64) -> Result<Self> {
        check("A", a_index, a_index > 0.0, "be positive")?;
        check("a", quality, quality > 1.0, "be greater than 1")?;
        check("alpha", alpha, alpha > 0.0, "be positive")?;
        check("beta", beta, beta > 0.0, "be positive")?;
        check("B_bar", b_bar, b_bar > mu, "exceed mu")?;
        Ok(DiagnosticConstants {
            a_index,
            quality,
            alpha,
            beta,
            b_bar,
        })
    }

    pub fn a_index(&self) -> f64 {
        self.a_index
    }
    pub fn quality(&self) -> f64 {
        self.quality
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn b_bar(&self) -> f64 {
        self.b_bar
    }
}

/// Share of mobile scientists located in region 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Share(f64);

impl Share {
    pub const SYMMETRIC: Share = Share(0.5);

    pub fn new(z: f64) -> Result<Self> {
        check("z", z, (0.0..=1.0).contains(&z), "lie in [0,1]")?;
        Ok(Share(z))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Region-2 share, `1 - z`.
    pub fn other(self) -> f64 {
        1.0 - self.0
    }

    pub fn mirror(self) -> Share {
        Share(1.0 - self.0)
    }
}

impl From<Share> for f64 {
    fn from(s: Share) -> f64 {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_values() {
        let err = ModelParams::new(2.0, 1.0, 8.0, 1.5, 0.3).unwrap_err();
        assert!(err.to_string().contains("b must lie in (0,1)"), "{err}");
        assert!(ModelParams::new(2.0, 1.0, 1.0, 0.3, 0.3).is_err());
        assert!(ModelParams::new(0.0, 1.0, 8.0, 0.3, 0.3).is_err());
        assert!(ModelParams::new(2.0, -1.0, 8.0, 0.3, 0.3).is_err());
        assert!(ModelParams::new(2.0, 1.0, 8.0, 0.3, 1.0).is_err());
        assert!(ModelParams::new(2.0, 1.0, 8.0, 0.3, f64::NAN).is_err());
        assert!(ModelParams::new(2.0, 1.0, 8.0, 0.3, 0.3).unwrap().with_mu(0.0).is_err());
    }

    #[test]
    fn with_phi_returns_a_copy() {
        let p = ModelParams::new(2.0, 1.0, 8.0, 0.33, 0.3).unwrap();
        let q = p.with_phi(0.7).unwrap();
        assert_eq!(p.phi(), 0.3);
        assert_eq!(q.phi(), 0.7);
        assert_eq!(q.b(), p.b());
    }

    #[test]
    fn phi_is_stored_exactly() {
        let phi = 0.1 + 0.2;
        let p = ModelParams::new(2.0, 1.0, 8.0, 0.33, phi).unwrap();
        assert_eq!(p.phi().to_bits(), phi.to_bits());
    }

    #[test]
    fn serde_enforces_bounds() {
        let ok: ModelParams =
            serde_json::from_str(r#"{"sigma":8,"lambda":2,"gamma":1,"b":0.33,"phi":0.3}"#).unwrap();
        assert_eq!(ok.mu(), 1.0);
        let bad = serde_json::from_str::<ModelParams>(r#"{"sigma":8,"lambda":2,"gamma":1,"b":0.33,"phi":1.3}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn diagnostic_constants_bounds() {
        assert!(DiagnosticConstants::new(2.0, 4.0, 1.0, 1.0, 2.0, 1.0).is_ok());
        assert!(DiagnosticConstants::new(2.0, 1.0, 1.0, 1.0, 2.0, 1.0).is_err());
        assert!(DiagnosticConstants::new(2.0, 4.0, 1.0, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn share_domain() {
        assert!(Share::new(-0.1).is_err());
        assert!(Share::new(1.1).is_err());
        assert_eq!(Share::new(0.3).unwrap().mirror().value(), 0.7);
    }
}
