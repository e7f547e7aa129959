//! Regional interaction functions `g(z)` that weight the innovation
//! probability of an R&D firm by where its scientists work.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DiagnosticConstants, ModelParams};

/// Which region an evaluation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    One,
    Two,
}

impl Region {
    /// Own and foreign scientist shares seen from this region.
    pub fn shares(self, z: f64) -> (f64, f64) {
        match self {
            Region::One => (z, 1.0 - z),
            Region::Two => (1.0 - z, z),
        }
    }
}

type GFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A user-supplied interaction function `g(z; b)` with an optional analytic
/// first derivative in `z`.
#[derive(Clone)]
pub struct CustomInteraction {
    name: String,
    g: Arc<GFn>,
    dg: Option<Arc<GFn>>,
}

impl CustomInteraction {
    pub fn new<F>(name: impl Into<String>, g: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        CustomInteraction {
            name: name.into(),
            g: Arc::new(g),
            dg: None,
        }
    }

    pub fn with_derivative<F>(mut self, dg: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.dg = Some(Arc::new(dg));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomInteraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomInteraction")
            .field("name", &self.name)
            .field("analytic_derivative", &self.dg.is_some())
            .finish()
    }
}

/// The interaction function used in the innovation probability.
#[derive(Debug, Clone)]
pub enum InnovationSpec {
    /// `g(z) = b z + (1-b)(1-z)`.
    Additive,
    /// `g(z) = z^b (1-z)^(1-b)`.
    CobbDouglas,
    Custom(CustomInteraction),
}

/// Serializable tag for a specification. Custom functions cannot be
/// serialized, only named.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecKind {
    Additive,
    CobbDouglas,
    Custom(String),
}

impl fmt::Display for SpecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecKind::Additive => f.write_str("additive"),
            SpecKind::CobbDouglas => f.write_str("cobb-douglas"),
            SpecKind::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

const FD_STEP: f64 = 1e-6;

impl InnovationSpec {
    pub fn kind(&self) -> SpecKind {
        match self {
            InnovationSpec::Additive => SpecKind::Additive,
            InnovationSpec::CobbDouglas => SpecKind::CobbDouglas,
            InnovationSpec::Custom(c) => SpecKind::Custom(c.name.clone()),
        }
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, InnovationSpec::Additive)
    }

    /// `g(z)` for the region that holds share `z`.
    pub fn g(&self, z: f64, b: f64) -> f64 {
        match self {
            InnovationSpec::Additive => b * z + (1.0 - b) * (1.0 - z),
            InnovationSpec::CobbDouglas => {
                // 0^0 = 1 in powf, which is what the limit gives for b -> 0 too.
                z.powf(b) * (1.0 - z).powf(1.0 - b)
            }
            InnovationSpec::Custom(c) => (c.g)(z, b),
        }
    }

    /// `g'(z)`, analytic where known, otherwise a central difference.
    pub fn g_prime(&self, z: f64, b: f64) -> f64 {
        match self {
            InnovationSpec::Additive => 2.0 * b - 1.0,
            InnovationSpec::CobbDouglas if z > 0.0 && z < 1.0 => {
                self.g(z, b) * (b / z - (1.0 - b) / (1.0 - z))
            }
            InnovationSpec::Custom(CustomInteraction { dg: Some(dg), .. }) => dg(z, b),
            _ => {
                let lo = (z - FD_STEP).max(0.0);
                let hi = (z + FD_STEP).min(1.0);
                (self.g(hi, b) - self.g(lo, b)) / (hi - lo)
            }
        }
    }

    /// Samples a custom `g` on 1001 points and checks its range and the
    /// monotonicity on `[1/2, 1]` implied by `b`. Built-in specs always pass.
    pub fn validate(&self, b: f64) -> Result<()> {
        let InnovationSpec::Custom(c) = self else {
            return Ok(());
        };
        const N: usize = 1000;
        for i in 0..=N {
            let z = i as f64 / N as f64;
            let v = (c.g)(z, b);
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "{}: g({z}) = {v} lies outside [0,1]",
                    c.name
                )));
            }
        }
        if b == 0.5 {
            return Ok(());
        }
        let want_increasing = b > 0.5;
        for i in 0..=N {
            let z = 0.5 + 0.5 * i as f64 / N as f64;
            let d = self.g_prime(z, b);
            let ok = if want_increasing { d > 0.0 } else { d < 0.0 };
            if !ok {
                return Err(Error::InvalidSpec(format!(
                    "{}: g'({z}) = {d} but b = {b} requires g to be {} on [1/2,1]",
                    c.name,
                    if want_increasing { "increasing" } else { "decreasing" }
                )));
            }
        }
        Ok(())
    }
}

/// `g_i(z)` for the given region; region 2 evaluates `g(1-z)`.
pub fn innovation_weight(spec: &InnovationSpec, params: &ModelParams, z: f64, region: Region) -> f64 {
    let (own, _) = region.shares(z);
    spec.g(own, params.b())
}

/// Capped innovation probability together with a flag that is set when the
/// cap at one binds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnovationProbability {
    pub value: f64,
    pub capped: bool,
}

/// `min{g_i(z) γ A / a, 1}`. Diagnostic only: equilibrium computations use the
/// uncapped weight.
pub fn innovation_probability(
    spec: &InnovationSpec,
    params: &ModelParams,
    z: f64,
    region: Region,
    diag: &DiagnosticConstants,
) -> InnovationProbability {
    let raw = innovation_weight(spec, params, z, region) * params.gamma() * diag.a_index() / diag.quality();
    InnovationProbability {
        value: raw.min(1.0),
        capped: raw > 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(b: f64) -> ModelParams {
        ModelParams::new(2.0, 1.0, 8.0, b, 0.3).unwrap()
    }

    #[test]
    fn additive_weights() {
        let s = InnovationSpec::Additive;
        for z in [0.0, 0.2, 0.7, 1.0] {
            assert_eq!(innovation_weight(&s, &params(0.5), z, Region::One), 0.5);
        }
        assert!((innovation_weight(&s, &params(0.33), 1.0, Region::One) - 0.33).abs() < 1e-15);
        assert!((innovation_weight(&s, &params(0.33), 1.0, Region::Two) - 0.67).abs() < 1e-15);
    }

    #[test]
    fn cobb_douglas_weights() {
        let s = InnovationSpec::CobbDouglas;
        assert!((innovation_weight(&s, &params(0.55), 0.5, Region::One) - 0.5).abs() < 1e-15);
        assert_eq!(innovation_weight(&s, &params(0.55), 1.0, Region::One), 0.0);
        assert_eq!(innovation_weight(&s, &params(0.55), 0.0, Region::One), 0.0);
        // g'(1/2) = 2b - 1
        assert!((s.g_prime(0.5, 0.7) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn probability_cap() {
        let s = InnovationSpec::Additive;
        let p = ModelParams::new(2.0, 1.0, 8.0, 0.5, 0.3).unwrap();
        let d = DiagnosticConstants::new(2.0, 4.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        let r = innovation_probability(&s, &p, 0.3, Region::One, &d);
        assert_eq!(r, InnovationProbability { value: 0.25, capped: false });
        let d = DiagnosticConstants::new(10.0, 2.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        let r = innovation_probability(&s, &p, 0.3, Region::One, &d);
        assert_eq!(r, InnovationProbability { value: 1.0, capped: true });
        let cd = InnovationSpec::CobbDouglas;
        let d = DiagnosticConstants::new(1.0, 2.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        for z in [0.0, 1.0] {
            let r = innovation_probability(&cd, &p, z, Region::One, &d);
            assert_eq!(r, InnovationProbability { value: 0.0, capped: false });
        }
    }

    #[test]
    fn custom_validation() {
        let good = InnovationSpec::Custom(CustomInteraction::new("linear", |z, b| b * z + (1.0 - b) * (1.0 - z)));
        assert!(good.validate(0.3).is_ok());
        assert!(good.validate(0.7).is_ok());
        let out_of_range = InnovationSpec::Custom(CustomInteraction::new("big", |z, _| 2.0 * z));
        assert!(out_of_range.validate(0.7).is_err());
        // increasing g with b < 1/2 violates the shape restriction
        let wrong = InnovationSpec::Custom(CustomInteraction::new("up", |z, _| z));
        assert!(matches!(wrong.validate(0.3), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn spec_kind_names() {
        assert_eq!(InnovationSpec::Additive.kind().to_string(), "additive");
        assert_eq!(InnovationSpec::CobbDouglas.kind().to_string(), "cobb-douglas");
    }
}
