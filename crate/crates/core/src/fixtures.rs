//! Scenario parameter sets shipped with the crate.

use serde::Deserialize;

use crate::equilibria::Stability;
use crate::error::{Error, Result};
use crate::innovation::InnovationSpec;
use crate::model::Model;
use crate::params::ModelParams;

const SCENARIOS: &str = include_str!("../fixtures/scenarios.toml");
const GALLERY: &str = include_str!("../fixtures/gallery.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// The reference tuple for the scenario.
    Reference,
    /// A variant that reproduces the described structure.
    Corroboration,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecName {
    #[default]
    Additive,
    CobbDouglas,
}

impl SpecName {
    pub fn spec(self) -> InnovationSpec {
        match self {
            SpecName::Additive => InnovationSpec::Additive,
            SpecName::CobbDouglas => InnovationSpec::CobbDouglas,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub expected: String,
    pub origin: Origin,
    #[serde(default)]
    pub spec: SpecName,
    pub lambda: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub b: f64,
    #[serde(default)]
    pub note: Option<String>,
}

impl Scenario {
    /// Model at the given trade freeness.
    pub fn model(&self, phi: f64) -> Result<Model> {
        Model::new(self.spec.spec(), ModelParams::new(self.lambda, self.gamma, self.sigma, self.b, phi)?)
    }
}

#[derive(Deserialize)]
struct ScenarioFile {
    scenario: Vec<Scenario>,
}

pub fn scenarios() -> Vec<Scenario> {
    let f: ScenarioFile = toml::from_str(SCENARIOS).expect("bundled scenario fixtures parse");
    f.scenario
}

pub fn scenario(name: &str) -> Result<Scenario> {
    scenarios()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::Config(format!("unknown scenario `{name}`")))
}

#[derive(Debug, Clone, Deserialize)]
pub struct Panel {
    pub phi: f64,
    pub label: String,
    pub symmetric: Stability,
    pub agglomeration: Stability,
    /// Stability of each asymmetric equilibrium in (1/2, 1), ascending in z.
    pub asymmetric: Vec<Stability>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Gallery {
    pub lambda: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub b: f64,
    pub panel: Vec<Panel>,
}

impl Gallery {
    pub fn params(&self, phi: f64) -> Result<ModelParams> {
        ModelParams::new(self.lambda, self.gamma, self.sigma, self.b, phi)
    }
}

pub fn gallery() -> Gallery {
    toml::from_str(GALLERY).expect("bundled gallery fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        let s = scenarios();
        assert!(s.len() >= 20);
        assert_eq!(scenario("cd-f").unwrap().spec, SpecName::CobbDouglas);
        assert!(scenario("nope").is_err());
        for sc in &s {
            assert!(sc.model(0.5).is_ok(), "{}", sc.name);
        }
        assert_eq!(gallery().panel.len(), 5);
    }
}
