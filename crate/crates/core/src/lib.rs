//! Equilibria, thresholds and bifurcation structure of a two-region
//! new-economic-geography model with endogenous innovation.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] and [`innovation`] describe a parameter point and the
//!   interaction term that drives innovation;
//! * [`model`] evaluates wages, the utility differential and its slope;
//! * [`equilibria`] locates and classifies equilibria at a point;
//! * [`thresholds`] evaluates the closed-form break, sustain and stability
//!   thresholds;
//! * [`bifurcation`] sweeps a parameter, links branches, locates events and
//!   matches the result against the scenario taxonomy;
//! * [`report`], [`validate`] and [`cli`] produce output, self-checks and the
//!   command line front end.

pub mod bifurcation;
pub mod cli;
pub mod equilibria;
pub mod error;
pub mod fixtures;
pub mod innovation;
pub mod model;
pub mod params;
pub mod report;
pub mod roots;
pub mod thresholds;
pub mod validate;

pub use error::{Error, Result, Warning};
pub use innovation::InnovationSpec;
pub use model::Model;
pub use params::ModelParams;
