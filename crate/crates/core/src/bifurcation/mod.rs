//! One-parameter sweeps: equilibrium branches, bifurcation events and the
//! scenario taxonomy.

pub mod scenario;
pub mod sweep;

pub use scenario::{classify_scenario, format_sequence, hysteresis_windows, regime_sequence, Classification, Regime, Token};
pub use sweep::{
    sweep, BifurcationDiagram, Branch, BranchPoint, Endpoint, Event, EventKind, Slice, SweepOptions, SweptParameter,
};
