use thiserror::Error;

/// Errors raised by model construction and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible domain. The message names the field.
    #[error("{name} must {requirement} (got {value})")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    /// A custom interaction function violates its shape restrictions.
    #[error("invalid innovation specification: {0}")]
    InvalidSpec(String),

    /// The requested operation only exists in closed form for another specification.
    #[error("{operation} requires the additive specification, got {spec}")]
    SpecMismatch {
        operation: &'static str,
        spec: String,
    },

    #[error("argument outside the domain of {operation}: {detail}")]
    Domain {
        operation: &'static str,
        detail: String,
    },

    /// λ*(z) is singular at b = b̂.
    #[error("lambda*(z) has a vertical asymptote: |b - b_hat| = {gap:e}")]
    Asymptote { gap: f64 },

    #[error("z = {z} is not an admissible asymmetric equilibrium (lambda*(z) = {lambda_star})")]
    InvalidEquilibrium { z: f64, lambda_star: f64 },

    #[error("phi = {phi} is not a break point (|B(phi)| = {residual:e})")]
    NotABreakPoint { phi: f64, residual: f64 },

    #[error("root finder failed on [{lo}, {hi}]: {reason}")]
    RootFinding { lo: f64, hi: f64, reason: String },

    #[error("diagram does not match any known scenario; regime sequence: {sequence}")]
    Unclassified { sequence: String },

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal conditions recorded alongside results.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// Two distinct roots were refined to within one grid cell of each other.
    GridTooCoarse { z_a: f64, z_b: f64, cell: f64 },
    /// Two same-kind branches passed within the ambiguity threshold at
    /// adjacent grid values.
    LinkingAmbiguity { param: f64, z: f64 },
    /// The existence certificate and direct evaluation disagree.
    CertificateDisagreement { detail: String },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::GridTooCoarse { z_a, z_b, cell } => {
                write!(f, "grid too coarse: roots {z_a} and {z_b} lie within one cell ({cell})")
            }
            Warning::LinkingAmbiguity { param, z } => write!(f, "ambiguous branch linking at param {param}, z {z}"),
            Warning::CertificateDisagreement { detail } => write!(f, "existence certificate disagrees: {detail}"),
        }
    }
}
