//! Long-run equilibria, their stability, and the inverse equilibrium curve
//! λ*(z).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::innovation::SpecKind;
use crate::model::Model;
use crate::params::ModelParams;
use crate::roots::{self, Tolerance};

/// Half-width of the band in which a deciding quantity counts as zero.
pub const MARGINAL_TOL: f64 = 1e-9;

pub const DEFAULT_GRID: usize = 2000;
pub const MIN_GRID: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    SymmetricDispersion,
    AsymmetricDispersion,
    Agglomeration,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::SymmetricDispersion => "symmetric",
            Kind::AsymmetricDispersion => "asymmetric",
            Kind::Agglomeration => "agglomeration",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    /// Verdict for a quantity that must be negative for stability.
    pub fn from_negative(x: f64) -> Self {
        if x < -MARGINAL_TOL {
            Stability::Stable
        } else if x > MARGINAL_TOL {
            Stability::Unstable
        } else {
            Stability::Marginal
        }
    }

    pub fn is_stable(self) -> bool {
        self == Stability::Stable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub z_star: f64,
    pub kind: Kind,
    pub stability: Stability,
    /// |Δv(z*)|. For a corner this is the size of the utility gap, not a root
    /// residual.
    pub residual: f64,
    /// Δv'(z*) for interior equilibria.
    pub derivative: Option<f64>,
    /// Δv(1), the utility advantage of the occupied region, for corners.
    pub corner_gap: Option<f64>,
}

impl Equilibrium {
    pub fn mirror(&self) -> Equilibrium {
        Equilibrium {
            z_star: 1.0 - self.z_star,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub params: ModelParams,
    pub spec: SpecKind,
    /// Sorted by `z_star`; asymmetric equilibria and corners come in mirrored pairs.
    pub equilibria: Vec<Equilibrium>,
    /// Number of asymmetric dispersion equilibria in (1/2, 1).
    pub interior_count_upper_half: usize,
    pub warnings: Vec<Warning>,
}

impl EquilibriumSet {
    /// Equilibria with `z* >= 1/2`.
    pub fn upper_half(&self) -> impl Iterator<Item = &Equilibrium> {
        self.equilibria.iter().filter(|e| e.z_star >= 0.5)
    }

    pub fn symmetric(&self) -> &Equilibrium {
        self.equilibria
            .iter()
            .find(|e| e.kind == Kind::SymmetricDispersion)
            .expect("symmetric dispersion is always present")
    }

    /// The corner at z = 1.
    pub fn agglomeration(&self) -> &Equilibrium {
        self.equilibria
            .iter()
            .rev()
            .find(|e| e.kind == Kind::Agglomeration)
            .expect("corners are always reported")
    }

    /// Asymmetric equilibria in (1/2, 1), ordered by z.
    pub fn asymmetric_upper(&self) -> Vec<Equilibrium> {
        self.upper_half()
            .filter(|e| e.kind == Kind::AsymmetricDispersion)
            .copied()
            .collect()
    }

    /// Stable equilibria with `z* >= 1/2`.
    pub fn stable_upper(&self) -> Vec<Equilibrium> {
        self.upper_half().filter(|e| e.stability.is_stable()).copied().collect()
    }
}

/// Enumerates all equilibria on [0,1] for the model's parameter point.
///
/// Δv is scanned on `grid_n` uniform cells over (1/2, 1]. The trivial root at
/// 1/2 is divided out (the scan runs on Δv(z)/(z − 1/2)) so that asymmetric
/// roots arbitrarily close to symmetry are still bracketed.
pub fn find_equilibria(model: &Model, grid_n: usize) -> Result<EquilibriumSet> {
    if grid_n < MIN_GRID {
        return Err(Error::InvalidParameter {
            name: "grid",
            requirement: "be at least 100",
            value: grid_n as f64,
        });
    }
    let reduced = |z: f64| model.delta_v(z) / (z - 0.5);
    let dv_half = model.delta_v_prime_best(0.5);
    let cell = 0.5 / grid_n as f64;

    // (z*, Δv'(z*)) when the derivative had to be estimated from the bracket.
    let mut squeezed: Option<(f64, f64)> = None;
    let mut roots_found: Vec<f64> = Vec::new();
    let mut prev_z = 0.5;
    let mut prev_v = dv_half;
    for k in 1..=grid_n {
        let z = if k == grid_n { 1.0 } else { 0.5 + cell * k as f64 };
        let v = reduced(z);
        if prev_v == 0.0 && prev_z > 0.5 {
            roots_found.push(prev_z);
        } else if prev_v * v < 0.0 {
            // The first cell uses Δv'(1/2) as the left value; the solver needs
            // the reduced function itself, which is continuous there.
            let lo = if prev_z == 0.5 { 0.5 + cell * 1e-6 } else { prev_z };
            let vlo = reduced(lo);
            let root = if vlo * v < 0.0 {
                roots::hybrid(reduced, lo, z, Tolerance { f_abs: 0.0, x_width: 1e-14 })?
            } else {
                // Root squeezed into (1/2, lo), where Δv is at round-off level.
                // Interpolate the reduced function linearly; at a root of it,
                // Δv'(z*) = (z* - 1/2) times its slope.
                let slope = (vlo - dv_half) / (lo - 0.5);
                let z_star = 0.5 - dv_half / slope;
                squeezed = Some((z_star, (z_star - 0.5) * slope));
                z_star
            };
            roots_found.push(root);
        }
        prev_z = z;
        prev_v = v;
    }

    let mut warnings = Vec::new();
    for w in roots_found.windows(2) {
        if w[1] - w[0] < cell {
            warnings.push(Warning::GridTooCoarse {
                z_a: w[0],
                z_b: w[1],
                cell,
            });
        }
    }

    let mut eqs = Vec::new();
    eqs.push(Equilibrium {
        z_star: 0.5,
        kind: Kind::SymmetricDispersion,
        stability: Stability::from_negative(dv_half),
        residual: 0.0,
        derivative: Some(dv_half),
        corner_gap: None,
    });

    let gap = model.delta_v(1.0);
    let mut interior = 0;
    for &z in &roots_found {
        if z >= 1.0 - 1e-12 {
            // Δv(1) = 0: the corner is the root; it is reported as a corner below.
            continue;
        }
        let d = match squeezed {
            Some((zs, d)) if zs == z => d,
            _ => model.delta_v_prime_best(z),
        };
        let e = Equilibrium {
            z_star: z,
            kind: Kind::AsymmetricDispersion,
            stability: Stability::from_negative(d),
            residual: model.delta_v(z).abs(),
            derivative: Some(d),
            corner_gap: None,
        };
        interior += 1;
        eqs.push(e);
        eqs.push(e.mirror());
    }

    let corner = Equilibrium {
        z_star: 1.0,
        kind: Kind::Agglomeration,
        stability: Stability::from_negative(-gap),
        residual: gap.abs(),
        derivative: None,
        corner_gap: Some(gap),
    };
    eqs.push(corner);
    eqs.push(corner.mirror());
    eqs.sort_by(|a, b| a.z_star.total_cmp(&b.z_star));

    for w in &warnings {
        log::debug!("{w}");
    }
    Ok(EquilibriumSet {
        params: *model.params(),
        spec: model.spec().kind(),
        equilibria: eqs,
        interior_count_upper_half: interior,
        warnings,
    })
}

/// `ln[(z(φ−1)+1)/(z(1−φ)+φ)]`, which is zero at z = 1/2.
pub fn log_ratio(z: f64, phi: f64) -> f64 {
    ((z * (phi - 1.0) + 1.0) / (z * (1.0 - phi) + phi)).ln()
}

/// `b̂ = (1+φ²)/(1+φ)²`, the location of the vertical asymptote of λ*(z).
pub fn b_hat(phi: f64) -> f64 {
    (1.0 + phi * phi) / ((1.0 + phi) * (1.0 + phi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaStar {
    pub value: f64,
    /// True iff λ*(z) > 0.
    pub admissible: bool,
}

fn check_upper_half(operation: &'static str, z: f64, closed: bool) -> Result<()> {
    let ok = z > 0.5 && if closed { z <= 1.0 } else { z < 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            operation,
            detail: format!("z = {z} must lie in (1/2, 1{}", if closed { "]" } else { ")" }),
        })
    }
}

/// The immobile-worker mass λ*(z) that makes `z` an interior equilibrium.
/// `params.lambda` is ignored.
pub fn lambda_star(params: &ModelParams, z: f64) -> Result<LambdaStar> {
    check_upper_half("lambda_star", z, true)?;
    let (g, s, b, f) = (params.gamma(), params.sigma(), params.b(), params.phi());
    let gap = (b - b_hat(f)).abs();
    if gap < 1e-12 {
        return Err(Error::Asymptote { gap });
    }
    let gs = g * (s - 1.0);
    let b1 = gs * (2.0 * z - 1.0);
    let b2 = f * f * (2.0 * b * (z - 1.0) * z + b - z * z + z - 1.0) + (1.0 - 2.0 * b) * (z - 1.0) * z + b * f;
    let b3 = s * (z * (f - 1.0) + 1.0) * (z * (f - 1.0) - f);
    let b4 = gs * (2.0 * z - 1.0) * (b * (f + 1.0) * (f + 1.0) - f * f - 1.0);
    let value = -2.0 * (b1 * b2 + b3 * log_ratio(z, f)) / b4;
    Ok(LambdaStar {
        value,
        admissible: value > 0.0,
    })
}

/// 𝒢(z): the sign of Δv'(z) once λ = λ*(z) has been substituted.
pub fn asymmetric_condition(params: &ModelParams, z: f64) -> f64 {
    let (g, s, b, f) = (params.gamma(), params.sigma(), params.b(), params.phi());
    let q = 2.0 * z * z * (f - 1.0).powi(2) - 2.0 * z * (f - 1.0).powi(2) + f * f + 1.0;
    let u = 1.0 - 2.0 * z;
    (2.0 * z - 1.0) * (f * f - 1.0) * ((2.0 * b - 1.0) * g * (s - 1.0) * u * u - s) + s * q * log_ratio(z, f)
}

/// Stability of the asymmetric equilibrium at `z` on the λ*(z) curve.
pub fn asymmetric_stability(params: &ModelParams, z: f64) -> Result<Stability> {
    check_upper_half("asymmetric_stability", z, false)?;
    let ls = lambda_star(params, z)?;
    if !ls.admissible {
        return Err(Error::InvalidEquilibrium {
            z,
            lambda_star: ls.value,
        });
    }
    Ok(Stability::from_negative(asymmetric_condition(params, z)))
}
