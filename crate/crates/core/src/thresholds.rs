//! Closed-form critical values of the additive model: the sustain and break
//! conditions and their roots, the thresholds on `b` that govern interior
//! equilibria, pitchfork criticality, and break points for a general `g`.
//!
//! Every closed form here is checked against direct evaluation of the
//! condition it solves; see the unit tests and the acceptance suite.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equilibria::{b_hat, log_ratio, lambda_star};
use crate::error::{Error, Result, Warning};
use crate::innovation::InnovationSpec;
use crate::model::{Method, Model};
use crate::params::ModelParams;
use crate::roots::{self, Tolerance};

/// φ-roots are searched inside `[PHI_MIN, PHI_MAX]`.
pub const PHI_MIN: f64 = 1e-4;
pub const PHI_MAX: f64 = 1.0 - 1e-4;
/// Guard band for existence flags.
pub const GUARD: f64 = 1e-12;
/// A candidate break point must satisfy |𝓑(φ)| below this.
pub const BREAK_RESIDUAL_TOL: f64 = 1e-9;

/// Three-valued existence flag. `Boundary` marks values within the guard band
/// of an interval end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Existence {
    Exists,
    Absent,
    Boundary,
}

impl Existence {
    /// Membership of `x` in the open interval `(lo, hi)`.
    pub fn open(x: f64, lo: f64, hi: f64) -> Self {
        if !x.is_finite() {
            Existence::Absent
        } else if (x - lo).abs() <= GUARD || (x - hi).abs() <= GUARD {
            Existence::Boundary
        } else if x > lo && x < hi {
            Existence::Exists
        } else {
            Existence::Absent
        }
    }

    /// Membership in `[lo, hi)`; the closed end is still flagged `Boundary`.
    pub fn half_open(x: f64, lo: f64, hi: f64) -> Self {
        Self::open(x, lo, hi)
    }

    pub fn exists(self) -> bool {
        self == Existence::Exists
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Existence::Exists => "exists",
            Existence::Absent => "absent",
            Existence::Boundary => "boundary",
        }
    }
}

impl fmt::Display for Existence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

// ---------------------------------------------------------------------------
// Sustain condition

/// 𝒮 at an arbitrary φ; Δv(1) = μ·𝒮(φ).
pub fn sustain_condition_at(p: &ModelParams, phi: f64) -> f64 {
    let (l, g, s, b) = (p.lambda(), p.gamma(), p.sigma(), p.b());
    g * ((b - 1.0) * (l + 2.0) * phi * phi + 2.0 * b * (l + 1.0) * phi + (b - 1.0) * l) / (2.0 * s * phi) - phi.ln() / (s - 1.0)
}

/// 𝒮(φ). Agglomeration is stable iff this is positive.
pub fn sustain_condition(p: &ModelParams) -> f64 {
    sustain_condition_at(p, p.phi())
}

/// 𝒮(1) = γ(2b−1)(λ+1)/σ.
pub fn sustain_limit(p: &ModelParams) -> f64 {
    p.gamma() * (2.0 * p.b() - 1.0) * (p.lambda() + 1.0) / p.sigma()
}

/// Interior maximiser φ⁺ of 𝒮. It can exceed one, in which case 𝒮 is
/// increasing on the whole unit interval.
pub fn phi_plus(p: &ModelParams) -> f64 {
    let (l, g, s, b) = (p.lambda(), p.gamma(), p.sigma(), p.b());
    let inv = 1.0 / (s - 1.0);
    let root = (g * g * (b - 1.0).powi(2) * l * (l + 2.0) / (s * s) + inv * inv).sqrt();
    s * (inv - root) / (g * (b - 1.0) * (l + 2.0))
}

/// Roots of 𝒮 in `[PHI_MIN, PHI_MAX]`, ordered. 𝒮 is increasing up to φ⁺
/// and decreasing afterwards, so each monotone piece holds at most one root.
pub fn sustain_points(p: &ModelParams) -> Vec<f64> {
    let f = |phi: f64| sustain_condition_at(p, phi);
    let peak = phi_plus(p).clamp(PHI_MIN, PHI_MAX);
    let tol = Tolerance {
        f_abs: 0.0,
        x_width: 1e-15,
    };
    let mut out = Vec::new();
    for (lo, hi) in [(PHI_MIN, peak), (peak, PHI_MAX)] {
        if hi > lo && f(lo) * f(hi) < 0.0 {
            if let Ok(r) = roots::hybrid(f, lo, hi, tol) {
                out.push(r);
            }
        }
    }
    out
}

/// `b_s`: the value of `b` above which the first term of 𝒮 is positive.
pub fn b_s(p: &ModelParams) -> f64 {
    let (l, f) = (p.lambda(), p.phi());
    ((l + 2.0) * f * f + l) / ((f + 1.0) * ((l + 2.0) * f + l))
}

/// The `b` that solves 𝒮 = 0 at the current φ (𝒮 is linear in `b`).
pub fn sustain_b(p: &ModelParams) -> f64 {
    let (l, g, s, f) = (p.lambda(), p.gamma(), p.sigma(), p.phi());
    // 𝒮 = γ[b·c1 − c0]/(2σφ) − lnφ/(σ−1)
    let c1 = (l + 2.0) * f * f + 2.0 * (l + 1.0) * f + l;
    let c0 = (l + 2.0) * f * f + l;
    (c0 + 2.0 * s * f * f.ln() / (g * (s - 1.0))) / c1
}

// ---------------------------------------------------------------------------
// Break condition

/// 𝓑 at an arbitrary φ. Symmetric dispersion is stable iff this is negative.
pub fn break_condition_at(p: &ModelParams, phi: f64) -> f64 {
    let (l, g, s, b) = (p.lambda(), p.gamma(), p.sigma(), p.b());
    g * (s - 1.0) * (2.0 * b * (l + 1.0) * (phi + 1.0).powi(2) - (2.0 * l + 3.0) * phi * phi - 2.0 * l - 1.0)
        + 2.0 * s * (1.0 - phi * phi)
}

pub fn break_condition(p: &ModelParams) -> f64 {
    break_condition_at(p, p.phi())
}

/// `b̄`: above it, 𝓑 > 0 whatever the innovation efficiency.
pub fn b_bar(p: &ModelParams) -> f64 {
    let (l, f) = (p.lambda(), p.phi());
    ((2.0 * l + 3.0) * f * f + 2.0 * l + 1.0) / (2.0 * (l + 1.0) * (f + 1.0).powi(2))
}

/// The `b` that solves 𝓑 = 0 at the current φ (𝓑 is linear in `b`).
pub fn break_b(p: &ModelParams) -> f64 {
    let (l, g, s, f) = (p.lambda(), p.gamma(), p.sigma(), p.phi());
    let rest = (2.0 * l + 3.0) * f * f + 2.0 * l + 1.0 - 2.0 * s * (1.0 - f * f) / (g * (s - 1.0));
    rest / (2.0 * (l + 1.0) * (f + 1.0).powi(2))
}

/// The two closed-form roots of 𝓑 in φ, in the conventional order. NaN when the
/// discriminant is negative.
pub fn break_point_formulas(p: &ModelParams) -> (f64, f64) {
    let (l, g, s, b) = (p.lambda(), p.gamma(), p.sigma(), p.b());
    let gs = g * (s - 1.0);
    let d = gs * gs * (8.0 * b * (l + 1.0).powi(2) - 4.0 * l * l - 8.0 * l - 3.0) + 4.0 * g * s * (s - 1.0) + 4.0 * s * s;
    let den = gs * (2.0 * b * (l + 1.0) - 2.0 * l - 3.0) - 2.0 * s;
    let sq = d.sqrt();
    let lin = 2.0 * b * gs * (l + 1.0);
    ((sq - lin) / den, -(sq + lin) / den)
}

/// Lower end of the existence window for `b`.
pub fn b_lower(p: &ModelParams) -> f64 {
    let (l, g, s) = (p.lambda(), p.gamma(), p.sigma());
    let gs = g * (s - 1.0);
    (gs * (2.0 * l + 1.0) - 2.0 * s) * (gs * (2.0 * l + 3.0) + 2.0 * s) / (8.0 * gs * gs * (l + 1.0).powi(2))
}

/// Upper end of the existence window for `b`.
pub fn b_upper(p: &ModelParams) -> f64 {
    let (l, g, s) = (p.lambda(), p.gamma(), p.sigma());
    let gs = g * (s - 1.0);
    (gs * (2.0 * l + 1.0) - 2.0 * s) / (2.0 * gs * (l + 1.0))
}

/// Window `(2σ/((2λ+1)(σ−1)), 1)` for γ.
pub fn gamma_window(p: &ModelParams) -> (f64, f64) {
    (2.0 * p.sigma() / ((2.0 * p.lambda() + 1.0) * (p.sigma() - 1.0)), 1.0)
}

/// One closed-form break point and whether it lies in (0,1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    /// Closed-form value, possibly outside (0,1); NaN if complex.
    pub value: f64,
    pub existence: Existence,
}

impl RootReport {
    pub fn admissible(&self) -> Option<f64> {
        self.existence.exists().then_some(self.value)
    }
}

/// The closed-form sufficient conditions for break points to exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakCertificate {
    pub b1: f64,
    pub b2: f64,
    pub gamma_window: (f64, f64),
    /// Condition (i): γ inside the window.
    pub gamma_condition: Existence,
    /// Condition (ii): b in [b₁, b₂).
    pub b_condition: Existence,
    pub predicts_phi_b1: bool,
    pub predicts_phi_b2: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakPoints {
    pub phi_b1: RootReport,
    pub phi_b2: RootReport,
    pub certificate: BreakCertificate,
    pub warnings: Vec<Warning>,
}

impl BreakPoints {
    /// Break points in (0,1), ascending.
    pub fn admissible(&self) -> Vec<f64> {
        let mut v: Vec<f64> = [self.phi_b1, self.phi_b2].iter().filter_map(|r| r.admissible()).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn root_report(p: &ModelParams, value: f64) -> RootReport {
    let mut existence = Existence::open(value, 0.0, 1.0);
    if existence.exists() {
        let scale = 1.0 + p.gamma() * (p.sigma() - 1.0) * (p.lambda() + 1.0) + p.sigma();
        if break_condition_at(p, value).abs() > BREAK_RESIDUAL_TOL * scale {
            existence = Existence::Absent;
        }
    }
    RootReport { value, existence }
}

/// Break points from the closed forms. Existence is decided by direct
/// evaluation; the sufficient-condition certificate is reported alongside and any
/// disagreement is logged.
pub fn break_points(p: &ModelParams) -> BreakPoints {
    let (r1, r2) = break_point_formulas(p);
    let phi_b1 = root_report(p, r1);
    let phi_b2 = root_report(p, r2);

    let b1 = b_lower(p);
    let b2 = b_upper(p);
    let gw = gamma_window(p);
    let gamma_condition = Existence::open(p.gamma(), gw.0, gw.1);
    let b_condition = Existence::half_open(p.b(), b1, b2);
    let both = gamma_condition.exists() && b_condition.exists();
    let certificate = BreakCertificate {
        b1,
        b2,
        gamma_window: gw,
        gamma_condition,
        b_condition,
        predicts_phi_b1: both,
        predicts_phi_b2: both && p.b() < 0.5,
    };

    let mut warnings = Vec::new();
    let undecided = gamma_condition == Existence::Boundary || b_condition == Existence::Boundary;
    for (name, predicted, actual) in [
        ("phi_b1", certificate.predicts_phi_b1, phi_b1.existence.exists()),
        ("phi_b2", certificate.predicts_phi_b2, phi_b2.existence.exists()),
    ] {
        if predicted && !actual || (!predicted && actual && !undecided) {
            let w = Warning::CertificateDisagreement {
                detail: format!("{name}: certificate predicts {predicted}, direct evaluation finds {actual}"),
            };
            log::debug!("{w}");
            warnings.push(w);
        }
    }
    BreakPoints {
        phi_b1,
        phi_b2,
        certificate,
        warnings,
    }
}

// ---------------------------------------------------------------------------
// Thresholds on b for interior equilibria

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImmobileThresholds {
    pub z: f64,
    pub b_hat: f64,
    pub b_underline: f64,
    pub b_tilde: f64,
    pub gamma_c: f64,
    /// λ*(z) > 0 iff b lies in (max{0, b̃}, b̂).
    pub band: (f64, f64),
    pub b_in_band: bool,
}

/// `b̂, b̲, b̃, γ_c` at `z`.
pub fn immobile_thresholds(p: &ModelParams, z: f64) -> Result<ImmobileThresholds> {
    if !(z > 0.5 && z <= 1.0) {
        return Err(Error::Domain {
            operation: "immobile_thresholds",
            detail: format!("z = {z} must lie in (1/2, 1]"),
        });
    }
    let (g, s, f) = (p.gamma(), p.sigma(), p.phi());
    let gs = g * (s - 1.0);
    let lr = log_ratio(z, f);
    let core = (z - 1.0) * z * (f * f - 1.0) + f * f;
    let b_underline = core / (2.0 * (z - 1.0) * z * (f * f - 1.0) + f * (f + 1.0));
    let num = gs * (2.0 * z - 1.0) * core - s * (z * (f - 1.0) + 1.0) * (z * (f - 1.0) - f) * lr;
    let den = gs * (2.0 * z - 1.0) * (f + 1.0) * (2.0 * (z - 1.0) * z * (f - 1.0) + f);
    let b_tilde = num / den;
    let gamma_c = s * (z * (1.0 - f) - 1.0) * (z * (1.0 - f) + f) * lr / ((s - 1.0) * (2.0 * z - 1.0) * core);
    let bh = b_hat(f);
    let band = (b_tilde.max(0.0), bh);
    Ok(ImmobileThresholds {
        z,
        b_hat: bh,
        b_underline,
        b_tilde,
        gamma_c,
        band,
        b_in_band: p.b() > band.0 && p.b() < band.1,
    })
}

/// `b_c(z, φ)`: the asymmetric equilibrium at `z` is stable iff `b > b_c`.
/// This is the root of 𝒢 in `b`.
pub fn asym_b_critical(p: &ModelParams, z: f64) -> f64 {
    b_critical_with_sign(p, z, 1.0)
}

/// `b_c` with the opposite sign on the logarithmic term. It is not a root of
/// 𝒢; kept to document the discrepancy.
pub fn asym_b_critical_flipped(p: &ModelParams, z: f64) -> f64 {
    b_critical_with_sign(p, z, -1.0)
}

fn b_critical_with_sign(p: &ModelParams, z: f64, sign: f64) -> f64 {
    let (g, s, f) = (p.gamma(), p.sigma(), p.phi());
    let u = 2.0 * z - 1.0;
    let q = 2.0 * z * z * (f - 1.0).powi(2) - 2.0 * z * (f - 1.0).powi(2) + f * f + 1.0;
    let num = u * (1.0 - f * f) * (s + g * (s - 1.0) * u * u) + sign * s * q * log_ratio(z, f);
    num / (2.0 * g * (s - 1.0) * u.powi(3) * (1.0 - f * f))
}

// ---------------------------------------------------------------------------
// Pitchfork criticality

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PitchforkClass {
    Supercritical,
    Subcritical,
    Degenerate,
}

impl PitchforkClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PitchforkClass::Supercritical => "supercritical",
            PitchforkClass::Subcritical => "subcritical",
            PitchforkClass::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for PitchforkClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Finite-difference partial derivatives of f(z, φ) = Δv at (1/2, φ_b).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchforkDerivatives {
    pub df_dz: f64,
    pub d2f_dz2: f64,
    pub df_dphi: f64,
    pub d2f_dphi_dz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pitchfork {
    pub phi_b: f64,
    pub xi: f64,
    pub class: PitchforkClass,
    /// Present when φ_b lies in (0,1) so that the model can be evaluated there.
    pub derivatives: Option<PitchforkDerivatives>,
}

/// ξ and its two terms at φ.
fn xi_terms(p: &ModelParams, phi: f64) -> (f64, f64, f64) {
    let (l, g, s, b) = (p.lambda(), p.gamma(), p.sigma(), p.b());
    let first = 3.0 * g * (s - 1.0) * (b * (phi + 1.0).powi(2) - phi * phi - 1.0) * (l * (phi - 1.0) + 2.0 * phi);
    let second = s * (phi - 1.0).powi(2) * (phi + 1.0);
    (first - second, first, second)
}

pub fn xi(p: &ModelParams, phi: f64) -> f64 {
    xi_terms(p, phi).0
}

/// Classifies the pitchfork at the break point `phi_b`. `phi_b` may lie
/// outside (0,1) (closed-form roots are classified wherever they fall); the
/// derivative checks only run inside.
pub fn pitchfork_classify(p: &ModelParams, phi_b: f64) -> Result<Pitchfork> {
    let residual = break_condition_at(p, phi_b).abs();
    let scale = 1.0 + p.gamma() * (p.sigma() - 1.0) * (p.lambda() + 1.0) + p.sigma();
    if !phi_b.is_finite() || residual >= BREAK_RESIDUAL_TOL * scale {
        return Err(Error::NotABreakPoint { phi: phi_b, residual });
    }
    let (x, first, second) = xi_terms(p, phi_b);
    let tol = 1e-9 * (1.0 + first.abs() + second.abs());
    let class = if x > tol {
        PitchforkClass::Supercritical
    } else if x < -tol {
        PitchforkClass::Subcritical
    } else {
        PitchforkClass::Degenerate
    };
    let derivatives = if phi_b > PHI_MIN && phi_b < PHI_MAX {
        Some(pitchfork_derivatives(p, phi_b)?)
    } else {
        None
    };
    Ok(Pitchfork {
        phi_b,
        xi: x,
        class,
        derivatives,
    })
}

fn pitchfork_derivatives(p: &ModelParams, phi: f64) -> Result<PitchforkDerivatives> {
    let at = |f: f64| -> Result<Model> { Ok(Model::additive(p.with_phi(f)?)) };
    let m = at(phi)?;
    let hz = 1e-4;
    let hp = 1e-6;
    let df_dz = m.delta_v_prime(0.5, Method::Analytic)?;
    let d2f_dz2 = (m.delta_v_prime(0.5 + hz, Method::Analytic)? - m.delta_v_prime(0.5 - hz, Method::Analytic)?) / (2.0 * hz);
    let (up, dn) = (at(phi + hp)?, at(phi - hp)?);
    let df_dphi = (up.delta_v(0.5) - dn.delta_v(0.5)) / (2.0 * hp);
    let d2f_dphi_dz =
        (up.delta_v_prime(0.5, Method::Analytic)? - dn.delta_v_prime(0.5, Method::Analytic)?) / (2.0 * hp);
    Ok(PitchforkDerivatives {
        df_dz,
        d2f_dz2,
        df_dphi,
        d2f_dphi_dz,
    })
}

// ---------------------------------------------------------------------------
// Break points for a general interaction function

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralBreakPoints {
    pub g_half: f64,
    pub g_prime_half: f64,
    pub kappa: f64,
    pub phi_b1: RootReport,
    pub phi_b2: RootReport,
    /// `g_b` evaluated at each closed-form root; ∂²f/∂φ∂z vanishes iff g'(1/2) = g_b.
    pub g_b1: f64,
    pub g_b2: f64,
    /// g'(1/2) > 0, in which case the second root cannot lie in (0,1).
    pub localized: bool,
}

/// `g_b` at a given break point.
pub fn g_b(p: &ModelParams, phi_b: f64) -> f64 {
    let (l, g, s) = (p.lambda(), p.gamma(), p.sigma());
    -s * (phi_b + 1.0) / (g * (s - 1.0) * (2.0 * l * (phi_b - 1.0) + 3.0 * phi_b - 1.0))
}

/// Break points for any specification, from `g(1/2)` and `g'(1/2)`.
pub fn general_break_points(spec: &InnovationSpec, p: &ModelParams) -> GeneralBreakPoints {
    let gh = spec.g(0.5, p.b());
    let gp = spec.g_prime(0.5, p.b());
    general_break_points_from(p, gh, gp)
}

pub fn general_break_points_from(p: &ModelParams, gh: f64, gp: f64) -> GeneralBreakPoints {
    let (l, g, s) = (p.lambda(), p.gamma(), p.sigma());
    let gs = g * (s - 1.0);
    let kappa = 2.0 * (2.0 * gs * gs * gh * (l + 1.0).powi(2) * gp + (gs * gh + s).powi(2)).sqrt();
    let lin = gs * (l + 1.0) * (gp + 2.0 * gh);
    let den = 2.0 * (gs * gh * (l + 2.0) + s) - gs * (l + 1.0) * gp;
    let r1 = (lin - kappa) / den;
    let r2 = (lin + kappa) / den;
    let report = |v: f64| RootReport {
        value: v,
        existence: Existence::open(v, 0.0, 1.0),
    };
    GeneralBreakPoints {
        g_half: gh,
        g_prime_half: gp,
        kappa,
        phi_b1: report(r1),
        phi_b2: report(r2),
        g_b1: g_b(p, r1),
        g_b2: g_b(p, r2),
        localized: gp > 0.0,
    }
}

// ---------------------------------------------------------------------------
// Report

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub params: ModelParams,
    pub immobile: ImmobileThresholds,
    pub sustain_value: f64,
    pub sustain_limit: f64,
    pub phi_plus: f64,
    pub b_s: f64,
    /// φ > λ/(λ+2), where b_s < 1/2.
    pub phi_above_lambda_ratio: bool,
    pub sustain_points: Vec<f64>,
    pub break_value: f64,
    pub b_bar: f64,
    pub break_points: BreakPoints,
    pub b_c: f64,
    pub pitchfork_b1: Option<Pitchfork>,
    pub pitchfork_b2: Option<Pitchfork>,
    pub general: GeneralBreakPoints,
    /// λ*(z) at the report's z, when defined.
    pub lambda_star: Option<f64>,
}

pub const DEFAULT_Z: f64 = 0.75;

/// Assembles every threshold at the parameter point. The z-dependent values
/// (λ*, b̃, b̲, γ_c, b_c) are evaluated at `z`.
pub fn threshold_report(spec: &InnovationSpec, p: &ModelParams, z: f64) -> Result<ThresholdReport> {
    if !(z > 0.5 && z < 1.0) {
        return Err(Error::Domain {
            operation: "threshold_report",
            detail: format!("z = {z} must lie in (1/2, 1)"),
        });
    }
    let bp = break_points(p);
    let classify = |r: RootReport| pitchfork_classify(p, r.value).ok();
    Ok(ThresholdReport {
        params: *p,
        immobile: immobile_thresholds(p, z)?,
        sustain_value: sustain_condition(p),
        sustain_limit: sustain_limit(p),
        phi_plus: phi_plus(p),
        b_s: b_s(p),
        phi_above_lambda_ratio: p.phi() > p.lambda() / (p.lambda() + 2.0),
        sustain_points: sustain_points(p),
        break_value: break_condition(p),
        b_bar: b_bar(p),
        pitchfork_b1: classify(bp.phi_b1),
        pitchfork_b2: classify(bp.phi_b2),
        break_points: bp,
        b_c: asym_b_critical(p, z),
        general: general_break_points(spec, p),
        lambda_star: lambda_star(p, z).ok().map(|l| l.value),
    })
}
