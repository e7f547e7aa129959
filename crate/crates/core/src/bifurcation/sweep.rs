use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibria::{find_equilibria, EquilibriumSet, Kind, Stability, DEFAULT_GRID};
use crate::error::{Error, Result, Warning};
use crate::innovation::SpecKind;
use crate::model::{Method, Model};
use crate::params::ModelParams;
use crate::roots::{self, Tolerance};
use crate::thresholds::{self, PitchforkClass, PHI_MAX, PHI_MIN};

pub const DEFAULT_SWEEP_GRID: usize = 400;
pub const MIN_SWEEP_GRID: usize = 50;
/// Cap on grid points inserted by adaptive refinement.
pub const MAX_EXTRA_POINTS: usize = 4000;
/// Refinement stops once adjacent grid values are this close.
pub const MIN_SPACING: f64 = 1e-9;
/// Largest z-jump allowed between linked points of one branch.
pub const CONTINUITY: f64 = 0.05;
/// Two continuing branches closer than this at one grid value are flagged.
pub const AMBIGUITY: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    Phi,
    B,
}

impl SweptParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweptParameter::Phi => "phi",
            SweptParameter::B => "b",
        }
    }

    pub fn apply(self, p: &ModelParams, value: f64) -> Result<ModelParams> {
        match self {
            SweptParameter::Phi => p.with_phi(value),
            SweptParameter::B => p.with_b(value),
        }
    }
}

impl fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for SweptParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(SweptParameter::Phi),
            "b" => Ok(SweptParameter::B),
            other => Err(Error::Config(format!("param must be `phi` or `b`, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub from: f64,
    pub to: f64,
    pub n_grid: usize,
    /// Grid used by each equilibrium search.
    pub eq_grid: usize,
    pub refine: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            from: PHI_MIN,
            to: PHI_MAX,
            n_grid: DEFAULT_SWEEP_GRID,
            eq_grid: DEFAULT_GRID,
            refine: true,
        }
    }
}

/// Equilibria in the upper half at one grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub param: f64,
    pub symmetric: Stability,
    pub agglomeration: Stability,
    /// Asymmetric equilibria in (1/2, 1), ascending in z.
    pub asymmetric: Vec<(f64, Stability)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Warning>,
}

impl Slice {
    fn from_set(param: f64, set: &EquilibriumSet) -> Slice {
        Slice {
            param,
            symmetric: set.symmetric().stability,
            agglomeration: set.agglomeration().stability,
            asymmetric: set.asymmetric_upper().iter().map(|e| (e.z_star, e.stability)).collect(),
            warnings: set.warnings.clone(),
        }
    }

    fn signature(&self) -> (Stability, Stability, Vec<Stability>) {
        (self.symmetric, self.agglomeration, self.asymmetric.iter().map(|a| a.1).collect())
    }

    pub fn has_marginal(&self) -> bool {
        self.symmetric == Stability::Marginal
            || self.agglomeration == Stability::Marginal
            || self.asymmetric.iter().any(|a| a.1 == Stability::Marginal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub param: f64,
    pub z: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "event", rename_all = "snake_case")]
pub enum Endpoint {
    GridBoundary,
    /// Index into [`BifurcationDiagram::events`].
    Event(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: usize,
    pub kind: Kind,
    /// Ordered along the branch; across a fold the parameter reverses.
    pub points: Vec<BranchPoint>,
    pub start: Endpoint,
    pub end: Endpoint,
    /// Id of the branch this one mirrors under z -> 1 - z.
    pub mirror_of: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    BreakPoint,
    SustainPoint,
    LimitPoint,
    BranchAppears,
    BranchDisappears,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::BreakPoint => "break_point",
            EventKind::SustainPoint => "sustain_point",
            EventKind::LimitPoint => "limit_point",
            EventKind::BranchAppears => "branch_appears",
            EventKind::BranchDisappears => "branch_disappears",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub location: f64,
    pub z_location: f64,
    /// Pitchfork class at break points, when it can be computed.
    pub criticality: Option<PitchforkClass>,
    /// (|Δv|, |Δv'|) at limit points.
    pub residuals: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub swept: SweptParameter,
    pub base: ModelParams,
    pub spec: SpecKind,
    /// Strictly increasing parameter values, including refinement points.
    pub grid: Vec<f64>,
    pub slices: Vec<Slice>,
    pub branches: Vec<Branch>,
    pub events: Vec<Event>,
    pub warnings: Vec<Warning>,
}

impl BifurcationDiagram {
    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

struct Sweeper<'a> {
    model: &'a Model,
    swept: SweptParameter,
    eq_grid: usize,
}

impl Sweeper<'_> {
    fn model_at(&self, q: f64) -> Result<Model> {
        self.model.with_params(self.swept.apply(self.model.params(), q)?)
    }

    fn slice(&self, q: f64) -> Result<Slice> {
        let set = find_equilibria(&self.model_at(q)?, self.eq_grid)?;
        Ok(Slice::from_set(q, &set))
    }

    fn slices(&self, qs: &[f64]) -> Result<Vec<Slice>> {
        qs.par_iter().map(|&q| self.slice(q)).collect()
    }

    fn dv(&self, z: f64, q: f64) -> Option<f64> {
        self.model_at(q).ok().map(|m| m.delta_v(z))
    }

    fn dv_prime(&self, z: f64, q: f64) -> Option<f64> {
        self.model_at(q).ok().map(|m| m.delta_v_prime_best(z))
    }
}

fn needs_refinement(a: &Slice, b: &Slice) -> bool {
    if b.param - a.param <= MIN_SPACING {
        return false;
    }
    if a.signature() != b.signature() {
        return true;
    }
    a.asymmetric
        .iter()
        .zip(&b.asymmetric)
        .any(|(x, y)| (x.0 - y.0).abs() > CONTINUITY)
}

/// Sweeps `swept` over the options' range and assembles the diagram.
pub fn sweep(model: &Model, swept: SweptParameter, opts: &SweepOptions) -> Result<BifurcationDiagram> {
    if opts.n_grid < MIN_SWEEP_GRID {
        return Err(Error::InvalidParameter {
            name: "n",
            requirement: "be at least 50",
            value: opts.n_grid as f64,
        });
    }
    let from = opts.from.max(PHI_MIN);
    let to = opts.to.min(PHI_MAX);
    if !(from < to) {
        return Err(Error::InvalidParameter {
            name: "to",
            requirement: "exceed `from` within [1e-4, 1-1e-4]",
            value: opts.to,
        });
    }
    let sw = Sweeper {
        model,
        swept,
        eq_grid: opts.eq_grid,
    };
    let n = opts.n_grid;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { to } else { from + (to - from) * i as f64 / (n - 1) as f64 })
        .collect();
    let mut slices = sw.slices(&grid)?;

    if opts.refine {
        let mut budget = MAX_EXTRA_POINTS;
        loop {
            let mids: Vec<f64> = slices
                .windows(2)
                .filter(|w| needs_refinement(&w[0], &w[1]))
                .map(|w| 0.5 * (w[0].param + w[1].param))
                .take(budget)
                .collect();
            if mids.is_empty() {
                break;
            }
            budget -= mids.len();
            let extra = sw.slices(&mids)?;
            slices.extend(extra);
            slices.sort_by(|a, b| a.param.total_cmp(&b.param));
            if budget == 0 {
                log::warn!("refinement budget of {MAX_EXTRA_POINTS} points exhausted");
                break;
            }
        }
    }

    let mut warnings: Vec<Warning> = slices.iter().flat_map(|s| s.warnings.iter().cloned()).collect();
    let (mut branches, ends) = link_asymmetric(&slices, &mut warnings);
    let mut events = Vec::new();
    locate_stability_events(&sw, &slices, &mut events);
    join_folds(&sw, &slices, &mut branches, &ends, &mut events);
    finish_branches(&slices, &mut branches, &mut events);
    events.sort_by(|a, b| a.location.total_cmp(&b.location));
    // Endpoints were assigned before sorting; remap them.
    remap_endpoints(&mut branches, &events);

    Ok(BifurcationDiagram {
        swept,
        base: *model.params(),
        spec: model.spec().kind(),
        grid: slices.iter().map(|s| s.param).collect(),
        slices,
        branches,
        events,
        warnings,
    })
}

/// Open/closed state of each raw asymmetric branch: (slice index of first
/// point, slice index of last point).
type Ends = Vec<(usize, usize)>;

/// Order-preserving matching of roots in consecutive slices. Distinct roots of
/// a continuous function cannot cross without colliding, so between births and
/// deaths the sorted order is preserved.
fn match_roots(old: &[f64], new: &[f64]) -> Vec<Option<usize>> {
    let (n, m) = (old.len(), new.len());
    let inf = f64::INFINITY;
    let mut dp = vec![vec![inf; m + 1]; n + 1];
    let mut choice = vec![vec![0u8; m + 1]; n + 1];
    dp[0][0] = 0.0;
    for i in 0..=n {
        for j in 0..=m {
            let here = dp[i][j];
            if here == inf {
                continue;
            }
            if i < n && here + CONTINUITY < dp[i + 1][j] {
                dp[i + 1][j] = here + CONTINUITY;
                choice[i + 1][j] = 1;
            }
            if j < m && here + CONTINUITY < dp[i][j + 1] {
                dp[i][j + 1] = here + CONTINUITY;
                choice[i][j + 1] = 2;
            }
            if i < n && j < m {
                let d = (old[i] - new[j]).abs();
                if d < CONTINUITY && here + d < dp[i + 1][j + 1] {
                    dp[i + 1][j + 1] = here + d;
                    choice[i + 1][j + 1] = 3;
                }
            }
        }
    }
    let mut out = vec![None; n];
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match choice[i][j] {
            1 => i -= 1,
            2 => j -= 1,
            _ => {
                out[i - 1] = Some(j - 1);
                i -= 1;
                j -= 1;
            }
        }
    }
    out
}

fn link_asymmetric(slices: &[Slice], warnings: &mut Vec<Warning>) -> (Vec<Branch>, Ends) {
    let mut branches: Vec<Branch> = Vec::new();
    let mut ends: Ends = Vec::new();
    // branch index for each root of the previous slice
    let mut open: Vec<usize> = Vec::new();
    for (k, s) in slices.iter().enumerate() {
        let zs: Vec<f64> = s.asymmetric.iter().map(|a| a.0).collect();
        let mut next_open = vec![usize::MAX; zs.len()];
        if k > 0 {
            let prev: Vec<f64> = slices[k - 1].asymmetric.iter().map(|a| a.0).collect();
            let m = match_roots(&prev, &zs);
            for (i, target) in m.iter().enumerate() {
                if let Some(j) = *target {
                    next_open[j] = open[i];
                }
            }
            let continuing: Vec<usize> = (0..zs.len()).filter(|&j| next_open[j] != usize::MAX).collect();
            for w in continuing.windows(2) {
                if zs[w[1]] - zs[w[0]] < AMBIGUITY {
                    warnings.push(Warning::LinkingAmbiguity {
                        param: s.param,
                        z: zs[w[0]],
                    });
                }
            }
        }
        for (j, &(z, st)) in s.asymmetric.iter().enumerate() {
            if next_open[j] == usize::MAX {
                next_open[j] = branches.len();
                branches.push(Branch {
                    id: branches.len(),
                    kind: Kind::AsymmetricDispersion,
                    points: Vec::new(),
                    start: Endpoint::GridBoundary,
                    end: Endpoint::GridBoundary,
                    mirror_of: None,
                });
                ends.push((k, k));
            }
            let b = next_open[j];
            branches[b].points.push(BranchPoint {
                param: s.param,
                z,
                stability: st,
            });
            ends[b].1 = k;
        }
        open = next_open;
    }
    for w in warnings.iter() {
        log::debug!("{w}");
    }
    (branches, ends)
}

/// Break and sustain points from stability changes of the symmetric and
/// corner equilibria between adjacent slices.
fn locate_stability_events(sw: &Sweeper<'_>, slices: &[Slice], events: &mut Vec<Event>) {
    let additive = sw.model.spec().is_additive();
    let base = *sw.model.params();

    let flips = |get: &dyn Fn(&Slice) -> Stability| -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut last: Option<(f64, Stability)> = None;
        for s in slices {
            let st = get(s);
            if st == Stability::Marginal {
                continue;
            }
            if let Some((q, prev)) = last {
                if prev != st {
                    out.push((q, s.param));
                }
            }
            last = Some((s.param, st));
        }
        out
    };

    let tol = Tolerance {
        f_abs: 0.0,
        x_width: 1e-14,
    };
    for (lo, hi) in flips(&|s| s.symmetric) {
        let f = |q: f64| sw.dv_prime(0.5, q).unwrap_or(f64::NAN);
        let mut q = roots::hybrid(f, lo, hi, tol).unwrap_or(0.5 * (lo + hi));
        let mut criticality = None;
        if additive {
            let exact = match sw.swept {
                SweptParameter::Phi => {
                    let (r1, r2) = thresholds::break_point_formulas(&base);
                    [r1, r2].into_iter().find(|r| (r - q).abs() < 1e-6)
                }
                SweptParameter::B => Some(thresholds::break_b(&base)),
            };
            if let Some(x) = exact.filter(|x| (x - q).abs() < 1e-6) {
                q = x;
            }
            if let Ok(p) = sw.swept.apply(&base, q) {
                criticality = thresholds::pitchfork_classify(&p, p.phi()).ok().map(|pf| pf.class);
            }
        }
        events.push(Event {
            kind: EventKind::BreakPoint,
            location: q,
            z_location: 0.5,
            criticality,
            residuals: None,
        });
    }
    for (lo, hi) in flips(&|s| s.agglomeration) {
        let f = |q: f64| sw.dv(1.0, q).unwrap_or(f64::NAN);
        let mut q = roots::hybrid(f, lo, hi, tol).unwrap_or(0.5 * (lo + hi));
        if additive {
            let exact = match sw.swept {
                SweptParameter::Phi => thresholds::sustain_points(&base).into_iter().find(|r| (r - q).abs() < 1e-6),
                SweptParameter::B => Some(thresholds::sustain_b(&base)),
            };
            if let Some(x) = exact.filter(|x| (x - q).abs() < 1e-6) {
                q = x;
            }
        }
        events.push(Event {
            kind: EventKind::SustainPoint,
            location: q,
            z_location: 1.0,
            criticality: None,
            residuals: None,
        });
    }
}

/// Solves {Δv = 0, Δv' = 0} for (z, q) by damped Newton.
fn limit_point(sw: &Sweeper<'_>, z0: f64, q0: f64) -> Option<(f64, f64, f64, f64)> {
    let eval = |z: f64, q: f64| -> Option<(f64, f64)> {
        let m = sw.model_at(q).ok()?;
        Some((m.delta_v(z), m.delta_v_prime_best(z)))
    };
    let (mut z, mut q) = (z0, q0);
    let (mut f1, mut f2) = eval(z, q)?;
    let hz = 1e-5;
    let hq = 1e-7;
    for _ in 0..100 {
        if f1.abs() < 1e-12 && f2.abs() < 1e-10 {
            break;
        }
        let m = sw.model_at(q).ok()?;
        let j11 = f2;
        let j21 = (m.delta_v_prime_best(z + hz) - m.delta_v_prime_best(z - hz)) / (2.0 * hz);
        let (up, dn) = (eval(z, q + hq)?, eval(z, q - hq)?);
        let j12 = (up.0 - dn.0) / (2.0 * hq);
        let j22 = (up.1 - dn.1) / (2.0 * hq);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dz = (f1 * j22 - f2 * j12) / det;
        let dq = (j11 * f2 - j21 * f1) / det;
        let norm = f1.abs().max(f2.abs());
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (nz, nq) = (z - t * dz, q - t * dq);
            if nz > 0.5 && nz < 1.0 {
                if let Some((g1, g2)) = eval(nz, nq) {
                    if g1.abs().max(g2.abs()) < norm {
                        z = nz;
                        q = nq;
                        f1 = g1;
                        f2 = g2;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (f1.abs() < 1e-8 && f2.abs() < 1e-8).then_some((z, q, f1.abs(), f2.abs()))
}

fn is_interior(slices: &[Slice], k: usize) -> bool {
    k > 0 && k + 1 < slices.len()
}

/// Joins pairs of raw branches that end (or start) together at a fold, and
/// records the limit point.
fn join_folds(sw: &Sweeper<'_>, slices: &[Slice], branches: &mut Vec<Branch>, ends: &Ends, events: &mut Vec<Event>) {
    let mut used = vec![false; branches.len()];
    let mut joined: Vec<Branch> = Vec::new();
    for a in 0..branches.len() {
        if used[a] {
            continue;
        }
        for b in (a + 1)..branches.len() {
            if used[b] {
                continue;
            }
            let (ea, eb) = (ends[a], ends[b]);
            let at_end = ea.1 == eb.1 && is_interior(slices, ea.1);
            let at_start = ea.0 == eb.0 && is_interior(slices, ea.0);
            if !(at_end || at_start) {
                continue;
            }
            let (pa, pb) = if at_end {
                (*branches[a].points.last().unwrap(), *branches[b].points.last().unwrap())
            } else {
                (branches[a].points[0], branches[b].points[0])
            };
            if (pa.z - pb.z).abs() > CONTINUITY || pa.z.min(pb.z) < 0.5 + 1e-3 || pa.z.max(pb.z) > 1.0 - 1e-3 {
                continue;
            }
            let Some((z, q, r1, r2)) = limit_point(sw, 0.5 * (pa.z + pb.z), pa.param) else {
                continue;
            };
            events.push(Event {
                kind: EventKind::LimitPoint,
                location: q,
                z_location: z,
                criticality: None,
                residuals: Some((r1, r2)),
            });
            let mut points: Vec<BranchPoint>;
            if at_end {
                points = branches[a].points.clone();
                points.extend(branches[b].points.iter().rev());
            } else {
                points = branches[a].points.iter().rev().copied().collect();
                points.extend(branches[b].points.iter());
            }
            joined.push(Branch {
                id: 0,
                kind: Kind::AsymmetricDispersion,
                points,
                start: Endpoint::GridBoundary,
                end: Endpoint::GridBoundary,
                mirror_of: None,
            });
            used[a] = true;
            used[b] = true;
            break;
        }
    }
    let mut rest: Vec<Branch> = branches.drain(..).enumerate().filter(|(i, _)| !used[*i]).map(|(_, b)| b).collect();
    rest.extend(joined);
    *branches = rest;
}

fn finish_branches(slices: &[Slice], branches: &mut Vec<Branch>, events: &mut Vec<Event>) {
    let first = slices.first().map(|s| s.param).unwrap_or(0.0);
    let last = slices.last().map(|s| s.param).unwrap_or(1.0);
    let at_boundary = |q: f64| q == first || q == last;
    // Order asymmetric branches by where they start, for stable ids.
    branches.sort_by(|a, b| {
        let ka = (a.points[0].param, a.points[0].z);
        let kb = (b.points[0].param, b.points[0].z);
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    for br in branches.iter_mut() {
        let (s, e) = (br.points[0], *br.points.last().unwrap());
        if !at_boundary(s.param) {
            br.start = Endpoint::Event(events.len());
            events.push(Event {
                kind: EventKind::BranchAppears,
                location: s.param,
                z_location: s.z,
                criticality: None,
                residuals: None,
            });
        }
        if !at_boundary(e.param) {
            br.end = Endpoint::Event(events.len());
            events.push(Event {
                kind: EventKind::BranchDisappears,
                location: e.param,
                z_location: e.z,
                criticality: None,
                residuals: None,
            });
        }
    }

    let mut all = Vec::new();
    let line = |z: f64, get: &dyn Fn(&Slice) -> Stability| -> Vec<BranchPoint> {
        slices
            .iter()
            .map(|s| BranchPoint {
                param: s.param,
                z,
                stability: get(s),
            })
            .collect()
    };
    let fixed = |kind, points| Branch {
        id: 0,
        kind,
        points,
        start: Endpoint::GridBoundary,
        end: Endpoint::GridBoundary,
        mirror_of: None,
    };
    all.push(fixed(Kind::SymmetricDispersion, line(0.5, &|s| s.symmetric)));
    all.push(fixed(Kind::Agglomeration, line(1.0, &|s| s.agglomeration)));
    all.append(branches);
    let upper = all.len();
    for (i, br) in all.iter_mut().enumerate() {
        br.id = i;
    }
    for i in 0..upper {
        if all[i].kind == Kind::SymmetricDispersion {
            continue;
        }
        let mut m = all[i].clone();
        m.id = all.len();
        m.mirror_of = Some(i);
        for p in &mut m.points {
            p.z = 1.0 - p.z;
        }
        all.push(m);
    }
    *branches = all;
}

fn remap_endpoints(branches: &mut [Branch], events: &[Event]) {
    // Events were pushed with indices into the unsorted list; recover them by
    // matching kind, location and z.
    let find = |kind: EventKind, p: BranchPoint| {
        events
            .iter()
            .position(|e| e.kind == kind && e.location == p.param && e.z_location == p.z)
    };
    for br in branches.iter_mut() {
        let (s, e) = (br.points[0], *br.points.last().unwrap());
        let (s, e) = if br.mirror_of.is_some() {
            (
                BranchPoint { z: 1.0 - s.z, ..s },
                BranchPoint { z: 1.0 - e.z, ..e },
            )
        } else {
            (s, e)
        };
        if let Endpoint::Event(_) = br.start {
            br.start = find(EventKind::BranchAppears, s).map_or(Endpoint::GridBoundary, Endpoint::Event);
        }
        if let Endpoint::Event(_) = br.end {
            br.end = find(EventKind::BranchDisappears, e).map_or(Endpoint::GridBoundary, Endpoint::Event);
        }
    }
}

/// Δv'(1/2) at each grid value; handy for plotting the break condition.
pub fn symmetric_derivative_profile(model: &Model, swept: SweptParameter, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&q| {
            let m = model.with_params(swept.apply(model.params(), q)?)?;
            m.delta_v_prime(0.5, Method::FiniteDifference)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(l: f64, g: f64, s: f64, b: f64) -> BifurcationDiagram {
        let m = Model::additive(ModelParams::new(l, g, s, b, 0.5).unwrap());
        sweep(&m, SweptParameter::Phi, &SweepOptions::default()).unwrap()
    }

    #[test]
    fn matching_preserves_order() {
        assert_eq!(match_roots(&[0.6, 0.9], &[0.61, 0.89]), vec![Some(0), Some(1)]);
        assert_eq!(match_roots(&[0.6], &[0.52, 0.61]), vec![Some(1)]);
        assert_eq!(match_roots(&[0.7, 0.71], &[]), vec![None, None]);
    }

    #[test]
    fn grid_is_increasing_and_bounded() {
        let d = diagram(4.0, 1.0, 8.0, 0.55);
        assert!(d.grid.windows(2).all(|w| w[0] < w[1]));
        assert!(d.grid[0] >= PHI_MIN && *d.grid.last().unwrap() <= PHI_MAX);
    }

    #[test]
    fn supercritical_pitchfork_events() {
        let d = diagram(4.0, 1.0, 8.0, 0.55);
        let bp: Vec<&Event> = d.events_of(EventKind::BreakPoint).collect();
        assert_eq!(bp.len(), 1);
        let exact = thresholds::break_points(&ModelParams::new(4.0, 1.0, 8.0, 0.55, 0.5).unwrap()).phi_b1.value;
        assert!((bp[0].location - exact).abs() < 1e-8);
        assert_eq!(bp[0].criticality, Some(PitchforkClass::Supercritical));
        assert_eq!(d.events_of(EventKind::SustainPoint).count(), 1);
    }

    #[test]
    fn fold_is_detected() {
        // (2,1,5,0.342): two asymmetric branches collide above the second break point.
        let d = diagram(2.0, 1.0, 5.0, 0.342);
        let lp: Vec<&Event> = d.events_of(EventKind::LimitPoint).collect();
        assert!(!lp.is_empty(), "{:?}", d.events);
        for e in lp {
            let (r1, r2) = e.residuals.unwrap();
            assert!(r1 < 1e-8 && r2 < 1e-8);
            let fold = d
                .branches
                .iter()
                .find(|b| b.kind == Kind::AsymmetricDispersion && b.mirror_of.is_none() && b.points.iter().any(|p| (p.param - e.location).abs() < 1e-3))
                .unwrap();
            let dirs: Vec<f64> = fold.points.windows(2).map(|w| w[1].param - w[0].param).collect();
            assert!(dirs.iter().any(|d| *d > 0.0) && dirs.iter().any(|d| *d < 0.0));
        }
    }

    #[test]
    fn rejects_small_grid() {
        let m = Model::additive(ModelParams::new(4.0, 1.0, 8.0, 0.55, 0.5).unwrap());
        let opts = SweepOptions {
            n_grid: 10,
            ..SweepOptions::default()
        };
        assert!(sweep(&m, SweptParameter::Phi, &opts).is_err());
    }
}
