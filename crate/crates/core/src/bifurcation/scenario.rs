use std::fmt;

use serde::{Deserialize, Serialize};

use super::sweep::{BifurcationDiagram, EventKind, Slice, SweptParameter};
use crate::error::{Error, Result};
use crate::innovation::SpecKind;

/// Stable-equilibrium content of one stretch of the swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub symmetric: bool,
    pub asymmetric: bool,
    pub agglomeration: bool,
}

impl Token {
    const fn new(symmetric: bool, asymmetric: bool, agglomeration: bool) -> Self {
        Token {
            symmetric,
            asymmetric,
            agglomeration,
        }
    }

    pub const S: Token = Token::new(true, false, false);
    pub const A: Token = Token::new(false, true, false);
    pub const G: Token = Token::new(false, false, true);
    pub const SA: Token = Token::new(true, true, false);
    pub const SG: Token = Token::new(true, false, true);
    pub const NONE: Token = Token::new(false, false, false);

    fn of(slice: &Slice, dispersion_only: bool) -> Token {
        Token {
            symmetric: slice.symmetric.is_stable(),
            asymmetric: slice.asymmetric.iter().any(|a| a.1.is_stable()),
            agglomeration: !dispersion_only && slice.agglomeration.is_stable(),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = [(self.symmetric, "S"), (self.asymmetric, "A"), (self.agglomeration, "G")]
            .iter()
            .filter(|p| p.0)
            .map(|p| p.1)
            .collect();
        if parts.is_empty() {
            f.pad("none")
        } else {
            f.pad(&parts.join("+"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub from: f64,
    pub to: f64,
    pub token: Token,
}

/// Whether the corner is left out of the regime tokens. With the
/// multiplicative interaction no innovation happens at a corner, so only
/// dispersion equilibria are compared.
fn dispersion_only(d: &BifurcationDiagram) -> bool {
    d.spec == SpecKind::CobbDouglas
}

/// Ordered stable regimes along the sweep. Slices holding a marginal
/// equilibrium are skipped and consecutive duplicates merged.
pub fn regime_sequence(d: &BifurcationDiagram) -> Vec<Regime> {
    let only = dispersion_only(d);
    let mut out: Vec<Regime> = Vec::new();
    for s in d.slices.iter().filter(|s| !s.has_marginal()) {
        let t = Token::of(s, only);
        match out.last_mut() {
            Some(r) if r.token == t => r.to = s.param,
            _ => out.push(Regime {
                from: s.param,
                to: s.param,
                token: t,
            }),
        }
    }
    out
}

pub fn format_sequence(seq: &[Regime]) -> String {
    seq.iter().map(|r| r.token.to_string()).collect::<Vec<_>>().join(" -> ")
}

/// Maximal parameter intervals on which at least two distinct stable
/// equilibria (up to mirror symmetry) coexist.
pub fn hysteresis_windows(d: &BifurcationDiagram) -> Vec<(f64, f64)> {
    let only = dispersion_only(d);
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for s in d.slices.iter().filter(|s| !s.has_marginal()) {
        let count = usize::from(s.symmetric.is_stable())
            + usize::from(!only && s.agglomeration.is_stable())
            + s.asymmetric.iter().filter(|a| a.1.is_stable()).count();
        if count >= 2 {
            open = Some(match open {
                Some((a, _)) => (a, s.param),
                None => (s.param, s.param),
            });
        } else if let Some(w) = open.take() {
            out.push(w);
        }
    }
    out.extend(open);
    out
}

struct Entry {
    id: &'static str,
    label: &'static str,
    patterns: &'static [&'static [Token]],
    /// Requires a limit point above the largest break point.
    needs_late_fold: bool,
    cobb_douglas: bool,
}

use Token as T;

const TAXONOMY: &[Entry] = &[
    Entry {
        id: "symmetric",
        label: "symmetric dispersion stable for all trade freeness",
        patterns: &[&[T::S]],
        needs_late_fold: false,
        cobb_douglas: false,
    },
    Entry {
        id: "i",
        label: "scenario (i): agglomeration bubble with smooth re-dispersion",
        patterns: &[&[T::S, T::A, T::S]],
        needs_late_fold: false,
        cobb_douglas: false,
    },
    Entry {
        id: "ii",
        label: "scenario (ii): discontinuous re-dispersion from asymmetric equilibrium",
        patterns: &[&[T::S, T::A, T::SA, T::S]],
        needs_late_fold: false,
        cobb_douglas: false,
    },
    Entry {
        id: "iii",
        label: "scenario (iii): interior agglomeration window, then discontinuous re-dispersion past a limit point",
        patterns: &[&[T::S, T::A, T::G, T::A, T::SA, T::S]],
        needs_late_fold: true,
        cobb_douglas: false,
    },
    Entry {
        id: "iv",
        label: "scenario (iv): sudden re-dispersion from full agglomeration to symmetric dispersion",
        patterns: &[&[T::S, T::A, T::G, T::SG, T::S]],
        needs_late_fold: false,
        cobb_douglas: false,
    },
    Entry {
        id: "v",
        label: "scenario (v): no-black-hole condition violated; asymmetric dispersion, then agglomeration",
        patterns: &[&[T::A, T::G]],
        needs_late_fold: false,
        cobb_douglas: false,
    },
    Entry {
        id: "vi",
        label: "scenario (vi): supercritical pitchfork, smooth path to agglomeration",
        patterns: &[&[T::S, T::A, T::G]],
        needs_late_fold: false,
        cobb_douglas: false,
    },
    Entry {
        id: "b-detached",
        label: "detached agglomeration branch: asymmetric start, re-dispersion with hysteresis",
        patterns: &[&[T::A, T::SA, T::S, T::SA, T::SG, T::S], &[T::A, T::SA, T::S, T::SG, T::S]],
        needs_late_fold: false,
        cobb_douglas: false,
    },
    Entry {
        id: "b-connected",
        label: "smooth path to agglomeration, then discontinuous jump to symmetric dispersion with hysteresis",
        patterns: &[&[T::A, T::G, T::SG, T::S]],
        needs_late_fold: false,
        cobb_douglas: false,
    },
    Entry {
        id: "agglomeration",
        label: "agglomeration stable for all trade freeness",
        patterns: &[&[T::G]],
        needs_late_fold: false,
        cobb_douglas: false,
    },
    Entry {
        id: "c-symmetric",
        label: "stable symmetric dispersion",
        patterns: &[&[T::S]],
        needs_late_fold: false,
        cobb_douglas: true,
    },
    Entry {
        id: "c-redispersion",
        label: "stable symmetric dispersion below the first and above the second break point",
        patterns: &[&[T::S, T::NONE, T::S]],
        needs_late_fold: false,
        cobb_douglas: true,
    },
    Entry {
        id: "c-subcritical",
        label: "subcritical pitchfork with no stable equilibria above the break point",
        patterns: &[&[T::S, T::NONE]],
        needs_late_fold: false,
        cobb_douglas: true,
    },
    Entry {
        id: "c-supercritical",
        label: "supercritical pitchfork; the stable asymmetric branch ends at a fold",
        patterns: &[&[T::S, T::A, T::NONE]],
        needs_late_fold: false,
        cobb_douglas: true,
    },
    Entry {
        id: "c-no-stable",
        label: "no stable equilibria",
        patterns: &[&[T::NONE]],
        needs_late_fold: false,
        cobb_douglas: true,
    },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub id: String,
    pub label: String,
    pub sequence: Vec<Regime>,
    pub features: Vec<String>,
    pub hysteresis: Vec<(f64, f64)>,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn features(d: &BifurcationDiagram, windows: &[(f64, f64)]) -> Vec<String> {
    let mut out = Vec::new();
    for e in &d.events {
        let s = match e.kind {
            EventKind::BreakPoint => match e.criticality {
                Some(c) => format!("break point at {} = {:.6} ({c})", d.swept, e.location),
                None => format!("break point at {} = {:.6}", d.swept, e.location),
            },
            EventKind::SustainPoint => format!("sustain point at {} = {:.6}", d.swept, e.location),
            EventKind::LimitPoint => format!("limit point at {} = {:.6}, z = {:.6}", d.swept, e.location, e.z_location),
            _ => continue,
        };
        out.push(s);
    }
    for (a, b) in windows {
        out.push(format!("hysteresis on [{a:.6}, {b:.6}]"));
    }
    out
}

/// Matches the regime sequence of a φ-sweep against the scenario taxonomy.
pub fn classify_scenario(d: &BifurcationDiagram) -> Result<Classification> {
    if d.swept != SweptParameter::Phi {
        return Err(Error::Domain {
            operation: "classify_scenario",
            detail: "classification needs a sweep over phi".into(),
        });
    }
    let seq = regime_sequence(d);
    let tokens: Vec<Token> = seq.iter().map(|r| r.token).collect();
    let cd = dispersion_only(d);
    let last_break = d
        .events_of(EventKind::BreakPoint)
        .map(|e| e.location)
        .fold(f64::NEG_INFINITY, f64::max);
    let late_fold = d.events_of(EventKind::LimitPoint).any(|e| e.location > last_break);
    let windows = hysteresis_windows(d);
    for entry in TAXONOMY.iter().filter(|e| e.cobb_douglas == cd) {
        if entry.patterns.contains(&tokens.as_slice()) && (!entry.needs_late_fold || late_fold) {
            return Ok(Classification {
                id: entry.id.to_string(),
                label: entry.label.to_string(),
                features: features(d, &windows),
                sequence: seq,
                hysteresis: windows,
            });
        }
    }
    Err(Error::Unclassified {
        sequence: format_sequence(&seq),
    })
}
