//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Reference values come from the oracles in `common` (an independent
//! re-derivation of the utility differential, finite differences and
//! bisection) or from the bundled fixtures; closed forms and search routines of
//! the library are only ever the thing under test.

mod common;

use std::time::Instant;

use common::*;
use innogeo::bifurcation::{
    classify_scenario, format_sequence, hysteresis_windows, regime_sequence, sweep, EventKind, SweepOptions,
    SweptParameter,
};
use innogeo::equilibria::{asymmetric_stability, find_equilibria, lambda_star, Stability, DEFAULT_GRID};
use innogeo::fixtures::{gallery, scenario, scenarios};
use innogeo::innovation::CustomInteraction;
use innogeo::model::Method;
use innogeo::thresholds::{
    break_condition_at, break_point_formulas, break_points, general_break_points, pitchfork_classify,
    sustain_condition_at, sustain_limit, sustain_points, Existence, PitchforkClass, PHI_MAX, PHI_MIN,
};
use innogeo::{InnovationSpec, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
            notes: Vec::new(),
        }
    }
    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE_0000 + criterion)
}

fn model(p: &P) -> Model {
    Model::additive(p.lib())
}

fn stability_of_slope(d: f64) -> Stability {
    if d < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

// 1. Equilibrium gallery at (2,1,5,0.342), five values of phi.
fn criterion_1() -> Outcome {
    let gal = gallery();
    let mut bad = Vec::new();
    let mut worst_residual: f64 = 0.0;
    for panel in &gal.panel {
        let p = P::new(gal.lambda, gal.gamma, gal.sigma, gal.b, panel.phi);
        let set = find_equilibria(&model(&p), DEFAULT_GRID).unwrap();
        let asym = set.asymmetric_upper();
        let got: Vec<Stability> = asym.iter().map(|e| e.stability).collect();
        // Oracle count of interior roots from the independent Δv.
        let oracle = scan_roots(|z| dv(&p, z), 0.5 + 1e-7, 1.0 - 1e-12, 20_000, 1e-15);
        for e in &asym {
            worst_residual = worst_residual.max(dv(&p, e.z_star).abs());
        }
        // Stability of the corner from the sign of the oracle Δv(1).
        let corner = stability_of_slope(-dv(&p, 1.0));
        let ok = set.symmetric().stability == panel.symmetric
            && set.agglomeration().stability == panel.agglomeration
            && corner == panel.agglomeration
            && got == panel.asymmetric
            && oracle.len() == asym.len();
        if !ok {
            bad.push(format!(
                "phi={}: symmetric {} agglomeration {} asymmetric {:?} (oracle {} roots)",
                panel.phi,
                set.symmetric().stability,
                set.agglomeration().stability,
                got,
                oracle.len()
            ));
        }
    }
    let pass = bad.is_empty() && worst_residual < 1e-10;
    Outcome::new(
        pass,
        format!("5 panels, {} mismatches, max |dv| at interior roots {worst_residual:.1e} (tol 1e-10)", bad.len()),
    )
    .note(bad.join("; "))
}

// 2. Break and sustain points against independent bisection.
fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let (mut draws, mut roots, mut fails) = (0, 0, Vec::new());
    let mut worst_res: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    let mut sustain_checked = 0;
    while draws < 200 {
        let p = draw(&mut r);
        let lp = p.lib();
        let bp = break_points(&lp);
        let exists: Vec<f64> = [bp.phi_b1, bp.phi_b2]
            .iter()
            .filter(|x| x.existence == Existence::Exists)
            .map(|x| x.value)
            .collect();
        if exists.is_empty() {
            continue;
        }
        draws += 1;
        let oracle = scan_roots(|f| dv_prime(&p.phi(f), 0.5), PHI_MIN, PHI_MAX, 2000, 1e-13);
        if oracle.len() != exists.len() {
            fails.push(format!("{p:?}: {} closed-form break points, oracle finds {}", exists.len(), oracle.len()));
        }
        for (a, o) in exists.iter().zip(&oracle) {
            roots += 1;
            let res = break_condition_at(&lp, *a).abs();
            worst_res = worst_res.max(res);
            worst_gap = worst_gap.max((a - o).abs());
            if res >= 1e-9 || (a - o).abs() >= 1e-8 {
                fails.push(format!("{p:?}: phi_b {a} residual {res:e}, oracle {o}"));
            }
        }

        // Sustain points on the same draw.
        let sp = sustain_points(&lp);
        let oracle = scan_roots(|f| dv(&p.phi(f), 1.0), PHI_MIN, PHI_MAX, 2000, 1e-13);
        if sp.len() != oracle.len() {
            fails.push(format!("{p:?}: {} sustain points, oracle finds {}", sp.len(), oracle.len()));
        }
        for (a, o) in sp.iter().zip(&oracle) {
            sustain_checked += 1;
            let res = sustain_condition_at(&lp, *a).abs();
            worst_res = worst_res.max(res);
            worst_gap = worst_gap.max((a - o).abs());
            if res >= 1e-9 || (a - o).abs() >= 1e-8 {
                fails.push(format!("{p:?}: phi_s {a} residual {res:e}, oracle {o}"));
            }
        }
        let structure_ok = if p.b < 0.5 {
            sp.len() <= 2
        } else if sustain_limit(&lp) > 0.0 {
            sp.len() == 1
        } else {
            true
        };
        if !structure_ok {
            fails.push(format!("{p:?}: {} sustain points for b = {}", sp.len(), p.b));
        }
    }
    Outcome::new(
        fails.is_empty(),
        format!(
            "{draws} draws, {roots} break points, {sustain_checked} sustain points; max residual {worst_res:.1e} (tol 1e-9), max gap to bisection {worst_gap:.1e} (tol 1e-8)"
        ),
    )
    .note(fails.into_iter().take(3).collect::<Vec<_>>().join("; "))
}

// 3. Sign identities.
fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut violations = Vec::new();
    let mut compared = 0;
    for _ in 0..500 {
        let mut p = draw(&mut r);
        p.mu = r.gen_range(0.2..1.0);
        let lp = p.lib();
        let pairs = [
            ("dv(1) vs S", dv(&p, 1.0), sustain_condition_at(&lp, p.phi)),
            ("dv'(1/2) vs B", dv_prime(&p, 0.5), break_condition_at(&lp, p.phi)),
        ];
        for (what, x, y) in pairs {
            if x.abs() <= 1e-9 || y.abs() <= 1e-9 {
                continue;
            }
            compared += 1;
            if x.signum() != y.signum() {
                violations.push(format!("{what} at {p:?}: {x:e} vs {y:e}"));
            }
        }
    }
    Outcome::new(
        violations.is_empty(),
        format!("500 draws, {compared} comparisons outside the 1e-9 band, {} violations", violations.len()),
    )
    .note(violations.into_iter().take(3).collect::<Vec<_>>().join("; "))
}

// 4. At most two interior equilibria in (1/2, 1].
fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let (mut max_lib, mut max_oracle, mut disagree, mut two) = (0, 0, 0, 0);
    let mut fails = Vec::new();
    for i in 0..1000 {
        // Every other draw comes from the neighbourhood where two interior
        // roots do occur, so the bound is tested where it is tight.
        let p = if i % 2 == 0 {
            draw(&mut r)
        } else {
            P::new(
                r.gen_range(1.9..2.1),
                r.gen_range(0.97..1.03),
                r.gen_range(4.8..5.2),
                r.gen_range(0.338..0.346),
                r.gen_range(0.398..0.406),
            )
        };
        let set = find_equilibria(&model(&p), DEFAULT_GRID).unwrap();
        let n = set.interior_count_upper_half;
        // Δv/(z − 1/2) keeps roots next to symmetry visible.
        let oracle = scan_roots(|z| dv(&p, z) / (z - 0.5), 0.5 + 1e-9, 1.0 - 1e-12, 4000, 1e-14).len();
        max_lib = max_lib.max(n);
        two += usize::from(n == 2);
        max_oracle = max_oracle.max(oracle);
        if n != oracle {
            disagree += 1;
        }
        if n > 2 || oracle > 2 {
            fails.push(format!("{p:?}: {n} (oracle {oracle})"));
        }
    }
    Outcome::new(
        fails.is_empty(),
        format!("1000 draws, max interior count {max_lib} (oracle {max_oracle}, {two} draws with two), count disagreements {disagree}"),
    )
    .note(fails.into_iter().take(3).collect::<Vec<_>>().join("; "))
}

// 5. λ*(z) back-substitution and 𝒢-based stability.
fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let (mut n, mut stab_checked) = (0, 0);
    let mut worst: f64 = 0.0;
    let mut fails = Vec::new();
    while n < 200 {
        let p = draw(&mut r);
        let z = r.gen_range(0.52..0.98);
        let ls = match lambda_star(&p.lib(), z) {
            Ok(ls) if ls.admissible => ls,
            _ => continue,
        };
        n += 1;
        let q = p.lambda(ls.value);
        let res = dv(&q, z).abs();
        worst = worst.max(res);
        if res >= 1e-9 {
            fails.push(format!("{q:?} z={z}: |dv| = {res:e}"));
        }
        let slope = dv_prime(&q, z);
        let via_g = asymmetric_stability(&q.lib(), z).unwrap();
        if slope.abs() > 1e-9 && via_g != Stability::Marginal {
            stab_checked += 1;
            if via_g != stability_of_slope(slope) {
                fails.push(format!("{q:?} z={z}: G says {via_g}, dv' = {slope:e}"));
            }
        }
    }
    Outcome::new(
        fails.is_empty(),
        format!("200 admissible points, max |dv(z)| {worst:.1e} (tol 1e-9), {stab_checked} stability comparisons"),
    )
    .note(fails.into_iter().take(3).collect::<Vec<_>>().join("; "))
}

// 6. Derivative oracles.
fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut worst_q: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    let mut fails = Vec::new();
    for _ in 0..1000 {
        let p = draw(&mut r);
        let z = r.gen_range(0.01..0.99);
        let m = model(&p);
        let a = m.delta_v_prime(z, Method::Analytic).unwrap();
        let o = deriv(|z| dv(&p, z), z, 1e-4);
        let rel = ((a - o) / o).abs();
        worst_q = worst_q.max(rel);
        if !(rel < 1e-6) {
            fails.push(format!("dv' at {p:?} z={z}: {a} vs {o}"));
        }
        let zb = r.gen_range(0.51..0.99);
        let db = m.d_delta_v_db(zb).unwrap();
        let ob = deriv(|b| dv(&p.b(b), zb), p.b, 1e-3);
        let rel = ((db - ob) / ob).abs();
        worst_b = worst_b.max(rel);
        if !(rel < 1e-6) || db <= 0.0 {
            fails.push(format!("d/db at {p:?} z={zb}: {db} vs {ob}"));
        }
    }
    Outcome::new(
        fails.is_empty(),
        format!("1000 points: max rel. error dv' {worst_q:.1e}, d/db {worst_b:.1e} (tol 1e-6); d/db > 0 on (0.51, 0.99)"),
    )
    .note(fails.into_iter().take(3).collect::<Vec<_>>().join("; "))
}

fn classify(sc: &innogeo::fixtures::Scenario) -> (innogeo::bifurcation::BifurcationDiagram, String) {
    let d = sweep(&sc.model(0.5).unwrap(), SweptParameter::Phi, &SweepOptions::default()).unwrap();
    let id = classify_scenario(&d).map(|c| c.id).unwrap_or_else(|_| "unclassified".into());
    (d, id)
}

// 7. Scenario taxonomy on the reference tuples.
fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    let mut lines = Vec::new();
    for name in ["i", "ii", "iii", "iv", "v", "vi", "detached", "connected"] {
        let sc = scenario(name).unwrap();
        let (d, id) = classify(&sc);
        let p = P::new(sc.lambda, sc.gamma, sc.sigma, sc.b, 0.5);
        let (_, r2) = break_point_formulas(&p.lib());
        let mut ok = id == sc.expected;
        if name == "iii" {
            let fold = d.events_of(EventKind::LimitPoint).any(|e| e.location > r2 && e.location < 1.0);
            ok &= fold;
        }
        if name == "detached" || name == "connected" {
            let s = scan_roots(|f| dv(&p.phi(f), 1.0), PHI_MIN, PHI_MAX, 2000, 1e-13);
            let w = hysteresis_windows(&d);
            let near = |x: f64, y: f64| (x - y).abs() < 1e-6;
            ok &= match (name, s.as_slice()) {
                // Agglomeration and symmetric dispersion coexist on (φ_b2, φ_s2).
                ("connected", [_, s2]) => w.iter().any(|(a, b)| near(*a, r2) && near(*b, *s2)),
                // Asymmetric and symmetric dispersion coexist on (φ_b2, φ_l),
                // agglomeration and symmetric dispersion on (φ_s1, φ_s2).
                ("detached", [s1, s2]) => {
                    let fold = d
                        .events_of(EventKind::LimitPoint)
                        .map(|e| e.location)
                        .find(|l| *l > r2 && *l < *s1);
                    fold.is_some_and(|l| w.iter().any(|(a, b)| near(*a, r2) && near(*b, l)))
                        && w.iter().any(|(a, b)| *a <= *s1 && near(*b, *s2))
                }
                _ => false,
            };
        }
        lines.push(format!("{name}={id}"));
        if !ok {
            bad.push(format!("{name}: expected {} got {id} [{}]", sc.expected, format_sequence(&regime_sequence(&d))));
        }
    }
    let mut o = Outcome::new(bad.is_empty(), format!("8 reference configs: {}", lines.join(" ")));
    if !bad.is_empty() {
        o = o.note(bad.join("; "));
    }
    // Corroboration at σ = 5, not part of the verdict.
    let extra: Vec<String> = ["i-sigma5", "ii-sigma5", "iii-sigma5", "iv-sigma5"]
        .iter()
        .map(|n| {
            let sc = scenario(n).unwrap();
            format!("{n}={}", classify(&sc).1)
        })
        .collect();
    o.note(format!("sigma=5 corroboration: {}", extra.join(" ")))
}

// 8. Cobb-Douglas suite.
fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut worst_corner: f64 = 0.0;
    let mut corner_oracle: f64 = 0.0;
    let mut agglomeration_eq = 0;
    let mut worst_break: f64 = 0.0;
    let mut worst_slope: f64 = 0.0;
    for _ in 0..100 {
        let mut p = draw(&mut r);
        p.mu = r.gen_range(0.2..1.0);
        let m = Model::new(InnovationSpec::CobbDouglas, p.lib()).unwrap();
        let stated = p.mu * p.phi.ln() / (p.sigma - 1.0);
        worst_corner = worst_corner.max((m.delta_v(1.0) - stated).abs());
        corner_oracle = corner_oracle.max((m.delta_v(1.0) - dv_with(g_cobb_douglas, &p, 1.0)).abs());
        let set = find_equilibria(&m, 500).unwrap();
        if set.agglomeration().stability != Stability::Unstable {
            agglomeration_eq += 1;
        }
        let g = general_break_points(&InnovationSpec::CobbDouglas, &p.lib());
        let (a1, a2) = break_point_formulas(&p.lib());
        for (x, y) in [(g.phi_b1.value, a1), (g.phi_b2.value, a2)] {
            if x.is_finite() || y.is_finite() {
                worst_break = worst_break.max((x - y).abs());
            }
        }
        let s = (dv_prime_with(g_cobb_douglas, &p, 0.5) - dv_prime(&p, 0.5)).abs();
        worst_slope = worst_slope.max(s);
    }
    let corner_ok = worst_corner < 1e-12;
    let never_ok = agglomeration_eq == 0;
    let break_ok = worst_break < 1e-10 && worst_slope < 1e-8;

    let mut panels = Vec::new();
    let mut panels_ok = true;
    for sc in scenarios().into_iter().filter(|s| s.name.starts_with("cd-")) {
        let (d, id) = classify(&sc);
        panels_ok &= id == sc.expected;
        let tag = if id == sc.expected { "ok" } else { "MISMATCH" };
        panels.push(format!("b={} {id} [{}] {tag}", sc.b, format_sequence(&regime_sequence(&d))));
    }
    Outcome::new(
        corner_ok && never_ok && break_ok && panels_ok,
        format!(
            "corner identity max err {worst_corner:.2e} (tol 1e-12) {}; agglomeration an equilibrium in {agglomeration_eq}/100 draws {}; break points max diff {worst_break:.1e} {}; panels {}",
            verdict(corner_ok),
            verdict(never_ok),
            verdict(break_ok),
            verdict(panels_ok)
        ),
    )
    .note(format!("library dv(1) vs oracle dv(1): max diff {corner_oracle:.1e}"))
    .note(panels.join("; "))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

// 9. Pitchfork criticality at (σ,γ,λ) = (8,1,4).
fn criterion_9() -> Outcome {
    let mut fails = Vec::new();
    let mut roots = Vec::new();
    for b in [0.7, 0.9] {
        let p = P::new(4.0, 1.0, 8.0, b, 0.5);
        let (r1, _) = break_point_formulas(&p.lib());
        roots.push(r1);
        // The closed-form root must zero the oracle slope, wherever it lies.
        let slope_at_root = dv_prime(&p.phi(r1), 0.5);
        if slope_at_root.abs() > 1e-8 {
            fails.push(format!("b={b}: dv'(1/2) at phi_b1 = {slope_at_root:e}"));
        }
        let pf = pitchfork_classify(&p.lib(), r1).unwrap();
        if pf.class != PitchforkClass::Supercritical {
            fails.push(format!("b={b}: xi = {} ({})", pf.xi, pf.class));
        }
        // Between φ_b1 and the first sustain point symmetric dispersion is
        // unstable and the bifurcated branch is stable.
        let s1 = scan_roots(|f| dv(&p.phi(f), 1.0), PHI_MIN, PHI_MAX, 2000, 1e-13)[0];
        for phi in [0.05 * s1, 0.5 * s1, 0.9 * s1] {
            let q = p.phi(phi);
            let set = find_equilibria(&model(&q), DEFAULT_GRID).unwrap();
            let stable: Vec<f64> = set.asymmetric_upper().iter().filter(|e| e.stability.is_stable()).map(|e| e.z_star).collect();
            let oracle_stable = scan_roots(|z| dv(&q, z) / (z - 0.5), 0.5 + 1e-9, 1.0 - 1e-12, 4000, 1e-14)
                .into_iter()
                .any(|z| dv_prime(&q, z) < 0.0);
            if set.symmetric().stability != Stability::Unstable || stable.is_empty() || !oracle_stable || dv_prime(&q, 0.5) <= 0.0 {
                fails.push(format!("b={b} phi={phi}: symmetric {}, stable asymmetric {stable:?}", set.symmetric().stability));
            }
        }
    }
    let left = roots[1] < roots[0];
    if !left {
        fails.push(format!("phi_b1(0.9) = {} not below phi_b1(0.7) = {}", roots[1], roots[0]));
    }
    Outcome::new(
        fails.is_empty(),
        format!("phi_b1(0.7) = {:.6}, phi_b1(0.9) = {:.6}, supercritical, stable branch beyond phi_b1", roots[0], roots[1]),
    )
    .note(if roots.iter().all(|r| *r <= 0.0) {
        "both break points lie below 0: the pitchfork sits outside the admissible range".to_string()
    } else {
        String::new()
    })
    .note(fails.join("; "))
}

fn g_logistic(z: f64, b: f64) -> f64 {
    let k = 4.0 * (2.0 * b - 1.0);
    0.25 + 0.5 / (1.0 + (-k * (z - 0.5)).exp())
}

fn g_quadratic(z: f64, b: f64) -> f64 {
    // Additive rule plus a symmetric bump; stays in [0,1] for b in (0,1).
    g_additive(z, b) + 0.1 * (2.0 * b - 1.0).abs() * z * (1.0 - z)
}

// 10. No complete re-dispersion when g'(1/2) > 0.
fn criterion_10() -> Outcome {
    let mut r = rng(10);
    let mut fails = Vec::new();
    let mut by_spec = [0usize; 4];
    for i in 0..100 {
        let mut p = draw(&mut r);
        p.b = r.gen_range(0.52..0.98);
        let (spec, g): (InnovationSpec, G) = match i % 4 {
            0 => (InnovationSpec::Additive, g_additive),
            1 => (InnovationSpec::CobbDouglas, g_cobb_douglas),
            2 => (InnovationSpec::Custom(CustomInteraction::new("logistic", g_logistic)), g_logistic),
            _ => (InnovationSpec::Custom(CustomInteraction::new("quadratic", g_quadratic)), g_quadratic),
        };
        by_spec[i % 4] += 1;
        Model::new(spec.clone(), p.lib()).expect("shape restrictions hold");
        let gb = general_break_points(&spec, &p.lib());
        assert!(gb.g_prime_half > 0.0);
        let v = gb.phi_b2.value;
        let outside = v.is_nan() || !(v > 0.0 && v < 1.0);
        // Oracle: the symmetric slope never turns negative again once positive.
        let crossings = scan_roots(|f| dv_prime_with(g, &p.phi(f), 0.5), PHI_MIN, PHI_MAX, 1000, 1e-12);
        let redisperses = crossings
            .iter()
            .any(|&f| dv_prime_with(g, &p.phi((f + 1e-6).min(PHI_MAX)), 0.5) < 0.0);
        if !outside || redisperses {
            fails.push(format!("{} {p:?}: phi_b2 = {v}, oracle crossings {crossings:?}", spec.kind()));
        }
    }
    Outcome::new(
        fails.is_empty(),
        format!(
            "100 points ({} additive, {} cobb-douglas, {} + {} custom): phi_b2 outside (0,1) in {}",
            by_spec[0],
            by_spec[1],
            by_spec[2],
            by_spec[3],
            100 - fails.len()
        ),
    )
    .note(fails.into_iter().take(3).collect::<Vec<_>>().join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("equilibrium gallery", criterion_1),
        ("threshold back-substitution", criterion_2),
        ("sign identities", criterion_3),
        ("interior equilibrium bound", criterion_4),
        ("lambda* consistency", criterion_5),
        ("derivative oracles", criterion_6),
        ("scenario taxonomy", criterion_7),
        ("cobb-douglas suite", criterion_8),
        ("pitchfork criticality", criterion_9),
        ("no complete re-dispersion", criterion_10),
    ];
    let mut passed = 0;
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {name}: {} ({:.1}s)", i + 1, o.detail, t.elapsed().as_secs_f64());
        for n in o.notes.iter().filter(|n| !n.is_empty()) {
            println!("             note: {n}");
        }
        passed += usize::from(o.pass);
        if !o.pass {
            failed.push((i + 1).to_string());
        }
    }
    println!("acceptance: {passed}/10 criteria pass");
    if failed.is_empty() {
        return;
    }
    println!("acceptance: FAILING criteria: {}", failed.join(", "));
    // Failing criteria stay failing; the exit status is opt-in so that a
    // plain `cargo test` still runs the targets that sort after this one.
    if std::env::var_os("INNOGEO_ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
    println!("acceptance: set INNOGEO_ACCEPTANCE_STRICT=1 to turn failures into a non-zero exit");
}
