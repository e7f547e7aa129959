//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the library's model code: the utility differential
//! is re-derived from the wage and price-index expressions, derivatives come
//! from Richardson-extrapolated central differences and roots from plain
//! bisection.

#![allow(dead_code)]

use rand::Rng;

/// A raw parameter point, kept separate from the library type on purpose.
#[derive(Debug, Clone, Copy)]
pub struct P {
    pub mu: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub b: f64,
    pub phi: f64,
}

impl P {
    pub fn new(lambda: f64, gamma: f64, sigma: f64, b: f64, phi: f64) -> P {
        P {
            mu: 1.0,
            lambda,
            gamma,
            sigma,
            b,
            phi,
        }
    }

    pub fn lib(&self) -> innogeo::ModelParams {
        innogeo::ModelParams::new(self.lambda, self.gamma, self.sigma, self.b, self.phi)
            .and_then(|p| p.with_mu(self.mu))
            .expect("oracle draws are valid")
    }

    pub fn phi(self, phi: f64) -> P {
        P { phi, ..self }
    }
    pub fn lambda(self, lambda: f64) -> P {
        P { lambda, ..self }
    }
    pub fn b(self, b: f64) -> P {
        P { b, ..self }
    }
}

pub type G = fn(f64, f64) -> f64;

pub fn g_additive(z: f64, b: f64) -> f64 {
    b * z + (1.0 - b) * (1.0 - z)
}

pub fn g_cobb_douglas(z: f64, b: f64) -> f64 {
    if z <= 0.0 || z >= 1.0 {
        // z^b (1-z)^(1-b) vanishes at both ends for b in (0,1).
        return 0.0;
    }
    (b * z.ln() + (1.0 - b) * (1.0 - z).ln()).exp()
}

/// Utility differential v1 − v2 for interaction `g`.
pub fn dv_with(g: G, p: &P, z: f64) -> f64 {
    let (f, h) = (p.phi, p.lambda / 2.0);
    let y = 1.0 - z;
    // Market-access terms: own demand at home, foreign demand discounted by φ.
    let access1 = (h + z) / (z + f * y) + f * (h + y) / (f * z + y);
    let access2 = (h + y) / (y + f * z) + f * (h + z) / (f * y + z);
    let wage_gap = p.mu * p.gamma / p.sigma * (g(z, p.b) * access1 - g(y, p.b) * access2);
    // Price-index ratio P2/P1 raised to μ.
    let price = p.mu / (p.sigma - 1.0) * ((z + f * y) / (y + f * z)).ln();
    wage_gap + price
}

pub fn dv(p: &P, z: f64) -> f64 {
    dv_with(g_additive, p, z)
}

/// Richardson-extrapolated central difference, O(h⁴).
pub fn deriv(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

pub fn dv_prime(p: &P, z: f64) -> f64 {
    deriv(|z| dv(p, z), z, 1e-3)
}

pub fn dv_prime_with(g: G, p: &P, z: f64) -> f64 {
    deriv(|z| dv_with(g, p, z), z, 1e-3)
}

/// Bisection to `tol` in x; `None` without a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo * fhi > 0.0 {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// All sign changes of `f` on a uniform `n`-cell grid over `[lo, hi]`,
/// each refined by bisection.
pub fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, tol: f64) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        if vs[i] == 0.0 {
            out.push(xs[i]);
        } else if vs[i] * vs[i + 1] < 0.0 {
            out.push(bisect(&f, xs[i], xs[i + 1], tol).unwrap());
        }
    }
    if vs[n] == 0.0 {
        out.push(xs[n]);
    }
    out
}

/// Broad random draw of a valid parameter point.
pub fn draw<R: Rng>(rng: &mut R) -> P {
    P::new(
        rng.gen_range(0.2..6.0),
        rng.gen_range(0.3..2.0),
        rng.gen_range(1.5..12.0),
        rng.gen_range(0.02..0.98),
        rng.gen_range(0.01..0.99),
    )
}
