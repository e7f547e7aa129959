//! Property tests over the admissible parameter space.

mod common;

use common::{dv, dv_prime, P};
use innogeo::equilibria::{find_equilibria, lambda_star, Kind};
use innogeo::model::Method;
use innogeo::report::round_sig;
use innogeo::thresholds::{break_condition_at, sustain_condition_at};
use innogeo::Model;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = P> {
    (0.2f64..6.0, 0.3f64..2.0, 1.5f64..12.0, 0.02f64..0.98, 0.01f64..0.99, 0.2f64..1.0).prop_map(
        |(lambda, gamma, sigma, b, phi, mu)| P {
            mu,
            ..P::new(lambda, gamma, sigma, b, phi)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn differential_is_antisymmetric(p in params(), z in 0.0f64..1.0) {
        let m = Model::additive(p.lib());
        let (a, b) = (m.delta_v(z), m.delta_v(1.0 - z));
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn library_matches_oracle(p in params(), z in 0.0f64..1.0) {
        let m = Model::additive(p.lib());
        let (a, o) = (m.delta_v(z), dv(&p, z));
        prop_assert!((a - o).abs() <= 1e-12 * o.abs().max(1.0), "{a} vs {o}");
    }

    #[test]
    fn analytic_slope_matches_oracle(p in params(), z in 0.05f64..0.95) {
        let a = Model::additive(p.lib()).delta_v_prime(z, Method::Analytic).unwrap();
        let o = dv_prime(&p, z);
        prop_assert!((a - o).abs() <= 1e-6 * o.abs().max(1e-3), "{a} vs {o}");
    }

    #[test]
    fn b_raises_the_differential_above_symmetry(p in params(), z in 0.51f64..0.99) {
        prop_assert!(Model::additive(p.lib()).d_delta_v_db(z).unwrap() > 0.0);
    }

    #[test]
    fn threshold_signs(p in params()) {
        let lp = p.lib();
        let (s, c) = (sustain_condition_at(&lp, p.phi), dv(&p, 1.0));
        prop_assert!(s.abs() < 1e-9 || c.abs() < 1e-9 || s.signum() == c.signum());
        let (bb, d) = (break_condition_at(&lp, p.phi), dv_prime(&p, 0.5));
        prop_assert!(bb.abs() < 1e-9 || d.abs() < 1e-9 || bb.signum() == d.signum());
    }

    #[test]
    fn lambda_star_is_an_equilibrium(p in params(), z in 0.52f64..0.98) {
        if let Ok(ls) = lambda_star(&p.lib(), z) {
            prop_assume!(ls.admissible && ls.value < 1e6);
            prop_assert!(dv(&p.lambda(ls.value), z).abs() < 1e-9);
        }
    }

    #[test]
    fn equilibrium_sets_are_mirror_symmetric(p in params()) {
        let set = find_equilibria(&Model::additive(p.lib()), 400).unwrap();
        let n = set.equilibria.len();
        prop_assert!(n % 2 == 1);
        prop_assert!(set.interior_count_upper_half <= 2);
        for (a, b) in set.equilibria.iter().zip(set.equilibria.iter().rev()) {
            prop_assert!((a.z_star + b.z_star - 1.0).abs() < 1e-12);
            prop_assert_eq!(a.kind, b.kind);
            prop_assert_eq!(a.stability, b.stability);
        }
        prop_assert_eq!(set.equilibria[n / 2].kind, Kind::SymmetricDispersion);
        for e in set.asymmetric_upper() {
            prop_assert!(dv(&p, e.z_star).abs() < 1e-10);
        }
    }

    #[test]
    fn rounding_round_trips(x in prop::num::f64::NORMAL, digits in 1usize..=17) {
        let r = round_sig(x, digits);
        let text = r.to_string();
        prop_assert_eq!(text.parse::<f64>().unwrap().to_bits(), r.to_bits());
        prop_assert_eq!(round_sig(r, digits).to_bits(), r.to_bits());
    }
}
