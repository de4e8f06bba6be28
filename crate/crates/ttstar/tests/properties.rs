//! Property tests for the structural invariants of the parameter space and
//! the scalar special functions.

use proptest::prelude::*;
use ttstar::correspondence::{global_rho, stokes_from_alpha, stokes_from_gamma};
use ttstar::data::{alpha_from_gamma, gamma_from_alpha, reflect, weights, GammaData, HoloData};
use ttstar::specfun::{digamma, gamma_fn};

/// Strategy producing points of the closed parameter triangle.
fn region_point() -> impl Strategy<Value = GammaData> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, b)| {
        let g0 = -1.0 + 4.0 * a;
        let g1 = (g0 - 2.0) + (3.0 - g0) * b;
        GammaData::new(g0, g1)
    })
}

proptest! {
    #[test]
    fn gauge_round_trip(g in region_point()) {
        let a = alpha_from_gamma(&g).unwrap();
        let back = gamma_from_alpha(&a).unwrap();
        prop_assert!((back.gamma0 - g.gamma0).abs() < 1e-13);
        prop_assert!((back.gamma1 - g.gamma1).abs() < 1e-13);
        // canonical gauge and non-negativity
        prop_assert!((a.n_total - 1.0).abs() < 1e-12);
        prop_assert!(a.alpha0 >= -1e-15 && a.alpha1 >= -1e-15 && a.alpha2 >= -1e-15);
    }

    #[test]
    fn stokes_gauges_agree(g in region_point()) {
        let sa = stokes_from_gamma(&g).unwrap();
        let sb = stokes_from_alpha(&alpha_from_gamma(&g).unwrap()).unwrap();
        prop_assert!((sa.s1 - sb.s1).abs() < 1e-12);
        prop_assert!((sa.s2 - sb.s2).abs() < 1e-12);
        // bounds on the closed region
        prop_assert!((-4.0 - 1e-12..=4.0 + 1e-12).contains(&sa.s1));
        prop_assert!((-6.0 - 1e-12..=2.0 + 1e-12).contains(&sa.s2));
    }

    #[test]
    fn weight_identities(g in region_point(), c0 in 0.3..3.0f64, c1 in 0.3..3.0f64, c2 in 0.3..3.0f64) {
        let h = HoloData::new(c0, c1, c2, c1).unwrap();
        let w = weights(&g, &h).unwrap();
        prop_assert!((w.m[0] + w.m[3]).abs() < 1e-14);
        prop_assert!((w.m[1] + w.m[2]).abs() < 1e-14);
        for i in 1..4 {
            prop_assert!((w.a[i - 1] - (w.m[0] - w.m[i] + i as f64)).abs() < 1e-12);
        }
        prop_assert!(w.chat0 > 0.0 && w.chat1 > 0.0);
    }

    #[test]
    fn reflection_involution_and_equivariance(g in region_point()) {
        let r2 = reflect(&reflect(&g));
        prop_assert!((r2.gamma0 - g.gamma0).abs() < 1e-15);
        prop_assert!((r2.gamma1 - g.gamma1).abs() < 1e-15);
        let s = stokes_from_gamma(&g).unwrap();
        let sr = stokes_from_gamma(&reflect(&g)).unwrap();
        prop_assert!((sr.s1 + s.s1).abs() < 1e-12);
        prop_assert!((sr.s2 - s.s2).abs() < 1e-12);
        if g.is_interior() {
            let (r0, r1) = global_rho(&g).unwrap();
            let (q0, q1) = global_rho(&reflect(&g)).unwrap();
            prop_assert!((q0 + r1).abs() < 1e-11 * (1.0 + r1.abs()));
            prop_assert!((q1 + r0).abs() < 1e-11 * (1.0 + r0.abs()));
        }
    }

    #[test]
    fn gamma_reflection_and_recurrence(x in 0.01..0.99f64, y in 0.1..40.0f64) {
        let lhs = gamma_fn(x).unwrap() * gamma_fn(1.0 - x).unwrap()
            * (std::f64::consts::PI * x).sin() / std::f64::consts::PI;
        prop_assert!((lhs - 1.0).abs() < 1e-12);
        let r = gamma_fn(y + 1.0).unwrap();
        prop_assert!((r - y * gamma_fn(y).unwrap()).abs() < 1e-12 * r.abs());
        // ψ(x+1) = ψ(x) + 1/x
        let d = digamma(y + 1.0).unwrap() - digamma(y).unwrap() - 1.0 / y;
        prop_assert!(d.abs() < 1e-12 * (1.0 + 1.0 / y));
    }
}
