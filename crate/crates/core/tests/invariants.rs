use cbe::gap::{e_bulk, e_finite_cue};
use cbe::numerics::{digamma, gauss_legendre};
use cbe::sff::{sff_bulk_term, sff_exact, sff_scaled, sff_series};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legendre_rule_shape(n in 1usize..60, lo in -5.0f64..5.0, width in 0.1f64..10.0) {
        let hi = lo + width;
        let r = gauss_legendre(n, lo, hi).unwrap();
        prop_assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(r.nodes.iter().all(|&x| lo < x && x < hi));
        prop_assert!(r.weights.iter().all(|&w| w > 0.0));
        let total: f64 = r.weights.iter().sum();
        prop_assert!((total / width - 1.0).abs() < 1e-13);
    }

    #[test]
    fn legendre_exact_on_polynomials(n in 1usize..25, k_frac in 0.0f64..1.0) {
        let k = ((2 * n - 1) as f64 * k_frac) as i32;
        let r = gauss_legendre(n, 0.0, 1.0).unwrap();
        let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k)).sum();
        prop_assert!((q * (k + 1) as f64 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn digamma_recurrence(z in 0.5f64..20.0) {
        let lhs = digamma(z + 1.0).unwrap();
        let rhs = digamma(z).unwrap() + 1.0 / z;
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn gap_probability_bounds(s in 0.05f64..2.5, ds in 0.02f64..0.5, xi in 0.05f64..1.0) {
        for beta in [1u32, 2, 4] {
            let a = e_bulk(beta, 0, s, xi).unwrap();
            let b = e_bulk(beta, 0, s + ds, xi).unwrap();
            prop_assert!(a > 0.0 && a <= 1.0);
            prop_assert!(b < a);
        }
    }

    #[test]
    fn finite_cue_gap_bounds(n in 2usize..30, phi in 0.01f64..6.0, xi in 0.0f64..1.0) {
        let e = e_finite_cue(n, phi, xi).unwrap();
        prop_assert!(e > -1e-12 && e <= 1.0 + 1e-12);
    }

    #[test]
    fn exact_sff_even_in_k(n in 2usize..60, k in 0i64..200) {
        for beta in [1u32, 2, 4] {
            prop_assert_eq!(sff_exact(beta, n, k).unwrap(), sff_exact(beta, n, -k).unwrap());
        }
    }

    #[test]
    fn bulk_sff_nonnegative_and_saturating(tau in 0.0f64..6.0) {
        for beta in [1u32, 2, 4] {
            let s = sff_bulk_term(beta, 0, tau).unwrap();
            prop_assert!(s >= 0.0);
            if (beta == 4 && tau > 2.0) || (beta == 2 && tau > 1.0) {
                prop_assert_eq!(s, 1.0);
            }
        }
    }

    #[test]
    fn exact_sff_integer_matches_real(n in 2usize..60, k in 0i64..130) {
        for beta in [1u32, 2, 4] {
            let a = sff_exact(beta, n, k).unwrap();
            let b = cbe::sff::sff_exact_real(beta, n, k as f64 + 1e-9).unwrap();
            prop_assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn scaled_sff_tends_to_bulk(tau in 0.05f64..0.9) {
        for beta in [1u32, 2, 4] {
            let d = (sff_scaled(beta, 400, tau).unwrap() - sff_bulk_term(beta, 0, tau).unwrap()).abs();
            prop_assert!(d < 1e-4);
        }
    }

    #[test]
    fn series_kappa_inversion(tau in 0.01f64..0.15, kappa in 0.5f64..2.0) {
        // S_l(−τ/κ; 1/κ) = −κ^{1+2l} S_l(τ; κ)
        for l in 0..3usize {
            let a = sff_series(2.0 * kappa, l, tau).unwrap();
            let b = sff_series(2.0 / kappa, l, -tau / kappa).unwrap();
            let scale = kappa.powi(1 + 2 * l as i32);
            prop_assert!((b + scale * a).abs() < 1e-12 * (1.0 + scale * a.abs()));
        }
    }
}
