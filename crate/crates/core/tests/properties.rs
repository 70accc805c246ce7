//! Randomised checks of the algebraic identities behind the library.

use std::f64::consts::PI;

use imdiff::extensions::{d_eigen_residual, delta_eval, ExtensionParams};
use imdiff::polynomials::PolynomialFamily;
use imdiff::quadrature::{quad, QuadratureConfig};
use imdiff::specfun::{gamma, hyp2f1_continued, hyp_pfq, log_gamma, macdonald_k, whittaker_w, ContinuationPath};
use imdiff::weights_ops::{check_shift_symmetry_law, make_operator, WeightSpec};
use imdiff::{c64, C64};
use proptest::prelude::*;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn gamma_recurrence(x in 0.1f64..10.0, y in -10.0f64..10.0) {
        let z = c64(x, y);
        prop_assert!(rel(gamma(z + 1.0).unwrap(), z * gamma(z).unwrap()) < 1e-12);
    }

    #[test]
    fn gamma_commutes_with_conjugation(x in -6.0f64..8.0, y in 0.05f64..12.0) {
        let z = c64(x, y);
        prop_assert!(rel(gamma(z.conj()).unwrap(), gamma(z).unwrap().conj()) < 1e-13);
    }

    #[test]
    fn log_gamma_exponentiates_to_gamma(x in 0.2f64..12.0, y in -15.0f64..15.0) {
        let z = c64(x, y);
        prop_assert!(rel(log_gamma(z).unwrap().exp(), gamma(z).unwrap()) < 1e-12);
    }

    #[test]
    fn continued_2f1_matches_series_inside_the_disk(
        a in -1.5f64..1.5, b in -1.5f64..1.5, c in 0.6f64..2.5, r in 0.0f64..0.7, t in 0.0f64..(2.0 * PI),
    ) {
        let z = C64::from_polar(r, t);
        let (a, b, c) = (c64(a, 0.3), c64(b, -0.2), c64(c, 0.1));
        let path = ContinuationPath::straight(z).unwrap();
        let ode = hyp2f1_continued(a, b, c, &path).unwrap();
        let series = hyp_pfq(&[a, b], &[c], z).unwrap();
        prop_assert!((ode - series).norm() < 1e-10 * series.norm().max(1.0), "{ode} vs {series}");
    }

    #[test]
    fn macdonald_k_is_even_and_real(s in 0.05f64..12.0, x in 0.1f64..20.0) {
        let a = macdonald_k(c64(0.0, s), x).unwrap();
        prop_assert_eq!(a, macdonald_k(c64(0.0, -s), x).unwrap());
        prop_assert_eq!(a.im, 0.0);
    }

    #[test]
    fn whittaker_w_is_even_in_sigma(rho in -1.0f64..0.4, s in 0.05f64..8.0, x in 0.2f64..15.0) {
        let a = whittaker_w(rho, c64(0.0, s), x).unwrap();
        prop_assert_eq!(a, whittaker_w(rho, c64(0.0, -s), x).unwrap());
    }

    #[test]
    fn coefficient_products_match_quotients(
        c in -1.0f64..1.0, a1 in 0.2f64..2.0, a2 in -1.0f64..1.0, b1 in 0.2f64..2.0, s in -6.0f64..6.0,
    ) {
        let spec = WeightSpec::new(c, &[c64(a1, a2), c64(a1 + 0.3, -a2)], &[c64(b1, 0.0)]);
        let s = c64(s, 0.0);
        prop_assert!(rel(spec.coeff_a(s).unwrap(), spec.coeff_a_quotient(s).unwrap()) < 1e-11);
        prop_assert!(rel(spec.coeff_b(s).unwrap(), spec.coeff_b_quotient(s).unwrap()) < 1e-11);
    }

    #[test]
    fn operators_annihilate_constants(c in -1.0f64..1.0, a1 in 0.2f64..2.0, a2 in -1.0f64..1.0, s in -5.0f64..5.0) {
        let spec = WeightSpec::new(c, &[c64(a1, a2), c64(0.5, 0.0)], &[]);
        let v = make_operator(&spec).apply_fn(|_| Ok(c64(1.0, 0.0)), c64(s, 0.0)).unwrap();
        let scale = spec.coeff_a(c64(s, 0.0)).unwrap().norm() + spec.coeff_b(c64(s, 0.0)).unwrap().norm();
        prop_assert!(v.norm() < 1e-13 * scale.max(1.0), "{v}");
    }

    #[test]
    fn shift_symmetry_law_on_the_critical_line(c in -1.0f64..1.0, b1 in -2.0f64..2.0, b2 in -2.0f64..2.0) {
        // with Re a_k = 1/2, A(s) = e^{ic}(−i)^m ∏(s + Im a_k + i/2)
        let spec = WeightSpec::new(c, &[c64(0.5, b1), c64(0.5, b2)], &[]);
        let norm = -C64::new(0.0, -c).exp();
        prop_assert!(check_shift_symmetry_law(|s| Ok(norm * spec.coeff_a(s)?)));
        let off = WeightSpec::new(c, &[c64(0.9, b1)], &[]);
        prop_assert!(!check_shift_symmetry_law(|s| Ok(C64::new(0.0, -c).exp() * C64::new(0.0, 1.0) * off.coeff_a(s)?)));
    }

    #[test]
    fn quadrature_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, k in 0.5f64..3.0) {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| c64((-x * x).exp(), 0.0);
        let g = |x: f64| c64((k * x).cos() / (1.0 + x * x), 0.0);
        let lhs = quad(|x| Ok(f(x) * alpha + g(x) * beta), -8.0, 8.0, &cfg).unwrap().value;
        let rhs = quad(|x| Ok(f(x)), -8.0, 8.0, &cfg).unwrap().value * alpha + quad(|x| Ok(g(x)), -8.0, 8.0, &cfg).unwrap().value * beta;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (alpha.abs() + beta.abs()).max(1.0));
    }

    #[test]
    fn meixner_pollaczek_eigen_relation(a in 0.2f64..2.0, phi in 0.2f64..3.0, n in 0usize..7, s in -4.0f64..4.0, t in -0.5f64..0.5) {
        let fam = PolynomialFamily::meixner_pollaczek(a, phi).unwrap();
        prop_assert!(fam.relative_eigen_defect(n, &[c64(s, t)]).unwrap() < 1e-9);
    }

    #[test]
    fn delta_modulus_closed_form(tau in -1.0f64..1.0, sigma in -1.0f64..1.0, phi in 0.1f64..3.0, x in -5.0f64..5.0) {
        let p = ExtensionParams::new(tau, sigma, phi).unwrap();
        let want = 1.0 / (1.0 + 2.0 * x * phi.cos() + x * x);
        prop_assert!((delta_eval(&p, 0.0, x).norm_sqr() - want).abs() < 1e-12 * want.max(1.0));
    }

    #[test]
    fn d_residual_is_small(tau in -0.8f64..0.8, sigma in -0.8f64..0.8, phi in 0.3f64..2.8, shift in -2i32..3, x in -3.0f64..3.0) {
        let p = ExtensionParams::new(tau, sigma, phi).unwrap();
        prop_assert!(d_eigen_residual(&p, shift as f64, x, false).unwrap() < 1e-6);
    }
}
