//! Macdonald function K_ν(x) of complex order and positive argument.
//!
//! Two evaluation routes:
//! the power series of I_{±ν} combined as (π/2)(I_{−ν} − I_ν)/sin(νπ), and
//! the integral ∫_0^∞ e^{−x cosh t} cosh(νt) dt.
//! For ν = is the series loses accuracy like e^{x−s} once x > s, whereas the
//! integral loses about πs/2 − x nats to cancellation; the two losses cross
//! near x = 1.2s, so the series covers x ≤ max(2, 1.2|Im ν|) and the
//! integral the rest, plus every order within
//! 0.05 of an integer, where the series formula degenerates.  For orders off
//! the imaginary axis the base of the seam drops to 1, since I_{±ν} then
//! cancel like e^{2x}.

use std::f64::consts::PI;

use crate::error::{finite, Error, Result};
use crate::quadrature::{quad_estimate, QuadratureConfig};
use crate::specfun::gamma::{rgamma, sin_pi};
use crate::C64;

/// Power series of I_ν(x).
pub fn bessel_i_series(nu: C64, x: f64) -> Result<C64> {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = C64::new(half, 0.0).powc(nu) * rgamma(nu + 1.0)?;
    let mut sum = term;
    let mut small = 0;
    for k in 0..2000usize {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (nu + kf + 1.0));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 3 && kf > nu.norm() {
                return finite(sum, "bessel_i_series");
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Divergence(format!("I series for nu = {nu}, x = {x} did not converge")))
}

/// K_ν(x) via the I_{±ν} series.  Undefined at integer ν.
pub fn macdonald_k_series(nu: C64, x: f64) -> Result<C64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("K needs x > 0, got {x}")));
    }
    if nu.re == 0.0 {
        let s = nu.im;
        if s == 0.0 {
            return Err(Error::Pole("series form of K is singular at nu = 0".into()));
        }
        let i = bessel_i_series(nu, x)?;
        return Ok(C64::new(-PI * i.im / (PI * s).sinh(), 0.0));
    }
    let sn = sin_pi(nu);
    if sn.norm() < 1e-12 {
        return Err(Error::Pole(format!("series form of K is singular at nu = {nu}")));
    }
    let v = (bessel_i_series(-nu, x)? - bessel_i_series(nu, x)?) * (0.5 * PI) / sn;
    finite(v, "macdonald_k_series")
}

/// K_ν(x) via ∫_0^∞ e^{−x cosh t} cosh(νt) dt.
pub fn macdonald_k_integral(nu: C64, x: f64) -> Result<C64> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("K needs x > 0, got {x}")));
    }
    // cut where the integrand is below e^{-40} times its size at t = 0
    let a = nu.re.abs();
    let budget = 40.0 + 0.5 * PI * nu.im.abs();
    let mut t_max = 1.0f64;
    while x * (t_max.cosh() - 1.0) - a * t_max < budget {
        t_max *= 1.25;
    }
    // oscillation cancels the integrand down to |K|, so accuracy is relative
    // to ∫e^{−x cosh t}dt ≈ √(π/2x)e^{−x}, not to the value
    let scale = (0.5 * PI / x).sqrt() * (-x).exp();
    let cfg = QuadratureConfig { abs_tol: (1e-16 * scale).max(1e-300), rel_tol: 1e-14, max_levels: 10, truncation_radius: None };
    let real_order = nu.im == 0.0;
    let imag_order = nu.re == 0.0;
    let est = quad_estimate(
        |t| {
            let e = (-x * t.cosh()).exp();
            let c = if real_order {
                C64::new((nu.re * t).cosh(), 0.0)
            } else if imag_order {
                C64::new((nu.im * t).cos(), 0.0)
            } else {
                (nu * t).cosh()
            };
            Ok(c * e)
        },
        0.0,
        t_max,
        &cfg,
    )?;
    if !est.converged && est.error > (1e-8 * est.value.norm()).max(1e-13 * scale) {
        return Err(Error::Tolerance(format!("K integral for nu = {nu}, x = {x}: error {:.2e}", est.error)));
    }
    finite(est.value, "macdonald_k_integral")
}

/// Largest x for which the series route is preferred.
pub fn series_limit(nu: C64) -> f64 {
    if nu.re == 0.0 {
        2f64.max(1.2 * nu.im.abs())
    } else {
        1f64.max(nu.im.abs())
    }
}

/// Macdonald function K_ν(x) for x > 0; even in ν, real for real x and ν ∈ iℝ ∪ ℝ.
pub fn macdonald_k(nu: C64, x: f64) -> Result<C64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("K needs x > 0, got {x}")));
    }
    let nu = if nu.re < 0.0 || (nu.re == 0.0 && nu.im < 0.0) { -nu } else { nu };
    let near_integer = (nu - nu.re.round()).norm() < 0.05;
    if !near_integer && x <= series_limit(nu) {
        return macdonald_k_series(nu, x);
    }
    let v = macdonald_k_integral(nu, x)?;
    if nu.re == 0.0 || nu.im == 0.0 {
        return Ok(C64::new(v.re, 0.0));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn half_order_closed_form() {
        // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x}
        for &x in &[0.3, 2.0, 7.0] {
            let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
            let got = macdonald_k(c64(0.5, 0.0), x).unwrap();
            assert!(rel(got, c64(want, 0.0)) < 1e-13, "x = {x}");
        }
        assert!((macdonald_k(c64(0.5, 0.0), 2.0).unwrap().re - 0.119_937_771_968_061_4).abs() < 1e-14);
    }

    #[test]
    fn evenness_and_reality() {
        let a = macdonald_k(c64(0.0, 0.7), 1.3).unwrap();
        let b = macdonald_k(c64(0.0, -0.7), 1.3).unwrap();
        assert_eq!(a, b);
        assert!(macdonald_k(c64(0.0, 2.0), 0.8).unwrap().im.abs() < 1e-12);
    }

    #[test]
    fn methods_agree_at_the_seam() {
        for &s in &[0.5, 1.0, 2.5, 4.0, 8.0, 12.0, 20.0, 29.0] {
            let x = series_limit(c64(0.0, s));
            let a = macdonald_k_series(c64(0.0, s), x).unwrap();
            let b = macdonald_k_integral(c64(0.0, s), x).unwrap();
            assert!(rel(a, b) < 1e-10, "s = {s}: {a} vs {b}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(macdonald_k(c64(0.3, 0.0), 0.0), Err(Error::Domain(_))));
        assert!(matches!(macdonald_k(c64(0.3, 0.0), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn integer_order_uses_limit() {
        // mpmath.besselk(1, 0.7)
        let got = macdonald_k(c64(1.0, 0.0), 0.7).unwrap();
        assert!((got.re - 1.050_283_535_312_918_0).abs() < 1e-13, "{got}");
    }
}
