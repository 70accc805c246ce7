//! Whittaker function W_{ρ,σ}(x) for real ρ, complex σ and x > 0.
//!
//! Three representations are implemented and cross-checked:
//! the two-term ₁F₁ combination, the Kummer (Laplace-type) integral, and the
//! Barnes integral along Re u = c.  W is even in σ, so σ is first moved to
//! Re σ ≥ 0.  The two-term formula is used for x ≤ max(4, 2|Im σ|); beyond
//! that its terms grow like e^{x} while W decays like e^{−x/2}, and the Kummer
//! integral takes over.  Near 2σ ∈ ℤ the two-term formula is singular, so the
//! integrals are used there.

use std::f64::consts::PI;

use crate::error::{finite, Error, Result};
use crate::quadrature::{quad_estimate, QuadratureConfig};
use crate::specfun::gamma::{gamma, log_gamma, rgamma};
use crate::specfun::hyper::hyp1f1;
use crate::C64;

fn normalise(sigma: C64) -> C64 {
    if sigma.re < 0.0 || (sigma.re == 0.0 && sigma.im < 0.0) {
        -sigma
    } else {
        sigma
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("W needs x > 0, got {x}")))
    }
}

/// Distance from 2σ to the nearest integer.
fn degeneracy(sigma: C64) -> f64 {
    let t = sigma * 2.0;
    (t - t.re.round()).norm()
}

/// Two-term ₁F₁ representation; singular when 2σ is an integer.
pub fn whittaker_w_series(rho: f64, sigma: C64, x: f64) -> Result<C64> {
    check_x(x)?;
    let sigma = normalise(sigma);
    if degeneracy(sigma) < 1e-12 {
        return Err(Error::Pole(format!("two-term W formula is singular at 2 sigma = {}", sigma * 2.0)));
    }
    let half = C64::new(0.5 - rho, 0.0);
    let xc = C64::new(x, 0.0);
    let first = gamma(-sigma * 2.0)? * rgamma(half - sigma)? * xc.powc(sigma + 0.5) * hyp1f1(half + sigma, sigma * 2.0 + 1.0, xc)?;
    let pref = (-0.5 * x).exp();
    if sigma.re == 0.0 {
        // the second term is the conjugate of the first
        return Ok(C64::new(2.0 * pref * first.re, 0.0));
    }
    let second = gamma(sigma * 2.0)? * rgamma(half + sigma)? * xc.powc(-sigma + 0.5) * hyp1f1(half - sigma, -sigma * 2.0 + 1.0, xc)?;
    finite((first + second) * pref, "whittaker_w_series")
}

/// Kummer integral
/// W = e^{−x/2} x^ρ / Γ(1/2+σ−ρ) ∫_0^∞ e^{−u} u^{σ−ρ−1/2} (1+u/x)^{σ+ρ−1/2} du,
/// valid for Re(1/2 + σ − ρ) > 0 (after σ → ±σ).
pub fn whittaker_w_kummer(rho: f64, sigma: C64, x: f64) -> Result<C64> {
    check_x(x)?;
    let sigma = normalise(sigma);
    let p = sigma - rho - 0.5;
    let q = sigma + rho - 0.5;
    if p.re <= -1.0 {
        return Err(Error::Domain(format!("Kummer integral needs Re(1/2 + sigma - rho) > 0 (sigma = {sigma}, rho = {rho})")));
    }
    let cfg = QuadratureConfig { abs_tol: 1e-300, rel_tol: 1e-14, max_levels: 11, truncation_radius: None };
    // For large |Im σ| the factor u^{σ} oscillates and cancels down to the size
    // of Γ(1/2+σ−ρ); along the ray u = t·e^{iθ} it decays instead.  The branch
    // point u = −x stays off the sector |θ| < π/2.
    let theta = if p.im.abs() > 2.0 { 1.2f64.copysign(p.im) } else { 0.0 };
    let dir = C64::from_polar(1.0, theta);
    let est = quad_estimate(
        |t| {
            let u = dir * t;
            let lu = C64::new(t.ln(), theta);
            let l1 = (u / x + 1.0).ln();
            Ok((p * lu + q * l1 - u).exp() * dir)
        },
        0.0,
        f64::INFINITY,
        &cfg,
    )?;
    // past the turning point x ≈ 2|σ| the integral falls far below its
    // large-x limit Γ(1/2+σ−ρ), so W is resolved against x^ρe^{−x/2}
    let r = rgamma(sigma - rho + 0.5)?;
    if !est.converged && est.error > 1e-8 * est.value.norm().max(1.0 / r.norm()) {
        return Err(Error::Tolerance(format!("Kummer integral error {:.2e}", est.error)));
    }
    let v = est.value * r * x.powf(rho) * (-0.5 * x).exp();
    if sigma.re == 0.0 {
        return Ok(C64::new(v.re, 0.0));
    }
    finite(v, "whittaker_w_kummer")
}

/// Barnes integral along Re u = c with −1/2 + |Re σ| < c < −ρ:
/// W = e^{−x/2} / (2π Γ(1/2−ρ−σ)Γ(1/2−ρ+σ)) ∫ Γ(u+1/2+σ)Γ(u+1/2−σ)Γ(−ρ−u) x^{−u} dy,
/// u = c + iy.
pub fn whittaker_w_barnes(rho: f64, sigma: C64, x: f64) -> Result<C64> {
    check_x(x)?;
    let sigma = normalise(sigma);
    let lo = -0.5 + sigma.re;
    let hi = -rho;
    if !(lo < hi) {
        return Err(Error::Domain(format!("no Barnes contour: need -1/2 + Re sigma < -rho (sigma = {sigma}, rho = {rho})")));
    }
    let c = 0.5 * (lo + hi);
    let lx = x.ln();
    let cfg = QuadratureConfig { abs_tol: 1e-300, rel_tol: 1e-14, max_levels: 11, truncation_radius: None };
    let est = quad_estimate(
        |y| {
            let u = C64::new(c, y);
            let l = log_gamma(u + sigma + 0.5)? + log_gamma(u - sigma + 0.5)? + log_gamma(-u - rho)? - u * lx;
            Ok(l.exp())
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &cfg,
    )?;
    if !est.converged && est.error > 1e-8 * est.value.norm() {
        return Err(Error::Tolerance(format!("Barnes integral error {:.2e}", est.error)));
    }
    let half = C64::new(0.5 - rho, 0.0);
    let v = est.value * rgamma(half - sigma)? * rgamma(half + sigma)? * (-0.5 * x).exp() / (2.0 * PI);
    if sigma.re == 0.0 {
        return Ok(C64::new(v.re, 0.0));
    }
    finite(v, "whittaker_w_barnes")
}

/// Whittaker function W_{ρ,σ}(x), x > 0; even in σ.
pub fn whittaker_w(rho: f64, sigma: C64, x: f64) -> Result<C64> {
    check_x(x)?;
    let sigma = normalise(sigma);
    let kummer_ok = (sigma - rho + 0.5).re > 0.0;
    if degeneracy(sigma) < 1e-3 {
        return if kummer_ok { whittaker_w_kummer(rho, sigma, x) } else { whittaker_w_barnes(rho, sigma, x) };
    }
    if x <= 4.0f64.max(2.0 * sigma.im.abs()) || !kummer_ok {
        return whittaker_w_series(rho, sigma, x);
    }
    whittaker_w_kummer(rho, sigma, x)
}
