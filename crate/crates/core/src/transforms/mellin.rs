//! Mellin transform 𝔐f(s) = ∫_0^∞ f(x) x^{is−1} dx and its inverse
//! (1/2π)∫ g(s) x^{−is} ds, unitary from L²(ℝ₊, dx/x) onto L²(ℝ, ds/2π).
//!
//! With x = e^u the forward transform is a Fourier integral, which is how it
//! is computed.  |x^{is}| = x^{−Im s}, so a function behaving like x^{p} at 0
//! and x^{−q} at ∞ has a transform analytic for −q < Im s < p.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{DecayClass, DecayRate, StripFunction};
use crate::specfun::gamma::gamma;
use crate::transforms::{integrate, spectral_integral, RealFunction, TransformConfig};
use crate::{c64, C64};

/// Open range lo < Im s < hi where the Mellin integral converges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    /// Window of a function ~ x^{p} at 0 and ~ x^{−q} at ∞.
    pub fn from_powers(p_at_zero: f64, q_at_infinity: f64) -> Self {
        Self {
            lo: -q_at_infinity,
            hi: p_at_zero,
        }
    }

    pub fn contains(&self, im: f64) -> bool {
        self.lo < im && im < self.hi
    }
}

/// 𝔐f as a strip function; `support` = (a, b) with 0 ≤ a < b ≤ ∞ limits the
/// x-integral to where f is nonzero.
pub fn mellin_forward(
    f: &RealFunction,
    window: Window,
    support: (f64, f64),
    cfg: TransformConfig,
) -> StripFunction {
    let f = f.clone();
    let (ua, ub) = (support.0.ln(), support.1.ln());
    let half_width = if window.contains(0.0) {
        window.hi.min(-window.lo)
    } else {
        0.0
    };
    StripFunction::new(
        move |s: C64| {
            if !window.contains(s.im) {
                return Err(Error::Window(format!(
                    "Im s = {} outside the Mellin window ({}, {})",
                    s.im, window.lo, window.hi
                )));
            }
            let is = c64(0.0, 1.0) * s;
            integrate(
                |u| {
                    let x = u.exp();
                    if x == 0.0 || !x.is_finite() {
                        return Ok(C64::new(0.0, 0.0));
                    }
                    let v = f.eval(x)?;
                    if v == C64::new(0.0, 0.0) {
                        return Ok(v);
                    }
                    Ok(v * (is * u).exp())
                },
                ua,
                ub,
                &cfg.quad,
                "Mellin transform",
            )
        },
        half_width,
        DecayClass::both(DecayRate::Polynomial(1.0)),
    )
}

/// (1/2π)∫ g(t + i·offset) x^{−i(t + i·offset)} dt over |t| ≤ spectral cutoff.
pub fn mellin_inverse(g: &StripFunction, x: f64, offset: f64, cfg: TransformConfig) -> Result<C64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "inverse Mellin needs x > 0, got {x}"
        )));
    }
    let lx = x.ln();
    let l = cfg.spectral_cutoff;
    let v = spectral_integral(
        |t| {
            let s = c64(t, offset);
            Ok(g.eval(s)? * (-c64(0.0, 1.0) * s * lx).exp())
        },
        -l,
        l,
    )?;
    Ok(v / (2.0 * PI))
}

fn pair_integral(
    alpha: f64,
    x: f64,
    c: f64,
    kernel: impl Fn(C64) -> C64 + Sync,
    cfg: TransformConfig,
) -> Result<C64> {
    if !(alpha > 0.0 && x > 0.0 && c > 0.0 && c < alpha) {
        return Err(Error::Parameter(
            "need alpha > 0, x > 0 and 0 < c < alpha".into(),
        ));
    }
    let i = c64(0.0, 1.0);
    let v = integrate(
        |t| {
            let s = c64(t, -c);
            Ok(gamma(i * s)? * gamma(-i * s + alpha)? * kernel(s))
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &cfg.quad,
        "Mellin pair integral",
    )?;
    Ok(v / (2.0 * PI))
}

/// (1/2π)∫ Γ(is)Γ(α−is) x^{is−1} ds along Im s = −c (the real line carries the
/// pole of Γ(is), so some 0 < c < α is required).
pub fn mellin_pair_forward_kernel(alpha: f64, x: f64, c: f64, cfg: TransformConfig) -> Result<C64> {
    let lx = x.ln();
    pair_integral(alpha, x, c, |s| ((c64(0.0, 1.0) * s - 1.0) * lx).exp(), cfg)
}

/// (1/2π)∫ Γ(is)Γ(α−is) x^{−is} ds along Im s = −c, which equals Γ(α)(1+x)^{−α}.
pub fn mellin_pair_inverse_kernel(alpha: f64, x: f64, c: f64, cfg: TransformConfig) -> Result<C64> {
    let lx = x.ln();
    pair_integral(alpha, x, c, |s| (-c64(0.0, 1.0) * s * lx).exp(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_of_unit_interval() {
        let f = RealFunction::new("1", |_| Ok(c64(1.0, 0.0)));
        let m = mellin_forward(
            &f,
            Window::from_powers(0.0, f64::INFINITY),
            (0.0, 1.0),
            TransformConfig::default(),
        );
        let s = c64(0.7, -0.5);
        let want = c64(1.0, 0.0) / (c64(0.0, 1.0) * s);
        assert!((m.eval(s).unwrap() - want).norm() < 1e-11);
        assert!(matches!(m.eval(c64(0.7, 0.2)), Err(Error::Window(_))));
    }

    #[test]
    fn gamma_image() {
        let f = RealFunction::new("sqrt(x)exp(-x)", |x: f64| {
            Ok(c64(x.sqrt() * (-x).exp(), 0.0))
        });
        let m = mellin_forward(
            &f,
            Window::from_powers(0.5, f64::INFINITY),
            (0.0, f64::INFINITY),
            TransformConfig::default(),
        );
        let want = gamma(c64(0.5, 0.7)).unwrap();
        assert!((m.eval(c64(0.7, 0.0)).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn round_trip_gaussian_in_log() {
        let f = RealFunction::new("exp(-ln^2 x)", |x: f64| {
            Ok(c64((-x.ln().powi(2)).exp(), 0.0))
        });
        let cfg = TransformConfig::default();
        let m = mellin_forward(
            &f,
            Window {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            },
            (0.0, f64::INFINITY),
            cfg,
        );
        for &x in &[0.5, 1.0, 3.0] {
            let back = mellin_inverse(&m, x, 0.0, cfg).unwrap();
            assert!((back - f.eval(x).unwrap()).norm() < 1e-9, "x = {x}: {back}");
        }
    }

    #[test]
    fn pair_identities() {
        let cfg = TransformConfig::default();
        let (a, x) = (1.5f64, 0.8f64);
        let want = gamma(c64(a, 0.0)).unwrap().re * (1.0 + x).powf(-a);
        let shifted = mellin_pair_inverse_kernel(a, x, 0.5, cfg).unwrap();
        assert!(
            (shifted.re - want).abs() < 1e-10 * want,
            "{shifted} vs {want}"
        );
        // mpmath quad of the x^{is-1} integrand along Im s = -1/2
        let forward = mellin_pair_forward_kernel(a, x, 0.5, cfg).unwrap();
        assert!((forward.re - 0.328_232_194_612_132_59).abs() < 1e-10);
    }
}
