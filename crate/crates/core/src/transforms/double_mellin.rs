//! Double Mellin transform of a function on the whole line:
//!
//! g₁(s) = ∫_0^∞ f(x) x^{is−1/2} dx,  g₂(s) = −i e^{−πs} ∫_{−∞}^0 f(x) (−x)^{is−1/2} dx,
//!
//! with ∫|f|²dx = (1/2π)(∫|g₁|²ds + ∫|g₂|²e^{2πs}ds).  Each half is a Mellin
//! transform along Im s = 0 after the substitution x = ±e^u.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{DecayClass, DecayRate, StripFunction};
use crate::transforms::{integrate, memoize, spectral_integral, RealFunction, TransformConfig};
use crate::{c64, C64};

const I: C64 = C64::new(0.0, 1.0);

/// The pair (g₁, g₂).
#[derive(Clone)]
pub struct DoubleMellin {
    pub g1: StripFunction,
    pub g2: StripFunction,
}

/// Both sides of the Plancherel identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlancherelSides {
    pub source: f64,
    pub target: f64,
}

impl PlancherelSides {
    pub fn defect(&self) -> f64 {
        (self.target - self.source).abs() / self.source.abs().max(f64::MIN_POSITIVE)
    }
}

/// Below this u = ln|x| the subtracted integrand (f − f(0))e^{(is+1/2)u} is
/// under e^{−45}.
const U_FLOOR: f64 = -30.0;

/// ∫_lo^hi f(σx) x^{is−1/2} dx, σ = ±1, 0 ≤ lo ≤ hi ≤ ∞; valid for
/// Im s < 1/2 when f is bounded near 0.
///
/// In u = ln x the integrand decays only like e^{u/2} as u → −∞ while
/// oscillating at frequency Re s.  When the support reaches 0 the constant
/// f(0) is integrated in closed form and the remainder, which decays like
/// e^{3u/2}, on Gauss–Legendre panels; f(±e^{−40}) stands in for the one-sided
/// limit f(0±).
fn half_transform(
    f: &RealFunction,
    sign: f64,
    (lo, hi): (f64, f64),
    s: C64,
    cfg: &TransformConfig,
) -> Result<C64> {
    if s.im >= 0.5 {
        return Err(Error::Window(format!(
            "Im s = {} outside the window Im s < 1/2",
            s.im
        )));
    }
    if !(lo < hi) {
        return Ok(C64::new(0.0, 0.0));
    }
    let e = I * s + 0.5;
    let body = |u: f64| -> Result<C64> {
        let x = u.exp();
        if x == 0.0 || !x.is_finite() {
            return Ok(C64::new(0.0, 0.0));
        }
        let v = f.eval(sign * x)?;
        if v == C64::new(0.0, 0.0) {
            return Ok(v);
        }
        Ok(v * (e * u).exp())
    };
    if lo > 0.0 {
        return integrate(body, lo.ln(), hi.ln(), &cfg.quad, "double Mellin transform");
    }
    let uc = hi.ln().min(0.0);
    let f0 = f.eval(sign * (-40f64).exp())?;
    let near = spectral_integral(
        |u| Ok((f.eval(sign * u.exp())? - f0) * (e * u).exp()),
        U_FLOOR,
        uc,
    )?;
    let far = integrate(body, uc, hi.ln(), &cfg.quad, "double Mellin transform")?;
    Ok(near + f0 * (e * uc).exp() / e + far)
}

/// (g₁, g₂) for f supported in `support` = (a, b), a < b, infinite ends allowed.
pub fn double_mellin_forward(
    f: &RealFunction,
    support: (f64, f64),
    cfg: TransformConfig,
) -> DoubleMellin {
    let (a, b) = support;
    let pos = (a.max(0.0), b.max(0.0));
    let neg = ((-b).max(0.0), (-a).max(0.0));
    let decay = DecayClass::both(DecayRate::Exponential(PI / 4.0));
    let f1 = f.clone();
    let g1 = memoize(StripFunction::new(
        move |s| half_transform(&f1, 1.0, pos, s, &cfg),
        0.0,
        decay,
    ));
    let f2 = f.clone();
    let g2 = memoize(StripFunction::new(
        move |s| Ok(half_transform(&f2, -1.0, neg, s, &cfg)? * (-I) * (-PI * s).exp()),
        0.0,
        decay,
    ));
    DoubleMellin { g1, g2 }
}

/// f(x) = (1/2π)∫ g₁(s) x^{−is−1/2} ds for x > 0 and
/// (1/2π)∫ i e^{πs} g₂(s) (−x)^{−is−1/2} ds for x < 0, over |s| ≤ cutoff.
pub fn double_mellin_inverse(g: &DoubleMellin, x: f64, cfg: TransformConfig) -> Result<C64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "inverse double Mellin needs finite x != 0, got {x}"
        )));
    }
    let lx = x.abs().ln();
    let l = cfg.spectral_cutoff;
    let v = if x > 0.0 {
        spectral_integral(
            |s| Ok(g.g1.eval(c64(s, 0.0))? * (-(I * s + 0.5) * lx).exp()),
            -l,
            l,
        )?
    } else {
        spectral_integral(
            |s| Ok(g.g2.eval(c64(s, 0.0))? * I * (PI * s).exp() * (-(I * s + 0.5) * lx).exp()),
            -l,
            l,
        )?
    };
    Ok(v / (2.0 * PI))
}

/// ∫|f|²dx against (1/2π)(∫|g₁|² + ∫|g₂|²e^{2πs}) over |s| ≤ cutoff.
pub fn double_mellin_plancherel(f: &RealFunction, cfg: TransformConfig) -> Result<PlancherelSides> {
    let g = double_mellin_forward(f, (f64::NEG_INFINITY, f64::INFINITY), cfg);
    let source = integrate(
        |x| Ok(C64::new(f.eval(x)?.norm_sqr(), 0.0)),
        f64::NEG_INFINITY,
        f64::INFINITY,
        &cfg.quad,
        "L2 norm",
    )?
    .re;
    let l = cfg.spectral_cutoff;
    let t = spectral_integral(
        |s| {
            let p = c64(s, 0.0);
            Ok(C64::new(
                g.g1.eval(p)?.norm_sqr() + g.g2.eval(p)?.norm_sqr() * (2.0 * PI * s).exp(),
                0.0,
            ))
        },
        -l,
        l,
    )?;
    Ok(PlancherelSides {
        source,
        target: t.re / (2.0 * PI),
    })
}

/// Spectral cutoff used for the double Mellin checks: |g₁|² and |g₂|²e^{2πs}
/// of the battery decay like e^{−π|s|/2}, below 1e−13 at |s| = 20.
pub fn double_mellin_config() -> TransformConfig {
    TransformConfig {
        spectral_cutoff: 20.0,
        ..TransformConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::gamma;

    #[test]
    fn gaussian_image() {
        let f = RealFunction::new("exp(-x^2)", |x: f64| Ok(c64((-x * x).exp(), 0.0)));
        let g = double_mellin_forward(
            &f,
            (f64::NEG_INFINITY, f64::INFINITY),
            double_mellin_config(),
        );
        for &s in &[0.0, 0.9, -2.5] {
            let want = gamma(c64(0.25, 0.5 * s)).unwrap() * 0.5;
            assert!((g.g1.eval(c64(s, 0.0)).unwrap() - want).norm() < 1e-12);
            let g2 = g.g2.eval(c64(s, 0.0)).unwrap();
            let want2 = want * (-I) * (-PI * s).exp();
            assert!((g2 - want2).norm() < 1e-12 * want2.norm().max(1.0));
        }
    }

    #[test]
    fn indicator_on_one_e() {
        let f = RealFunction::new("1(1,e)", |_| Ok(c64(1.0, 0.0)));
        let g = double_mellin_forward(&f, (1.0, 1f64.exp()), TransformConfig::default());
        for &s in &[0.8, -1.7] {
            let s = c64(s, 0.0);
            let want = ((I * s + 0.5).exp() - 1.0) / (I * s + 0.5);
            assert!((g.g1.eval(s).unwrap() - want).norm() < 1e-13);
            assert_eq!(g.g2.eval(s).unwrap(), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = double_mellin_forward(
            &RealFunction::zero(),
            (f64::NEG_INFINITY, f64::INFINITY),
            TransformConfig::default(),
        );
        assert_eq!(g.g1.eval(c64(0.3, 0.0)).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(g.g2.eval(c64(0.3, 0.0)).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn window_is_enforced() {
        let f = RealFunction::new("exp(-x^2)", |x: f64| Ok(c64((-x * x).exp(), 0.0)));
        let g = double_mellin_forward(
            &f,
            (f64::NEG_INFINITY, f64::INFINITY),
            TransformConfig::default(),
        );
        assert!(matches!(g.g1.eval(c64(0.0, 0.6)), Err(Error::Window(_))));
    }

    #[test]
    fn plancherel_and_inverse_for_shifted_gaussian() {
        let cfg = double_mellin_config();
        let f = RealFunction::new("exp(-(x-0.7)^2)", |x: f64| {
            Ok(c64((-(x - 0.7) * (x - 0.7)).exp(), 0.0))
        });
        let p = double_mellin_plancherel(&f, cfg).unwrap();
        assert!((p.source - (PI / 2.0).sqrt()).abs() < 1e-13);
        assert!(p.defect() < 1e-6, "{p:?}");
        let g = double_mellin_forward(&f, (f64::NEG_INFINITY, f64::INFINITY), cfg);
        for &x in &[-0.8, 0.5, 1.6] {
            let back = double_mellin_inverse(&g, x, cfg).unwrap();
            assert!((back - f.eval(x).unwrap()).norm() < 1e-6, "x = {x}: {back}");
        }
    }
}
