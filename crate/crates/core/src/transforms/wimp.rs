//! Wimp transform 𝔚_ρ g(s) = ∫_0^∞ g(x) W_{ρ,is}(x) dx/x² with inverse
//! (1/2π)∫_0^∞ f(s) W_{ρ,is}(x) |Γ(1/2−ρ+is)/Γ(2is)|² ds, unitary from
//! L²(ℝ₊, dx/x²) onto L²(ℝ₊, (1/2π)|Γ(1/2−ρ+is)/Γ(2is)|² ds) for ρ < 1/2.
//! It carries multiplication by 1/x to the operator of
//! [`wimp_operator`](crate::weights_ops::wimp_operator).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{DecayClass, DecayRate, StripFunction, Symmetry};
use crate::specfun::gamma::log_gamma;
use crate::specfun::whittaker_w;
use crate::transforms::{
    integrate, kernel_scaled, memoize, wide_spectral_integral, RealFunction, TransformConfig,
    TransformPair, INDEX_PANEL,
};
use crate::weights_ops::{wimp_operator, DifferenceOperator};
use crate::{c64, C64};

#[derive(Debug, Clone, Copy)]
pub struct Wimp {
    pub rho: f64,
    pub cfg: TransformConfig,
}

impl Wimp {
    pub fn new(rho: f64, cfg: TransformConfig) -> Result<Self> {
        if !(rho < 0.5) {
            return Err(Error::Parameter(format!(
                "Wimp transform needs rho < 1/2, got {rho}"
            )));
        }
        Ok(Self { rho, cfg })
    }

    /// |Γ(1/2−ρ+is)/Γ(2is)|²/2π.
    pub fn spectral_density(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let l = log_gamma(c64(0.5 - self.rho, s))?.re - log_gamma(c64(0.0, 2.0 * s))?.re;
        Ok((2.0 * l).exp() / (2.0 * PI))
    }

    pub fn forward_at(&self, g: &RealFunction, s: C64) -> Result<C64> {
        let sigma = c64(0.0, 1.0) * s;
        let rho = self.rho;
        integrate(
            |u| {
                let x = u.exp();
                if x == 0.0 || !x.is_finite() {
                    return Ok(C64::new(0.0, 0.0));
                }
                let v = g.eval(x)?;
                if v == C64::new(0.0, 0.0) {
                    return Ok(v);
                }
                Ok(whittaker_w(rho, sigma, x)? * v / x)
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
            &kernel_scaled(&self.cfg.quad, s),
            "Wimp transform",
        )
    }
}

impl TransformPair for Wimp {
    fn name(&self) -> String {
        format!("wimp(rho={})", self.rho)
    }

    fn forward(&self, g: &RealFunction) -> StripFunction {
        let this = *self;
        let g = g.clone();
        memoize(
            StripFunction::new(
                move |s| this.forward_at(&g, s),
                3.0,
                DecayClass::both(DecayRate::Exponential(PI / 2.0)),
            )
            .with_symmetry(Symmetry::Even),
        )
    }

    fn inverse_at(&self, f: &StripFunction, x: f64) -> Result<C64> {
        let rho = self.rho;
        wide_spectral_integral(
            |s| {
                if s == 0.0 {
                    return Ok(C64::new(0.0, 0.0));
                }
                Ok(f.eval(c64(s, 0.0))?
                    * whittaker_w(rho, c64(0.0, s), x)?
                    * self.spectral_density(s)?)
            },
            0.0,
            self.cfg.spectral_cutoff,
            INDEX_PANEL,
        )
    }

    fn source_norm_sq(&self, g: &RealFunction) -> Result<f64> {
        let v = integrate(
            |u| {
                let x = u.exp();
                if x == 0.0 || !x.is_finite() {
                    return Ok(C64::new(0.0, 0.0));
                }
                Ok(C64::new(g.eval(x)?.norm_sqr() / x, 0.0))
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
            &self.cfg.quad,
            "source norm",
        )?;
        Ok(v.re)
    }

    fn target_norm_sq(&self, f: &StripFunction) -> Result<f64> {
        let v = wide_spectral_integral(
            |s| {
                Ok(C64::new(
                    f.eval(c64(s, 0.0))?.norm_sqr() * self.spectral_density(s)?,
                    0.0,
                ))
            },
            0.0,
            self.cfg.spectral_cutoff,
            INDEX_PANEL,
        )?;
        Ok(v.re)
    }

    fn source_multiplication(&self, g: &RealFunction) -> RealFunction {
        g.times("1/x", |x| C64::new(1.0 / x, 0.0))
    }

    fn target_operator(&self) -> DifferenceOperator {
        wimp_operator(self.rho).expect("rho validated at construction")
    }

    fn source_weight(&self, x: f64) -> Result<f64> {
        Ok(1.0 / (x * x))
    }

    fn source_grid(&self) -> Vec<f64> {
        vec![0.3, 0.7, 1.0, 1.5, 2.5, 4.0]
    }

    fn spectral_grid(&self) -> Vec<f64> {
        vec![0.5, 1.5, 3.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::half_line_battery;

    #[test]
    fn matches_independent_quadrature() {
        let w = Wimp::new(0.2, TransformConfig::default()).unwrap();
        // mpmath quad of W_{0.2,i}(x) e^{-x-1/x} dx/x^2
        let v = w
            .forward_at(&half_line_battery()[0], c64(1.0, 0.0))
            .unwrap();
        assert!((v - c64(0.056_914_399_294_087_905, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn rejects_rho_at_half() {
        assert!(matches!(
            Wimp::new(0.5, TransformConfig::default()),
            Err(Error::Parameter(_))
        ));
        let w = Wimp::new(0.0, TransformConfig::default()).unwrap();
        assert_eq!(
            w.forward(&RealFunction::zero())
                .eval(c64(0.7, 0.0))
                .unwrap(),
            C64::new(0.0, 0.0)
        );
    }
}
