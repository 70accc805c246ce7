//! Kontorovich–Lebedev transform 𝔎g(s) = ∫_0^∞ K_{is}(x) g(x) dx/x with
//! inverse (2/π)∫_0^∞ f(s) K_{is}(x) ds/|Γ(is)|², where
//! 1/|Γ(is)|² = s·sinh(πs)/π.  Unitary from L²(ℝ₊, dx/x) onto
//! L²(ℝ₊, (2/π)|Γ(is)|^{−2} ds).

use std::f64::consts::PI;

use crate::error::Result;
use crate::quadrature::{DecayClass, DecayRate, StripFunction, Symmetry};
use crate::specfun::macdonald_k;
use crate::transforms::{
    integrate, kernel_scaled, memoize, wide_spectral_integral, RealFunction, TransformConfig,
    TransformPair, INDEX_PANEL,
};
use crate::weights_ops::{kl_operator, DifferenceOperator};
use crate::{c64, C64};

#[derive(Debug, Clone, Copy, Default)]
pub struct KontorovichLebedev {
    pub cfg: TransformConfig,
}

/// s·sinh(πs)/π².
fn spectral_density(s: f64) -> f64 {
    s * (PI * s).sinh() / (PI * PI)
}

impl KontorovichLebedev {
    pub fn new(cfg: TransformConfig) -> Self {
        Self { cfg }
    }

    /// 𝔎g(s) at a single point.
    pub fn forward_at(&self, g: &RealFunction, s: C64) -> Result<C64> {
        let nu = c64(0.0, 1.0) * s;
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
                Ok(macdonald_k(nu, x)? * v)
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
            &kernel_scaled(&self.cfg.quad, s),
            "Kontorovich-Lebedev transform",
        )
    }

    /// 𝔎(Qg)(s) for Qg = g′ − g/x, with the two candidate images
    /// (𝔎g(s+i) ± 𝔎g(s−i))/2 for comparison.
    pub fn derivative_image(
        &self,
        g: &RealFunction,
        dg: &RealFunction,
        s: f64,
    ) -> Result<(C64, C64, C64)> {
        let g2 = g.clone();
        let dg2 = dg.clone();
        let q = RealFunction::new("Qg", move |x| Ok(dg2.eval(x)? - g2.eval(x)? / x));
        let lhs = self.forward_at(&q, c64(s, 0.0))?;
        let up = self.forward_at(g, c64(s, 1.0))?;
        let down = self.forward_at(g, c64(s, -1.0))?;
        Ok((lhs, (up + down) * 0.5, (up - down) * 0.5))
    }
}

impl TransformPair for KontorovichLebedev {
    fn name(&self) -> String {
        "kl".into()
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
        let v = wide_spectral_integral(
            |s| Ok(f.eval(c64(s, 0.0))? * macdonald_k(c64(0.0, s), x)? * spectral_density(s)),
            0.0,
            self.cfg.spectral_cutoff,
            INDEX_PANEL,
        )?;
        Ok(v * 2.0)
    }

    fn source_norm_sq(&self, g: &RealFunction) -> Result<f64> {
        let v = integrate(
            |u| {
                let x = u.exp();
                if x == 0.0 || !x.is_finite() {
                    return Ok(C64::new(0.0, 0.0));
                }
                Ok(C64::new(g.eval(x)?.norm_sqr(), 0.0))
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
                    f.eval(c64(s, 0.0))?.norm_sqr() * spectral_density(s),
                    0.0,
                ))
            },
            0.0,
            self.cfg.spectral_cutoff,
            INDEX_PANEL,
        )?;
        Ok(2.0 * v.re)
    }

    fn source_multiplication(&self, g: &RealFunction) -> RealFunction {
        g.times("2/x", |x| C64::new(2.0 / x, 0.0))
    }

    fn target_operator(&self) -> DifferenceOperator {
        kl_operator()
    }

    fn source_weight(&self, x: f64) -> Result<f64> {
        Ok(1.0 / x)
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
        let kl = KontorovichLebedev::default();
        let g = &half_line_battery()[0];
        // mpmath quad of K_{is}(x) e^{-x-1/x} dx/x
        let v = kl.forward_at(g, c64(0.5, 0.0)).unwrap();
        assert!((v - c64(0.099_532_589_771_659_332, 0.0)).norm() < 1e-13);
        let v = kl.forward_at(g, c64(0.4, 0.7)).unwrap();
        assert!((v - c64(0.131_107_282_975_095_78, -0.041_583_415_499_595_698)).norm() < 1e-12);
    }

    #[test]
    fn even_and_zero() {
        let kl = KontorovichLebedev::default();
        let f = kl.forward(&half_line_battery()[0]);
        let (a, b) = (
            f.eval(c64(1.3, 0.0)).unwrap(),
            f.eval(c64(-1.3, 0.0)).unwrap(),
        );
        assert!((a - b).norm() < 1e-15);
        assert_eq!(
            kl.forward(&RealFunction::zero())
                .eval(c64(0.5, 0.0))
                .unwrap(),
            C64::new(0.0, 0.0)
        );
    }

    #[test]
    fn derivative_image_takes_the_plus_sign() {
        let kl = KontorovichLebedev::default();
        let g = RealFunction::new("g", |x: f64| Ok(c64((-x - 1.0 / x).exp(), 0.0)));
        let dg = RealFunction::new("g'", |x: f64| {
            Ok(c64(
                (-x - 1.0 / x).exp() * -1.0 + (-x - 1.0 / x - 2.0 * x.ln()).exp(),
                0.0,
            ))
        });
        for &s in &[0.5, 1.5] {
            let (lhs, plus, minus) = kl.derivative_image(&g, &dg, s).unwrap();
            assert!(
                (lhs - plus).norm() < 1e-10 * plus.norm(),
                "s = {s}: {lhs} vs {plus}"
            );
            assert!((lhs - minus).norm() > 1e-3);
        }
    }
}
