//! Vilenkin transform on L²(ℝ, w ds), w(s) = (1/2π)|Γ(α/2+is)|²e^{πs}:
//!
//! 𝔙g(t) = (1−e^{−2φ})^{α/2} e^{−φit} ∫ g(s) ₂F₁[α/2−is, α/2+it; α; 1−e^{−2φ}] w(s) ds,
//!
//! inverted by its adjoint.  The measure in the s-integral is selectable (see
//! [`KernelMeasure`]); only μ(s) = e^{−πs}w(s)/Γ(α) gives a unitary map.  𝔙 carries multiplication by 2s·sinhφ
//! to the operator of [`vilenkin_operator`](crate::weights_ops::vilenkin_operator).
//!
//! Also the Mellin twist J_α from functions on ℝ to holomorphic functions on
//! the upper half-plane, through which 𝔙 factors as J⁻¹∘T(r_φ)∘J.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{DecayClass, DecayRate, StripFunction};
use crate::specfun::gamma::{gamma, log_gamma};
use crate::specfun::hyper::hyp2f1;
use crate::transforms::{
    geometric_integral, integrate, memoize, spectral_integral, RealFunction, TransformConfig,
    TransformPair,
};
use crate::weights_ops::{vilenkin_operator, DifferenceOperator};
use crate::{c64, C64};

const I: C64 = C64::new(0.0, 1.0);
/// End of the unit-width spectral panels.
const KNEE: f64 = 20.0;
/// Growth factor of the geometric spectral panels.
const RATIO: f64 = 1.4;

/// Measure in the s-integral of the forward transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelMeasure {
    /// μ(s) = |Γ(α/2+is)|²/(2πΓ(α)) = e^{−πs}w(s)/Γ(α), the measure that
    /// comes out of the J⁻¹∘T(r_φ)∘J composition; this makes 𝔙 unitary.
    Mu,
    /// The space weight w(s) itself.
    W,
}

#[derive(Debug, Clone, Copy)]
pub struct Vilenkin {
    pub alpha: f64,
    pub phi: f64,
    pub measure: KernelMeasure,
    pub cfg: TransformConfig,
}

impl Vilenkin {
    pub fn new(alpha: f64, phi: f64, cfg: TransformConfig) -> Result<Self> {
        if !(alpha > 0.0 && phi > 0.0) {
            return Err(Error::Parameter(format!(
                "Vilenkin transform needs alpha > 0 and phi > 0, got {alpha}, {phi}"
            )));
        }
        Ok(Self {
            alpha,
            phi,
            measure: KernelMeasure::Mu,
            cfg,
        })
    }

    pub fn with_measure(mut self, measure: KernelMeasure) -> Self {
        self.measure = measure;
        self
    }

    /// Density of the forward kernel measure, see [`KernelMeasure`].
    pub fn kernel_measure(&self, s: f64) -> Result<f64> {
        match self.measure {
            KernelMeasure::W => self.weight(s),
            KernelMeasure::Mu => {
                let l = 2.0 * log_gamma(c64(0.5 * self.alpha, s))?.re
                    - log_gamma(c64(self.alpha, 0.0))?.re;
                Ok(l.exp() / (2.0 * PI))
            }
        }
    }

    /// kernel_measure(s)/w(s), the factor the adjoint picks up.
    fn measure_ratio(&self, s: f64) -> Result<f64> {
        match self.measure {
            KernelMeasure::W => Ok(1.0),
            KernelMeasure::Mu => Ok((-PI * s - log_gamma(c64(self.alpha, 0.0))?.re).exp()),
        }
    }

    /// (1/2π)|Γ(α/2+is)|²e^{πs}.
    pub fn weight(&self, s: f64) -> Result<f64> {
        let l = log_gamma(c64(0.5 * self.alpha, s))?.re;
        Ok((2.0 * l + PI * s).exp() / (2.0 * PI))
    }

    /// The argument 1−e^{−2φ} of the kernel.
    pub fn kernel_argument(&self) -> f64 {
        -(-2.0 * self.phi).exp_m1()
    }

    /// (1−e^{−2φ})^{α/2}e^{−φit}₂F₁[α/2−is, α/2+it; α; 1−e^{−2φ}].
    pub fn kernel(&self, s: C64, t: C64) -> Result<C64> {
        let h = 0.5 * self.alpha;
        let z = self.kernel_argument();
        let f = hyp2f1(h - I * s, h + I * t, c64(self.alpha, 0.0), c64(z, 0.0))?;
        Ok(f * z.powf(h) * (-I * t * self.phi).exp())
    }

    pub fn forward_at(&self, g: &RealFunction, t: C64) -> Result<C64> {
        integrate(
            |s| {
                let v = g.eval(s)?;
                if v == C64::new(0.0, 0.0) {
                    return Ok(v);
                }
                Ok(v * self.kernel(c64(s, 0.0), t)? * self.kernel_measure(s)?)
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
            &self.cfg.quad,
            "Vilenkin transform",
        )
    }

    /// ∫_{−10}^{L} h(t) w(t) dt (L the spectral cutoff) over unit panels up
    /// to t = 20 and geometric panels beyond.  Below t = −10 the weight is
    /// under e^{−60}.
    fn spectral(&self, h: impl Fn(f64) -> Result<C64> + Sync) -> Result<C64> {
        let hw = |t: f64| Ok(h(t)? * self.weight(t)?);
        let l = self.cfg.spectral_cutoff.max(KNEE * RATIO);
        Ok(spectral_integral(&hw, -10.0, KNEE)? + geometric_integral(&hw, KNEE, l, RATIO)?)
    }

    /// ‖f‖²_w, with the part beyond the cutoff L taken from a power law
    /// C·t^{−p} fitted to |f|²w over the last panel.  Returns the norm and
    /// the tail estimate.
    pub fn spectral_norm_with_tail(&self, f: &StripFunction) -> Result<(f64, f64)> {
        let h = |t: f64| Ok(C64::new(f.eval(c64(t, 0.0))?.norm_sqr(), 0.0));
        let core = self.spectral(h)?.re;
        let l = self.cfg.spectral_cutoff.max(KNEE * RATIO);
        let (a, b) = (
            h(l / RATIO)?.re * self.weight(l / RATIO)?,
            h(l)?.re * self.weight(l)?,
        );
        let p = (a / b).ln() / RATIO.ln();
        if !(p > 1.5) {
            return Err(Error::Tolerance(format!(
                "spectral integrand decays like t^-{p:.2} beyond t = {l}"
            )));
        }
        let tail = b * l / (p - 1.0);
        Ok((core + tail, tail))
    }
}

impl TransformPair for Vilenkin {
    fn name(&self) -> String {
        format!("vilenkin(alpha={}, phi={})", self.alpha, self.phi)
    }

    fn forward(&self, g: &RealFunction) -> StripFunction {
        let this = *self;
        let g = g.clone();
        memoize(StripFunction::new(
            move |t| this.forward_at(&g, t),
            3.0,
            DecayClass::both(DecayRate::Exponential(PI / 2.0)),
        ))
    }

    fn inverse_at(&self, f: &StripFunction, s: f64) -> Result<C64> {
        let v = self.spectral(|t| {
            Ok(f.eval(c64(t, 0.0))? * self.kernel(c64(s, 0.0), c64(t, 0.0))?.conj())
        })?;
        Ok(v * self.measure_ratio(s)?)
    }

    fn source_norm_sq(&self, g: &RealFunction) -> Result<f64> {
        let v = integrate(
            |s| Ok(C64::new(g.eval(s)?.norm_sqr() * self.weight(s)?, 0.0)),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &self.cfg.quad,
            "source norm",
        )?;
        Ok(v.re)
    }

    fn target_norm_sq(&self, f: &StripFunction) -> Result<f64> {
        Ok(self.spectral_norm_with_tail(f)?.0)
    }

    fn source_multiplication(&self, g: &RealFunction) -> RealFunction {
        let k = 2.0 * self.phi.sinh();
        g.times("2s*sinh(phi)", move |s| C64::new(k * s, 0.0))
    }

    fn target_operator(&self) -> DifferenceOperator {
        vilenkin_operator(self.alpha, self.phi).expect("parameters validated at construction")
    }

    fn source_weight(&self, x: f64) -> Result<f64> {
        self.weight(x)
    }

    fn source_grid(&self) -> Vec<f64> {
        vec![-1.5, -0.7, 0.0, 0.4, 1.0, 1.8]
    }

    fn spectral_grid(&self) -> Vec<f64> {
        vec![-0.8, 0.5, 1.7]
    }
}

/// J_α f(z) = (2^α/(2πΓ(α))) ∫ f(s) (z/i)^{−α/2−is} |Γ(α/2+is)|² ds for Im z ≥ 0,
/// with the principal logarithm of z/i.
pub fn j_alpha_forward(alpha: f64, f: &RealFunction, z: C64, cfg: &TransformConfig) -> Result<C64> {
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!(
            "J_alpha needs alpha > 0, got {alpha}"
        )));
    }
    // boundary points other than 0 are allowed; the integral still converges
    // there for f in the battery classes
    if !(z.im >= 0.0) || z == C64::new(0.0, 0.0) {
        return Err(Error::Domain(format!(
            "J_alpha is defined on the closed upper half-plane minus 0, got z = {z}"
        )));
    }
    let h = 0.5 * alpha;
    let lz = (z / I).ln();
    let pref = 2f64.powf(alpha) / (2.0 * PI * gamma(c64(alpha, 0.0))?.re);
    let v = integrate(
        |s| {
            let v = f.eval(s)?;
            if v == C64::new(0.0, 0.0) {
                return Ok(v);
            }
            let l = -(c64(h, 0.0) + I * s) * lz + 2.0 * log_gamma(c64(h, s))?.re;
            Ok(v * l.exp())
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &cfg.quad,
        "J_alpha transform",
    )?;
    Ok(v * pref)
}

/// J_α⁻¹F(s) = Γ(α)/(2^α|Γ(α/2+is)|²) ∫_0^∞ F(ip) p^{α/2+is−1} dp.
pub fn j_alpha_inverse(
    alpha: f64,
    big_f: impl Fn(C64) -> Result<C64> + Sync,
    s: f64,
    cfg: &TransformConfig,
) -> Result<C64> {
    if !(alpha > 0.0) {
        return Err(Error::Parameter(format!(
            "J_alpha needs alpha > 0, got {alpha}"
        )));
    }
    let h = 0.5 * alpha;
    let v = integrate(
        |u| {
            let p = u.exp();
            if p == 0.0 || !p.is_finite() {
                return Ok(C64::new(0.0, 0.0));
            }
            Ok(big_f(c64(0.0, p))? * ((c64(h, 0.0) + I * s) * u).exp())
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        &cfg.quad,
        "inverse J_alpha transform",
    )?;
    let l = log_gamma(c64(alpha, 0.0))?.re - alpha * 2f64.ln() - 2.0 * log_gamma(c64(h, s))?.re;
    Ok(v * l.exp())
}

/// Inner product of the weighted Bergman/Hardy space 𝓗_α on the upper
/// half-plane in which J_α is isometric up to the factor 2^{α/2}:
/// (1/4π)∫_ℝ F(x)conj G(x) dx for α = 1 (boundary values) and
/// ((α−1)/4π)∫∫_{y>0} F conj G y^{α−2} dx dy for α > 1.
pub fn h_alpha_inner_product(
    alpha: f64,
    big_f: impl Fn(C64) -> Result<C64> + Sync,
    big_g: impl Fn(C64) -> Result<C64> + Sync,
    cfg: &TransformConfig,
) -> Result<C64> {
    if !(alpha >= 1.0) {
        return Err(Error::Parameter(format!(
            "H_alpha inner product needs alpha >= 1, got {alpha}"
        )));
    }
    let line = |y: f64| {
        integrate(
            |x| Ok(big_f(c64(x, y))? * big_g(c64(x, y))?.conj()),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &cfg.quad,
            "H_alpha inner product",
        )
    };
    if alpha == 1.0 {
        return Ok(line(0.0)? / (4.0 * PI));
    }
    let v = integrate(
        |y| Ok(line(y)? * y.powf(alpha - 2.0)),
        0.0,
        f64::INFINITY,
        &cfg.quad,
        "H_alpha inner product",
    )?;
    Ok(v * (alpha - 1.0) / (4.0 * PI))
}

/// 𝔙g(t) computed as e^{−πt/2}·(J⁻¹∘T(r_φ)∘J)(e^{πs/2}g)(t), where
/// T(r_φ)F(z) = F((b+zd)/(a+zc))(a+zc)^{−α} with
/// a = b = 1/√(2 sinhφ), c = e^{−φ}/√(2 sinhφ), d = e^{φ}/√(2 sinhφ).
pub fn jtj_route(v: &Vilenkin, g: &RealFunction, t: f64) -> Result<C64> {
    let alpha = v.alpha;
    let n = (2.0 * v.phi.sinh()).sqrt();
    let (a, b, c, d) = (1.0 / n, 1.0 / n, (-v.phi).exp() / n, v.phi.exp() / n);
    let g2 = g.clone();
    let h = RealFunction::new("e^{pi s/2}g", move |s| {
        let v = g2.eval(s)?;
        Ok(if v == C64::new(0.0, 0.0) {
            v
        } else {
            v * (0.5 * PI * s).exp()
        })
    });
    let cfg = v.cfg;
    let moved = |z: C64| -> Result<C64> {
        let (w, lden) = if z.norm() > 1.0 {
            let q = z.inv();
            ((q * b + d) / (q * a + c), z.ln() + (q * a + c).ln())
        } else {
            ((z * d + b) / (z * c + a), (z * c + a).ln())
        };
        Ok(j_alpha_forward(alpha, &h, w, &cfg)? * (-alpha * lden).exp())
    };
    Ok(j_alpha_inverse(alpha, moved, t, &cfg)? * (-0.5 * PI * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(Vilenkin::new(0.0, 0.8, TransformConfig::default()).is_err());
        assert!(Vilenkin::new(1.0, -0.1, TransformConfig::default()).is_err());
    }

    #[test]
    fn matches_independent_quadrature_and_composition() {
        let v = Vilenkin::new(1.0, 0.8, TransformConfig::vilenkin()).unwrap();
        let g = &crate::transforms::vilenkin_battery()[0];
        // mpmath quad of g(s) K(s, 0.5) mu(s)
        let want = c64(0.482_813_424_466_779_66, 0.030_435_627_127_974_846);
        let direct = v.forward_at(g, c64(0.5, 0.0)).unwrap();
        assert!((direct - want).norm() < 1e-12, "{direct}");
        let route = jtj_route(&v, g, 0.5).unwrap();
        assert!((route - want).norm() < 1e-10, "{route}");
    }

    #[test]
    fn j_alpha_reproducing_identities() {
        let cfg = TransformConfig::default();
        let phi_a =
            |a: f64| RealFunction::new("Phi_a", move |s: f64| Ok((c64(-0.5, s) * a.ln()).exp()));
        // J Φ_1 at z = 2i against ((z + i)/2i)^{-1}
        let got = j_alpha_forward(1.0, &phi_a(1.0), c64(0.0, 2.0), &cfg).unwrap();
        assert!((got - c64(2.0 / 3.0, 0.0)).norm() < 1e-10, "{got}");
        let psi = |z: C64| Ok(((z + I) / (2.0 * I)).powf(-1.0));
        let back = j_alpha_inverse(1.0, psi, 0.3, &cfg).unwrap();
        let want = (c64(-0.5, 0.3) * 1f64.ln()).exp();
        assert!((back - want).norm() < 1e-9, "{back}");
    }

    #[test]
    fn h_alpha_reproducing_kernels() {
        let cfg = TransformConfig::default();
        let psi = |alpha: f64, a: f64| move |z: C64| Ok(((z + I * a) / (2.0 * I)).powf(-alpha));
        let v = h_alpha_inner_product(1.0, psi(1.0, 1.0), psi(1.0, 2.0), &cfg).unwrap();
        assert!((v - c64(2.0 / 3.0, 0.0)).norm() < 1e-10, "{v}");
        let v = h_alpha_inner_product(2.0, psi(2.0, 1.0), psi(2.0, 3.0), &cfg).unwrap();
        assert!((v - c64(0.25, 0.0)).norm() < 1e-8, "{v}");
        assert!(h_alpha_inner_product(0.5, psi(0.5, 1.0), psi(0.5, 1.0), &cfg).is_err());
    }

    #[test]
    fn zero_maps_to_zero() {
        let v = Vilenkin::new(1.0, 0.8, TransformConfig::default()).unwrap();
        let f = v.forward(&RealFunction::zero());
        assert_eq!(f.eval(c64(0.5, 0.0)).unwrap(), C64::new(0.0, 0.0));
    }
}
