//! The Δ-family on the real line and its images.
//!
//! For τ ∈ ℝ, σ and φ ∈ (0, π),
//!
//! Δ_σ(x) = (1+xe^{iφ})^{−1/2−iτ−σ}(1+xe^{−iφ})^{−1/2−iτ+σ},  Δ_σ(0) = 1,
//!
//! and {Δ_{σ+n}}_{n∈ℤ} is orthogonal in L²(ℝ).  The substitution
//! e^{iθ} = (1+e^{iφ}x)/(1+e^{−iφ}x) turns it into the Fourier basis, the
//! first-order operator D has Δ_σ as eigenfunctions, and the double Mellin
//! transform carries both to the functions Ψ^{(n)} on the line, eigenfunctions
//! of [`sec6_operator`].
//!
//! The functions are tracked on two normalisations, see [`PsiForm`].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{richardson_derivative, QuadratureConfig};
use crate::specfun::gamma::beta;
use crate::specfun::hyper::{hyp2f1_continued, ContinuationPath};
use crate::transforms::{integrate, spectral_nodes};
use crate::weights_ops::{sec6_operator, DifferenceOperator};
use crate::{c64, C64};

const I: C64 = C64::new(0.0, 1.0);

/// τ, σ and φ of the Δ-family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    pub tau: f64,
    pub sigma: f64,
    pub phi: f64,
}

impl ExtensionParams {
    pub fn new(tau: f64, sigma: f64, phi: f64) -> Result<Self> {
        if !(tau.is_finite() && sigma.is_finite() && phi > 0.0 && phi < PI) {
            return Err(Error::Parameter(format!("needs finite tau, sigma and 0 < phi < pi, got ({tau}, {sigma}, {phi})")));
        }
        Ok(Self { tau, sigma, phi })
    }

    /// 2 sinφ(σ+n), the eigenvalue attached to index n.
    pub fn eigenvalue(&self, n: i32) -> f64 {
        2.0 * self.phi.sin() * (self.sigma + n as f64)
    }

    /// (exponent of 1+xe^{iφ}, exponent of 1+xe^{−iφ}) for Δ_{σ+shift}.
    fn exponents(&self, shift: f64) -> (C64, C64) {
        let s = self.sigma + shift;
        (c64(-0.5 - s, -self.tau), c64(-0.5 + s, -self.tau))
    }

    pub fn operator(&self) -> DifferenceOperator {
        sec6_operator(self.tau, self.phi).expect("parameters validated at construction")
    }
}

/// Δ_{σ+shift}(x) for real x.  Both factors have positive real part at x = 0
/// and cross the real axis only there, so principal logarithms give the
/// branch with Δ(0) = 1.
pub fn delta_eval(p: &ExtensionParams, shift: f64, x: f64) -> C64 {
    let (ep, em) = p.exponents(shift);
    let lp = (C64::from_polar(x, p.phi) + 1.0).ln();
    (ep * lp + em * lp.conj()).exp()
}

/// Δ′/Δ at x.
pub fn delta_log_derivative(p: &ExtensionParams, shift: f64, x: f64) -> C64 {
    let (ep, em) = p.exponents(shift);
    let e = C64::from_polar(1.0, p.phi);
    ep * e / (e * x + 1.0) + em * e.conj() / (e.conj() * x + 1.0)
}

/// θ(x) = 2 arg(1+e^{iφ}x), so that e^{iθ} = (1+e^{iφ}x)/(1+e^{−iφ}x).
///
/// θ(0) = 0 and θ increases from 2φ−2π at x = −∞ to 2φ at x = +∞.
pub fn theta_substitution(phi: f64, x: f64) -> f64 {
    2.0 * (x * phi.sin()).atan2(1.0 + x * phi.cos())
}

/// θ′(x) = 2 sinφ / |1+e^{iφ}x|².
pub fn theta_derivative(phi: f64, x: f64) -> f64 {
    2.0 * phi.sin() / (x * x + 2.0 * x * phi.cos() + 1.0)
}

/// The unitary map S f(x) = f(θ(x)) θ′(x)^{1/2+iτ} from L² of the θ-interval
/// onto L²(ℝ).
pub fn s_map(p: &ExtensionParams, f: impl Fn(f64) -> C64, x: f64) -> C64 {
    let d = theta_derivative(p.phi, x);
    f(theta_substitution(p.phi, x)) * (c64(0.5, p.tau) * d.ln()).exp()
}

/// D f = i(x²+2cosφ·x+1) f′ + i(1+2iτ)(x+cosφ) f from a value and derivative.
pub fn d_operator_with_derivative(p: &ExtensionParams, f: C64, df: C64, x: f64) -> C64 {
    let c = p.phi.cos();
    I * (x * x + 2.0 * c * x + 1.0) * df + I * c64(1.0, 2.0 * p.tau) * (x + c) * f
}

/// D f(x) with f′ by extrapolated central differences.
pub fn d_operator_apply(p: &ExtensionParams, f: &dyn Fn(f64) -> C64, x: f64) -> Result<C64> {
    let df = richardson_derivative(f, x, 0.05 * (1.0 + x.abs()))?;
    Ok(d_operator_with_derivative(p, f(x), df, x))
}

/// D Δ_{σ+shift}(x), differentiating Δ in closed form.
pub fn d_delta(p: &ExtensionParams, shift: f64, x: f64) -> C64 {
    let v = delta_eval(p, shift, x);
    d_operator_with_derivative(p, v, v * delta_log_derivative(p, shift, x), x)
}

/// |DΔ − 2sinφ(σ+shift)Δ| / |Δ| at x; `analytic = false` differentiates
/// numerically.
pub fn d_eigen_residual(p: &ExtensionParams, shift: f64, x: f64, analytic: bool) -> Result<f64> {
    let v = delta_eval(p, shift, x);
    let dv = if analytic { d_delta(p, shift, x) } else { d_operator_apply(p, &|y| delta_eval(p, shift, y), x)? };
    let lambda = 2.0 * p.phi.sin() * (p.sigma + shift);
    Ok((dv - v * lambda).norm() / v.norm())
}

/// Hermitian matrix of pairwise inner products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gram {
    pub labels: Vec<i32>,
    pub entries: Vec<Vec<C64>>,
}

impl Gram {
    pub fn max_diagonal(&self) -> f64 {
        (0..self.entries.len()).map(|i| self.entries[i][i].norm()).fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.entries.len();
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| self.entries[i][j].norm()).fold(0.0, f64::max)
    }

    /// Largest off-diagonal modulus over the largest diagonal one.
    pub fn orthogonality_defect(&self) -> f64 {
        self.max_off_diagonal() / self.max_diagonal().max(f64::MIN_POSITIVE)
    }
}

/// Gram matrix of {Δ_{σ+n}} in L²(ℝ, dx/2π); the diagonal is 1/(2 sinφ).
pub fn delta_gram(p: &ExtensionParams, shifts: &[i32], cfg: &QuadratureConfig) -> Result<Gram> {
    let n = shifts.len();
    let mut entries = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in i..n {
            let (a, b) = (shifts[i] as f64, shifts[j] as f64);
            let v = integrate(
                |x| Ok(delta_eval(p, a, x) * delta_eval(p, b, x).conj()),
                f64::NEG_INFINITY,
                f64::INFINITY,
                cfg,
                "Delta inner product",
            )? / (2.0 * PI);
            entries[i][j] = v;
            entries[j][i] = v.conj();
        }
    }
    Ok(Gram { labels: shifts.to_vec(), entries })
}

/// Which normalisation of the pair (Ψ₁, Ψ₂) to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiForm {
    /// B(1/2+is, 1/2+2iτ−is) times the continued ₂F₁ on each path, as is.
    Hypergeometric,
    /// The double Mellin image (g₁, g₂) of Δ_{σ+n}, which is
    /// (e^{−iφ(1/2+is)}Ψ₁, e^{−iφ(1/2+is)}e^{−2πs}Ψ₂) in terms of the above.
    DeltaImage,
}

/// ₂F₁(a, b; c; 1−e^{−2iφ}) continued along z = 1−e^{−2iθ}, θ ∈ [0, φ], and
/// along z = 1−e^{2iθ}, θ ∈ [0, π−φ].  The two paths pass z = 1 on opposite
/// sides, so the values lie on different branches.
///
/// For small φ the second path ends near z = 0 again, where that branch is
/// singular; its clearance shrinks with the endpoint distance 2 sinφ.
pub fn continued_pair(a: C64, b: C64, c: C64, phi: f64) -> Result<(C64, C64)> {
    let p1 = ContinuationPath::unit_arc(phi, 1.0)?;
    let theta = PI - phi;
    let steps = ((theta / 0.02).ceil() as usize).max(4);
    let clearance = 0.5f64.min(1.8 * phi.sin());
    let p2 = ContinuationPath::from_curve(|t| C64::new(1.0, 0.0) - C64::from_polar(1.0, 2.0 * t), 0.0, theta, steps, clearance)?;
    Ok((hyp2f1_continued(a, b, c, &p1)?, hyp2f1_continued(a, b, c, &p2)?))
}

/// (Ψ₁^{(n)}(s), Ψ₂^{(n)}(s)) in the [`PsiForm::Hypergeometric`] form.
pub fn psi_eval(p: &ExtensionParams, n: i32, s: C64) -> Result<(C64, C64)> {
    let a = I * s + 0.5;
    let pre = beta(a, c64(0.5, 2.0 * p.tau) - I * s)?;
    let (f1, f2) = continued_pair(a, c64(0.5 - p.sigma - n as f64, p.tau), c64(1.0, 2.0 * p.tau), p.phi)?;
    Ok((pre * f1, pre * f2))
}

/// (Ψ₁^{(n)}(s), Ψ₂^{(n)}(s)) in the requested form.
pub fn psi_form_eval(p: &ExtensionParams, n: i32, s: C64, form: PsiForm) -> Result<(C64, C64)> {
    let (a, b) = psi_eval(p, n, s)?;
    Ok(match form {
        PsiForm::Hypergeometric => (a, b),
        PsiForm::DeltaImage => {
            let (m1, m2) = image_factors(p.phi, s);
            (a * m1, b * m2)
        }
    })
}

fn image_factors(phi: f64, s: C64) -> (C64, C64) {
    let m = (-I * phi * (I * s + 0.5)).exp();
    (m, m * (-2.0 * PI * s).exp())
}

/// Spectral cutoff for Ψ Grams: the image decays like e^{−min(φ,π−φ)|s|}.
pub fn psi_cutoff(phi: f64) -> f64 {
    (20.0 / phi.min(PI - phi)).min(60.0)
}

/// Gram matrices of {Ψ^{(n)}} in both forms, in L²(ℝ, ds/2π) ⊕ L²(ℝ, e^{2πs}ds/2π)
/// over |s| ≤ `cutoff`.  In the image form the diagonal is π/sinφ.
pub fn psi_grams(p: &ExtensionParams, ns: &[i32], cutoff: f64) -> Result<(Gram, Gram)> {
    let nodes = spectral_nodes(-cutoff, cutoff);
    let values: Vec<Vec<(C64, C64)>> = nodes
        .par_iter()
        .map(|&(s, _)| ns.iter().map(|&n| psi_eval(p, n, c64(s, 0.0))).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let k = ns.len();
    let mut raw = vec![vec![C64::new(0.0, 0.0); k]; k];
    let mut img = raw.clone();
    for (&(s, w), row) in nodes.iter().zip(&values) {
        let e = (2.0 * PI * s).exp();
        let (m1, m2) = image_factors(p.phi, c64(s, 0.0));
        let (m1, m2) = (m1.norm_sqr(), m2.norm_sqr());
        for i in 0..k {
            for j in 0..k {
                let a = row[i].0 * row[j].0.conj();
                let b = row[i].1 * row[j].1.conj() * e;
                raw[i][j] += (a + b) * w;
                img[i][j] += (a * m1 + b * m2) * w;
            }
        }
    }
    let scale = |m: Vec<Vec<C64>>| Gram { labels: ns.to_vec(), entries: m.into_iter().map(|r| r.into_iter().map(|v| v / (2.0 * PI)).collect()).collect() };
    Ok((scale(raw), scale(img)))
}

/// max over samples and both components of |𝓛Ψ_k^{(n)}(s) − 2sinφ(σ+n)Ψ_k^{(n)}(s)|.
pub fn sec6_eigen_defect(p: &ExtensionParams, n: i32, samples: &[C64], form: PsiForm) -> Result<f64> {
    let op = p.operator();
    let lambda = p.eigenvalue(n);
    let mut worst = 0.0f64;
    for &s in samples {
        for k in 0..2 {
            let comp = |t: C64| psi_form_eval(p, n, t, form).map(|v| if k == 0 { v.0 } else { v.1 });
            let lhs = op.apply_fn(comp, s)?;
            worst = worst.max((lhs - comp(s)? * lambda).norm());
        }
    }
    Ok(worst)
}

/// Residues of both components at one pole of the Beta prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub pole: C64,
    pub res1: C64,
    pub res2: C64,
    /// res1 / res2.
    pub ratio: C64,
    /// The ratio the domain conditions ask for: 1 at s = i/2 and
    /// −e^{2π(τ+iσ)} at s = −i/2+2τ.
    pub expected: C64,
}

/// Residues at s = i/2 and s = −i/2+2τ by the trapezoidal rule on a circle
/// of radius 10⁻², which is exponentially accurate since the next
/// singularities are a unit away.
pub fn residue_diagnostic(p: &ExtensionParams, n: i32, form: PsiForm) -> Result<[ResidueReport; 2]> {
    let poles = [(c64(0.0, 0.5), c64(1.0, 0.0)), (c64(2.0 * p.tau, -0.5), -(c64(2.0 * PI * p.tau, 2.0 * PI * p.sigma)).exp())];
    let mut out = Vec::with_capacity(2);
    for (pole, expected) in poles {
        let (r, m) = (1e-2, 32);
        let (mut r1, mut r2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for j in 0..m {
            let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            let (a, b) = psi_form_eval(p, n, pole + e * r, form)?;
            r1 += a * e * r / m as f64;
            r2 += b * e * r / m as f64;
        }
        out.push(ResidueReport { pole, res1: r1, res2: r2, ratio: r1 / r2, expected });
    }
    Ok([out[0], out[1]])
}
