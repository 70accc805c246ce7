//! Gamma-quotient weights and the difference operators that are symmetric
//! against them.
//!
//! A [`WeightSpec`] describes
//! μ(s) = e^{cs} ∏ Γ(a_k + m_k·is) / ∏ Γ(b_l + n_l·is),  ν(s) = conj μ(conj s),
//! with scales m, n ∈ {1, 2} (the factor Γ(2is) of the even systems has
//! scale 2).  The weight on ℝ is w = μν/2π, and the coefficients
//! A(s) = ν(s+i)/ν(s) = e^{ic} ∏(ā_k − m_k·is)_{m_k} / ∏(b̄_l − n_l·is)_{n_l},
//! B(s) = μ(s−i)/μ(s) = e^{−ic} ∏(a_k + m_k·is)_{m_k} / ∏(b_l + n_l·is)_{n_l}
//! define 𝓛f = A·f(s+i) − (A+B)·f + B·f(s−i).

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{inner_product, Estimate, QuadratureConfig, StripFunction, Support, Weight};
use crate::specfun::gamma::{log_gamma, nonpositive_integer, pochhammer};
use crate::C64;

/// Coefficients closer than this to a pole raise `Pole`.
pub const COEFF_POLE_TOL: f64 = 1e-8;

/// One factor Γ(shift + scale·is).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub shift: C64,
    pub scale: u32,
}

impl GammaFactor {
    pub fn new(shift: C64) -> Self {
        Self { shift, scale: 1 }
    }

    pub fn doubled(shift: C64) -> Self {
        Self { shift, scale: 2 }
    }

    fn arg(&self, s: C64) -> C64 {
        self.shift + C64::new(0.0, self.scale as f64) * s
    }

    fn conj_arg(&self, s: C64) -> C64 {
        self.shift.conj() - C64::new(0.0, self.scale as f64) * s
    }
}

/// Parameters (c, {a_k}, {b_l}) of a gamma-quotient weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub c: f64,
    pub num: Vec<GammaFactor>,
    pub den: Vec<GammaFactor>,
}

fn sum_log_gamma(factors: &[GammaFactor], arg: impl Fn(&GammaFactor) -> C64) -> Result<Option<C64>> {
    let mut acc = C64::new(0.0, 0.0);
    for f in factors {
        let z = arg(f);
        if nonpositive_integer(z).is_some() {
            return Ok(None);
        }
        acc += log_gamma(z)?;
    }
    Ok(Some(acc))
}

fn ratio_product(factors: &[GammaFactor], arg: impl Fn(&GammaFactor) -> C64) -> C64 {
    factors.iter().fold(C64::new(1.0, 0.0), |acc, f| acc * pochhammer(arg(f), f.scale as usize))
}

impl WeightSpec {
    /// Spec with unit-scale factors Γ(a_k + is), Γ(b_l + is).
    pub fn new(c: f64, a: &[C64], b: &[C64]) -> Self {
        Self {
            c,
            num: a.iter().map(|&x| GammaFactor::new(x)).collect(),
            den: b.iter().map(|&x| GammaFactor::new(x)).collect(),
        }
    }

    /// Appends a denominator factor Γ(2is).
    pub fn over_gamma_2is(mut self) -> Self {
        self.den.push(GammaFactor::doubled(C64::new(0.0, 0.0)));
        self
    }

    /// Total scale of the numerator, the m of the decay condition.
    pub fn numerator_order(&self) -> u32 {
        self.num.iter().map(|f| f.scale).sum()
    }

    /// True when every numerator shift has positive real part.
    pub fn has_positive_shifts(&self) -> bool {
        self.num.iter().all(|f| f.shift.re > 0.0)
    }

    fn mu_with(&self, s: C64, conj: bool) -> Result<C64> {
        let arg = |f: &GammaFactor| if conj { f.conj_arg(s) } else { f.arg(s) };
        let num = sum_log_gamma(&self.num, arg)?
            .ok_or_else(|| Error::Pole(format!("numerator gamma pole at s = {s}")))?;
        match sum_log_gamma(&self.den, arg)? {
            None => Ok(C64::new(0.0, 0.0)),
            Some(den) => Ok((s * self.c + num - den).exp()),
        }
    }

    /// μ(s).
    pub fn mu(&self, s: C64) -> Result<C64> {
        self.mu_with(s, false)
    }

    /// ν(s) = conj μ(conj s).
    pub fn nu(&self, s: C64) -> Result<C64> {
        self.mu_with(s, true)
    }

    /// w(s) = μ(s)ν(s)/2π for real s, computed in log form.
    pub fn weight(&self, s: f64) -> Result<f64> {
        let z = C64::new(s, 0.0);
        let num = sum_log_gamma(&self.num, |f| f.arg(z))?
            .ok_or_else(|| Error::Pole(format!("numerator gamma pole at s = {s}")))?;
        match sum_log_gamma(&self.den, |f| f.arg(z))? {
            None => Ok(0.0),
            Some(den) => Ok((2.0 * self.c * s + 2.0 * (num.re - den.re)).exp() / (2.0 * PI)),
        }
    }

    /// The weight as a quadrature [`Weight`] on the whole line.
    pub fn as_weight(&self) -> Weight {
        let spec = self.clone();
        Weight::new(move |s| spec.weight(s), Support::Line)
    }

    /// The weight restricted to even functions: 2∫_{offset}^∞.
    pub fn as_even_weight(&self, offset: f64) -> Weight {
        let spec = self.clone();
        Weight::new(move |s| spec.weight(s), Support::EvenLine { offset })
    }

    fn denominators_clear(&self, s: C64, conj: bool) -> Result<()> {
        for f in &self.den {
            let base = if conj { f.conj_arg(s) } else { f.arg(s) };
            for j in 0..f.scale {
                let d = base + j as f64;
                if d.norm() < COEFF_POLE_TOL {
                    return Err(Error::Pole(format!("coefficient pole at s = {s}")));
                }
            }
        }
        Ok(())
    }

    /// A(s) in product form.
    pub fn coeff_a(&self, s: C64) -> Result<C64> {
        self.denominators_clear(s, true)?;
        let num = ratio_product(&self.num, |f| f.conj_arg(s));
        let den = ratio_product(&self.den, |f| f.conj_arg(s));
        Ok(C64::new(0.0, self.c).exp() * num / den)
    }

    /// B(s) in product form.
    pub fn coeff_b(&self, s: C64) -> Result<C64> {
        self.denominators_clear(s, false)?;
        let num = ratio_product(&self.num, |f| f.arg(s));
        let den = ratio_product(&self.den, |f| f.arg(s));
        Ok(C64::new(0.0, -self.c).exp() * num / den)
    }

    /// A(s) as the quotient ν(s+i)/ν(s).
    pub fn coeff_a_quotient(&self, s: C64) -> Result<C64> {
        Ok(self.nu(s + C64::new(0.0, 1.0))? / self.nu(s)?)
    }

    /// B(s) as the quotient μ(s−i)/μ(s).
    pub fn coeff_b_quotient(&self, s: C64) -> Result<C64> {
        Ok(self.mu(s - C64::new(0.0, 1.0))? / self.mu(s)?)
    }

    /// Large-|s| envelope Ψ of the weight on each side of the line.
    pub fn envelope(&self) -> AsymptoticEnvelope {
        let mut power = 0.0;
        let mut poly_const = 0.0;
        let mut scale_sum = 0.0;
        let mut shift_im = 0.0;
        for (factors, sign) in [(&self.num, 1.0), (&self.den, -1.0)] {
            for f in factors.iter() {
                let m = f.scale as f64;
                power += sign * (2.0 * f.shift.re - 1.0);
                poly_const += sign * ((2.0 * PI).ln() + (2.0 * f.shift.re - 1.0) * m.ln());
                scale_sum += sign * m;
                shift_im += sign * f.shift.im;
            }
        }
        let log_pref = poly_const - (2.0 * PI).ln();
        AsymptoticEnvelope {
            power,
            right: SideEnvelope { exp_rate: 2.0 * self.c - PI * scale_sum, log_prefactor: log_pref - PI * shift_im },
            left: SideEnvelope { exp_rate: 2.0 * self.c + PI * scale_sum, log_prefactor: log_pref + PI * shift_im },
        }
    }
}

/// Exponential part of the envelope on one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideEnvelope {
    /// Coefficient of s in the exponent.
    pub exp_rate: f64,
    pub log_prefactor: f64,
}

/// Ψ(s) = e^{log_prefactor} |s|^{power} e^{exp_rate·s}, side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEnvelope {
    pub power: f64,
    pub left: SideEnvelope,
    pub right: SideEnvelope,
}

impl AsymptoticEnvelope {
    pub fn ln_eval(&self, s: f64) -> f64 {
        let side = if s >= 0.0 { self.right } else { self.left };
        side.log_prefactor + self.power * s.abs().ln() + side.exp_rate * s
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.ln_eval(s).exp()
    }
}

type CoeffFn = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;

/// 𝓛f(s) = up(s)·f(s+i) + diag(s)·f(s) + down(s)·f(s−i).
#[derive(Clone)]
pub struct DifferenceOperator {
    pub name: String,
    up: CoeffFn,
    diag: CoeffFn,
    down: CoeffFn,
}

impl std::fmt::Debug for DifferenceOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DifferenceOperator").field("name", &self.name).finish()
    }
}

impl DifferenceOperator {
    pub fn new(
        name: impl Into<String>,
        up: impl Fn(C64) -> Result<C64> + Send + Sync + 'static,
        diag: impl Fn(C64) -> Result<C64> + Send + Sync + 'static,
        down: impl Fn(C64) -> Result<C64> + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), up: Arc::new(up), diag: Arc::new(diag), down: Arc::new(down) }
    }

    pub fn zero() -> Self {
        let z = |_| Ok(C64::new(0.0, 0.0));
        Self::new("zero", z, z, z)
    }

    pub fn up(&self, s: C64) -> Result<C64> {
        (self.up)(s)
    }

    pub fn diag(&self, s: C64) -> Result<C64> {
        (self.diag)(s)
    }

    pub fn down(&self, s: C64) -> Result<C64> {
        (self.down)(s)
    }

    /// Applies the operator to an arbitrary evaluator, without strip checks.
    pub fn apply_fn(&self, f: impl Fn(C64) -> Result<C64>, s: C64) -> Result<C64> {
        let i = C64::new(0.0, 1.0);
        let mut acc = self.diag(s)? * f(s)?;
        let u = self.up(s)?;
        if u != C64::new(0.0, 0.0) {
            acc += u * f(s + i)?;
        }
        let d = self.down(s)?;
        if d != C64::new(0.0, 0.0) {
            acc += d * f(s - i)?;
        }
        Ok(acc)
    }

    /// (𝓛f)(s); needs |Im s| + 1 within the strip of `f`.
    pub fn apply(&self, f: &StripFunction, s: C64) -> Result<C64> {
        if s.im.abs() + 1.0 > f.half_width + 1e-12 {
            return Err(Error::Strip(format!(
                "shifts of s = {s} leave the strip of half-width {}",
                f.half_width
            )));
        }
        self.apply_fn(|z| f.eval(z), s)
    }

    /// 𝓛f as a new strip function, one unit narrower.
    pub fn image(&self, f: &StripFunction) -> StripFunction {
        let op = self.clone();
        let g = f.clone();
        StripFunction::new(move |s| op.apply(&g, s), (f.half_width - 1.0).max(0.0), f.decay).with_symmetry(f.symmetry)
    }
}

/// 𝓛 = A·T₊ − (A+B) + B·T₋ for the given weight.
pub fn make_operator(spec: &WeightSpec) -> DifferenceOperator {
    let (s1, s2, s3) = (spec.clone(), spec.clone(), spec.clone());
    DifferenceOperator::new(
        "weight",
        move |s| s1.coeff_a(s),
        move |s| Ok(-(s2.coeff_a(s)? + s2.coeff_b(s)?)),
        move |s| s3.coeff_b(s),
    )
}

/// |⟨𝓛f, g⟩_w − ⟨f, 𝓛g⟩_w| together with the combined quadrature error.
pub fn symmetry_defect(
    op: &DifferenceOperator,
    f: &StripFunction,
    g: &StripFunction,
    w: &Weight,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let lf = op.image(f);
    let lg = op.image(g);
    let a: Estimate = inner_product(&lf, g, w, cfg)?;
    let b: Estimate = inner_product(f, &lg, w, cfg)?;
    Ok(((a.value - b.value).norm(), a.error + b.error))
}

/// Outcome of [`is_w_decreasing`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub pass: bool,
    /// Sample points (re, im) where the bound failed.
    pub failures: Vec<(f64, f64)>,
}

/// Samples |f(s)| ≤ margin·Ψ(s)^{−1/2}|s|^{−m−1/2−ε} on |Im s| ≤ 1, |Re s| ∈ {10, 20, 40}.
pub fn is_w_decreasing(f: &StripFunction, spec: &WeightSpec, margin: f64) -> DecayReport {
    let env = spec.envelope();
    let m = spec.numerator_order() as f64;
    let eps = 0.01;
    let mut failures = Vec::new();
    for &r in &[10.0, 20.0, 40.0] {
        for &side in &[-1.0, 1.0] {
            for &im in &[-1.0, 0.0, 1.0] {
                let x: f64 = side * r;
                let ln_bound = margin.ln() - 0.5 * env.ln_eval(x) - (m + 0.5 + eps) * x.abs().ln();
                let ok = match f.eval(C64::new(x, im)) {
                    Ok(v) => v.norm() == 0.0 || v.norm().ln() <= ln_bound,
                    Err(_) => false,
                };
                if !ok {
                    failures.push((x, im));
                }
            }
        }
    }
    DecayReport { pass: failures.is_empty(), failures }
}

/// Golden-ratio sample of `n` points with Re s ∈ [−5, 5], Im s ∈ [−1, 0].
pub fn strip_samples(n: usize) -> Vec<C64> {
    let g1 = 0.754_877_666_246_692_8;
    let g2 = 0.569_840_290_998_053_3;
    (1..=n)
        .map(|k| {
            let u = (0.5 + g1 * k as f64).fract();
            let v = (0.5 + g2 * k as f64).fract();
            C64::new(10.0 * u - 5.0, -v)
        })
        .collect()
}

/// True iff L(s) = conj L(conj s − i) on a 50-point sample of −1 ≤ Im s ≤ 0.
pub fn check_shift_symmetry_law(l: impl Fn(C64) -> Result<C64>) -> bool {
    strip_samples(50).into_iter().all(|s| {
        match (l(s), l(s.conj() - C64::new(0.0, 1.0))) {
            (Ok(a), Ok(b)) => (a - b.conj()).norm() <= 1e-10 * (1.0 + a.norm()),
            _ => false,
        }
    })
}

fn param(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(msg.to_string()))
    }
}

/// Weight of the Kontorovich–Lebedev problem: μ = 1/Γ(is).
pub fn kl_spec() -> WeightSpec {
    WeightSpec::new(0.0, &[], &[C64::new(0.0, 0.0)])
}

/// Kontorovich–Lebedev operator (1/is)(f(s−i) − f(s+i)).
pub fn kl_operator() -> DifferenceOperator {
    let mut op = make_operator(&kl_spec());
    op.name = "kl".into();
    op
}

/// Weight of the Wimp problem: μ = Γ(1/2 − ρ + is)/Γ(2is).
pub fn wimp_spec(rho: f64) -> WeightSpec {
    WeightSpec::new(0.0, &[C64::new(0.5 - rho, 0.0)], &[]).over_gamma_2is()
}

/// Wimp operator with A = (1/2−ρ−is)/((−2is)(1−2is)), B = (1/2−ρ+is)/((2is)(1+2is)).
pub fn wimp_operator(rho: f64) -> Result<DifferenceOperator> {
    param(rho < 0.5, "Wimp operator needs rho < 1/2")?;
    let mut op = make_operator(&wimp_spec(rho));
    op.name = format!("wimp(rho={rho})");
    Ok(op)
}

/// Weight (1/2π)|Γ(α/2 + it)|² e^{πt} of the Vilenkin problem.
pub fn vilenkin_spec(alpha: f64) -> WeightSpec {
    WeightSpec::new(PI / 2.0, &[C64::new(alpha / 2.0, 0.0)], &[])
}

/// Vilenkin operator −i(α/2−it)f(t+i) + 2t·coshφ·f(t) + i(α/2+it)f(t−i).
pub fn vilenkin_operator(alpha: f64, phi: f64) -> Result<DifferenceOperator> {
    param(alpha > 0.0 && phi > 0.0, "Vilenkin operator needs alpha > 0, phi > 0")?;
    let h = alpha / 2.0;
    let i = C64::new(0.0, 1.0);
    let ch = phi.cosh();
    Ok(DifferenceOperator::new(
        format!("vilenkin(alpha={alpha},phi={phi})"),
        move |t| Ok(-i * (h - i * t)),
        move |t| Ok(t * (2.0 * ch)),
        move |t| Ok(i * (h + i * t)),
    ))
}

/// Meixner–Pollaczek weight: μ = e^{(φ−π/2)s}Γ(a + is).
pub fn mp_spec(a: f64, phi: f64) -> WeightSpec {
    WeightSpec::new(phi - PI / 2.0, &[C64::new(a, 0.0)], &[])
}

/// Meixner–Pollaczek operator: up −ie^{iφ}(a−is), diag 2(s cosφ − a sinφ), down ie^{−iφ}(a+is).
pub fn mp_operator(a: f64, phi: f64) -> Result<DifferenceOperator> {
    param(a > 0.0 && phi > 0.0 && phi < PI, "Meixner-Pollaczek needs a > 0, 0 < phi < pi")?;
    let mut op = make_operator(&mp_spec(a, phi));
    op.name = format!("mp(a={a},phi={phi})");
    Ok(op)
}

/// Continuous Hahn weight: μ = Γ(a + is)Γ(b + is).
pub fn hahn_spec(a: C64, b: C64) -> WeightSpec {
    WeightSpec::new(0.0, &[a, b], &[])
}

pub fn hahn_operator(a: C64, b: C64) -> Result<DifferenceOperator> {
    param(a.re > 0.0 && b.re > 0.0, "continuous Hahn needs Re a, Re b > 0")?;
    let mut op = make_operator(&hahn_spec(a, b));
    op.name = format!("hahn(a={a},b={b})");
    Ok(op)
}

/// Continuous dual Hahn weight: μ = Γ(a+is)Γ(b+is)Γ(c+is)/Γ(2is).
pub fn dual_hahn_spec(a: C64, b: C64, c: C64) -> WeightSpec {
    WeightSpec::new(0.0, &[a, b, c], &[]).over_gamma_2is()
}

pub(crate) fn dual_hahn_params_ok(a: C64, b: C64, c: C64) -> bool {
    let real = |z: C64| z.im == 0.0;
    let a_ok = real(a) && a.re > 0.0;
    a_ok && ((real(b) && real(c) && b.re > 0.0 && c.re > 0.0) || (b.re > 0.0 && c == b.conj()))
}

pub fn dual_hahn_operator(a: C64, b: C64, c: C64) -> Result<DifferenceOperator> {
    param(dual_hahn_params_ok(a, b, c), "continuous dual Hahn needs a, b, c > 0 or a > 0, Re b > 0, c = conj b")?;
    let mut op = make_operator(&dual_hahn_spec(a, b, c));
    op.name = format!("dual_hahn(a={a},b={b},c={c})");
    Ok(op)
}

/// Wilson weight: μ = Γ(a+is)Γ(b+is)Γ(c+is)Γ(d+is)/Γ(2is).
pub fn wilson_spec(a: C64, b: C64, c: C64, d: C64) -> WeightSpec {
    WeightSpec::new(0.0, &[a, b, c, d], &[]).over_gamma_2is()
}

pub(crate) fn wilson_params_ok(a: C64, b: C64, c: C64, d: C64) -> bool {
    let real = |z: C64| z.im == 0.0;
    let pos = [a, b, c, d].iter().all(|z| z.re > 0.0);
    let all_real = [a, b, c, d].iter().all(|&z| real(z));
    pos && (all_real || (real(a) && real(b) && d == c.conj()) || (b == a.conj() && d == c.conj()))
}

pub fn wilson_operator(a: C64, b: C64, c: C64, d: C64) -> Result<DifferenceOperator> {
    param(wilson_params_ok(a, b, c, d), "Wilson parameters outside the admissible cases")?;
    let mut op = make_operator(&wilson_spec(a, b, c, d));
    op.name = format!("wilson(a={a},b={b},c={c},d={d})");
    Ok(op)
}

/// Operator of the Δ-basis problem:
/// i(1/2−is)f(s+i) + 2(s−τ)cosφ·f(s) − i(1/2+is−2iτ)f(s−i).
pub fn sec6_operator(tau: f64, phi: f64) -> Result<DifferenceOperator> {
    param(tau.is_finite() && phi > 0.0 && phi < PI, "needs real tau and 0 < phi < pi")?;
    let i = C64::new(0.0, 1.0);
    let cp = phi.cos();
    Ok(DifferenceOperator::new(
        format!("delta_basis(tau={tau},phi={phi})"),
        move |s| Ok(i * (0.5 - i * s)),
        move |s| Ok((s - tau) * (2.0 * cp)),
        move |s| Ok(-i * (i * s - 2.0 * i * tau + 0.5)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::specfun::gamma::gamma;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn mu_and_nu_basics() {
        let spec = WeightSpec::new(0.0, &[c64(1.0, 0.0)], &[]);
        assert!(close(spec.mu(c64(0.0, 0.0)).unwrap(), c64(1.0, 0.0), 1e-14));
        let half = WeightSpec::new(0.0, &[c64(0.5, 0.0)], &[]);
        assert!(close(half.mu(c64(0.0, 0.0)).unwrap(), c64(PI.sqrt(), 0.0), 1e-14));
        let spec = WeightSpec::new(0.5, &[c64(1.0, 1.0)], &[c64(2.0, 0.0)]);
        let s = c64(0.3, 0.2);
        assert!(close(spec.nu(s).unwrap(), spec.mu(s.conj()).unwrap().conj(), 1e-14));
    }

    #[test]
    fn weight_values() {
        let spec = WeightSpec::new(0.0, &[c64(1.0, 0.0)], &[]);
        assert!((spec.weight(0.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let mp = mp_spec(1.0, PI / 2.0);
        let g = gamma(c64(1.0, 2.0)).unwrap().norm_sqr() / (2.0 * PI);
        assert!((mp.weight(2.0).unwrap() / g - 1.0).abs() < 1e-13);
        let spec = WeightSpec::new(0.2, &[c64(0.7, 0.0), c64(1.0, 2.0)], &[c64(3.0, 0.0)]);
        for &s in &strip_samples(100) {
            assert!(spec.weight(10.0 * s.re).unwrap() > 0.0);
        }
    }

    #[test]
    fn product_and_quotient_forms_agree() {
        let specs = [
            WeightSpec::new(0.4, &[c64(1.0, 0.3), c64(0.6, 0.0)], &[c64(2.0, -0.5)]),
            wilson_spec(c64(1.0, 0.0), c64(0.5, 0.0), c64(0.7, 0.2), c64(0.7, -0.2)),
            mp_spec(1.3, 1.0),
        ];
        for spec in &specs {
            for &s in &strip_samples(20) {
                let s = s + c64(0.0, 0.3);
                assert!(close(spec.coeff_a(s).unwrap(), spec.coeff_a_quotient(s).unwrap(), 1e-11));
                assert!(close(spec.coeff_b(s).unwrap(), spec.coeff_b_quotient(s).unwrap(), 1e-11));
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        let spec = WeightSpec::new(0.0, &[c64(1.0, 0.0)], &[]);
        assert_eq!(spec.coeff_a(c64(0.0, 0.0)).unwrap(), c64(1.0, 0.0));
        let real = WeightSpec::new(0.0, &[c64(0.8, 0.0), c64(1.5, 0.0)], &[c64(2.5, 0.0)]);
        let s = c64(0.4, -0.1);
        assert!(close(real.coeff_b(s).unwrap(), real.coeff_a(s.conj()).unwrap().conj(), 1e-15));
        let one = c64(1.0, 0.0);
        let w = wilson_spec(one, one, one, one);
        let i = c64(0.0, 1.0);
        let want = (one - i * 0.5).powi(4) / ((-i) * (one - i));
        assert!(close(w.coeff_a(c64(0.5, 0.0)).unwrap(), want, 1e-15));
    }

    #[test]
    fn operators_annihilate_constants() {
        let one = StripFunction::entire(|_| Ok(c64(1.0, 0.0)));
        let ops = [
            kl_operator(),
            wimp_operator(0.2).unwrap(),
            mp_operator(1.0, 1.0).unwrap(),
            hahn_operator(c64(0.5, 0.2), c64(1.0, 0.0)).unwrap(),
            dual_hahn_operator(c64(0.5, 0.0), c64(1.0, 0.0), c64(1.5, 0.0)).unwrap(),
            wilson_operator(c64(0.5, 0.0), c64(1.0, 0.0), c64(1.5, 0.0), c64(0.7, 0.0)).unwrap(),
        ];
        for op in &ops {
            for &s in &[c64(0.3, 0.0), c64(1.7, 0.0), c64(-2.2, 0.0)] {
                assert!(op.apply(&one, s).unwrap().norm() < 1e-13, "{}", op.name);
            }
        }
    }

    #[test]
    fn linear_and_quadratic_images() {
        let spec = WeightSpec::new(0.3, &[c64(1.0, 0.5)], &[c64(2.0, 0.0)]);
        let op = make_operator(&spec);
        let lin = StripFunction::entire(Ok);
        let s = c64(0.7, 0.1);
        let want = (spec.coeff_a(s).unwrap() - spec.coeff_b(s).unwrap()) * c64(0.0, 1.0);
        assert!(close(op.apply(&lin, s).unwrap(), want, 1e-14));
        let sq = StripFunction::entire(|s| Ok(s * s));
        let v = kl_operator().apply(&sq, c64(1.3, 0.0)).unwrap();
        assert!(close(v, c64(-4.0, 0.0), 1e-14));
    }

    #[test]
    fn vilenkin_coefficients() {
        let op = vilenkin_operator(1.0, 0.8).unwrap();
        let t = c64(0.6, 0.0);
        let i = c64(0.0, 1.0);
        assert!(close(op.up(t).unwrap(), -i * (0.5 - i * t), 1e-15));
        assert!(close(op.down(t).unwrap(), i * (0.5 + i * t), 1e-15));
        assert!(close(op.diag(t).unwrap(), t * 2.0 * 0.8f64.cosh(), 1e-15));
    }

    #[test]
    fn pole_adjacent_coefficients_fail() {
        assert!(matches!(kl_spec().coeff_b(c64(1e-9, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn shift_symmetry_law_examples() {
        let i = c64(0.0, 1.0);
        assert!(check_shift_symmetry_law(|s| Ok(i * 0.5 + s)));
        let a = 0.7;
        assert!(check_shift_symmetry_law(|s| Ok((i * 0.5 + i * a + s) * (i * 0.5 - i * a + s))));
        assert!(!check_shift_symmetry_law(Ok));
    }

    #[test]
    fn envelope_tracks_weight() {
        let specs = [mp_spec(1.0, 1.0), wilson_spec(c64(0.5, 0.0), c64(1.0, 0.0), c64(0.7, 0.3), c64(0.7, -0.3)), hahn_spec(c64(0.5, 0.4), c64(1.0, 0.0))];
        for spec in &specs {
            let env = spec.envelope();
            for &s in &[-60.0, -30.0, 30.0, 60.0] {
                let r = spec.weight(s).unwrap() / env.eval(s);
                assert!((r - 1.0).abs() < 0.05, "{s}: ratio {r}");
            }
        }
    }

    #[test]
    fn decay_classification() {
        let spec = mp_spec(1.0, 1.0);
        assert!(is_w_decreasing(&StripFunction::zero(), &spec, 1.0).pass);
        assert!(is_w_decreasing(&StripFunction::entire(|s| Ok((-s * s).exp())), &spec, 1.0).pass);
        assert!(!is_w_decreasing(&StripFunction::entire(|s| Ok((s * s).exp())), &spec, 1.0).pass);
    }
}
