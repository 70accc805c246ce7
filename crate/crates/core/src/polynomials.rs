//! Meixner–Pollaczek, continuous Hahn, continuous dual Hahn and Wilson
//! polynomials: evaluation by terminating hypergeometric sums, eigenvalue
//! laws of the associated difference operators, and Gram matrices against
//! the gamma-quotient weights.
//!
//! Each family carries the eigenvalue law it is checked against.  Some
//! families admit competing closed forms for that law (and, for continuous
//! Hahn, for the second upper parameter of the ₃F₂); [`candidates`] lists
//! them and [`resolve`] keeps the one the difference equation confirms.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{Estimate, QuadratureConfig};
use crate::specfun::gamma::{log_gamma, pochhammer};
use crate::specfun::hyp_pfq;
use crate::weights_ops::{
    dual_hahn_operator, dual_hahn_params_ok, dual_hahn_spec, hahn_operator, hahn_spec, mp_operator, mp_spec,
    wilson_operator, wilson_params_ok, wilson_spec, DifferenceOperator, WeightSpec,
};
use crate::{c64, re, C64};

/// Second upper parameter of the continuous Hahn ₃F₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HahnForm {
    /// n + a + b + ā + b̄ − 1.
    Standard,
    /// n + a + b + ā + b̄.
    Unshifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FamilyKind {
    MeixnerPollaczek { a: f64, phi: f64 },
    ContinuousHahn { a: C64, b: C64, form: HahnForm },
    ContinuousDualHahn { a: C64, b: C64, c: C64 },
    Wilson { a: C64, b: C64, c: C64, d: C64 },
}

/// λ_n as a function of n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EigenLaw {
    /// λ_n = k·n.
    Linear(f64),
    /// λ_n = n(n + k).
    Quadratic(f64),
}

impl EigenLaw {
    pub fn eval(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            EigenLaw::Linear(k) => k * n,
            EigenLaw::Quadratic(k) => n * (n + k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFamily {
    pub kind: FamilyKind,
    pub law: EigenLaw,
}

fn param(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(msg.into()))
    }
}

impl PolynomialFamily {
    pub fn meixner_pollaczek(a: f64, phi: f64) -> Result<Self> {
        param(a > 0.0 && phi > 0.0 && phi < PI, "Meixner-Pollaczek needs a > 0, 0 < phi < pi")?;
        Ok(Self { kind: FamilyKind::MeixnerPollaczek { a, phi }, law: EigenLaw::Linear(2.0 * phi.sin()) })
    }

    pub fn continuous_hahn(a: C64, b: C64) -> Result<Self> {
        param(a.re > 0.0 && b.re > 0.0, "continuous Hahn needs Re a, Re b > 0")?;
        let k = 2.0 * (a.re + b.re) - 1.0;
        Ok(Self { kind: FamilyKind::ContinuousHahn { a, b, form: HahnForm::Standard }, law: EigenLaw::Quadratic(k) })
    }

    pub fn continuous_dual_hahn(a: C64, b: C64, c: C64) -> Result<Self> {
        param(dual_hahn_params_ok(a, b, c), "continuous dual Hahn needs a, b, c > 0 or a > 0, Re b > 0, c = conj b")?;
        Ok(Self { kind: FamilyKind::ContinuousDualHahn { a, b, c }, law: EigenLaw::Linear(1.0) })
    }

    pub fn wilson(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        param(wilson_params_ok(a, b, c, d), "Wilson parameters outside the admissible cases")?;
        let k = (a + b + c + d).re - 1.0;
        Ok(Self { kind: FamilyKind::Wilson { a, b, c, d }, law: EigenLaw::Quadratic(k) })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::MeixnerPollaczek { .. } => "meixner_pollaczek",
            FamilyKind::ContinuousHahn { .. } => "continuous_hahn",
            FamilyKind::ContinuousDualHahn { .. } => "continuous_dual_hahn",
            FamilyKind::Wilson { .. } => "wilson",
        }
    }

    /// Dual Hahn and Wilson polynomials are polynomials in s².
    pub fn is_even(&self) -> bool {
        matches!(self.kind, FamilyKind::ContinuousDualHahn { .. } | FamilyKind::Wilson { .. })
    }

    /// Degree in s.
    pub fn degree_in_s(&self, n: usize) -> usize {
        if self.is_even() {
            2 * n
        } else {
            n
        }
    }

    pub fn weight_spec(&self) -> WeightSpec {
        match self.kind {
            FamilyKind::MeixnerPollaczek { a, phi } => mp_spec(a, phi),
            FamilyKind::ContinuousHahn { a, b, .. } => hahn_spec(a, b),
            FamilyKind::ContinuousDualHahn { a, b, c } => dual_hahn_spec(a, b, c),
            FamilyKind::Wilson { a, b, c, d } => wilson_spec(a, b, c, d),
        }
    }

    pub fn operator(&self) -> Result<DifferenceOperator> {
        match self.kind {
            FamilyKind::MeixnerPollaczek { a, phi } => mp_operator(a, phi),
            FamilyKind::ContinuousHahn { a, b, .. } => hahn_operator(a, b),
            FamilyKind::ContinuousDualHahn { a, b, c } => dual_hahn_operator(a, b, c),
            FamilyKind::Wilson { a, b, c, d } => wilson_operator(a, b, c, d),
        }
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        self.law.eval(n)
    }

    /// p_n(s).
    pub fn eval(&self, n: usize, s: C64) -> Result<C64> {
        let i = c64(0.0, 1.0);
        let neg_n = re(-(n as f64));
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        match self.kind {
            FamilyKind::MeixnerPollaczek { a, phi } => {
                let z = re(1.0) - c64(0.0, -2.0 * phi).exp();
                let f = hyp_pfq(&[neg_n, a + i * s], &[re(2.0 * a)], z)?;
                Ok(pochhammer(re(2.0 * a), n) / fact * c64(0.0, n as f64 * phi).exp() * f)
            }
            FamilyKind::ContinuousHahn { a, b, form } => {
                let shift = if form == HahnForm::Standard { -1.0 } else { 0.0 };
                let upper = a + b + a.conj() + b.conj() + (n as f64 + shift);
                let l1 = a + a.conj();
                let l2 = a + b.conj();
                let f = hyp_pfq(&[neg_n, upper, a + i * s], &[l1, l2], re(1.0))?;
                Ok(i.powu(n as u32) * pochhammer(l1, n) * pochhammer(l2, n) / fact * f)
            }
            FamilyKind::ContinuousDualHahn { a, b, c } => {
                let f = hyp_pfq(&[neg_n, a + i * s, a - i * s], &[a + b, a + c], re(1.0))?;
                Ok(pochhammer(a + b, n) * pochhammer(a + c, n) * f)
            }
            FamilyKind::Wilson { a, b, c, d } => {
                let upper = a + b + c + d + (n as f64 - 1.0);
                let f = hyp_pfq(&[neg_n, upper, a + i * s, a - i * s], &[a + b, a + c, a + d], re(1.0))?;
                Ok(pochhammer(a + b, n) * pochhammer(a + c, n) * pochhammer(a + d, n) * f)
            }
        }
    }

    /// ‖p_n‖² against w: closed form for Meixner–Pollaczek, quadrature otherwise.
    pub fn norm_squared(&self, n: usize, cfg: &QuadratureConfig) -> Result<Estimate> {
        if let FamilyKind::MeixnerPollaczek { a, phi } = self.kind {
            return Ok(Estimate { value: re(mp_norm_squared(a, phi, n)?), error: 0.0, levels: 0, evals: 0, converged: true });
        }
        self.gram_entry(n, n, cfg)
    }

    /// ⟨p_m, p_n⟩_w by quadrature on the line.
    pub fn gram_entry(&self, m: usize, n: usize, cfg: &QuadratureConfig) -> Result<Estimate> {
        let w = self.weight_spec().as_weight();
        w.integrate(|s| Ok(self.eval(m, re(s))? * self.eval(n, re(s))?.conj()), cfg)
    }

    /// G[m][n] = ⟨p_m, p_n⟩_w for m, n < size; entries computed in parallel.
    /// Off-diagonal entries are converged relative to √(G_mm G_nn).
    pub fn gram_matrix(&self, size: usize, cfg: &QuadratureConfig) -> Result<GramMatrix> {
        param((1..=12).contains(&size), "Gram size must be between 1 and 12")?;
        let diag: Vec<Estimate> = (0..size).into_par_iter().map(|n| self.gram_entry(n, n, cfg)).collect::<Result<_>>()?;
        let pairs: Vec<(usize, usize)> = (0..size).flat_map(|m| (m + 1..size).map(move |n| (m, n))).collect();
        let off: Vec<Estimate> = pairs
            .par_iter()
            .map(|&(m, n)| {
                let scale = (diag[m].value.norm() * diag[n].value.norm()).sqrt();
                let local = QuadratureConfig { abs_tol: cfg.abs_tol.max(cfg.rel_tol * scale), ..*cfg };
                self.gram_entry(m, n, &local)
            })
            .collect::<Result<_>>()?;
        let mut entries = vec![vec![c64(0.0, 0.0); size]; size];
        let mut error = 0.0f64;
        for (k, e) in diag.iter().enumerate() {
            error = error.max(e.error);
            entries[k][k] = re(e.value.re);
        }
        for (&(m, n), e) in pairs.iter().zip(&off) {
            error = error.max(e.error);
            entries[m][n] = e.value;
            entries[n][m] = e.value.conj();
        }
        Ok(GramMatrix { entries, max_error: error })
    }

    /// max |𝓛p_n − λ_n p_n| over the sample points.
    pub fn eigen_defect(&self, n: usize, samples: &[C64]) -> Result<f64> {
        let op = self.operator()?;
        let lambda = self.eigenvalue(n);
        let mut worst = 0.0f64;
        for &s in samples {
            let lp = op.apply_fn(|z| self.eval(n, z), s)?;
            worst = worst.max((lp - self.eval(n, s)? * lambda).norm());
        }
        Ok(worst)
    }

    /// Eigen defect divided by max(1, max |λ_n p_n|) over the samples.
    pub fn relative_eigen_defect(&self, n: usize, samples: &[C64]) -> Result<f64> {
        let mut scale = 1.0f64;
        for &s in samples {
            scale = scale.max((self.eval(n, s)? * self.eigenvalue(n)).norm()).max(self.eval(n, s)?.norm());
        }
        Ok(self.eigen_defect(n, samples)? / scale)
    }

    /// Relative size of the order-(d+1) finite difference of p_n on an
    /// integer grid in the family variable, d being the expected degree.
    pub fn degree_defect(&self, n: usize) -> Result<f64> {
        let d = n;
        let var = |t: f64| if self.is_even() { re(t.sqrt()) } else { re(t) };
        let values: Vec<C64> = (0..d + 2).map(|k| self.eval(n, var(k as f64))).collect::<Result<_>>()?;
        let top = finite_difference(&values[..d + 1]);
        let next = finite_difference(&values);
        let scale = values.iter().fold(top.norm(), |m, v| m.max(v.norm()));
        if top.norm() <= 1e-12 * scale {
            return Ok(f64::INFINITY);
        }
        Ok(next.norm() / scale)
    }
}

fn finite_difference(values: &[C64]) -> C64 {
    let mut v = values.to_vec();
    while v.len() > 1 {
        v = v.windows(2).map(|w| w[1] - w[0]).collect();
    }
    v[0]
}

/// Γ(n+2a)/((2 sinφ)^{2a} n!).
pub fn mp_norm_squared(a: f64, phi: f64, n: usize) -> Result<f64> {
    param(a > 0.0 && phi > 0.0 && phi < PI, "Meixner-Pollaczek needs a > 0, 0 < phi < pi")?;
    let lg = log_gamma(re(n as f64 + 2.0 * a))?.re - log_gamma(re(n as f64 + 1.0))?.re;
    Ok((lg - 2.0 * a * (2.0 * phi.sin()).ln()).exp())
}

/// Hermitian Gram matrix with the largest quadrature error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub entries: Vec<Vec<C64>>,
    pub max_error: f64,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.size()).map(|k| self.entries[k][k].norm()).fold(0.0, f64::max)
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.size();
        (0..n)
            .flat_map(|m| (0..n).filter(move |&k| k != m).map(move |k| (m, k)))
            .map(|(m, k)| self.entries[m][k].norm())
            .fold(0.0, f64::max)
    }

    /// max off-diagonal / max diagonal.
    pub fn orthogonality_defect(&self) -> f64 {
        self.max_off_diagonal() / self.max_diagonal()
    }

    /// Row-major CSV with header `m,n,re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "n", "re", "im"])?;
        for (m, row) in self.entries.iter().enumerate() {
            for (n, z) in row.iter().enumerate() {
                w.write_record([m.to_string(), n.to_string(), format!("{:.17e}", z.re), format!("{:.17e}", z.im)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Competing forms of a family, its own first.
pub fn candidates(family: &PolynomialFamily) -> Vec<(&'static str, PolynomialFamily)> {
    let mut out = vec![("standard", *family)];
    match family.kind {
        FamilyKind::MeixnerPollaczek { phi, .. } => {
            out.push(("n sin(phi)", PolynomialFamily { law: EigenLaw::Linear(phi.sin()), ..*family }));
        }
        FamilyKind::ContinuousHahn { a, b, .. } => {
            let k = 2.0 * (a.re + b.re);
            out.push((
                "unshifted",
                PolynomialFamily {
                    kind: FamilyKind::ContinuousHahn { a, b, form: HahnForm::Unshifted },
                    law: EigenLaw::Quadratic(k),
                },
            ));
        }
        FamilyKind::ContinuousDualHahn { .. } => {}
        FamilyKind::Wilson { a, b, c, d } => {
            let k = (a + b + c + d).re - 1.0;
            out.push(("n(a+b+c+d-1)", PolynomialFamily { law: EigenLaw::Linear(k), ..*family }));
        }
    }
    out
}

/// Outcome of checking one candidate against the difference equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateOutcome {
    pub label: String,
    pub defects: Vec<f64>,
    pub accepted: bool,
}

pub const RESOLVE_TOL: f64 = 1e-8;

/// Sample points for eigen checks, clear of coefficient poles.
pub fn eigen_samples() -> Vec<C64> {
    vec![c64(0.3, 0.0), c64(-1.1, 0.0), c64(1.7, 0.0), c64(2.4, 0.0), c64(0.5, 0.3)]
}

/// Evaluates every candidate at n = 1, 2 and returns the first accepted one
/// together with all outcomes.
pub fn resolve(family: &PolynomialFamily) -> Result<(Option<PolynomialFamily>, Vec<CandidateOutcome>)> {
    let samples = eigen_samples();
    let mut chosen = None;
    let mut outcomes = Vec::new();
    for (label, cand) in candidates(family) {
        let defects = vec![cand.relative_eigen_defect(1, &samples)?, cand.relative_eigen_defect(2, &samples)?];
        let accepted = defects.iter().all(|&d| d < RESOLVE_TOL);
        if accepted && chosen.is_none() {
            chosen = Some(cand);
        }
        outcomes.push(CandidateOutcome { label: label.into(), defects, accepted });
    }
    Ok((chosen, outcomes))
}
