//! Named verification suites.
//!
//! Each suite is a list of checks; a check measures one defect (a residual,
//! a relative difference, a Gram off-diagonal ratio) and compares it with a
//! tolerance.  Checks that share expensive work are computed together in a
//! group, and the groups of a suite run concurrently.  The report is sorted
//! by check id, so its content does not depend on scheduling.
//!
//! The seven topical suites verify the identities the library relies on.
//! `as_written` holds literal forms of identities whose stated form does not
//! hold (wrong argument, sign, normalisation or kernel exponent); it is
//! expected to fail and is kept so that the failure stays measurable.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extensions::{
    d_eigen_residual, delta_gram, psi_cutoff, psi_grams, s_map, sec6_eigen_defect, ExtensionParams, PsiForm,
};
use crate::polynomials::{eigen_samples, mp_norm_squared, resolve, PolynomialFamily};
use crate::quadrature::{richardson_derivative, QuadratureConfig};
use crate::specfun::gamma::{gamma, log_gamma};
use crate::specfun::{macdonald_k, whittaker_w};
use crate::transforms::double_mellin::{double_mellin_config, double_mellin_plancherel};
use crate::transforms::kl::KontorovichLebedev;
use crate::transforms::mellin::{mellin_pair_forward_kernel, mellin_pair_inverse_kernel};
use crate::transforms::vilenkin::{h_alpha_inner_product, j_alpha_forward, Vilenkin};
use crate::transforms::wimp::Wimp;
use crate::transforms::{
    gaussian_battery, half_line_battery, integrate, intertwining_defect, unitarity, vilenkin_battery, RealFunction,
    TransformConfig, TransformPair,
};
use crate::weights_ops::{
    dual_hahn_operator, dual_hahn_spec, hahn_operator, hahn_spec, kl_operator, kl_spec, mp_operator, mp_spec,
    symmetry_defect, wilson_operator, wilson_spec, wimp_operator, wimp_spec, DifferenceOperator, WeightSpec,
};
use crate::{c64, re, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Suite names accepted by [`run_suite`].
pub const SUITES: [&str; 9] = ["specfun", "symmetry", "kl", "wimp", "vilenkin", "polynomials", "sec6", "all", "as_written"];

/// The suites that `all` combines.
const TOPICAL: [&str; 7] = ["specfun", "symmetry", "kl", "wimp", "vilenkin", "polynomials", "sec6"];

/// One measured check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    /// The identity being checked, in formula form.
    pub anchor: String,
    pub defect: f64,
    pub tol: f64,
    pub pass: bool,
    /// Wall time of the group that produced this check.
    pub ms: u64,
    /// Extra findings, such as the candidates a resolution rejected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Set when the measurement itself failed; the defect is then `f64::MAX`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, mut checks: Vec<CheckResult>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let pass = checks.iter().all(|c| c.pass);
        Self { suite: suite.into(), checks, pass }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Usage(format!("malformed report: {e}")))
    }

    /// Sets every runtime to 0, for byte-stable output.
    pub fn without_timings(mut self) -> Self {
        for c in &mut self.checks {
            c.ms = 0;
        }
        self
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.checks {
            let verdict = match (&c.error, c.pass) {
                (Some(_), _) => "ERR ",
                (None, true) => "PASS",
                (None, false) => "FAIL",
            };
            let _ = write!(out, "{verdict}  {:<width$}  defect {:.3e}  tol {:.1e}  {:>7} ms  {}", c.id, c.defect, c.tol, c.ms, c.anchor);
            if let Some(n) = &c.note {
                let _ = write!(out, "  [{n}]");
            }
            if let Some(e) = &c.error {
                let _ = write!(out, "  ({e})");
            }
            out.push('\n');
        }
        let n_pass = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(
            out,
            "suite {}: {} ({n_pass}/{} checks pass)",
            self.suite,
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len()
        );
        out
    }
}

/// Tolerance overrides: a per-check value wins over the global one, which
/// wins over the check's default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub global: Option<f64>,
    pub per_check: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn resolve(&self, id: &str, default: f64) -> f64 {
        self.per_check.get(id).copied().or(self.global).unwrap_or(default)
    }
}

struct Item {
    id: &'static str,
    anchor: &'static str,
    tol: f64,
}

/// A measured defect with an optional note.
struct Measured(f64, Option<String>);

impl From<f64> for Measured {
    fn from(d: f64) -> Self {
        Measured(d, None)
    }
}

struct Group {
    items: Vec<Item>,
    run: fn() -> Result<Vec<Measured>>,
}

macro_rules! group {
    ($run:expr; $( ($id:expr, $tol:expr, $anchor:expr) ),+ $(,)?) => {
        Group { items: vec![$(Item { id: $id, anchor: $anchor, tol: $tol }),+], run: $run }
    };
}

fn groups(suite: &str) -> Result<Vec<Group>> {
    Ok(match suite {
        "specfun" => vec![
            group!(m_gamma_recurrence; ("specfun.gamma_recurrence", 1e-12, "Γ(z+1) = zΓ(z)")),
            group!(m_k_recurrence; ("specfun.k_recurrence", 1e-9, "K_{ν−1}(x) − K_{ν+1}(x) = −(2ν/x)K_ν(x)")),
            group!(m_k_derivative; ("specfun.k_derivative_identity", 1e-7, "K_{ν−1}(x) + K_{ν+1}(x) = −2 dK_ν/dx")),
            group!(m_k_bridge_2x; ("specfun.k_whittaker_bridge", 1e-9, "K_ν(x) = √(π/2x) W_{0,ν}(2x)")),
            group!(m_whittaker_difference; ("specfun.whittaker_difference_equation", 1e-8, "𝓛_ρ W_{ρ,is}(x) = W_{ρ,is}(x)/x, coefficients 1/2−ρ∓is")),
            group!(m_mellin_pair_inverse; ("specfun.mellin_pair", 1e-8, "(1/2π)∫Γ(is)Γ(α−is)x^{−is}ds = Γ(α)(1+x)^{−α}")),
        ],
        "symmetry" => vec![
            group!(m_symmetry_mp; ("symmetry.mp", 10.0, "⟨𝓛f,g⟩_w = ⟨f,𝓛g⟩_w, Meixner–Pollaczek")),
            group!(m_symmetry_hahn; ("symmetry.hahn", 10.0, "⟨𝓛f,g⟩_w = ⟨f,𝓛g⟩_w, continuous Hahn")),
            group!(m_symmetry_dual_hahn; ("symmetry.dual_hahn", 10.0, "⟨𝓛f,g⟩_w = ⟨f,𝓛g⟩_w, continuous dual Hahn")),
            group!(m_symmetry_wilson; ("symmetry.wilson", 10.0, "⟨𝓛f,g⟩_w = ⟨f,𝓛g⟩_w, Wilson")),
            group!(m_symmetry_kl; ("symmetry.kl", 10.0, "⟨𝓛f,g⟩_w = ⟨f,𝓛g⟩_w, w = 1/(2π|Γ(is)|²)")),
            group!(m_symmetry_wimp; ("symmetry.wimp", 10.0, "⟨𝓛f,g⟩_w = ⟨f,𝓛g⟩_w, w = |Γ(1/2−ρ+is)/Γ(2is)|²/2π")),
        ],
        "kl" => vec![
            group!(m_kl_unitarity;
                ("kl.plancherel", 1e-5, "‖𝔎g‖ = ‖g‖ in L²(dx/x)"),
                ("kl.round_trip", 1e-5, "𝔎⁻¹𝔎g = g")),
            group!(m_kl_intertwining; ("kl.intertwining", 1e-6, "𝔎((2/x)g)(s) = (1/is)(𝔎g(s−i) − 𝔎g(s+i))")),
        ],
        "wimp" => vec![
            group!(m_wimp_intertwining; ("wimp.intertwining", 1e-6, "𝔚(x^{−1}g) = 𝓛_ρ𝔚g, ρ = 0.2")),
            group!(m_wimp_plancherel; ("wimp.plancherel", 1e-5, "‖𝔚g‖ = ‖g‖ in L²(dx/x²), ρ = 0.2")),
        ],
        "vilenkin" => vec![
            group!(m_vilenkin_norm; ("vilenkin.norm", 1e-5, "‖𝔙g‖_w = ‖g‖_w, (α, φ) = (1, 0.8)")),
            group!(m_vilenkin_intertwining; ("vilenkin.intertwining", 1e-5, "𝓛(𝔙g) = 𝔙(2s sinhφ g), (α, φ) = (1, 0.8)")),
            group!(m_j_alpha;
                ("vilenkin.j_alpha_inner_product", 1e-6, "⟨Ψ_{ia}, Ψ_{ib}⟩ = ((a+b)/2)^{−α}"),
                ("vilenkin.j_alpha_phi_image", 1e-6, "J_α Φ_a = Ψ_{ia}, Φ_a = a^{α/2+is}")),
        ],
        "polynomials" => vec![
            group!(m_eigen;
                ("polynomials.eigen_mp", 1e-9, "𝓛P_n = 2n sinφ P_n"),
                ("polynomials.eigen_hahn", 1e-9, "𝓛p_n = n(n+a+ā+b+b̄−1)p_n"),
                ("polynomials.eigen_dual_hahn", 1e-9, "𝓛S_n = n S_n"),
                ("polynomials.eigen_wilson", 1e-9, "𝓛W_n = n(n+a+b+c+d−1)W_n")),
            group!(m_resolution;
                ("polynomials.resolution_mp", 1e-8, "eigenvalue 2n sinφ chosen over n sinφ"),
                ("polynomials.resolution_hahn", 1e-8, "shifted ₃F₂ parameter n+a+ā+b+b̄−1 chosen"),
                ("polynomials.resolution_wilson", 1e-8, "eigenvalue n(n+a+b+c+d−1) chosen over n(a+b+c+d−1)")),
            group!(m_mp_gram;
                ("polynomials.mp_norms", 1e-8, "‖P_n‖² = Γ(n+2a)/((2 sinφ)^{2a} n!)"),
                ("polynomials.mp_gram_offdiag", 1e-8, "⟨P_m, P_n⟩ = 0, m ≠ n")),
        ],
        "sec6" => vec![
            group!(m_delta_gram; ("sec6.delta_gram", 1e-8, "⟨Δ_{σ+m}, Δ_{σ+n}⟩ = 0, m ≠ n")),
            group!(m_d_eigen; ("sec6.d_eigen", 1e-6, "DΔ_{σ+n} = 2 sinφ(σ+n)Δ_{σ+n}")),
            group!(m_psi_image;
                ("sec6.psi_image_gram", 1e-5, "Mellin images of Δ_{σ+n} are orthogonal"),
                ("sec6.psi_image_eigen", 1e-5, "𝓛Ψ^{(n)} = 2 sinφ(σ+n)Ψ^{(n)}, image form")),
            group!(m_double_mellin; ("sec6.double_mellin_plancherel", 1e-6, "∫|f|² = (1/2π)(∫|g₁|² + ∫|g₂|²e^{2πs})")),
            group!(m_s_map; ("sec6.s_map_isometry", 1e-8, "‖S e^{−inθ}‖² = 2π")),
        ],
        "as_written" => vec![
            group!(m_k_bridge_x; ("as_written.k_whittaker_bridge", 1e-9, "K_ν(x) = √(π/2x) W_{0,ν}(x)")),
            group!(m_whittaker_one_minus_rho; ("as_written.whittaker_difference_equation", 1e-8, "difference equation with coefficients 1−ρ∓is")),
            group!(m_kl_written_sign; ("as_written.kl_intertwining", 1e-6, "𝔎((2/x)g)(s) = (1/is)(𝔎g(s+i) − 𝔎g(s−i))")),
            group!(m_mp_norms_written; ("as_written.mp_norms", 1e-8, "‖P_n‖² = Γ(n+2a)/((2 sinφ) n!)")),
            group!(m_mellin_pair_forward; ("as_written.mellin_pair", 1e-8, "(1/2π)∫Γ(is)Γ(α−is)x^{is−1}ds = Γ(α)(1+x)^{−α}")),
            group!(m_psi_displayed;
                ("as_written.psi_gram", 1e-5, "displayed Ψ^{(n)} orthogonal in the direct sum"),
                ("as_written.psi_eigen", 1e-5, "𝓛Ψ^{(n)} = 2 sinφ(σ+n)Ψ^{(n)}, displayed form")),
        ],
        "all" => {
            let mut v = Vec::new();
            for s in TOPICAL {
                v.extend(groups(s)?);
            }
            v
        }
        other => return Err(Error::Usage(format!("unknown suite '{other}'; expected one of {}", SUITES.join(", ")))),
    })
}

/// Check ids of a suite, in report order.
pub fn check_ids(suite: &str) -> Result<Vec<&'static str>> {
    let mut ids: Vec<&'static str> = groups(suite)?.iter().flat_map(|g| g.items.iter().map(|i| i.id)).collect();
    ids.sort_unstable();
    Ok(ids)
}

fn run_groups(groups: Vec<Group>, tols: &Tolerances) -> Vec<CheckResult> {
    groups
        .into_par_iter()
        .flat_map_iter(|g| {
            let t = Instant::now();
            let out = (g.run)();
            let ms = t.elapsed().as_millis() as u64;
            let rows: Vec<CheckResult> = g
                .items
                .iter()
                .enumerate()
                .map(|(k, item)| {
                    let tol = tols.resolve(item.id, item.tol);
                    let (defect, note, error) = match &out {
                        Ok(v) => match v.get(k) {
                            Some(Measured(d, n)) => (*d, n.clone(), None),
                            None => (f64::MAX, None, Some("missing measurement".to_string())),
                        },
                        Err(e) => (f64::MAX, None, Some(e.to_string())),
                    };
                    let pass = error.is_none() && defect <= tol;
                    CheckResult { id: item.id.into(), anchor: item.anchor.into(), defect, tol, pass, ms, note, error }
                })
                .collect();
            rows
        })
        .collect()
}

/// Runs every check of `suite`.
pub fn run_suite(suite: &str, tols: &Tolerances) -> Result<SuiteReport> {
    let g = groups(suite)?;
    Ok(SuiteReport::new(suite, run_groups(g, tols)))
}

/// Runs the groups containing the given check ids (from any suite,
/// `as_written` included) and returns the requested results in id order.
pub fn run_checks(ids: &[&str], tols: &Tolerances) -> Result<Vec<CheckResult>> {
    let mut all: Vec<Group> = TOPICAL.iter().chain(["as_written"].iter()).map(|s| groups(s)).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    for id in ids {
        if !all.iter().any(|g| g.items.iter().any(|i| i.id == *id)) {
            return Err(Error::Usage(format!("unknown check '{id}'")));
        }
    }
    all.retain(|g| g.items.iter().any(|i| ids.contains(&i.id)));
    let mut rows: Vec<CheckResult> = run_groups(all, tols).into_iter().filter(|r| ids.contains(&r.id.as_str())).collect();
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(rows)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn m_gamma_recurrence() -> Result<Vec<Measured>> {
    let zs = [c64(0.3, 0.7), c64(-2.5, 0.1), c64(4.2, -3.0), c64(0.5, 10.0), c64(17.5, 0.0)];
    let mut worst = 0.0f64;
    for z in zs {
        worst = worst.max(rel(gamma(z + 1.0)?, z * gamma(z)?));
    }
    Ok(vec![worst.into()])
}

const K_ORDERS: [f64; 3] = [0.5, 1.0, 2.5];
const K_POINTS: [f64; 3] = [0.5, 1.0, 5.0];

fn m_k_recurrence() -> Result<Vec<Measured>> {
    let mut worst = 0.0f64;
    for s in K_ORDERS {
        let nu = c64(0.0, s);
        for x in K_POINTS {
            let lhs = macdonald_k(nu - 1.0, x)? - macdonald_k(nu + 1.0, x)?;
            let rhs = -macdonald_k(nu, x)? * nu * (2.0 / x);
            worst = worst.max((lhs - rhs).norm() / (macdonald_k(nu - 1.0, x)?.norm() + macdonald_k(nu + 1.0, x)?.norm()));
        }
    }
    Ok(vec![worst.into()])
}

fn m_k_derivative() -> Result<Vec<Measured>> {
    let mut worst = 0.0f64;
    for s in K_ORDERS {
        let nu = c64(0.0, s);
        for x in K_POINTS {
            let f = |t: f64| macdonald_k(nu, t).unwrap_or(c64(f64::NAN, f64::NAN));
            let d = richardson_derivative(&f, x, 0.1 * x)?;
            let sum = macdonald_k(nu - 1.0, x)? + macdonald_k(nu + 1.0, x)?;
            worst = worst.max((sum + d * 2.0).norm() / sum.norm().max(f64::MIN_POSITIVE));
        }
    }
    Ok(vec![worst.into()])
}

const BRIDGE_POINTS: [(f64, f64); 5] = [(0.0, 0.5), (0.5, 1.0), (1.0, 2.0), (0.3, 3.5), (2.5, 1.5)];

fn bridge(scale: f64) -> Result<Vec<Measured>> {
    let mut worst = 0.0f64;
    for (s, x) in BRIDGE_POINTS {
        let nu = c64(0.0, s);
        let w = whittaker_w(0.0, nu, scale * x)? * (PI / (2.0 * x)).sqrt();
        worst = worst.max(rel(w, macdonald_k(nu, x)?));
    }
    Ok(vec![worst.into()])
}

fn m_k_bridge_2x() -> Result<Vec<Measured>> {
    bridge(2.0)
}

fn m_k_bridge_x() -> Result<Vec<Measured>> {
    bridge(1.0)
}

/// max relative |𝓛 W_{ρ,i·}(x)(s) − W_{ρ,is}(x)/x| on the (s, x) grid, ρ ∈ {−1, 0.2}.
fn whittaker_residual(op: impl Fn(f64) -> Result<DifferenceOperator>) -> Result<f64> {
    let mut worst = 0.0f64;
    for rho in [-1.0, 0.2] {
        let l = op(rho)?;
        for s in [0.6, 1.1, 2.3] {
            for x in [0.7, 1.5, 4.0] {
                let lhs = l.apply_fn(|t| whittaker_w(rho, I * t, x), re(s))?;
                let rhs = whittaker_w(rho, c64(0.0, s), x)? / x;
                worst = worst.max(rel(lhs, rhs));
            }
        }
    }
    Ok(worst)
}

fn m_whittaker_difference() -> Result<Vec<Measured>> {
    Ok(vec![whittaker_residual(wimp_operator)?.into()])
}

fn m_whittaker_one_minus_rho() -> Result<Vec<Measured>> {
    // wimp_operator(ρ − 1/2) carries the coefficients 1 − ρ ∓ is
    Ok(vec![whittaker_residual(|rho| wimp_operator(rho - 0.5))?.into()])
}

const PAIR_ALPHA: f64 = 1.5;
const PAIR_X: f64 = 0.8;

fn pair_target() -> Result<C64> {
    Ok(gamma(re(PAIR_ALPHA))? * (1.0 + PAIR_X).powf(-PAIR_ALPHA))
}

fn m_mellin_pair_inverse() -> Result<Vec<Measured>> {
    let v = mellin_pair_inverse_kernel(PAIR_ALPHA, PAIR_X, 0.5, TransformConfig::default())?;
    Ok(vec![rel(v, pair_target()?).into()])
}

fn m_mellin_pair_forward() -> Result<Vec<Measured>> {
    let v = mellin_pair_forward_kernel(PAIR_ALPHA, PAIR_X, 0.5, TransformConfig::default())?;
    Ok(vec![rel(v, pair_target()?).into()])
}

/// Largest ratio |⟨𝓛f,g⟩ − ⟨f,𝓛g⟩| / (quadrature error) over the pairs of the
/// Gaussian battery; the error is floored at 1e−15 times the inner products.
fn symmetry_ratio(op: Result<DifferenceOperator>, spec: WeightSpec) -> Result<Vec<Measured>> {
    let op = op?;
    // the KL and Wimp weights grow like e^{π|s|} and overflow far out
    let cfg = QuadratureConfig { truncation_radius: Some(30.0), ..QuadratureConfig::default() };
    let w = spec.as_weight();
    let b = gaussian_battery();
    let mut worst = 0.0f64;
    for i in 0..b.len() {
        for j in i..b.len() {
            let (d, err) = symmetry_defect(&op, &b[i], &b[j], &w, &cfg)?;
            let scale = crate::quadrature::inner_product(&op.image(&b[i]), &b[j], &w, &cfg)?.value.norm();
            worst = worst.max(d / err.max(1e-15 * scale).max(f64::MIN_POSITIVE));
        }
    }
    Ok(vec![worst.into()])
}

const MP_A: f64 = 1.0;
const MP_PHI: f64 = PI / 3.0;

fn hahn_params() -> (C64, C64) {
    (c64(0.6, 0.3), c64(1.0, -0.2))
}

fn dual_hahn_params() -> (C64, C64, C64) {
    (re(0.5), c64(1.0, 0.4), c64(1.0, -0.4))
}

fn wilson_params() -> (C64, C64, C64, C64) {
    (re(0.5), re(1.0), c64(0.7, 0.3), c64(0.7, -0.3))
}

fn m_symmetry_mp() -> Result<Vec<Measured>> {
    symmetry_ratio(mp_operator(MP_A, MP_PHI), mp_spec(MP_A, MP_PHI))
}

fn m_symmetry_hahn() -> Result<Vec<Measured>> {
    let (a, b) = hahn_params();
    symmetry_ratio(hahn_operator(a, b), hahn_spec(a, b))
}

fn m_symmetry_dual_hahn() -> Result<Vec<Measured>> {
    let (a, b, c) = dual_hahn_params();
    symmetry_ratio(dual_hahn_operator(a, b, c), dual_hahn_spec(a, b, c))
}

fn m_symmetry_wilson() -> Result<Vec<Measured>> {
    let (a, b, c, d) = wilson_params();
    symmetry_ratio(wilson_operator(a, b, c, d), wilson_spec(a, b, c, d))
}

fn m_symmetry_kl() -> Result<Vec<Measured>> {
    symmetry_ratio(Ok(kl_operator()), kl_spec())
}

fn m_symmetry_wimp() -> Result<Vec<Measured>> {
    symmetry_ratio(wimp_operator(0.2), wimp_spec(0.2))
}

fn m_kl_unitarity() -> Result<Vec<Measured>> {
    let kl = KontorovichLebedev::new(TransformConfig::index_transform());
    let reports = half_line_battery().par_iter().map(|g| unitarity(&kl, g, true)).collect::<Result<Vec<_>>>()?;
    Ok(vec![
        max_of(reports.iter().map(|r| r.plancherel_defect)).into(),
        max_of(reports.iter().map(|r| r.round_trip_rms)).into(),
    ])
}

const KL_GRID: [f64; 3] = [0.5, 1.5, 3.0];

fn m_kl_intertwining() -> Result<Vec<Measured>> {
    let kl = KontorovichLebedev::new(TransformConfig::index_transform());
    Ok(vec![intertwining_defect(&kl, &half_line_battery(), &KL_GRID)?.into()])
}

fn m_kl_written_sign() -> Result<Vec<Measured>> {
    let kl = KontorovichLebedev::new(TransformConfig::index_transform());
    let mut worst = 0.0f64;
    for g in half_line_battery() {
        let f = kl.forward(&g);
        let lhs = kl.forward(&kl.source_multiplication(&g));
        for s in KL_GRID {
            let rhs = (f.eval(c64(s, 1.0))? - f.eval(c64(s, -1.0))?) / (I * s);
            worst = worst.max((lhs.eval(re(s))? - rhs).norm());
        }
    }
    Ok(vec![worst.into()])
}

fn wimp() -> Result<Wimp> {
    Wimp::new(0.2, TransformConfig::index_transform())
}

fn m_wimp_intertwining() -> Result<Vec<Measured>> {
    Ok(vec![intertwining_defect(&wimp()?, &half_line_battery(), &KL_GRID)?.into()])
}

fn m_wimp_plancherel() -> Result<Vec<Measured>> {
    Ok(vec![unitarity(&wimp()?, &half_line_battery()[0], false)?.plancherel_defect.into()])
}

fn vilenkin() -> Result<Vilenkin> {
    Vilenkin::new(1.0, 0.8, TransformConfig::vilenkin())
}

fn m_vilenkin_norm() -> Result<Vec<Measured>> {
    let v = vilenkin()?;
    let d = vilenkin_battery().iter().map(|g| Ok(unitarity(&v, g, false)?.plancherel_defect)).collect::<Result<Vec<_>>>()?;
    Ok(vec![max_of(d).into()])
}

fn m_vilenkin_intertwining() -> Result<Vec<Measured>> {
    let v = vilenkin()?;
    Ok(vec![intertwining_defect(&v, &vilenkin_battery(), &v.spectral_grid())?.into()])
}

fn m_j_alpha() -> Result<Vec<Measured>> {
    let (alpha, a, b) = (1.0, 1.0, 2.0);
    let cfg = TransformConfig::default();
    let psi = move |c: f64| move |z: C64| Ok(((z + I * c) / (2.0 * I)).powf(-alpha));
    let ip = h_alpha_inner_product(alpha, psi(a), psi(b), &cfg)?;
    let d1 = rel(ip, re(((a + b) / 2.0).powf(-alpha)));
    let phi_a = RealFunction::new("Phi_a", move |s: f64| Ok((c64(0.5 * alpha, s) * a.ln()).exp()));
    let mut d2 = 0.0f64;
    for z in [c64(0.0, 2.0), c64(1.0, 1.0), c64(-0.5, 0.5)] {
        d2 = d2.max(rel(j_alpha_forward(alpha, &phi_a, z, &cfg)?, psi(a)(z)?));
    }
    Ok(vec![d1.into(), d2.into()])
}

fn families() -> Result<[PolynomialFamily; 4]> {
    let (ha, hb) = hahn_params();
    let (da, db, dc) = dual_hahn_params();
    let (wa, wb, wc, wd) = wilson_params();
    Ok([
        PolynomialFamily::meixner_pollaczek(MP_A, MP_PHI)?,
        PolynomialFamily::continuous_hahn(ha, hb)?,
        PolynomialFamily::continuous_dual_hahn(da, db, dc)?,
        PolynomialFamily::wilson(wa, wb, wc, wd)?,
    ])
}

fn m_eigen() -> Result<Vec<Measured>> {
    let samples = eigen_samples();
    families()?
        .iter()
        .map(|f| Ok(max_of((0..=6).map(|n| f.relative_eigen_defect(n, &samples)).collect::<Result<Vec<_>>>()?).into()))
        .collect()
}

/// For MP, Hahn and Wilson: the defect of the accepted candidate, which must
/// be the form the library uses; rejected candidates go into the note.
fn m_resolution() -> Result<Vec<Measured>> {
    let [mp, hahn, _, wilson] = families()?;
    [mp, hahn, wilson]
        .iter()
        .map(|f| {
            let (chosen, outcomes) = resolve(f)?;
            let chosen = chosen.ok_or_else(|| Error::Tolerance(format!("no {} candidate passes", f.name())))?;
            if chosen != *f {
                return Err(Error::Tolerance(format!("{} resolved to a form the library does not use", f.name())));
            }
            let mut note = Vec::new();
            let mut accepted = f64::MAX;
            for o in &outcomes {
                let d = max_of(o.defects.iter().copied());
                if o.accepted && accepted == f64::MAX {
                    accepted = d;
                } else if !o.accepted {
                    note.push(format!("rejected '{}' at defect {d:.2e}", o.label));
                }
            }
            Ok(Measured(accepted, Some(note.join("; "))))
        })
        .collect()
}

fn mp_gram() -> Result<crate::polynomials::GramMatrix> {
    PolynomialFamily::meixner_pollaczek(MP_A, MP_PHI)?.gram_matrix(7, &QuadratureConfig::default())
}

fn m_mp_gram() -> Result<Vec<Measured>> {
    let g = mp_gram()?;
    let mut d = 0.0f64;
    for n in 0..7 {
        d = d.max(rel(g.entries[n][n], re(mp_norm_squared(MP_A, MP_PHI, n)?)));
    }
    Ok(vec![d.into(), g.orthogonality_defect().into()])
}

fn m_mp_norms_written() -> Result<Vec<Measured>> {
    let g = mp_gram()?;
    let mut d = 0.0f64;
    for n in 0..7 {
        let lg = log_gamma(re(n as f64 + 2.0 * MP_A))?.re - log_gamma(re(n as f64 + 1.0))?.re;
        d = d.max(rel(g.entries[n][n], re(lg.exp() / (2.0 * MP_PHI.sin()))));
    }
    Ok(vec![d.into()])
}

fn sec6_params() -> Result<ExtensionParams> {
    ExtensionParams::new(0.2, 0.3, 1.2)
}

fn m_delta_gram() -> Result<Vec<Measured>> {
    let g = delta_gram(&sec6_params()?, &[0, 1, 2, 3, 4], &QuadratureConfig::default())?;
    Ok(vec![g.orthogonality_defect().into()])
}

fn m_d_eigen() -> Result<Vec<Measured>> {
    let params = [(0.2, 0.3, 1.2), (0.0, 0.25, PI / 2.0), (-0.4, 0.7, 2.3)];
    let mut worst = 0.0f64;
    for (tau, sigma, phi) in params {
        let p = ExtensionParams::new(tau, sigma, phi)?;
        for n in 0..3 {
            for x in [-1.5, 0.3, 2.0] {
                worst = worst.max(d_eigen_residual(&p, n as f64, x, false)?);
            }
        }
    }
    Ok(vec![worst.into()])
}

const PSI_NS: [i32; 3] = [0, 1, 2];

fn psi_samples() -> Vec<C64> {
    vec![re(0.3), re(-0.8), re(1.4)]
}

fn psi_checks(form: PsiForm) -> Result<Vec<Measured>> {
    let p = sec6_params()?;
    let (raw, image) = psi_grams(&p, &PSI_NS, psi_cutoff(p.phi))?;
    let gram = match form {
        PsiForm::Hypergeometric => raw,
        PsiForm::DeltaImage => image,
    };
    let samples = psi_samples();
    let eig = PSI_NS.iter().map(|&n| sec6_eigen_defect(&p, n, &samples, form)).collect::<Result<Vec<_>>>()?;
    Ok(vec![gram.orthogonality_defect().into(), max_of(eig).into()])
}

fn m_psi_image() -> Result<Vec<Measured>> {
    psi_checks(PsiForm::DeltaImage)
}

fn m_psi_displayed() -> Result<Vec<Measured>> {
    psi_checks(PsiForm::Hypergeometric)
}

fn m_double_mellin() -> Result<Vec<Measured>> {
    let fs = [
        RealFunction::new("exp(-x^2)", |x: f64| Ok(re((-x * x).exp()))),
        RealFunction::new("exp(-(x-0.7)^2)", |x: f64| Ok(re((-(x - 0.7) * (x - 0.7)).exp()))),
    ];
    let d = fs.par_iter().map(|f| Ok(double_mellin_plancherel(f, double_mellin_config())?.defect())).collect::<Result<Vec<_>>>()?;
    Ok(vec![max_of(d).into()])
}

fn m_s_map() -> Result<Vec<Measured>> {
    let p = sec6_params()?;
    let cfg = QuadratureConfig::default();
    let mut worst = 0.0f64;
    for n in 0..3 {
        let v = integrate(
            |x| Ok(re(s_map(&p, |t| (-I * n as f64 * t).exp(), x).norm_sqr())),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &cfg,
            "S-map norm",
        )?;
        worst = worst.max((v.re - 2.0 * PI).abs() / (2.0 * PI));
    }
    Ok(vec![worst.into()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, defect: f64, pass: bool) -> CheckResult {
        CheckResult { id: id.into(), anchor: "a = b".into(), defect, tol: 1e-8, pass, ms: 3, note: None, error: None }
    }

    #[test]
    fn report_sorts_and_aggregates() {
        let r = SuiteReport::new("x", vec![row("b", 1e-9, true), row("a", 1e-3, false)]);
        assert_eq!(r.checks[0].id, "a");
        assert!(!r.pass);
        assert!(SuiteReport::new("x", vec![row("a", 0.0, true)]).pass);
        assert!(SuiteReport::new("x", vec![]).pass);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let mut c = row("a", 0.1 + 0.2, true);
        c.note = Some("n".into());
        let r = SuiteReport::new("x", vec![c, row("b", f64::MAX, false)]);
        let back = SuiteReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(v["checks"][1].get("error").is_none());
        assert!(v["checks"][0].get("ms").is_some());
    }

    #[test]
    fn unknown_suite_is_a_usage_error() {
        assert!(matches!(run_suite("nope", &Tolerances::default()), Err(Error::Usage(_))));
        assert!(matches!(run_checks(&["nope.x"], &Tolerances::default()), Err(Error::Usage(_))));
    }

    #[test]
    fn ids_are_unique_and_prefixed() {
        let all = check_ids("all").unwrap();
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        for s in SUITES.iter().filter(|s| **s != "all") {
            for id in check_ids(s).unwrap() {
                assert!(id.starts_with(&format!("{s}.")), "{id}");
            }
        }
        assert!(check_ids("as_written").unwrap().iter().all(|id| !all.contains(id)));
    }

    #[test]
    fn tolerance_precedence() {
        let mut t = Tolerances::default();
        assert_eq!(t.resolve("a", 1.0), 1.0);
        t.global = Some(2.0);
        assert_eq!(t.resolve("a", 1.0), 2.0);
        t.per_check.insert("a".into(), 3.0);
        assert_eq!(t.resolve("a", 1.0), 3.0);
        assert_eq!(t.resolve("b", 1.0), 2.0);
    }

    #[test]
    fn fast_groups_pass() {
        let ids = ["specfun.gamma_recurrence", "specfun.k_recurrence", "symmetry.mp", "polynomials.eigen_wilson"];
        for r in run_checks(&ids, &Tolerances::default()).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn failures_and_errors_are_flagged() {
        let t = Tolerances { global: Some(0.0), ..Default::default() };
        let r = run_checks(&["specfun.gamma_recurrence"], &t).unwrap();
        assert!(r[0].pass == (r[0].defect == 0.0));
        let g = Group { items: vec![Item { id: "x.y", anchor: "", tol: 1.0 }], run: || Err(Error::Domain("boom".into())) };
        let rows = run_groups(vec![g], &Tolerances::default());
        assert!(!rows[0].pass);
        assert_eq!(rows[0].defect, f64::MAX);
        assert!(rows[0].error.as_deref().unwrap().contains("boom"));
    }
}
