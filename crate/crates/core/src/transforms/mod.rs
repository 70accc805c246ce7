//! Index transforms that diagonalise the difference operators: Mellin,
//! Kontorovich–Lebedev, Wimp and Vilenkin, the J_α Mellin twist and the
//! double Mellin transform.
//!
//! Forward transforms return [`StripFunction`]s whose evaluation runs a fresh
//! quadrature, memoised per point, so operators can be applied at s ± i
//! without interpolation.  Inverse transforms are evaluated pointwise.

pub mod csv_io;
pub mod double_mellin;
pub mod kl;
pub mod mellin;
pub mod vilenkin;
pub mod wimp;

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{quad_estimate, Estimate, QuadratureConfig, StripFunction};
use crate::weights_ops::DifferenceOperator;
use crate::C64;

pub use csv_io::{interpolate, read_samples, write_samples, Sample};
pub use double_mellin::{
    double_mellin_config, double_mellin_forward, double_mellin_inverse, double_mellin_plancherel,
    DoubleMellin, PlancherelSides,
};
pub use kl::KontorovichLebedev;
pub use mellin::{
    mellin_forward, mellin_inverse, mellin_pair_forward_kernel, mellin_pair_inverse_kernel, Window,
};
pub use vilenkin::{j_alpha_forward, j_alpha_inverse, jtj_route, KernelMeasure, Vilenkin};
pub use wimp::Wimp;

type RealEval = dyn Fn(f64) -> Result<C64> + Send + Sync;

/// A function of one real variable (a half-line or line source function).
#[derive(Clone)]
pub struct RealFunction {
    pub name: String,
    f: Arc<RealEval>,
}

impl std::fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFunction")
            .field("name", &self.name)
            .finish()
    }
}

impl RealFunction {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> Result<C64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| Ok(C64::new(0.0, 0.0)))
    }

    pub fn eval(&self, x: f64) -> Result<C64> {
        (self.f)(x)
    }

    /// x ↦ m(x)·f(x).
    pub fn times(&self, name: &str, m: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        let f = self.f.clone();
        Self::new(format!("{name}*{}", self.name), move |x| Ok(m(x) * f(x)?))
    }
}

/// Quadrature settings shared by the transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformConfig {
    pub quad: QuadratureConfig,
    /// Upper limit of the spectral integrals in the inverse transforms.
    pub spectral_cutoff: f64,
}

impl TransformConfig {
    /// Settings for the Vilenkin transform, whose images decay only like a
    /// power: an absolute quadrature floor keeps far-out values cheap, and the
    /// cutoff is where the geometric panels end and the tail fit begins.
    pub fn vilenkin() -> Self {
        Self {
            quad: QuadratureConfig {
                abs_tol: 1e-12,
                rel_tol: 1e-11,
                max_levels: 9,
                truncation_radius: None,
            },
            spectral_cutoff: 240.0,
        }
    }
}

impl TransformConfig {
    /// Settings for the Kontorovich–Lebedev and Wimp transforms: |𝔎g|²w for
    /// e^{−x/2−2/x} still decays only like e^{−1.1s} near s = 20.  Their
    /// spectral integrals use panels of width 2.
    pub fn index_transform() -> Self {
        Self {
            spectral_cutoff: 30.0,
            ..Self::default()
        }
    }
}

/// Spectral panel width for the Kontorovich–Lebedev and Wimp integrals; the
/// kernels' phase in s advances by ln(2s/x) per unit, so 24 nodes over two
/// units still resolve it on the source grids.
pub(crate) const INDEX_PANEL: f64 = 2.0;

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig {
                abs_tol: 1e-15,
                rel_tol: 1e-11,
                max_levels: 9,
                truncation_radius: None,
            },
            spectral_cutoff: 14.0,
        }
    }
}

/// Accepts a quadrature estimate that met its tolerance or whose error is
/// still small in absolute and relative terms.
pub(crate) fn settle(est: Estimate, what: &str) -> Result<C64> {
    if est.converged || est.error <= 1e-9 * est.value.norm() || est.error <= 1e-13 {
        Ok(est.value)
    } else {
        Err(Error::Tolerance(format!(
            "{what}: value {} with error {:.2e}",
            est.value, est.error
        )))
    }
}

/// Composite 24-point Gauss–Legendre over unit-width panels of [a, b],
/// evaluated in parallel.  Used for the spectral integrals, whose integrands
/// are smooth but costly (every node is itself a quadrature).
pub(crate) fn spectral_integral(
    h: impl Fn(f64) -> Result<C64> + Sync,
    a: f64,
    b: f64,
) -> Result<C64> {
    wide_spectral_integral(h, a, b, 1.0)
}

/// As [`spectral_integral`] with panels of about `width`.
pub(crate) fn wide_spectral_integral(
    h: impl Fn(f64) -> Result<C64> + Sync,
    a: f64,
    b: f64,
    width: f64,
) -> Result<C64> {
    let parts: Vec<C64> = panel_rule(a, b, width)
        .par_iter()
        .map(|&(x, w)| Ok(h(x)? * w))
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().sum())
}

/// As [`spectral_integral`] on [a, b], 0 < a < b, with panels growing by the
/// factor `ratio`; for slowly decaying tails.
pub(crate) fn geometric_integral(
    h: impl Fn(f64) -> Result<C64> + Sync,
    a: f64,
    b: f64,
    ratio: f64,
) -> Result<C64> {
    let panels = (((b / a).ln() / ratio.ln()).ceil() as usize).max(1);
    let r = (b / a).powf(1.0 / panels as f64);
    let edges: Vec<f64> = (0..=panels).map(|k| a * r.powi(k as i32)).collect();
    panel_sum(&h, &edges)
}

fn panel_sum(h: &(impl Fn(f64) -> Result<C64> + Sync), edges: &[f64]) -> Result<C64> {
    let parts: Vec<C64> = panel_nodes(edges)
        .par_iter()
        .map(|&(x, w)| Ok(h(x)? * w))
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().sum())
}

/// Nodes and weights of the unit-panel rule used by [`spectral_integral`].
pub(crate) fn spectral_nodes(a: f64, b: f64) -> Vec<(f64, f64)> {
    panel_rule(a, b, 1.0)
}

fn panel_rule(a: f64, b: f64, width: f64) -> Vec<(f64, f64)> {
    let panels = (((b - a) / width).ceil() as usize).max(1);
    let width = (b - a) / panels as f64;
    let edges: Vec<f64> = (0..=panels).map(|k| a + k as f64 * width).collect();
    panel_nodes(&edges)
}

fn panel_nodes(edges: &[f64]) -> Vec<(f64, f64)> {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let rule = RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(24).expect("nonzero")));
    edges
        .windows(2)
        .flat_map(|e| {
            let (lo, width) = (e[0], e[1] - e[0]);
            rule.iter()
                .map(move |(x, w)| (lo + 0.5 * width * (x + 1.0), 0.5 * width * w))
        })
        .collect()
}

/// The quadrature settings with the absolute floor scaled by e^{−π|Re s|/2}, the
/// size of the K_{is} and W_{ρ,is} kernels; the spectral weights grow like
/// e^{π|s|}, so forward values must be resolved relative to that size.
pub(crate) fn kernel_scaled(q: &QuadratureConfig, s: C64) -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: (q.abs_tol * (-std::f64::consts::FRAC_PI_2 * s.re.abs()).exp()).max(1e-300),
        ..*q
    }
}

pub(crate) fn integrate(
    f: impl Fn(f64) -> Result<C64> + Sync,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
    what: &str,
) -> Result<C64> {
    settle(quad_estimate(f, a, b, cfg)?, what)
}

/// Wraps a strip function with a per-point cache.
pub fn memoize(f: StripFunction) -> StripFunction {
    let cache: Arc<Mutex<HashMap<(u64, u64), C64>>> = Arc::new(Mutex::new(HashMap::new()));
    let g = f.clone();
    StripFunction::new(
        move |s: C64| {
            let key = (s.re.to_bits(), s.im.to_bits());
            if let Some(v) = cache.lock().expect("cache poisoned").get(&key) {
                return Ok(*v);
            }
            let v = g.eval(s)?;
            cache.lock().expect("cache poisoned").insert(key, v);
            Ok(v)
        },
        f.half_width,
        f.decay,
    )
    .with_symmetry(f.symmetry)
}

/// A unitary transform together with the operators it intertwines: the
/// multiplication operator on the source side and the difference operator on
/// the spectral side.
pub trait TransformPair: Send + Sync {
    fn name(&self) -> String;
    fn forward(&self, g: &RealFunction) -> StripFunction;
    fn inverse_at(&self, f: &StripFunction, x: f64) -> Result<C64>;
    /// ‖g‖² in the source space.
    fn source_norm_sq(&self, g: &RealFunction) -> Result<f64>;
    /// ‖f‖² in the spectral space.
    fn target_norm_sq(&self, f: &StripFunction) -> Result<f64>;
    /// The source-side multiplication operator applied to g.
    fn source_multiplication(&self, g: &RealFunction) -> RealFunction;
    fn target_operator(&self) -> DifferenceOperator;
    /// Source-space density at x (1/x for dx/x and so on).
    fn source_weight(&self, x: f64) -> Result<f64>;
    /// Source points used for round-trip comparison.
    fn source_grid(&self) -> Vec<f64>;
    /// Spectral points used for intertwining checks.
    fn spectral_grid(&self) -> Vec<f64>;
}

/// One battery member's unitarity figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitarityReport {
    pub function: String,
    pub source_norm_sq: f64,
    pub target_norm_sq: f64,
    /// |target − source| / source.
    pub plancherel_defect: f64,
    /// Weighted RMS of inverse(forward g) − g on the source grid, relative to
    /// that of g; the weights are the source density at the grid points.
    pub round_trip_rms: f64,
}

pub fn unitarity(
    pair: &dyn TransformPair,
    g: &RealFunction,
    round_trip: bool,
) -> Result<UnitarityReport> {
    let f = pair.forward(g);
    let src = pair.source_norm_sq(g)?;
    let tgt = pair.target_norm_sq(&f)?;
    let round_trip_rms = if round_trip {
        let grid = pair.source_grid();
        let diffs: Vec<(f64, f64)> = grid
            .par_iter()
            .map(|&x| {
                let want = g.eval(x)?;
                let got = pair.inverse_at(&f, x)?;
                let w = pair.source_weight(x)?;
                Ok(((got - want).norm_sqr() * w, want.norm_sqr() * w))
            })
            .collect::<Result<_>>()?;
        let num: f64 = diffs.iter().map(|d| d.0).sum();
        let den: f64 = diffs.iter().map(|d| d.1).sum();
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    } else {
        f64::NAN
    };
    let plancherel_defect = if src == 0.0 {
        tgt.abs()
    } else {
        (tgt - src).abs() / src
    };
    Ok(UnitarityReport {
        function: g.name.clone(),
        source_norm_sq: src,
        target_norm_sq: tgt,
        plancherel_defect,
        round_trip_rms,
    })
}

/// max over the battery and spectral grid of
/// |target_op(forward g)(s) − forward(source_multiplication g)(s)|.
pub fn intertwining_defect(
    pair: &dyn TransformPair,
    battery: &[RealFunction],
    grid: &[f64],
) -> Result<f64> {
    let op = pair.target_operator();
    let mut worst = 0.0f64;
    for g in battery {
        let fg = pair.forward(g);
        let fpg = pair.forward(&pair.source_multiplication(g));
        let d: Vec<f64> = grid
            .par_iter()
            .map(|&s| {
                let s = C64::new(s, 0.0);
                Ok((op.apply(&fg, s)? - fpg.eval(s)?).norm())
            })
            .collect::<Result<_>>()?;
        worst = d.into_iter().fold(worst, f64::max);
    }
    Ok(worst)
}

/// e^{−x/λ − λ/x} for λ ∈ {1, 2, 1/2}.
pub fn half_line_battery() -> Vec<RealFunction> {
    [1.0, 2.0, 0.5]
        .iter()
        .map(|&l: &f64| {
            RealFunction::new(format!("exp(-x/{l}-{l}/x)"), move |x: f64| {
                Ok(C64::new((-x / l - l / x).exp(), 0.0))
            })
        })
        .collect()
}

/// x^{3/2}e^{−x−1/x}, the member used for the K–W reduction check.
pub fn half_line_weighted() -> RealFunction {
    RealFunction::new("x^1.5*exp(-x-1/x)", |x: f64| {
        Ok(C64::new(x.powf(1.5) * (-x - 1.0 / x).exp(), 0.0))
    })
}

/// Gaussian family on the line: e^{−s²}, s·e^{−s²}, s²·e^{−s²}.
pub fn gaussian_battery() -> Vec<StripFunction> {
    vec![
        StripFunction::entire(|s| Ok((-s * s).exp())),
        StripFunction::entire(|s| Ok(s * (-s * s).exp())),
        StripFunction::entire(|s| Ok(s * s * (-s * s).exp())),
    ]
}

/// Line battery e^{−s²−πs/2}·{1, s} for the Vilenkin transform.
pub fn vilenkin_battery() -> Vec<RealFunction> {
    let h = std::f64::consts::FRAC_PI_2;
    vec![
        RealFunction::new("exp(-s^2-pi s/2)", move |s: f64| {
            Ok(C64::new((-s * s - h * s).exp(), 0.0))
        }),
        RealFunction::new("(s-0.3)exp(-s^2-pi s/2)", move |s: f64| {
            Ok(C64::new((s - 0.3) * (-s * s - h * s).exp(), 0.0))
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn memo_evaluates_once() {
        let count = Arc::new(AtomicUsize::new(0));
        let c = count.clone();
        let f = memoize(StripFunction::entire(move |s| {
            c.fetch_add(1, Ordering::SeqCst);
            Ok(s * 2.0)
        }));
        for _ in 0..3 {
            assert_eq!(f.eval(C64::new(0.5, 0.1)).unwrap(), C64::new(1.0, 0.2));
        }
        assert_eq!(count.load(Ordering::SeqCst), 1);
    }
}
