//! Python bindings for `imdiff`: special functions, weights and operators,
//! the polynomial families, the index transforms, the Δ-family and the
//! verification suites.
//!
//! Numerical failures raise `imdiff.ImdiffError`; invalid parameters raise
//! `ValueError` and I/O failures `OSError`.  Heavy calls release the GIL, and
//! Python callables wrapped as `RealFunction` reacquire it per evaluation.

use imdiff::extensions::{self, ExtensionParams as CoreParams, PsiForm};
use imdiff::polynomials::PolynomialFamily as CoreFamily;
use imdiff::quadrature::{QuadratureConfig, StripFunction};
use imdiff::transforms::{
    self, double_mellin_config, double_mellin_plancherel, KontorovichLebedev, RealFunction as CoreFunction, TransformConfig,
    TransformPair, Vilenkin, Wimp,
};
use imdiff::verify::{self, SuiteReport, Tolerances};
use imdiff::weights_ops::{make_operator, WeightSpec as CoreSpec};
use imdiff::{specfun, Error};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;
use std::cell::RefCell;
use std::collections::BTreeMap;

create_exception!(imdiff, ImdiffError, PyException, "A numerical failure inside imdiff.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Parameter(_) | Error::Usage(_) | Error::Pole(_) | Error::Window(_) | Error::Strip(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => ImdiffError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for imdiff::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

#[pyfunction]
fn gamma(z: Complex64) -> PyResult<Complex64> {
    specfun::gamma(z).py()
}

#[pyfunction]
fn log_gamma(z: Complex64) -> PyResult<Complex64> {
    specfun::log_gamma(z).py()
}

#[pyfunction]
fn pochhammer(a: Complex64, n: usize) -> Complex64 {
    specfun::pochhammer(a, n)
}

#[pyfunction]
fn hyp_pfq(a: Vec<Complex64>, b: Vec<Complex64>, z: Complex64) -> PyResult<Complex64> {
    specfun::hyp_pfq(&a, &b, z).py()
}

/// ₂F₁(a, b; c; z), continued along the straight path from 0 outside the disk.
#[pyfunction]
fn hyp2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> PyResult<Complex64> {
    specfun::hyp2f1(a, b, c, z).py()
}

/// K_ν(x) for x > 0.
#[pyfunction]
fn macdonald_k(nu: Complex64, x: f64) -> PyResult<Complex64> {
    specfun::macdonald_k(nu, x).py()
}

/// W_{ρ,σ}(x) for x > 0.
#[pyfunction]
fn whittaker_w(rho: f64, sigma: Complex64, x: f64) -> PyResult<Complex64> {
    specfun::whittaker_w(rho, sigma, x).py()
}

/// Gamma-quotient weight w(s) = (1/2π) e^{2cs} |∏Γ(a_k+is) / ∏Γ(b_l+is)|² and
/// the difference operator it makes symmetric.
#[pyclass(module = "imdiff", frozen)]
struct WeightSpec {
    inner: CoreSpec,
}

#[pymethods]
impl WeightSpec {
    #[new]
    #[pyo3(signature = (c, a, b = Vec::new()))]
    fn new(c: f64, a: Vec<Complex64>, b: Vec<Complex64>) -> Self {
        Self { inner: CoreSpec::new(c, &a, &b) }
    }

    fn weight(&self, s: f64) -> PyResult<f64> {
        self.inner.weight(s).py()
    }

    fn mu(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.mu(s).py()
    }

    fn nu(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.nu(s).py()
    }

    fn coeff_a(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.coeff_a(s).py()
    }

    fn coeff_b(&self, s: Complex64) -> PyResult<Complex64> {
        self.inner.coeff_b(s).py()
    }

    /// (𝓛f)(s) for a Python callable f of one complex argument.
    fn apply(&self, py: Python<'_>, f: Py<PyAny>, s: Complex64) -> PyResult<Complex64> {
        let op = make_operator(&self.inner);
        let failure = RefCell::new(None);
        let v = op.apply_fn(
            |z| {
                f.call1(py, (z,)).and_then(|v| v.extract::<Complex64>(py)).map_err(|e| {
                    let msg = e.to_string();
                    *failure.borrow_mut() = Some(e);
                    Error::Domain(msg)
                })
            },
            s,
        );
        match failure.into_inner() {
            Some(e) => Err(e),
            None => v.py(),
        }
    }
}

#[pyclass(module = "imdiff", frozen)]
struct PolynomialFamily {
    inner: CoreFamily,
}

#[pymethods]
impl PolynomialFamily {
    #[staticmethod]
    fn meixner_pollaczek(a: f64, phi: f64) -> PyResult<Self> {
        Ok(Self { inner: CoreFamily::meixner_pollaczek(a, phi).py()? })
    }

    #[staticmethod]
    fn continuous_hahn(a: Complex64, b: Complex64) -> PyResult<Self> {
        Ok(Self { inner: CoreFamily::continuous_hahn(a, b).py()? })
    }

    #[staticmethod]
    fn continuous_dual_hahn(a: Complex64, b: Complex64, c: Complex64) -> PyResult<Self> {
        Ok(Self { inner: CoreFamily::continuous_dual_hahn(a, b, c).py()? })
    }

    #[staticmethod]
    fn wilson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> PyResult<Self> {
        Ok(Self { inner: CoreFamily::wilson(a, b, c, d).py()? })
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn eval(&self, n: usize, s: Complex64) -> PyResult<Complex64> {
        self.inner.eval(n, s).py()
    }

    fn eigenvalue(&self, n: usize) -> f64 {
        self.inner.eigenvalue(n)
    }

    /// max |𝓛p_n − λ_n p_n| / scale over the standard sample points.
    fn eigen_defect(&self, n: usize) -> PyResult<f64> {
        self.inner.relative_eigen_defect(n, &imdiff::polynomials::eigen_samples()).py()
    }

    /// Gram matrix ⟨p_m, p_n⟩_w for m, n < size.
    fn gram_matrix(&self, py: Python<'_>, size: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let inner = &self.inner;
        let g = py.detach(|| inner.gram_matrix(size, &QuadratureConfig::default())).py()?;
        Ok(g.entries)
    }
}

/// A function of one real variable: a Python callable or a battery member.
#[pyclass(module = "imdiff", frozen, from_py_object)]
#[derive(Clone)]
struct RealFunction {
    inner: CoreFunction,
}

#[pymethods]
impl RealFunction {
    /// Wraps `f(x: float) -> complex`.
    #[new]
    #[pyo3(signature = (f, name = "python"))]
    fn new(f: Py<PyAny>, name: &str) -> Self {
        let inner = CoreFunction::new(name, move |x| {
            Python::attach(|py| f.call1(py, (x,)).and_then(|v| v.extract::<Complex64>(py)).map_err(|e| Error::Domain(e.to_string())))
        });
        Self { inner }
    }

    /// Members of a named battery (`half_line_default`, `half_line_weighted`,
    /// `vilenkin_default`, `line_gaussian`, `zero`).
    #[staticmethod]
    fn battery(id: &str) -> PyResult<Vec<RealFunction>> {
        Ok(imdiff::cli::battery(id).py()?.into_iter().map(|inner| RealFunction { inner }).collect())
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    fn __call__(&self, py: Python<'_>, x: f64) -> PyResult<Complex64> {
        let f = &self.inner;
        py.detach(|| f.eval(x)).py()
    }
}

/// A transform image, evaluated lazily and cached per point.
#[pyclass(module = "imdiff", frozen)]
struct Spectrum {
    inner: StripFunction,
}

#[pymethods]
impl Spectrum {
    fn __call__(&self, py: Python<'_>, s: Complex64) -> PyResult<Complex64> {
        let f = &self.inner;
        py.detach(|| f.eval(s)).py()
    }
}

enum Kind {
    Kl(KontorovichLebedev),
    Wimp(Wimp),
    Vilenkin(Vilenkin),
}

/// Kontorovich–Lebedev, Wimp or Vilenkin transform.
#[pyclass(module = "imdiff", frozen)]
struct Transform {
    kind: Kind,
}

impl Transform {
    fn pair(&self) -> &dyn TransformPair {
        match &self.kind {
            Kind::Kl(t) => t,
            Kind::Wimp(t) => t,
            Kind::Vilenkin(t) => t,
        }
    }
}

fn with_cutoff(mut cfg: TransformConfig, cutoff: Option<f64>) -> TransformConfig {
    if let Some(c) = cutoff {
        cfg.spectral_cutoff = c;
    }
    cfg
}

#[pymethods]
impl Transform {
    #[staticmethod]
    #[pyo3(signature = (cutoff = None))]
    fn kl(cutoff: Option<f64>) -> Self {
        Self { kind: Kind::Kl(KontorovichLebedev::new(with_cutoff(TransformConfig::index_transform(), cutoff))) }
    }

    #[staticmethod]
    #[pyo3(signature = (rho, cutoff = None))]
    fn wimp(rho: f64, cutoff: Option<f64>) -> PyResult<Self> {
        Ok(Self { kind: Kind::Wimp(Wimp::new(rho, with_cutoff(TransformConfig::index_transform(), cutoff)).py()?) })
    }

    #[staticmethod]
    #[pyo3(signature = (alpha, phi, cutoff = None))]
    fn vilenkin(alpha: f64, phi: f64, cutoff: Option<f64>) -> PyResult<Self> {
        Ok(Self { kind: Kind::Vilenkin(Vilenkin::new(alpha, phi, with_cutoff(TransformConfig::vilenkin(), cutoff)).py()?) })
    }

    #[getter]
    fn name(&self) -> String {
        self.pair().name()
    }

    fn forward(&self, g: &RealFunction) -> Spectrum {
        Spectrum { inner: self.pair().forward(&g.inner) }
    }

    fn inverse(&self, py: Python<'_>, f: &Spectrum, x: f64) -> PyResult<Complex64> {
        let pair = self.pair();
        let f = &f.inner;
        py.detach(|| pair.inverse_at(f, x)).py()
    }

    /// Plancherel sides and round-trip RMS as a dict.
    #[pyo3(signature = (g, round_trip = true))]
    fn unitarity(&self, py: Python<'_>, g: &RealFunction, round_trip: bool) -> PyResult<BTreeMap<&'static str, f64>> {
        let pair = self.pair();
        let g = &g.inner;
        let r = py.detach(|| transforms::unitarity(pair, g, round_trip)).py()?;
        Ok(BTreeMap::from([
            ("source_norm_sq", r.source_norm_sq),
            ("target_norm_sq", r.target_norm_sq),
            ("plancherel_defect", r.plancherel_defect),
            ("round_trip_rms", r.round_trip_rms),
        ]))
    }
}

/// (∫|f|², (1/2π)(∫|g₁|² + ∫|g₂|²e^{2πs})) for f on the whole line.
#[pyfunction]
fn double_mellin_norms(py: Python<'_>, f: &RealFunction) -> PyResult<(f64, f64)> {
    let f = &f.inner;
    let p = py.detach(|| double_mellin_plancherel(f, double_mellin_config())).py()?;
    Ok((p.source, p.target))
}

/// τ, σ, φ of the Δ-family.
#[pyclass(module = "imdiff", frozen)]
struct ExtensionParams {
    inner: CoreParams,
}

#[pymethods]
impl ExtensionParams {
    #[new]
    fn new(tau: f64, sigma: f64, phi: f64) -> PyResult<Self> {
        Ok(Self { inner: CoreParams::new(tau, sigma, phi).py()? })
    }

    fn delta(&self, shift: f64, x: f64) -> Complex64 {
        extensions::delta_eval(&self.inner, shift, x)
    }

    fn eigenvalue(&self, n: i32) -> f64 {
        self.inner.eigenvalue(n)
    }

    /// |DΔ − λΔ| / |Δ| at x.
    fn d_residual(&self, shift: f64, x: f64) -> PyResult<f64> {
        extensions::d_eigen_residual(&self.inner, shift, x, true).py()
    }

    /// The double Mellin image pair of Δ_{σ+n} at s.
    fn psi(&self, n: i32, s: Complex64) -> PyResult<(Complex64, Complex64)> {
        extensions::psi_form_eval(&self.inner, n, s, PsiForm::DeltaImage).py()
    }
}

#[pyclass(module = "imdiff", frozen, get_all)]
struct CheckResult {
    id: String,
    anchor: String,
    defect: f64,
    tol: f64,
    passed: bool,
    ms: u64,
    note: Option<String>,
    error: Option<String>,
}

#[pyclass(module = "imdiff", frozen)]
struct Report {
    inner: SuiteReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn suite(&self) -> String {
        self.inner.suite.clone()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.pass
    }

    #[getter]
    fn checks(&self) -> Vec<CheckResult> {
        self.inner
            .checks
            .iter()
            .map(|c| CheckResult {
                id: c.id.clone(),
                anchor: c.anchor.clone(),
                defect: c.defect,
                tol: c.tol,
                passed: c.pass,
                ms: c.ms,
                note: c.note.clone(),
                error: c.error.clone(),
            })
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __str__(&self) -> String {
        self.inner.render_text()
    }
}

/// Runs a verification suite; `tol` overrides every default tolerance.
#[pyfunction]
#[pyo3(signature = (suite, tol = None, timings = true))]
fn run_suite(py: Python<'_>, suite: &str, tol: Option<f64>, timings: bool) -> PyResult<Report> {
    let tols = Tolerances { global: tol, ..Tolerances::default() };
    let r = py.detach(|| verify::run_suite(suite, &tols)).py()?;
    Ok(Report { inner: if timings { r } else { r.without_timings() } })
}

#[pyfunction]
fn check_ids(suite: &str) -> PyResult<Vec<&'static str>> {
    verify::check_ids(suite).py()
}

#[pymodule]
#[pyo3(name = "imdiff")]
fn imdiff_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ImdiffError", m.py().get_type::<ImdiffError>())?;
    m.add("SUITES", verify::SUITES.to_vec())?;
    for f in [
        wrap_pyfunction!(gamma, m)?,
        wrap_pyfunction!(log_gamma, m)?,
        wrap_pyfunction!(pochhammer, m)?,
        wrap_pyfunction!(hyp_pfq, m)?,
        wrap_pyfunction!(hyp2f1, m)?,
        wrap_pyfunction!(macdonald_k, m)?,
        wrap_pyfunction!(whittaker_w, m)?,
        wrap_pyfunction!(double_mellin_norms, m)?,
        wrap_pyfunction!(run_suite, m)?,
        wrap_pyfunction!(check_ids, m)?,
    ] {
        m.add_function(f)?;
    }
    m.add_class::<WeightSpec>()?;
    m.add_class::<PolynomialFamily>()?;
    m.add_class::<RealFunction>()?;
    m.add_class::<Spectrum>()?;
    m.add_class::<Transform>()?;
    m.add_class::<ExtensionParams>()?;
    m.add_class::<CheckResult>()?;
    m.add_class::<Report>()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_python_exceptions() {
        Python::initialize();
        Python::attach(|py| {
            assert!(to_py(Error::Parameter("x".into())).is_instance_of::<PyValueError>(py));
            assert!(to_py(Error::Io("x".into())).is_instance_of::<PyOSError>(py));
            assert!(to_py(Error::Tolerance("x".into())).is_instance_of::<ImdiffError>(py));
        });
    }

    #[test]
    fn bindings_forward_to_the_core() {
        let z = Complex64::new(1.0, 2.0);
        assert_eq!(gamma(z).unwrap(), specfun::gamma(z).unwrap());
    }
}
