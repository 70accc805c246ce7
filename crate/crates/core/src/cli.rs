//! The `imdiff` command line: `eval`, `transform`, `verify` and `table`.
//!
//! Exit codes: 0 success or passing suite, 1 failing suite or numeric
//! failure of the whole command, 2 usage error, 3 I/O error.  Every number
//! is written with 17 significant digits.
//!
//! A configuration file (`--config FILE`) holds `key = value` lines; `#`
//! starts a comment.  Flags given on the command line win over the file.
//! Recognised keys:
//!
//! | key | used by | meaning |
//! |-----|---------|---------|
//! | `tol` | verify | tolerance for every check |
//! | `tol.<check id>` | verify | tolerance for one check |
//! | `format` | verify | `json` or `text` |
//! | `no_timings` | verify | `true` writes 0 for every runtime |
//! | `battery`, `member` | transform | named input function |
//! | `grid` | transform | evaluation grid |
//! | `direction` | transform | `forward`, `inverse` or `round-trip` |
//! | `rho`, `alpha`, `phi`, `cutoff`, `im` | transform | transform parameters |

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::extensions::{delta_eval, delta_gram, psi_cutoff, psi_grams, ExtensionParams, Gram};
use crate::polynomials::{eigen_samples, PolynomialFamily};
use crate::quadrature::{DecayClass, QuadratureConfig, StripFunction};
use crate::specfun::bessel::{macdonald_k_series, series_limit};
use crate::specfun::gamma::gamma;
use crate::specfun::hyper::hyp2f1;
use crate::specfun::{macdonald_k, whittaker_w};
use crate::transforms::csv_io::{fmt17, interpolate, read_samples, HEADER};
use crate::transforms::{
    double_mellin_config, double_mellin_forward, double_mellin_inverse, half_line_battery, half_line_weighted,
    mellin_forward, mellin_inverse, vilenkin_battery, DoubleMellin, KontorovichLebedev, RealFunction, TransformConfig,
    TransformPair, Vilenkin, Wimp, Window,
};
use crate::verify::{run_suite, Tolerances};
use crate::{c64, C64};

#[derive(Parser, Debug)]
#[command(name = "imdiff", version, about = "Difference operators, index transforms and their numerical checks")]
struct Cli {
    /// Key-value configuration file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate a special function at a list of points, as CSV.
    Eval(EvalArgs),
    /// Sample a transform of a named battery function or a CSV input.
    Transform(TransformArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Gram and eigen-defect tables, as CSV.
    Table(TableArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FnName {
    Gamma,
    #[value(name = "2F1")]
    Hyp2f1,
    #[value(name = "K")]
    K,
    #[value(name = "W")]
    W,
    Delta,
    Polynomial,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyName {
    Mp,
    Hahn,
    DualHahn,
    Wilson,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    func: FnName,
    /// Complex points, comma separated (`1`, `0.5+2i`, `-3i`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Vec<String>,
    /// Real points, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Vec<f64>,
    /// Order of K.
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    rho: Option<f64>,
    /// Second index of W (complex), or the σ of delta (real).
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    /// Degree of the polynomial.
    #[arg(long)]
    n: Option<usize>,
    /// Integer shift of delta: Δ_{σ+shift}.
    #[arg(long, default_value_t = 0.0)]
    shift: f64,
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TransformName {
    Mellin,
    Kl,
    Wimp,
    Vilenkin,
    DoubleMellin,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
    RoundTrip,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct TransformArgs {
    #[arg(value_enum)]
    name: TransformName,
    #[arg(long, value_enum)]
    direction: Option<Direction>,
    /// Sampled input in the `s_re,s_im,f_re,f_im` format.
    #[arg(long, conflicts_with = "battery")]
    input: Option<PathBuf>,
    /// Second component g₂ for the inverse double Mellin transform.
    #[arg(long)]
    input2: Option<PathBuf>,
    /// Named input: half_line_default, half_line_weighted, vilenkin_default,
    /// line_gaussian or zero.
    #[arg(long)]
    battery: Option<String>,
    /// Index within the battery.
    #[arg(long)]
    member: Option<usize>,
    /// Grid points, comma separated; `a:b:n` expands to n equispaced points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    grid: Vec<String>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    /// Upper limit of the spectral integrals.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Imaginary part of the Mellin line.
    #[arg(long)]
    im: Option<f64>,
    /// Output component of the double Mellin transform (1 or 2).
    #[arg(long, default_value_t = 1)]
    component: u8,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: Option<String>,
    /// Tolerance for every check of the suite.
    #[arg(long)]
    tol: Option<f64>,
    /// Tolerance for one check, as `id=value`; repeatable.
    #[arg(long = "tol-check")]
    tol_check: Vec<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write 0 for every runtime, making the report byte-stable.
    #[arg(long)]
    no_timings: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TableKind {
    /// Gram matrix of a polynomial family.
    Gram,
    /// Relative eigen-defects of a polynomial family.
    Eigen,
    /// Gram matrix of the Δ basis.
    DeltaGram,
    /// Gram matrix of the Mellin images of the Δ basis.
    PsiGram,
    /// Gram matrix of the Ψ functions in their hypergeometric form.
    PsiGramHypergeometric,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct TableArgs {
    #[arg(value_enum)]
    kind: TableKind,
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Matrix size, or the largest degree + 1 for eigen tables.
    #[arg(long, default_value_t = 5)]
    size: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Parsed configuration file.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

const CONFIG_KEYS: [&str; 13] =
    ["tol", "format", "no_timings", "suite", "battery", "member", "grid", "direction", "rho", "alpha", "phi", "cutoff", "im"];

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("config line {}: expected key = value", k + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !(CONFIG_KEYS.contains(&key) || key.starts_with("tol.")) {
                return Err(Error::Usage(format!("config line {}: unknown key '{key}'", k + 1)));
            }
            entries.insert(key.to_string(), value.to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Usage(format!("config key '{key}': cannot parse '{v}'"))))
            .transpose()
    }

    /// Per-check tolerances from `tol.<id>` keys.
    fn check_tolerances(&self) -> Result<BTreeMap<String, f64>> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.entries {
            if let Some(id) = k.strip_prefix("tol.") {
                let t: f64 = v.parse().map_err(|_| Error::Usage(format!("config key '{k}': cannot parse '{v}'")))?;
                out.insert(id.to_string(), t);
            }
        }
        Ok(out)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        Error::Usage(_) | Error::Parameter(_) => 2,
        _ => 1,
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "imdiff: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.cmd {
        Cmd::Eval(a) => cmd_eval(a, out),
        Cmd::Transform(a) => cmd_transform(a, &cfg, out),
        Cmd::Verify(a) => cmd_verify(a, &cfg, out),
        Cmd::Table(a) => cmd_table(a, out),
    }
}

/// Runs `body` against the output file if given, else against `out`.
fn with_output(path: &Option<PathBuf>, out: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            body(&mut w)?;
            w.flush().map_err(Error::from)
        }
        None => body(out),
    }
}

pub fn parse_complex(s: &str) -> Result<C64> {
    let t = s.trim().replace('j', "i");
    C64::from_str(&t).map_err(|_| Error::Usage(format!("cannot parse '{s}' as a complex number")))
}

fn need<T>(v: Option<T>, flag: &str, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Usage(format!("{what} needs --{flag}")))
}

fn need_complex(v: &Option<String>, flag: &str, what: &str) -> Result<C64> {
    parse_complex(need(v.as_deref(), flag, what)?)
}

fn family_from(
    family: Option<FamilyName>,
    [a, b, c, d]: [&Option<String>; 4],
    phi: Option<f64>,
) -> Result<PolynomialFamily> {
    let w = "polynomial";
    match need(family, "family", w)? {
        FamilyName::Mp => {
            let a = need_complex(a, "a", w)?;
            if a.im != 0.0 {
                return Err(Error::Usage("Meixner-Pollaczek needs real --a".into()));
            }
            PolynomialFamily::meixner_pollaczek(a.re, need(phi, "phi", w)?)
        }
        FamilyName::Hahn => PolynomialFamily::continuous_hahn(need_complex(a, "a", w)?, need_complex(b, "b", w)?),
        FamilyName::DualHahn => {
            PolynomialFamily::continuous_dual_hahn(need_complex(a, "a", w)?, need_complex(b, "b", w)?, need_complex(c, "c", w)?)
        }
        FamilyName::Wilson => PolynomialFamily::wilson(
            need_complex(a, "a", w)?,
            need_complex(b, "b", w)?,
            need_complex(c, "c", w)?,
            need_complex(d, "d", w)?,
        ),
    }
}

type Evaluator = Box<dyn Fn(C64) -> Result<(C64, Option<f64>)>>;

fn real_point(z: C64) -> Result<f64> {
    if z.im != 0.0 {
        return Err(Error::Domain(format!("needs a real point, got {z}")));
    }
    Ok(z.re)
}

fn evaluator(a: &EvalArgs) -> Result<Evaluator> {
    Ok(match a.func {
        FnName::Gamma => Box::new(|z| Ok((gamma(z)?, None))),
        FnName::Hyp2f1 => {
            let w = "2F1";
            let (pa, pb, pc) = (need_complex(&a.a, "a", w)?, need_complex(&a.b, "b", w)?, need_complex(&a.c, "c", w)?);
            Box::new(move |z| Ok((hyp2f1(pa, pb, pc, z)?, None)))
        }
        FnName::K => {
            let nu = need_complex(&a.nu, "nu", "K")?;
            Box::new(move |z| {
                let x = real_point(z)?;
                let v = macdonald_k(nu, x)?;
                // the series and the integral route agree where both apply
                let est = if x > 0.0 && x <= series_limit(nu) {
                    macdonald_k_series(nu, x).ok().map(|s| (s - v).norm())
                } else {
                    None
                };
                Ok((v, est))
            })
        }
        FnName::W => {
            let rho = need(a.rho, "rho", "W")?;
            let sigma = need_complex(&a.sigma, "sigma", "W")?;
            Box::new(move |z| Ok((whittaker_w(rho, sigma, real_point(z)?)?, None)))
        }
        FnName::Delta => {
            let sigma = need_complex(&a.sigma, "sigma", "delta")?;
            if sigma.im != 0.0 {
                return Err(Error::Usage("delta needs real --sigma".into()));
            }
            let p = ExtensionParams::new(need(a.tau, "tau", "delta")?, sigma.re, need(a.phi, "phi", "delta")?)?;
            let shift = a.shift;
            Box::new(move |z| Ok((delta_eval(&p, shift, real_point(z)?), None)))
        }
        FnName::Polynomial => {
            let f = family_from(a.family, [&a.a, &a.b, &a.c, &a.d], a.phi)?;
            let n = need(a.n, "n", "polynomial")?;
            Box::new(move |z| Ok((f.eval(n, z)?, None)))
        }
    })
}

fn eval_points(a: &EvalArgs) -> Result<Vec<C64>> {
    let mut pts: Vec<C64> = a.at.iter().map(|s| parse_complex(s)).collect::<Result<_>>()?;
    pts.extend(a.x.iter().map(|&x| c64(x, 0.0)));
    if pts.is_empty() {
        return Err(Error::Usage("eval needs points via --at or --x".into()));
    }
    Ok(pts)
}

fn cmd_eval(a: EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let f = evaluator(&a)?;
    let pts = eval_points(&a)?;
    with_output(&a.output, out, |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["point_re", "point_im", "value_re", "value_im", "err_est", "status"])?;
        for z in pts {
            let row = match f(z) {
                Ok((v, est)) => {
                    [fmt17(z.re), fmt17(z.im), fmt17(v.re), fmt17(v.im), est.map(fmt17).unwrap_or_default(), "OK".into()]
                }
                Err(e) => [fmt17(z.re), fmt17(z.im), String::new(), String::new(), String::new(), format!("ERR {e}")],
            };
            wr.write_record(row)?;
        }
        wr.flush()?;
        Ok(())
    })?;
    Ok(0)
}

/// Expands grid tokens; `a:b:n` gives n equispaced points from a to b.
pub fn parse_grid(tokens: &[String]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for t in tokens {
        let t = t.trim();
        if t.is_empty() {
            continue;
        }
        if t.contains(':') {
            let parts: Vec<&str> = t.split(':').collect();
            let bad = || Error::Usage(format!("grid range '{t}' must be a:b:n with n >= 2"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let (a, b): (f64, f64) = (parts[0].parse().map_err(|_| bad())?, parts[1].parse().map_err(|_| bad())?);
            let n: usize = parts[2].parse().map_err(|_| bad())?;
            if n < 2 {
                return Err(bad());
            }
            out.extend((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64));
        } else {
            out.push(t.parse().map_err(|_| Error::Usage(format!("cannot parse grid point '{t}'")))?);
        }
    }
    if let Some(x) = out.iter().find(|x| !x.is_finite()) {
        return Err(Error::Usage(format!("grid point {x} is not finite")));
    }
    Ok(out)
}

pub fn battery(id: &str) -> Result<Vec<RealFunction>> {
    Ok(match id {
        "half_line_default" => half_line_battery(),
        "half_line_weighted" => vec![half_line_weighted()],
        "vilenkin_default" => vilenkin_battery(),
        "line_gaussian" => vec![
            RealFunction::new("exp(-x^2)", |x: f64| Ok(c64((-x * x).exp(), 0.0))),
            RealFunction::new("exp(-(x-0.7)^2)", |x: f64| Ok(c64((-(x - 0.7) * (x - 0.7)).exp(), 0.0))),
        ],
        "zero" => vec![RealFunction::zero()],
        other => return Err(Error::Usage(format!("unknown battery '{other}'"))),
    })
}

fn default_battery(name: TransformName) -> &'static str {
    match name {
        TransformName::Vilenkin => "vilenkin_default",
        TransformName::DoubleMellin => "line_gaussian",
        _ => "half_line_default",
    }
}

/// The resolved options of a transform run.
struct TransformSetup {
    name: TransformName,
    direction: Direction,
    rho: f64,
    alpha: f64,
    phi: f64,
    im: f64,
    tcfg: TransformConfig,
}

impl TransformSetup {
    fn pair(&self) -> Result<Box<dyn TransformPair>> {
        Ok(match self.name {
            TransformName::Kl => Box::new(KontorovichLebedev::new(self.tcfg)),
            TransformName::Wimp => Box::new(Wimp::new(self.rho, self.tcfg)?),
            TransformName::Vilenkin => Box::new(Vilenkin::new(self.alpha, self.phi, self.tcfg)?),
            _ => unreachable!("mellin transforms are handled separately"),
        })
    }
}

fn resolve_opt<T: FromStr>(flag: Option<T>, cfg: &Config, key: &str) -> Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.parsed(key),
    }
}

fn read_input(p: &Path) -> Result<RealFunction> {
    let f = File::open(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    let samples = read_samples(f)?;
    interpolate(&p.display().to_string(), &samples)
}

fn as_strip(f: RealFunction) -> StripFunction {
    StripFunction::new(move |s: C64| f.eval(s.re), 0.0, DecayClass::super_exponential())
}

fn cmd_transform(a: TransformArgs, cfg: &Config, out: &mut dyn Write) -> Result<i32> {
    let direction = match a.direction {
        Some(d) => d,
        None => match cfg.get("direction") {
            Some(v) => Direction::from_str(v, true).map_err(|_| Error::Usage(format!("unknown direction '{v}'")))?,
            None => Direction::Forward,
        },
    };
    let base = match a.name {
        TransformName::Vilenkin => TransformConfig::vilenkin(),
        TransformName::DoubleMellin => double_mellin_config(),
        TransformName::Kl | TransformName::Wimp => TransformConfig::index_transform(),
        TransformName::Mellin => TransformConfig::default(),
    };
    let mut tcfg = base;
    if let Some(c) = resolve_opt(a.cutoff, cfg, "cutoff")? {
        tcfg.spectral_cutoff = c;
    }
    if a.input.is_some() {
        // interpolated data limit the attainable accuracy
        tcfg.quad = QuadratureConfig { rel_tol: 1e-8, abs_tol: 1e-12, ..tcfg.quad };
    }
    let setup = TransformSetup {
        name: a.name,
        direction,
        rho: resolve_opt(a.rho, cfg, "rho")?.unwrap_or(0.2),
        alpha: resolve_opt(a.alpha, cfg, "alpha")?.unwrap_or(1.0),
        phi: resolve_opt(a.phi, cfg, "phi")?.unwrap_or(0.8),
        im: resolve_opt(a.im, cfg, "im")?.unwrap_or(0.0),
        tcfg,
    };
    let input = match &a.input {
        Some(p) => read_input(p)?,
        None => {
            let id = a.battery.clone().or_else(|| cfg.get("battery").map(String::from));
            let members = battery(id.as_deref().unwrap_or(default_battery(a.name)))?;
            let k = resolve_opt(a.member, cfg, "member")?.unwrap_or(0);
            members.get(k).cloned().ok_or_else(|| Error::Usage(format!("battery has {} members, asked for {k}", members.len())))?
        }
    };
    let grid_tokens = if a.grid.is_empty() {
        cfg.get("grid").map(|g| g.split(',').map(String::from).collect()).unwrap_or_default()
    } else {
        a.grid.clone()
    };
    let grid = parse_grid(&grid_tokens)?;
    if grid.is_empty() {
        return Err(Error::Usage("transform needs --grid".into()));
    }
    if !(a.component == 1 || a.component == 2) {
        return Err(Error::Usage("--component must be 1 or 2".into()));
    }
    let input2 = a.input2.as_deref().map(read_input).transpose()?;
    let rows = transform_rows(&setup, &input, input2, a.component, &grid)?;
    with_output(&a.output, out, |w| {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(HEADER)?;
        for (s, v) in rows {
            let (re, im) = match v {
                Ok(v) => (fmt17(v.re), fmt17(v.im)),
                Err(_) => ("ERR".to_string(), "ERR".to_string()),
            };
            wr.write_record([fmt17(s.re), fmt17(s.im), re, im])?;
        }
        wr.flush()?;
        Ok(())
    })?;
    Ok(0)
}

type Row = (C64, Result<C64>);

fn transform_rows(st: &TransformSetup, g: &RealFunction, g2: Option<RealFunction>, comp: u8, grid: &[f64]) -> Result<Vec<Row>> {
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let at = |s: f64| c64(s, st.im);
    Ok(match st.name {
        TransformName::Mellin => {
            let window = Window::from_powers(f64::INFINITY, f64::INFINITY);
            let fwd = || mellin_forward(g, window, (0.0, f64::INFINITY), st.tcfg);
            match st.direction {
                Direction::Forward => {
                    let m = fwd();
                    grid.iter().map(|&s| (at(s), m.eval(at(s)))).collect()
                }
                Direction::Inverse => {
                    let f = as_strip(g.clone());
                    grid.iter().map(|&x| (c64(x, 0.0), mellin_inverse(&f, x, st.im, st.tcfg))).collect()
                }
                Direction::RoundTrip => {
                    let m = fwd();
                    grid.iter().map(|&x| (c64(x, 0.0), mellin_inverse(&m, x, st.im, st.tcfg))).collect()
                }
            }
        }
        TransformName::DoubleMellin => {
            let pick = |d: &DoubleMellin| if comp == 1 { d.g1.clone() } else { d.g2.clone() };
            let whole = (f64::NEG_INFINITY, f64::INFINITY);
            match st.direction {
                Direction::Forward => {
                    let f = pick(&double_mellin_forward(g, whole, st.tcfg));
                    grid.iter().map(|&s| (c64(s, 0.0), f.eval(c64(s, 0.0)))).collect()
                }
                Direction::Inverse => {
                    let d = DoubleMellin {
                        g1: as_strip(g.clone()),
                        g2: as_strip(g2.unwrap_or_else(RealFunction::zero)),
                    };
                    grid.iter().map(|&x| (c64(x, 0.0), double_mellin_inverse(&d, x, st.tcfg))).collect()
                }
                Direction::RoundTrip => {
                    let d = double_mellin_forward(g, whole, st.tcfg);
                    grid.iter().map(|&x| (c64(x, 0.0), double_mellin_inverse(&d, x, st.tcfg))).collect()
                }
            }
        }
        _ => {
            let pair = st.pair()?;
            match st.direction {
                Direction::Forward => {
                    let f = pair.forward(g);
                    grid.iter().map(|&s| (c64(s, 0.0), f.eval(c64(s, 0.0)))).collect()
                }
                Direction::Inverse => {
                    let f = as_strip(g.clone());
                    grid.iter().map(|&x| (c64(x, 0.0), pair.inverse_at(&f, x))).collect()
                }
                Direction::RoundTrip => {
                    let f = pair.forward(g);
                    grid.iter().map(|&x| (c64(x, 0.0), pair.inverse_at(&f, x))).collect()
                }
            }
        }
    })
}

fn cmd_verify(a: VerifyArgs, cfg: &Config, out: &mut dyn Write) -> Result<i32> {
    let suite = a.suite.clone().or_else(|| cfg.get("suite").map(String::from)).ok_or_else(|| Error::Usage("verify needs --suite".into()))?;
    let mut per_check = cfg.check_tolerances()?;
    for t in &a.tol_check {
        let (id, v) = t.split_once('=').ok_or_else(|| Error::Usage(format!("--tol-check expects id=value, got '{t}'")))?;
        let v: f64 = v.parse().map_err(|_| Error::Usage(format!("cannot parse tolerance '{v}'")))?;
        per_check.insert(id.to_string(), v);
    }
    let global = resolve_opt(a.tol, cfg, "tol")?;
    if let Some(t) = global.iter().chain(per_check.values()).find(|t| !(**t >= 0.0)) {
        return Err(Error::Usage(format!("tolerance {t} must be nonnegative")));
    }
    let format = match a.format {
        Some(f) => f,
        None => match cfg.get("format") {
            Some(v) => Format::from_str(v, true).map_err(|_| Error::Usage(format!("unknown format '{v}'")))?,
            None => Format::Text,
        },
    };
    let no_timings = a.no_timings || resolve_opt(None::<bool>, cfg, "no_timings")?.unwrap_or(false);
    let mut report = run_suite(&suite, &Tolerances { global, per_check })?;
    if no_timings {
        report = report.without_timings();
    }
    with_output(&a.output, out, |w| {
        match format {
            Format::Json => writeln!(w, "{}", report.to_json())?,
            Format::Text => write!(w, "{}", report.render_text())?,
        }
        Ok(())
    })?;
    Ok(if report.pass { 0 } else { 1 })
}

fn write_gram(w: &mut dyn Write, g: &Gram) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["m", "n", "re", "im"])?;
    for (i, row) in g.entries.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            wr.write_record([g.labels[i].to_string(), g.labels[j].to_string(), fmt17(v.re), fmt17(v.im)])?;
        }
    }
    wr.flush()?;
    Ok(())
}

fn cmd_table(a: TableArgs, out: &mut dyn Write) -> Result<i32> {
    if a.size == 0 {
        return Err(Error::Usage("--size must be positive".into()));
    }
    let ext = || -> Result<ExtensionParams> {
        let w = "sec6 tables";
        ExtensionParams::new(need(a.tau, "tau", w)?, need(a.sigma, "sigma", w)?, need(a.phi, "phi", w)?)
    };
    let labels: Vec<i32> = (0..a.size as i32).collect();
    match a.kind {
        TableKind::Gram => {
            let f = family_from(a.family, [&a.a, &a.b, &a.c, &a.d], a.phi)?;
            let g = f.gram_matrix(a.size, &QuadratureConfig::default())?;
            with_output(&a.output, out, |w| g.write_csv(w))?;
        }
        TableKind::Eigen => {
            let f = family_from(a.family, [&a.a, &a.b, &a.c, &a.d], a.phi)?;
            let samples = eigen_samples();
            with_output(&a.output, out, |w| {
                let mut wr = csv::Writer::from_writer(w);
                wr.write_record(["n", "eigenvalue", "relative_defect"])?;
                for n in 0..a.size {
                    let d = f.relative_eigen_defect(n, &samples).map(fmt17).unwrap_or_else(|e| format!("ERR {e}"));
                    wr.write_record([n.to_string(), fmt17(f.eigenvalue(n)), d])?;
                }
                wr.flush()?;
                Ok(())
            })?;
        }
        TableKind::DeltaGram => {
            let g = delta_gram(&ext()?, &labels, &QuadratureConfig::default())?;
            with_output(&a.output, out, |w| write_gram(w, &g))?;
        }
        TableKind::PsiGram | TableKind::PsiGramHypergeometric => {
            let p = ext()?;
            let (raw, image) = psi_grams(&p, &labels, psi_cutoff(p.phi))?;
            let g = if a.kind == TableKind::PsiGram { image } else { raw };
            with_output(&a.output, out, |w| write_gram(w, &g))?;
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("imdiff").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1").unwrap(), c64(1.0, 0.0));
        assert_eq!(parse_complex("0.5-2i").unwrap(), c64(0.5, -2.0));
        assert_eq!(parse_complex("3j").unwrap(), c64(0.0, 3.0));
        assert!(matches!(parse_complex("x"), Err(Error::Usage(_))));
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid(&["0:1:3".into(), "2.5".into()]).unwrap();
        assert_eq!(g, vec![0.0, 0.5, 1.0, 2.5]);
        assert!(parse_grid(&["0:1".into()]).is_err());
        assert!(parse_grid(&["inf".into()]).is_err());
    }

    #[test]
    fn config_parsing() {
        let c = Config::parse("# suite file\ntol = 1e-3\ntol.kl.plancherel = 2e-5 # tighter\nformat=json\n").unwrap();
        assert_eq!(c.get("format"), Some("json"));
        assert_eq!(c.check_tolerances().unwrap()["kl.plancherel"], 2e-5);
        assert!(matches!(Config::parse("bogus = 1"), Err(Error::Usage(_))));
        assert!(matches!(Config::parse("no equals sign"), Err(Error::Usage(_))));
    }

    #[test]
    fn eval_gamma_at_one() {
        let (code, out, _) = run_str(&["eval", "--fn", "gamma", "--at", "1"]);
        assert_eq!(code, 0);
        let row = out.lines().nth(1).unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(&cols[..2], ["1.0000000000000000e0", "0.0000000000000000e0"]);
        assert!((cols[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-15, "{row}");
        assert_eq!(cols[5], "OK");
    }

    #[test]
    fn eval_flags_numeric_errors_per_row() {
        let (code, out, _) = run_str(&["eval", "--fn", "gamma", "--at", "0,2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[1].ends_with(&format!(",ERR {}", gamma(c64(0.0, 0.0)).unwrap_err())), "{}", lines[1]);
        assert!(lines[2].ends_with(",OK"));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["eval", "--fn", "nope", "--at", "1"]).0, 2);
        assert_eq!(run_str(&["eval", "--fn", "K", "--x", "1"]).0, 2);
        assert_eq!(run_str(&["verify", "--suite", "nope"]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn io_errors_exit_3() {
        assert_eq!(run_str(&["transform", "kl", "--input", "/nonexistent/in.csv", "--grid", "1"]).0, 3);
        assert_eq!(run_str(&["--config", "/nonexistent/imdiff.conf", "verify", "--suite", "specfun"]).0, 3);
    }

    #[test]
    fn zero_battery_gives_zero_rows() {
        let (code, out, _) = run_str(&["transform", "kl", "--battery", "zero", "--grid", "0.5,1"]);
        assert_eq!(code, 0);
        for row in out.lines().skip(1) {
            assert!(row.ends_with("0.0000000000000000e0,0.0000000000000000e0"), "{row}");
        }
    }
}
