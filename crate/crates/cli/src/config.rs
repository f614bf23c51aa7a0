//! Command-line flags and their resolution into a validated [`RunConfig`].

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use moddouble::kernel::WeightSpec;
use moddouble::params::{discrete_spin, params_from_angle, params_from_tau, Convention, Regime, RegimeParams, Spin};
use moddouble::qdilog::{QDilog, QDilogSettings};
use moddouble::representation::inner::{DomainSpec, DEFAULT_ORDER, DEFAULT_X, DEFAULT_YPAD};
use moddouble::suite::DEFAULT_SEED;

use crate::error::ConfigError;

pub const OUT_DIR_ENV: &str = "MODDOUBLE_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "moddouble",
    version,
    about = "Checks and tabulations for the modular double discrete series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Params,
    SymbolicCheck,
    GammaEval,
    GammaCheck,
    Zeros,
    PhiEval,
    KernelCheck,
    HermCheck,
    Gram,
    ContinuousCheck,
    Suite,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Half-periods, q, mu, Z and the central charge.
    Params(Flags),
    /// Exact relations and Casimir reduction in the Weyl algebra.
    SymbolicCheck(Flags),
    /// CSV of gamma and its functional-equation residuals on a grid.
    GammaEval(Flags),
    /// Functional equations and the omega''-shift relation.
    GammaCheck(Flags),
    /// Winding numbers around the predicted zeros on one level.
    Zeros(Flags),
    /// CSV of the weight at t = -2iy.
    PhiEval(Flags),
    /// Kernel identities and weight shift equations on a (w, z) grid.
    KernelCheck(Flags),
    /// Quadrature Hermiticity of the dual operator pairs on one region.
    HermCheck(Flags),
    /// Gram matrix of a centred basis and its spectrum.
    Gram(Flags),
    /// Adjoints of u and v on the real line (Regime I).
    ContinuousCheck(Flags),
    /// Every acceptance criterion, stopping at the first failure.
    Suite(Flags),
}

impl Command {
    pub fn split(self) -> (CommandName, Flags) {
        use Command as C;
        use CommandName as N;
        match self {
            C::Params(f) => (N::Params, f),
            C::SymbolicCheck(f) => (N::SymbolicCheck, f),
            C::GammaEval(f) => (N::GammaEval, f),
            C::GammaCheck(f) => (N::GammaCheck, f),
            C::Zeros(f) => (N::Zeros, f),
            C::PhiEval(f) => (N::PhiEval, f),
            C::KernelCheck(f) => (N::KernelCheck, f),
            C::HermCheck(f) => (N::HermCheck, f),
            C::Gram(f) => (N::Gram, f),
            C::ContinuousCheck(f) => (N::ContinuousCheck, f),
            C::Suite(f) => (N::Suite, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeArg {
    #[value(name = "I", alias = "i", alias = "1")]
    I,
    #[value(name = "II", alias = "ii", alias = "2")]
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightArg {
    /// Trigonometric product, discrete spin only.
    Product,
    /// Ratio of dilogarithms, any spin.
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Complex tau, e.g. `2`, `i`, `0.5+0.866i`.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Regime II angle in degrees: tau = e^{i theta}.
    #[arg(long, conflicts_with = "tau", allow_hyphen_values = true)]
    pub tau_angle: Option<f64>,
    #[arg(long, value_enum)]
    pub regime: Option<RegimeArg>,
    /// Discrete spin a = n omega''.
    #[arg(long)]
    pub n: Option<i64>,
    /// Generic spin as a complex multiple of omega''.
    #[arg(long, conflicts_with = "n", allow_hyphen_values = true)]
    pub spin_a: Option<String>,
    /// sec2: Z = e^{i pi a/omega}; sec3: Z = e^{-i pi a/omega}.
    #[arg(long, default_value = "sec3")]
    pub convention: String,
    #[arg(long, value_enum)]
    pub weight: Option<WeightArg>,
    /// Region index (1 = lowest) or `real`.
    #[arg(long)]
    pub domain: Option<String>,
    /// Half-width of the x window.
    #[arg(long = "X")]
    pub x_half: Option<f64>,
    /// Cut distance for unbounded region ends.
    #[arg(long)]
    pub ypad: Option<f64>,
    /// Gauss-Legendre order per panel in x.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Gauss-Legendre order per panel in y.
    #[arg(long)]
    pub ny: Option<usize>,
    /// Trapezoid nodes of the dilogarithm contour.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Tolerance deciding the exit code; each command has its own default.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output file; defaults to $MODDOUBLE_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Zero level for `zeros`; defaults to n.
    #[arg(long)]
    pub level: Option<u32>,
    /// Sample grid: `imag:LO:HI:N`, `real:LO:HI:N` or `rect:XLO:XHI:YLO:YHI:N`,
    /// coordinates in units of mu.
    #[arg(long)]
    pub grid: Option<String>,
    /// Points per side of the (w, z) grid for `kernel-check`.
    #[arg(long)]
    pub points: Option<usize>,
    /// Basis size for `gram` (at most 32).
    #[arg(long)]
    pub basis: Option<usize>,
    /// `suite`: run every criterion instead of stopping at the first failure.
    #[arg(long)]
    pub keep_going: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridSpec {
    Imag { lo: f64, hi: f64, n: usize },
    Real { lo: f64, hi: f64, n: usize },
    Rect { x: (f64, f64), y: (f64, f64), n: usize },
}

impl FromStr for GridSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<GridSpec, ConfigError> {
        let bad = || ConfigError::Grid(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let num = |k: usize| parts[k].trim().parse::<f64>().map_err(|_| bad());
        let count = |k: usize| match parts[k].trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(bad()),
        };
        let g = match (parts[0], parts.len()) {
            ("imag", 4) => GridSpec::Imag {
                lo: num(1)?,
                hi: num(2)?,
                n: count(3)?,
            },
            ("real", 4) => GridSpec::Real {
                lo: num(1)?,
                hi: num(2)?,
                n: count(3)?,
            },
            ("rect", 6) => GridSpec::Rect {
                x: (num(1)?, num(2)?),
                y: (num(3)?, num(4)?),
                n: count(5)?,
            },
            _ => return Err(bad()),
        };
        Ok(g)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

impl GridSpec {
    /// Scalar samples along the grid axis (imag or real), scaled by `mu`.
    pub fn line(&self, mu: f64) -> Result<Vec<f64>, ConfigError> {
        match *self {
            GridSpec::Imag { lo, hi, n } | GridSpec::Real { lo, hi, n } => Ok(linspace(lo * mu, hi * mu, n)),
            GridSpec::Rect { .. } => Err(ConfigError::Incompatible(
                "this command takes an imag: or real: grid".into(),
            )),
        }
    }

    /// Complex sample points, scaled by `mu`; `rect` uses `n x n` points.
    pub fn points(&self, mu: f64) -> Vec<Complex64> {
        match *self {
            GridSpec::Imag { lo, hi, n } => linspace(lo * mu, hi * mu, n)
                .into_iter()
                .map(|y| Complex64::new(0.0, y))
                .collect(),
            GridSpec::Real { lo, hi, n } => linspace(lo * mu, hi * mu, n)
                .into_iter()
                .map(|x| Complex64::new(x, 0.0))
                .collect(),
            GridSpec::Rect { x, y, n } => {
                let xs = linspace(x.0 * mu, x.1 * mu, n);
                let ys = linspace(y.0 * mu, y.1 * mu, n);
                ys.iter()
                    .flat_map(|&b| xs.iter().map(move |&a| Complex64::new(a, b)))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum DomainArg {
    Strip(usize),
    Real(&'static str),
}

/// Fully resolved configuration, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: CommandName,
    pub regime: Regime,
    pub tau: Complex64,
    pub n: Option<u32>,
    /// Spin in units of `omega''`.
    pub spin_a: Complex64,
    pub convention: Convention,
    pub weight: WeightArg,
    pub domain: DomainArg,
    #[serde(rename = "X")]
    pub x_half: f64,
    pub ypad: f64,
    pub nx: usize,
    pub ny: usize,
    pub nodes: usize,
    pub tol: f64,
    pub format: Format,
    pub seed: u64,
    pub level: u32,
    pub grid: GridSpec,
    pub points: usize,
    pub basis: usize,
    pub keep_going: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub params: RegimeParams,
}

fn parse_complex(flag: &'static str, s: &str) -> Result<Complex64, ConfigError> {
    let t = s.trim();
    let v = if t == "i" {
        Ok(Complex64::new(0.0, 1.0))
    } else if t == "-i" {
        Ok(Complex64::new(0.0, -1.0))
    } else {
        Complex64::from_str(t)
    };
    match v {
        Ok(c) if c.is_finite() => Ok(c),
        _ => Err(ConfigError::Complex {
            flag,
            value: s.to_string(),
        }),
    }
}

fn default_tol(command: CommandName) -> f64 {
    match command {
        CommandName::Params => 1e-12,
        CommandName::PhiEval => 1e-12,
        CommandName::HermCheck => 1e-3,
        CommandName::Gram => 1e-6,
        _ => 1e-8,
    }
}

impl RunConfig {
    pub fn resolve(command: CommandName, f: Flags) -> Result<RunConfig, ConfigError> {
        let (regime, tau) = match (&f.tau, f.tau_angle, f.regime) {
            (_, Some(_), Some(RegimeArg::I)) => {
                return Err(ConfigError::Incompatible("--tau-angle selects Regime II".into()))
            }
            (_, Some(deg), _) => (Regime::II, Complex64::from_polar(1.0, deg.to_radians())),
            (Some(s), None, r) => {
                let tau = parse_complex("--tau", s)?;
                let regime = match r {
                    Some(RegimeArg::I) => Regime::I,
                    Some(RegimeArg::II) => Regime::II,
                    None if tau.im == 0.0 => Regime::I,
                    None => Regime::II,
                };
                (regime, tau)
            }
            (None, None, Some(RegimeArg::I)) => (Regime::I, Complex64::new(2.0, 0.0)),
            (None, None, _) if command == CommandName::ContinuousCheck => (Regime::I, Complex64::new(4.0, 0.0)),
            (None, None, _) => (Regime::II, Complex64::from_polar(1.0, 60f64.to_radians())),
        };
        let params = match (f.tau_angle, regime) {
            (Some(deg), _) => params_from_angle(deg.to_radians())?,
            (None, r) => params_from_tau(tau, r)?,
        };
        let convention: Convention = f.convention.parse().map_err(ConfigError::Incompatible)?;
        let (n, spin_a) = match (&f.spin_a, f.n) {
            (Some(s), _) => (None, parse_complex("--spin-a", s)?),
            (None, Some(n)) if n <= 0 => return Err(ConfigError::Core(moddouble::Error::NonPositiveSpin(n))),
            (None, Some(n)) => (Some(n as u32), Complex64::new(n as f64, 0.0)),
            (None, None) => (Some(2), Complex64::new(2.0, 0.0)),
        };
        let weight = match (f.weight, n) {
            (Some(WeightArg::Product), None) => {
                return Err(ConfigError::Incompatible(
                    "the product weight needs a discrete spin --n".into(),
                ))
            }
            (Some(w), _) => w,
            (None, Some(_)) => WeightArg::Product,
            (None, None) => WeightArg::Gamma,
        };
        let domain = match f.domain.as_deref() {
            Some("real") => DomainArg::Real("real"),
            Some(s) => match s.parse::<usize>() {
                Ok(k) if k >= 1 => DomainArg::Strip(k),
                _ => return Err(ConfigError::Domain(s.to_string())),
            },
            None if command == CommandName::ContinuousCheck => DomainArg::Real("real"),
            None => DomainArg::Strip(n.map(|n| n.div_ceil(2) as usize).unwrap_or(1)),
        };
        let format = match (f.format, command) {
            (Some(Format::Csv), c)
                if !matches!(
                    c,
                    CommandName::GammaEval | CommandName::PhiEval | CommandName::KernelCheck
                ) =>
            {
                return Err(ConfigError::Incompatible(
                    "CSV output is only available for gamma-eval, phi-eval and kernel-check".into(),
                ))
            }
            (Some(fmt), _) => fmt,
            (None, CommandName::GammaEval | CommandName::PhiEval) => Format::Csv,
            (None, _) => Format::Json,
        };
        let grid = match (&f.grid, command) {
            (Some(s), _) => s.parse()?,
            (None, CommandName::PhiEval) => GridSpec::Imag {
                lo: -3.0,
                hi: 3.0,
                n: 1000,
            },
            (None, _) => GridSpec::Rect {
                x: (-0.45, 0.45),
                y: (-0.45, 0.45),
                n: 10,
            },
        };
        let basis = f.basis.unwrap_or(8);
        if basis == 0 || basis > moddouble::representation::inner::MAX_BASIS {
            return Err(ConfigError::Core(moddouble::Error::BasisTooLarge(basis)));
        }
        let points = f.points.unwrap_or(20);
        if points == 0 {
            return Err(ConfigError::Incompatible("--points must be positive".into()));
        }
        let tol = f.tol.unwrap_or(default_tol(command));
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(ConfigError::Incompatible(format!("tolerance {tol}")));
        }
        let nodes = f.nodes.unwrap_or(QDilogSettings::default().nodes);
        if nodes < 16 {
            return Err(ConfigError::Incompatible(format!("--nodes {nodes} is below 16")));
        }
        Ok(RunConfig {
            command,
            regime,
            tau: params.tau(),
            n,
            spin_a,
            convention,
            weight,
            domain,
            x_half: f.x_half.unwrap_or(if domain == DomainArg::Real("real") {
                10.0
            } else {
                DEFAULT_X
            }),
            ypad: f.ypad.unwrap_or(DEFAULT_YPAD),
            nx: f.nx.unwrap_or(DEFAULT_ORDER),
            ny: f.ny.unwrap_or(DEFAULT_ORDER),
            nodes,
            tol,
            format,
            seed: f.seed.unwrap_or(DEFAULT_SEED),
            level: f.level.or(n).unwrap_or(1),
            grid,
            points,
            basis,
            keep_going: f.keep_going,
            out: f.out,
            params,
        })
    }

    pub fn spin(&self) -> Result<Spin, ConfigError> {
        Ok(match self.n {
            Some(n) => discrete_spin(&self.params, n as i64, self.convention)?,
            None => Spin::new(&self.params, self.spin_a * self.params.omega_pp(), self.convention),
        })
    }

    pub fn dilog(&self) -> Result<QDilog, ConfigError> {
        let settings = QDilogSettings {
            nodes: self.nodes,
            ..QDilogSettings::default()
        };
        Ok(QDilog::with_settings(self.params, settings)?)
    }

    pub fn weight_spec(&self) -> Result<WeightSpec, ConfigError> {
        Ok(match (self.weight, self.n) {
            (WeightArg::Product, Some(n)) => WeightSpec::discrete(self.params, n, self.convention)?,
            _ => WeightSpec::generic_with(self.dilog()?, self.spin_a * self.params.omega_pp(), self.convention),
        })
    }

    /// Number of zero lines plus one, which fixes the region decomposition.
    pub fn region_count(&self) -> Result<u32, ConfigError> {
        self.n
            .ok_or_else(|| ConfigError::Incompatible("region decomposition needs a discrete spin --n".into()))
    }

    pub fn domain_spec(&self) -> Result<DomainSpec, ConfigError> {
        let dom = match self.domain {
            DomainArg::Strip(k) => {
                let n = self.region_count()?;
                if k > n as usize {
                    return Err(ConfigError::Core(moddouble::Error::DomainIndex { index: k, n }));
                }
                DomainSpec {
                    ypad: self.ypad,
                    ..DomainSpec::strip(n, k)
                }
            }
            DomainArg::Real(_) => DomainSpec::real_line(self.x_half),
        };
        let dom = dom.with_x(self.x_half).with_orders(self.nx, self.ny);
        dom.rectangle(&self.params)?;
        Ok(dom)
    }
}
