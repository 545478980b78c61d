//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. A file is applied on top of the
//! defaults of its `preset`; command-line overrides are applied last. Every
//! key is listed in [`KEYS`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hankel::{DEFAULT_CLUSTER_TOL, DEFAULT_GRAM_SIZE};
use crate::hardy::HardyState;
use crate::solver::{KrasnyMode, SolverConfig};
use crate::symbols;
use crate::w::WState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    SinglePole,
    TwoPoles,
    Gaussian,
    Baby,
    KappaFit,
    StableManifold,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::SinglePole,
        Preset::TwoPoles,
        Preset::Gaussian,
        Preset::Baby,
        Preset::KappaFit,
        Preset::StableManifold,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::SinglePole => "single_pole",
            Preset::TwoPoles => "two_poles",
            Preset::Gaussian => "gaussian",
            Preset::Baby => "baby",
            Preset::KappaFit => "kappa_fit",
            Preset::StableManifold => "stable_manifold",
            Preset::Custom => "custom",
        }
    }

    /// Presets integrating the spectral PDE solver.
    pub fn uses_pde(self) -> bool {
        !matches!(self, Preset::KappaFit | Preset::StableManifold)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// `e^{ix} / (1 - p e^{ix})`.
    SinglePole,
    /// Sum of two single poles at `p1`, `p2`.
    TwoPoles,
    /// `Pi exp(-width x^2)`.
    Gaussian,
    /// `e^{ix} + eps`.
    Perturbed,
    /// `c e^{ix}`.
    Monomial,
    /// Finite Blaschke product with the listed zeros.
    Blaschke,
    /// `b + c e^{ix} / (1 - p e^{ix})`.
    Rational,
}

impl InitialKind {
    const ALL: [InitialKind; 7] = [
        InitialKind::SinglePole,
        InitialKind::TwoPoles,
        InitialKind::Gaussian,
        InitialKind::Perturbed,
        InitialKind::Monomial,
        InitialKind::Blaschke,
        InitialKind::Rational,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InitialKind::SinglePole => "single_pole",
            InitialKind::TwoPoles => "two_poles",
            InitialKind::Gaussian => "gaussian",
            InitialKind::Perturbed => "perturbed",
            InitialKind::Monomial => "monomial",
            InitialKind::Blaschke => "blaschke",
            InitialKind::Rational => "rational",
        }
    }
}

impl FromStr for InitialKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        InitialKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown initial condition {s:?}"))
    }
}

/// Initial-condition family and all of its parameters; only those of `kind`
/// are read.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitialCondition {
    pub kind: InitialKind,
    pub p: Complex64,
    pub p1: Complex64,
    pub p2: Complex64,
    pub width: f64,
    pub eps: f64,
    pub b: Complex64,
    pub c: Complex64,
    pub zeros: Vec<Complex64>,
}

impl Default for InitialCondition {
    fn default() -> Self {
        let re = |x: f64| Complex64::new(x, 0.0);
        Self {
            kind: InitialKind::SinglePole,
            p: re(0.5),
            p1: re(0.7),
            p2: re(0.8),
            width: 10.0,
            eps: 0.05,
            b: re(0.0),
            c: re(1.0),
            zeros: vec![re(0.3)],
        }
    }
}

impl InitialCondition {
    pub fn validate(&self) -> Result<()> {
        let disc = |name: &str, z: Complex64| {
            if z.norm() < 1.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} = {z} must lie in the unit disc")))
            }
        };
        match self.kind {
            InitialKind::SinglePole => disc("p", self.p),
            InitialKind::TwoPoles => disc("p1", self.p1).and(disc("p2", self.p2)),
            InitialKind::Gaussian if !(self.width > 0.0) => {
                Err(Error::Domain(format!("width must be positive, got {}", self.width)))
            }
            InitialKind::Perturbed if !(self.eps >= 0.0) => {
                Err(Error::Domain(format!("eps must be nonnegative, got {}", self.eps)))
            }
            InitialKind::Blaschke => self.zeros.iter().try_for_each(|z| disc("zero", *z)),
            InitialKind::Rational => self.w_state().map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn build(&self, grid_size: usize) -> Result<HardyState> {
        self.validate()?;
        HardyState::zeros(grid_size)?;
        Ok(match self.kind {
            InitialKind::SinglePole => symbols::single_pole(grid_size, self.p),
            InitialKind::TwoPoles => symbols::two_poles(grid_size, self.p1, self.p2),
            InitialKind::Gaussian => symbols::gaussian(grid_size, self.width),
            InitialKind::Perturbed => symbols::perturbed_monomial(grid_size, self.eps),
            InitialKind::Monomial => symbols::monomial(grid_size, self.c),
            InitialKind::Blaschke => symbols::blaschke(grid_size, &self.zeros),
            InitialKind::Rational => crate::w::w_to_hardy(&self.w_state()?, grid_size)?,
        })
    }

    /// `(b, c, p)` coordinates when the initial condition lies in `W`.
    pub fn w_state(&self) -> Result<WState> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            InitialKind::SinglePole => WState::new(zero, one, self.p),
            InitialKind::Perturbed => WState::new(Complex64::new(self.eps, 0.0), one, zero),
            InitialKind::Monomial => WState::new(zero, self.c, zero),
            InitialKind::Rational => WState::new(self.b, self.c, self.p),
            InitialKind::Blaschke if self.zeros.len() == 1 => {
                let z = self.zeros[0];
                WState::new(-z, Complex64::new(1.0 - z.norm_sqr(), 0.0), z.conj())
            }
            _ => Err(Error::Domain(format!("initial condition {} is not in W", self.kind.name()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSettings {
    pub size: usize,
    pub cluster_tol: f64,
    /// `None` uses the relative default of the spectrum pipeline.
    pub rank_cutoff: Option<f64>,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        Self {
            size: DEFAULT_GRAM_SIZE,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            rank_cutoff: None,
        }
    }
}

/// Pass/fail thresholds of the preset checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative deviation of growth slopes and `kappa` fits.
    pub slope_rel: f64,
    pub momentum_drift: f64,
    pub lyapunov: f64,
    pub kappa_rel: f64,
    pub decay_rel: f64,
    pub ratio_rel: f64,
    pub round_trip: f64,
    pub r_squared: f64,
    pub closed_form: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slope_rel: 0.05,
            momentum_drift: 1e-9,
            lyapunov: 1e-5,
            kappa_rel: 0.05,
            decay_rel: 0.01,
            ratio_rel: 0.01,
            round_trip: 1e-8,
            r_squared: 0.99,
            closed_form: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub initial: InitialCondition,
    pub solver: SolverConfig,
    pub spectrum: SpectrumSettings,
    pub output_dir: PathBuf,
    /// Step of the `W` and reduced ODE integrators.
    pub ode_dt: f64,
    /// Momentum of stable-manifold runs.
    pub momentum: f64,
    pub beta_inf: f64,
    pub t_start: Option<f64>,
    pub t_end_back: Option<f64>,
    /// Sobolev exponent of the `W` growth fit.
    pub s: f64,
    pub tolerances: Tolerances,
}

/// Recognised keys, in the order documented in the README.
pub const KEYS: &[&str] = &[
    "preset",
    "alpha",
    "dt",
    "t_end",
    "n",
    "record_stride",
    "krasny",
    "krasny_mode",
    "dealias",
    "sobolev",
    "ic",
    "p",
    "p1",
    "p2",
    "width",
    "eps",
    "b",
    "c",
    "zeros",
    "gram_size",
    "cluster_tol",
    "rank_cutoff",
    "out",
    "ode_dt",
    "momentum",
    "beta_inf",
    "t_start",
    "t_end_back",
    "s",
    "tol_slope",
    "tol_drift",
    "tol_lyapunov",
    "tol_kappa",
    "tol_decay",
    "tol_ratio",
    "tol_round_trip",
    "tol_r2",
    "tol_closed_form",
];

/// Gaussian preset horizon used by `--long-horizon`.
pub const GAUSSIAN_LONG_HORIZON: f64 = 1000.0;

impl ExperimentConfig {
    pub fn for_preset(preset: Preset) -> Self {
        let mut initial = InitialCondition::default();
        let mut tolerances = Tolerances::default();
        let solver = match preset {
            Preset::SinglePole => SolverConfig::new(1.0, 2e-4, 20.0, 4096).with_record_stride(10),
            Preset::TwoPoles => {
                initial.kind = InitialKind::TwoPoles;
                tolerances.momentum_drift = 1e-6;
                SolverConfig::new(1.0, 2e-4, 20.0, 4096).with_record_stride(50)
            }
            Preset::Gaussian => {
                initial.kind = InitialKind::Gaussian;
                tolerances.momentum_drift = 1e-8;
                SolverConfig::new(1.0, 2e-3, 100.0, 4096).with_record_stride(50)
            }
            Preset::Baby => {
                initial.kind = InitialKind::Perturbed;
                SolverConfig::new(1.0, 1e-3, 20.0, 1024).with_record_stride(2)
            }
            Preset::KappaFit => {
                initial.kind = InitialKind::Rational;
                SolverConfig::new(1.0, 1e-3, 500.0, 256).with_record_stride(100)
            }
            Preset::StableManifold => SolverConfig::new(1.0, 1e-3, 20.0, 256),
            Preset::Custom => SolverConfig::new(1.0, 1e-3, 10.0, 1024).with_record_stride(2),
        };
        if preset == Preset::KappaFit {
            initial.p = Complex64::new(0.5, 0.0);
        }
        Self {
            preset,
            initial,
            solver,
            spectrum: SpectrumSettings::default(),
            output_dir: PathBuf::from("runs").join(preset.name()),
            ode_dt: 1e-3,
            momentum: 1.0,
            beta_inf: 1.0,
            t_start: None,
            t_end_back: None,
            s: 1.0,
            tolerances,
        }
    }

    /// Parses a configuration file applied over its preset defaults
    /// (`custom` when the file names none).
    pub fn parse(text: &str) -> Result<Self> {
        Self::load(None, Some(text), &[], Preset::Custom)
    }

    /// Combines, in increasing priority: the defaults of `preset` (else the
    /// file's `preset`, else `fallback`), the file entries, then `overrides`.
    pub fn load(preset: Option<Preset>, text: Option<&str>, overrides: &[(String, String)], fallback: Preset) -> Result<Self> {
        let entries = match text {
            Some(t) => parse_entries(t)?,
            None => Vec::new(),
        };
        let mut chosen = preset;
        if chosen.is_none() {
            for (line, key, value) in &entries {
                if key == "preset" {
                    chosen = Some(value.parse().map_err(|message| Error::Config { line: *line, message })?);
                }
            }
        }
        let mut cfg = Self::for_preset(chosen.unwrap_or(fallback));
        for (line, key, value) in &entries {
            if key != "preset" {
                cfg.set(key, value).map_err(|message| Error::Config { line: *line, message })?;
            }
        }
        for (key, value) in overrides {
            cfg.set(key, value).map_err(|message| Error::Config {
                line: 0,
                message: format!("command-line {key}: {message}"),
            })?;
        }
        Ok(cfg)
    }

    /// Sets one key; errors carry a message without position.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        let t = &mut self.tolerances;
        match key {
            "preset" => {
                let preset: Preset = v.parse()?;
                if preset != self.preset {
                    return Err("preset must be chosen before other keys".into());
                }
            }
            "alpha" => self.solver.alpha = num(v)?,
            "dt" => self.solver.dt = num(v)?,
            "t_end" => self.solver.t_end = num(v)?,
            "n" => self.solver.grid_size = int(v)?,
            "record_stride" => self.solver.record_stride = int(v)?,
            "krasny" => self.solver.krasny_threshold = num(v)?,
            "krasny_mode" => {
                self.solver.krasny_mode = match v {
                    "absolute" => KrasnyMode::Absolute,
                    "relative" => KrasnyMode::RelativeToInitialMax,
                    _ => return Err(format!("krasny_mode must be absolute or relative, got {v:?}")),
                }
            }
            "dealias" => self.solver.dealias = v.parse().map_err(|_| format!("expected true or false, got {v:?}"))?,
            "sobolev" => {
                self.solver.sobolev_exponents = v.split(',').map(|x| num(x.trim())).collect::<std::result::Result<_, _>>()?
            }
            "ic" => self.initial.kind = v.parse()?,
            "p" => self.initial.p = complex(v)?,
            "p1" => self.initial.p1 = complex(v)?,
            "p2" => self.initial.p2 = complex(v)?,
            "width" => self.initial.width = num(v)?,
            "eps" => self.initial.eps = num(v)?,
            "b" => self.initial.b = complex(v)?,
            "c" => self.initial.c = complex(v)?,
            "zeros" => {
                self.initial.zeros = v
                    .split(';')
                    .filter(|z| !z.trim().is_empty())
                    .map(|z| complex(z.trim()))
                    .collect::<std::result::Result<_, _>>()?
            }
            "gram_size" => self.spectrum.size = int(v)?,
            "cluster_tol" => self.spectrum.cluster_tol = num(v)?,
            "rank_cutoff" => self.spectrum.rank_cutoff = Some(num(v)?),
            "out" => self.output_dir = PathBuf::from(v),
            "ode_dt" => self.ode_dt = num(v)?,
            "momentum" => self.momentum = num(v)?,
            "beta_inf" => self.beta_inf = num(v)?,
            "t_start" => self.t_start = Some(num(v)?),
            "t_end_back" => self.t_end_back = Some(num(v)?),
            "s" => self.s = num(v)?,
            "tol_slope" => t.slope_rel = num(v)?,
            "tol_drift" => t.momentum_drift = num(v)?,
            "tol_lyapunov" => t.lyapunov = num(v)?,
            "tol_kappa" => t.kappa_rel = num(v)?,
            "tol_decay" => t.decay_rel = num(v)?,
            "tol_ratio" => t.ratio_rel = num(v)?,
            "tol_round_trip" => t.round_trip = num(v)?,
            "tol_r2" => t.r_squared = num(v)?,
            "tol_closed_form" => t.closed_form = num(v)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.preset.uses_pde() {
            self.solver.validate()?;
            self.initial.validate()?;
        }
        if !(self.ode_dt > 0.0) {
            return Err(Error::Domain(format!("ode_dt must be positive, got {}", self.ode_dt)));
        }
        if self.preset == Preset::StableManifold && !(self.beta_inf > 0.0) {
            return Err(Error::Domain(format!("beta_inf must be positive, got {}", self.beta_inf)));
        }
        Ok(())
    }
}

fn num(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("expected a number, got {v:?}"))
}

fn int(v: &str) -> std::result::Result<usize, String> {
    v.parse::<usize>().map_err(|_| format!("expected a nonnegative integer, got {v:?}"))
}

/// `re` or `re,im`.
fn complex(v: &str) -> std::result::Result<Complex64, String> {
    let mut parts = v.split(',');
    let re = num(parts.next().unwrap_or("").trim())?;
    let im = match parts.next() {
        Some(x) => num(x.trim())?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(format!("expected re or re,im, got {v:?}"));
    }
    Ok(Complex64::new(re, im))
}

/// `(line, key, value)` triples with 1-based line numbers.
pub fn parse_entries(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected key = value, got {body:?}"),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Config {
                line,
                message: format!("unknown key {key:?}"),
            });
        }
        out.push((line, key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("nope".parse::<Preset>().is_err());
    }

    #[test]
    fn file_overrides_preset_defaults() {
        let text = "# comment\npreset = gaussian\n\nt_end = 5   # short\nn = 512\nwidth=4\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.preset, Preset::Gaussian);
        assert_eq!(cfg.initial.kind, InitialKind::Gaussian);
        assert_eq!(cfg.solver.t_end, 5.0);
        assert_eq!(cfg.solver.grid_size, 512);
        assert_eq!(cfg.initial.width, 4.0);
        assert_eq!(cfg.solver.dt, 2e-3);
        assert_eq!(cfg.tolerances.momentum_drift, 1e-8);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("alpha = 1\n\ndt = fast\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }), "{err}");
        let err = ExperimentConfig::parse("alpha = 1\nbogus = 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{err}");
        let err = ExperimentConfig::parse("no equals sign\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }), "{err}");
    }

    #[test]
    fn command_line_wins() {
        let over = vec![("t_end".to_string(), "3".to_string())];
        let cfg = ExperimentConfig::load(Some(Preset::Baby), Some("preset = gaussian\nt_end = 5\n"), &over, Preset::Custom).unwrap();
        assert_eq!(cfg.preset, Preset::Baby);
        assert_eq!(cfg.solver.t_end, 3.0);
        let bad = vec![("n".to_string(), "x".to_string())];
        assert!(matches!(
            ExperimentConfig::load(None, None, &bad, Preset::Custom),
            Err(Error::Config { line: 0, .. })
        ));
    }

    #[test]
    fn complex_and_list_values() {
        let cfg = ExperimentConfig::parse("ic = blaschke\nzeros = 0.3; 0.1,-0.2\np = 0.2,0.4\n").unwrap();
        assert_eq!(cfg.initial.zeros, vec![Complex64::new(0.3, 0.0), Complex64::new(0.1, -0.2)]);
        assert_eq!(cfg.initial.p, Complex64::new(0.2, 0.4));
        assert!(ExperimentConfig::parse("p = 1,2,3\n").is_err());
    }

    #[test]
    fn domain_validation() {
        let mut cfg = ExperimentConfig::for_preset(Preset::SinglePole);
        cfg.initial.p = Complex64::new(1.2, 0.0);
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::for_preset(Preset::Gaussian);
        cfg.initial.width = -1.0;
        assert!(cfg.initial.build(64).is_err());
        let mut cfg = ExperimentConfig::for_preset(Preset::Baby);
        cfg.initial.eps = -0.1;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::for_preset(Preset::StableManifold);
        cfg.beta_inf = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn w_coordinates_of_initial_conditions() {
        let cfg = ExperimentConfig::for_preset(Preset::KappaFit);
        let w = cfg.initial.w_state().unwrap();
        assert!((w.momentum() - 16.0 / 9.0).abs() < 1e-15);
        let mut ic = InitialCondition {
            kind: InitialKind::Blaschke,
            ..Default::default()
        };
        let u = ic.build(128).unwrap();
        let v = crate::w::w_to_hardy(&ic.w_state().unwrap(), 128).unwrap();
        assert!(u.l2_distance(&v) < 1e-14);
        ic.kind = InitialKind::Gaussian;
        assert!(ic.w_state().is_err());
    }
}
