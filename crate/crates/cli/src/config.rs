//! Experiment configuration: TOML file plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use qmem_core::perturb::{Precision, DEFAULT_DIGITS};

/// Frozen experiment names.
pub const EXPERIMENTS: [&str; 9] = [
    "toric-scaling",
    "toric-retune",
    "toric-transfer",
    "ising-splitting",
    "ising-plateau",
    "banded-splitting",
    "oracle-verify",
    "duality-verify",
    "two-excitation",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ToricScaling,
    ToricRetune,
    ToricTransfer,
    IsingSplitting,
    IsingPlateau,
    BandedSplitting,
    OracleVerify,
    DualityVerify,
    TwoExcitation,
}

impl Experiment {
    pub fn all() -> [Experiment; 9] {
        use Experiment::*;
        [
            ToricScaling,
            ToricRetune,
            ToricTransfer,
            IsingSplitting,
            IsingPlateau,
            BandedSplitting,
            OracleVerify,
            DualityVerify,
            TwoExcitation,
        ]
    }

    pub fn name(self) -> &'static str {
        EXPERIMENTS[self as usize]
    }

    pub fn parse(name: &str) -> Result<Self, CliError> {
        Self::all()
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| {
                CliError::config(
                    "experiment",
                    format!("unknown experiment `{name}` (see `qmem list`)"),
                )
            })
    }

    /// One-line description used by `qmem list`.
    pub fn describe(self) -> &'static str {
        use Experiment::*;
        match self {
            ToricScaling => "min gap of uniform chains and Christandl transfer time vs N; fits both exponents",
            ToricRetune => "retunes uniform chains at t_factor*pi/gap, 2x and 4x that; fidelity and coupling shifts",
            ToricTransfer => "fidelity traces of Christandl and retuned chains; located peaks",
            IsingSplitting => "lowest-pair splitting order of the Ising chain and of a flat-diagonal chain",
            IsingPlateau => "first-order plateau formula vs exact plateau eigenvalues",
            BandedSplitting => "splitting order with seeded random persymmetric bands of width k",
            OracleVerify => "exact 2N^2-qubit checks: matrix elements, leakage, logical flip, energy",
            DualityVerify => "symbolic CNOT conjugation of the toric perturbation into an XX+YY chain",
            TwoExcitation => "exact two-excitation transfer at the Christandl time",
        }
    }

    /// Keys that this experiment reads besides `experiment`, `output_dir` and `n_range`.
    pub fn parameters(self) -> &'static [&'static str] {
        use Experiment::*;
        match self {
            ToricScaling => &["delta", "gap", "threshold"],
            ToricRetune => &["delta", "gap", "t_factor", "threshold"],
            ToricTransfer => &["delta", "gap", "t_factor", "threshold"],
            IsingSplitting => &["delta_min", "delta_max", "delta_points", "precision"],
            IsingPlateau => &["delta_min", "delta_max", "delta_points"],
            BandedSplitting => &[
                "delta_min",
                "delta_max",
                "delta_points",
                "precision",
                "band_width",
                "seed",
            ],
            OracleVerify => &["delta", "gap", "t_factor", "tolerance"],
            DualityVerify => &["delta"],
            TwoExcitation => &["delta", "gap", "tolerance"],
        }
    }

    fn default_range(self) -> Vec<usize> {
        use Experiment::*;
        match self {
            ToricScaling => vec![16, 32, 64, 128, 256],
            ToricRetune => vec![8, 16, 32, 64],
            ToricTransfer => vec![4, 11, 21, 51],
            IsingSplitting | BandedSplitting => vec![3, 4],
            IsingPlateau => vec![4, 5],
            OracleVerify | TwoExcitation => vec![3],
            DualityVerify => vec![3, 4, 5],
        }
    }

    /// Smallest and largest accepted N.
    fn n_bounds(self) -> (usize, usize) {
        use Experiment::*;
        match self {
            ToricScaling | ToricRetune | ToricTransfer => (4, 4096),
            IsingSplitting | BandedSplitting => (3, 8),
            IsingPlateau => (4, 40),
            OracleVerify | TwoExcitation => (3, 3),
            DualityVerify => (3, 64),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `n_range` as written in the file: one integer, a list, or a range string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RangeSpec {
    One(usize),
    List(Vec<usize>),
    Text(String),
}

/// Parses `a..b` (step 1), `a..b:s` (step s) or `a..b*f` (geometric factor f); all inclusive of `b` when hit.
pub fn parse_range(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = |why: &str| CliError::config("n_range", format!("cannot parse `{text}`: {why}"));
    let (lo, rest) = text
        .split_once("..")
        .ok_or_else(|| bad("expected `a..b`"))?;
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|_| bad("start is not an integer"))?;
    let (hi, op) = match rest.find([':', '*']) {
        Some(pos) => (&rest[..pos], Some((&rest[pos..pos + 1], &rest[pos + 1..]))),
        None => (rest, None),
    };
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|_| bad("end is not an integer"))?;
    if hi < lo {
        return Err(bad("end is below start"));
    }
    let mut out = Vec::new();
    match op {
        None => out.extend(lo..=hi),
        Some((":", s)) => {
            let s: usize = s
                .trim()
                .parse()
                .map_err(|_| bad("step is not an integer"))?;
            if s == 0 {
                return Err(bad("step must be positive"));
            }
            out.extend((lo..=hi).step_by(s));
        }
        Some((_, f)) => {
            let f: usize = f
                .trim()
                .parse()
                .map_err(|_| bad("factor is not an integer"))?;
            if f < 2 || lo == 0 {
                return Err(bad("geometric ranges need start >= 1 and factor >= 2"));
            }
            let mut n = lo;
            while n <= hi {
                out.push(n);
                n *= f;
            }
        }
    }
    Ok(out)
}

/// Parses `double`, `auto`, `extended` or `extended:<digits>`.
pub fn parse_precision(text: &str) -> Result<Precision, CliError> {
    let t = text.trim().to_ascii_lowercase();
    match t.as_str() {
        "double" => Ok(Precision::Double),
        "auto" => Ok(Precision::Auto),
        "extended" => Ok(Precision::Extended {
            digits: DEFAULT_DIGITS,
        }),
        _ => {
            let digits = t
                .strip_prefix("extended:")
                .and_then(|d| d.parse::<u32>().ok())
                .ok_or_else(|| {
                    CliError::config(
                        "precision",
                        format!("`{text}` is not double, auto or extended[:digits]"),
                    )
                })?;
            if !(20..=1000).contains(&digits) {
                return Err(CliError::config(
                    "precision",
                    format!("extended digits must lie in 20..=1000, got {digits}"),
                ));
            }
            Ok(Precision::Extended { digits })
        }
    }
}

pub fn precision_label(p: Precision) -> String {
    match p {
        Precision::Double => "double".into(),
        Precision::Auto => "auto".into(),
        Precision::Extended { digits } => format!("extended:{digits}"),
    }
}

/// Raw file contents; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: Option<String>,
    n_range: Option<RangeSpec>,
    delta: Option<f64>,
    gap: Option<f64>,
    t_factor: Option<f64>,
    threshold: Option<f64>,
    output_dir: Option<PathBuf>,
    precision: Option<String>,
    seed: Option<u64>,
    delta_min: Option<f64>,
    delta_max: Option<f64>,
    delta_points: Option<usize>,
    band_width: Option<usize>,
    tolerance: Option<f64>,
    svg: Option<bool>,
}

/// Values given on the command line; they take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub experiment: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub svg: bool,
}

/// A validated experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n_range: Vec<usize>,
    pub delta: f64,
    pub gap: f64,
    pub t_factor: f64,
    pub threshold: f64,
    pub output_dir: PathBuf,
    #[serde(serialize_with = "ser_precision")]
    pub precision: Precision,
    pub seed: u64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
    pub band_width: usize,
    pub tolerance: f64,
    pub svg: bool,
}

fn ser_precision<S: serde::Serializer>(p: &Precision, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&precision_label(*p))
}

impl ExperimentConfig {
    /// Defaults for `experiment` with nothing overridden.
    pub fn defaults(experiment: Experiment) -> Self {
        Self {
            experiment,
            n_range: experiment.default_range(),
            delta: 0.1,
            gap: 1.0,
            t_factor: 50.0,
            threshold: 0.999,
            output_dir: PathBuf::from("results"),
            precision: Precision::Auto,
            seed: 0,
            delta_min: 0.01,
            delta_max: 0.1,
            delta_points: 6,
            band_width: 2,
            tolerance: 1e-10,
            svg: false,
        }
    }

    /// Reads a TOML file and applies `overrides` (flags win over file values, file values over defaults).
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config("config", format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_toml(&text, overrides)
    }

    pub fn from_toml(text: &str, overrides: &Overrides) -> Result<Self, CliError> {
        let file: FileConfig =
            toml::from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
        let name = overrides
            .experiment
            .clone()
            .or(file.experiment.clone())
            .ok_or_else(|| {
                CliError::config(
                    "experiment",
                    "no experiment given in the file or on the command line",
                )
            })?;
        let mut c = Self::defaults(Experiment::parse(&name)?);
        if let Some(r) = file.n_range {
            c.n_range = match r {
                RangeSpec::One(n) => vec![n],
                RangeSpec::List(v) => v,
                RangeSpec::Text(t) => parse_range(&t)?,
            };
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = file.$f { c.$f = v; } )* };
        }
        take!(
            delta,
            gap,
            t_factor,
            threshold,
            output_dir,
            seed,
            delta_min,
            delta_max,
            delta_points,
            band_width,
            tolerance,
            svg
        );
        if let Some(p) = file.precision {
            c.precision = parse_precision(&p)?;
        }
        if let Some(d) = &overrides.output_dir {
            c.output_dir = d.clone();
        }
        if let Some(s) = overrides.seed {
            c.seed = s;
        }
        c.svg |= overrides.svg;
        c.validate()?;
        Ok(c)
    }

    /// Checks every field; the error names the first offending one.
    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(CliError::config(
                    name,
                    format!("must be finite and positive, got {v}"),
                ))
            }
        };
        if self.n_range.is_empty() {
            return Err(CliError::config("n_range", "is empty"));
        }
        let (lo, hi) = self.experiment.n_bounds();
        if let Some(n) = self.n_range.iter().find(|&&n| n < lo || n > hi) {
            return Err(CliError::config(
                "n_range",
                format!("N = {n} is outside {lo}..={hi} for {}", self.experiment),
            ));
        }
        positive("delta", self.delta)?;
        if self.delta > 1.0 {
            return Err(CliError::config(
                "delta",
                format!("must not exceed 1, got {}", self.delta),
            ));
        }
        positive("gap", self.gap)?;
        positive("t_factor", self.t_factor)?;
        if self.t_factor < qmem_core::iep::RetuneOptions::default().min_time_factor {
            return Err(CliError::config(
                "t_factor",
                format!(
                    "must be at least {} so that retuning shifts stay within one grid interval, got {}",
                    qmem_core::iep::RetuneOptions::default().min_time_factor,
                    self.t_factor
                ),
            ));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(CliError::config(
                "threshold",
                format!("must lie in (0, 1], got {}", self.threshold),
            ));
        }
        positive("delta_min", self.delta_min)?;
        positive("delta_max", self.delta_max)?;
        if self.delta_max <= self.delta_min {
            return Err(CliError::config("delta_max", "must exceed delta_min"));
        }
        if self.delta_points < qmem_core::perturb::MIN_FIT_POINTS {
            return Err(CliError::config(
                "delta_points",
                format!(
                    "need at least {} points",
                    qmem_core::perturb::MIN_FIT_POINTS
                ),
            ));
        }
        if self.band_width == 0 {
            return Err(CliError::config("band_width", "must be at least 1"));
        }
        positive("tolerance", self.tolerance)?;
        if self.experiment == Experiment::ToricScaling && self.n_range.len() < 2 {
            return Err(CliError::config(
                "n_range",
                "scaling fits need at least two sizes",
            ));
        }
        Ok(())
    }
}
