//! Flat `key = value` config files and the merged run configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use postsel::{GridSpec, MeasurementParams, PositionConvention};

use crate::error::CliError;

/// Keys accepted in a config file. Underscores and dashes are interchangeable.
pub const KNOWN_KEYS: &[&str] = &[
    "out",
    "format",
    "engine",
    "cutoff",
    "grid",
    "Gamma",
    "alpha",
    "delta",
    "phi",
    "gamma",
    "sigma",
    "formulas",
    "x2",
    "quantity",
    "axis",
    "start",
    "stop",
    "steps",
    "kind",
    "abs-tol",
    "rel-tol",
    "whitelist",
    "set",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    #[default]
    Closedform,
    Oracle,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Closedform => "closedform",
            Engine::Oracle => "oracle",
        }
    }
}

/// Which closed-form expressions the closedform engine evaluates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Formulas {
    #[default]
    Derived,
    Printed,
}

/// Assembly of `⟨X̂²⟩` used by χ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum X2 {
    #[default]
    Printed,
    Operator,
}

/// Parsed config file: raw values keyed by normalized name.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

fn normalize_key(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            let key = normalize_key(key);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", n + 1)));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `flag` if given, otherwise the parsed config value.
    pub fn pick<T>(
        &self,
        flag: Option<T>,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key).map(|v| parse(v).map_err(|e| CliError::Config(format!("key `{key}`: {e}")))).transpose()
    }
}

/// Parses enum values the same way clap does.
pub fn parse_enum<T: ValueEnum>(s: &str) -> Result<T, String> {
    T::from_str(s, false)
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    usize::from_str(s.trim()).map_err(|e| format!("`{s}`: {e}"))
}

/// Reals, optionally written as multiples of π: `0.3`, `pi/2`, `8pi/9`, `-2*pi`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let text = s.trim().to_lowercase().replace('π', "pi");
    let bad = || format!("`{s}` is not a number or a multiple of pi");
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text.as_str(), None),
    };
    let numerator = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match den {
        Some(d) => numerator / d.parse::<f64>().map_err(|_| bad())?,
        None => numerator,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// `xmin,xmax,ymin,ymax,nx,ny`.
pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(format!("`{s}`: expected xmin,xmax,ymin,ymax,nx,ny"));
    }
    let bounds = parts[..4].iter().map(|p| parse_real(p)).collect::<Result<Vec<_>, _>>()?;
    let nx = parse_usize(parts[4])?;
    let ny = parse_usize(parts[5])?;
    GridSpec::new(bounds[0], bounds[1], bounds[2], bounds[3], nx, ny).map_err(|e| e.to_string())
}

/// Flags shared by every subcommand, before merging with a config file.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct GlobalArgs {
    /// Flat key = value file; flags override its entries
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (sweep, field, validate) or directory (figure)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub engine: Option<Engine>,
    /// a-mode Fock cutoff for the oracle engine
    #[arg(long, global = true, value_parser = parse_usize)]
    pub cutoff: Option<usize>,
    /// Field grid as xmin,xmax,ymin,ymax,nx,ny
    #[arg(long, global = true, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Coupling strength Γ
    #[arg(long = "Gamma", global = true, value_parser = parse_real, allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// Preselection angle α (weak value tan(α/2) e^{iδ})
    #[arg(long = "alpha", global = true, value_parser = parse_real, allow_hyphen_values = true)]
    pub pre_angle: Option<f64>,
    /// Preselection phase δ
    #[arg(long = "delta", global = true, value_parser = parse_real, allow_hyphen_values = true)]
    pub pre_phase: Option<f64>,
    /// Phase φ of the LG component
    #[arg(long = "phi", global = true, value_parser = parse_real, allow_hyphen_values = true)]
    pub mode_phase: Option<f64>,
    /// Weight γ of the LG component
    #[arg(long = "gamma", global = true, value_parser = parse_real, allow_hyphen_values = true)]
    pub mode_weight: Option<f64>,
    /// Beam waist σ
    #[arg(long, global = true, value_parser = parse_real, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Closed-form expression set
    #[arg(long, global = true, value_enum)]
    pub formulas: Option<Formulas>,
    /// ⟨X²⟩ assembly used by chi
    #[arg(long, global = true, value_enum)]
    pub x2: Option<X2>,
}

/// Global settings after merging flags over the config file.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub engine: Engine,
    pub cutoff: Option<usize>,
    pub grid: Option<GridSpec>,
    /// Fixed parameters; not yet validated, sweeps override one of them.
    pub params: MeasurementParams,
    pub formulas: Formulas,
    pub x2: X2,
    pub file: ConfigFile,
}

impl RunConfig {
    pub fn resolve(args: GlobalArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let defaults = MeasurementParams::default();
        let real = |flag: Option<f64>, key: &str, fallback: f64| -> Result<f64, CliError> {
            Ok(file.pick(flag, key, parse_real)?.unwrap_or(fallback))
        };
        let params = MeasurementParams {
            coupling: real(args.coupling, "Gamma", defaults.coupling)?,
            pre_angle: real(args.pre_angle, "alpha", defaults.pre_angle)?,
            pre_phase: real(args.pre_phase, "delta", defaults.pre_phase)?,
            mode_phase: real(args.mode_phase, "phi", defaults.mode_phase)?,
            mode_weight: real(args.mode_weight, "gamma", defaults.mode_weight)?,
            sigma: real(args.sigma, "sigma", defaults.sigma)?,
        };
        let cutoff = file.pick(args.cutoff, "cutoff", parse_usize)?;
        if cutoff == Some(0) {
            return Err(CliError::Config("cutoff must be at least 1".into()));
        }
        Ok(Self {
            out: file.pick(args.out, "out", |s| Ok(PathBuf::from(s)))?,
            format: file.pick(args.format, "format", parse_enum)?.unwrap_or_default(),
            engine: file.pick(args.engine, "engine", parse_enum)?.unwrap_or_default(),
            cutoff,
            grid: file.pick(args.grid, "grid", parse_grid)?,
            params,
            formulas: file.pick(args.formulas, "formulas", parse_enum)?.unwrap_or_default(),
            x2: file.pick(args.x2, "x2", parse_enum)?.unwrap_or_default(),
            file,
        })
    }

    pub fn closed_form(&self) -> postsel::ClosedForm {
        let cf = match self.formulas {
            Formulas::Derived => postsel::ClosedForm::derived(),
            Formulas::Printed => postsel::ClosedForm::printed(),
        };
        cf.with_convention(self.convention())
    }

    pub fn convention(&self) -> PositionConvention {
        match self.x2 {
            X2::Printed => PositionConvention::Printed,
            X2::Operator => PositionConvention::Operator,
        }
    }

    /// Validated fixed parameters.
    pub fn checked_params(&self) -> Result<MeasurementParams, CliError> {
        self.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(self.params)
    }
}
