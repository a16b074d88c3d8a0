//! One-dimensional parameter sweeps of a scalar quantity.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use postsel::closedform::g2_from_moments;
use postsel::oracle::{oracle_quantities, SNR_SHOTS};
use postsel::weakmeas::default_cutoff;
use postsel::{Error, MeasurementParams};

use crate::config::{parse_enum, parse_real, parse_usize, Engine, Format, RunConfig};
use crate::error::CliError;
use crate::output::{g17, g17_opt, sink, write_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Quantity {
    #[value(name = "Q1")]
    #[serde(rename = "Q1")]
    Q1,
    #[value(name = "Q2")]
    #[serde(rename = "Q2")]
    Q2,
    #[value(name = "g2")]
    #[serde(rename = "g2")]
    G2,
    #[value(name = "chi")]
    #[serde(rename = "chi")]
    Chi,
    #[value(name = "fidelity")]
    #[serde(rename = "fidelity")]
    Fidelity,
    #[value(name = "lambda")]
    #[serde(rename = "lambda")]
    Lambda,
    /// Real part of the weak value ⟨σx⟩w
    #[value(name = "weak_value")]
    #[serde(rename = "weak_value")]
    WeakValue,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Q1 => "Q1",
            Quantity::Q2 => "Q2",
            Quantity::G2 => "g2",
            Quantity::Chi => "chi",
            Quantity::Fidelity => "fidelity",
            Quantity::Lambda => "lambda",
            Quantity::WeakValue => "weak_value",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Axis {
    #[value(name = "Gamma")]
    #[serde(rename = "Gamma")]
    Coupling,
    #[value(name = "alpha")]
    #[serde(rename = "alpha")]
    PreAngle,
    #[value(name = "gamma")]
    #[serde(rename = "gamma")]
    ModeWeight,
    #[value(name = "phi")]
    #[serde(rename = "phi")]
    ModePhase,
    #[value(name = "delta")]
    #[serde(rename = "delta")]
    PrePhase,
}

impl Axis {
    pub fn set(self, p: MeasurementParams, v: f64) -> MeasurementParams {
        match self {
            Axis::Coupling => p.with_coupling(v),
            Axis::PreAngle => p.with_pre_angle(v),
            Axis::ModeWeight => p.with_mode_weight(v),
            Axis::ModePhase => p.with_mode_phase(v),
            Axis::PrePhase => p.with_pre_phase(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub fixed: MeasurementParams,
    pub engine: Engine,
}

/// Sweep flags, before merging with the config file.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    #[arg(long, value_enum)]
    pub axis: Option<Axis>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub start: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub stop: Option<f64>,
    /// Number of samples, endpoints included
    #[arg(long, value_parser = parse_usize)]
    pub steps: Option<usize>,
}

fn required<T>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing `{key}` (flag --{key} or config key)")))
}

impl SweepSpec {
    pub fn from_args(args: SweepArgs, cfg: &RunConfig) -> Result<Self, CliError> {
        let f = &cfg.file;
        let spec = Self {
            quantity: required(f.pick(args.quantity, "quantity", parse_enum)?, "quantity")?,
            axis: required(f.pick(args.axis, "axis", parse_enum)?, "axis")?,
            start: required(f.pick(args.start, "start", parse_real)?, "start")?,
            stop: required(f.pick(args.stop, "stop", parse_real)?, "stop")?,
            steps: required(f.pick(args.steps, "steps", parse_usize)?, "steps")?,
            fixed: cfg.params,
            engine: cfg.engine,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Rejects specs whose range leaves the parameter domain.
    pub fn check(&self) -> Result<(), CliError> {
        if self.steps < 2 {
            return Err(CliError::Config(format!("steps must be at least 2, got {}", self.steps)));
        }
        for v in [self.start, self.stop] {
            self.axis.set(self.fixed, v).validate().map_err(|e| CliError::Config(format!("sweep endpoint: {e}")))?;
        }
        Ok(())
    }

    pub fn axis_values(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(
                |i| {
                    if i == last {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * (i as f64 / last as f64)
                    }
                },
            )
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamsOut {
    #[serde(rename = "Gamma")]
    pub coupling: f64,
    pub alpha: f64,
    pub delta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub sigma: f64,
}

impl From<MeasurementParams> for ParamsOut {
    fn from(p: MeasurementParams) -> Self {
        Self {
            coupling: p.coupling,
            alpha: p.pre_angle,
            delta: p.pre_phase,
            phi: p.mode_phase,
            gamma: p.mode_weight,
            sigma: p.sigma,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub axis_value: f64,
    pub value: Option<f64>,
    pub params: ParamsOut,
    pub reason: Option<&'static str>,
}

/// Rows of one or more sweeps of the same quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub quantity: Quantity,
    pub axis: Axis,
    pub engine: &'static str,
    pub rows: Vec<Row>,
}

/// Short tag for a quantity that is undefined at a point.
pub fn reason_code(e: &Error) -> &'static str {
    match e {
        Error::UndefinedCorrelation { .. } => "undefined-correlation",
        Error::DegenerateShift(_) => "degenerate-shift",
        Error::VarianceCollapse { .. } => "variance-collapse",
        Error::DestructiveInterference(_) => "destructive-interference",
        Error::WignerResidue(_) => "wigner-residue",
        _ => "error",
    }
}

/// Evaluates `quantity` at `p`. Errors other than parameter errors are
/// returned as `Ok(Err(reason))` so they become data.
pub fn evaluate(
    quantity: Quantity,
    p: &MeasurementParams,
    cfg: &RunConfig,
    engine: Engine,
) -> Result<Result<f64, &'static str>, CliError> {
    p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let value: postsel::Result<f64> = match (engine, quantity) {
        (_, Quantity::WeakValue) => p.weak_value().map(|w| w.value.re),
        (Engine::Closedform, q) => {
            let cf = cfg.closed_form();
            match q {
                Quantity::Q1 => cf.squeezing(p).map(|s| s.q1),
                Quantity::Q2 => cf.squeezing(p).map(|s| s.q2),
                Quantity::G2 => cf.g2_cross(p),
                Quantity::Chi => cf.snr_ratio(p, SNR_SHOTS).map(|s| s.chi),
                Quantity::Fidelity => cf.fidelity(p),
                Quantity::Lambda => cf.lambda(p),
                Quantity::WeakValue => unreachable!(),
            }
        }
        (Engine::Oracle, q) => {
            let na = cfg.cutoff.unwrap_or_else(|| default_cutoff(p.coupling));
            oracle_quantities(p, na).and_then(|r| match q {
                Quantity::Q1 => Ok(r.squeezing.q1),
                Quantity::Q2 => Ok(r.squeezing.q2),
                Quantity::G2 => g2_from_moments(&r.moments),
                Quantity::Chi => r.chi_with(cfg.convention()),
                Quantity::Fidelity => Ok(r.fidelity),
                Quantity::Lambda => Ok(r.lambda),
                Quantity::WeakValue => unreachable!(),
            })
        }
    };
    match value {
        Ok(v) => Ok(Ok(v)),
        Err(e @ Error::Parameter { .. }) => Err(e.into()),
        Err(e) => Ok(Err(reason_code(&e))),
    }
}

pub fn run(spec: &SweepSpec, cfg: &RunConfig) -> Result<SweepTable, CliError> {
    spec.check()?;
    let rows = spec
        .axis_values()
        .into_par_iter()
        .map(|v| {
            let p = spec.axis.set(spec.fixed, v);
            let value = evaluate(spec.quantity, &p, cfg, spec.engine)?;
            Ok(Row { axis_value: v, value: value.ok(), params: p.into(), reason: value.err() })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(SweepTable { quantity: spec.quantity, axis: spec.axis, engine: spec.engine.name(), rows })
}

impl SweepTable {
    pub fn header(&self) -> [&'static str; 10] {
        ["axis_value", self.quantity.name(), "engine", "Gamma", "alpha", "delta", "phi", "gamma", "sigma", "reason"]
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.header())?;
        for r in &self.rows {
            let p = &r.params;
            out.write_record([
                g17(r.axis_value),
                g17_opt(r.value),
                self.engine.to_string(),
                g17(p.coupling),
                g17(p.alpha),
                g17(p.delta),
                g17(p.phi),
                g17(p.gamma),
                g17(p.sigma),
                r.reason.unwrap_or_default().to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write(&self, path: Option<&Path>, format: Format) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(sink(path)?),
            Format::Json => write_json(path, self),
        }
    }
}
