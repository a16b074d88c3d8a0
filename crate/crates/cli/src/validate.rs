//! Closed forms against the state-vector oracle.

use clap::ValueEnum;

use postsel::oracle::{compare, cutoff_self_check, validation_set, CompareOptions, Tolerances, DEFAULT_WHITELIST};
use postsel::{GridSpec, ValidationReport};

use crate::config::{parse_enum, parse_real, RunConfig};
use crate::error::CliError;
use crate::output::write_json;

/// Largest oracle change tolerated when the cutoff is doubled.
pub const CUTOFF_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum PointSet {
    /// The built-in 200-point low-discrepancy set
    #[default]
    Halton,
    /// The single point given by the parameter flags, with Gamma = 0
    Identity,
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct ValidateArgs {
    #[arg(long, value_parser = tolerance)]
    pub abs_tol: Option<f64>,
    #[arg(long, value_parser = tolerance)]
    pub rel_tol: Option<f64>,
    /// Comma-separated quantities allowed to fail; empty for none
    #[arg(long)]
    pub whitelist: Option<String>,
    #[arg(long, value_enum)]
    pub set: Option<PointSet>,
}

fn tolerance(s: &str) -> Result<f64, String> {
    let v = parse_real(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("tolerance must be non-negative, got {v}"))
    }
}

pub fn options(args: &ValidateArgs, cfg: &RunConfig) -> Result<(CompareOptions, PointSet), CliError> {
    let f = &cfg.file;
    let defaults = Tolerances::default();
    let abs = f.pick(args.abs_tol, "abs-tol", tolerance)?;
    let rel = f.pick(args.rel_tol, "rel-tol", tolerance)?;
    let whitelist = match f.pick(args.whitelist.clone(), "whitelist", |s| Ok(s.to_string()))? {
        Some(list) => list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect(),
        None => DEFAULT_WHITELIST.iter().map(|s| s.to_string()).collect(),
    };
    let opts = CompareOptions {
        tolerances: Tolerances { abs: abs.unwrap_or(defaults.abs), rel: rel.unwrap_or(defaults.rel) },
        whitelist,
        cutoff: cfg.cutoff,
        field_grid: Some(cfg.grid.unwrap_or(GridSpec::square(6.0, 41)?)),
    };
    let set = f.pick(args.set, "set", parse_enum)?.unwrap_or_default();
    Ok((opts, set))
}

pub fn run(args: &ValidateArgs, cfg: &RunConfig) -> Result<ValidationReport, CliError> {
    let (opts, set) = options(args, cfg)?;
    let points = match set {
        PointSet::Halton => validation_set(),
        PointSet::Identity => vec![cfg.params.with_coupling(0.0)],
    };
    for p in &points {
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    }
    let check = cutoff_self_check(&points, opts.cutoff)?;
    log::info!("cutoff doubling: max change {:e} in {} at point {}", check.max_change, check.quantity, check.point);
    let mut report = compare(&points, &opts)?;
    report.cutoff_check = Some(check);
    write_json(cfg.out.as_deref(), &report)?;
    summarize(&report);

    let check = report.cutoff_check.as_ref().expect("set above");
    if check.max_change.is_nan() || check.max_change >= CUTOFF_TOLERANCE {
        return Err(CliError::Validation(format!(
            "doubling the cutoff changes {} by {:e}",
            check.quantity, check.max_change
        )));
    }
    if !report.passed() {
        let failing: Vec<&str> =
            report.summary.iter().filter(|(_, s)| s.fail > 0 && !s.whitelisted).map(|(q, _)| q.as_str()).collect();
        return Err(CliError::Validation(format!("quantities outside tolerance: {}", failing.join(", "))));
    }
    Ok(report)
}

fn summarize(report: &ValidationReport) {
    for (q, s) in &report.summary {
        let tag = match (s.fail, s.whitelisted) {
            (0, _) => "ok",
            (_, true) => "whitelisted",
            _ => "FAIL",
        };
        eprintln!(
            "{q:>16}  {tag:<11} pass {:>4}  fail {:>4}  max abs {:.3e}  max rel {:.3e}",
            s.pass, s.fail, s.max_abs_delta, s.max_rel_delta
        );
    }
}
