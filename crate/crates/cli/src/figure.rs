//! Data presets for the published figures.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;
use std::path::{Path, PathBuf};

use postsel::MeasurementParams;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::field::{self, Kind};
use crate::sweep::{self, Axis, Quantity, SweepSpec, SweepTable};

pub const NAMES: [&str; 13] =
    ["fig2", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig5", "fig6a", "fig6b", "fig6c", "fig7a", "fig7b"];

const ALPHA_WEAK: f64 = 8.0 * PI / 9.0;
const ALPHA_MAX: f64 = 0.95 * PI;

#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    /// Several sweeps of one quantity along one axis, stacked in one table.
    Sweep {
        file: String,
        quantity: Quantity,
        axis: Axis,
        range: (f64, f64, usize),
        series: Vec<MeasurementParams>,
    },
    Field {
        file: String,
        kind: Kind,
        params: MeasurementParams,
    },
    /// Explanatory text for a plot whose axis the model cannot provide.
    Stub {
        file: String,
        text: String,
    },
}

/// δ = 0, φ = π/2, γ = 1, σ = 1.
fn vortex(coupling: f64, pre_angle: f64) -> MeasurementParams {
    MeasurementParams::default().with_coupling(coupling).with_pre_angle(pre_angle).with_mode_phase(FRAC_PI_2)
}

/// δ = 0, φ = 0, γ = 1, σ = 1.
fn in_phase(coupling: f64, pre_angle: f64) -> MeasurementParams {
    MeasurementParams::default().with_coupling(coupling).with_pre_angle(pre_angle)
}

fn sweep(file: &str, quantity: Quantity, axis: Axis, range: (f64, f64, usize), series: Vec<MeasurementParams>) -> Job {
    Job::Sweep { file: file.to_string(), quantity, axis, range, series }
}

/// A stub for an r-axis panel plus the γ-axis sweep offered in its place.
fn r_axis(name: &str, quantity: Quantity, series: Vec<MeasurementParams>) -> Vec<Job> {
    let fallback = format!("{name}_gamma");
    let text = format!(
        "# {name}: {q} against r = sqrt(x^2 + y^2)\n\
         # {q} is a property of the whole pointer state and has no transverse-coordinate\n\
         # dependence in this model, so an r axis cannot be evaluated.\n\
         # {fallback} holds the same series swept over the LG weight gamma instead.\n",
        q = quantity.name(),
    );
    vec![
        Job::Stub { file: format!("{name}_r_axis.txt"), text },
        sweep(&fallback, quantity, Axis::ModeWeight, (0.0, 2.0, 41), series),
    ]
}

fn couplings(values: &[f64], pre_angle: f64) -> Vec<MeasurementParams> {
    values.iter().map(|&g| vortex(g, pre_angle)).collect()
}

fn angles(values: &[f64], coupling: f64) -> Vec<MeasurementParams> {
    values.iter().map(|&a| vortex(coupling, a)).collect()
}

pub fn preset(name: &str) -> Option<Vec<Job>> {
    let gammas = [0.0, 0.3, 1.0];
    let weak_angles = [FRAC_PI_4, FRAC_PI_2, ALPHA_WEAK];
    let alpha_axis = (0.0, ALPHA_MAX, 77);
    let coupling_axis = (0.0, 2.0, 41);
    let jobs = match name {
        "fig2" => {
            let mut jobs = Vec::new();
            for (row, &g) in gammas.iter().enumerate() {
                for (col, &a) in [PI / 12.0, 11.0 * PI / 12.0].iter().enumerate() {
                    jobs.push(Job::Field {
                        file: format!("fig2_r{}c{}", row + 1, col + 1),
                        kind: Kind::Intensity,
                        params: in_phase(g, a),
                    });
                }
            }
            jobs
        }
        "fig3a" => r_axis(name, Quantity::Q1, couplings(&gammas, ALPHA_WEAK)),
        "fig3b" => vec![sweep(name, Quantity::Q1, Axis::PreAngle, alpha_axis, couplings(&gammas, 0.0))],
        "fig3c" => r_axis(name, Quantity::Q2, couplings(&gammas, ALPHA_WEAK)),
        "fig3d" => vec![sweep(name, Quantity::Q2, Axis::PreAngle, alpha_axis, couplings(&gammas, 0.0))],
        "fig4a" => r_axis(name, Quantity::G2, couplings(&gammas, ALPHA_WEAK)),
        "fig4b" => vec![sweep(name, Quantity::G2, Axis::PreAngle, alpha_axis, couplings(&gammas, 0.0))],
        "fig5" => gammas
            .iter()
            .enumerate()
            .map(|(i, &g)| Job::Field {
                file: format!("fig5_{}", i + 1),
                kind: Kind::Wigner,
                params: in_phase(g, ALPHA_WEAK),
            })
            .collect(),
        "fig6a" => vec![sweep(name, Quantity::Chi, Axis::Coupling, coupling_axis, angles(&weak_angles, 0.0))],
        "fig6b" => r_axis(name, Quantity::Chi, angles(&weak_angles, 0.2)),
        "fig6c" => r_axis(name, Quantity::Chi, couplings(&[0.2, 0.5, 1.0], ALPHA_WEAK)),
        "fig7a" => vec![sweep(name, Quantity::Fidelity, Axis::Coupling, coupling_axis, angles(&weak_angles, 0.0))],
        "fig7b" => vec![sweep(name, Quantity::Fidelity, Axis::PreAngle, alpha_axis, couplings(&[0.3, 1.0, 2.0], 0.0))],
        _ => return None,
    };
    Some(jobs)
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Runs one sweep job; the series share the axis and are stacked in order.
pub fn sweep_table(
    quantity: Quantity,
    axis: Axis,
    range: (f64, f64, usize),
    series: &[MeasurementParams],
    cfg: &RunConfig,
) -> Result<SweepTable, CliError> {
    let mut table: Option<SweepTable> = None;
    for fixed in series {
        let spec = SweepSpec {
            quantity,
            axis,
            start: range.0,
            stop: range.1,
            steps: range.2,
            fixed: *fixed,
            engine: cfg.engine,
        };
        let part = sweep::run(&spec, cfg)?;
        match &mut table {
            Some(t) => t.rows.extend(part.rows),
            None => table = Some(part),
        }
    }
    table.ok_or_else(|| CliError::Config("empty figure series".into()))
}

/// Writes every file of preset `name` into `dir` and returns their paths.
pub fn run(name: &str, dir: &Path, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let jobs = preset(name)
        .ok_or_else(|| CliError::Config(format!("unknown figure `{name}`; expected one of {}", NAMES.join(", "))))?;
    fs::create_dir_all(dir)?;
    let ext = extension(cfg.format);
    let grid = cfg.grid.unwrap_or_else(field::default_grid);
    let mut written = Vec::new();
    for job in jobs {
        match job {
            Job::Sweep { file, quantity, axis, range, series } => {
                let path = dir.join(format!("{file}.{ext}"));
                sweep_table(quantity, axis, range, &series, cfg)?.write(Some(&path), cfg.format)?;
                written.push(path);
            }
            Job::Field { file, kind, params } => {
                let path = dir.join(format!("{file}.{ext}"));
                let f = field::compute(kind, &params, &grid, cfg)?;
                written.extend(field::write(kind, cfg.engine, &params, &f, &path, cfg.format)?);
            }
            Job::Stub { file, text } => {
                let path = dir.join(file);
                fs::write(&path, text)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_has_a_preset() {
        for name in NAMES {
            let jobs = preset(name).unwrap();
            assert!(!jobs.is_empty(), "{name}");
        }
        assert!(preset("fig8").is_none());
    }

    #[test]
    fn r_axis_panels_are_stubbed() {
        for name in ["fig3a", "fig3c", "fig4a", "fig6b", "fig6c"] {
            let jobs = preset(name).unwrap();
            assert!(matches!(jobs[0], Job::Stub { .. }), "{name}");
            assert!(matches!(jobs[1], Job::Sweep { axis: Axis::ModeWeight, .. }), "{name}");
        }
    }

    #[test]
    fn fig2_corner_is_the_large_weak_value_at_unit_coupling() {
        let jobs = preset("fig2").unwrap();
        let Job::Field { file, params, .. } = &jobs[5] else { panic!() };
        assert_eq!(file, "fig2_r3c2");
        assert_eq!(params.coupling, 1.0);
        assert!((params.weak_value().unwrap().value.re - 7.596).abs() < 1e-3);
        assert_eq!((params.mode_phase, params.pre_phase, params.sigma, params.mode_weight), (0.0, 0.0, 1.0, 1.0));
    }

    #[test]
    fn captions_fix_phases() {
        for name in ["fig3b", "fig3d", "fig4b", "fig6a", "fig7a", "fig7b"] {
            let Job::Sweep { series, .. } = &preset(name).unwrap()[0] else { panic!() };
            for p in series {
                assert_eq!((p.pre_phase, p.mode_phase), (0.0, FRAC_PI_2), "{name}");
            }
        }
    }
}
