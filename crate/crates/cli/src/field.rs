//! Intensity and Wigner fields on a rectangular grid.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use postsel::oracle::{oracle_intensity, oracle_wigner};
use postsel::weakmeas::{default_cutoff, Pipeline};
use postsel::{DisplaceMethod, GridSpec, MeasurementParams, ScalarField};

use crate::config::{Engine, Format, RunConfig};
use crate::error::CliError;
use crate::output::{g17, sink, write_json};
use crate::sweep::ParamsOut;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Intensity,
    Wigner,
}

impl Kind {
    fn second_axis(self) -> &'static str {
        match self {
            Kind::Intensity => "y",
            Kind::Wigner => "p",
        }
    }
}

pub fn default_grid() -> GridSpec {
    GridSpec::square(6.0, 241).expect("valid default grid")
}

/// Samples `kind` at `p` with the configured engine.
pub fn compute(
    kind: Kind,
    p: &MeasurementParams,
    grid: &GridSpec,
    cfg: &RunConfig,
) -> Result<ScalarField<f64>, CliError> {
    p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let field = match cfg.engine {
        Engine::Closedform => {
            let cf = cfg.closed_form();
            match kind {
                Kind::Intensity => cf.intensity_field(p, grid)?,
                Kind::Wigner => cf.wigner_field(p, grid)?,
            }
        }
        Engine::Oracle => {
            let na = cfg.cutoff.unwrap_or_else(|| default_cutoff(p.coupling));
            let run = Pipeline::run(p, na, DisplaceMethod::ClosedForm)?;
            match kind {
                Kind::Intensity => oracle_intensity(run.final_state(), grid)?,
                Kind::Wigner => oracle_wigner(run.final_state(), grid)?,
            }
        }
    };
    Ok(field)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    kind: Kind,
    engine: &'static str,
    params: ParamsOut,
    grid: &'a GridSpec,
    integral: f64,
    min: f64,
    max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<Vec<f64>>>,
}

fn sidecar<'a>(kind: Kind, engine: Engine, p: &MeasurementParams, field: &'a ScalarField<f64>) -> Sidecar<'a> {
    Sidecar {
        kind,
        engine: engine.name(),
        params: (*p).into(),
        grid: &field.grid,
        integral: field.integral(),
        min: field.min(),
        max: field.max(),
        values: None,
    }
}

pub fn write_csv<W: Write>(kind: Kind, field: &ScalarField<f64>, w: W) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", kind.second_axis(), "value"])?;
    for ((i, j), v) in field.values.indexed_iter() {
        out.write_record([g17(field.grid.x(i)), g17(field.grid.y(j)), g17(*v)])?;
    }
    out.flush()?;
    Ok(())
}

/// `data.csv` → `data.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes the field as CSV plus a JSON sidecar, or as one JSON document.
/// Returns the files written.
pub fn write(
    kind: Kind,
    engine: Engine,
    p: &MeasurementParams,
    field: &ScalarField<f64>,
    path: &Path,
    format: Format,
) -> Result<Vec<PathBuf>, CliError> {
    let mut meta = sidecar(kind, engine, p, field);
    match format {
        Format::Csv => {
            let side = sidecar_path(path);
            if side == path {
                return Err(CliError::Config(format!(
                    "{} would be overwritten by its own sidecar; use a .csv name",
                    path.display()
                )));
            }
            write_csv(kind, field, sink(Some(path))?)?;
            write_json(Some(&side), &meta)?;
            Ok(vec![path.to_path_buf(), side])
        }
        Format::Json => {
            meta.values = Some(field.values.outer_iter().map(|row| row.to_vec()).collect());
            write_json(Some(path), &meta)?;
            Ok(vec![path.to_path_buf()])
        }
    }
}
