//! `postsel`: sweeps, fields, figure data and validation from the command line.

mod config;
mod error;
mod field;
mod figure;
mod output;
mod sweep;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_enum, GlobalArgs, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "postsel", version, about = "Postselected von Neumann measurement on LG-superposition pointers")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep one scalar quantity along one parameter axis
    Sweep(sweep::SweepArgs),
    /// Sample an intensity or Wigner field on a grid
    Field {
        #[arg(long, value_enum)]
        kind: Option<field::Kind>,
    },
    /// Compare the closed forms with the state-vector oracle
    Validate(validate::ValidateArgs),
    /// Write the data behind a figure into the --out directory
    Figure {
        /// One of fig2, fig3a..fig3d, fig4a, fig4b, fig5, fig6a..fig6c, fig7a, fig7b
        name: String,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli.global)?;
    match cli.command {
        Command::Sweep(args) => {
            let spec = sweep::SweepSpec::from_args(args, &cfg)?;
            sweep::run(&spec, &cfg)?.write(cfg.out.as_deref(), cfg.format)
        }
        Command::Field { kind } => {
            let kind = cfg
                .file
                .pick(kind, "kind", parse_enum)?
                .ok_or_else(|| CliError::Config("missing `kind` (intensity or wigner)".into()))?;
            let out = cfg.out.clone().ok_or_else(|| CliError::Config("field needs --out".into()))?;
            let params = cfg.checked_params()?;
            let grid = cfg.grid.unwrap_or_else(field::default_grid);
            let f = field::compute(kind, &params, &grid, &cfg)?;
            field::write(kind, cfg.engine, &params, &f, &out, cfg.format)?;
            Ok(())
        }
        Command::Validate(args) => validate::run(&args, &cfg).map(|_| ()),
        Command::Figure { name } => {
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
            for path in figure::run(&name, &dir, &cfg)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("postsel: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn case_sensitive_parameter_flags() {
        let cli =
            Cli::try_parse_from(["postsel", "sweep", "--Gamma", "0.3", "--gamma", "2", "--alpha", "8pi/9"]).unwrap();
        assert_eq!(cli.global.coupling, Some(0.3));
        assert_eq!(cli.global.mode_weight, Some(2.0));
        assert_eq!(cli.global.pre_angle, Some(8.0 * std::f64::consts::PI / 9.0));
    }
}
