//! Command implementations behind the `matconf` binary.

pub mod chern;
pub mod config;
pub mod curvature;
pub mod numerics;
pub mod specfun;
pub mod symbols;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use matconf_chern::ChernError;
use matconf_core::specfun::SpecFunError;
use matconf_core::symcalc::SymbolError;
use matconf_core::xi_integrate::XiError;
use matconf_numerics::NumericsError;
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "matconf", version, about = "Matrix conformal geometry of the noncommutative two-torus")]
pub struct Cli {
    /// TOML or JSON file with the command's parameters; flags given on the
    /// command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parametrix identities, symbol displays and trace cancellations.
    SymbolsVerify(symbols::SymbolsArgs),
    /// Heat-trace fits of ζ(0) over a cutoff sweep.
    Zeta(numerics::ZetaArgs),
    /// ζ_{D_h}(0) against ζ_D(0) with a pass/fail verdict.
    GbCheck(numerics::ZetaArgs),
    /// Curvature density sampled on a grid.
    Curvature(curvature::CurvatureArgs),
    /// Spectral functions G, F, F_delta, Q.
    Specfun(specfun::SpecfunArgs),
    /// Chern numbers of the reference projections.
    Chern(chern::ChernArgs),
    /// Chern numbers of the eigenline bundles of a sampled Hermitian field.
    DiagCheck(chern::DiagArgs),
    /// Writes a sample Hermitian field in the diag-check CSV format.
    FieldExample(chern::FieldExampleArgs),
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    VerificationFailure,
    NumericalFailure,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::VerificationFailure => 2,
            Status::NumericalFailure => 3,
        }
    }

    pub fn worst(self, other: Status) -> Status {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical quality failure: {0}")]
    Numerical(String),
    #[error("verification failure: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Input(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> CliError {
        match e {
            NumericsError::Eigen | NumericsError::Window { .. } | NumericsError::FitResidual { .. } => {
                CliError::Numerical(format!("numerics: {e}"))
            }
            _ => CliError::Input(format!("numerics: {e}")),
        }
    }
}

impl From<ChernError> for CliError {
    fn from(e: ChernError) -> CliError {
        match e {
            ChernError::GapClosure { .. } | ChernError::Resolution { .. } | ChernError::Eigen => {
                CliError::Numerical(format!("chern: {e}"))
            }
            _ => CliError::Input(format!("chern: {e}")),
        }
    }
}

impl From<SymbolError> for CliError {
    fn from(e: SymbolError) -> CliError {
        CliError::Verification(format!("symcalc: {e}"))
    }
}

impl From<XiError> for CliError {
    fn from(e: XiError) -> CliError {
        CliError::Verification(format!("xi_integrate: {e}"))
    }
}

impl From<SpecFunError> for CliError {
    fn from(e: SpecFunError) -> CliError {
        CliError::Input(format!("specfun: {e}"))
    }
}

pub fn run(cli: Cli) -> Result<Status, CliError> {
    let file = cli.config.as_deref();
    match cli.command {
        Command::SymbolsVerify(a) => symbols::run(a, file),
        Command::Zeta(a) => numerics::run_zeta(a, file),
        Command::GbCheck(a) => numerics::run_gb_check(a, file),
        Command::Curvature(a) => curvature::run(a, file),
        Command::Specfun(a) => specfun::run(a),
        Command::Chern(a) => chern::run_chern(a, file),
        Command::DiagCheck(a) => chern::run_diag(a, file),
        Command::FieldExample(a) => chern::run_field_example(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("matconf").chain(args.iter().copied()))
    }

    #[test]
    fn statuses_order_by_exit_code() {
        assert_eq!(Status::Pass.worst(Status::NumericalFailure), Status::NumericalFailure);
        assert_eq!(Status::NumericalFailure.worst(Status::VerificationFailure), Status::NumericalFailure);
        assert_eq!(Status::VerificationFailure.code(), 2);
        assert_eq!(CliError::Input("x".into()).code(), 4);
        assert_eq!(CliError::from(NumericsError::Eigen).code(), 3);
        assert_eq!(CliError::from(ChernError::GapClosure { min_gap: 0.0, threshold: 1e-6 }).code(), 3);
    }

    #[test]
    fn subcommands_parse() {
        let cli = parse(&["gb-check", "--profile", "P2,P3", "--N", "8,12", "--n", "2"]).unwrap();
        let Command::GbCheck(a) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(a.profile, Some(vec!["P2".to_string(), "P3".to_string()]));
        assert_eq!(a.cutoffs, Some(vec![8, 12]));
        assert!(parse(&["specfun", "eval", "--fn", "G", "--s", "1"]).is_ok());
        assert!(parse(&["chern", "--case", "ball"]).is_err());
        assert!(parse(&["frobnicate"]).is_err());
    }

    #[test]
    fn specfun_and_chern_run() {
        let cli = parse(&["specfun", "eval", "--fn", "F", "--s", "1"]).unwrap();
        assert_eq!(run(cli).unwrap(), Status::Pass);
        let cli = parse(&["specfun", "eval", "--fn", "Q", "--s", "1"]).unwrap();
        assert_eq!(run(cli).unwrap_err().code(), 4);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("bott.json");
        let cli = parse(&["chern", "--case", "bott", "--grid", "80x40", "--out", out.to_str().unwrap()]).unwrap();
        assert_eq!(run(cli).unwrap(), Status::Pass);
        let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(report["report"]["chern"], -1);
        assert!(config::config_path(&out).exists());
    }

    #[test]
    fn config_file_supplies_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("chern.toml");
        std::fs::write(&cfg, "case = \"torus\"\ngrid = \"200x64\"\n").unwrap();
        let out = dir.path().join("torus.json");
        let cli = parse(&["--config", cfg.to_str().unwrap(), "chern", "--out", out.to_str().unwrap()]).unwrap();
        assert_eq!(run(cli).unwrap(), Status::Pass);
        let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(report["config"]["grid"], "200x64");
        assert_eq!(report["report"]["surface"]["kind"], "torus");

        std::fs::write(&cfg, "cases = \"torus\"\n").unwrap();
        let cli = parse(&["--config", cfg.to_str().unwrap(), "chern"]).unwrap();
        assert_eq!(run(cli).unwrap_err().code(), 4);
    }
}
