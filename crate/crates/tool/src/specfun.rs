//! `specfun eval` and `specfun table`.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use matconf_core::specfun::{log_grid, table, SpectralFunction};
use serde::Serialize;

use crate::config::envelope;
use crate::{CliError, Status};

#[derive(Args, Debug)]
pub struct SpecfunArgs {
    #[command(subcommand)]
    pub action: SpecfunAction,
}

#[derive(Debug, Subcommand)]
pub enum SpecfunAction {
    /// One value; Q needs both `--s` and `--t`.
    Eval {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// CSV over a log-spaced grid.
    Table {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, default_value_t = 1e-3)]
        lo: f64,
        #[arg(long, default_value_t = 1e3)]
        hi: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        /// Second-argument grid size for Q (same range).
        #[arg(long, default_value_t = 13)]
        t_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn function(name: &str) -> Result<SpectralFunction, CliError> {
    SpectralFunction::from_name(name).ok_or_else(|| CliError::Input(format!("unknown function {name:?}; expected G, F, F_delta or Q")))
}

/// Value of `name` at `s` (and `t` for Q).
pub fn eval(name: &str, s: f64, t: Option<f64>) -> Result<f64, CliError> {
    let f = function(name)?;
    Ok(match (f.arity(), t) {
        (1, None) => f.eval(s)?,
        (2, Some(t)) => f.eval2(s, t)?,
        (1, Some(_)) => return Err(CliError::Input(format!("{} takes one argument", f.name()))),
        _ => return Err(CliError::Input(format!("{} needs --t", f.name()))),
    })
}

#[derive(Serialize)]
struct EvalReport<'a> {
    function: &'a str,
    s: f64,
    t: Option<f64>,
    value: f64,
}

pub fn run(args: SpecfunArgs) -> Result<Status, CliError> {
    match args.action {
        SpecfunAction::Eval { function: name, s, t, json } => {
            let value = eval(&name, s, t)?;
            if json {
                let cfg = serde_json::json!({ "fn": name, "s": s, "t": t });
                let r = EvalReport { function: &name, s, t, value };
                println!("{}", serde_json::to_string_pretty(&envelope("specfun eval", &cfg, &r)).unwrap_or_default());
            } else {
                println!("{value:.15}");
            }
        }
        SpecfunAction::Table { function: name, lo, hi, points, t_points, out } => {
            if !(lo > 0.0 && hi > lo) {
                return Err(CliError::Input(format!("bad range [{lo}, {hi}]")));
            }
            let f = function(&name)?;
            let rows = table(f, &log_grid(lo, hi, points), &log_grid(lo, hi, t_points))?;
            let sink: Box<dyn std::io::Write> = match &out {
                Some(p) => Box::new(std::fs::File::create(p)?),
                None => Box::new(std::io::stdout()),
            };
            let mut w = csv::Writer::from_writer(sink);
            for r in &rows {
                w.serialize(r).map_err(|e| CliError::Input(format!("csv: {e}")))?;
            }
            w.flush()?;
        }
    }
    Ok(Status::Pass)
}
