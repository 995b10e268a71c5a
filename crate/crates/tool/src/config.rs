//! Config files, report envelopes and output helpers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{CliError, VERSION};

/// Parses a TOML (by extension) or JSON parameter file.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    } else {
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Same, for a file that must exist.
pub fn load_required<T: DeserializeOwned + Default>(path: &Path) -> Result<T, CliError> {
    load(Some(path))
}

/// Every report: toolkit version, resolved parameters, then the payload.
#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub report: &'a R,
}

pub fn envelope<'a, C: Serialize, R: Serialize>(command: &'a str, config: &'a C, report: &'a R) -> Envelope<'a, C, R> {
    Envelope { toolkit: "matconf", version: VERSION, command, config, report }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Input(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// `report.json` → `report.config.json`.
pub fn config_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}.config.json"))
}

/// Writes the report to `out` (or stdout) and the resolved config next to it.
pub fn emit<C: Serialize, R: Serialize>(command: &str, config: &C, report: &R, out: Option<&Path>) -> Result<(), CliError> {
    let body = to_json(&envelope(command, config, report))?;
    match out {
        Some(path) => {
            fs::write(path, body)?;
            fs::write(config_path(path), to_json(config)?)?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

/// `"200x100"` → `(200, 100)`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Input(format!("grid {s:?} is not of the form AxB"));
    let (a, b) = s.split_once(['x', 'X', '×']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Worker count from `MATCONF_WORKERS`, default 1.
pub fn workers() -> Result<usize, CliError> {
    match std::env::var("MATCONF_WORKERS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Input(format!("MATCONF_WORKERS={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_and_paths() {
        assert_eq!(parse_grid("200x100").unwrap(), (200, 100));
        assert_eq!(parse_grid("8×6").unwrap(), (8, 6));
        assert!(parse_grid("200").is_err());
        assert_eq!(config_path(Path::new("/tmp/r.json")), PathBuf::from("/tmp/r.config.json"));
    }
}
