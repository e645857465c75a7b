//! Result serialization: wraps a command's output in the stable envelope,
//! picks JSON or CSV, and writes to standard output or a file. Relative
//! output paths resolve against MODULAR_BELL_OUT_DIR when it is set.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::commands::CommandOutput;
use crate::{Failure, Format};

pub const ARTIFACT_VERSION: u64 = 1;

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_owned();
    }
    match env::var_os("MODULAR_BELL_OUT_DIR") {
        Some(dir) if !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_owned(),
    }
}

/// Renders the result and writes it out. Returns the process exit code:
/// 0, or 2 when a check battery reported a numerical failure.
pub fn emit(
    format: Option<Format>,
    out: Option<&Path>,
    body: &CommandOutput,
    wall_time: f64,
) -> Result<u8, Failure> {
    let format = format.unwrap_or(if body.csv.is_some() { Format::Csv } else { Format::Json });
    let payload = match format {
        Format::Csv => body
            .csv
            .clone()
            .ok_or_else(|| {
                Failure::Config(format!(
                    "csv output is only available for surface grids, not {}",
                    body.subcommand
                ))
            })?,
        Format::Json => {
            let envelope = json!({
                "artifact_version": ARTIFACT_VERSION,
                "subcommand": body.subcommand,
                "inputs": body.inputs,
                "outputs": body.outputs,
                "error_estimates": body.error_estimates,
                "wall_time": wall_time,
            });
            let mut text = serde_json::to_string_pretty(&envelope)
                .map_err(|e| Failure::Config(format!("serialization failed: {e}")))?;
            text.push('\n');
            text
        }
    };
    match out {
        Some(path) => {
            let target = resolve_out(path);
            fs::write(&target, payload).map_err(|e| {
                Failure::Config(format!("cannot write {}: {e}", target.display()))
            })?;
        }
        None => {
            use std::io::Write;
            // A closed pipe downstream (e.g. piping a grid into head) is not
            // an error worth a panic or a nonzero exit.
            if let Err(e) = std::io::stdout().write_all(payload.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(Failure::Config(format!("cannot write to stdout: {e}")));
                }
            }
        }
    }
    Ok(if body.numerical_failure { 2 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(csv: Option<String>, numerical_failure: bool) -> CommandOutput {
        CommandOutput {
            subcommand: "qm-chsh",
            inputs: json!({}),
            outputs: json!({}),
            error_estimates: json!({}),
            csv,
            numerical_failure,
        }
    }

    #[test]
    fn csv_is_rejected_for_scalar_results() {
        let r = emit(Some(Format::Csv), None, &body(None, false), 0.0);
        assert!(matches!(r, Err(Failure::Config(_))));
    }

    fn scratch(name: &str) -> PathBuf {
        env::temp_dir().join(format!("modular-bell-envelope-{}-{name}", std::process::id()))
    }

    #[test]
    fn failed_battery_exits_two() {
        let path = scratch("battery.json");
        let r = emit(Some(Format::Json), Some(&path), &body(None, true), 0.0);
        assert_eq!(r.unwrap(), 2);
        fs::remove_file(path).ok();
    }

    #[test]
    fn grids_default_to_csv() {
        let path = scratch("grid.csv");
        let r = emit(None, Some(&path), &body(Some("a,b,chsh\n".into()), false), 0.0);
        assert_eq!(r.unwrap(), 0);
        assert_eq!(fs::read_to_string(&path).unwrap(), "a,b,chsh\n");
        fs::remove_file(path).ok();
    }
}
