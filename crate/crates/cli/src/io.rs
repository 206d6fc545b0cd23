//! Argument parsing helpers and the file writers: curve CSVs, distribution
//! JSON lines, and config sidecars.
//!
//! CSV output is RFC-4180-style with a `.` decimal separator and 17
//! significant digits, so the files round-trip f64 values exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use pcshape::{MiCurve, MiPoint};
use serde::Serialize;

use crate::CliError;

/// 17-significant-digit rendering used in every CSV cell.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parses `start:stop:step` (inclusive of both endpoints within half a step)
/// or a single value.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("invalid grid '{spec}', expected VALUE or START:STOP:STEP"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.parse().map_err(|_| bad())?]),
        [start, stop, step] => {
            let start: f64 = start.parse().map_err(|_| bad())?;
            let stop: f64 = stop.parse().map_err(|_| bad())?;
            let step: f64 = step.parse().map_err(|_| bad())?;
            if !step.is_finite() || step <= 0.0 || stop < start {
                return Err(bad());
            }
            let mut out = Vec::new();
            let mut k = 0u64;
            loop {
                let v = start + k as f64 * step;
                if v > stop + step / 2.0 {
                    break;
                }
                out.push(v);
                k += 1;
            }
            Ok(out)
        }
        _ => Err(bad()),
    }
}

/// Lambda grids accept the plain forms of [`parse_grid`] plus
/// `neg-exp:COUNT:VMAX`, the dense nonpositive sweep `1 - exp(v)`.
pub fn parse_lambda_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    if let Some(rest) = spec.strip_prefix("neg-exp:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if let [count, vmax] = parts.as_slice() {
            let count: usize = count
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid count in '{spec}'")))?;
            let vmax: f64 = vmax
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid vmax in '{spec}'")))?;
            if count == 0 || !vmax.is_finite() || vmax < 0.0 {
                return Err(CliError::Usage(format!("invalid neg-exp grid '{spec}'")));
            }
            return Ok(pcshape::negative_lambda_grid(count, vmax));
        }
        return Err(CliError::Usage(format!(
            "invalid lambda grid '{spec}', expected neg-exp:COUNT:VMAX"
        )));
    }
    // ranges may descend for negative sweeps, e.g. 0:-10:0.5
    if spec.split(':').count() == 3 {
        let parts: Vec<&str> = spec.split(':').collect();
        let start: f64 = parts[0].parse().map_err(|_| CliError::Usage(format!("invalid grid '{spec}'")))?;
        let stop: f64 = parts[1].parse().map_err(|_| CliError::Usage(format!("invalid grid '{spec}'")))?;
        let step: f64 = parts[2].parse().map_err(|_| CliError::Usage(format!("invalid grid '{spec}'")))?;
        if !step.is_finite() || step <= 0.0 {
            return Err(CliError::Usage(format!("invalid grid '{spec}'")));
        }
        if stop < start {
            let mut out = Vec::new();
            let mut k = 0u64;
            loop {
                let v = start - k as f64 * step;
                if v < stop - step / 2.0 {
                    break;
                }
                out.push(v);
                k += 1;
            }
            return Ok(out);
        }
    }
    parse_grid(spec)
}

/// Parses `LO:HI` gain ranges.
pub fn parse_range(spec: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("invalid range '{spec}', expected LO:HI"));
    let parts: Vec<&str> = spec.split(':').collect();
    if let [lo, hi] = parts.as_slice() {
        let lo: f64 = lo.parse().map_err(|_| bad())?;
        let hi: f64 = hi.parse().map_err(|_| bad())?;
        if hi > lo {
            return Ok((lo, hi));
        }
    }
    Err(bad())
}

/// Sidecar path `<dir>/<stem>.<suffix>` next to an output file.
pub fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    out.with_extension(suffix)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        CliError::Usage(format!("cannot write {}: {e}", path.display()))
    })?))
}

/// `sigma,snr_db,mi_bits,estimator,param` rows of an estimator curve.
pub fn write_curve_csv(
    path: &Path,
    curve: &MiCurve,
    estimator: &str,
    param: &str,
) -> Result<(), CliError> {
    let mut out = create(path)?;
    let io_err = |e: std::io::Error| CliError::Usage(format!("write failed: {e}"));
    writeln!(out, "sigma,snr_db,mi_bits,estimator,param").map_err(io_err)?;
    for p in &curve.points {
        writeln!(
            out,
            "{},{},{},{estimator},{param}",
            fmt_f64(p.sigma),
            fmt_f64(p.snr_db),
            fmt_f64(p.mi_bits)
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// `sigma,snr_db,mi_bits,power,lambda,alpha` rows of an optimizer curve;
/// parameters that do not apply stay empty.
pub fn write_optimize_csv(path: &Path, curve: &MiCurve) -> Result<(), CliError> {
    let mut out = create(path)?;
    let io_err = |e: std::io::Error| CliError::Usage(format!("write failed: {e}"));
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    writeln!(out, "sigma,snr_db,mi_bits,power,lambda,alpha").map_err(io_err)?;
    for p in &curve.points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(p.sigma),
            fmt_f64(p.snr_db),
            fmt_f64(p.mi_bits),
            opt(p.power),
            opt(p.lambda),
            opt(p.alpha)
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// One JSON object per sigma point, probabilities included.
pub fn write_distributions_jsonl(path: &Path, curve: &MiCurve) -> Result<(), CliError> {
    let mut out = create(path)?;
    for p in &curve.points {
        let line = serde_json::to_string(p)
            .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
        writeln!(out, "{line}").map_err(|e| CliError::Usage(format!("write failed: {e}")))?;
    }
    Ok(())
}

/// Full resolved run configuration, for byte-identical re-runs.
pub fn write_config_sidecar<T: Serialize>(out: &Path, config: &T) -> Result<(), CliError> {
    let path = sidecar_path(out, "config.json");
    let mut file = create(&path)?;
    let text = serde_json::to_string_pretty(config)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    writeln!(file, "{text}").map_err(|e| CliError::Usage(format!("write failed: {e}")))
}

/// Reads a result file back: JSON-lines (with distributions) or one of the
/// two CSV schemas (without).
pub fn read_curve(path: &Path) -> Result<Vec<MiPoint>, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let reader = BufReader::new(file);
    let is_jsonl = path.extension().is_some_and(|e| e == "jsonl");
    let mut points = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::Usage(format!("read failed: {e}")))?;
        if line.is_empty() {
            continue;
        }
        if is_jsonl {
            let p: MiPoint = serde_json::from_str(&line)
                .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), idx + 1)))?;
            points.push(p);
        } else {
            if idx == 0 {
                if !line.starts_with("sigma,snr_db,mi_bits") {
                    return Err(CliError::Usage(format!(
                        "{}: unrecognized CSV header '{line}'",
                        path.display()
                    )));
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 3 {
                return Err(CliError::Usage(format!("{}:{}: short row", path.display(), idx + 1)));
            }
            let parse = |s: &str| -> Result<f64, CliError> {
                s.parse()
                    .map_err(|_| CliError::Usage(format!("{}:{}: bad number '{s}'", path.display(), idx + 1)))
            };
            points.push(MiPoint {
                sigma: parse(fields[0])?,
                snr_db: parse(fields[1])?,
                mi_bits: parse(fields[2])?,
                lambda: None,
                alpha: None,
                power: None,
                probabilities: None,
            });
        }
    }
    if points.is_empty() {
        return Err(CliError::Usage(format!("{}: no data rows", path.display())));
    }
    Ok(points)
}
