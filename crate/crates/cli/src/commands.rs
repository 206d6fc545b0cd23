//! The three commands: estimator curves, distribution optimization, and
//! result comparison.

use std::fs;
use std::path::Path;

use pcshape::{
    ba_sweep, cba_sweep, kl_commutative, mb_distribution, mb_envelope, mi_discrete, mi_mc_general,
    snr_from_sigma, transition_matrix, Constellation, ConstellationFile, Family, GainSearchConfig,
    InputDistribution, McConfig, MiCurve, MiPoint, QuantSettings,
};
use rayon::prelude::*;

use crate::io::{
    parse_grid, parse_lambda_grid, parse_range, read_curve, sidecar_path, write_config_sidecar,
    write_curve_csv, write_distributions_jsonl, write_optimize_csv,
};
use crate::{CliError, CommonArgs, CompareArgs, DistSpec, Estimator, MiCurveArgs, OptimizeArgs};

/// Constellation named by the common arguments, normalized to unit energy
/// under the uniform distribution unless that is turned off.
fn resolve_constellation(args: &CommonArgs) -> Result<Constellation, CliError> {
    let c = match (Family::from(args.family), &args.points_file) {
        (Family::Custom, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let file: ConstellationFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let (c, _) = file.into_parts("custom")?;
            c
        }
        (Family::Custom, None) => {
            return Err(CliError::Usage("--family custom requires --points-file".into()));
        }
        (family, _) => {
            let size = args
                .size
                .ok_or_else(|| CliError::Usage("--size is required for standard families".into()))?;
            Constellation::from_family(family, size)?
        }
    };
    if args.no_normalize {
        Ok(c)
    } else {
        Ok(c.normalize_unit_energy(&InputDistribution::uniform(c.len()))?)
    }
}

fn resolve_quant(args: &CommonArgs, c: &Constellation) -> Result<QuantSettings, CliError> {
    let defaults = QuantSettings::default_for(c);
    Ok(QuantSettings::new(
        args.shift_mult,
        args.bits.unwrap_or(defaults.bits_per_dim),
    )?)
}

fn resolve_distribution(
    spec: &DistSpec,
    c: &Constellation,
) -> Result<InputDistribution, CliError> {
    match spec {
        DistSpec::Uniform => Ok(InputDistribution::uniform(c.len())),
        DistSpec::MaxwellBoltzmann(lambda) => Ok(mb_distribution(c, *lambda)),
        DistSpec::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let file: ConstellationFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let probabilities = file
                .probabilities
                .ok_or_else(|| CliError::Usage(format!("{}: no probabilities", path.display())))?;
            if probabilities.len() != c.len() {
                return Err(CliError::Usage(format!(
                    "{}: {} probabilities for {} symbols",
                    path.display(),
                    probabilities.len(),
                    c.len()
                )));
            }
            Ok(InputDistribution::new(probabilities)?)
        }
    }
}

/// Sigma grid from either `--sigma` or `--snr-db` (converted at the power of
/// the evaluation distribution).
fn resolve_sigmas(args: &MiCurveArgs, power: f64, dimension: usize) -> Result<Vec<f64>, CliError> {
    match (&args.common.sigma, &args.snr_db) {
        (Some(spec), None) => parse_grid(spec),
        (None, Some(spec)) => parse_grid(spec)?
            .into_iter()
            .map(|db| {
                let snr = pcshape::SnrPoint::from_db(db)?;
                Ok(pcshape::sigma_from_snr(power, snr.snr_linear, dimension)?)
            })
            .collect(),
        _ => Err(CliError::Usage("exactly one of --sigma or --snr-db is required".into())),
    }
}

pub fn cmd_mi_curve(args: &MiCurveArgs) -> Result<(), CliError> {
    let c = resolve_constellation(&args.common)?;
    let quant = resolve_quant(&args.common, &c)?;
    let d = resolve_distribution(&args.dist, &c)?;
    let power = c.average_power(&d)?;
    let sigmas = resolve_sigmas(args, power, c.dimension())?;

    let points: Vec<MiPoint> = sigmas
        .par_iter()
        .enumerate()
        .map(|(index, &sigma)| -> Result<MiPoint, pcshape::Error> {
            let mi_bits = match args.estimator {
                Estimator::Discrete => {
                    let grid =
                        pcshape::build_grid(&c, sigma, quant.shift_multiplier, quant.bits_per_dim)?;
                    let w = transition_matrix(&c, &grid, sigma)?;
                    mi_discrete(&w, &d)?
                }
                Estimator::Mc => {
                    let cfg = McConfig {
                        sample_count: args.samples,
                        seed: args.seed + index as u64,
                    };
                    mi_mc_general(&c, &d, sigma, &cfg)?.mi_bits
                }
            };
            let snr = snr_from_sigma(power, sigma, c.dimension())?;
            Ok(MiPoint {
                sigma,
                snr_db: snr.snr_db,
                mi_bits,
                lambda: None,
                alpha: None,
                power: Some(power),
                probabilities: None,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let curve = MiCurve::new(c.dimension(), points);

    let estimator = match args.estimator {
        Estimator::Discrete => "discrete",
        Estimator::Mc => "mc",
    };
    write_curve_csv(&args.common.out, &curve, estimator, &args.dist.label())?;
    write_config_sidecar(&args.common.out, args)?;
    Ok(())
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<(), CliError> {
    let c = resolve_constellation(args.common())?;
    let quant = resolve_quant(args.common(), &c)?;
    let sigmas = parse_grid(
        args.common()
            .sigma
            .as_deref()
            .ok_or_else(|| CliError::Usage("--sigma is required".into()))?,
    )?;

    let curve = match args {
        OptimizeArgs::MbEnvelope(a) => {
            let lambdas = parse_lambda_grid(&a.lambdas)?;
            mb_envelope(&c, &lambdas, &sigmas, &quant, a.unit_energy)?
        }
        OptimizeArgs::Ba(a) => ba_sweep(&c, &sigmas, &quant, a.eps)?,
        OptimizeArgs::Cba(a) => {
            let (alpha_min, alpha_max) = parse_range(&a.alpha_range)?;
            let cfg = GainSearchConfig {
                alpha_min,
                alpha_max,
                points_per_depth: a.points_per_depth,
                depth: a.depth,
                inner_epsilon: a.inner_eps,
                power_target: a.power,
                ..Default::default()
            };
            cba_sweep(&c, &sigmas, &cfg, &quant)?
        }
    };

    let out = &args.common().out;
    write_optimize_csv(out, &curve)?;
    write_distributions_jsonl(&sidecar_path(out, "dists.jsonl"), &curve)?;
    write_config_sidecar(out, args)?;
    Ok(())
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let a = read_curve(&args.file_a)?;
    let b = read_curve(&args.file_b)?;
    if a.len() != b.len() || a.iter().zip(&b).any(|(x, y)| x.sigma != y.sigma) {
        return Err(CliError::Usage(format!(
            "{} and {} are on different sigma grids",
            args.file_a.display(),
            args.file_b.display()
        )));
    }

    let mut rows = Vec::with_capacity(a.len());
    for (x, y) in a.iter().zip(&b) {
        let kl = match (&x.probabilities, &y.probabilities) {
            (Some(p), Some(q)) => Some(kl_commutative(
                &InputDistribution::new(p.clone())?,
                &InputDistribution::new(q.clone())?,
            )?),
            _ => None,
        };
        rows.push((x.sigma, x.mi_bits - y.mi_bits, kl));
    }
    let energy: f64 = rows.iter().map(|(_, d, _)| d * d).sum();

    write_compare_csv(&args.out, &rows)?;
    let summary = serde_json::json!({ "curve_difference_energy": energy });
    write_config_sidecar(&args.out, &serde_json::json!({ "command": "compare", "inputs": [args.file_a, args.file_b] }))?;
    let summary_path = sidecar_path(&args.out, "summary.json");
    fs::write(&summary_path, format!("{summary}\n"))
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", summary_path.display())))?;
    println!("curve_difference_energy = {energy:.16e}");
    Ok(())
}

fn write_compare_csv(path: &Path, rows: &[(f64, f64, Option<f64>)]) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(
        std::fs::File::create(path)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
    );
    let io_err = |e: std::io::Error| CliError::Usage(format!("write failed: {e}"));
    writeln!(out, "sigma,mi_diff,kl_commutative").map_err(io_err)?;
    for (sigma, diff, kl) in rows {
        writeln!(
            out,
            "{},{},{}",
            crate::io::fmt_f64(*sigma),
            crate::io::fmt_f64(*diff),
            kl.map(crate::io::fmt_f64).unwrap_or_default()
        )
        .map_err(io_err)?;
    }
    Ok(())
}
