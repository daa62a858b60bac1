use serde_json::{json, Value};

use psinorm::chaos::ChaosArray;
use psinorm::distribution::{zoo, SampleBatch};
use psinorm::error::Error;
use psinorm::mc::{
    calibrate_c, default_calibration_cases, rotation_invariance_check, verify_chaos, CalibrationCase,
    CalibrationReport, McConfig, CALIBRATION_TAIL_FLOOR,
};
use psinorm::scalar::{
    luxemburg_norm, moment_norm, tau_norm, MomentSource, NormStatus, DEFAULT_TOL_ANALYTIC, DEFAULT_TOL_EMPIRICAL,
};
use psinorm::vector::{chain_check, RandomVectorSource, SampleMatrix, VectorOptions, DEFAULT_VECTOR_SAMPLES};

use crate::config::{ArrayConfig, CSetting, NormKind, RunConfig, VectorSourceConfig};
use crate::io::{read_column, read_matrix};
use crate::{CliError, Outcome};

const DEFAULT_MC_SAMPLES: usize = 1_000_000;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn missing(section: &str) -> CliError {
    CliError::Usage(format!("the configuration has no `{section}` section (use --config)"))
}

pub fn norm(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let sec = cfg.norm.clone().ok_or_else(|| missing("norm"))?;
    if sec.norms.is_empty() {
        return Err(CliError::Usage(
            "`norms` must name at least one of luxemburg, moment, tau".into(),
        ));
    }
    let seed = cfg.seed.unwrap_or(0);
    cfg.seed = Some(seed);
    let batch: Option<SampleBatch> = match (&sec.distribution, &sec.sample_file) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(CliError::Usage(
                "give exactly one of `distribution` and `sample_file`".into(),
            ))
        }
        (None, Some(path)) => {
            let values = read_column(path)?;
            Some(SampleBatch::new(values, seed, path.display().to_string())?)
        }
        (Some(d), None) => match cfg.samples {
            Some(n) => Some(d.sample(n, seed)?),
            None => {
                d.validate()?;
                None
            }
        },
    };
    let src = match (&batch, &sec.distribution) {
        (Some(b), _) => MomentSource::Empirical(b),
        (None, Some(d)) => MomentSource::Analytic(*d),
        (None, None) => unreachable!("checked above"),
    };
    let tol = cfg.tol.unwrap_or(if batch.is_some() {
        DEFAULT_TOL_EMPIRICAL
    } else {
        DEFAULT_TOL_ANALYTIC
    });
    cfg.tol = Some(tol);

    let mut results = Vec::new();
    let mut csv = String::from("norm,value,status\n");
    let mut all_finite = true;
    for kind in &sec.norms {
        let (value, status, detail) = match kind {
            NormKind::Luxemburg => {
                let r = luxemburg_norm(&src, sec.p, tol)?;
                (r.value, r.status, serde_json::to_value(r).expect("serializable"))
            }
            NormKind::Tau => {
                let r = tau_norm(&src, sec.p, tol)?;
                (r.value, r.status, serde_json::to_value(r).expect("serializable"))
            }
            NormKind::Moment => {
                let alpha_max = sec.alpha_max.unwrap_or(200.0);
                let r = moment_norm(&src, sec.p, alpha_max)?;
                let status = if r.value.is_finite() {
                    NormStatus::Finite
                } else {
                    NormStatus::Infinite
                };
                (r.value, status, serde_json::to_value(r).expect("serializable"))
            }
        };
        all_finite &= status != NormStatus::Infinite && value.is_finite();
        let name = serde_json::to_value(kind).expect("serializable");
        let status_name = serde_json::to_value(status).expect("serializable");
        csv.push_str(&format!(
            "{},{},{}\n",
            name.as_str().unwrap_or_default(),
            num(value),
            status_name.as_str().unwrap_or_default()
        ));
        results.push(json!({ "norm": name, "value": value, "status": status_name, "detail": detail }));
    }
    let provenance = match &batch {
        Some(b) => {
            json!({ "mode": "empirical", "samples": b.len(), "seed": b.seed(), "source": b.source_description() })
        }
        None => json!({ "mode": "analytic", "source": sec.distribution.map(|d| d.to_string()) }),
    };
    Ok(Outcome {
        report: json!({
            "command": "norm",
            "config": cfg,
            "p": sec.p,
            "provenance": provenance,
            "results": results,
        }),
        files: vec![("norm.csv".into(), csv)],
        success: all_finite,
    })
}

pub fn build_vector_source(c: &VectorSourceConfig, seed: u64) -> Result<RandomVectorSource, CliError> {
    Ok(match c {
        VectorSourceConfig::IndependentProduct { coords } => RandomVectorSource::IndependentProduct(coords.clone()),
        VectorSourceConfig::LinearMix { matrix, base } => match base.as_ref() {
            VectorSourceConfig::IndependentProduct { coords } => RandomVectorSource::LinearMix {
                base: coords.clone(),
                matrix: matrix.clone(),
            },
            _ => {
                return Err(CliError::Usage(
                    "the base of a linear_mix must be an independent_product".into(),
                ))
            }
        },
        VectorSourceConfig::Empirical { path } => {
            let rows = read_matrix(path)?;
            RandomVectorSource::EmpiricalMatrix(SampleMatrix::from_rows(&rows, seed)?)
        }
    })
}

pub fn vecnorm(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let sec = cfg.vecnorm.clone().ok_or_else(|| missing("vecnorm"))?;
    let seed = cfg.seed.unwrap_or(0);
    let src = build_vector_source(&sec.source, seed)?;
    src.validate()?;
    let opts = VectorOptions {
        tol: cfg.tol.unwrap_or(DEFAULT_TOL_EMPIRICAL),
        samples: cfg.samples.unwrap_or(DEFAULT_VECTOR_SAMPLES),
        seed,
        restarts: sec.restarts,
    };
    cfg.seed = Some(seed);
    cfg.tol = Some(opts.tol);
    cfg.samples = Some(opts.samples);
    let report = match chain_check(&src, sec.p, &opts) {
        Ok(r) => r,
        Err(Error::Precondition(msg)) => return Err(CliError::Negative(msg)),
        Err(e) => return Err(e.into()),
    };
    let csv = format!(
        "max_coord,psi_vec,e_p,upper,chain_holds\n{},{},{},{},{}\n",
        num(report.max_coord),
        num(report.psi_vec),
        num(report.e_p),
        num(report.upper),
        report.chain_holds
    );
    Ok(Outcome {
        success: report.chain_holds,
        report: json!({ "command": "vecnorm", "config": cfg, "chain": report }),
        files: vec![("chain.csv".into(), csv)],
    })
}

fn build_array(c: &ArrayConfig) -> Result<ChaosArray, CliError> {
    Ok(match c {
        ArrayConfig::File { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            ChaosArray::from_csv(&text)?
        }
        ArrayConfig::Identity { dim } => ChaosArray::identity(*dim)?,
        ArrayConfig::Zeros { order, dim } => ChaosArray::zeros(*order, *dim)?,
        ArrayConfig::RankOne { u, order } => ChaosArray::rank_one(u, *order)?,
        ArrayConfig::Random { order, dim, seed } => ChaosArray::random(*order, *dim, *seed)?,
    })
}

pub fn chaos_verify(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let sec = cfg.chaos_verify.clone().ok_or_else(|| missing("chaos_verify"))?;
    let seed = cfg.seed.unwrap_or(0);
    let samples = cfg.samples.unwrap_or(DEFAULT_MC_SAMPLES);
    cfg.seed = Some(seed);
    cfg.samples = Some(samples);
    let a = build_array(&sec.array)?;
    if let Some(d) = sec.d {
        if d != a.order() {
            return Err(CliError::Usage(format!(
                "d = {d} but the array has order {}",
                a.order()
            )));
        }
    }
    let xi = build_vector_source(&sec.source, seed)?;
    let mut calibration: Option<CalibrationReport> = None;
    let c = match &sec.c {
        CSetting::Value(c) if *c > 0.0 => *c,
        CSetting::Value(c) => return Err(CliError::Usage(format!("C must be > 0, got {c}"))),
        CSetting::Keyword(k) if k == "calibrate" => {
            let r = calibrate_c(&default_calibration_cases(), samples, seed)?;
            let c = r.c;
            calibration = Some(r);
            c
        }
        CSetting::Keyword(k) => {
            return Err(CliError::Usage(format!(
                "C must be a number or \"calibrate\", got {k:?}"
            )))
        }
    };
    let mc = McConfig {
        samples,
        seed,
        t_grid: sec.t_grid.clone(),
        workers: cfg.workers.unwrap_or(0),
    };
    let v = verify_chaos("chaos", &a, &xi, sec.bound, c, &mc)?;
    if v.check.resolved_points == 0 {
        return Err(CliError::Negative(format!(
            "no grid point is resolvable with {samples} samples: every bound value is below 4/samples"
        )));
    }
    let files = vec![
        ("empirical.csv".into(), v.empirical.to_csv()),
        ("bound.csv".into(), v.bound.to_csv()),
    ];
    Ok(Outcome {
        success: v.verdict,
        report: json!({
            "command": "chaos-verify",
            "config": cfg,
            "case": v.case,
            "C": v.c,
            "samples": v.samples,
            "seed": v.seed,
            "worst_ratio": v.worst_ratio,
            "verdict": v.verdict,
            "excluded_points": v.excluded_points,
            "bound_kind": v.kind,
            "order": v.order,
            "dim": v.dim,
            "a_norm": v.a_norm,
            "e_d": v.e_d,
            "mean": v.mean,
            "mean_is_exact": v.mean_is_exact,
            "calibration": calibration,
        }),
        files,
    })
}

pub fn rotation_check(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let sec = cfg.rotation_check.clone().ok_or_else(|| missing("rotation_check"))?;
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL_ANALYTIC);
    cfg.tol = Some(tol);
    let weights = sec.weights.clone().unwrap_or_else(|| vec![1.0; sec.coords.len()]);
    let r = rotation_invariance_check(&sec.coords, &weights, sec.p, tol)?;
    Ok(Outcome {
        success: r.verdict,
        report: json!({ "command": "rotation-check", "config": cfg, "result": r }),
        files: vec![],
    })
}

pub fn calibrate(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let seed = cfg.seed.unwrap_or(0);
    let samples = cfg.samples.unwrap_or(DEFAULT_MC_SAMPLES);
    cfg.seed = Some(seed);
    cfg.samples = Some(samples);
    let cases = match cfg.calibrate_c.as_ref().and_then(|s| s.cases.as_ref()) {
        None => default_calibration_cases(),
        Some(list) => list
            .iter()
            .map(|c| {
                CalibrationCase::new(
                    c.label.clone(),
                    c.distribution,
                    c.tail_floor.unwrap_or(CALIBRATION_TAIL_FLOOR),
                    c.points.unwrap_or(40),
                )
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    let r = calibrate_c(&cases, samples, seed)?;
    Ok(Outcome {
        success: true,
        report: json!({ "command": "calibrate-c", "config": cfg, "C": r.c, "calibration": r, "cases": cases }),
        files: vec![],
    })
}

pub fn zoo_list(cfg: RunConfig) -> Result<Outcome, CliError> {
    let members: Vec<Value> = zoo()
        .into_iter()
        .map(|d| {
            json!({
                "name": d.to_string(),
                "spec": d,
                "mean": d.mean(),
                "variance": d.variance(),
                "centered": d.is_centered(),
            })
        })
        .collect();
    Ok(Outcome {
        success: true,
        report: json!({ "command": "zoo-list", "config": cfg, "members": members }),
        files: vec![],
    })
}
