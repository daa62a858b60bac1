//! Run configuration: a JSON file with global settings and one section per
//! command. Flags override file values; the fully resolved configuration is
//! embedded in every report.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use psinorm::distribution::DistributionSpec;
use psinorm::mc::BoundKind;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vecnorm: Option<VecnormSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chaos_verify: Option<ChaosVerifySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_check: Option<RotationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrate_c: Option<CalibrateSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Luxemburg,
    Moment,
    Tau,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSection {
    /// Analytic law; with a global `samples` count it is sampled instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionSpec>,
    /// One value per line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_file: Option<PathBuf>,
    pub p: f64,
    #[serde(default = "default_norms")]
    pub norms: Vec<NormKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
}

fn default_norms() -> Vec<NormKind> {
    vec![NormKind::Luxemburg]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VectorSourceConfig {
    IndependentProduct {
        coords: Vec<DistributionSpec>,
    },
    LinearMix {
        matrix: Vec<Vec<f64>>,
        base: Box<VectorSourceConfig>,
    },
    /// CSV of `N` rows and `n` columns, no header.
    Empirical {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VecnormSection {
    pub source: VectorSourceConfig,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrayConfig {
    /// The `order,dim` CSV format.
    File {
        path: PathBuf,
    },
    Identity {
        dim: usize,
    },
    Zeros {
        order: usize,
        dim: usize,
    },
    RankOne {
        u: Vec<f64>,
        order: usize,
    },
    /// Standard normal coefficients from a seed.
    Random {
        order: usize,
        dim: usize,
        seed: u64,
    },
}

/// A fixed constant or `"calibrate"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CSetting {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChaosVerifySection {
    pub array: ArrayConfig,
    pub source: VectorSourceConfig,
    /// Expected chaos order; checked against the array when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub c: CSetting,
    #[serde(default = "default_bound")]
    pub bound: BoundKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
}

fn default_bound() -> BoundKind {
    BoundKind::Chaos
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSection {
    pub coords: Vec<DistributionSpec>,
    /// Defaults to all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationCaseConfig {
    pub label: String,
    pub distribution: DistributionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateSection {
    /// Defaults to the built-in Laplace, centered exponential and Gaussian
    /// cases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<Vec<CalibrationCaseConfig>>,
}

/// Global values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        self.seed = o.seed.or(self.seed);
        self.tol = o.tol.or(self.tol);
        self.out = o.out.clone().or(self.out.take());
        self.samples = o.samples.or(self.samples);
        self.workers = o.workers.or(self.workers);
    }

    /// Checks the global values; command sections are checked by their
    /// commands.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("tol must be a positive number, got {t}")));
            }
        }
        if self.samples == Some(0) {
            return Err(CliError::Usage("samples must be >= 1".into()));
        }
        Ok(())
    }

    /// Resolves relative file paths against the directory of the config
    /// file, so a config can be run from anywhere.
    pub fn rebase_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fn fix_source(s: &mut VectorSourceConfig, fix: &dyn Fn(&mut PathBuf)) {
            match s {
                VectorSourceConfig::Empirical { path } => fix(path),
                VectorSourceConfig::LinearMix { base, .. } => fix_source(base, fix),
                VectorSourceConfig::IndependentProduct { .. } => {}
            }
        }
        if let Some(n) = &mut self.norm {
            if let Some(p) = &mut n.sample_file {
                fix(p);
            }
        }
        if let Some(v) = &mut self.vecnorm {
            fix_source(&mut v.source, &fix);
        }
        if let Some(c) = &mut self.chaos_verify {
            fix_source(&mut c.source, &fix);
            if let ArrayConfig::File { path } = &mut c.array {
                fix(path);
            }
        }
    }
}
