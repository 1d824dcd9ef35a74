//! Run configuration: a JSON file whose fields can each be overridden on
//! the command line.

use std::path::{Path, PathBuf};

use cultnov::builder::{DEFAULT_HOLDOUT, DEFAULT_TOP_FRACTION};
use cultnov::metrics::{NoveltyConfig, ThresholdStat, DEFAULT_LAMBDA1, DEFAULT_LAMBDA2, DEFAULT_WINDOW};
use cultnov::stats::{DEFAULT_BOOTSTRAP, DEFAULT_RBO_P};
use cultnov::AnnotationProvider;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Optional sources of precomputed distances, `iso_a,iso_b,distance` CSVs.
/// IW and geographic distances fall back to the registry when absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistancePaths {
    pub iw: Option<PathBuf>,
    pub geo: Option<PathBuf>,
    pub linguistic: Option<PathBuf>,
    pub religious: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub pmi_window: usize,
    pub rbo_p: f64,
    pub holdout_fraction: f64,
    pub seed: u64,
    pub annotation_provider: AnnotationProvider,
    pub bootstrap: usize,
    pub robust_se: bool,
    pub cluster_top_fraction: f64,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
    pub corpus: Option<PathBuf>,
    pub dish_specs: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub distances: DistancePaths,
    pub manifests: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lambda1: DEFAULT_LAMBDA1,
            lambda2: DEFAULT_LAMBDA2,
            pmi_window: DEFAULT_WINDOW,
            rbo_p: DEFAULT_RBO_P,
            holdout_fraction: DEFAULT_HOLDOUT,
            seed: 0,
            annotation_provider: AnnotationProvider::Naive,
            bootstrap: DEFAULT_BOOTSTRAP,
            robust_se: false,
            cluster_top_fraction: DEFAULT_TOP_FRACTION,
            workers: 0,
            corpus: None,
            dish_specs: None,
            registry: None,
            distances: DistancePaths::default(),
            manifests: None,
            scores: None,
            output_dir: None,
        }
    }
}

/// Parameters that shape the outputs; recorded in run manifests and hashed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parameters {
    pub lambda1: f64,
    pub lambda2: f64,
    pub pmi_window: usize,
    pub rbo_p: f64,
    pub holdout_fraction: f64,
    pub seed: u64,
    pub annotation_provider: AnnotationProvider,
    pub bootstrap: usize,
    pub robust_se: bool,
    pub cluster_top_fraction: f64,
}

impl RunConfig {
    /// Read a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::input(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(inner) = p {
                if inner.is_relative() {
                    *inner = base.join(&*inner);
                }
            }
        };
        for p in [
            &mut cfg.corpus,
            &mut cfg.dish_specs,
            &mut cfg.registry,
            &mut cfg.manifests,
            &mut cfg.scores,
            &mut cfg.output_dir,
            &mut cfg.distances.iw,
            &mut cfg.distances.geo,
            &mut cfg.distances.linguistic,
            &mut cfg.distances.religious,
        ] {
            fix(p);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.novelty().validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if !(self.rbo_p > 0.0 && self.rbo_p < 1.0) {
            return Err(CliError::Usage(format!("rbo_p must lie in (0,1), got {}", self.rbo_p)));
        }
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return Err(CliError::Usage(format!("holdout_fraction must lie in [0,1), got {}", self.holdout_fraction)));
        }
        if !(self.cluster_top_fraction > 0.0 && self.cluster_top_fraction <= 1.0) {
            return Err(CliError::Usage("cluster_top_fraction must lie in (0,1]".into()));
        }
        Ok(())
    }

    pub fn novelty(&self) -> NoveltyConfig {
        NoveltyConfig {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            window: self.pmi_window,
            newness_threshold: ThresholdStat::Mean,
        }
    }

    pub fn parameters(&self) -> Parameters {
        Parameters {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            pmi_window: self.pmi_window,
            rbo_p: self.rbo_p,
            holdout_fraction: self.holdout_fraction,
            seed: self.seed,
            annotation_provider: self.annotation_provider,
            bootstrap: self.bootstrap,
            robust_se: self.robust_se,
            cluster_top_fraction: self.cluster_top_fraction,
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn manifests_dir(&self) -> PathBuf {
        self.manifests.clone().unwrap_or_else(|| self.output_dir().join("manifests"))
    }

    pub fn scores_path(&self) -> PathBuf {
        self.scores.clone().unwrap_or_else(|| self.output_dir().join("scores.csv"))
    }
}

pub fn require<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path, CliError> {
    p.as_deref().ok_or_else(|| CliError::Usage(format!("no {what} given (config field or flag)")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!((c.lambda1, c.lambda2, c.pmi_window, c.holdout_fraction, c.rbo_p), (0.8, 0.2, 3, 0.3, 0.9));
        c.validate().unwrap();
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"seed": 7, "pmi_window": 5}"#).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.pmi_window, 5);
        assert_eq!(c.lambda1, 0.8);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"lamda1": 0.5}"#).is_err());
    }

    #[test]
    fn bad_lambdas() {
        let c = RunConfig { lambda1: 0.7, ..RunConfig::default() };
        assert!(matches!(c.validate(), Err(CliError::Usage(_))));
    }
}
