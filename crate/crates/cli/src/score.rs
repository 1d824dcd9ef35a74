//! `score`: split manifests + corpus → one row per (split, variation).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use cultnov::distances::Registry;
use cultnov::metrics::{score_all, KnowledgeSpace};
use cultnov::{control_variables, Document};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::build::ManifestFile;
use crate::config::{require, RunConfig};
use crate::io::{csv_bytes, fmt_float, json_bytes, read_corpus, read_registry, RunManifest, Staged};
use crate::{with_workers, CliError};

pub const SCORE_COLUMNS: [&str; 14] = [
    "product",
    "kb_culture",
    "variation_id",
    "variation_culture",
    "appearance",
    "disappearance",
    "newness",
    "uniqueness",
    "difference",
    "new_surprise",
    "divergent_surprise",
    "lexical_diversity",
    "new_ingredient_ratio",
    "length_ratio",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub product: String,
    pub kb_culture: String,
    pub variation_id: String,
    pub variation_culture: String,
    pub appearance: f64,
    pub disappearance: f64,
    pub newness: f64,
    pub uniqueness: f64,
    pub difference: f64,
    pub new_surprise: f64,
    pub divergent_surprise: f64,
    pub lexical_diversity: f64,
    pub new_ingredient_ratio: f64,
    pub length_ratio: f64,
}

impl ScoreRow {
    fn record(&self) -> Vec<String> {
        let nums = [
            self.appearance,
            self.disappearance,
            self.newness,
            self.uniqueness,
            self.difference,
            self.new_surprise,
            self.divergent_surprise,
            self.lexical_diversity,
            self.new_ingredient_ratio,
            self.length_ratio,
        ];
        [self.product.clone(), self.kb_culture.clone(), self.variation_id.clone(), self.variation_culture.clone()]
            .into_iter()
            .chain(nums.iter().map(|v| fmt_float(*v)))
            .collect()
    }
}

pub fn scores_csv(rows: &[ScoreRow]) -> Result<Vec<u8>, CliError> {
    csv_bytes(&SCORE_COLUMNS, &rows.iter().map(ScoreRow::record).collect::<Vec<_>>())
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRow>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::input(path, e))?;
    rdr.deserialize().collect::<Result<Vec<ScoreRow>, _>>().map_err(|e| CliError::input(path, e))
}

/// Manifest files of a directory, in file-name order.
pub fn read_manifests(dir: &Path) -> Result<Vec<(PathBuf, ManifestFile)>, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::input(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).map_err(|e| CliError::input(&p, e))?;
            let m: ManifestFile = serde_json::from_str(&text).map_err(|e| CliError::input(&p, e))?;
            Ok((p, m))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSummary {
    pub rows: usize,
    pub failures: usize,
}

fn score_split(
    m: &ManifestFile,
    by_id: &BTreeMap<&str, &Document>,
    cfg: &RunConfig,
) -> Result<Vec<Result<ScoreRow, String>>, String> {
    let kb_docs = m
        .knowledge
        .iter()
        .map(|id| by_id.get(id.as_str()).map(|d| (*d).clone()).ok_or_else(|| format!("unknown document {id:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let kb = KnowledgeSpace::build(m.dish.clone(), m.origin.clone(), kb_docs, cfg.novelty())
        .map_err(|e| format!("{} / {}: {e}", m.dish, m.origin))?;
    Ok(m.variations
        .par_iter()
        .map(|id| {
            let doc = by_id.get(id.as_str()).ok_or_else(|| format!("unknown document {id:?}"))?;
            let s = score_all(&kb, doc).map_err(|e| format!("{} / {} / {id}: {e}", m.dish, m.origin))?;
            let c = control_variables(doc, &kb);
            Ok(ScoreRow {
                product: m.dish.clone(),
                kb_culture: m.origin.clone(),
                variation_id: id.clone(),
                variation_culture: m.variation_cultures.get(id).cloned().unwrap_or_default(),
                appearance: s.appearance,
                disappearance: s.disappearance,
                newness: s.newness,
                uniqueness: s.uniqueness,
                difference: s.difference,
                new_surprise: s.new_surprise,
                divergent_surprise: s.divergent_surprise,
                lexical_diversity: c.lexical_diversity,
                new_ingredient_ratio: c.new_ingredient_ratio,
                length_ratio: c.length_ratio,
            })
        })
        .collect())
}

pub fn cmd_score(cfg: &RunConfig) -> Result<ScoreSummary, CliError> {
    cfg.validate()?;
    let corpus_path = require(&cfg.corpus, "corpus")?;
    let registry = match &cfg.registry {
        Some(p) => read_registry(p)?,
        None => Registry::default(),
    };
    let manifests_dir = cfg.manifests_dir();
    let manifests = read_manifests(&manifests_dir)?;
    let (docs, _) = read_corpus(corpus_path, cfg.annotation_provider, &registry)?;
    let by_id: BTreeMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();

    let results: Vec<Result<Vec<Result<ScoreRow, String>>, String>> = with_workers(cfg.workers, || {
        manifests.par_iter().map(|(_, m)| score_split(m, &by_id, cfg)).collect()
    })?;
    let mut rows = Vec::new();
    let mut failures = 0;
    for split in results {
        match split {
            Ok(items) => {
                for item in items {
                    match item {
                        Ok(r) => rows.push(r),
                        Err(e) => {
                            warn!("skipping variation: {e}");
                            failures += 1;
                        }
                    }
                }
            }
            Err(e) => {
                warn!("skipping split: {e}");
                failures += 1;
            }
        }
    }
    rows.sort_by(|a, b| {
        (&a.product, &a.kb_culture, &a.variation_id).cmp(&(&b.product, &b.kb_culture, &b.variation_id))
    });
    if failures > 0 {
        eprintln!("{failures} scoring failure(s) skipped");
    }
    info!("scored {} variations from {} splits", rows.len(), manifests.len());

    let mut staged = Staged::default();
    let scores_path = cfg.scores_path();
    staged.add(scores_path.clone(), scores_csv(&rows)?);
    let mut manifest = RunManifest::new("score", cfg)?;
    manifest.input("corpus", corpus_path)?;
    for (p, _) in &manifests {
        manifest.input("manifest", p)?;
    }
    manifest.outputs = staged.names();
    let out_dir = scores_path.parent().map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir());
    staged.add(out_dir.join("run_manifest_score.json"), json_bytes(&manifest)?);
    staged.commit()?;
    Ok(ScoreSummary { rows: rows.len(), failures })
}
