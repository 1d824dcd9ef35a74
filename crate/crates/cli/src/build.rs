//! `build`: corpus → split manifests, eligibility report, country clusters.

use std::collections::BTreeMap;

use cultnov::builder::{build_all, country_clusters, resolved_country, slugify, CorpusSplit, DishSpec};
use cultnov::Error;
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::config::{require, RunConfig};
use crate::io::{csv_bytes, fmt_float, json_bytes, read_corpus, read_dish_specs, read_registry, RunManifest, Staged};
use crate::CliError;

/// On-disk form of one (dish, origin) split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFile {
    pub dish: String,
    pub origin: String,
    pub seed: u64,
    pub holdout_fraction: f64,
    pub holdout_seed: u64,
    pub knowledge: Vec<String>,
    pub variations: Vec<String>,
    pub held_out: Vec<String>,
    /// Country of record of every variation, after dish overrides.
    pub variation_cultures: BTreeMap<String, String>,
}

impl ManifestFile {
    pub fn file_name(&self) -> String {
        format!("{}__{}.json", slugify(&self.dish), self.origin)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildSummary {
    pub eligible: usize,
    pub ineligible: usize,
    pub dropped_records: usize,
}

pub fn cmd_build(cfg: &RunConfig) -> Result<BuildSummary, CliError> {
    cfg.validate()?;
    let corpus_path = require(&cfg.corpus, "corpus")?;
    let dish_path = require(&cfg.dish_specs, "dish specs")?;
    let registry_path = require(&cfg.registry, "registry")?;
    let dishes = read_dish_specs(dish_path)?;
    let registry = read_registry(registry_path)?;
    let (docs, dropped_records) = read_corpus(corpus_path, cfg.annotation_provider, &registry)?;
    info!("read {} documents ({} dropped)", docs.len(), dropped_records);

    let (splits, report) =
        build_all(&docs, &dishes, cfg.holdout_fraction, cfg.seed).map_err(|e| CliError::input(dish_path, e))?;
    let clusters = match country_clusters(&docs, cfg.cluster_top_fraction) {
        Ok(c) => Some(c),
        Err(Error::EmptyCorpus) => {
            warn!("no document has a country; skipping clustering");
            None
        }
        Err(e) => return Err(CliError::internal(e)),
    };

    let by_id: BTreeMap<&str, &cultnov::Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
    let dish_of: BTreeMap<&str, &DishSpec> = dishes.iter().map(|d| (d.canonical_name.as_str(), d)).collect();
    let mut staged = Staged::default();
    let manifests_dir = cfg.manifests_dir();
    for split in &splits {
        let manifest = to_manifest(split, cfg.seed, &by_id, dish_of[split.dish.as_str()]);
        staged.add(manifests_dir.join(manifest.file_name()), json_bytes(&manifest)?);
    }

    let out = cfg.output_dir();
    let rows: Vec<Vec<String>> = report
        .iter()
        .map(|r| {
            vec![r.dish.clone(), r.origin.clone(), r.kb_size.to_string(), r.variation_count.to_string(), r.status.clone()]
        })
        .collect();
    staged.add(
        out.join("eligibility.csv"),
        csv_bytes(&["dish", "origin", "kb_size", "variation_count", "status"], &rows)?,
    );
    if let Some(c) = &clusters {
        let rows: Vec<Vec<String>> = c
            .clusters
            .iter()
            .enumerate()
            .flat_map(|(i, cl)| {
                cl.members.iter().map(move |m| vec![m.clone(), i.to_string(), fmt_float(cl.modularity)])
            })
            .collect();
        staged.add(out.join("clusters.csv"), csv_bytes(&["country", "cluster", "cluster_modularity"], &rows)?);
        staged.add(out.join("clusters.json"), json_bytes(c)?);
    }

    let mut manifest = RunManifest::new("build", cfg)?;
    manifest.input("corpus", corpus_path)?;
    manifest.input("dish_specs", dish_path)?;
    manifest.input("registry", registry_path)?;
    manifest.outputs = staged.names();
    staged.add(out.join("run_manifest_build.json"), json_bytes(&manifest)?);
    staged.commit()?;

    let ineligible = report.iter().filter(|r| r.status != "eligible").count();
    for r in report.iter().filter(|r| r.status != "eligible") {
        info!("ineligible: {} / {} (kb {}, variations {})", r.dish, r.origin, r.kb_size, r.variation_count);
    }
    Ok(BuildSummary { eligible: splits.len(), ineligible, dropped_records })
}

fn to_manifest(
    split: &CorpusSplit,
    seed: u64,
    by_id: &BTreeMap<&str, &cultnov::Document>,
    dish: &DishSpec,
) -> ManifestFile {
    let variation_cultures = split
        .variations
        .iter()
        .map(|id| {
            let culture = resolved_country(by_id[id.as_str()], dish).unwrap_or_default();
            (id.clone(), culture)
        })
        .collect();
    ManifestFile {
        dish: split.dish.clone(),
        origin: split.origin.clone(),
        seed,
        holdout_fraction: split.holdout_fraction,
        holdout_seed: split.holdout_seed,
        knowledge: split.knowledge.clone(),
        variations: split.variations.clone(),
        held_out: split.held_out.clone(),
        variation_cultures,
    }
}
