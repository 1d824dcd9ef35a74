//! `analyze` and `distances`: relate scores to cultural distances.

use std::collections::BTreeMap;
use std::path::Path;

use cultnov::distances::{DistanceKind, DistanceMatrix, Registry};
use cultnov::stats::{
    distance_correlations, mediation_table, metric_correlations, regressions, AnalysisRow, CovarianceType, Effect,
};
use cultnov::{ControlVars, NoveltyScores};
use log::{info, warn};

use crate::config::{require, RunConfig};
use crate::io::{csv_bytes, fmt_float, fmt_opt, json_bytes, read_registry, RunManifest, Staged};
use crate::score::{read_scores, ScoreRow};
use crate::{with_workers, CliError};

fn csv_path(cfg: &RunConfig, kind: DistanceKind) -> Option<&Path> {
    let d = &cfg.distances;
    match kind {
        DistanceKind::Iw => d.iw.as_deref(),
        DistanceKind::Geo => d.geo.as_deref(),
        DistanceKind::Linguistic => d.linguistic.as_deref(),
        DistanceKind::Religious => d.religious.as_deref(),
    }
}

/// Every distance source available: CSV files first, then the registry for
/// IW and geographic distances. Empty sources are left out.
pub fn load_distances(cfg: &RunConfig, registry: &Registry) -> Result<BTreeMap<DistanceKind, DistanceMatrix>, CliError> {
    let mut out = BTreeMap::new();
    for kind in DistanceKind::ALL {
        let matrix = match csv_path(cfg, kind) {
            Some(p) => DistanceMatrix::load(p, kind, registry).map_err(|e| CliError::input(p, e))?,
            None if matches!(kind, DistanceKind::Iw | DistanceKind::Geo) => {
                DistanceMatrix::from_registry(registry, kind).map_err(CliError::internal)?
            }
            None => continue,
        };
        if matrix.is_empty() {
            info!("no {kind} distances available");
        } else {
            out.insert(kind, matrix);
        }
    }
    Ok(out)
}

/// Join score rows with the distance between each split's origin and the
/// variation's country.
pub fn join(scores: &[ScoreRow], matrices: &BTreeMap<DistanceKind, DistanceMatrix>) -> Vec<AnalysisRow> {
    scores
        .iter()
        .map(|s| {
            let mut row = AnalysisRow {
                product: s.product.clone(),
                kb_culture: s.kb_culture.clone(),
                variation_id: s.variation_id.clone(),
                variation_culture: s.variation_culture.clone(),
                scores: NoveltyScores {
                    appearance: s.appearance,
                    disappearance: s.disappearance,
                    newness: s.newness,
                    uniqueness: s.uniqueness,
                    difference: s.difference,
                    new_surprise: s.new_surprise,
                    divergent_surprise: s.divergent_surprise,
                },
                controls: ControlVars {
                    lexical_diversity: s.lexical_diversity,
                    new_ingredient_ratio: s.new_ingredient_ratio,
                    length_ratio: s.length_ratio,
                },
                iw: None,
                geo: None,
                linguistic: None,
                religious: None,
            };
            for (kind, m) in matrices {
                if !s.variation_culture.is_empty() {
                    row.set_distance(*kind, m.get(&s.kb_culture, &s.variation_culture).ok());
                }
            }
            row
        })
        .collect()
}

fn effect_cells(e: &Effect) -> [String; 4] {
    [fmt_float(e.estimate), fmt_opt(e.ci_low), fmt_opt(e.ci_high), fmt_opt(e.p_value)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeSummary {
    pub rows: usize,
    pub distances: Vec<DistanceKind>,
    pub skipped_models: usize,
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<AnalyzeSummary, CliError> {
    cfg.validate()?;
    let registry_path = require(&cfg.registry, "registry")?;
    let registry = read_registry(registry_path)?;
    let scores_path = cfg.scores_path();
    let scores = read_scores(&scores_path)?;
    let matrices = load_distances(cfg, &registry)?;
    if matrices.is_empty() {
        return Err(CliError::input(registry_path, "no distance source: registry lacks coordinates and no CSV given"));
    }
    let kinds: Vec<DistanceKind> = matrices.keys().copied().collect();
    let rows = join(&scores, &matrices);
    for kind in &kinds {
        let missing = rows.iter().filter(|r| r.distance(*kind).is_none()).count();
        if missing > 0 {
            info!("{missing} of {} rows lack a {kind} distance", rows.len());
        }
    }

    let cov = if cfg.robust_se { CovarianceType::Hc1 } else { CovarianceType::Classical };
    let (pairs, dist_corr, table, (mediation, med_skipped)) = with_workers(cfg.workers, || {
        let pairs = metric_correlations(&rows, cfg.rbo_p);
        (
            pairs,
            distance_correlations(&rows, &kinds),
            regressions(&rows, &kinds, cov),
            mediation_table(&rows, &kinds, cfg.bootstrap, cfg.seed),
        )
    })?;
    let pairs = pairs.map_err(CliError::internal)?;
    for s in table.skipped.iter().chain(&med_skipped) {
        warn!("skipped {s}");
    }
    if table.rows.is_empty() {
        warn!("no regression could be fitted");
    }

    let out = cfg.output_dir();
    let mut staged = Staged::default();
    let rows_pairs: Vec<Vec<String>> = pairs
        .iter()
        .map(|p| {
            vec![
                p.metric_a.clone(),
                p.metric_b.clone(),
                p.n.to_string(),
                fmt_float(p.pearson_r),
                fmt_float(p.pearson_p),
                fmt_float(p.kendall_tau),
                fmt_float(p.kendall_p),
                fmt_float(p.rbo),
                p.rbo_splits.to_string(),
            ]
        })
        .collect();
    staged.add(
        out.join("correlations.csv"),
        csv_bytes(
            &["metric_a", "metric_b", "n", "pearson_r", "pearson_p", "kendall_tau", "kendall_p", "rbo", "rbo_splits"],
            &rows_pairs,
        )?,
    );
    let rows_dist: Vec<Vec<String>> = dist_corr
        .iter()
        .map(|d| vec![d.metric.clone(), d.distance.to_string(), d.n.to_string(), fmt_float(d.r), fmt_float(d.p)])
        .collect();
    staged.add(out.join("distance_correlations.csv"), csv_bytes(&["metric", "distance", "n", "r", "p"], &rows_dist)?);
    let rows_reg: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.model.clone(),
                r.distance.to_string(),
                r.term.clone(),
                fmt_float(r.coefficient),
                fmt_float(r.std_error),
                fmt_float(r.t_stat),
                fmt_float(r.p_value),
                fmt_float(r.r_squared),
                r.n_obs.to_string(),
            ]
        })
        .collect();
    staged.add(
        out.join("regressions.csv"),
        csv_bytes(
            &["model", "distance", "term", "coefficient", "std_error", "t_stat", "p_value", "r_squared", "n_obs"],
            &rows_reg,
        )?,
    );
    let rows_med: Vec<Vec<String>> = mediation
        .iter()
        .map(|m| {
            let r = &m.result;
            let mut v = vec![m.metric.clone(), m.mediator.clone(), m.distance.to_string()];
            for e in [&r.total_effect, &r.acme, &r.ade] {
                v.extend(effect_cells(e));
            }
            v.push(r.n_obs.to_string());
            v.push(r.n_boot_used.to_string());
            v
        })
        .collect();
    let mut header = vec!["metric".to_string(), "mediator".into(), "distance".into()];
    for e in ["total", "acme", "ade"] {
        for f in ["estimate", "ci_low", "ci_high", "p"] {
            header.push(format!("{e}_{f}"));
        }
    }
    header.push("n_obs".into());
    header.push("n_boot_used".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    staged.add(out.join("mediation.csv"), csv_bytes(&header, &rows_med)?);

    let mut manifest = RunManifest::new("analyze", cfg)?;
    manifest.input("scores", &scores_path)?;
    manifest.input("registry", registry_path)?;
    for kind in DistanceKind::ALL {
        if let Some(p) = csv_path(cfg, kind) {
            manifest.input(kind.as_str(), p)?;
        }
    }
    manifest.outputs = staged.names();
    staged.add(out.join("run_manifest.json"), json_bytes(&manifest)?);
    staged.commit()?;
    Ok(AnalyzeSummary {
        rows: rows.len(),
        distances: kinds,
        skipped_models: table.skipped.len() + med_skipped.len(),
    })
}

/// Write IW and geographic distance matrices computed from the registry.
pub fn cmd_distances(cfg: &RunConfig) -> Result<Vec<std::path::PathBuf>, CliError> {
    let registry_path = require(&cfg.registry, "registry")?;
    let registry = read_registry(registry_path)?;
    let out = cfg.output_dir();
    let mut staged = Staged::default();
    for kind in [DistanceKind::Iw, DistanceKind::Geo] {
        let m = DistanceMatrix::from_registry(&registry, kind).map_err(CliError::internal)?;
        if m.is_empty() {
            warn!("registry has no data for {kind} distances");
        }
        let rows: Vec<Vec<String>> = m.iter().map(|(a, b, d)| vec![a.to_string(), b.to_string(), fmt_float(d)]).collect();
        staged.add(out.join(format!("{kind}_distances.csv")), csv_bytes(&["iso_a", "iso_b", "distance"], &rows)?);
    }
    staged.commit()
}
