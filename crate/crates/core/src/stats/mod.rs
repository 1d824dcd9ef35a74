//! Correlations, rank agreement, least squares and mediation, plus the
//! table builders that run them over scored variations.

mod correlation;
mod mediation;
mod ols;
mod rbo;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::ControlVars;
use crate::distances::DistanceKind;
use crate::metrics::NoveltyScores;

pub use correlation::{kendall_tau, normal_two_sided_p, pearson, t_two_sided_p, Correlation};
pub use mediation::{mediate, Effect, MediationResult, DEFAULT_BOOTSTRAP};
pub use ols::{ols, CovarianceType, Design, RegressionResult, INTERCEPT};
pub use rbo::{rbo, DEFAULT_RBO_P};

/// Metrics entering the correlation, regression and mediation tables.
pub const ANALYSIS_METRICS: [&str; 5] = ["newness", "uniqueness", "difference", "new_surprise", "divergent_surprise"];
pub const CONTROLS: [&str; 3] = ["lexical_diversity", "new_ingredient_ratio", "length_ratio"];

/// One scored variation joined with its controls and cultural distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub product: String,
    pub kb_culture: String,
    pub variation_id: String,
    pub variation_culture: String,
    pub scores: NoveltyScores,
    pub controls: ControlVars,
    pub iw: Option<f64>,
    pub geo: Option<f64>,
    pub linguistic: Option<f64>,
    pub religious: Option<f64>,
}

impl AnalysisRow {
    pub fn distance(&self, kind: DistanceKind) -> Option<f64> {
        match kind {
            DistanceKind::Iw => self.iw,
            DistanceKind::Geo => self.geo,
            DistanceKind::Linguistic => self.linguistic,
            DistanceKind::Religious => self.religious,
        }
    }

    pub fn set_distance(&mut self, kind: DistanceKind, value: Option<f64>) {
        match kind {
            DistanceKind::Iw => self.iw = value,
            DistanceKind::Geo => self.geo = value,
            DistanceKind::Linguistic => self.linguistic = value,
            DistanceKind::Religious => self.religious = value,
        }
    }

    /// A metric or control by column name.
    pub fn variable(&self, name: &str) -> Option<f64> {
        let s = &self.scores;
        let c = &self.controls;
        Some(match name {
            "appearance" => s.appearance,
            "disappearance" => s.disappearance,
            "newness" => s.newness,
            "uniqueness" => s.uniqueness,
            "difference" => s.difference,
            "new_surprise" => s.new_surprise,
            "divergent_surprise" => s.divergent_surprise,
            "lexical_diversity" => c.lexical_diversity,
            "new_ingredient_ratio" => c.new_ingredient_ratio,
            "length_ratio" => c.length_ratio,
            _ => return None,
        })
    }

    fn column(rows: &[&AnalysisRow], name: &str) -> Vec<f64> {
        rows.iter().map(|r| r.variable(name).unwrap_or(f64::NAN)).collect()
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ *b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Seed for one named sub-analysis, stable across runs and orderings.
pub fn derive_seed(seed: u64, parts: &[&str]) -> u64 {
    seed ^ fnv1a(parts.join("\u{0}").as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricPairRow {
    pub metric_a: String,
    pub metric_b: String,
    pub n: usize,
    pub pearson_r: f64,
    pub pearson_p: f64,
    pub kendall_tau: f64,
    pub kendall_p: f64,
    /// Mean over (product, origin) splits of the RBO between the two rankings
    /// of that split's variations.
    pub rbo: f64,
    pub rbo_splits: usize,
}

/// Ranking of a split's variations by a metric, highest first, ties by id.
fn ranking<'a>(rows: &[&'a AnalysisRow], metric: &str) -> Vec<&'a str> {
    let mut v: Vec<(&str, f64)> =
        rows.iter().map(|r| (r.variation_id.as_str(), r.variable(metric).unwrap_or(f64::NAN))).collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));
    v.into_iter().map(|(id, _)| id).collect()
}

fn by_split(rows: &[AnalysisRow]) -> BTreeMap<(&str, &str), Vec<&AnalysisRow>> {
    let mut out: BTreeMap<(&str, &str), Vec<&AnalysisRow>> = BTreeMap::new();
    for r in rows {
        out.entry((r.product.as_str(), r.kb_culture.as_str())).or_default().push(r);
    }
    out
}

fn or_nan(c: crate::Result<Correlation>) -> (f64, f64) {
    c.map(|c| (c.coefficient, c.p_value)).unwrap_or((f64::NAN, f64::NAN))
}

/// Pearson and Kendall over all rows, RBO within each split, for every
/// unordered pair of analysis metrics.
pub fn metric_correlations(rows: &[AnalysisRow], rbo_p: f64) -> crate::Result<Vec<MetricPairRow>> {
    let all: Vec<&AnalysisRow> = rows.iter().collect();
    let splits = by_split(rows);
    let mut out = Vec::new();
    for (i, a) in ANALYSIS_METRICS.iter().enumerate() {
        for b in &ANALYSIS_METRICS[i + 1..] {
            let (xa, xb) = (AnalysisRow::column(&all, a), AnalysisRow::column(&all, b));
            let (pearson_r, pearson_p) = or_nan(pearson(&xa, &xb));
            let (kendall_tau, kendall_p) = or_nan(kendall_tau(&xa, &xb));
            let mut rbo_sum = 0.0;
            for group in splits.values() {
                rbo_sum += rbo(&ranking(group, a), &ranking(group, b), rbo_p)?;
            }
            let rbo_splits = splits.len();
            out.push(MetricPairRow {
                metric_a: a.to_string(),
                metric_b: b.to_string(),
                n: rows.len(),
                pearson_r,
                pearson_p,
                kendall_tau,
                kendall_p,
                rbo: if rbo_splits == 0 { f64::NAN } else { rbo_sum / rbo_splits as f64 },
                rbo_splits,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceCorrelationRow {
    pub metric: String,
    pub distance: DistanceKind,
    pub n: usize,
    pub r: f64,
    pub p: f64,
}

fn with_distance(rows: &[AnalysisRow], kind: DistanceKind) -> (Vec<&AnalysisRow>, Vec<f64>) {
    rows.iter().filter_map(|r| r.distance(kind).filter(|d| d.is_finite()).map(|d| (r, d))).unzip()
}

/// Pearson correlation of each analysis metric with each distance, over the
/// rows where that distance is known.
pub fn distance_correlations(rows: &[AnalysisRow], kinds: &[DistanceKind]) -> Vec<DistanceCorrelationRow> {
    let mut out = Vec::new();
    for &kind in kinds {
        let (sub, d) = with_distance(rows, kind);
        for m in ANALYSIS_METRICS {
            let (r, p) = or_nan(pearson(&AnalysisRow::column(&sub, m), &d));
            out.push(DistanceCorrelationRow { metric: m.to_string(), distance: kind, n: sub.len(), r, p });
        }
    }
    out
}

/// One coefficient line of a regression table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionRow {
    pub model: String,
    pub distance: DistanceKind,
    pub term: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub r_squared: f64,
    pub n_obs: usize,
}

fn flatten(model: &str, kind: DistanceKind, fit: &RegressionResult) -> Vec<RegressionRow> {
    fit.terms
        .iter()
        .map(|t| RegressionRow {
            model: model.to_string(),
            distance: kind,
            term: t.clone(),
            coefficient: fit.coefficients[t],
            std_error: fit.std_errors[t],
            t_stat: fit.t_stats[t],
            p_value: fit.p_values[t],
            r_squared: fit.r_squared,
            n_obs: fit.n_obs,
        })
        .collect()
}

fn design(rows: &[&AnalysisRow], names: &[&str]) -> Design {
    names.iter().fold(Design::new(), |d, n| d.column(*n, AnalysisRow::column(rows, n)))
}

/// Outcome of a batch of regressions: fitted tables plus the models that
/// could not be estimated and why.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegressionTable {
    pub rows: Vec<RegressionRow>,
    pub skipped: Vec<String>,
}

/// Each distance regressed on all analysis metrics and the controls
/// (`model = "full"`), and on each metric alone (`model = "marginal:<metric>"`).
pub fn regressions(rows: &[AnalysisRow], kinds: &[DistanceKind], cov: CovarianceType) -> RegressionTable {
    let mut table = RegressionTable::default();
    for &kind in kinds {
        let (sub, y) = with_distance(rows, kind);
        let full: Vec<&str> = ANALYSIS_METRICS.iter().chain(CONTROLS.iter()).copied().collect();
        let mut models = vec![("full".to_string(), full)];
        models.extend(ANALYSIS_METRICS.iter().map(|m| (format!("marginal:{m}"), vec![*m])));
        for (name, vars) in models {
            match ols(&design(&sub, &vars), &y, cov) {
                Ok(fit) => table.rows.extend(flatten(&name, kind, &fit)),
                Err(e) => table.skipped.push(format!("{name} on {}: {e}", kind.as_str())),
            }
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MediationRow {
    pub metric: String,
    pub mediator: String,
    pub distance: DistanceKind,
    pub result: MediationResult,
}

/// Every analysis metric as treatment, every control as mediator, every
/// distance as outcome.
pub fn mediation_table(
    rows: &[AnalysisRow],
    kinds: &[DistanceKind],
    n_boot: usize,
    seed: u64,
) -> (Vec<MediationRow>, Vec<String>) {
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for &kind in kinds {
        let (sub, y) = with_distance(rows, kind);
        for metric in ANALYSIS_METRICS {
            let t = AnalysisRow::column(&sub, metric);
            for mediator in CONTROLS {
                let m = AnalysisRow::column(&sub, mediator);
                let s = derive_seed(seed, &[metric, mediator, kind.as_str()]);
                match mediate(&t, &m, &y, &[], n_boot, s) {
                    Ok(result) => out.push(MediationRow {
                        metric: metric.to_string(),
                        mediator: mediator.to_string(),
                        distance: kind,
                        result,
                    }),
                    Err(e) => skipped.push(format!("{metric} via {mediator} on {}: {e}", kind.as_str())),
                }
            }
        }
    }
    (out, skipped)
}
