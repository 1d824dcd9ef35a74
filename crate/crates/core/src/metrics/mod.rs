//! The five cultural novelty metrics.
//!
//! A [`KnowledgeSpace`] is the set of documents describing one product from
//! one culture. It caches the pooled word distribution, the PPMI matrix of
//! its collocations, and two leave-one-out thresholds. A variation document
//! is then scored by:
//!
//! - **newness**: share of words whose divergence contribution exceeds the
//!   in-community level, split into appearance (words pushed by the
//!   variation) and disappearance (words pushed by the knowledge space);
//! - **uniqueness**: divergence from the pooled distribution;
//! - **difference**: share of knowledge documents farther from the variation
//!   than the mean pairwise in-community distance;
//! - **new surprise**: share of the variation's collocations unseen in the
//!   knowledge space;
//! - **divergent surprise**: mean divergence between the collocation rows of
//!   shared lemmas.

pub mod ppmi;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{aggregate_distribution, doc_distribution, Document, TokenDistribution};
use crate::divergence::{jsd, jsd_decomposed, MixtureWeights, Side};
use crate::error::{Error, Result};

pub use ppmi::{LemmaPair, PpmiMatrix, DEFAULT_WINDOW};

pub const DEFAULT_LAMBDA1: f64 = 0.8;
pub const DEFAULT_LAMBDA2: f64 = 0.2;

/// How the newness threshold summarizes the pooled leave-one-out contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "q", rename_all = "lowercase")]
pub enum ThresholdStat {
    Mean,
    /// Empirical quantile in `[0, 1]` (linear interpolation).
    Quantile(f64),
}

/// Metric parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoveltyConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub window: usize,
    pub newness_threshold: ThresholdStat,
}

impl Default for NoveltyConfig {
    fn default() -> Self {
        Self {
            lambda1: DEFAULT_LAMBDA1,
            lambda2: DEFAULT_LAMBDA2,
            window: DEFAULT_WINDOW,
            newness_threshold: ThresholdStat::Mean,
        }
    }
}

impl NoveltyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda1) || !(0.0..=1.0).contains(&self.lambda2) {
            return Err(Error::InvalidParameter("lambda weights must lie in [0,1]".into()));
        }
        if (self.lambda1 + self.lambda2 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "lambda1 + lambda2 must be 1, got {}",
                self.lambda1 + self.lambda2
            )));
        }
        if self.window < 2 {
            return Err(Error::InvalidParameter("window must be at least 2".into()));
        }
        if let ThresholdStat::Quantile(q) = self.newness_threshold {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidParameter(format!("quantile {q} outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// Documents of one (product, culture) pair with calibrated thresholds.
#[derive(Debug, Clone)]
pub struct KnowledgeSpace {
    product: String,
    culture: String,
    docs: Vec<Document>,
    doc_dists: Vec<TokenDistribution>,
    aggregate: TokenDistribution,
    ppmi: PpmiMatrix,
    epsilon_newness: f64,
    epsilon_difference: f64,
    ingredient_union: BTreeSet<String>,
    mean_doc_length: f64,
    config: NoveltyConfig,
}

impl KnowledgeSpace {
    /// Build and calibrate. Fails with `InsufficientKb` below two documents
    /// and `EmptyDocument` if any document has no tokens.
    pub fn build(
        product: impl Into<String>,
        culture: impl Into<String>,
        docs: Vec<Document>,
        config: NoveltyConfig,
    ) -> Result<Self> {
        config.validate()?;
        if docs.len() < 2 {
            return Err(Error::InsufficientKb(docs.len()));
        }
        let doc_dists = docs.iter().map(doc_distribution).collect::<Result<Vec<_>>>()?;
        let aggregate = aggregate_distribution(&docs)?;
        let sequences: Vec<Vec<&str>> = docs.iter().map(Document::lemma_vec).collect();
        let ppmi = PpmiMatrix::build(&sequences, config.window)?;
        let epsilon_newness = newness_threshold_with(&docs, config.newness_threshold)?;
        let epsilon_difference = mean_pairwise_jsd(&doc_dists);
        let ingredient_union = docs.iter().flat_map(|d| d.ingredients.iter().cloned()).collect();
        let mean_doc_length = docs.iter().map(Document::len).sum::<usize>() as f64 / docs.len() as f64;
        Ok(Self {
            product: product.into(),
            culture: culture.into(),
            docs,
            doc_dists,
            aggregate,
            ppmi,
            epsilon_newness,
            epsilon_difference,
            ingredient_union,
            mean_doc_length,
            config,
        })
    }

    pub fn product(&self) -> &str {
        &self.product
    }

    pub fn culture(&self) -> &str {
        &self.culture
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn doc_distributions(&self) -> &[TokenDistribution] {
        &self.doc_dists
    }

    pub fn aggregate(&self) -> &TokenDistribution {
        &self.aggregate
    }

    pub fn ppmi(&self) -> &PpmiMatrix {
        &self.ppmi
    }

    pub fn epsilon_newness(&self) -> f64 {
        self.epsilon_newness
    }

    pub fn epsilon_difference(&self) -> f64 {
        self.epsilon_difference
    }

    pub fn ingredient_union(&self) -> &BTreeSet<String> {
        &self.ingredient_union
    }

    pub fn mean_doc_length(&self) -> f64 {
        self.mean_doc_length
    }

    pub fn config(&self) -> &NoveltyConfig {
        &self.config
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn quantile(values: &mut [f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let pos = q * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    values[lo] + (values[hi] - values[lo]) * (pos - lo as f64)
}

/// Positive per-word contributions of every leave-one-out fold: each
/// document against the pooled distribution of the others.
pub fn loo_contributions(docs: &[Document]) -> Result<Vec<f64>> {
    if docs.len() < 2 {
        return Err(Error::InsufficientKb(docs.len()));
    }
    let mut pooled = Vec::new();
    for (i, held_out) in docs.iter().enumerate() {
        let rest = aggregate_distribution(docs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, d)| d))?;
        let t = doc_distribution(held_out)?;
        let (_, parts) = jsd_decomposed(&rest, &t, MixtureWeights::proportional(&rest, &t));
        pooled.extend(parts.into_iter().map(|c| c.value).filter(|v| *v > 0.0));
    }
    Ok(pooled)
}

/// Mean of the strictly positive leave-one-out contributions (0 when none).
pub fn calibrate_newness_threshold(docs: &[Document]) -> Result<f64> {
    newness_threshold_with(docs, ThresholdStat::Mean)
}

fn newness_threshold_with(docs: &[Document], stat: ThresholdStat) -> Result<f64> {
    let mut values = loo_contributions(docs)?;
    Ok(match stat {
        ThresholdStat::Mean => mean(&values),
        ThresholdStat::Quantile(q) => quantile(&mut values, q),
    })
}

fn mean_pairwise_jsd(dists: &[TokenDistribution]) -> f64 {
    let mut values = Vec::new();
    for (i, a) in dists.iter().enumerate() {
        for b in &dists[i + 1..] {
            values.push(jsd(a, b, MixtureWeights::equal()));
        }
    }
    mean(&values)
}

/// Mean equal-weight divergence over all unordered document pairs.
pub fn calibrate_difference_threshold(docs: &[Document]) -> Result<f64> {
    if docs.len() < 2 {
        return Err(Error::InsufficientKb(docs.len()));
    }
    let dists = docs.iter().map(doc_distribution).collect::<Result<Vec<_>>>()?;
    Ok(mean_pairwise_jsd(&dists))
}

/// Appearance, disappearance and their weighted combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Newness {
    pub appearance: f64,
    pub disappearance: f64,
    pub newness: f64,
}

/// Newness against the pooled knowledge distribution, using the knowledge
/// space's calibrated threshold. A word counts when its contribution is
/// strictly above the threshold and it is attributed to the relevant side.
pub fn newness(kb: &KnowledgeSpace, variation: &Document, lambda1: f64, lambda2: f64) -> Result<Newness> {
    let q = doc_distribution(variation)?;
    newness_of(kb, &q, lambda1, lambda2)
}

fn newness_of(kb: &KnowledgeSpace, q: &TokenDistribution, lambda1: f64, lambda2: f64) -> Result<Newness> {
    if (lambda1 + lambda2 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("lambda1 + lambda2 must be 1".into()));
    }
    let p = kb.aggregate();
    let eps = kb.epsilon_newness();
    let (_, parts) = jsd_decomposed(p, q, MixtureWeights::proportional(p, q));
    let mut appear = 0usize;
    let mut disappear = 0usize;
    for c in &parts {
        if c.value > eps {
            match c.attributed_to {
                Side::Q => appear += 1,
                Side::P => disappear += 1,
                Side::Neutral => {}
            }
        }
    }
    let appearance = appear as f64 / q.support_len() as f64;
    let disappearance = disappear as f64 / p.support_len() as f64;
    Ok(Newness { appearance, disappearance, newness: lambda1 * appearance + lambda2 * disappearance })
}

/// Divergence from the pooled knowledge distribution (size-proportional weights).
pub fn uniqueness(kb: &KnowledgeSpace, variation: &Document) -> Result<f64> {
    let q = doc_distribution(variation)?;
    Ok(uniqueness_of(kb, &q))
}

fn uniqueness_of(kb: &KnowledgeSpace, q: &TokenDistribution) -> f64 {
    let p = kb.aggregate();
    jsd(p, q, MixtureWeights::proportional(p, q))
}

/// Fraction of knowledge documents whose equal-weight divergence from the
/// variation is strictly above the calibrated threshold.
pub fn difference(kb: &KnowledgeSpace, variation: &Document) -> Result<f64> {
    let q = doc_distribution(variation)?;
    Ok(difference_with_threshold(kb, &q, kb.epsilon_difference()))
}

/// [`difference`] with an explicit threshold.
pub fn difference_with_threshold(kb: &KnowledgeSpace, q: &TokenDistribution, epsilon: f64) -> f64 {
    let dists = kb.doc_distributions();
    let far = dists.iter().filter(|p| jsd(p, q, MixtureWeights::equal()) > epsilon).count();
    far as f64 / dists.len() as f64
}

/// PPMI matrix of a token sequence (or several), with the given window.
pub fn build_ppmi<S: AsRef<str>>(sequences: &[Vec<S>], window: usize) -> Result<PpmiMatrix> {
    PpmiMatrix::build(sequences, window)
}

/// Share of the variation's positive collocations that the knowledge space
/// does not hold (including pairs over out-of-vocabulary lemmas).
pub fn new_surprise(kb_ppmi: &PpmiMatrix, var_ppmi: &PpmiMatrix) -> f64 {
    let total = var_ppmi.pairs().len();
    if total == 0 {
        return 0.0;
    }
    let novel = var_ppmi
        .pairs()
        .keys()
        .filter(|pair| {
            !kb_ppmi.vocab().contains(pair.first())
                || !kb_ppmi.vocab().contains(pair.second())
                || !kb_ppmi.contains_pair(pair)
        })
        .count();
    novel as f64 / total as f64
}

fn row_distribution(row: &BTreeMap<&str, f64>) -> Option<TokenDistribution> {
    let mass: f64 = row.values().sum();
    if mass <= 0.0 {
        return None;
    }
    // renormalize so rounding never trips the sum check
    let mut probs: Vec<(String, f64)> = row.iter().map(|(w, v)| (w.to_string(), v / mass)).collect();
    let s: f64 = probs.iter().map(|(_, p)| p).sum();
    if let Some(last) = probs.last_mut() {
        last.1 += 1.0 - s;
    }
    TokenDistribution::from_probs(probs, 1).ok()
}

/// Mean equal-weight divergence between the L1-normalized PPMI rows of every
/// lemma shared by both matrices and carrying positive mass in both.
pub fn divergent_surprise(kb_ppmi: &PpmiMatrix, var_ppmi: &PpmiMatrix) -> f64 {
    let kb_rows = kb_ppmi.rows();
    let var_rows = var_ppmi.rows();
    let mut values = Vec::new();
    for w in kb_ppmi.vocab().intersection(var_ppmi.vocab()) {
        let (Some(kr), Some(vr)) = (kb_rows.get(w.as_str()), var_rows.get(w.as_str())) else {
            continue;
        };
        if let (Some(p), Some(q)) = (row_distribution(kr), row_distribution(vr)) {
            values.push(jsd(&p, &q, MixtureWeights::equal()));
        }
    }
    mean(&values)
}

/// All scores of one variation against one knowledge space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoveltyScores {
    pub appearance: f64,
    pub disappearance: f64,
    pub newness: f64,
    pub uniqueness: f64,
    pub difference: f64,
    pub new_surprise: f64,
    pub divergent_surprise: f64,
}

impl NoveltyScores {
    pub const NAMES: [&'static str; 7] = [
        "appearance",
        "disappearance",
        "newness",
        "uniqueness",
        "difference",
        "new_surprise",
        "divergent_surprise",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.appearance,
            self.disappearance,
            self.newness,
            self.uniqueness,
            self.difference,
            self.new_surprise,
            self.divergent_surprise,
        ]
    }
}

/// Score a variation with every metric, using the knowledge space's config.
pub fn score_all(kb: &KnowledgeSpace, variation: &Document) -> Result<NoveltyScores> {
    let q = doc_distribution(variation)?;
    let cfg = kb.config();
    let n = newness_of(kb, &q, cfg.lambda1, cfg.lambda2)?;
    let var_ppmi = PpmiMatrix::build(&[variation.lemma_vec()], cfg.window)?;
    Ok(NoveltyScores {
        appearance: n.appearance,
        disappearance: n.disappearance,
        newness: n.newness,
        uniqueness: uniqueness_of(kb, &q),
        difference: difference_with_threshold(kb, &q, kb.epsilon_difference()),
        new_surprise: new_surprise(kb.ppmi(), &var_ppmi),
        divergent_surprise: divergent_surprise(kb.ppmi(), &var_ppmi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn doc(id: &str, lemmas: &[&str]) -> Document {
        Document::from_lemmas(id, lemmas).unwrap()
    }

    fn kb(docs: &[&[&str]]) -> KnowledgeSpace {
        let docs = docs.iter().enumerate().map(|(i, d)| doc(&format!("k{i}"), d)).collect();
        KnowledgeSpace::build("dish", "XX", docs, NoveltyConfig::default()).unwrap()
    }

    #[test]
    fn insufficient_kb() {
        let r = KnowledgeSpace::build("d", "XX", vec![doc("a", &["a"])], NoveltyConfig::default());
        assert_eq!(r.unwrap_err(), Error::InsufficientKb(1));
        assert_eq!(calibrate_newness_threshold(&[]), Err(Error::InsufficientKb(0)));
        assert_eq!(calibrate_difference_threshold(&[doc("a", &["a"])]), Err(Error::InsufficientKb(1)));
    }

    #[test]
    fn identical_docs_have_zero_thresholds() {
        let k = kb(&[&["a", "b", "c"], &["a", "b", "c"]]);
        assert_eq!(k.epsilon_newness(), 0.0);
        assert_eq!(k.epsilon_difference(), 0.0);
    }

    #[test]
    fn duplicated_tokens_keep_threshold() {
        let base = [doc("1", &["a", "a", "b"]), doc("2", &["a", "b", "b"]), doc("3", &["a", "c"])];
        let doubled: Vec<Document> = base
            .iter()
            .map(|d| {
                let l: Vec<&str> = d.lemmas().chain(d.lemmas()).collect();
                doc(&d.id, &l)
            })
            .collect();
        assert_abs_diff_eq!(
            calibrate_newness_threshold(&base).unwrap(),
            calibrate_newness_threshold(&doubled).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn disjoint_pair_difference_threshold() {
        let eps = calibrate_difference_threshold(&[doc("1", &["a"]), doc("2", &["b"])]).unwrap();
        assert_abs_diff_eq!(eps, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn variation_equal_to_aggregate() {
        let k = kb(&[&["a", "a", "b"], &["a", "b", "b"]]);
        let v = doc("v", &["a", "b"]);
        let n = newness(&k, &v, 0.8, 0.2).unwrap();
        assert_eq!((n.appearance, n.disappearance, n.newness), (0.0, 0.0, 0.0));
        assert_eq!(uniqueness(&k, &v).unwrap(), 0.0);
    }

    #[test]
    fn unseen_words_all_appear() {
        let k = kb(&[&["a", "a", "b"], &["a", "b", "b"]]);
        let n = newness(&k, &doc("v", &["c", "c", "c"]), 0.8, 0.2).unwrap();
        assert_eq!(n.appearance, 1.0);
        assert_abs_diff_eq!(n.newness, 0.8 * n.appearance + 0.2 * n.disappearance, epsilon = 1e-12);
    }

    #[test]
    fn difference_edges() {
        let k = kb(&[&["a", "b"], &["a", "b"], &["a", "b"]]);
        assert_eq!(difference(&k, &doc("v", &["a", "b"])).unwrap(), 0.0);
        assert_eq!(difference(&k, &doc("v", &["x", "y"])).unwrap(), 1.0);
        // disjoint supports with weights (3/4, 1/4): the binary entropy of the weights
        let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert_abs_diff_eq!(uniqueness(&k, &doc("v", &["x", "y"])).unwrap(), h, epsilon = 1e-12);
    }

    #[test]
    fn surprise_examples() {
        let kbm = build_ppmi(&[vec!["a", "b", "c"]], 3).unwrap();
        let var = build_ppmi(&[vec!["a", "b", "x"]], 3).unwrap();
        assert_abs_diff_eq!(new_surprise(&kbm, &var), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(new_surprise(&kbm, &kbm), 0.0);
        assert_eq!(divergent_surprise(&kbm, &kbm), 0.0);
        let oov = build_ppmi(&[vec!["x", "y", "z"]], 3).unwrap();
        assert_eq!(new_surprise(&kbm, &oov), 1.0);
        let none = build_ppmi(&[vec!["x"]], 3).unwrap();
        assert_eq!(new_surprise(&kbm, &none), 0.0);
        assert_eq!(divergent_surprise(&kbm, &none), 0.0);
    }

    #[test]
    fn disjoint_rows_contribute_one() {
        // "a" co-occurs only with b in the first matrix and only with z in the second
        let kbm = build_ppmi(&[vec!["a", "b"], vec!["c", "d"]], 2).unwrap();
        let var = build_ppmi(&[vec!["a", "z"], vec!["e", "f"]], 2).unwrap();
        assert_abs_diff_eq!(divergent_surprise(&kbm, &var), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn config_validation() {
        let mut c = NoveltyConfig::default();
        assert_eq!((c.lambda1, c.lambda2, c.window), (0.8, 0.2, 3));
        c.lambda1 = 0.5;
        assert!(c.validate().is_err());
        let c = NoveltyConfig { newness_threshold: ThresholdStat::Quantile(0.5), ..NoveltyConfig::default() };
        assert!(c.validate().is_ok());
    }

    #[test]
    fn quantile_interpolates() {
        let mut v = vec![3.0, 1.0, 2.0, 4.0];
        assert_abs_diff_eq!(quantile(&mut v, 0.5), 2.5, epsilon = 1e-15);
        assert_eq!(quantile(&mut v, 0.0), 1.0);
        assert_eq!(quantile(&mut v, 1.0), 4.0);
    }
}
