//! Positive pointwise mutual information over windowed co-occurrences.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};

/// Default co-occurrence window (a token and its next two neighbours).
pub const DEFAULT_WINDOW: usize = 3;

/// Unordered lemma pair, stored with the smaller lemma first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LemmaPair(String, String);

impl LemmaPair {
    pub fn new(a: &str, b: &str) -> Self {
        if a <= b {
            Self(a.to_string(), b.to_string())
        } else {
            Self(b.to_string(), a.to_string())
        }
    }

    pub fn first(&self) -> &str {
        &self.0
    }

    pub fn second(&self) -> &str {
        &self.1
    }

    fn other(&self, w: &str) -> &str {
        if self.0 == w {
            &self.1
        } else {
            &self.0
        }
    }
}

/// Sparse symmetric matrix of strictly positive PMI values (bits).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PpmiMatrix {
    pairs: BTreeMap<LemmaPair, f64>,
    vocab: BTreeSet<String>,
    unigram_counts: BTreeMap<String, usize>,
    pair_total: usize,
}

impl PpmiMatrix {
    /// Count every unordered token pair at distance `< window` inside each
    /// sequence (never across sequences) and keep `max(PMI, 0)` with
    /// `PMI = log2(p(a,b) / (p(a)·p(b)))`, `p(a,b) = count/pair_total` and
    /// unigram probabilities from the same sequences.
    pub fn build<S: AsRef<str>>(sequences: &[Vec<S>], window: usize) -> Result<Self> {
        if window < 2 {
            return Err(Error::InvalidParameter(format!("window must be at least 2, got {window}")));
        }
        let mut unigram_counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut pair_counts: BTreeMap<LemmaPair, usize> = BTreeMap::new();
        for seq in sequences {
            for (i, a) in seq.iter().enumerate() {
                *unigram_counts.entry(a.as_ref().to_string()).or_insert(0) += 1;
                for b in seq.iter().skip(i + 1).take(window - 1) {
                    *pair_counts.entry(LemmaPair::new(a.as_ref(), b.as_ref())).or_insert(0) += 1;
                }
            }
        }
        let unigram_total: usize = unigram_counts.values().sum();
        if unigram_total == 0 {
            return Err(Error::EmptyCorpus);
        }
        let pair_total: usize = pair_counts.values().sum();
        let n1 = unigram_total as f64;
        let n2 = pair_total as f64;
        let pairs = pair_counts
            .into_iter()
            .filter_map(|(pair, c)| {
                let pa = unigram_counts[pair.first()] as f64 / n1;
                let pb = unigram_counts[pair.second()] as f64 / n1;
                let pmi = ((c as f64 / n2) / (pa * pb)).log2();
                (pmi > 0.0).then_some((pair, pmi))
            })
            .collect();
        Ok(Self {
            pairs,
            vocab: unigram_counts.keys().cloned().collect(),
            unigram_counts,
            pair_total,
        })
    }

    pub fn get(&self, a: &str, b: &str) -> f64 {
        self.pairs.get(&LemmaPair::new(a, b)).copied().unwrap_or(0.0)
    }

    pub fn contains_pair(&self, pair: &LemmaPair) -> bool {
        self.pairs.contains_key(pair)
    }

    pub fn pairs(&self) -> &BTreeMap<LemmaPair, f64> {
        &self.pairs
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    pub fn unigram_counts(&self) -> &BTreeMap<String, usize> {
        &self.unigram_counts
    }

    pub fn pair_total(&self) -> usize {
        self.pair_total
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Positive entries of the row for `w`, keyed by the co-occurring lemma.
    pub fn row(&self, w: &str) -> BTreeMap<&str, f64> {
        self.pairs
            .iter()
            .filter(|(pair, _)| pair.first() == w || pair.second() == w)
            .map(|(pair, v)| (pair.other(w), *v))
            .collect()
    }

    /// All rows at once; cheaper than calling [`row`](Self::row) per lemma.
    pub fn rows(&self) -> BTreeMap<&str, BTreeMap<&str, f64>> {
        let mut rows: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
        for (pair, v) in &self.pairs {
            rows.entry(pair.first()).or_default().insert(pair.second(), *v);
            rows.entry(pair.second()).or_default().insert(pair.first(), *v);
        }
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn build(seqs: &[&[&str]], window: usize) -> PpmiMatrix {
        let seqs: Vec<Vec<&str>> = seqs.iter().map(|s| s.to_vec()).collect();
        PpmiMatrix::build(&seqs, window).unwrap()
    }

    #[test]
    fn single_pair() {
        let m = build(&[&["a", "b"]], 3);
        assert_eq!(m.pairs().len(), 1);
        assert_abs_diff_eq!(m.get("a", "b"), 2.0, epsilon = 1e-12);
        assert_eq!(m.get("b", "a"), m.get("a", "b"));
        assert_eq!(m.pair_total(), 1);
    }

    #[test]
    fn singleton_has_no_pairs() {
        let m = build(&[&["a"]], 3);
        assert!(m.is_empty());
        assert_eq!(m.vocab().len(), 1);
    }

    #[test]
    fn window_enumeration() {
        let m = build(&[&["a", "b", "c"]], 3);
        let keys: Vec<_> = m.pairs().keys().map(|p| (p.first(), p.second())).collect();
        assert_eq!(keys, [("a", "b"), ("a", "c"), ("b", "c")]);
        // window 2 only sees adjacent tokens
        let m = build(&[&["a", "b", "c"]], 2);
        assert_eq!(m.pair_total(), 2);
        assert_eq!(m.get("a", "c"), 0.0);
    }

    #[test]
    fn windows_stop_at_document_boundaries() {
        let m = build(&[&["a", "b"], &["c", "d"]], 3);
        assert_eq!(m.pair_total(), 2);
        assert_eq!(m.get("b", "c"), 0.0);
    }

    #[test]
    fn errors() {
        let empty: Vec<Vec<&str>> = vec![vec![]];
        assert_eq!(PpmiMatrix::build(&empty, 3), Err(Error::EmptyCorpus));
        assert!(PpmiMatrix::build(&[vec!["a"]], 1).is_err());
    }

    #[test]
    fn rows_match_row() {
        let m = build(&[&["a", "b", "c", "a", "d"]], 3);
        let rows = m.rows();
        for w in m.vocab() {
            assert_eq!(rows.get(w.as_str()).cloned().unwrap_or_default(), m.row(w));
        }
    }
}
