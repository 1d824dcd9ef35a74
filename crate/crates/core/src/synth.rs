//! Synthetic corpora with a planted cultural gradient, used to check that
//! the metrics move with known distances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Document;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientConfig {
    /// Number of synthetic cultures; culture `i` sits at `d = i/(n-1)`.
    pub cultures: usize,
    pub base_vocab: usize,
    /// Size of the shared inventory of three-word phrases.
    pub phrases: usize,
    pub kb_docs: usize,
    pub phrases_per_doc: usize,
    pub seed: u64,
}

impl Default for GradientConfig {
    fn default() -> Self {
        Self { cultures: 40, base_vocab: 120, phrases: 60, kb_docs: 12, phrases_per_doc: 25, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSample {
    pub distance: f64,
    pub variation: Document,
}

/// A knowledge base built from the phrase inventory, and one variation per
/// culture in which each phrase is, with probability `d`, replaced by a
/// hybrid keeping its first word and adding two culture-specific words.
pub fn synthetic_gradient(cfg: &GradientConfig) -> Result<(Vec<Document>, Vec<GradientSample>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inventory: Vec<[String; 3]> = (0..cfg.phrases)
        .map(|_| std::array::from_fn(|_| format!("w{:03}", rng.random_range(0..cfg.base_vocab))))
        .collect();
    let draw_doc = |rng: &mut ChaCha8Rng| -> Vec<String> {
        (0..cfg.phrases_per_doc).flat_map(|_| inventory[rng.random_range(0..inventory.len())].clone()).collect()
    };

    let kb = (0..cfg.kb_docs)
        .map(|i| Document::from_lemmas(format!("kb{i:03}"), &draw_doc(&mut rng)).map(|d| d.with_country("KB")))
        .collect::<Result<Vec<_>>>()?;

    let denom = cfg.cultures.saturating_sub(1).max(1) as f64;
    let mut samples = Vec::with_capacity(cfg.cultures);
    for c in 0..cfg.cultures {
        let d = c as f64 / denom;
        let base = draw_doc(&mut rng);
        let mut lemmas = Vec::with_capacity(base.len());
        let mut fresh = 0usize;
        for phrase in base.chunks(3) {
            if rng.random_bool(d) {
                lemmas.push(phrase[0].clone());
                for _ in 0..2 {
                    lemmas.push(format!("c{c:02}n{fresh:03}"));
                    fresh += 1;
                }
            } else {
                lemmas.extend_from_slice(phrase);
            }
        }
        let variation = Document::from_lemmas(format!("var{c:02}"), &lemmas)?.with_country(format!("C{c:02}"));
        samples.push(GradientSample { distance: d, variation });
    }
    Ok((kb, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let (kb, samples) = synthetic_gradient(&GradientConfig::default()).unwrap();
        assert_eq!(kb.len(), 12);
        assert_eq!(samples.len(), 40);
        assert_eq!(samples[0].distance, 0.0);
        assert_eq!(samples[39].distance, 1.0);
        assert!(samples[0].variation.lemmas().all(|l| l.starts_with('w')));
        assert_eq!(samples[39].variation.lemmas().filter(|l| l.starts_with('c')).count(), 50);
    }

    #[test]
    fn seeded() {
        let cfg = GradientConfig::default();
        assert_eq!(synthetic_gradient(&cfg).unwrap(), synthetic_gradient(&cfg).unwrap());
    }
}
