//! Dataset construction: country detection in titles, dish matching,
//! knowledge/variation splits with a seeded hold-out, and ingredient-based
//! country clustering.

mod cluster;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::naive::{lemmatize_as, tokenize};
use crate::corpus::{Document, Pos};
use crate::distances::Registry;
use crate::error::{Error, Result};

pub use cluster::{
    country_clusters, greedy_modularity, ingredient_graph, jaccard, modularity, typical_ingredients, Clustering,
    CountryCluster, CountryGraph, DEFAULT_TOP_FRACTION,
};

pub const DEFAULT_HOLDOUT: f64 = 0.3;
/// Minimum number of knowledge documents and of variations per split.
pub const MIN_KNOWLEDGE: usize = 2;
pub const MIN_VARIATIONS: usize = 2;

/// Forces the country of titles matching `title_pattern` (whole words).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryOverride {
    pub title_pattern: String,
    pub forced_country: String,
}

/// A curated dish with its naming variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DishSpec {
    pub canonical_name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    #[serde(default)]
    pub excluded_patterns: Vec<String>,
    #[serde(default)]
    pub overrides: Vec<CountryOverride>,
}

impl DishSpec {
    pub fn new(name: &str, aliases: &[&str]) -> Self {
        let mut spec = Self {
            canonical_name: name.to_string(),
            aliases: aliases.iter().map(|s| s.to_string()).collect(),
            excluded_patterns: vec![],
            overrides: vec![],
        };
        spec.normalize();
        spec
    }

    pub fn with_exclusions(mut self, patterns: &[&str]) -> Self {
        self.excluded_patterns = patterns.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Ensures the canonical name is among the aliases.
    pub fn normalize(&mut self) {
        if !self.aliases.iter().any(|a| a.eq_ignore_ascii_case(&self.canonical_name)) {
            self.aliases.insert(0, self.canonical_name.clone());
        }
    }

    /// Country forced by an override entry, if any matches.
    pub fn forced_country(&self, title: &str) -> Option<String> {
        let words = noun_words(title);
        self.overrides
            .iter()
            .find(|o| contains_phrase(&words, &noun_words(&o.title_pattern)))
            .map(|o| o.forced_country.to_ascii_uppercase())
    }

    /// Short identifier usable in file names.
    pub fn slug(&self) -> String {
        slugify(&self.canonical_name)
    }
}

pub fn slugify(s: &str) -> String {
    let words = tokenize(s);
    words.join("-")
}

/// Parse a dish-spec JSON array.
pub fn parse_dish_specs(json: &str) -> Result<Vec<DishSpec>> {
    let mut specs: Vec<DishSpec> =
        serde_json::from_str(json).map_err(|e| Error::Parse { context: "dish specs".into(), message: e.to_string() })?;
    for s in &mut specs {
        if s.canonical_name.trim().is_empty() {
            return Err(Error::Parse { context: "dish specs".into(), message: "empty canonical_name".into() });
        }
        s.normalize();
    }
    Ok(specs)
}

fn contains_phrase(words: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty() && words.windows(phrase.len()).any(|w| w == phrase)
}

fn noun_words(s: &str) -> Vec<String> {
    tokenize(s).iter().map(|w| lemmatize_as(w, Pos::Noun)).collect()
}

/// Longest whole-word, case-insensitive match of a country name or demonym
/// in the title; ties go to the lexicographically smallest ISO code.
pub fn detect_country(title: &str, registry: &Registry) -> Option<String> {
    let words = tokenize(title);
    let mut best: Option<(usize, &str)> = None;
    for rec in registry.iter() {
        for surface in std::iter::once(&rec.name).chain(&rec.demonyms) {
            let phrase = tokenize(surface);
            if !contains_phrase(&words, &phrase) {
                continue;
            }
            let len = phrase.iter().map(|w| w.chars().count()).sum::<usize>() + phrase.len() - 1;
            let better = match best {
                None => true,
                Some((l, iso)) => len > l || (len == l && rec.iso.as_str() < iso),
            };
            if better {
                best = Some((len, rec.iso.as_str()));
            }
        }
    }
    best.map(|(_, iso)| iso.to_string())
}

/// Whole-word alias match (plural-insensitive) with no excluded pattern.
pub fn match_dish(title: &str, dish: &DishSpec) -> bool {
    let words = noun_words(title);
    let hit = dish.aliases.iter().any(|a| contains_phrase(&words, &noun_words(a)));
    hit && !dish.excluded_patterns.iter().any(|p| contains_phrase(&words, &noun_words(p)))
}

/// Document ids of one (dish, origin) split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSplit {
    pub dish: String,
    pub origin: String,
    pub holdout_fraction: f64,
    pub holdout_seed: u64,
    pub knowledge: Vec<String>,
    pub variations: Vec<String>,
    /// Origin-country documents moved to the variations.
    pub held_out: Vec<String>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ *b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Per-(dish, origin) stream derived from the master seed, so the split of
/// one dish never depends on which other dishes were processed.
pub fn split_seed(seed: u64, dish: &str, origin: &str) -> u64 {
    seed ^ fnv1a(format!("{dish}\u{0}{origin}").as_bytes())
}

/// Country of a matched document after the dish's overrides.
pub fn resolved_country(doc: &Document, dish: &DishSpec) -> Option<String> {
    dish.forced_country(&doc.title).or_else(|| doc.country.clone())
}

/// Split the matches of `dish`: shuffle the origin-country documents with the
/// seeded generator, move `floor(fraction·n)` of them to the variations, keep
/// the rest as knowledge; every other-country match is a variation.
pub fn build_split(
    corpus: &[Document],
    dish: &DishSpec,
    origin: &str,
    holdout_fraction: f64,
    seed: u64,
) -> Result<CorpusSplit> {
    if !(0.0..1.0).contains(&holdout_fraction) {
        return Err(Error::InvalidParameter(format!("hold-out fraction {holdout_fraction} outside [0,1)")));
    }
    let mut origin_ids = Vec::new();
    let mut foreign_ids = Vec::new();
    for doc in corpus.iter().filter(|d| match_dish(&d.title, dish)) {
        match resolved_country(doc, dish) {
            Some(c) if c == origin => origin_ids.push(doc.id.clone()),
            Some(_) => foreign_ids.push(doc.id.clone()),
            None => {}
        }
    }
    origin_ids.sort();
    let holdout_seed = split_seed(seed, &dish.canonical_name, origin);
    let mut rng = ChaCha8Rng::seed_from_u64(holdout_seed);
    origin_ids.shuffle(&mut rng);
    let n_hold = (holdout_fraction * origin_ids.len() as f64 + 1e-9).floor() as usize;
    let mut held_out = origin_ids[..n_hold].to_vec();
    let mut knowledge = origin_ids[n_hold..].to_vec();
    held_out.sort();
    knowledge.sort();
    let mut variations: Vec<String> = held_out.iter().cloned().chain(foreign_ids).collect();
    variations.sort();
    if knowledge.len() < MIN_KNOWLEDGE || variations.len() < MIN_VARIATIONS {
        return Err(Error::IneligibleDish {
            dish: dish.canonical_name.clone(),
            origin: origin.to_string(),
            kb_size: knowledge.len(),
            variation_count: variations.len(),
        });
    }
    Ok(CorpusSplit {
        dish: dish.canonical_name.clone(),
        origin: origin.to_string(),
        holdout_fraction,
        holdout_seed,
        knowledge,
        variations,
        held_out,
    })
}

/// One line of the eligibility report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EligibilityRow {
    pub dish: String,
    pub origin: String,
    pub kb_size: usize,
    pub variation_count: usize,
    pub status: String,
}

/// Every (dish, origin) candidate: each country with at least one match.
pub fn build_all(
    corpus: &[Document],
    dishes: &[DishSpec],
    holdout_fraction: f64,
    seed: u64,
) -> Result<(Vec<CorpusSplit>, Vec<EligibilityRow>)> {
    let mut splits = Vec::new();
    let mut report = Vec::new();
    for dish in dishes {
        let origins: BTreeSet<String> = corpus
            .iter()
            .filter(|d| match_dish(&d.title, dish))
            .filter_map(|d| resolved_country(d, dish))
            .collect();
        for origin in origins {
            match build_split(corpus, dish, &origin, holdout_fraction, seed) {
                Ok(split) => {
                    report.push(EligibilityRow {
                        dish: dish.canonical_name.clone(),
                        origin: origin.clone(),
                        kb_size: split.knowledge.len(),
                        variation_count: split.variations.len(),
                        status: "eligible".into(),
                    });
                    splits.push(split);
                }
                Err(Error::IneligibleDish { dish, origin, kb_size, variation_count }) => {
                    report.push(EligibilityRow { dish, origin, kb_size, variation_count, status: "ineligible".into() });
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok((splits, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::CountryRecord;

    fn registry() -> Registry {
        Registry::new(vec![
            CountryRecord::new("MA", "Morocco").with_demonyms(&["Moroccan"]),
            CountryRecord::new("JM", "Jamaica").with_demonyms(&["Jamaican"]),
            CountryRecord::new("CN", "China").with_demonyms(&["Chinese"]),
            CountryRecord::new("GN", "Guinea").with_demonyms(&["Guinean"]),
            CountryRecord::new("PG", "Papua New Guinea").with_demonyms(&["Papua New Guinean"]),
            CountryRecord::new("FR", "France").with_demonyms(&["French"]),
        ])
        .unwrap()
    }

    #[test]
    fn country_detection() {
        let r = registry();
        assert_eq!(detect_country("Moroccan Couscous", &r).as_deref(), Some("MA"));
        assert_eq!(detect_country("Best Chocolate Cake", &r), None);
        assert_eq!(detect_country("Jamaican Jerk Couscous", &r).as_deref(), Some("JM"));
        assert_eq!(detect_country("Chinatown Noodles", &r), None);
        assert_eq!(detect_country("MOROCCAN lamb", &r).as_deref(), Some("MA"));
        assert_eq!(detect_country("Papua New Guinea Stew", &r).as_deref(), Some("PG"));
    }

    #[test]
    fn dish_matching() {
        let crepe = DishSpec::new("pancake", &["pancake", "crêpe"]).with_exclusions(&["syrup"]);
        assert!(match_dish("French Pancakes (Crêpes)", &crepe));
        assert!(!match_dish("Pancake Syrup", &crepe));
        assert!(!match_dish("Pancakeria Special", &crepe));
        let pierogi = DishSpec::new("pierogi", &["pierogi", "piroshki"]);
        assert!(match_dish("Piroshki", &pierogi));
        assert!(!match_dish("Potato Salad", &pierogi));
    }

    #[test]
    fn canonical_name_is_an_alias() {
        let d = DishSpec::new("lasagna", &[]);
        assert_eq!(d.aliases, ["lasagna"]);
        assert!(match_dish("Mexican Lasagna", &d));
    }

    fn corpus(origin_n: usize, foreign_n: usize) -> Vec<Document> {
        let mut docs = Vec::new();
        for i in 0..origin_n {
            let mut d = Document::from_lemmas(format!("ma{i:02}"), &["x"]).unwrap().with_country("MA");
            d.title = format!("Moroccan Couscous {i}");
            docs.push(d);
        }
        for i in 0..foreign_n {
            let mut d = Document::from_lemmas(format!("fr{i:02}"), &["x"]).unwrap().with_country("FR");
            d.title = "French Couscous".into();
            docs.push(d);
        }
        docs
    }

    #[test]
    fn holdout_floor() {
        let dish = DishSpec::new("couscous", &[]);
        let s = build_split(&corpus(10, 0), &dish, "MA", 0.3, 7).unwrap();
        assert_eq!(s.held_out.len(), 3);
        assert_eq!(s.knowledge.len(), 7);
        assert_eq!(s.variations.len(), 3);
        let again = build_split(&corpus(10, 0), &dish, "MA", 0.3, 7).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn eligibility_floors() {
        let dish = DishSpec::new("couscous", &[]);
        let err = build_split(&corpus(2, 0), &dish, "MA", 0.3, 1).unwrap_err();
        assert!(matches!(err, Error::IneligibleDish { kb_size: 2, variation_count: 0, .. }));
        let (splits, report) = build_all(&corpus(4, 1), &[dish], 0.3, 1).unwrap();
        assert_eq!(splits.len(), 1);
        assert_eq!(report.len(), 2);
        assert_eq!(report[0].origin, "FR");
        assert_eq!(report[0].status, "ineligible");
        assert_eq!(report[1].status, "eligible");
    }

    #[test]
    fn overrides_force_country() {
        let mut dish = DishSpec::new("curry", &[]);
        dish.overrides.push(CountryOverride { title_pattern: "indian curry".into(), forced_country: "gb".into() });
        let mut d = Document::from_lemmas("1", &["x"]).unwrap().with_country("IN");
        d.title = "Indian Curry Night".into();
        assert_eq!(resolved_country(&d, &dish).as_deref(), Some("GB"));
        d.title = "Goan Curry".into();
        assert_eq!(resolved_country(&d, &dish).as_deref(), Some("IN"));
    }

    #[test]
    fn slugs() {
        assert_eq!(DishSpec::new("Beef Curry", &[]).slug(), "beef-curry");
    }
}
