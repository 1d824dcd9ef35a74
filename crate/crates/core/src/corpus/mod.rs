//! Documents, linguistic preprocessing and word distributions.

pub mod naive;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::KnowledgeSpace;

/// Coarse part-of-speech tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Num,
    Other,
}

impl Pos {
    /// Content tags kept by the filter.
    pub fn is_content(self) -> bool {
        !matches!(self, Pos::Other)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Num => "NUM",
            Pos::Other => "OTHER",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pos {
    type Err = Error;

    /// Accepts the six coarse tags plus the Universal Dependencies tag set,
    /// folding everything that is not a content tag into `OTHER`.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "NOUN" | "PROPN" => Pos::Noun,
            "VERB" => Pos::Verb,
            "ADJ" => Pos::Adj,
            "ADV" => Pos::Adv,
            "NUM" => Pos::Num,
            "OTHER" | "DET" | "ADP" | "AUX" | "CCONJ" | "CONJ" | "SCONJ" | "PART" | "PRON"
            | "PUNCT" | "SYM" | "INTJ" | "X" | "SPACE" => Pos::Other,
            other => return Err(Error::InvalidToken(format!("unknown tag {other}"))),
        })
    }
}

/// A lemma with its coarse tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnnotatedToken {
    lemma: String,
    pos: Pos,
}

impl AnnotatedToken {
    pub fn new(lemma: impl Into<String>, pos: Pos) -> Result<Self> {
        let lemma = lemma.into().to_lowercase();
        if lemma.is_empty() || lemma.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(lemma));
        }
        Ok(Self { lemma, pos })
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn pos(&self) -> Pos {
        self.pos
    }
}

impl fmt::Display for AnnotatedToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.lemma, self.pos)
    }
}

/// Which annotation source a corpus is read with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationProvider {
    /// Tokens and tags are supplied in the input file.
    Preannotated,
    /// Built-in rule pipeline over the raw text.
    #[default]
    Naive,
}

impl FromStr for AnnotationProvider {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "preannotated" | "pre" => Ok(Self::Preannotated),
            "naive" => Ok(Self::Naive),
            other => Err(Error::InvalidParameter(format!("unknown annotation provider {other:?}"))),
        }
    }
}

/// A token as supplied by an external tagger. When `lemma` is absent the
/// surface form is lemmatized with the built-in rules for its tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedToken {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<String>,
    pub pos: String,
}

impl TaggedToken {
    pub fn surface(text: &str, pos: &str) -> Self {
        Self { text: Some(text.to_string()), lemma: None, pos: pos.to_string() }
    }
}

/// Input to [`annotate`].
#[derive(Debug, Clone, Copy)]
pub enum AnnotationSource<'a> {
    Text(&'a str),
    Tagged(&'a [TaggedToken]),
}

/// Content tokens plus the pre-filter token count.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotated {
    pub tokens: Vec<AnnotatedToken>,
    pub raw_token_count: usize,
}

/// Annotate and filter to content tokens (nouns, verbs, adjectives, adverbs, numbers).
pub fn annotate(source: AnnotationSource<'_>) -> Result<Annotated> {
    match source {
        AnnotationSource::Text(text) => annotate_text(text),
        AnnotationSource::Tagged(tokens) => annotate_tagged(tokens),
    }
}

/// Naive pipeline over raw text.
pub fn annotate_text(text: &str) -> Result<Annotated> {
    if text.trim().is_empty() {
        return Err(Error::EmptyText);
    }
    let raw = naive::tokenize(text);
    let mut tokens = Vec::new();
    for word in &raw {
        if naive::is_stopword(word) {
            continue;
        }
        let lemma = naive::lemmatize(word);
        if naive::is_stopword(&lemma) {
            continue;
        }
        let pos = naive::guess_pos(&lemma);
        if pos.is_content() {
            tokens.push(AnnotatedToken::new(lemma, pos)?);
        }
    }
    if tokens.is_empty() {
        return Err(Error::EmptyAfterFilter);
    }
    Ok(Annotated { tokens, raw_token_count: raw.len() })
}

/// Pre-tagged tokens: apply the POS filter, lowercase, lemmatize missing lemmas.
pub fn annotate_tagged(input: &[TaggedToken]) -> Result<Annotated> {
    if input.is_empty() {
        return Err(Error::EmptyText);
    }
    let mut tokens = Vec::new();
    for tok in input {
        let pos: Pos = tok.pos.parse()?;
        if !pos.is_content() {
            continue;
        }
        let lemma = match (&tok.lemma, &tok.text) {
            (Some(l), _) => l.trim().to_lowercase(),
            (None, Some(t)) => naive::lemmatize_as(&t.trim().to_lowercase(), pos),
            (None, None) => return Err(Error::InvalidToken("token without text or lemma".into())),
        };
        if lemma.is_empty() {
            continue;
        }
        tokens.push(AnnotatedToken::new(lemma, pos)?);
    }
    if tokens.is_empty() {
        return Err(Error::EmptyAfterFilter);
    }
    Ok(Annotated { tokens, raw_token_count: input.len() })
}

/// Lowercase, trim and collapse internal whitespace.
pub fn normalize_ingredient(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// One line of the corpus JSONL.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecipeRecord {
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<String>,
    #[serde(default)]
    pub ingredients: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<TaggedToken>>,
}

/// A preprocessed document.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub title: String,
    pub body_tokens: Vec<AnnotatedToken>,
    /// ISO-3166 alpha-2 code; `None` stands for UNKNOWN.
    pub country: Option<String>,
    pub product: Option<String>,
    pub ingredients: BTreeSet<String>,
    pub raw_token_count: usize,
}

impl Document {
    /// Build a document from already-annotated tokens.
    pub fn new(id: impl Into<String>, tokens: Vec<AnnotatedToken>) -> Self {
        let raw_token_count = tokens.len();
        Self {
            id: id.into(),
            title: String::new(),
            body_tokens: tokens.into_iter().filter(|t| t.pos().is_content()).collect(),
            country: None,
            product: None,
            ingredients: BTreeSet::new(),
            raw_token_count,
        }
    }

    /// Convenience constructor from bare lemmas, all tagged as nouns.
    pub fn from_lemmas<S: AsRef<str>>(id: impl Into<String>, lemmas: &[S]) -> Result<Self> {
        let tokens = lemmas
            .iter()
            .map(|l| AnnotatedToken::new(l.as_ref(), Pos::Noun))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(id, tokens))
    }

    pub fn with_country(mut self, iso: impl Into<String>) -> Self {
        self.country = Some(iso.into());
        self
    }

    pub fn with_ingredients<S: AsRef<str>>(mut self, items: &[S]) -> Self {
        self.ingredients = items.iter().map(|s| normalize_ingredient(s.as_ref())).collect();
        self
    }

    /// Ingest a corpus record with the selected provider.
    pub fn from_record(rec: &RecipeRecord, provider: AnnotationProvider) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidRecord { id: rec.id.clone(), reason: reason.to_string() };
        let annotated = match provider {
            AnnotationProvider::Preannotated => {
                let tokens = rec.tokens.as_deref().ok_or_else(|| invalid("missing \"tokens\""))?;
                annotate_tagged(tokens)?
            }
            AnnotationProvider::Naive => {
                let text = rec.text.as_deref().ok_or_else(|| invalid("missing \"text\""))?;
                annotate_text(text)?
            }
        };
        let country = rec
            .country
            .as_deref()
            .map(str::trim)
            .filter(|c| !c.is_empty() && !c.eq_ignore_ascii_case("UNKNOWN"))
            .map(str::to_ascii_uppercase);
        let product = rec
            .product
            .as_deref()
            .map(str::trim)
            .filter(|p| !p.is_empty() && !p.eq_ignore_ascii_case("NONE"))
            .map(str::to_string);
        Ok(Self {
            id: rec.id.clone(),
            title: rec.title.clone(),
            body_tokens: annotated.tokens,
            country,
            product,
            ingredients: rec.ingredients.iter().map(|s| normalize_ingredient(s)).filter(|s| !s.is_empty()).collect(),
            raw_token_count: annotated.raw_token_count,
        })
    }

    pub fn len(&self) -> usize {
        self.body_tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body_tokens.is_empty()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.body_tokens.iter().map(AnnotatedToken::lemma)
    }

    pub fn lemma_vec(&self) -> Vec<&str> {
        self.lemmas().collect()
    }
}

/// Sparse lemma → probability map estimated from token counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TokenDistribution {
    probs: BTreeMap<String, f64>,
    token_total: usize,
}

impl TokenDistribution {
    /// From positive integer counts.
    pub fn from_counts(counts: BTreeMap<String, usize>) -> Result<Self> {
        let token_total: usize = counts.values().sum();
        if token_total == 0 {
            return Err(Error::EmptyDocument);
        }
        let total = token_total as f64;
        let probs = counts
            .into_iter()
            .filter(|(_, c)| *c > 0)
            .map(|(w, c)| (w, c as f64 / total))
            .collect();
        Ok(Self { probs, token_total })
    }

    /// From explicit probabilities; zero entries are dropped and the rest
    /// must sum to 1 within 1e-9. `token_total` sets the mixture size.
    pub fn from_probs<I, S>(probs: I, token_total: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        if token_total == 0 {
            return Err(Error::InvalidParameter("token_total must be at least 1".into()));
        }
        let mut map = BTreeMap::new();
        for (w, p) in probs {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!("invalid probability {p}")));
            }
            if p > 0.0 {
                *map.entry(w.into()).or_insert(0.0) += p;
            }
        }
        let sum: f64 = map.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {sum}")));
        }
        Ok(Self { probs: map, token_total })
    }

    pub fn from_lemmas<'a, I>(lemmas: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts = BTreeMap::new();
        for l in lemmas {
            *counts.entry(l.to_string()).or_insert(0usize) += 1;
        }
        Self::from_counts(counts)
    }

    pub fn get(&self, lemma: &str) -> f64 {
        self.probs.get(lemma).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    pub fn token_total(&self) -> usize {
        self.token_total
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probs.iter().map(|(w, p)| (w.as_str(), *p))
    }
}

/// Per-document relative frequencies.
pub fn doc_distribution(doc: &Document) -> Result<TokenDistribution> {
    if doc.is_empty() {
        return Err(Error::EmptyDocument);
    }
    TokenDistribution::from_lemmas(doc.lemmas())
}

/// Pooled counts over all documents divided by the pooled token total.
pub fn aggregate_distribution<'a, I>(docs: I) -> Result<TokenDistribution>
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut counts = BTreeMap::new();
    for doc in docs {
        for l in doc.lemmas() {
            *counts.entry(l.to_string()).or_insert(0usize) += 1;
        }
    }
    TokenDistribution::from_counts(counts).map_err(|_| Error::EmptyCorpus)
}

/// Control variables of one variation against a knowledge space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlVars {
    pub lexical_diversity: f64,
    pub new_ingredient_ratio: f64,
    pub length_ratio: f64,
}

/// Lexical diversity, share of new ingredients, and length relative to the
/// mean knowledge-space document.
pub fn control_variables(variation: &Document, kb: &KnowledgeSpace) -> ControlVars {
    let n = variation.len();
    let unique: BTreeSet<&str> = variation.lemmas().collect();
    let lexical_diversity = if n == 0 { 0.0 } else { unique.len() as f64 / n as f64 };
    let new_ingredient_ratio = if variation.ingredients.is_empty() {
        0.0
    } else {
        let new = variation.ingredients.difference(kb.ingredient_union()).count();
        new as f64 / variation.ingredients.len() as f64
    };
    ControlVars {
        lexical_diversity,
        new_ingredient_ratio,
        length_ratio: n as f64 / kb.mean_doc_length(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tagged(words: &[&str], tags: &[&str]) -> Vec<TaggedToken> {
        words.iter().zip(tags).map(|(w, t)| TaggedToken::surface(w, t)).collect()
    }

    fn render(a: &Annotated) -> Vec<String> {
        a.tokens.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn preannotated_filter_drops_determiners() {
        let toks = tagged(&["Stir", "the", "couscous", "gently"], &["VERB", "DET", "NOUN", "ADV"]);
        let out = annotate(AnnotationSource::Tagged(&toks)).unwrap();
        assert_eq!(render(&out), ["stir/VERB", "couscous/NOUN", "gently/ADV"]);
        assert_eq!(out.raw_token_count, 4);
    }

    #[test]
    fn preannotated_all_function_words() {
        let toks = tagged(&["the", "a", "of"], &["DET", "DET", "ADP"]);
        assert_eq!(annotate(AnnotationSource::Tagged(&toks)), Err(Error::EmptyAfterFilter));
    }

    #[test]
    fn preannotated_lemmatizes_surface_forms() {
        // golden output of the built-in lemmatizer on this fixture
        let toks = tagged(&["Add", "2", "sliced", "onions"], &["VERB", "NUM", "ADJ", "NOUN"]);
        let out = annotate(AnnotationSource::Tagged(&toks)).unwrap();
        assert_eq!(render(&out), ["add/VERB", "2/NUM", "sliced/ADJ", "onion/NOUN"]);
    }

    #[test]
    fn explicit_lemmas_win() {
        let toks = vec![TaggedToken { text: Some("Went".into()), lemma: Some("Go".into()), pos: "VERB".into() }];
        let out = annotate_tagged(&toks).unwrap();
        assert_eq!(render(&out), ["go/VERB"]);
    }

    #[test]
    fn naive_pipeline_golden() {
        let out = annotate_text("Stir the couscous gently, then add 2 sliced onions.").unwrap();
        assert_eq!(
            render(&out),
            ["stir/VERB", "couscous/NOUN", "gently/ADV", "add/VERB", "2/NUM", "slice/VERB", "onion/NOUN"]
        );
        assert_eq!(out.raw_token_count, 9);
        assert_eq!(annotate_text("   "), Err(Error::EmptyText));
        assert_eq!(annotate_text("the a of"), Err(Error::EmptyAfterFilter));
    }

    #[test]
    fn invalid_tokens_rejected() {
        assert!(AnnotatedToken::new("", Pos::Noun).is_err());
        assert!(AnnotatedToken::new("two words", Pos::Noun).is_err());
        assert!("FOO".parse::<Pos>().is_err());
        assert_eq!("propn".parse::<Pos>().unwrap(), Pos::Noun);
    }

    #[test]
    fn distributions() {
        let d = Document::from_lemmas("d", &["a", "b", "a", "c"]).unwrap();
        let p = doc_distribution(&d).unwrap();
        assert_eq!(p.get("a"), 0.5);
        assert_eq!(p.get("b"), 0.25);
        assert_eq!(p.get("c"), 0.25);
        assert_eq!(p.token_total(), 4);

        let single = Document::from_lemmas("x", &["x"]).unwrap();
        let p = doc_distribution(&single).unwrap();
        assert_eq!(p.get("x"), 1.0);
        assert_eq!(p.token_total(), 1);

        let empty = Document::new("e", vec![]);
        assert_eq!(doc_distribution(&empty), Err(Error::EmptyDocument));
    }

    #[test]
    fn aggregate_pools_counts() {
        let d1 = Document::from_lemmas("1", &["a", "a"]).unwrap();
        let d2 = Document::from_lemmas("2", &["b", "b"]).unwrap();
        let agg = aggregate_distribution([&d1, &d2]).unwrap();
        assert_eq!((agg.get("a"), agg.get("b")), (0.5, 0.5));

        // pooled 2/4 and 2/4, not the mean of {a:1} and {a:1/3, b:2/3}
        let d1 = Document::from_lemmas("1", &["a"]).unwrap();
        let d2 = Document::from_lemmas("2", &["a", "b", "b"]).unwrap();
        let agg = aggregate_distribution([&d1, &d2]).unwrap();
        assert_eq!((agg.get("a"), agg.get("b")), (0.5, 0.5));
        assert_eq!(agg.token_total(), 4);

        assert_eq!(aggregate_distribution([&d2]).unwrap(), doc_distribution(&d2).unwrap());
        assert_eq!(aggregate_distribution(std::iter::empty()), Err(Error::EmptyCorpus));
    }

    #[test]
    fn ingredient_normalization() {
        assert_eq!(normalize_ingredient("  Olive   OIL \t"), "olive oil");
    }

    #[test]
    fn from_probs_validates() {
        assert!(TokenDistribution::from_probs([("a", 0.5), ("b", 0.4)], 1).is_err());
        let d = TokenDistribution::from_probs([("a", 0.5), ("b", 0.5), ("c", 0.0)], 2).unwrap();
        assert_eq!(d.support_len(), 2);
    }
}
