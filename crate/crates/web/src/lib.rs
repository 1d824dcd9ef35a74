//! Browser bindings: score a text against a small knowledge base, show which
//! words drive the divergence between two texts, and trace the synthetic
//! distance gradient. Every function takes and returns JSON strings.

use cultnov::corpus::annotate_text;
use cultnov::metrics::{score_all, KnowledgeSpace, NoveltyConfig};
use cultnov::stats::pearson;
use cultnov::synth::{synthetic_gradient, GradientConfig};
use cultnov::{control_variables, jsd_decomposed, ControlVars, Document, MixtureWeights, NoveltyScores, Side};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn doc(id: &str, text: &str) -> Result<Document, JsError> {
    let annotated = annotate_text(text).map_err(|e| js_err(format!("{id}: {e}")))?;
    Ok(Document::new(id, annotated.tokens))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsError> {
    serde_json::to_string(v).map_err(js_err)
}

#[derive(Serialize)]
struct TextScores {
    scores: NoveltyScores,
    controls: ControlVars,
    epsilon_newness: f64,
    kb_docs: usize,
}

/// Scores `variation` against the knowledge base `kb_json`, a JSON array of
/// texts. `lambda1` weights appearance (disappearance gets the remainder).
#[wasm_bindgen]
pub fn score_texts(kb_json: &str, variation: &str, lambda1: f64, window: usize) -> Result<String, JsError> {
    let texts: Vec<String> = serde_json::from_str(kb_json).map_err(js_err)?;
    let docs = texts.iter().enumerate().map(|(i, t)| doc(&format!("kb{}", i + 1), t)).collect::<Result<Vec<_>, _>>()?;
    let config = NoveltyConfig { lambda1, lambda2: 1.0 - lambda1, window, ..NoveltyConfig::default() };
    let kb = KnowledgeSpace::build("demo", "KB", docs, config).map_err(js_err)?;
    let v = doc("variation", variation)?;
    let scores = score_all(&kb, &v).map_err(js_err)?;
    to_json(&TextScores {
        scores,
        controls: control_variables(&v, &kb),
        epsilon_newness: kb.epsilon_newness(),
        kb_docs: texts.len(),
    })
}

#[derive(Serialize)]
struct Term {
    lemma: String,
    bits: f64,
    side: &'static str,
}

#[derive(Serialize)]
struct Decomposition {
    jsd: f64,
    terms: Vec<Term>,
}

/// Equal-weight divergence between two texts and its `top` largest word
/// contributions, each attributed to the text where the word is more frequent.
#[wasm_bindgen]
pub fn decompose(text_a: &str, text_b: &str, top: usize) -> Result<String, JsError> {
    let p = cultnov::corpus::doc_distribution(&doc("a", text_a)?).map_err(js_err)?;
    let q = cultnov::corpus::doc_distribution(&doc("b", text_b)?).map_err(js_err)?;
    let (jsd, mut parts) = jsd_decomposed(&p, &q, MixtureWeights::equal());
    parts.sort_by(|a, b| b.value.total_cmp(&a.value).then_with(|| a.lemma.cmp(&b.lemma)));
    let terms = parts
        .into_iter()
        .take(top)
        .map(|c| Term {
            side: match c.attributed_to {
                Side::P => "a",
                Side::Q => "b",
                Side::Neutral => "both",
            },
            lemma: c.lemma,
            bits: c.value,
        })
        .collect();
    to_json(&Decomposition { jsd, terms })
}

type Getter = fn(&NoveltyScores) -> f64;

#[derive(Serialize)]
struct GradientPoint {
    distance: f64,
    scores: NoveltyScores,
}

#[derive(Serialize)]
struct Gradient {
    points: Vec<GradientPoint>,
    /// Pearson r of each metric with the planted distance.
    correlations: Vec<(String, f64)>,
}

/// Scores of synthetic cultures placed at planted distances from one
/// knowledge base.
#[wasm_bindgen]
pub fn gradient_curve(cultures: usize, seed: u64) -> Result<String, JsError> {
    let cfg = GradientConfig { cultures, seed, ..GradientConfig::default() };
    let (kb, samples) = synthetic_gradient(&cfg).map_err(js_err)?;
    let space = KnowledgeSpace::build("synthetic", "KB", kb, NoveltyConfig::default()).map_err(js_err)?;
    let points = samples
        .iter()
        .map(|s| Ok(GradientPoint { distance: s.distance, scores: score_all(&space, &s.variation).map_err(js_err)? }))
        .collect::<Result<Vec<_>, JsError>>()?;
    let d: Vec<f64> = points.iter().map(|p| p.distance).collect();
    let metrics: [(&str, Getter); 5] = [
        ("newness", |s| s.newness),
        ("uniqueness", |s| s.uniqueness),
        ("difference", |s| s.difference),
        ("new_surprise", |s| s.new_surprise),
        ("divergent_surprise", |s| s.divergent_surprise),
    ];
    let correlations = metrics
        .iter()
        .map(|(name, f)| {
            let col: Vec<f64> = points.iter().map(|p| f(&p.scores)).collect();
            (name.to_string(), pearson(&col, &d).map(|c| c.coefficient).unwrap_or(f64::NAN))
        })
        .collect();
    to_json(&Gradient { points, correlations })
}
