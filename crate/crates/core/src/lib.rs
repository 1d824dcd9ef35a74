//! Cultural novelty metrics for recipe corpora.
//!
//! The crate covers the whole analysis chain: annotating documents into
//! lemma distributions ([`corpus`]), divergence between distributions
//! ([`divergence`]), the five novelty metrics against a knowledge space
//! ([`metrics`]), country-level cultural distances ([`distances`]), building
//! culture-keyed splits from a raw corpus ([`builder`]), and the statistics
//! used to relate scores to distances ([`stats`]).

pub mod builder;
pub mod corpus;
pub mod distances;
pub mod divergence;
pub mod error;
pub mod metrics;
pub mod stats;
pub mod synth;

pub use corpus::{
    annotate, annotate_tagged, annotate_text, control_variables, AnnotatedToken, AnnotationProvider,
    AnnotationSource, ControlVars, Document, Pos, RecipeRecord, TokenDistribution,
};
pub use divergence::{jsd, jsd_decomposed, MixtureWeights, Side, WordContribution};
pub use error::{Error, Result};
pub use metrics::{score_all, KnowledgeSpace, NoveltyConfig, NoveltyScores};
