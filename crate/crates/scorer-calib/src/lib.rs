//! Scorer-aware calibration for ordinal automated scoring.
//!
//! Automated scoring models predict an integer score for a free-form response
//! from a fixed-dimensional representation vector. Human score labels are
//! noisy: each scorer has individual preferences (bias toward or against
//! certain score categories) and tendencies (how consistently they score).
//! This crate models both on top of any representation:
//!
//! * three scoring-head families ([`head`]): a universal linear head, a
//!   scorer-specific head with per-scorer bias vectors and temperatures
//!   derived from learned scorer embeddings, and a content-driven head whose
//!   bias and temperature are bilinear functions of the response
//!   representation and the scorer embedding;
//! * three training objectives ([`loss`]): cross-entropy, ordinal log loss,
//!   and expected-score MSE, each with analytic gradients;
//! * a deterministic trainer ([`optim`]): Adam, scorer-covering fold plans,
//!   validation-based checkpoint selection, cross-validation summaries;
//! * ordinal evaluation metrics ([`metrics`]): one-vs-rest averaged AUC,
//!   expected-score RMSE, and weighted Cohen's kappa;
//! * a scorer-analysis pipeline ([`analysis`]): Gaussian-mixture clustering of
//!   scorer embeddings, 2-D projection, cluster profile tables, correlation
//!   matrices with p-values, and same-scorer case studies;
//! * a synthetic benchmark generator ([`synth`]) with planted scorer
//!   archetypes for end-to-end recovery testing.
//!
//! The `scorer-calib` CLI in this workspace exposes the full pipeline; the
//! guide under `book/` walks through each concept with runnable snippets.
//!
//! All randomness is routed through explicitly seeded generators, and every
//! result (trained parameters, reports, generated datasets) is byte-stable
//! across runs with the same seed.

pub mod analysis;
pub mod data;
pub mod error;
pub mod head;
pub mod loss;
pub mod math;
pub mod metrics;
pub mod optim;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};

// The guide chapters under book/src double as doc-tests so their snippets
// cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/data-model.md")]
    mod data_model {}
    #[doc = include_str!("../../../book/src/scoring-heads.md")]
    mod scoring_heads {}
    #[doc = include_str!("../../../book/src/losses.md")]
    mod losses {}
    #[doc = include_str!("../../../book/src/training.md")]
    mod training {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/synthetic-benchmark.md")]
    mod synthetic_benchmark {}
}
