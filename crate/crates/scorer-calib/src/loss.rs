//! Training objectives: cross-entropy, ordinal log loss, and expected-score
//! MSE, each returning its value and the gradient with respect to the final
//! logits.
//!
//! Cross-entropy treats score categories as unordered. The ordinal log loss
//! weights each wrong category's misclassification likelihood `-log(1-p_c)`
//! by its score distance from the true score, so predicting 4 when the truth
//! is 1 costs three times as much probability-for-probability as predicting
//! 2. The MSE loss squares the difference between the true score and the
//! expected score under the predicted distribution.
//!
//! Gradients are with respect to the logits that produced `p` via softmax;
//! any temperature chain is handled downstream by [`crate::head`].

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ScoreScale};
use crate::error::{Error, Result};
use crate::head::{ParamGrads, ProbVector, ScoringHead};

/// Probability clamp applied inside logarithms.
const CLAMP: f64 = 1e-12;

/// Which training objective to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Ce,
    Oll,
    Mse,
}

impl LossKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LossKind::Ce => "ce",
            LossKind::Oll => "oll",
            LossKind::Mse => "mse",
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ce" => Ok(LossKind::Ce),
            "oll" => Ok(LossKind::Oll),
            "mse" => Ok(LossKind::Mse),
            other => Err(Error::InvalidConfig(format!("unknown loss {other:?}"))),
        }
    }
}

/// Loss value and its gradient with respect to the logits.
#[derive(Debug, Clone, PartialEq)]
pub struct LossResult {
    pub value: f64,
    pub grad_logits: Vec<f64>,
}

/// Negative log-likelihood of the true category.
///
/// The gradient uses the softmax cross-entropy identity
/// `∂L/∂z = p - onehot(y)`.
pub fn ce_loss(p: &ProbVector, y_cat: usize) -> LossResult {
    let probs = p.as_slice();
    debug_assert!(y_cat < probs.len());
    let value = -probs[y_cat].max(CLAMP).ln();
    let grad_logits = probs
        .iter()
        .enumerate()
        .map(|(c, &pc)| if c == y_cat { pc - 1.0 } else { pc })
        .collect();
    LossResult { value, grad_logits }
}

/// Ordinal log loss: `-Σ_c |y - s_c| · log(1 - p_c)` where `s_c` is the
/// score value of category `c`. The true category has weight zero.
pub fn oll_loss(p: &ProbVector, y_score: i32, scale: ScoreScale) -> LossResult {
    let probs = p.as_slice();
    debug_assert!(scale.contains(y_score));
    let weights: Vec<f64> = (0..probs.len())
        .map(|c| (y_score - scale.score_of(c)).abs() as f64)
        .collect();
    let mut value = 0.0;
    // dL/dp_c before the softmax Jacobian
    let mut q = vec![0.0; probs.len()];
    for c in 0..probs.len() {
        let one_minus = (1.0 - probs[c]).max(CLAMP);
        value -= weights[c] * one_minus.ln();
        q[c] = weights[c] / one_minus;
    }
    LossResult {
        value,
        grad_logits: chain_through_softmax(probs, &q),
    }
}

/// Squared difference between the true score and the expected score
/// `ŷ = Σ_c p_c s_c`.
pub fn mse_loss(p: &ProbVector, y_score: i32, scale: ScoreScale) -> LossResult {
    let probs = p.as_slice();
    debug_assert!(scale.contains(y_score));
    let expected = p.expected_score(scale);
    let diff = y_score as f64 - expected;
    let value = diff * diff;
    // ∂L/∂z_k = -2(y - ŷ) · p_k (s_k - ŷ)
    let grad_logits = probs
        .iter()
        .enumerate()
        .map(|(k, &pk)| -2.0 * diff * pk * (scale.score_of(k) as f64 - expected))
        .collect();
    LossResult { value, grad_logits }
}

/// Chains `q = ∂L/∂p` through the softmax Jacobian:
/// `∂L/∂z_k = p_k (q_k - Σ_c q_c p_c)`.
fn chain_through_softmax(p: &[f64], q: &[f64]) -> Vec<f64> {
    let inner: f64 = q.iter().zip(p).map(|(qc, pc)| qc * pc).sum();
    p.iter().zip(q).map(|(&pk, &qk)| pk * (qk - inner)).collect()
}

/// Evaluates one point's loss for the given objective.
pub fn point_loss(kind: LossKind, p: &ProbVector, y_score: i32, scale: ScoreScale) -> LossResult {
    match kind {
        LossKind::Ce => ce_loss(p, scale.category_of(y_score)),
        LossKind::Oll => oll_loss(p, y_score, scale),
        LossKind::Mse => mse_loss(p, y_score, scale),
    }
}

/// Mean loss over a batch with parameter gradients accumulated in point
/// order, then divided by the batch size.
///
/// `idxs` selects points from `ds`, which also resolves each point's dense
/// scorer index.
pub fn batch_loss(
    kind: LossKind,
    head: &ScoringHead,
    ds: &Dataset,
    idxs: &[usize],
) -> Result<(f64, ParamGrads)> {
    if idxs.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let scale = ds.scale();
    let mut grads = ParamGrads::zeros_like(head);
    let mut total = 0.0;
    for &idx in idxs {
        let point = &ds.points()[idx];
        let j = ds.scorer_of(idx);
        let p = head.forward(&point.representation, j)?;
        let result = point_loss(kind, &p, point.score, scale);
        total += result.value;
        head.backward_into(&point.representation, j, &result.grad_logits, &mut grads)?;
    }
    let n = idxs.len() as f64;
    grads.scale(1.0 / n);
    Ok((total / n, grads))
}
