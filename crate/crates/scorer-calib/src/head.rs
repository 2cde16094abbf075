//! The three scoring-head families.
//!
//! All heads map a representation `r` (and a scorer index `j`) to a
//! probability vector over score categories via a softmax over logits:
//!
//! * **universal** — `z_c = w_c·r + b_c`: one shared linear head, scorers
//!   are indistinguishable;
//! * **scorer-specific** — `z_c = α_j (w_c·r + (S e_j)_c)`: each scorer has
//!   a learned embedding `e_j`; a shared projection `S` turns it into a
//!   per-category bias vector, and a per-scorer temperature `α_j > 0`
//!   controls how concentrated the scorer's predictions are;
//! * **content-driven** — `z_c = α(r, e_j) (w_c·r + b_c(r, e_j))`: bias and
//!   temperature are bilinear in the representation and the scorer
//!   embedding, so a scorer's bias can depend on the specific response.
//!
//! Temperatures must be positive, so pre-activations go through a softplus;
//! `softplus⁻¹(1)` as the initial pre-activation makes every head start out
//! equivalent to the universal baseline.
//!
//! [`ScoringHead::backward`] returns exact analytic gradients for every
//! parameter touched by one `(r, j)` evaluation, given the gradient of the
//! loss with respect to the final logits.

use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::ScoreScale;
use crate::error::{Error, Result};
use crate::math::{argmax, dot, sigmoid, softmax, softplus, Mat};

/// Standard deviation for Gaussian parameter initialization.
const INIT_STD: f64 = 0.02;

/// Probability vector over score categories: strictly positive entries
/// summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    p: Vec<f64>,
}

impl ProbVector {
    /// Softmax of `logits`, computed with max-subtraction.
    pub fn from_logits(logits: &[f64]) -> ProbVector {
        ProbVector { p: softmax(logits) }
    }

    /// Wraps an explicit probability vector, validating that entries lie in
    /// `[0, 1]` and sum to one. Hand-built vectors may sit on the boundary;
    /// softmax-produced vectors are always interior.
    pub fn from_probs(p: Vec<f64>) -> Result<ProbVector> {
        if p.len() < 2 {
            return Err(Error::InvalidProbability(format!(
                "need at least 2 categories, got {}",
                p.len()
            )));
        }
        if p.iter().any(|&x| !x.is_finite() || !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidProbability("entry outside [0, 1]".into()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbability(format!("sum {sum} != 1")));
        }
        Ok(ProbVector { p })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn num_categories(&self) -> usize {
        self.p.len()
    }

    /// Most likely category (first index wins ties).
    pub fn argmax_category(&self) -> usize {
        argmax(&self.p)
    }

    /// Probability-weighted mean score `Σ p_c · s_c`.
    pub fn expected_score(&self, scale: ScoreScale) -> f64 {
        self.p
            .iter()
            .enumerate()
            .map(|(c, &p)| p * scale.score_of(c) as f64)
            .sum()
    }
}

/// Which head family a model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadKind {
    Universal,
    Scorer,
    Content,
}

impl HeadKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            HeadKind::Universal => "universal",
            HeadKind::Scorer => "scorer",
            HeadKind::Content => "content",
        }
    }
}

impl std::str::FromStr for HeadKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "universal" => Ok(HeadKind::Universal),
            "scorer" => Ok(HeadKind::Scorer),
            "content" => Ok(HeadKind::Content),
            other => Err(Error::InvalidConfig(format!("unknown head kind {other:?}"))),
        }
    }
}

/// Shared linear classification head: `z_c = w_c·r + b_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalHead {
    /// C×D weight matrix, one row per score category.
    pub w: Mat,
    /// Universal per-category bias.
    pub b: Vec<f64>,
}

impl UniversalHead {
    pub fn logits(&self, r: &[f64]) -> Result<Vec<f64>> {
        if r.len() != self.w.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.w.cols(),
                found: r.len(),
            });
        }
        let mut z = self.w.matvec(r);
        for (zc, &bc) in z.iter_mut().zip(&self.b) {
            *zc += bc;
        }
        Ok(z)
    }

    pub fn forward(&self, r: &[f64]) -> Result<ProbVector> {
        Ok(ProbVector::from_logits(&self.logits(r)?))
    }
}

/// Scorer-specific head: `z_c = α_j (w_c·r + (S e_j)_c)` with
/// `α_j = softplus(θ_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerSpecificHead {
    /// C×D weight matrix.
    pub w: Mat,
    /// J×Dₑ scorer embeddings, one row per scorer.
    pub e: Mat,
    /// C×Dₑ projection turning an embedding into a per-category bias.
    pub s: Mat,
    /// Pre-activation temperature parameters, one per scorer.
    pub theta_alpha: Vec<f64>,
}

impl ScorerSpecificHead {
    fn check_scorer(&self, j: usize) -> Result<()> {
        if j >= self.e.rows() {
            return Err(Error::ScorerOutOfRange {
                index: j,
                count: self.e.rows(),
            });
        }
        Ok(())
    }

    /// Effective temperature of scorer `j`.
    pub fn alpha(&self, j: usize) -> Result<f64> {
        self.check_scorer(j)?;
        Ok(softplus(self.theta_alpha[j]))
    }

    /// Bias vector `S e_j` of scorer `j`.
    pub fn bias(&self, j: usize) -> Result<Vec<f64>> {
        self.check_scorer(j)?;
        Ok(self.s.matvec(self.e.row(j)))
    }

    /// Pre-temperature logits `w_c·r + (S e_j)_c`.
    fn base_logits(&self, r: &[f64], j: usize) -> Result<Vec<f64>> {
        if r.len() != self.w.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.w.cols(),
                found: r.len(),
            });
        }
        let bias = self.bias(j)?;
        let mut u = self.w.matvec(r);
        for (uc, bc) in u.iter_mut().zip(bias) {
            *uc += bc;
        }
        Ok(u)
    }

    pub fn logits(&self, r: &[f64], j: usize) -> Result<Vec<f64>> {
        let alpha = self.alpha(j)?;
        let mut u = self.base_logits(r, j)?;
        for uc in &mut u {
            *uc *= alpha;
        }
        Ok(u)
    }

    pub fn forward(&self, r: &[f64], j: usize) -> Result<ProbVector> {
        Ok(ProbVector::from_logits(&self.logits(r, j)?))
    }
}

/// Content-driven head: bias and temperature are bilinear forms of the
/// representation and the scorer embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentHead {
    /// C×D weight matrix.
    pub w: Mat,
    /// J×Dₑ scorer embeddings.
    pub e: Mat,
    /// One D×Dₑ bilinear form per score category: `b_c = rᵀ A_b⁽ᶜ⁾ e_j`.
    pub a_bias: Vec<Mat>,
    /// D×Dₑ bilinear form for the temperature pre-activation.
    pub a_alpha: Mat,
}

impl ContentHead {
    fn check_dims(&self, r: &[f64], j: usize) -> Result<()> {
        if r.len() != self.w.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.w.cols(),
                found: r.len(),
            });
        }
        if j >= self.e.rows() {
            return Err(Error::ScorerOutOfRange {
                index: j,
                count: self.e.rows(),
            });
        }
        Ok(())
    }

    /// Content-dependent bias vector for `(r, j)`.
    pub fn bias(&self, r: &[f64], j: usize) -> Result<Vec<f64>> {
        self.check_dims(r, j)?;
        let e = self.e.row(j);
        Ok(self.a_bias.iter().map(|a| a.bilinear(r, e)).collect())
    }

    /// Content-dependent temperature `softplus(rᵀ A_α e_j)` for `(r, j)`.
    pub fn alpha(&self, r: &[f64], j: usize) -> Result<f64> {
        self.check_dims(r, j)?;
        Ok(softplus(self.a_alpha.bilinear(r, self.e.row(j))))
    }

    fn base_logits(&self, r: &[f64], j: usize) -> Result<Vec<f64>> {
        let bias = self.bias(r, j)?;
        let mut u = self.w.matvec(r);
        for (uc, bc) in u.iter_mut().zip(bias) {
            *uc += bc;
        }
        Ok(u)
    }

    pub fn logits(&self, r: &[f64], j: usize) -> Result<Vec<f64>> {
        let alpha = self.alpha(r, j)?;
        let mut u = self.base_logits(r, j)?;
        for uc in &mut u {
            *uc *= alpha;
        }
        Ok(u)
    }

    pub fn forward(&self, r: &[f64], j: usize) -> Result<ProbVector> {
        Ok(ProbVector::from_logits(&self.logits(r, j)?))
    }

    /// Prediction with the bias forced to zero and the temperature forced
    /// to one: `softmax(W r)`. Used for "no-bias" case-study comparisons.
    pub fn forward_no_bias(&self, r: &[f64]) -> Result<ProbVector> {
        if r.len() != self.w.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.w.cols(),
                found: r.len(),
            });
        }
        Ok(ProbVector::from_logits(&self.w.matvec(r)))
    }
}

/// A scoring head of any family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScoringHead {
    Universal(UniversalHead),
    Scorer(ScorerSpecificHead),
    Content(ContentHead),
}

impl ScoringHead {
    /// Fresh head with Gaussian(0, 0.02²) weights and temperature
    /// pre-activations at `softplus⁻¹(1)`, so initial probabilities are
    /// near-uniform and all families start equivalent to the baseline.
    pub fn init(
        kind: HeadKind,
        c: usize,
        d: usize,
        d_e: usize,
        j: usize,
        rng: &mut impl Rng,
    ) -> ScoringHead {
        let normal = Normal::new(0.0, INIT_STD).expect("valid std");
        let mut sample = |rows: usize, cols: usize| {
            Mat::from_fn(rows, cols, |_, _| normal.sample(rng))
        };
        match kind {
            HeadKind::Universal => ScoringHead::Universal(UniversalHead {
                w: sample(c, d),
                b: vec![0.0; c],
            }),
            HeadKind::Scorer => ScoringHead::Scorer(ScorerSpecificHead {
                w: sample(c, d),
                e: sample(j, d_e),
                s: sample(c, d_e),
                theta_alpha: vec![crate::math::softplus_inv(1.0); j],
            }),
            HeadKind::Content => {
                let w = sample(c, d);
                let e = sample(j, d_e);
                let a_bias = (0..c).map(|_| sample(d, d_e)).collect();
                let a_alpha = sample(d, d_e);
                ScoringHead::Content(ContentHead { w, e, a_bias, a_alpha })
            }
        }
    }

    pub fn kind(&self) -> HeadKind {
        match self {
            ScoringHead::Universal(_) => HeadKind::Universal,
            ScoringHead::Scorer(_) => HeadKind::Scorer,
            ScoringHead::Content(_) => HeadKind::Content,
        }
    }

    /// Number of score categories C.
    pub fn num_categories(&self) -> usize {
        match self {
            ScoringHead::Universal(h) => h.w.rows(),
            ScoringHead::Scorer(h) => h.w.rows(),
            ScoringHead::Content(h) => h.w.rows(),
        }
    }

    /// Representation dimension D.
    pub fn dim(&self) -> usize {
        match self {
            ScoringHead::Universal(h) => h.w.cols(),
            ScoringHead::Scorer(h) => h.w.cols(),
            ScoringHead::Content(h) => h.w.cols(),
        }
    }

    /// Scorer-embedding dimension Dₑ (zero for the universal head).
    pub fn embed_dim(&self) -> usize {
        match self {
            ScoringHead::Universal(_) => 0,
            ScoringHead::Scorer(h) => h.e.cols(),
            ScoringHead::Content(h) => h.e.cols(),
        }
    }

    /// Number of scorers J (zero for the universal head).
    pub fn num_scorers(&self) -> usize {
        match self {
            ScoringHead::Universal(_) => 0,
            ScoringHead::Scorer(h) => h.e.rows(),
            ScoringHead::Content(h) => h.e.rows(),
        }
    }

    /// Final logits for `(r, j)`; the universal head ignores `j`.
    pub fn logits(&self, r: &[f64], j: usize) -> Result<Vec<f64>> {
        match self {
            ScoringHead::Universal(h) => h.logits(r),
            ScoringHead::Scorer(h) => h.logits(r, j),
            ScoringHead::Content(h) => h.logits(r, j),
        }
    }

    pub fn forward(&self, r: &[f64], j: usize) -> Result<ProbVector> {
        Ok(ProbVector::from_logits(&self.logits(r, j)?))
    }

    /// Parameter tensors as flat slices, in a fixed per-family order. The
    /// order matches [`ParamGrads::slices`], so optimizers can zip them.
    pub fn param_slices(&self) -> Vec<&[f64]> {
        match self {
            ScoringHead::Universal(h) => vec![h.w.as_slice(), &h.b],
            ScoringHead::Scorer(h) => {
                vec![h.w.as_slice(), h.e.as_slice(), h.s.as_slice(), &h.theta_alpha]
            }
            ScoringHead::Content(h) => {
                let mut v = vec![h.w.as_slice(), h.e.as_slice()];
                v.extend(h.a_bias.iter().map(Mat::as_slice));
                v.push(h.a_alpha.as_slice());
                v
            }
        }
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            ScoringHead::Universal(h) => vec![h.w.as_mut_slice(), &mut h.b],
            ScoringHead::Scorer(h) => vec![
                h.w.as_mut_slice(),
                h.e.as_mut_slice(),
                h.s.as_mut_slice(),
                &mut h.theta_alpha,
            ],
            ScoringHead::Content(h) => {
                let mut v = vec![h.w.as_mut_slice(), h.e.as_mut_slice()];
                v.extend(h.a_bias.iter_mut().map(Mat::as_mut_slice));
                v.push(h.a_alpha.as_mut_slice());
                v
            }
        }
    }

    /// Total parameter count.
    pub fn num_params(&self) -> usize {
        self.param_slices().iter().map(|s| s.len()).sum()
    }

    /// Exact analytic gradients of every parameter touched by `(r, j)`,
    /// given `grad_logits = ∂L/∂z` for the final logits `z`.
    pub fn backward(&self, r: &[f64], j: usize, grad_logits: &[f64]) -> Result<ParamGrads> {
        let mut grads = ParamGrads::zeros_like(self);
        self.backward_into(r, j, grad_logits, &mut grads)?;
        Ok(grads)
    }

    /// Accumulating form of [`ScoringHead::backward`].
    pub fn backward_into(
        &self,
        r: &[f64],
        j: usize,
        grad_logits: &[f64],
        grads: &mut ParamGrads,
    ) -> Result<()> {
        if grad_logits.len() != self.num_categories() {
            return Err(Error::DimensionMismatch {
                expected: self.num_categories(),
                found: grad_logits.len(),
            });
        }
        match (self, grads) {
            (ScoringHead::Universal(h), ParamGrads::Universal { w, b }) => {
                if r.len() != h.w.cols() {
                    return Err(Error::DimensionMismatch {
                        expected: h.w.cols(),
                        found: r.len(),
                    });
                }
                for (c, &g) in grad_logits.iter().enumerate() {
                    axpy(g, r, w.row_mut(c));
                    b[c] += g;
                }
                Ok(())
            }
            (ScoringHead::Scorer(h), ParamGrads::Scorer { w, e, s, theta_alpha }) => {
                let alpha = h.alpha(j)?;
                let u = h.base_logits(r, j)?;
                let ej = h.e.row(j);
                // z_c = α u_c with u_c = w_c·r + (S e_j)_c and α = softplus(θ_j)
                for (c, &g) in grad_logits.iter().enumerate() {
                    let ag = alpha * g;
                    axpy(ag, r, w.row_mut(c));
                    axpy(ag, ej, s.row_mut(c));
                }
                // ∂L/∂e_j = α Sᵀ g
                let st_g = h.s.matvec_t(grad_logits);
                axpy(alpha, &st_g, e.row_mut(j));
                // ∂L/∂θ_j = (Σ_c g_c u_c) σ(θ_j)
                theta_alpha[j] += dot(grad_logits, &u) * sigmoid(h.theta_alpha[j]);
                Ok(())
            }
            (ScoringHead::Content(h), ParamGrads::Content { w, e, a_bias, a_alpha }) => {
                h.check_dims(r, j)?;
                let ej = h.e.row(j);
                let pre_alpha = h.a_alpha.bilinear(r, ej);
                let alpha = softplus(pre_alpha);
                let u = h.base_logits(r, j)?;
                // z_c = α u_c, u_c = w_c·r + rᵀ A_b⁽ᶜ⁾ e_j, α = softplus(rᵀ A_α e_j)
                let mut e_grad = vec![0.0; ej.len()];
                for (c, &g) in grad_logits.iter().enumerate() {
                    let ag = alpha * g;
                    axpy(ag, r, w.row_mut(c));
                    a_bias[c].add_scaled_outer(ag, r, ej);
                    // contribution of b_c to ∂L/∂e_j: α g_c (A_b⁽ᶜ⁾)ᵀ r
                    let at_r = h.a_bias[c].matvec_t(r);
                    axpy(ag, &at_r, &mut e_grad);
                }
                // temperature chain: ∂L/∂s_α = (Σ_c g_c u_c) σ(s_α)
                let d_pre = dot(grad_logits, &u) * sigmoid(pre_alpha);
                a_alpha.add_scaled_outer(d_pre, r, ej);
                let aat_r = h.a_alpha.matvec_t(r);
                axpy(d_pre, &aat_r, &mut e_grad);
                axpy(1.0, &e_grad, e.row_mut(j));
                Ok(())
            }
            _ => Err(Error::InvalidConfig(
                "gradient buffer does not match head family".into(),
            )),
        }
    }
}

/// `y += a · x`.
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Gradient buffers with the same shapes as the owning head's parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamGrads {
    Universal {
        w: Mat,
        b: Vec<f64>,
    },
    Scorer {
        w: Mat,
        e: Mat,
        s: Mat,
        theta_alpha: Vec<f64>,
    },
    Content {
        w: Mat,
        e: Mat,
        a_bias: Vec<Mat>,
        a_alpha: Mat,
    },
}

impl ParamGrads {
    pub fn zeros_like(head: &ScoringHead) -> ParamGrads {
        match head {
            ScoringHead::Universal(h) => ParamGrads::Universal {
                w: Mat::zeros(h.w.rows(), h.w.cols()),
                b: vec![0.0; h.b.len()],
            },
            ScoringHead::Scorer(h) => ParamGrads::Scorer {
                w: Mat::zeros(h.w.rows(), h.w.cols()),
                e: Mat::zeros(h.e.rows(), h.e.cols()),
                s: Mat::zeros(h.s.rows(), h.s.cols()),
                theta_alpha: vec![0.0; h.theta_alpha.len()],
            },
            ScoringHead::Content(h) => ParamGrads::Content {
                w: Mat::zeros(h.w.rows(), h.w.cols()),
                e: Mat::zeros(h.e.rows(), h.e.cols()),
                a_bias: h
                    .a_bias
                    .iter()
                    .map(|a| Mat::zeros(a.rows(), a.cols()))
                    .collect(),
                a_alpha: Mat::zeros(h.a_alpha.rows(), h.a_alpha.cols()),
            },
        }
    }

    /// Flat slices in the same fixed order as [`ScoringHead::param_slices`].
    pub fn slices(&self) -> Vec<&[f64]> {
        match self {
            ParamGrads::Universal { w, b } => vec![w.as_slice(), b],
            ParamGrads::Scorer { w, e, s, theta_alpha } => {
                vec![w.as_slice(), e.as_slice(), s.as_slice(), theta_alpha]
            }
            ParamGrads::Content { w, e, a_bias, a_alpha } => {
                let mut v = vec![w.as_slice(), e.as_slice()];
                v.extend(a_bias.iter().map(Mat::as_slice));
                v.push(a_alpha.as_slice());
                v
            }
        }
    }

    fn slices_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            ParamGrads::Universal { w, b } => vec![w.as_mut_slice(), b],
            ParamGrads::Scorer { w, e, s, theta_alpha } => {
                vec![w.as_mut_slice(), e.as_mut_slice(), s.as_mut_slice(), theta_alpha]
            }
            ParamGrads::Content { w, e, a_bias, a_alpha } => {
                let mut v = vec![w.as_mut_slice(), e.as_mut_slice()];
                v.extend(a_bias.iter_mut().map(Mat::as_mut_slice));
                v.push(a_alpha.as_mut_slice());
                v
            }
        }
    }

    /// Multiplies every gradient entry by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for s in self.slices_mut() {
            for v in s {
                *v *= factor;
            }
        }
    }

    /// Largest absolute gradient entry.
    pub fn max_abs(&self) -> f64 {
        self.slices()
            .iter()
            .flat_map(|s| s.iter())
            .fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}

/// Serialized model: shape metadata, the owning dataset's score scale and
/// scorer-id table, and the parameter tensors as row-major arrays.
///
/// The JSON encoding uses full round-trip float precision, so
/// save → load → save is byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub c: usize,
    pub d: usize,
    pub d_e: usize,
    pub j: usize,
    pub scale: ScoreScale,
    pub scorer_ids: Vec<String>,
    pub head: ScoringHead,
}

impl Checkpoint {
    pub fn new(head: ScoringHead, scale: ScoreScale, scorer_ids: Vec<String>) -> Checkpoint {
        Checkpoint {
            c: head.num_categories(),
            d: head.dim(),
            d_e: head.embed_dim(),
            j: head.num_scorers(),
            scale,
            scorer_ids,
            head,
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Checkpoint> {
        let text = std::fs::read_to_string(path)?;
        let ckpt: Checkpoint = serde_json::from_str(&text)?;
        ckpt.validate()?;
        Ok(ckpt)
    }

    fn validate(&self) -> Result<()> {
        let h = &self.head;
        if h.num_categories() != self.c
            || h.dim() != self.d
            || h.embed_dim() != self.d_e
            || h.num_scorers() != self.j
        {
            return Err(Error::InvalidCheckpoint(
                "shape metadata does not match parameter arrays".into(),
            ));
        }
        if h.kind() != HeadKind::Universal && self.scorer_ids.len() != self.j {
            return Err(Error::InvalidCheckpoint(format!(
                "scorer id table has {} entries, expected {}",
                self.scorer_ids.len(),
                self.j
            )));
        }
        if self.c != self.scale.num_categories() {
            return Err(Error::InvalidCheckpoint(
                "score scale does not match category count".into(),
            ));
        }
        Ok(())
    }
}
