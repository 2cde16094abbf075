//! Evaluation metrics for ordinal scoring: one-vs-rest averaged AUC,
//! expected-score RMSE, and multi-class Cohen's kappa with unweighted,
//! linear, and quadratic weightings.
//!
//! AUC treats each score category as its own binary problem (positives are
//! the points whose true category is `c`, ranked by `p_c`) and averages the
//! per-category AUCs, skipping categories that lack positives or negatives.
//! RMSE compares the true score against the expected score `Σ p_c s_c`, so
//! `rmse² = mean(mse_loss)` exactly. Kappa is computed on argmax category
//! predictions.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ScoreScale};
use crate::error::{Error, Result};
use crate::head::{ProbVector, ScoringHead};

/// Predicted distributions with aligned true categories.
#[derive(Debug, Clone)]
pub struct EvalBatch {
    probs: Vec<ProbVector>,
    true_cats: Vec<usize>,
    scale: ScoreScale,
}

impl EvalBatch {
    pub fn new(probs: Vec<ProbVector>, true_cats: Vec<usize>, scale: ScoreScale) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if probs.len() != true_cats.len() {
            return Err(Error::UnequalColumns);
        }
        let c = scale.num_categories();
        if probs.iter().any(|p| p.num_categories() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: probs
                    .iter()
                    .map(ProbVector::num_categories)
                    .find(|&n| n != c)
                    .unwrap_or(c),
            });
        }
        if true_cats.iter().any(|&y| y >= c) {
            return Err(Error::InvalidConfig("true category out of range".into()));
        }
        Ok(EvalBatch { probs, true_cats, scale })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[ProbVector] {
        &self.probs
    }

    pub fn true_cats(&self) -> &[usize] {
        &self.true_cats
    }

    pub fn scale(&self) -> ScoreScale {
        self.scale
    }

    /// Argmax category predictions.
    pub fn pred_cats(&self) -> Vec<usize> {
        self.probs.iter().map(ProbVector::argmax_category).collect()
    }
}

/// Binary AUC by the Mann-Whitney rank statistic with 0.5 credit for ties.
/// Returns `None` when either class is absent.
pub fn binary_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    debug_assert_eq!(scores.len(), positive.len());
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    // average ranks over tie groups (1-based ranks)
    let mut rank = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut k = i;
        while k + 1 < order.len() && scores[order[k + 1]] == scores[order[i]] {
            k += 1;
        }
        let avg = (i + 1 + k + 1) as f64 / 2.0;
        for &idx in &order[i..=k] {
            rank[idx] = avg;
        }
        i = k + 1;
    }
    let rank_sum: f64 = rank
        .iter()
        .zip(positive)
        .filter(|&(_, &p)| p)
        .map(|(r, _)| r)
        .sum();
    let np = n_pos as f64;
    let nn = n_neg as f64;
    Some((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

/// One-vs-rest AUC averaged over score categories.
///
/// Categories without both positives and negatives are skipped; if no
/// category is computable the batch is degenerate.
pub fn auc_averaged(batch: &EvalBatch) -> Result<f64> {
    let c = batch.scale.num_categories();
    let mut total = 0.0;
    let mut computed = 0usize;
    for cat in 0..c {
        let scores: Vec<f64> = batch.probs.iter().map(|p| p.as_slice()[cat]).collect();
        let positive: Vec<bool> = batch.true_cats.iter().map(|&y| y == cat).collect();
        if let Some(auc) = binary_auc(&scores, &positive) {
            total += auc;
            computed += 1;
        }
    }
    if computed == 0 {
        return Err(Error::DegenerateEvalBatch);
    }
    Ok(total / computed as f64)
}

/// Root mean squared error of the expected score against the true score.
pub fn rmse(batch: &EvalBatch) -> f64 {
    let n = batch.len() as f64;
    let sum_sq: f64 = batch
        .probs
        .iter()
        .zip(&batch.true_cats)
        .map(|(p, &y)| {
            let diff = batch.scale.score_of(y) as f64 - p.expected_score(batch.scale);
            diff * diff
        })
        .sum();
    (sum_sq / n).sqrt()
}

/// Disagreement weighting for Cohen's kappa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaWeighting {
    Unweighted,
    Linear,
    Quadratic,
}

impl KappaWeighting {
    pub fn as_str(&self) -> &'static str {
        match self {
            KappaWeighting::Unweighted => "unweighted",
            KappaWeighting::Linear => "linear",
            KappaWeighting::Quadratic => "quadratic",
        }
    }

    fn weight(&self, a: usize, b: usize, c: usize) -> f64 {
        let d = (a as f64 - b as f64).abs();
        let span = (c - 1) as f64;
        match self {
            KappaWeighting::Unweighted => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            KappaWeighting::Linear => d / span,
            KappaWeighting::Quadratic => (d / span) * (d / span),
        }
    }
}

impl std::str::FromStr for KappaWeighting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unweighted" => Ok(KappaWeighting::Unweighted),
            "linear" => Ok(KappaWeighting::Linear),
            "quadratic" => Ok(KappaWeighting::Quadratic),
            other => Err(Error::InvalidConfig(format!(
                "unknown kappa weighting {other:?}"
            ))),
        }
    }
}

/// Weighted Cohen's kappa between predicted and true categories:
/// `κ = 1 - Σ w·O / Σ w·E` with observed confusion counts `O` and chance
/// expectation `E` from the outer product of the marginals.
///
/// When both marginals concentrate on the same single category the expected
/// disagreement is zero; total observed agreement then defines `κ = 1`,
/// anything else is undefined.
pub fn kappa(
    pred_cats: &[usize],
    true_cats: &[usize],
    c: usize,
    weighting: KappaWeighting,
) -> Result<f64> {
    if pred_cats.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if pred_cats.len() != true_cats.len() {
        return Err(Error::UnequalColumns);
    }
    let n = pred_cats.len() as f64;
    let mut observed = vec![vec![0.0f64; c]; c];
    let mut true_marginal = vec![0.0f64; c];
    let mut pred_marginal = vec![0.0f64; c];
    for (&p, &t) in pred_cats.iter().zip(true_cats) {
        assert!(p < c && t < c, "category out of range");
        observed[t][p] += 1.0;
        true_marginal[t] += 1.0;
        pred_marginal[p] += 1.0;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for a in 0..c {
        for b in 0..c {
            let w = weighting.weight(a, b, c);
            num += w * observed[a][b];
            den += w * true_marginal[a] * pred_marginal[b] / n;
        }
    }
    if den == 0.0 {
        return if num == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::UndefinedKappa)
        };
    }
    Ok(1.0 - num / den)
}

/// All evaluation metrics of one model on one point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub auc: f64,
    pub rmse: f64,
    pub kappa_unweighted: f64,
    pub kappa_linear: f64,
    pub kappa_quadratic: f64,
}

impl EvalMetrics {
    pub fn kappa(&self, weighting: KappaWeighting) -> f64 {
        match weighting {
            KappaWeighting::Unweighted => self.kappa_unweighted,
            KappaWeighting::Linear => self.kappa_linear,
            KappaWeighting::Quadratic => self.kappa_quadratic,
        }
    }
}

/// Forwards the selected points through `head` and computes every metric.
/// Kappa uses argmax category predictions.
pub fn evaluate(head: &ScoringHead, ds: &Dataset, idxs: &[usize]) -> Result<EvalMetrics> {
    if idxs.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let scale = ds.scale();
    let mut probs = Vec::with_capacity(idxs.len());
    let mut true_cats = Vec::with_capacity(idxs.len());
    for &idx in idxs {
        let point = &ds.points()[idx];
        probs.push(head.forward(&point.representation, ds.scorer_of(idx))?);
        true_cats.push(scale.category_of(point.score));
    }
    let batch = EvalBatch::new(probs, true_cats, scale)?;
    let preds = batch.pred_cats();
    let c = scale.num_categories();
    Ok(EvalMetrics {
        auc: auc_averaged(&batch)?,
        rmse: rmse(&batch),
        kappa_unweighted: kappa(&preds, batch.true_cats(), c, KappaWeighting::Unweighted)?,
        kappa_linear: kappa(&preds, batch.true_cats(), c, KappaWeighting::Linear)?,
        kappa_quadratic: kappa(&preds, batch.true_cats(), c, KappaWeighting::Quadratic)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataPoint, ResponseFeatures};
    use crate::head::{HeadKind, UniversalHead};
    use crate::loss::mse_loss;
    use crate::math::Mat;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scale() -> ScoreScale {
        ScoreScale::zero_to_four()
    }

    fn onehot(c: usize, y: usize) -> ProbVector {
        let mut p = vec![0.0; c];
        p[y] = 1.0;
        ProbVector::from_probs(p).unwrap()
    }

    fn random_batch(seed: u64, n: usize) -> EvalBatch {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probs: Vec<ProbVector> = (0..n)
            .map(|_| {
                let z: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
                ProbVector::from_logits(&z)
            })
            .collect();
        let true_cats: Vec<usize> = (0..n).map(|_| rng.random_range(0..5)).collect();
        EvalBatch::new(probs, true_cats, scale()).unwrap()
    }

    /// Brute-force all-pairs AUC oracle with 0.5 credit for ties.
    fn all_pairs_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
        let pos: Vec<f64> = scores
            .iter()
            .zip(positive)
            .filter(|(_, &p)| p)
            .map(|(s, _)| *s)
            .collect();
        let neg: Vec<f64> = scores
            .iter()
            .zip(positive)
            .filter(|(_, &p)| !p)
            .map(|(s, _)| *s)
            .collect();
        if pos.is_empty() || neg.is_empty() {
            return None;
        }
        let mut credit = 0.0;
        for &p in &pos {
            for &n in &neg {
                if p > n {
                    credit += 1.0;
                } else if p == n {
                    credit += 0.5;
                }
            }
        }
        Some(credit / (pos.len() * neg.len()) as f64)
    }

    fn oracle_auc_averaged(batch: &EvalBatch) -> Option<f64> {
        let c = batch.scale().num_categories();
        let mut total = 0.0;
        let mut count = 0;
        for cat in 0..c {
            let scores: Vec<f64> = batch.probs().iter().map(|p| p.as_slice()[cat]).collect();
            let positive: Vec<bool> = batch.true_cats().iter().map(|&y| y == cat).collect();
            if let Some(a) = all_pairs_auc(&scores, &positive) {
                total += a;
                count += 1;
            }
        }
        (count > 0).then(|| total / count as f64)
    }

    #[test]
    fn perfectly_separating_probabilities_give_one() {
        let probs: Vec<ProbVector> = (0..10).map(|i| onehot(5, i % 5)).collect();
        let true_cats: Vec<usize> = (0..10).map(|i| i % 5).collect();
        let batch = EvalBatch::new(probs, true_cats, scale()).unwrap();
        assert_abs_diff_eq!(auc_averaged(&batch).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn identical_scores_give_half_from_tie_credit() {
        let probs: Vec<ProbVector> = (0..8).map(|_| onehot(5, 0)).collect();
        let true_cats: Vec<usize> = (0..8).map(|i| i % 5).collect();
        let batch = EvalBatch::new(probs, true_cats, scale()).unwrap();
        assert_abs_diff_eq!(auc_averaged(&batch).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn auc_matches_all_pairs_oracle() {
        for seed in 0..10 {
            let batch = random_batch(seed, 30);
            let got = auc_averaged(&batch).unwrap();
            let want = oracle_auc_averaged(&batch).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn auc_is_invariant_to_monotone_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let scores: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..1.0)).collect();
        let positive: Vec<bool> = (0..40).map(|i| i % 3 == 0).collect();
        let base = binary_auc(&scores, &positive).unwrap();
        let squashed: Vec<f64> = scores.iter().map(|&s| (5.0 * s).tanh()).collect();
        let shifted: Vec<f64> = scores.iter().map(|&s| 3.0 * s + 11.0).collect();
        assert_abs_diff_eq!(binary_auc(&squashed, &positive).unwrap(), base, epsilon = 1e-12);
        assert_abs_diff_eq!(binary_auc(&shifted, &positive).unwrap(), base, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_batch_errors() {
        // single-category truth and identical probabilities: no category has
        // both positives and negatives
        let probs: Vec<ProbVector> = (0..4).map(|_| onehot(5, 2)).collect();
        let true_cats = vec![2; 4];
        let batch = EvalBatch::new(probs, true_cats, scale()).unwrap();
        assert!(matches!(auc_averaged(&batch), Err(Error::DegenerateEvalBatch)));
    }

    #[test]
    fn rmse_zero_when_one_hot_correct() {
        let probs: Vec<ProbVector> = (0..5).map(|i| onehot(5, i)).collect();
        let batch = EvalBatch::new(probs, (0..5).collect(), scale()).unwrap();
        assert_eq!(rmse(&batch), 0.0);
    }

    #[test]
    fn rmse_single_uniform_point() {
        // uniform on 0..4 has expected score 2; y = 0 gives rmse 2
        let p = ProbVector::from_probs(vec![0.2; 5]).unwrap();
        let batch = EvalBatch::new(vec![p], vec![0], scale()).unwrap();
        assert_abs_diff_eq!(rmse(&batch), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn rmse_squared_is_mean_mse_loss() {
        for seed in 20..25 {
            let batch = random_batch(seed, 17);
            let r = rmse(&batch);
            let mean_mse: f64 = batch
                .probs()
                .iter()
                .zip(batch.true_cats())
                .map(|(p, &y)| mse_loss(p, scale().score_of(y), scale()).value)
                .sum::<f64>()
                / batch.len() as f64;
            assert_abs_diff_eq!(r * r, mean_mse, epsilon = 1e-12);
        }
    }

    #[test]
    fn kappa_perfect_agreement_is_one() {
        let cats: Vec<usize> = (0..20).map(|i| i % 5).collect();
        for w in [KappaWeighting::Unweighted, KappaWeighting::Linear, KappaWeighting::Quadratic] {
            assert_abs_diff_eq!(kappa(&cats, &cats, 5, w).unwrap(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn kappa_chance_agreement_is_zero() {
        // 2x2 confusion [[25, 25], [25, 25]]: prediction independent of truth
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for t in 0..2 {
            for p in 0..2 {
                for _ in 0..25 {
                    truth.push(t);
                    pred.push(p);
                }
            }
        }
        for w in [KappaWeighting::Unweighted, KappaWeighting::Linear, KappaWeighting::Quadratic] {
            assert_abs_diff_eq!(kappa(&pred, &truth, 2, w).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    /// Direct double-sum oracle over an explicit confusion matrix.
    fn kappa_oracle(confusion: &[[usize; 5]; 5], weighting: KappaWeighting) -> f64 {
        let c = 5;
        let n: usize = confusion.iter().flatten().sum();
        let mut row = [0.0; 5];
        let mut col = [0.0; 5];
        for a in 0..c {
            for b in 0..c {
                row[a] += confusion[a][b] as f64;
                col[b] += confusion[a][b] as f64;
            }
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for a in 0..c {
            for b in 0..c {
                let w = weighting.weight(a, b, c);
                num += w * confusion[a][b] as f64;
                den += w * row[a] * col[b] / n as f64;
            }
        }
        1.0 - num / den
    }

    #[test]
    fn kappa_matches_double_sum_oracle() {
        let confusion = [
            [10, 2, 1, 0, 0],
            [3, 8, 2, 1, 0],
            [0, 4, 9, 2, 1],
            [1, 0, 3, 7, 2],
            [0, 1, 0, 4, 11],
        ];
        let mut pred = Vec::new();
        let mut truth = Vec::new();
        for a in 0..5 {
            for b in 0..5 {
                for _ in 0..confusion[a][b] {
                    truth.push(a);
                    pred.push(b);
                }
            }
        }
        for w in [KappaWeighting::Unweighted, KappaWeighting::Linear, KappaWeighting::Quadratic] {
            assert_abs_diff_eq!(
                kappa(&pred, &truth, 5, w).unwrap(),
                kappa_oracle(&confusion, w),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn kappa_degenerate_marginals() {
        // both marginals on the same single category with total agreement
        let cats = vec![3usize; 10];
        for w in [KappaWeighting::Unweighted, KappaWeighting::Linear, KappaWeighting::Quadratic] {
            assert_eq!(kappa(&cats, &cats, 5, w).unwrap(), 1.0);
        }
    }

    #[test]
    fn quadratic_exceeds_linear_when_errors_are_adjacent() {
        // all errors at distance 1
        let truth: Vec<usize> = (0..30).map(|i| i % 5).collect();
        let pred: Vec<usize> = truth
            .iter()
            .enumerate()
            .map(|(i, &t)| if i % 3 == 0 && t < 4 { t + 1 } else { t })
            .collect();
        let lin = kappa(&pred, &truth, 5, KappaWeighting::Linear).unwrap();
        let quad = kappa(&pred, &truth, 5, KappaWeighting::Quadratic).unwrap();
        assert!(quad >= lin, "quadratic {quad} < linear {lin}");
    }

    #[test]
    fn kappa_never_exceeds_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let truth: Vec<usize> = (0..40).map(|_| rng.random_range(0..5)).collect();
            let pred: Vec<usize> = (0..40).map(|_| rng.random_range(0..5)).collect();
            for w in
                [KappaWeighting::Unweighted, KappaWeighting::Linear, KappaWeighting::Quadratic]
            {
                assert!(kappa(&pred, &truth, 5, w).unwrap() <= 1.0 + 1e-12);
            }
        }
    }

    fn labeled_dataset() -> Dataset {
        // representation directly encodes the category
        let mut points = Vec::new();
        for i in 0..25 {
            let cat = i % 5;
            let mut rep = vec![0.0; 5];
            rep[cat] = 1.0;
            points.push(DataPoint {
                pair_id: format!("p{i}"),
                scorer_id: format!("s{}", i % 2),
                score: cat as i32,
                representation: rep,
                features: ResponseFeatures::default(),
            });
        }
        Dataset::from_points(scale(), points).unwrap()
    }

    #[test]
    fn evaluate_perfect_head() {
        let ds = labeled_dataset();
        // strong diagonal weights reproduce the labels deterministically
        let head = crate::head::ScoringHead::Universal(UniversalHead {
            w: Mat::from_fn(5, 5, |r, c| if r == c { 30.0 } else { 0.0 }),
            b: vec![0.0; 5],
        });
        let idxs: Vec<usize> = (0..ds.len()).collect();
        let m = evaluate(&head, &ds, &idxs).unwrap();
        assert_abs_diff_eq!(m.auc, 1.0, epsilon = 1e-12);
        assert!(m.rmse < 1e-6, "rmse {}", m.rmse);
        assert_abs_diff_eq!(m.kappa_quadratic, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.kappa_unweighted, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_uniform_head_has_half_auc() {
        let ds = labeled_dataset();
        let head = crate::head::ScoringHead::Universal(UniversalHead {
            w: Mat::zeros(5, 5),
            b: vec![0.0; 5],
        });
        let idxs: Vec<usize> = (0..ds.len()).collect();
        let m = evaluate(&head, &ds, &idxs).unwrap();
        assert_abs_diff_eq!(m.auc, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_matches_component_oracles() {
        let ds = labeled_dataset();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let head = crate::head::ScoringHead::init(HeadKind::Scorer, 5, 5, 3, 2, &mut rng);
        let idxs: Vec<usize> = (0..ds.len()).collect();
        let m = evaluate(&head, &ds, &idxs).unwrap();

        let probs: Vec<ProbVector> = idxs
            .iter()
            .map(|&i| head.forward(&ds.points()[i].representation, ds.scorer_of(i)).unwrap())
            .collect();
        let true_cats: Vec<usize> =
            idxs.iter().map(|&i| scale().category_of(ds.points()[i].score)).collect();
        let batch = EvalBatch::new(probs, true_cats.clone(), scale()).unwrap();
        assert_abs_diff_eq!(m.auc, oracle_auc_averaged(&batch).unwrap(), epsilon = 1e-12);
        assert_abs_diff_eq!(m.rmse, rmse(&batch), epsilon = 1e-15);
        let preds = batch.pred_cats();
        assert_abs_diff_eq!(
            m.kappa_quadratic,
            kappa(&preds, &true_cats, 5, KappaWeighting::Quadratic).unwrap(),
            epsilon = 1e-15
        );
    }
}
