//! Synthetic data generator with planted scorer archetypes, plus recovery
//! scoring against the planted ground truth.
//!
//! Each scorer is assigned one of six archetype profiles (negative,
//! positive, conservative, unbiased, polarizing, lenient) and receives its
//! own bias vector and temperature: the archetype values plus configurable
//! per-scorer jitter, so scorers form clusters around the archetypes rather
//! than coinciding. Scores are sampled from the scorer-specific generative
//! model `y ~ Categorical(softmax(α_j (W* r + b_j)))` over a shared pool of
//! response representations.
//!
//! The first representation coordinate is a constant 1, mirroring the large
//! constant component of real embedding vectors; it is what lets a
//! content-driven bilinear head express scorer-constant biases.
//!
//! Generation is fully deterministic under the config seed: the same config
//! yields byte-identical datasets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::analysis::GmmModel;
use crate::data::{DataPoint, Dataset, ResponseFeatures, ScoreScale};
use crate::error::{Error, Result};
use crate::head::ScorerSpecificHead;
use crate::math::{softmax, softplus, Mat};
use crate::stats::{adjusted_rand_index, pearson, spearman};

/// One planted scorer profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeProfile {
    pub name: String,
    /// Additive logit bias per score category.
    pub bias: Vec<f64>,
    /// Temperature multiplier on the logits; must be positive.
    pub temperature: f64,
    /// Mixing weight; weights sum to one across the archetype list.
    pub weight: f64,
    /// Mean response features for scorers of this archetype.
    pub feature_means: ResponseFeatures,
}

/// The six default archetypes on the 0..4 scale with unit bias magnitude.
pub fn default_archetypes(c: usize) -> Result<Vec<ArchetypeProfile>> {
    default_archetypes_with_magnitude(c, 1.0)
}

/// Default archetypes with a configurable bias magnitude (the small
/// preference of the unbiased profile scales along, at a tenth).
pub fn default_archetypes_with_magnitude(
    c: usize,
    magnitude: f64,
) -> Result<Vec<ArchetypeProfile>> {
    if c != 5 {
        return Err(Error::ArchetypesNeedFiveCategories { c });
    }
    let m = magnitude;
    let eps = 0.1 * magnitude;
    let profile = |name: &str,
                   bias: Vec<f64>,
                   temperature: f64,
                   weight: f64,
                   math: f64,
                   img: f64,
                   len: f64| ArchetypeProfile {
        name: name.to_string(),
        bias,
        temperature,
        weight,
        feature_means: ResponseFeatures {
            math_token_pct: math,
            image_pct: img,
            token_length: len,
        },
    };
    Ok(vec![
        profile("negative", vec![m, -m, -m, -m, 0.0], 1.013, 0.10, 29.13, 0.101, 23.06),
        profile("positive", vec![-m, -m, -m, -m, m], 1.034, 0.15, 32.12, 1.286, 24.40),
        profile("conservative", vec![0.0, m, m, m, -m], 0.996, 0.10, 23.51, 1.311, 36.16),
        profile("unbiased", vec![0.0, 0.0, 0.0, 0.0, eps], 1.033, 0.45, 29.48, 0.304, 21.94),
        profile("polarizing", vec![m, -m, -m, -m, m], 1.026, 0.10, 45.18, 5.271, 14.35),
        profile("lenient", vec![-m, m, 0.0, 0.0, 0.0], 1.007, 0.10, 33.83, 1.403, 13.34),
    ])
}

/// Generator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_scorers: usize,
    /// Size of the shared response-representation pool.
    pub n_pairs: usize,
    /// Responses scored by each scorer (distinct pairs per scorer).
    pub responses_per_scorer: usize,
    /// Representation dimension (the first coordinate is a constant 1).
    pub d: usize,
    /// Scorer-embedding dimension suggested for models trained on this data.
    pub d_e: usize,
    /// Number of score categories; the scale is `0..c-1`.
    pub c: usize,
    /// Entry standard deviation of the base weight matrix W*.
    pub quality_logit_scale: f64,
    /// Per-scorer, per-category Gaussian jitter added to the archetype bias.
    pub bias_jitter: f64,
    /// Per-scorer log-normal jitter factor on the archetype temperature.
    pub alpha_jitter: f64,
    /// Fraction of each scorer's responses drawn from a pool prefix scored
    /// by every scorer (for multi-scored-pair demonstrations).
    pub shared_pair_fraction: f64,
    pub seed: u64,
    pub archetypes: Vec<ArchetypeProfile>,
}

impl SynthConfig {
    /// Desk-scale benchmark with the six default archetypes and strong
    /// planted biases: 60 scorers, 240 responses each, D = 16.
    ///
    /// Bias magnitude 2.4 with per-scorer jitter 0.55 keeps the archetype
    /// clusters well separated while giving every scorer an individually
    /// recoverable bias ranking; the quality scale of 0.4 keeps all score
    /// categories populated even for strongly biased scorers.
    pub fn table3(seed: u64) -> SynthConfig {
        SynthConfig {
            n_scorers: 60,
            n_pairs: 1200,
            responses_per_scorer: 240,
            d: 16,
            d_e: 8,
            c: 5,
            quality_logit_scale: 0.4,
            bias_jitter: 0.55,
            alpha_jitter: 0.05,
            shared_pair_fraction: 0.0,
            seed,
            archetypes: default_archetypes_with_magnitude(5, 2.4).expect("c = 5"),
        }
    }

    /// Null control: identical dimensions but zero biases, unit
    /// temperatures, and no jitter, so scorers are indistinguishable.
    pub fn null_control(seed: u64) -> SynthConfig {
        let mut cfg = SynthConfig::table3(seed);
        cfg.bias_jitter = 0.0;
        cfg.alpha_jitter = 0.0;
        for archetype in &mut cfg.archetypes {
            archetype.bias = vec![0.0; cfg.c];
            archetype.temperature = 1.0;
        }
        cfg
    }

    pub fn scale(&self) -> ScoreScale {
        ScoreScale {
            min_score: 0,
            max_score: self.c as i32 - 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_scorers == 0 || self.n_pairs == 0 || self.responses_per_scorer == 0 {
            return bad("scorer, pair, and response counts must be positive".into());
        }
        if self.d == 0 || self.d_e == 0 {
            return bad("dimensions must be positive".into());
        }
        if self.c < 2 {
            return bad(format!("need at least 2 score categories, got {}", self.c));
        }
        if self.n_pairs < self.responses_per_scorer {
            return bad(format!(
                "pool of {} pairs cannot supply {} distinct responses per scorer",
                self.n_pairs, self.responses_per_scorer
            ));
        }
        if self.quality_logit_scale <= 0.0 {
            return bad("quality_logit_scale must be positive".into());
        }
        if self.bias_jitter < 0.0 || self.alpha_jitter < 0.0 {
            return bad("jitters must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.shared_pair_fraction) {
            return bad("shared_pair_fraction must lie in [0, 1]".into());
        }
        if self.archetypes.is_empty() {
            return bad("archetype list is empty".into());
        }
        let weight_sum: f64 = self.archetypes.iter().map(|a| a.weight).sum();
        if (weight_sum - 1.0).abs() > 1e-9 {
            return bad(format!("archetype weights sum to {weight_sum}, expected 1"));
        }
        for archetype in &self.archetypes {
            if archetype.bias.len() != self.c {
                return bad(format!(
                    "archetype {:?} has {} bias entries, expected {}",
                    archetype.name,
                    archetype.bias.len(),
                    self.c
                ));
            }
            if archetype.temperature <= 0.0 {
                return bad(format!("archetype {:?} has non-positive temperature", archetype.name));
            }
        }
        Ok(())
    }
}

/// The planted parameters behind a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub archetype_names: Vec<String>,
    /// Archetype index per scorer (dense scorer order).
    pub scorer_archetype: Vec<usize>,
    /// Planted bias vector per scorer.
    pub bias: Vec<Vec<f64>>,
    /// Planted temperature per scorer.
    pub alpha: Vec<f64>,
    /// Base quality weights, C×D.
    pub w_star: Mat,
}

impl GroundTruth {
    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<GroundTruth> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Allocates archetype counts by largest remainder so the realized mix
/// matches the weights as closely as possible; scorers are then assigned in
/// blocks.
fn archetype_quota(weights: &[f64], n: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = weights.iter().map(|w| (w * n as f64).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut remainders: Vec<(usize, f64)> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| (i, w * n as f64 - counts[i] as f64))
        .collect();
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for (i, _) in remainders.iter().take(n - assigned) {
        counts[*i] += 1;
    }
    counts
}

fn sample_category(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let draw: f64 = rng.random();
    let mut acc = 0.0;
    for (c, &p) in probs.iter().enumerate() {
        acc += p;
        if draw < acc {
            return c;
        }
    }
    probs.len() - 1
}

/// Distinct indices in `lo..hi`, sorted ascending.
fn sample_distinct(rng: &mut ChaCha8Rng, lo: usize, hi: usize, amount: usize) -> Vec<usize> {
    debug_assert!(hi - lo >= amount);
    let mut picked = rand::seq::index::sample(rng, hi - lo, amount).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| i + lo).collect()
}

/// Generates a dataset and its ground truth from the config.
pub fn generate(cfg: &SynthConfig) -> Result<(Dataset, GroundTruth)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let scale = cfg.scale();

    let w_star = Mat::from_fn(cfg.c, cfg.d, |_, _| {
        cfg.quality_logit_scale * normal.sample(&mut rng)
    });
    // representation pool; coordinate 0 is the constant intercept
    let pairs: Vec<Vec<f64>> = (0..cfg.n_pairs)
        .map(|_| {
            let mut r = Vec::with_capacity(cfg.d);
            r.push(1.0);
            r.extend((1..cfg.d).map(|_| normal.sample(&mut rng)));
            r
        })
        .collect();

    let counts = archetype_quota(
        &cfg.archetypes.iter().map(|a| a.weight).collect::<Vec<_>>(),
        cfg.n_scorers,
    );
    let mut scorer_archetype = Vec::with_capacity(cfg.n_scorers);
    for (arch, &count) in counts.iter().enumerate() {
        scorer_archetype.extend(std::iter::repeat(arch).take(count));
    }

    let shared_count =
        (cfg.shared_pair_fraction * cfg.responses_per_scorer as f64).round() as usize;

    let mut bias = Vec::with_capacity(cfg.n_scorers);
    let mut alpha = Vec::with_capacity(cfg.n_scorers);
    let mut points = Vec::with_capacity(cfg.n_scorers * cfg.responses_per_scorer);
    for j in 0..cfg.n_scorers {
        let archetype = &cfg.archetypes[scorer_archetype[j]];
        let bias_j: Vec<f64> = archetype
            .bias
            .iter()
            .map(|&b| b + cfg.bias_jitter * normal.sample(&mut rng))
            .collect();
        let alpha_j = archetype.temperature * (cfg.alpha_jitter * normal.sample(&mut rng)).exp();

        let mut pair_idxs: Vec<usize> = (0..shared_count).collect();
        pair_idxs.extend(sample_distinct(
            &mut rng,
            shared_count,
            cfg.n_pairs,
            cfg.responses_per_scorer - shared_count,
        ));

        let scorer_id = format!("s{j:04}");
        for idx in pair_idxs {
            let r = &pairs[idx];
            let mut logits = w_star.matvec(r);
            for (z, &b) in logits.iter_mut().zip(&bias_j) {
                *z = alpha_j * (*z + b);
            }
            let category = sample_category(&mut rng, &softmax(&logits));
            let f = &archetype.feature_means;
            let features = ResponseFeatures {
                math_token_pct: (f.math_token_pct + 6.0 * normal.sample(&mut rng))
                    .clamp(0.0, 100.0),
                image_pct: (f.image_pct + 0.6 * normal.sample(&mut rng)).clamp(0.0, 100.0),
                token_length: (f.token_length + 4.0 * normal.sample(&mut rng)).max(0.0),
            };
            points.push(DataPoint {
                pair_id: format!("p{idx:06}"),
                scorer_id: scorer_id.clone(),
                score: scale.score_of(category),
                representation: r.clone(),
                features,
            });
        }
        bias.push(bias_j);
        alpha.push(alpha_j);
    }

    let truth = GroundTruth {
        archetype_names: cfg.archetypes.iter().map(|a| a.name.clone()).collect(),
        scorer_archetype,
        bias,
        alpha,
        w_star,
    };
    Ok((Dataset::from_points(scale, points)?, truth))
}

/// How well a trained scorer-specific head recovered the planted structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    /// Per-scorer Spearman correlation between the recovered centered bias
    /// `S e_j` and the planted bias.
    pub bias_spearman: Vec<f64>,
    /// Adjusted Rand index between mixture hard labels on the learned
    /// embeddings and the planted archetype labels.
    pub cluster_ari: f64,
    /// Pearson correlation between recovered and planted temperatures
    /// across scorers.
    pub alpha_pearson: f64,
}

impl RecoveryReport {
    /// Fraction of scorers whose bias Spearman reaches `threshold`.
    pub fn spearman_fraction_at_least(&self, threshold: f64) -> f64 {
        if self.bias_spearman.is_empty() {
            return 0.0;
        }
        self.bias_spearman.iter().filter(|&&s| s >= threshold).count() as f64
            / self.bias_spearman.len() as f64
    }
}

/// Scores a trained scorer-specific head (and a mixture over its
/// embeddings) against the planted ground truth.
pub fn recovery_report(
    truth: &GroundTruth,
    head: &ScorerSpecificHead,
    gmm: &GmmModel,
) -> Result<RecoveryReport> {
    let j_count = truth.scorer_archetype.len();
    if head.e.rows() != j_count {
        return Err(Error::InvalidConfig(format!(
            "head has {} scorers, ground truth has {j_count}",
            head.e.rows()
        )));
    }
    let mut bias_spearman = Vec::with_capacity(j_count);
    for j in 0..j_count {
        let mut recovered = head.bias(j)?;
        let mean = recovered.iter().sum::<f64>() / recovered.len() as f64;
        for b in &mut recovered {
            *b -= mean;
        }
        bias_spearman.push(spearman(&recovered, &truth.bias[j]));
    }
    let labels = gmm.hard_assignments(&head.e);
    let cluster_ari = adjusted_rand_index(&labels, &truth.scorer_archetype);
    let recovered_alpha: Vec<f64> =
        head.theta_alpha.iter().map(|&t| softplus(t)).collect();
    let (alpha_pearson, _) = pearson(&recovered_alpha, &truth.alpha);
    Ok(RecoveryReport {
        bias_spearman,
        cluster_ari,
        alpha_pearson,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::fit_gmm;
    use crate::data::save_dataset;
    use crate::head::{HeadKind, ScoringHead};
    use crate::math::softplus_inv;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_archetypes_shape() {
        let archetypes = default_archetypes(5).unwrap();
        assert_eq!(archetypes.len(), 6);
        let total: f64 = archetypes.iter().map(|a| a.weight).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        // unbiased carries almost half the scorers
        let unbiased = archetypes.iter().find(|a| a.name == "unbiased").unwrap();
        assert_abs_diff_eq!(unbiased.weight, 0.45, epsilon = 1e-12);
        // each bias vector is zero-mean after centering
        for archetype in &archetypes {
            let mean: f64 = archetype.bias.iter().sum::<f64>() / archetype.bias.len() as f64;
            let centered_sum: f64 = archetype.bias.iter().map(|b| b - mean).sum();
            assert_abs_diff_eq!(centered_sum, 0.0, epsilon = 1e-12);
        }
        // polarizing favors the extremes
        let polarizing = archetypes.iter().find(|a| a.name == "polarizing").unwrap();
        let mut order: Vec<usize> = (0..5).collect();
        order.sort_by(|&a, &b| polarizing.bias[b].partial_cmp(&polarizing.bias[a]).unwrap());
        let top2 = [order[0].min(order[1]), order[0].max(order[1])];
        assert_eq!(top2, [0, 4]);
        assert!(matches!(
            default_archetypes(4),
            Err(Error::ArchetypesNeedFiveCategories { c: 4 })
        ));
    }

    fn small_cfg(seed: u64) -> SynthConfig {
        SynthConfig {
            n_scorers: 12,
            n_pairs: 60,
            responses_per_scorer: 30,
            d: 6,
            d_e: 4,
            c: 5,
            quality_logit_scale: 0.4,
            bias_jitter: 0.2,
            alpha_jitter: 0.05,
            shared_pair_fraction: 0.1,
            seed,
            archetypes: default_archetypes(5).unwrap(),
        }
    }

    #[test]
    fn generation_is_byte_deterministic() {
        let cfg = small_cfg(11);
        let (ds_a, truth_a) = generate(&cfg).unwrap();
        let (ds_b, truth_b) = generate(&cfg).unwrap();
        assert_eq!(truth_a, truth_b);
        let dir = tempfile::tempdir().unwrap();
        let path_a = dir.path().join("a.jsonl");
        let path_b = dir.path().join("b.jsonl");
        save_dataset(&ds_a, &path_a).unwrap();
        save_dataset(&ds_b, &path_b).unwrap();
        assert_eq!(std::fs::read(&path_a).unwrap(), std::fs::read(&path_b).unwrap());
    }

    #[test]
    fn generated_shape_and_quota() {
        let cfg = small_cfg(3);
        let (ds, truth) = generate(&cfg).unwrap();
        assert_eq!(ds.num_scorers(), 12);
        assert_eq!(ds.len(), 12 * 30);
        assert_eq!(ds.dim(), 6);
        // intercept coordinate
        assert!(ds.points().iter().all(|p| p.representation[0] == 1.0));
        // largest-remainder quota on [.1, .15, .1, .45, .1, .1] with 12 scorers
        let mut counts = vec![0usize; 6];
        for &a in &truth.scorer_archetype {
            counts[a] += 1;
        }
        assert_eq!(counts.iter().sum::<usize>(), 12);
        // floor(5.4) plus one leftover by largest remainder
        assert_eq!(counts[3], 6);
        // scores stay within the scale by construction
        assert!(ds.points().iter().all(|p| (0..=4).contains(&p.score)));
    }

    #[test]
    fn shared_prefix_is_scored_by_everyone() {
        let cfg = SynthConfig {
            shared_pair_fraction: 0.2,
            ..small_cfg(4)
        };
        let (ds, _) = generate(&cfg).unwrap();
        let shared = (0.2 * 30.0f64).round() as usize;
        for j in 0..ds.num_scorers() {
            for idx in 0..shared {
                let pair_id = format!("p{idx:06}");
                let scorer_id = ds.scorer_id(j).to_string();
                assert!(
                    ds.points()
                        .iter()
                        .any(|p| p.pair_id == pair_id && p.scorer_id == scorer_id),
                    "scorer {scorer_id} missing shared pair {pair_id}"
                );
            }
        }
    }

    /// Single pair, zero bias, unit temperature: empirical category
    /// frequencies must match the exact softmax probabilities.
    fn unbiased_single_pair_cfg(n_scorers: usize, seed: u64) -> SynthConfig {
        SynthConfig {
            n_scorers,
            n_pairs: 1,
            responses_per_scorer: 1,
            d: 4,
            d_e: 2,
            c: 5,
            quality_logit_scale: 0.5,
            bias_jitter: 0.0,
            alpha_jitter: 0.0,
            shared_pair_fraction: 0.0,
            seed,
            archetypes: vec![ArchetypeProfile {
                name: "unbiased".into(),
                bias: vec![0.0; 5],
                temperature: 1.0,
                weight: 1.0,
                feature_means: ResponseFeatures::default(),
            }],
        }
    }

    fn tv_distance(ds: &Dataset, truth: &GroundTruth) -> f64 {
        let r = &ds.points()[0].representation;
        let exact = softmax(&truth.w_star.matvec(r));
        let mut counts = vec![0usize; 5];
        for p in ds.points() {
            counts[p.score as usize] += 1;
        }
        let n = ds.len() as f64;
        exact
            .iter()
            .zip(&counts)
            .map(|(&p, &k)| (p - k as f64 / n).abs())
            .sum::<f64>()
            / 2.0
    }

    #[test]
    fn empirical_frequencies_match_model_probabilities() {
        let cfg = unbiased_single_pair_cfg(50_000, 0);
        let (ds, truth) = generate(&cfg).unwrap();
        let tv = tv_distance(&ds, &truth);
        assert!(tv < 0.01, "total variation {tv}");
    }

    #[test]
    fn tv_distance_shrinks_as_samples_quadruple() {
        let small = generate(&unbiased_single_pair_cfg(2_000, 1)).unwrap();
        let large = generate(&unbiased_single_pair_cfg(8_000, 1)).unwrap();
        let tv_small = tv_distance(&small.0, &small.1);
        let tv_large = tv_distance(&large.0, &large.1);
        assert!(
            tv_large < tv_small,
            "tv did not shrink: {tv_small} -> {tv_large}"
        );
    }

    #[test]
    fn negative_archetype_scores_lower_on_shared_pairs() {
        let cfg = SynthConfig {
            n_scorers: 2,
            n_pairs: 400,
            responses_per_scorer: 400,
            d: 6,
            d_e: 2,
            c: 5,
            quality_logit_scale: 0.4,
            bias_jitter: 0.0,
            alpha_jitter: 0.0,
            shared_pair_fraction: 1.0,
            seed: 5,
            archetypes: vec![
                ArchetypeProfile {
                    name: "negative".into(),
                    bias: vec![1.5, 0.0, 0.0, 0.0, 0.0],
                    temperature: 1.0,
                    weight: 0.5,
                    feature_means: ResponseFeatures::default(),
                },
                ArchetypeProfile {
                    name: "unbiased".into(),
                    bias: vec![0.0; 5],
                    temperature: 1.0,
                    weight: 0.5,
                    feature_means: ResponseFeatures::default(),
                },
            ],
        };
        let (ds, truth) = generate(&cfg).unwrap();
        assert_eq!(truth.scorer_archetype, vec![0, 1]);
        let mean = |j: usize| {
            let stats = crate::data::scorer_summary(&ds, j).unwrap();
            stats.mean_score
        };
        assert!(
            mean(0) < mean(1),
            "negative scorer mean {} should be below unbiased {}",
            mean(0),
            mean(1)
        );
    }

    #[test]
    fn oracle_head_recovers_truth_perfectly() {
        let mut cfg = SynthConfig::table3(7);
        cfg.bias_jitter = 0.0;
        cfg.alpha_jitter = 0.0;
        // keep it quick
        cfg.n_scorers = 30;
        cfg.n_pairs = 90;
        cfg.responses_per_scorer = 30;
        let (_, truth) = generate(&cfg).unwrap();
        // head initialized exactly to the planted parameters:
        // S = [I | 0] and e_j = planted bias padded with zeros
        let head = ScorerSpecificHead {
            w: truth.w_star.clone(),
            e: Mat::from_fn(30, cfg.d_e, |j, k| {
                if k < 5 {
                    truth.bias[j][k]
                } else {
                    0.0
                }
            }),
            s: Mat::from_fn(5, cfg.d_e, |r, c| if r == c { 1.0 } else { 0.0 }),
            theta_alpha: truth.alpha.iter().map(|&a| softplus_inv(a)).collect(),
        };
        let gmm = fit_gmm(&head.e, 6, 0, 200, 1e-7).unwrap();
        let report = recovery_report(&truth, &head, &gmm).unwrap();
        for &s in &report.bias_spearman {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(report.cluster_ari, 1.0, epsilon = 1e-12);
        assert!(report.alpha_pearson > 0.999);
        assert_abs_diff_eq!(report.spearman_fraction_at_least(0.8), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn random_head_has_no_cluster_structure() {
        let cfg = SynthConfig::table3(0);
        let (_, truth) = generate(&SynthConfig { n_pairs: 60, responses_per_scorer: 3, ..cfg })
            .unwrap();
        let mut total = 0.0;
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let head = ScoringHead::init(HeadKind::Scorer, 5, 16, 8, 60, &mut rng);
            let ScoringHead::Scorer(head) = head else { unreachable!() };
            let gmm = fit_gmm(&head.e, 6, seed, 200, 1e-7).unwrap();
            let report = recovery_report(&truth, &head, &gmm).unwrap();
            total += report.cluster_ari.abs();
        }
        assert!(total / 10.0 < 0.2, "mean |ARI| = {}", total / 10.0);
    }
}
