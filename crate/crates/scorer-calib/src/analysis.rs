//! Qualitative scorer-analysis pipeline: Gaussian-mixture clustering of
//! scorer embeddings, 2-D projection for display, per-cluster profile
//! tables, correlation matrices with p-values, and same-scorer case
//! studies.
//!
//! Clustering runs in the full embedding space; the 2-D projection is for
//! visualization only.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ResponseFeatures};
use crate::error::{Error, Result};
use crate::head::{ContentHead, ScorerSpecificHead};
use crate::math::{argmax, logsumexp, sym_eigen, Mat};
use crate::stats::pearson;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Variance floor for mixture components.
const VAR_FLOOR: f64 = 1e-6;
/// A component whose weight falls below this is considered collapsed.
const WEIGHT_FLOOR: f64 = 1e-8;

/// Diagonal-covariance Gaussian mixture fitted by EM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmModel {
    /// Mixing weights, in (0, 1), summing to one.
    pub weights: Vec<f64>,
    /// K×D component means.
    pub means: Mat,
    /// K×D diagonal variances, floored at 1e-6.
    pub variances: Mat,
    /// Log-likelihood trace, one entry per EM iteration (non-decreasing).
    pub log_likelihood: Vec<f64>,
}

impl GmmModel {
    pub fn num_components(&self) -> usize {
        self.weights.len()
    }

    /// Per-point log joint densities `ln w_k + ln N(x_n | μ_k, v_k)`.
    fn log_joint(&self, x: &Mat) -> Mat {
        let k = self.num_components();
        let d = self.means.cols();
        debug_assert_eq!(x.cols(), d);
        Mat::from_fn(x.rows(), k, |n, comp| {
            let mut acc = self.weights[comp].ln();
            for dim in 0..d {
                let v = self.variances.get(comp, dim);
                let diff = x.get(n, dim) - self.means.get(comp, dim);
                acc += -0.5 * (2.0 * std::f64::consts::PI * v).ln() - diff * diff / (2.0 * v);
            }
            acc
        })
    }

    /// Posterior responsibilities; each row sums to one.
    pub fn responsibilities(&self, x: &Mat) -> Mat {
        let lj = self.log_joint(x);
        Mat::from_fn(x.rows(), self.num_components(), |n, comp| {
            (lj.get(n, comp) - logsumexp(lj.row(n))).exp()
        })
    }

    /// Hard assignment by maximum responsibility.
    pub fn hard_assignments(&self, x: &Mat) -> Vec<usize> {
        let lj = self.log_joint(x);
        (0..x.rows()).map(|n| argmax(lj.row(n))).collect()
    }

    /// Total log-likelihood of `x` under the mixture.
    pub fn log_likelihood_of(&self, x: &Mat) -> f64 {
        let lj = self.log_joint(x);
        (0..x.rows()).map(|n| logsumexp(lj.row(n))).sum()
    }
}

/// Squared Euclidean distance between a data row and a center row.
fn sq_dist(x: &Mat, n: usize, centers: &Mat, k: usize) -> f64 {
    (0..x.cols())
        .map(|d| {
            let diff = x.get(n, d) - centers.get(k, d);
            diff * diff
        })
        .sum()
}

/// k-means++ seeding: the first center is a uniform draw, each next center
/// is drawn proportionally to the squared distance to its nearest chosen
/// center.
fn kmeans_pp_means(x: &Mat, k: usize, rng: &mut ChaCha8Rng) -> Mat {
    let n = x.rows();
    let mut means = Mat::zeros(k, x.cols());
    let first = rng.random_range(0..n);
    means.row_mut(0).copy_from_slice(x.row(first));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(x, i, &means, 0)).collect();
    for comp in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in nearest.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        means.row_mut(comp).copy_from_slice(x.row(pick));
        for i in 0..n {
            nearest[i] = nearest[i].min(sq_dist(x, i, &means, comp));
        }
    }
    means
}

/// Lloyd iterations from k-means++ seeds until the assignment stabilizes.
/// An emptied cluster is re-seeded to the point farthest from its center.
fn kmeans_means(x: &Mat, k: usize, rng: &mut ChaCha8Rng) -> Mat {
    let n = x.rows();
    let d = x.cols();
    let mut means = kmeans_pp_means(x, k, rng);
    let mut assignment = vec![usize::MAX; n];
    for _ in 0..100 {
        let mut changed = false;
        for i in 0..n {
            let best = (0..k)
                .min_by(|&a, &b| {
                    sq_dist(x, i, &means, a).partial_cmp(&sq_dist(x, i, &means, b)).unwrap()
                })
                .unwrap();
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for comp in 0..k {
            let members: Vec<usize> = (0..n).filter(|&i| assignment[i] == comp).collect();
            if members.is_empty() {
                let farthest = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(x, a, &means, assignment[a])
                            .partial_cmp(&sq_dist(x, b, &means, assignment[b]))
                            .unwrap()
                    })
                    .unwrap();
                means.row_mut(comp).copy_from_slice(x.row(farthest));
                continue;
            }
            for dim in 0..d {
                let mean =
                    members.iter().map(|&i| x.get(i, dim)).sum::<f64>() / members.len() as f64;
                means.set(comp, dim, mean);
            }
        }
    }
    means
}

/// Per-dimension population variance of the data, floored.
fn data_variance(x: &Mat) -> Vec<f64> {
    let n = x.rows() as f64;
    (0..x.cols())
        .map(|d| {
            let mean = (0..x.rows()).map(|i| x.get(i, d)).sum::<f64>() / n;
            let var = (0..x.rows())
                .map(|i| {
                    let diff = x.get(i, d) - mean;
                    diff * diff
                })
                .sum::<f64>()
                / n;
            var.max(VAR_FLOOR)
        })
        .collect()
}

/// Fits a diagonal-covariance Gaussian mixture by EM with k-means++
/// seeding.
///
/// Iterates until the log-likelihood improvement drops below `tol` or
/// `max_iter` iterations. A collapsed component (weight below 1e-8) is
/// re-seeded once; a second collapse of the same component is an error.
pub fn fit_gmm(
    embeddings: &Mat,
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<GmmModel> {
    let n = embeddings.rows();
    if n < k || k == 0 {
        return Err(Error::TooFewPointsForMixture { points: n, components: k });
    }
    let d = embeddings.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_var = data_variance(embeddings);
    let mut model = GmmModel {
        weights: vec![1.0 / k as f64; k],
        means: kmeans_means(embeddings, k, &mut rng),
        variances: Mat::from_fn(k, d, |_, dim| base_var[dim]),
        log_likelihood: Vec::new(),
    };
    let mut reseeded = vec![false; k];

    for _ in 0..max_iter {
        // E step
        let lj = model.log_joint(embeddings);
        let mut ll = 0.0;
        let mut resp = Mat::zeros(n, k);
        for i in 0..n {
            let lse = logsumexp(lj.row(i));
            ll += lse;
            for comp in 0..k {
                resp.set(i, comp, (lj.get(i, comp) - lse).exp());
            }
        }
        model.log_likelihood.push(ll);
        let len = model.log_likelihood.len();
        if len >= 2 && ll - model.log_likelihood[len - 2] < tol {
            break;
        }

        // M step
        for comp in 0..k {
            let nk: f64 = (0..n).map(|i| resp.get(i, comp)).sum();
            let weight = nk / n as f64;
            if weight < WEIGHT_FLOOR {
                if reseeded[comp] {
                    return Err(Error::CollapsedComponent { component: comp, components: k });
                }
                reseeded[comp] = true;
                let pick = rng.random_range(0..n);
                model.means.row_mut(comp).copy_from_slice(embeddings.row(pick));
                for dim in 0..d {
                    model.variances.set(comp, dim, base_var[dim]);
                }
                model.weights[comp] = 1.0 / k as f64;
                let total: f64 = model.weights.iter().sum();
                for w in &mut model.weights {
                    *w /= total;
                }
                continue;
            }
            model.weights[comp] = weight;
            for dim in 0..d {
                let mean =
                    (0..n).map(|i| resp.get(i, comp) * embeddings.get(i, dim)).sum::<f64>() / nk;
                model.means.set(comp, dim, mean);
            }
            for dim in 0..d {
                let mean = model.means.get(comp, dim);
                let var = (0..n)
                    .map(|i| {
                        let diff = embeddings.get(i, dim) - mean;
                        resp.get(i, comp) * diff * diff
                    })
                    .sum::<f64>()
                    / nk;
                model.variances.set(comp, dim, var.max(VAR_FLOOR));
            }
        }
    }
    Ok(model)
}

/// Projects rows onto the top two principal directions of their covariance.
///
/// Sign convention: the first loading of each component with magnitude
/// above 1e-12 is positive. Rank-deficient data simply projects to zero
/// along the missing directions.
pub fn pca_2d(embeddings: &Mat) -> Result<Mat> {
    let n = embeddings.rows();
    if n < 2 {
        return Err(Error::TooFewObservations { n });
    }
    let d = embeddings.cols();
    let means: Vec<f64> = (0..d)
        .map(|dim| (0..n).map(|i| embeddings.get(i, dim)).sum::<f64>() / n as f64)
        .collect();
    let centered = Mat::from_fn(n, d, |i, dim| embeddings.get(i, dim) - means[dim]);
    let cov = Mat::from_fn(d, d, |a, b| {
        (0..n).map(|i| centered.get(i, a) * centered.get(i, b)).sum::<f64>() / (n as f64 - 1.0)
    });
    let (_, vectors) = sym_eigen(&cov);
    // top-2 principal directions with the sign convention applied
    let mut directions = vec![vec![0.0; d]; 2];
    for (comp, direction) in directions.iter_mut().enumerate() {
        if comp >= d {
            break;
        }
        let mut col: Vec<f64> = (0..d).map(|row| vectors.get(row, comp)).collect();
        if let Some(first) = col.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                for v in &mut col {
                    *v = -*v;
                }
            }
        }
        direction.copy_from_slice(&col);
    }
    Ok(Mat::from_fn(n, 2, |i, comp| {
        crate::math::dot(centered.row(i), &directions[comp])
    }))
}

/// Aggregate profile of one scorer cluster. Statistics are `None` for an
/// empty cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterProfile {
    pub cluster: usize,
    /// Dense scorer indices assigned to this cluster.
    pub members: Vec<usize>,
    pub n_scorers: usize,
    /// Total data points scored by members.
    pub n_points: usize,
    /// Mean learned bias vector `S e_j` over members.
    pub avg_bias: Option<Vec<f64>>,
    /// Mean learned temperature over members.
    pub avg_temperature: Option<f64>,
    /// Pooled observed score mean over members' points.
    pub score_mean: Option<f64>,
    /// Pooled population std over members' points.
    pub score_std: Option<f64>,
    /// Mean zero-centered observed scoring distribution over members.
    pub avg_normalized_dist: Option<Vec<f64>>,
    /// Mean response features over members.
    pub feature_means: Option<ResponseFeatures>,
}

/// Builds one profile per mixture component from hard assignments of the
/// head's scorer embeddings.
pub fn cluster_profiles(
    gmm: &GmmModel,
    head: &ScorerSpecificHead,
    ds: &Dataset,
) -> Result<Vec<ClusterProfile>> {
    let j_count = ds.num_scorers();
    if head.e.rows() != j_count {
        return Err(Error::InvalidConfig(format!(
            "head has {} scorers, dataset has {j_count}",
            head.e.rows()
        )));
    }
    let labels = gmm.hard_assignments(&head.e);
    let c = ds.scale().num_categories();
    let by_scorer = ds.points_by_scorer();
    let mut profiles = Vec::with_capacity(gmm.num_components());
    for cluster in 0..gmm.num_components() {
        let members: Vec<usize> = (0..j_count).filter(|&j| labels[j] == cluster).collect();
        if members.is_empty() {
            profiles.push(ClusterProfile {
                cluster,
                members,
                n_scorers: 0,
                n_points: 0,
                avg_bias: None,
                avg_temperature: None,
                score_mean: None,
                score_std: None,
                avg_normalized_dist: None,
                feature_means: None,
            });
            continue;
        }
        let m = members.len() as f64;
        let mut avg_bias = vec![0.0; c];
        let mut avg_temperature = 0.0;
        let mut avg_dist = vec![0.0; c];
        let mut feats = ResponseFeatures::default();
        let mut n_points = 0usize;
        let mut score_sum = 0.0;
        let mut score_sq = 0.0;
        for &j in &members {
            let bias = head.bias(j)?;
            for (acc, b) in avg_bias.iter_mut().zip(bias) {
                *acc += b / m;
            }
            avg_temperature += head.alpha(j)? / m;
            let stats = crate::data::scorer_summary(ds, j)?;
            for (acc, d) in avg_dist.iter_mut().zip(&stats.normalized_dist) {
                *acc += d / m;
            }
            feats.math_token_pct += stats.feature_means.math_token_pct / m;
            feats.image_pct += stats.feature_means.image_pct / m;
            feats.token_length += stats.feature_means.token_length / m;
            for &idx in &by_scorer[j] {
                let s = ds.points()[idx].score as f64;
                n_points += 1;
                score_sum += s;
                score_sq += s * s;
            }
        }
        let np = n_points as f64;
        let score_mean = score_sum / np;
        let score_var = (score_sq / np - score_mean * score_mean).max(0.0);
        profiles.push(ClusterProfile {
            cluster,
            n_scorers: members.len(),
            members,
            n_points,
            avg_bias: Some(avg_bias),
            avg_temperature: Some(avg_temperature),
            score_mean: Some(score_mean),
            score_std: Some(score_var.sqrt()),
            avg_normalized_dist: Some(avg_dist),
            feature_means: Some(feats),
        });
    }
    Ok(profiles)
}

/// Pairwise Pearson correlations with two-sided p-values over named
/// columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub names: Vec<String>,
    /// Symmetric correlation matrix with unit diagonal.
    pub r: Mat,
    /// Symmetric p-value matrix; the diagonal is zero.
    pub p: Mat,
    /// Observations per column pair.
    pub n: usize,
}

/// Computes the correlation matrix over equally-long named columns.
///
/// Constant columns correlate at `r = 0` with `p = 1` by convention.
pub fn correlation_matrix(columns: &[(String, Vec<f64>)]) -> Result<CorrelationReport> {
    let n = columns.first().map_or(0, |(_, v)| v.len());
    if n < 3 {
        return Err(Error::TooFewObservations { n });
    }
    if columns.iter().any(|(_, v)| v.len() != n) {
        return Err(Error::UnequalColumns);
    }
    let m = columns.len();
    let mut r = Mat::zeros(m, m);
    let mut p = Mat::zeros(m, m);
    for a in 0..m {
        r.set(a, a, 1.0);
        for b in (a + 1)..m {
            let (rv, pv) = pearson(&columns[a].1, &columns[b].1);
            r.set(a, b, rv);
            r.set(b, a, rv);
            p.set(a, b, pv);
            p.set(b, a, pv);
        }
    }
    Ok(CorrelationReport {
        names: columns.iter().map(|(name, _)| name.clone()).collect(),
        r,
        p,
        n,
    })
}

/// Standard per-scorer variable columns for a scorer-specific head: learned
/// bias per category, learned temperature, observed score mean/std, and
/// mean response features.
pub fn scorer_variables(
    head: &ScorerSpecificHead,
    ds: &Dataset,
) -> Result<Vec<(String, Vec<f64>)>> {
    let j_count = ds.num_scorers();
    if head.e.rows() != j_count {
        return Err(Error::InvalidConfig(format!(
            "head has {} scorers, dataset has {j_count}",
            head.e.rows()
        )));
    }
    let c = ds.scale().num_categories();
    let biases: Vec<Vec<f64>> = (0..j_count).map(|j| head.bias(j)).collect::<Result<_>>()?;
    let alphas: Vec<f64> = (0..j_count).map(|j| head.alpha(j)).collect::<Result<_>>()?;
    per_scorer_columns(ds, c, biases, alphas)
}

/// Same columns for a content-driven head, using each scorer's mean bias
/// and temperature over their own pairs.
pub fn scorer_variables_content(
    head: &ContentHead,
    ds: &Dataset,
) -> Result<Vec<(String, Vec<f64>)>> {
    let j_count = ds.num_scorers();
    if head.e.rows() != j_count {
        return Err(Error::InvalidConfig(format!(
            "head has {} scorers, dataset has {j_count}",
            head.e.rows()
        )));
    }
    let c = ds.scale().num_categories();
    let by_scorer = ds.points_by_scorer();
    let mut biases = Vec::with_capacity(j_count);
    let mut alphas = Vec::with_capacity(j_count);
    for j in 0..j_count {
        let mut bias = vec![0.0; c];
        let mut alpha = 0.0;
        let n = by_scorer[j].len() as f64;
        for &idx in &by_scorer[j] {
            let r = &ds.points()[idx].representation;
            for (acc, b) in bias.iter_mut().zip(head.bias(r, j)?) {
                *acc += b / n;
            }
            alpha += head.alpha(r, j)? / n;
        }
        biases.push(bias);
        alphas.push(alpha);
    }
    per_scorer_columns(ds, c, biases, alphas)
}

fn per_scorer_columns(
    ds: &Dataset,
    c: usize,
    biases: Vec<Vec<f64>>,
    alphas: Vec<f64>,
) -> Result<Vec<(String, Vec<f64>)>> {
    let j_count = ds.num_scorers();
    let stats: Vec<_> = (0..j_count)
        .map(|j| crate::data::scorer_summary(ds, j))
        .collect::<Result<Vec<_>>>()?;
    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    for cat in 0..c {
        columns.push((format!("bias_{cat}"), biases.iter().map(|b| b[cat]).collect()));
    }
    columns.push(("alpha".into(), alphas));
    columns.push(("score_mean".into(), stats.iter().map(|s| s.mean_score).collect()));
    columns.push(("score_std".into(), stats.iter().map(|s| s.std_score).collect()));
    columns.push((
        "math_token_pct".into(),
        stats.iter().map(|s| s.feature_means.math_token_pct).collect(),
    ));
    columns.push((
        "image_pct".into(),
        stats.iter().map(|s| s.feature_means.image_pct).collect(),
    ));
    columns.push((
        "token_length".into(),
        stats.iter().map(|s| s.feature_means.token_length).collect(),
    ));
    Ok(columns)
}

/// One pair in a same-scorer case study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyRow {
    pub pair_id: String,
    pub true_score: i32,
    /// Argmax prediction of the content-driven head.
    pub content_pred: i32,
    /// Argmax prediction of the scorer-specific head.
    pub scorer_pred: i32,
    /// Argmax prediction of the content-driven head with bias forced to
    /// zero and temperature forced to one.
    pub no_bias_pred: i32,
    /// Content-driven bias vector for this pair.
    pub bias: Vec<f64>,
}

/// Case-study rows for one scorer plus their overall mean content bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyReport {
    pub scorer_id: String,
    /// Mean content bias over all of the scorer's pairs.
    pub overall_bias: Vec<f64>,
    pub rows: Vec<CaseStudyRow>,
}

/// Compares content-driven, scorer-specific, and no-bias predictions on
/// selected pairs of one scorer.
pub fn case_study(
    content: &ContentHead,
    scorer_head: &ScorerSpecificHead,
    ds: &Dataset,
    scorer_id: &str,
    pair_ids: &[String],
) -> Result<CaseStudyReport> {
    let j = ds
        .scorer_index(scorer_id)
        .ok_or_else(|| Error::UnknownScorer { scorer_id: scorer_id.to_string() })?;
    let scale = ds.scale();
    let own_points: Vec<usize> = (0..ds.len()).filter(|&i| ds.scorer_of(i) == j).collect();

    let c = scale.num_categories();
    let mut overall_bias = vec![0.0; c];
    for &idx in &own_points {
        let bias = content.bias(&ds.points()[idx].representation, j)?;
        for (acc, b) in overall_bias.iter_mut().zip(bias) {
            *acc += b / own_points.len() as f64;
        }
    }

    let mut rows = Vec::with_capacity(pair_ids.len());
    for pair_id in pair_ids {
        let idx = own_points
            .iter()
            .copied()
            .find(|&i| ds.points()[i].pair_id == *pair_id)
            .ok_or_else(|| Error::UnknownPair {
                pair_id: pair_id.clone(),
                scorer_id: scorer_id.to_string(),
            })?;
        let point = &ds.points()[idx];
        let r = &point.representation;
        rows.push(CaseStudyRow {
            pair_id: pair_id.clone(),
            true_score: point.score,
            content_pred: scale.score_of(content.forward(r, j)?.argmax_category()),
            scorer_pred: scale.score_of(scorer_head.forward(r, j)?.argmax_category()),
            no_bias_pred: scale.score_of(content.forward_no_bias(r)?.argmax_category()),
            bias: content.bias(r, j)?,
        });
    }
    Ok(CaseStudyReport {
        scorer_id: scorer_id.to_string(),
        overall_bias,
        rows,
    })
}
