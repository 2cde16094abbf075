//! Domain data model: score scales, datasets, scorer indexing,
//! scorer-covering fold plans, and per-scorer summary statistics.
//!
//! A dataset is a flat list of scored responses. Each point carries the
//! response representation (a fixed-dimensional real vector produced by any
//! upstream model), the id of the human scorer who scored it, the integer
//! score, and a few surface features of the response. Scorer ids are mapped
//! to dense indices in first-appearance order so model parameters can be
//! stored in plain arrays.

use std::collections::HashMap;
use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Learned-representation vector of a question-response pair.
pub type Representation = Vec<f64>;

/// Inclusive integer score range with dense category indices.
///
/// Category index `c` maps to score value `min_score + c`; there are
/// `num_categories()` categories in total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreScale {
    pub min_score: i32,
    pub max_score: i32,
}

impl ScoreScale {
    pub fn new(min_score: i32, max_score: i32) -> Result<Self> {
        if max_score < min_score + 1 {
            return Err(Error::InvalidConfig(format!(
                "score scale needs at least 2 categories, got {min_score}..{max_score}"
            )));
        }
        Ok(ScoreScale { min_score, max_score })
    }

    /// The default 0..4 scale (five categories).
    pub fn zero_to_four() -> Self {
        ScoreScale { min_score: 0, max_score: 4 }
    }

    pub fn num_categories(&self) -> usize {
        (self.max_score - self.min_score + 1) as usize
    }

    pub fn contains(&self, score: i32) -> bool {
        (self.min_score..=self.max_score).contains(&score)
    }

    /// Category index of a score value.
    pub fn category_of(&self, score: i32) -> usize {
        debug_assert!(self.contains(score));
        (score - self.min_score) as usize
    }

    /// Score value of a category index.
    pub fn score_of(&self, category: usize) -> i32 {
        self.min_score + category as i32
    }
}

/// Surface features of a response, averaged in profile tables.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResponseFeatures {
    /// Percentage of math tokens in the response, in [0, 100].
    pub math_token_pct: f64,
    /// Percentage of image content in the response, in [0, 100].
    pub image_pct: f64,
    /// Number of word tokens in the response.
    pub token_length: f64,
}

/// One scored response: the unit of training.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub pair_id: String,
    pub scorer_id: String,
    pub score: i32,
    pub representation: Representation,
    pub features: ResponseFeatures,
}

/// JSONL wire format for one data point. Field order is fixed so that
/// serialization is byte-stable.
#[derive(Serialize, Deserialize)]
struct JsonRecord {
    pair_id: String,
    scorer_id: String,
    score: i64,
    representation: Vec<f64>,
    #[serde(default)]
    features: Option<ResponseFeatures>,
}

/// An ordered collection of data points with a dense scorer index.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    scale: ScoreScale,
    points: Vec<DataPoint>,
    /// Dense index -> scorer id, in first-appearance order.
    scorer_ids: Vec<String>,
    /// Scorer id -> dense index.
    scorer_index: HashMap<String, usize>,
    /// Representation dimension, constant across points.
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from points, assigning dense scorer indices in
    /// first-appearance order. `record` positions (1-based) are used as the
    /// line numbers in errors.
    pub fn from_points(scale: ScoreScale, points: Vec<DataPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::MalformedLine {
                line: 1,
                message: "empty dataset".into(),
            });
        }
        let dim = points[0].representation.len();
        let mut scorer_ids = Vec::new();
        let mut scorer_index = HashMap::new();
        let mut seen_pairs = HashSet::new();
        for (i, p) in points.iter().enumerate() {
            let line = i + 1;
            if p.representation.len() != dim {
                return Err(Error::InconsistentDimension {
                    line,
                    expected: dim,
                    found: p.representation.len(),
                });
            }
            if p.representation.iter().any(|v| !v.is_finite()) {
                return Err(Error::MalformedLine {
                    line,
                    message: "non-finite representation entry".into(),
                });
            }
            if !scale.contains(p.score) {
                return Err(Error::ScoreOutOfRange {
                    line,
                    score: p.score as i64,
                    min: scale.min_score as i64,
                    max: scale.max_score as i64,
                });
            }
            if !seen_pairs.insert((p.pair_id.clone(), p.scorer_id.clone())) {
                return Err(Error::DuplicatePair {
                    line,
                    pair_id: p.pair_id.clone(),
                    scorer_id: p.scorer_id.clone(),
                });
            }
            if !scorer_index.contains_key(&p.scorer_id) {
                scorer_index.insert(p.scorer_id.clone(), scorer_ids.len());
                scorer_ids.push(p.scorer_id.clone());
            }
        }
        Ok(Dataset {
            scale,
            points,
            scorer_ids,
            scorer_index,
            dim,
        })
    }

    pub fn scale(&self) -> ScoreScale {
        self.scale
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Representation dimension D.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of distinct scorers J.
    pub fn num_scorers(&self) -> usize {
        self.scorer_ids.len()
    }

    pub fn scorer_ids(&self) -> &[String] {
        &self.scorer_ids
    }

    pub fn scorer_id(&self, j: usize) -> &str {
        &self.scorer_ids[j]
    }

    pub fn scorer_index(&self, scorer_id: &str) -> Option<usize> {
        self.scorer_index.get(scorer_id).copied()
    }

    /// Dense scorer index of the point at `idx`.
    pub fn scorer_of(&self, idx: usize) -> usize {
        self.scorer_index[&self.points[idx].scorer_id]
    }

    /// Point indices grouped per scorer, in dataset order.
    pub fn points_by_scorer(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_scorers()];
        for idx in 0..self.points.len() {
            groups[self.scorer_of(idx)].push(idx);
        }
        groups
    }
}

/// Loads a dataset from a UTF-8 JSONL file.
///
/// Each line holds one object with keys `pair_id`, `scorer_id`, `score`,
/// `representation` and (optionally) `features`; missing features default to
/// zeros. The representation dimension is inferred from the first record and
/// enforced on the rest.
pub fn load_dataset(path: impl AsRef<Path>, scale: ScoreScale) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut points = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let text = line?;
        let record: JsonRecord =
            serde_json::from_str(&text).map_err(|e| Error::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })?;
        if record.score < i64::from(i32::MIN) || record.score > i64::from(i32::MAX) {
            return Err(Error::ScoreOutOfRange {
                line: line_no,
                score: record.score,
                min: scale.min_score as i64,
                max: scale.max_score as i64,
            });
        }
        points.push(DataPoint {
            pair_id: record.pair_id,
            scorer_id: record.scorer_id,
            score: record.score as i32,
            representation: record.representation,
            features: record.features.unwrap_or_default(),
        });
    }
    Dataset::from_points(scale, points)
}

/// Writes a dataset back to JSONL with full round-trip float precision.
///
/// Saving and re-loading reproduces the dataset exactly, and saving the
/// re-loaded dataset reproduces the file byte for byte.
pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for p in &ds.points {
        let record = JsonRecord {
            pair_id: p.pair_id.clone(),
            scorer_id: p.scorer_id.clone(),
            score: p.score as i64,
            representation: p.representation.clone(),
            features: Some(p.features),
        };
        serde_json::to_writer(&mut file, &record)?;
        file.write_all(b"\n")?;
    }
    file.flush()?;
    Ok(())
}

/// Drops every scorer with fewer than `min_count` points (inclusive
/// threshold: a scorer with exactly `min_count` points is kept).
///
/// Point order is preserved and the scorer index is re-densified over the
/// survivors. Applying the same filter twice is a no-op.
pub fn filter_sparse_scorers(ds: &Dataset, min_count: usize) -> Result<Dataset> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for p in &ds.points {
        *counts.entry(p.scorer_id.as_str()).or_insert(0) += 1;
    }
    let points: Vec<DataPoint> = ds
        .points
        .iter()
        .filter(|p| counts[p.scorer_id.as_str()] >= min_count)
        .cloned()
        .collect();
    if points.is_empty() {
        return Err(Error::NoScorersSurvive { min_count });
    }
    Dataset::from_points(ds.scale, points)
}

/// Assignment of every data point to one of `k` folds.
///
/// Within each scorer the points are balanced across folds to within one,
/// so for any choice of held-out (test, validation) fold pair every scorer
/// with at least 3 points still appears in the remaining training folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold index per data point, aligned with dataset order.
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    /// Point indices assigned to `fold`.
    pub fn fold_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    /// Point indices outside both `test` and `val` folds, in dataset order.
    pub fn train_indices(&self, test: usize, val: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != test && self.assignment[i] != val)
            .collect()
    }
}

/// Plans `k` folds by shuffling each scorer's points under `seed` and
/// dealing them round-robin across folds from a random starting fold.
///
/// Per-scorer round-robin guarantees that a scorer with `n` points occupies
/// `min(n, k)` distinct folds, so any scorer with at least 3 points is
/// present in the training folds of every (test, validation) split.
pub fn make_folds(ds: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 3 {
        return Err(Error::TooFewFolds { k });
    }
    for (j, group) in ds.points_by_scorer().iter().enumerate() {
        if group.len() < 3 {
            return Err(Error::TooFewPointsForFolds {
                scorer_id: ds.scorer_id(j).to_string(),
                count: group.len(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; ds.len()];
    for group in ds.points_by_scorer() {
        let mut idxs = group;
        idxs.shuffle(&mut rng);
        let start = rng.random_range(0..k);
        for (offset, idx) in idxs.into_iter().enumerate() {
            assignment[idx] = (start + offset) % k;
        }
    }
    Ok(FoldPlan { k, assignment, seed })
}

/// Summary statistics of one scorer's observed behavior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerStats {
    /// Dense scorer index.
    pub j: usize,
    /// Number of points scored by this scorer.
    pub n: usize,
    pub mean_score: f64,
    /// Population standard deviation (divide by n).
    pub std_score: f64,
    /// Relative frequency of each score category; sums to 1.
    pub category_freq: Vec<f64>,
    /// `category_freq` shifted to zero mean, for visual comparison against
    /// learned bias vectors.
    pub normalized_dist: Vec<f64>,
    pub feature_means: ResponseFeatures,
}

/// Computes [`ScorerStats`] for scorer `j` over its own points.
pub fn scorer_summary(ds: &Dataset, j: usize) -> Result<ScorerStats> {
    if j >= ds.num_scorers() {
        return Err(Error::ScorerOutOfRange {
            index: j,
            count: ds.num_scorers(),
        });
    }
    let c = ds.scale.num_categories();
    let mut n = 0usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut counts = vec![0usize; c];
    let mut feat = ResponseFeatures::default();
    for idx in 0..ds.len() {
        if ds.scorer_of(idx) != j {
            continue;
        }
        let p = &ds.points[idx];
        n += 1;
        let s = p.score as f64;
        sum += s;
        sum_sq += s * s;
        counts[ds.scale.category_of(p.score)] += 1;
        feat.math_token_pct += p.features.math_token_pct;
        feat.image_pct += p.features.image_pct;
        feat.token_length += p.features.token_length;
    }
    debug_assert!(n > 0, "every indexed scorer has at least one point");
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0);
    let category_freq: Vec<f64> = counts.iter().map(|&k| k as f64 / nf).collect();
    let freq_mean = category_freq.iter().sum::<f64>() / c as f64;
    let normalized_dist: Vec<f64> = category_freq.iter().map(|f| f - freq_mean).collect();
    Ok(ScorerStats {
        j,
        n,
        mean_score: mean,
        std_score: var.sqrt(),
        category_freq,
        normalized_dist,
        feature_means: ResponseFeatures {
            math_token_pct: feat.math_token_pct / nf,
            image_pct: feat.image_pct / nf,
            token_length: feat.token_length / nf,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn point(pair: &str, scorer: &str, score: i32, rep: Vec<f64>) -> DataPoint {
        DataPoint {
            pair_id: pair.into(),
            scorer_id: scorer.into(),
            score,
            representation: rep,
            features: ResponseFeatures::default(),
        }
    }

    fn toy_jsonl() -> String {
        [
            r#"{"pair_id":"p1","scorer_id":"a","score":3,"representation":[0.1,0.2,0.3,0.4],"features":{"math_token_pct":10.0,"image_pct":0.0,"token_length":12.0}}"#,
            r#"{"pair_id":"p2","scorer_id":"b","score":0,"representation":[1.0,0.0,0.0,0.0]}"#,
            r#"{"pair_id":"p3","scorer_id":"a","score":4,"representation":[0.5,0.5,0.5,0.5]}"#,
        ]
        .join("\n")
    }

    #[test]
    fn load_three_line_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.jsonl");
        std::fs::write(&path, toy_jsonl()).unwrap();
        let ds = load_dataset(&path, ScoreScale::zero_to_four()).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.dim(), 4);
        assert_eq!(ds.num_scorers(), 2);
        // first-appearance order
        assert_eq!(ds.scorer_id(0), "a");
        assert_eq!(ds.scorer_id(1), "b");
        assert_eq!(ds.points()[0].pair_id, "p1");
        // missing features default to zeros
        assert_eq!(ds.points()[1].features, ResponseFeatures::default());
    }

    #[test]
    fn score_out_of_range_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(
            &path,
            r#"{"pair_id":"p1","scorer_id":"a","score":7,"representation":[0.0]}"#,
        )
        .unwrap();
        let err = load_dataset(&path, ScoreScale::zero_to_four()).unwrap_err();
        assert!(matches!(err, Error::ScoreOutOfRange { line: 1, score: 7, .. }));
        assert!(err.to_string().contains("score out of range"));
    }

    #[test]
    fn inconsistent_dimension_is_rejected() {
        let mixed = [
            r#"{"pair_id":"p1","scorer_id":"a","score":1,"representation":[0.0,0.0,0.0,0.0]}"#,
            r#"{"pair_id":"p2","scorer_id":"a","score":1,"representation":[0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0]}"#,
        ]
        .join("\n");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mixed.jsonl");
        std::fs::write(&path, mixed).unwrap();
        let err = load_dataset(&path, ScoreScale::zero_to_four()).unwrap_err();
        assert!(matches!(
            err,
            Error::InconsistentDimension { line: 2, expected: 4, found: 8 }
        ));
        assert!(err.to_string().contains("inconsistent dimension"));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.jsonl");
        std::fs::write(&path, format!("{}\nnot json", toy_jsonl().lines().next().unwrap()))
            .unwrap();
        let err = load_dataset(&path, ScoreScale::zero_to_four()).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 2, .. }));
    }

    #[test]
    fn duplicate_pair_scorer_is_rejected() {
        let dup = [
            r#"{"pair_id":"p1","scorer_id":"a","score":1,"representation":[0.0]}"#,
            r#"{"pair_id":"p1","scorer_id":"a","score":2,"representation":[0.0]}"#,
        ]
        .join("\n");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.jsonl");
        std::fs::write(&path, dup).unwrap();
        let err = load_dataset(&path, ScoreScale::zero_to_four()).unwrap_err();
        assert!(matches!(err, Error::DuplicatePair { line: 2, .. }));
    }

    #[test]
    fn save_load_round_trips_bit_identically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.jsonl");
        std::fs::write(&path, toy_jsonl()).unwrap();
        let ds = load_dataset(&path, ScoreScale::zero_to_four()).unwrap();

        let out1 = dir.path().join("out1.jsonl");
        save_dataset(&ds, &out1).unwrap();
        let ds2 = load_dataset(&out1, ScoreScale::zero_to_four()).unwrap();
        assert_eq!(ds, ds2);

        let out2 = dir.path().join("out2.jsonl");
        save_dataset(&ds2, &out2).unwrap();
        assert_eq!(
            std::fs::read(&out1).unwrap(),
            std::fs::read(&out2).unwrap()
        );
    }

    #[test]
    fn filter_threshold_is_inclusive_and_idempotent() {
        let mut points = Vec::new();
        for i in 0..150 {
            points.push(point(&format!("a{i}"), "a", 2, vec![0.0]));
        }
        for i in 0..50 {
            points.push(point(&format!("b{i}"), "b", 3, vec![0.0]));
        }
        let ds = Dataset::from_points(ScoreScale::zero_to_four(), points).unwrap();
        let filtered = filter_sparse_scorers(&ds, 100).unwrap();
        assert_eq!(filtered.num_scorers(), 1);
        assert_eq!(filtered.scorer_id(0), "a");
        assert_eq!(filtered.len(), 150);

        // exactly at the threshold is kept
        let exact: Vec<DataPoint> =
            (0..100).map(|i| point(&format!("a{i}"), "a", 2, vec![0.0])).collect();
        let ds_exact = Dataset::from_points(ScoreScale::zero_to_four(), exact).unwrap();
        let kept = filter_sparse_scorers(&ds_exact, 100).unwrap();
        assert_eq!(kept.num_scorers(), 1);

        // idempotent
        let twice = filter_sparse_scorers(&filtered, 100).unwrap();
        assert_eq!(filtered, twice);

        // relative point order preserved
        let expected: Vec<String> = (0..150).map(|i| format!("a{i}")).collect();
        let got: Vec<&str> = filtered.points().iter().map(|p| p.pair_id.as_str()).collect();
        assert_eq!(got, expected.iter().map(String::as_str).collect::<Vec<_>>());
    }

    #[test]
    fn filter_can_leave_nothing() {
        let ds = Dataset::from_points(
            ScoreScale::zero_to_four(),
            vec![point("p1", "a", 1, vec![0.0])],
        )
        .unwrap();
        let err = filter_sparse_scorers(&ds, 100).unwrap_err();
        assert!(matches!(err, Error::NoScorersSurvive { min_count: 100 }));
    }

    fn grid_dataset(scorers: usize, per_scorer: usize) -> Dataset {
        let mut points = Vec::new();
        for s in 0..scorers {
            for i in 0..per_scorer {
                points.push(point(
                    &format!("s{s}p{i}"),
                    &format!("s{s}"),
                    (i % 5) as i32,
                    vec![i as f64],
                ));
            }
        }
        Dataset::from_points(ScoreScale::zero_to_four(), points).unwrap()
    }

    #[test]
    fn folds_balance_per_scorer_and_cover_all_splits() {
        let ds = grid_dataset(10, 100);
        let plan = make_folds(&ds, 10, 42).unwrap();
        // 100 points over 10 folds: exactly 10 per fold per scorer
        for group in ds.points_by_scorer() {
            let mut counts = vec![0usize; 10];
            for idx in group {
                counts[plan.assignment[idx]] += 1;
            }
            assert!(counts.iter().all(|&c| c == 10));
        }
        // every scorer survives any (test, val) removal
        for t in 0..10 {
            for v in 0..10 {
                if t == v {
                    continue;
                }
                let train = plan.train_indices(t, v);
                let mut seen = vec![false; ds.num_scorers()];
                for idx in train {
                    seen[ds.scorer_of(idx)] = true;
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
    }

    #[test]
    fn folds_reject_scorers_with_two_points() {
        let mut points = vec![
            point("p1", "tiny", 0, vec![0.0]),
            point("p2", "tiny", 1, vec![0.0]),
        ];
        for i in 0..20 {
            points.push(point(&format!("q{i}"), "big", 2, vec![0.0]));
        }
        let ds = Dataset::from_points(ScoreScale::zero_to_four(), points).unwrap();
        let err = make_folds(&ds, 10, 0).unwrap_err();
        match err {
            Error::TooFewPointsForFolds { scorer_id, count } => {
                assert_eq!(scorer_id, "tiny");
                assert_eq!(count, 2);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn folds_are_deterministic() {
        let ds = grid_dataset(4, 17);
        let a = make_folds(&ds, 5, 7).unwrap();
        let b = make_folds(&ds, 5, 7).unwrap();
        assert_eq!(a, b);
        let c = make_folds(&ds, 5, 8).unwrap();
        assert_ne!(a.assignment, c.assignment);
    }

    #[test]
    fn summary_constant_scores() {
        let points: Vec<DataPoint> =
            (0..4).map(|i| point(&format!("p{i}"), "a", 4, vec![0.0])).collect();
        let ds = Dataset::from_points(ScoreScale::zero_to_four(), points).unwrap();
        let stats = scorer_summary(&ds, 0).unwrap();
        assert_eq!(stats.n, 4);
        assert_abs_diff_eq!(stats.mean_score, 4.0);
        assert_abs_diff_eq!(stats.std_score, 0.0);
        assert_eq!(stats.category_freq, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        for (got, want) in stats.normalized_dist.iter().zip([-0.2, -0.2, -0.2, -0.2, 0.8]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn summary_two_extremes() {
        // hand oracle: scores [0, 4] -> mean 2, population std 2
        let points = vec![point("p1", "a", 0, vec![0.0]), point("p2", "a", 4, vec![0.0])];
        let ds = Dataset::from_points(ScoreScale::zero_to_four(), points).unwrap();
        let stats = scorer_summary(&ds, 0).unwrap();
        assert_abs_diff_eq!(stats.mean_score, 2.0);
        assert_abs_diff_eq!(stats.std_score, 2.0);
        assert_eq!(stats.category_freq, vec![0.5, 0.0, 0.0, 0.0, 0.5]);
        assert_abs_diff_eq!(stats.normalized_dist.iter().sum::<f64>(), 0.0, epsilon = 1e-12);
    }
}
