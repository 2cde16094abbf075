//! Adam optimizer, epoch-based trainer over a fold plan, and
//! cross-validation with validation-based checkpoint selection.
//!
//! Training is fully deterministic: parameter initialization and the
//! per-epoch reshuffle of training points both draw from one generator
//! seeded by [`TrainConfig::seed`], batches are applied in order, and all
//! accumulation runs in f64. Two runs with the same inputs produce
//! bit-identical parameter trajectories and reports (wall time aside).

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FoldPlan};
use crate::error::{Error, Result};
use crate::head::{HeadKind, ParamGrads, ScoringHead};
use crate::loss::{batch_loss, LossKind};
use crate::metrics::{evaluate, EvalMetrics, KappaWeighting};
use crate::stats::mean_std;

/// Adam state: per-parameter first and second moments plus the step count.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    /// Fresh state for `n` parameters with standard moment decays
    /// (β₁ = 0.9, β₂ = 0.999, ε = 1e-8).
    pub fn new(n: usize, lr: f64) -> AdamState {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One bias-corrected update over parameter slices zipped with gradient
    /// slices. Slice structure must match the state's parameter count.
    pub fn step_slices(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        let total: usize = params.iter().map(|s| s.len()).sum();
        let total_g: usize = grads.iter().map(|s| s.len()).sum();
        if total != self.m.len() || total_g != self.m.len() || params.len() != grads.len() {
            return Err(Error::DimensionMismatch {
                expected: self.m.len(),
                found: total_g,
            });
        }
        self.t += 1;
        let t = self.t as i32;
        let bias1 = 1.0 - self.beta1.powi(t);
        let bias2 = 1.0 - self.beta2.powi(t);
        let mut offset = 0;
        for (pslice, gslice) in params.iter_mut().zip(grads) {
            if pslice.len() != gslice.len() {
                return Err(Error::DimensionMismatch {
                    expected: pslice.len(),
                    found: gslice.len(),
                });
            }
            for (p, &g) in pslice.iter_mut().zip(gslice.iter()) {
                let m = &mut self.m[offset];
                let v = &mut self.v[offset];
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                let m_hat = *m / bias1;
                let v_hat = *v / bias2;
                *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
                offset += 1;
            }
        }
        Ok(())
    }
}

/// Applies one Adam step to a scoring head.
pub fn adam_step(state: &mut AdamState, head: &mut ScoringHead, grads: &ParamGrads) -> Result<()> {
    let mut params = head.param_slices_mut();
    state.step_slices(&mut params, &grads.slices())
}

/// Metric used to pick the best epoch on the validation fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMetric {
    Auc,
    Rmse,
    Kappa,
}

impl SelectionMetric {
    /// Signed score where larger is always better.
    fn score(&self, m: &EvalMetrics, weighting: KappaWeighting) -> f64 {
        match self {
            SelectionMetric::Auc => m.auc,
            SelectionMetric::Rmse => -m.rmse,
            SelectionMetric::Kappa => m.kappa(weighting),
        }
    }
}

/// Hyperparameters and protocol choices for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub head: HeadKind,
    pub loss: LossKind,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Scorer-embedding dimension; defaults to the representation dimension.
    pub d_e: Option<usize>,
    pub selection: SelectionMetric,
    /// Kappa weighting used for selection and summary columns.
    pub kappa_weighting: KappaWeighting,
}

impl TrainConfig {
    pub fn new(head: HeadKind, loss: LossKind) -> TrainConfig {
        TrainConfig {
            head,
            loss,
            lr: 1e-5,
            batch_size: 16,
            epochs: 10,
            seed: 0,
            d_e: None,
            selection: SelectionMetric::Kappa,
            kappa_weighting: KappaWeighting::Quadratic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lr <= 0.0 || !self.lr.is_finite() {
            return Err(Error::InvalidConfig(format!("lr must be positive, got {}", self.lr)));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be positive".into()));
        }
        if self.d_e == Some(0) {
            return Err(Error::InvalidConfig("embedding dimension must be positive".into()));
        }
        Ok(())
    }
}

/// Validation metrics recorded after one epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub train_loss: f64,
    pub val: EvalMetrics,
}

/// Everything produced by one training run.
///
/// Equality ignores `wall_time_secs`, which is also skipped during
/// serialization so that report files are byte-stable across runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub head: HeadKind,
    pub loss: LossKind,
    pub k: usize,
    pub test_fold: usize,
    pub val_fold: usize,
    pub seed: u64,
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch whose checkpoint was returned; 0 means the untrained
    /// initial head (only when training ran for zero epochs).
    pub best_epoch: usize,
    pub test: EvalMetrics,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl PartialEq for TrainReport {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head
            && self.loss == other.loss
            && self.k == other.k
            && self.test_fold == other.test_fold
            && self.val_fold == other.val_fold
            && self.seed == other.seed
            && self.epochs == other.epochs
            && self.best_epoch == other.best_epoch
            && self.test == other.test
    }
}

/// Trains one head on the folds outside `(test_fold, val_fold)`, selecting
/// the epoch checkpoint with the best validation metric (ties keep the
/// earlier epoch). Test metrics are computed once, on the returned head.
pub fn train(
    ds: &Dataset,
    folds: &FoldPlan,
    test_fold: usize,
    val_fold: usize,
    cfg: &TrainConfig,
) -> Result<(ScoringHead, TrainReport)> {
    cfg.validate()?;
    if test_fold == val_fold {
        return Err(Error::InvalidConfig("test and validation folds must differ".into()));
    }
    if test_fold >= folds.k || val_fold >= folds.k {
        return Err(Error::InvalidConfig(format!(
            "fold index out of range (k = {})",
            folds.k
        )));
    }
    if folds.assignment.len() != ds.len() {
        return Err(Error::InvalidConfig("fold plan does not match dataset".into()));
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d_e = cfg.d_e.unwrap_or_else(|| ds.dim());
    let mut head = ScoringHead::init(
        cfg.head,
        ds.scale().num_categories(),
        ds.dim(),
        d_e,
        ds.num_scorers(),
        &mut rng,
    );
    let mut train_idxs = folds.train_indices(test_fold, val_fold);
    let val_idxs = folds.fold_indices(val_fold);
    let test_idxs = folds.fold_indices(test_fold);
    if train_idxs.is_empty() || val_idxs.is_empty() || test_idxs.is_empty() {
        return Err(Error::EmptyBatch);
    }

    let mut adam = AdamState::new(head.num_params(), cfg.lr);
    let mut epochs = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(usize, f64, ScoringHead)> = None;
    for epoch in 1..=cfg.epochs {
        train_idxs.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in train_idxs.chunks(cfg.batch_size) {
            let (value, grads) = batch_loss(cfg.loss, &head, ds, batch)?;
            loss_sum += value * batch.len() as f64;
            adam_step(&mut adam, &mut head, &grads)?;
        }
        let val = evaluate(&head, ds, &val_idxs)?;
        let score = cfg.selection.score(&val, cfg.kappa_weighting);
        epochs.push(EpochRecord {
            train_loss: loss_sum / train_idxs.len() as f64,
            val,
        });
        let improved = best.as_ref().is_none_or(|(_, s, _)| score > *s);
        if improved {
            best = Some((epoch, score, head.clone()));
        }
    }
    let (best_epoch, best_head) = match best {
        Some((epoch, _, checkpoint)) => (epoch, checkpoint),
        // zero-epoch run: the initialized head with evaluation only
        None => (0, head),
    };
    let test = evaluate(&best_head, ds, &test_idxs)?;
    let report = TrainReport {
        head: cfg.head,
        loss: cfg.loss,
        k: folds.k,
        test_fold,
        val_fold,
        seed: cfg.seed,
        epochs,
        best_epoch,
        test,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok((best_head, report))
}

/// Mean and sample standard deviation of one metric across folds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// Cross-fold aggregation of test metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub auc: MeanStd,
    pub rmse: MeanStd,
    pub kappa_unweighted: MeanStd,
    pub kappa_linear: MeanStd,
    pub kappa_quadratic: MeanStd,
}

impl CvSummary {
    pub fn kappa(&self, weighting: KappaWeighting) -> MeanStd {
        match weighting {
            KappaWeighting::Unweighted => self.kappa_unweighted,
            KappaWeighting::Linear => self.kappa_linear,
            KappaWeighting::Quadratic => self.kappa_quadratic,
        }
    }

    fn from_reports(reports: &[TrainReport]) -> CvSummary {
        let collect = |f: &dyn Fn(&EvalMetrics) -> f64| -> MeanStd {
            let xs: Vec<f64> = reports.iter().map(|r| f(&r.test)).collect();
            let (mean, std) = mean_std(&xs);
            MeanStd { mean, std }
        };
        CvSummary {
            auc: collect(&|m| m.auc),
            rmse: collect(&|m| m.rmse),
            kappa_unweighted: collect(&|m| m.kappa_unweighted),
            kappa_linear: collect(&|m| m.kappa_linear),
            kappa_quadratic: collect(&|m| m.kappa_quadratic),
        }
    }
}

/// All fold reports plus their cross-fold summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub reports: Vec<TrainReport>,
    pub summary: CvSummary,
}

/// Runs the full rotation `(test, val) = (k, (k+1) mod K)` for `k` in
/// `0..K`, training one model per rotation, and aggregates test metrics as
/// mean ± sample std.
///
/// `threads` caps worker parallelism; results are identical regardless of
/// thread count and are returned in fold order.
pub fn cross_validate(ds: &Dataset, k: usize, cfg: &TrainConfig, threads: usize) -> Result<CvResult> {
    let folds = crate::data::make_folds(ds, k, cfg.seed)?;
    let rotations: Vec<(usize, usize)> = (0..k).map(|t| (t, (t + 1) % k)).collect();
    let reports = run_rotations(ds, &folds, &rotations, cfg, threads)?;
    let summary = CvSummary::from_reports(&reports);
    Ok(CvResult { reports, summary })
}

fn run_rotations(
    ds: &Dataset,
    folds: &FoldPlan,
    rotations: &[(usize, usize)],
    cfg: &TrainConfig,
    threads: usize,
) -> Result<Vec<TrainReport>> {
    let threads = threads.max(1).min(rotations.len());
    if threads == 1 {
        return rotations
            .iter()
            .map(|&(t, v)| train(ds, folds, t, v, cfg).map(|(_, report)| report))
            .collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<TrainReport>>> = Vec::new();
    slots.resize_with(rotations.len(), || None);
    let slots = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= rotations.len() {
                    break;
                }
                let (t, v) = rotations[i];
                let result = train(ds, folds, t, v, cfg).map(|(_, report)| report);
                slots.lock().unwrap()[i] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .iter_mut()
        .map(|slot| slot.take().expect("every rotation ran"))
        .collect()
}
