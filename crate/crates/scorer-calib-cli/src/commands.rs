//! Subcommand implementations.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::Context;
use serde::Serialize;

use scorer_calib::analysis::{
    case_study, cluster_profiles, correlation_matrix, fit_gmm, pca_2d, scorer_variables,
    scorer_variables_content,
};
use scorer_calib::data::{
    filter_sparse_scorers, load_dataset, make_folds, save_dataset, Dataset, ScoreScale,
};
use scorer_calib::head::{Checkpoint, HeadKind, ScoringHead};
use scorer_calib::loss::LossKind;
use scorer_calib::metrics::{evaluate, KappaWeighting};
use scorer_calib::optim::{cross_validate, train, CvSummary, TrainConfig};
use scorer_calib::synth::{
    default_archetypes_with_magnitude, generate, SynthConfig,
};

use crate::args::*;
use crate::config;
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Data(e.into())
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Data)
}

fn write_or_print(path: Option<&PathBuf>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(path) => write_output(path, contents),
        None => {
            print!("{contents}");
            std::io::stdout().flush().map_err(data_err)
        }
    }
}

fn load_data(args: &DataArgs) -> Result<Dataset, CliError> {
    let scale = ScoreScale::new(args.min_score, args.max_score)
        .map_err(|e| usage(e.to_string()))?;
    let ds = load_dataset(&args.data, scale).map_err(data_err)?;
    if args.min_count > 0 {
        filter_sparse_scorers(&ds, args.min_count).map_err(data_err)
    } else {
        Ok(ds)
    }
}

fn pretty_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(data_err)?;
    text.push('\n');
    Ok(text)
}

/// Worker cap for `cv`, from SCORER_CALIB_THREADS (default 1).
fn worker_threads() -> Result<usize, CliError> {
    match std::env::var("SCORER_CALIB_THREADS") {
        Ok(value) => value
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| usage(format!("SCORER_CALIB_THREADS must be a positive integer, got {value:?}"))),
        Err(_) => Ok(1),
    }
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

pub fn run_synth(args: SynthArgs) -> Result<(), CliError> {
    let file = config::load(args.config.as_deref())?;
    let section = file.synth;

    let preset = args
        .preset
        .or(section.preset)
        .unwrap_or_else(|| "table3".to_string());
    let seed = args.seed.or(section.seed).unwrap_or(7);
    let mut cfg = match preset.as_str() {
        "table3" => SynthConfig::table3(seed),
        "null" => SynthConfig::null_control(seed),
        other => return Err(usage(format!("unknown preset {other:?} (expected table3 or null)"))),
    };
    if let Some(n) = args.scorers.or(section.scorers) {
        cfg.n_scorers = n;
    }
    if let Some(n) = args.pairs.or(section.pairs) {
        cfg.n_pairs = n;
    }
    if let Some(n) = args.responses_per_scorer.or(section.responses_per_scorer) {
        cfg.responses_per_scorer = n;
    }
    if let Some(d) = args.dim.or(section.dim) {
        cfg.d = d;
    }
    if let Some(d) = args.embed_dim.or(section.embed_dim) {
        cfg.d_e = d;
    }
    if let Some(c) = args.categories.or(section.categories) {
        cfg.c = c;
    }
    if let Some(s) = args.quality_logit_scale.or(section.quality_logit_scale) {
        cfg.quality_logit_scale = s;
    }
    if let Some(m) = args.bias_magnitude.or(section.bias_magnitude) {
        if preset == "table3" {
            cfg.archetypes =
                default_archetypes_with_magnitude(cfg.c, m).map_err(data_err)?;
        }
    }
    if let Some(j) = args.bias_jitter.or(section.bias_jitter) {
        cfg.bias_jitter = j;
    }
    if let Some(j) = args.alpha_jitter.or(section.alpha_jitter) {
        cfg.alpha_jitter = j;
    }
    if let Some(f) = args.shared_pairs.or(section.shared_pairs) {
        cfg.shared_pair_fraction = f;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let (ds, truth) = generate(&cfg).map_err(data_err)?;
    save_dataset(&ds, &args.out).map_err(data_err)?;
    if let Some(truth_path) = &args.truth {
        truth.save(truth_path).map_err(data_err)?;
    }
    eprintln!(
        "wrote {} points for {} scorers to {}",
        ds.len(),
        ds.num_scorers(),
        args.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// train / cv
// ---------------------------------------------------------------------------

struct ResolvedTrain {
    cfg: TrainConfig,
    k: usize,
}

fn resolve_train(opts: &TrainOpts) -> Result<ResolvedTrain, CliError> {
    let file = config::load(opts.config.as_deref())?;
    let section = file.train;
    let head = opts
        .head
        .clone()
        .or(section.head)
        .ok_or_else(|| usage("--head is required (universal | scorer | content)"))?;
    let loss = opts
        .loss
        .clone()
        .or(section.loss)
        .ok_or_else(|| usage("--loss is required (ce | oll | mse)"))?;
    let head = HeadKind::from_str(&head).map_err(|e| usage(e.to_string()))?;
    let loss = LossKind::from_str(&loss).map_err(|e| usage(e.to_string()))?;
    let kappa = match opts.kappa.clone().or(section.kappa) {
        Some(value) => KappaWeighting::from_str(&value).map_err(|e| usage(e.to_string()))?,
        None => KappaWeighting::Quadratic,
    };
    let cfg = TrainConfig {
        lr: opts.lr.or(section.lr).unwrap_or(1e-5),
        batch_size: opts.batch.or(section.batch).unwrap_or(16),
        epochs: opts.epochs.or(section.epochs).unwrap_or(10),
        seed: opts.seed.or(section.seed).unwrap_or(0),
        d_e: opts.d_e.or(section.d_e),
        kappa_weighting: kappa,
        ..TrainConfig::new(head, loss)
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let k = opts.k.or(section.k).unwrap_or(10);
    if k < 3 {
        return Err(usage(format!("--k must be at least 3, got {k}")));
    }
    Ok(ResolvedTrain { cfg, k })
}

pub fn run_train(args: TrainArgs) -> Result<(), CliError> {
    let resolved = resolve_train(&args.opts)?;
    let k = resolved.k;
    let test_fold = args.test_fold.unwrap_or(k - 1);
    let val_fold = args.val_fold.unwrap_or(k - 2);
    if test_fold == val_fold {
        return Err(usage("--test-fold and --val-fold must differ"));
    }
    if test_fold >= k || val_fold >= k {
        return Err(usage(format!("fold indices must lie below k = {k}")));
    }
    let ds = load_data(&args.data)?;
    let folds = make_folds(&ds, k, resolved.cfg.seed).map_err(data_err)?;
    let (head, report) = train(&ds, &folds, test_fold, val_fold, &resolved.cfg).map_err(data_err)?;

    let ckpt = Checkpoint::new(head, ds.scale(), ds.scorer_ids().to_vec());
    ckpt.save(&args.out).map_err(data_err)?;
    if let Some(report_path) = &args.report {
        write_output(report_path, &pretty_json(&report)?)?;
    }
    eprintln!(
        "trained {}/{} (best epoch {}, test kappa_{} = {:.4}) in {:.1}s",
        report.head.as_str(),
        report.loss.as_str(),
        report.best_epoch,
        resolved.cfg.kappa_weighting.as_str(),
        report.test.kappa(resolved.cfg.kappa_weighting),
        report.wall_time_secs
    );
    Ok(())
}

fn float(value: f64) -> String {
    format!("{value}")
}

fn cv_csv_row(head: HeadKind, loss: LossKind, summary: &CvSummary, kappa: KappaWeighting) -> String {
    let k = summary.kappa(kappa);
    format!(
        "{},{},{},{},{},{},{},{},{}\n",
        head.as_str(),
        loss.as_str(),
        float(summary.auc.mean),
        float(summary.auc.std),
        float(summary.rmse.mean),
        float(summary.rmse.std),
        float(k.mean),
        float(k.std),
        kappa.as_str()
    )
}

const CV_CSV_HEADER: &str =
    "head,loss,auc_mean,auc_std,rmse_mean,rmse_std,kappa_mean,kappa_std,kappa_weighting\n";

pub fn run_cv(args: CvArgs) -> Result<(), CliError> {
    let resolved = resolve_train(&args.opts)?;
    let ds = load_data(&args.data)?;
    let threads = worker_threads()?;
    let result = cross_validate(&ds, resolved.k, &resolved.cfg, threads).map_err(data_err)?;

    let mut csv = String::from(CV_CSV_HEADER);
    csv.push_str(&cv_csv_row(
        resolved.cfg.head,
        resolved.cfg.loss,
        &result.summary,
        resolved.cfg.kappa_weighting,
    ));
    write_output(&args.out, &csv)?;
    if let Some(reports_path) = &args.reports {
        write_output(reports_path, &pretty_json(&result.reports)?)?;
    }
    let kappa = result.summary.kappa(resolved.cfg.kappa_weighting);
    eprintln!(
        "cv {}/{} over {} folds: kappa_{} = {:.4} ± {:.4}",
        resolved.cfg.head.as_str(),
        resolved.cfg.loss.as_str(),
        resolved.k,
        resolved.cfg.kappa_weighting.as_str(),
        kappa.mean,
        kappa.std
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EvalOutput {
    auc: f64,
    rmse: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_unweighted: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_linear: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_quadratic: Option<f64>,
}

pub fn run_eval(args: EvalArgs) -> Result<(), CliError> {
    let ckpt = Checkpoint::load(&args.ckpt).map_err(data_err)?;
    let ds = load_dataset(&args.data, ckpt.scale).map_err(data_err)?;
    align_scorers(&ckpt, &ds)?;
    let idxs: Vec<usize> = (0..ds.len()).collect();
    let metrics = evaluate(&ckpt.head, &ds, &idxs).map_err(data_err)?;
    let (unweighted, linear, quadratic) = match args.kappa.as_str() {
        "all" => (true, true, true),
        "unweighted" => (true, false, false),
        "linear" => (false, true, false),
        "quadratic" => (false, false, true),
        other => {
            return Err(usage(format!(
                "unknown kappa selection {other:?} (expected unweighted, linear, quadratic, or all)"
            )))
        }
    };
    let output = EvalOutput {
        auc: metrics.auc,
        rmse: metrics.rmse,
        kappa_unweighted: unweighted.then_some(metrics.kappa_unweighted),
        kappa_linear: linear.then_some(metrics.kappa_linear),
        kappa_quadratic: quadratic.then_some(metrics.kappa_quadratic),
    };
    write_or_print(args.out.as_ref(), &pretty_json(&output)?)
}

/// The checkpoint's scorer table must match the dataset's dense index so
/// per-scorer parameters line up.
fn align_scorers(ckpt: &Checkpoint, ds: &Dataset) -> Result<(), CliError> {
    if ckpt.head.kind() == HeadKind::Universal {
        return Ok(());
    }
    if ckpt.scorer_ids.len() != ds.num_scorers()
        || ckpt
            .scorer_ids
            .iter()
            .zip(ds.scorer_ids())
            .any(|(a, b)| a != b)
    {
        return Err(data_err(anyhow::anyhow!(
            "checkpoint scorer table does not match the dataset (train and evaluate on the same scorer set)"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// cluster
// ---------------------------------------------------------------------------

fn scorer_head_of(ckpt: &Checkpoint) -> Result<&scorer_calib::head::ScorerSpecificHead, CliError> {
    match &ckpt.head {
        ScoringHead::Scorer(head) => Ok(head),
        other => Err(usage(format!(
            "expected a scorer-specific checkpoint, found {}",
            other.kind().as_str()
        ))),
    }
}

const SVG_PALETTE: [&str; 8] = [
    "#4269d0", "#efb118", "#ff725c", "#6cc5b0", "#3ca951", "#ff8ab7", "#a463f2", "#97bbf5",
];

fn scatter_svg(coords: &scorer_calib::math::Mat, labels: &[usize]) -> String {
    let (width, height, margin) = (640.0, 640.0, 40.0);
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for i in 0..coords.rows() {
        min_x = min_x.min(coords.get(i, 0));
        max_x = max_x.max(coords.get(i, 0));
        min_y = min_y.min(coords.get(i, 1));
        max_y = max_y.max(coords.get(i, 1));
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for i in 0..coords.rows() {
        let x = margin + (coords.get(i, 0) - min_x) / span_x * (width - 2.0 * margin);
        // svg y axis points down
        let y = height - margin - (coords.get(i, 1) - min_y) / span_y * (height - 2.0 * margin);
        let color = SVG_PALETTE[labels[i] % SVG_PALETTE.len()];
        svg.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"{color}\" fill-opacity=\"0.85\"><title>cluster {}</title></circle>\n",
            labels[i]
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn csv_opt(value: Option<f64>) -> String {
    value.map(float).unwrap_or_default()
}

pub fn run_cluster(args: ClusterArgs) -> Result<(), CliError> {
    let file = config::load(args.config.as_deref())?;
    let k = args.k.or(file.analysis.k).unwrap_or(6);
    let seed = args.seed.or(file.analysis.seed).unwrap_or(0);

    let ckpt = Checkpoint::load(&args.ckpt).map_err(data_err)?;
    let ds = load_dataset(&args.data, ckpt.scale).map_err(data_err)?;
    align_scorers(&ckpt, &ds)?;
    let head = scorer_head_of(&ckpt)?;

    let gmm = fit_gmm(&head.e, k, seed, 200, 1e-7).map_err(data_err)?;
    let profiles = cluster_profiles(&gmm, head, &ds).map_err(data_err)?;

    let c = ds.scale().num_categories();
    let mut csv = String::from("cluster,n_scorers,n_points,avg_temperature,score_mean,score_std");
    for cat in 0..c {
        csv.push_str(&format!(",bias_{cat}"));
    }
    for cat in 0..c {
        csv.push_str(&format!(",dist_{cat}"));
    }
    csv.push_str(",math_token_pct,image_pct,token_length\n");
    for profile in &profiles {
        csv.push_str(&format!(
            "{},{},{},{},{},{}",
            profile.cluster,
            profile.n_scorers,
            profile.n_points,
            csv_opt(profile.avg_temperature),
            csv_opt(profile.score_mean),
            csv_opt(profile.score_std),
        ));
        for cat in 0..c {
            csv.push(',');
            if let Some(bias) = &profile.avg_bias {
                csv.push_str(&float(bias[cat]));
            }
        }
        for cat in 0..c {
            csv.push(',');
            if let Some(dist) = &profile.avg_normalized_dist {
                csv.push_str(&float(dist[cat]));
            }
        }
        match &profile.feature_means {
            Some(f) => csv.push_str(&format!(
                ",{},{},{}\n",
                float(f.math_token_pct),
                float(f.image_pct),
                float(f.token_length)
            )),
            None => csv.push_str(",,,\n"),
        }
    }
    write_output(&args.out, &csv)?;

    if args.coords.is_some() || args.svg.is_some() {
        let coords = pca_2d(&head.e).map_err(data_err)?;
        let labels = gmm.hard_assignments(&head.e);
        if let Some(coords_path) = &args.coords {
            let mut csv = String::from("scorer_id,x,y,cluster\n");
            for j in 0..ds.num_scorers() {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    ds.scorer_id(j),
                    float(coords.get(j, 0)),
                    float(coords.get(j, 1)),
                    labels[j]
                ));
            }
            write_output(coords_path, &csv)?;
        }
        if let Some(svg_path) = &args.svg {
            write_output(svg_path, &scatter_svg(&coords, &labels))?;
        }
    }
    eprintln!("clustered {} scorers into {k} components", ds.num_scorers());
    Ok(())
}

// ---------------------------------------------------------------------------
// correlate
// ---------------------------------------------------------------------------

pub fn run_correlate(args: CorrelateArgs) -> Result<(), CliError> {
    let ckpt = Checkpoint::load(&args.ckpt).map_err(data_err)?;
    let ds = load_dataset(&args.data, ckpt.scale).map_err(data_err)?;
    align_scorers(&ckpt, &ds)?;
    let columns = match &ckpt.head {
        ScoringHead::Scorer(head) => scorer_variables(head, &ds).map_err(data_err)?,
        ScoringHead::Content(head) => scorer_variables_content(head, &ds).map_err(data_err)?,
        ScoringHead::Universal(_) => {
            return Err(usage(
                "the universal head has no per-scorer parameters to correlate; \
                 pass a scorer-specific or content-driven checkpoint",
            ))
        }
    };
    let report = correlation_matrix(&columns).map_err(data_err)?;
    let mut csv = String::from("var_a,var_b,r,p,n\n");
    for a in 0..report.names.len() {
        for b in (a + 1)..report.names.len() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                report.names[a],
                report.names[b],
                float(report.r.get(a, b)),
                float(report.p.get(a, b)),
                report.n
            ));
        }
    }
    write_output(&args.out, &csv)?;
    eprintln!(
        "correlated {} variables over {} scorers",
        report.names.len(),
        report.n
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// case-study
// ---------------------------------------------------------------------------

pub fn run_case_study(args: CaseStudyArgs) -> Result<(), CliError> {
    let content_ckpt = Checkpoint::load(&args.ckpt).map_err(data_err)?;
    let scorer_ckpt = Checkpoint::load(&args.scorer_ckpt).map_err(data_err)?;
    let content = match &content_ckpt.head {
        ScoringHead::Content(head) => head,
        other => {
            return Err(usage(format!(
                "--ckpt must be a content-driven checkpoint, found {}",
                other.kind().as_str()
            )))
        }
    };
    let scorer_head = match &scorer_ckpt.head {
        ScoringHead::Scorer(head) => head,
        other => {
            return Err(usage(format!(
                "--scorer-ckpt must be a scorer-specific checkpoint, found {}",
                other.kind().as_str()
            )))
        }
    };
    if args.pairs.is_empty() {
        return Err(usage("--pairs needs at least one pair id"));
    }
    let ds = load_dataset(&args.data, content_ckpt.scale).map_err(data_err)?;
    align_scorers(&content_ckpt, &ds)?;
    align_scorers(&scorer_ckpt, &ds)?;
    let report =
        case_study(content, scorer_head, &ds, &args.scorer, &args.pairs).map_err(data_err)?;
    write_or_print(args.out.as_ref(), &pretty_json(&report)?)
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct SummaryRow {
    head: String,
    loss: String,
    auc: (f64, f64),
    rmse: (f64, f64),
    kappa: (f64, f64),
    weighting: String,
}

fn parse_cv_csv(path: &Path) -> Result<Vec<SummaryRow>, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Data)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| data_err(anyhow::anyhow!("{}: empty file", path.display())))?;
    if header.trim() != CV_CSV_HEADER.trim() {
        return Err(data_err(anyhow::anyhow!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(data_err(anyhow::anyhow!(
                "{} line {}: expected 9 fields, found {}",
                path.display(),
                i + 2,
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64, CliError> {
            s.parse::<f64>()
                .map_err(|e| data_err(anyhow::anyhow!("{}: bad number {s:?}: {e}", path.display())))
        };
        rows.push(SummaryRow {
            head: fields[0].to_string(),
            loss: fields[1].to_string(),
            auc: (num(fields[2])?, num(fields[3])?),
            rmse: (num(fields[4])?, num(fields[5])?),
            kappa: (num(fields[6])?, num(fields[7])?),
            weighting: fields[8].to_string(),
        });
    }
    Ok(rows)
}

pub fn run_report(args: ReportArgs) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for input in &args.inputs {
        rows.extend(parse_cv_csv(input)?);
    }
    let head_order = |head: &str| match head {
        "universal" => 0,
        "scorer" => 1,
        "content" => 2,
        _ => 3,
    };
    let loss_order = |loss: &str| match loss {
        "ce" => 0,
        "mse" => 1,
        "oll" => 2,
        _ => 3,
    };
    rows.sort_by_key(|row| (head_order(&row.head), loss_order(&row.loss)));
    let pm = |(mean, std): (f64, f64)| format!("{mean:.3}±{std:.3}");
    let mut csv = String::from("head,loss,auc,rmse,kappa,kappa_weighting\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.head,
            row.loss,
            pm(row.auc),
            pm(row.rmse),
            pm(row.kappa),
            row.weighting
        ));
    }
    write_or_print(args.out.as_ref(), &csv)
}
