//! Experiment configuration, parallel run execution, aggregation, and
//! report rendering.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::LearnerKind;
use crate::corpus::{load_corpus, load_qrels, load_topics, PreparedDoc, Qrels, Tokenizer, Topic};
use crate::error::{Error, Result};
use crate::metrics::{
    macro_prec_recall, paired_t_test, ConfusionCounts, TopicMetrics, ZeroDeliveryPolicy,
};
use crate::sim::{
    load_feedback_replay, run_filtering, FeedbackSource, HarnessSettings, ReplayMap, RunConfig,
    RunEnv, RunResult,
};

/// Input file locations, resolved relative to the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataPaths {
    pub corpus: PathBuf,
    pub topics: PathBuf,
    pub qrels: PathBuf,
    #[serde(default)]
    pub replay: Option<PathBuf>,
}

fn default_seed_docs() -> Vec<usize> {
    vec![0]
}
fn default_learners() -> Vec<LearnerKind> {
    vec![LearnerKind::Baseline, LearnerKind::Gcm]
}
fn default_baseline() -> LearnerKind {
    LearnerKind::Baseline
}
fn default_zero_policy() -> ZeroDeliveryPolicy {
    ZeroDeliveryPolicy::Zero
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}

/// Hyperparameter grid for `sweep`; every combination is evaluated on the
/// tuning topics. Unlisted dimensions stay at the configured settings.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SweepGrid {
    #[serde(default)]
    pub lambda1: Vec<f64>,
    #[serde(default)]
    pub lambda2: Vec<f64>,
    #[serde(default)]
    pub lambda3: Vec<f64>,
    #[serde(default)]
    pub lambda4: Vec<f64>,
    #[serde(default)]
    pub t_suff: Vec<f64>,
    #[serde(default)]
    pub t_nec: Vec<f64>,
    #[serde(default)]
    pub prior_mu: Vec<f64>,
    #[serde(default)]
    pub threshold: Vec<f64>,
}

/// One experiment: a data set, a topic split, and a learner matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: DataPaths,
    /// Topics used only by `sweep`.
    #[serde(default)]
    pub tuning_topics: Vec<String>,
    /// Topics reported by `run`.
    pub testing_topics: Vec<String>,
    #[serde(default = "default_learners")]
    pub learners: Vec<LearnerKind>,
    #[serde(default = "default_seed_docs")]
    pub seed_relevant_docs: Vec<usize>,
    #[serde(default)]
    pub feedback: FeedbackSource,
    #[serde(default)]
    pub settings: HarnessSettings,
    /// Learner the significance marks compare against.
    #[serde(default = "default_baseline")]
    pub significance_baseline: LearnerKind,
    #[serde(default = "default_zero_policy")]
    pub zero_delivery_policy: ZeroDeliveryPolicy,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Worker threads; 0 means one per CPU.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default)]
    pub sweep: SweepGrid,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.testing_topics.is_empty() {
            return Err(Error::InvalidConfig("testing_topics is empty".into()));
        }
        if self.learners.is_empty() {
            return Err(Error::InvalidConfig("learners is empty".into()));
        }
        for t in &self.tuning_topics {
            if self.testing_topics.contains(t) {
                return Err(Error::InvalidConfig(format!(
                    "topic `{t}` appears in both tuning_topics and testing_topics"
                )));
            }
        }
        if self.feedback == FeedbackSource::Replay && self.data.replay.is_none() {
            return Err(Error::InvalidConfig(
                "feedback is replay but data.replay is not set".into(),
            ));
        }
        let s = &self.settings;
        if !(s.threshold > 0.0 && s.threshold < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "threshold {} must be inside (0,1)",
                s.threshold
            )));
        }
        if !(s.train_fraction > 0.0 && s.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train_fraction {} must be inside (0,1)",
                s.train_fraction
            )));
        }
        if s.retrain_every == 0 {
            return Err(Error::InvalidConfig("retrain_every must be ≥ 1".into()));
        }
        if s.pool_size < s.shown_size {
            return Err(Error::InvalidConfig(format!(
                "pool_size {} < shown_size {}",
                s.pool_size, s.shown_size
            )));
        }
        s.gcm.validate()?;
        s.refs.validate()?;
        Ok(())
    }
}

/// Load a config file, resolving relative data paths against its parent
/// directory.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
    if let Some(base) = path.parent() {
        let resolve = |p: &PathBuf| {
            if p.is_relative() {
                base.join(p)
            } else {
                p.clone()
            }
        };
        cfg.data.corpus = resolve(&cfg.data.corpus);
        cfg.data.topics = resolve(&cfg.data.topics);
        cfg.data.qrels = resolve(&cfg.data.qrels);
        cfg.data.replay = cfg.data.replay.as_ref().map(&resolve);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Everything loaded from disk, prepared once and shared by all runs.
pub struct LoadedData {
    pub prepared: Vec<PreparedDoc>,
    pub topics: Vec<Topic>,
    pub qrels: Qrels,
    pub tokenizer: Tokenizer,
    pub replay: Option<ReplayMap>,
}

impl LoadedData {
    pub fn env(&self) -> RunEnv<'_> {
        RunEnv {
            prepared: &self.prepared,
            topics: &self.topics,
            qrels: &self.qrels,
            tokenizer: &self.tokenizer,
            replay: self.replay.as_ref(),
        }
    }
}

pub fn load_data(cfg: &ExperimentConfig) -> Result<LoadedData> {
    let corpus = load_corpus(&cfg.data.corpus)?;
    let topics = load_topics(&cfg.data.topics)?;
    let qrels = load_qrels(&cfg.data.qrels)?;
    let tokenizer = Tokenizer::default();
    for t in cfg.tuning_topics.iter().chain(cfg.testing_topics.iter()) {
        if !topics.iter().any(|topic| &topic.topic_id == t) {
            return Err(Error::UnknownTopic(t.clone()));
        }
    }
    let prepared: Vec<PreparedDoc> = corpus
        .docs
        .iter()
        .map(|d| PreparedDoc::from_document(d, &tokenizer))
        .collect();
    let replay = match &cfg.data.replay {
        Some(p) => Some(load_feedback_replay(p)?),
        None => None,
    };
    Ok(LoadedData {
        prepared,
        topics,
        qrels,
        tokenizer,
        replay,
    })
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// Aggregate results of one (learner, seed count) cell over all topics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArmSummary {
    pub learner: LearnerKind,
    pub seed_relevant_docs: usize,
    pub macro_t11su: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub mean_t11u: f64,
    /// Two-sided paired t-test p-value of per-topic T11SU against the
    /// significance baseline; None for the baseline itself or when the
    /// test is degenerate.
    pub p_vs_baseline: Option<f64>,
    pub topics: Vec<TopicMetrics>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub feedback: FeedbackSource,
    pub significance_baseline: LearnerKind,
    pub arms: Vec<ArmSummary>,
}

fn arm_from_runs(
    learner: LearnerKind,
    seed_docs: usize,
    runs: &[RunResult],
    policy: ZeroDeliveryPolicy,
) -> ArmSummary {
    let topics: Vec<TopicMetrics> = runs
        .iter()
        .map(|r| TopicMetrics {
            topic_id: r.topic_id.clone(),
            t11u: r.t11u,
            t11su: r.t11su,
            precision: r.precision,
            recall: r.recall,
            delivered: r.counts.delivered(),
        })
        .collect();
    let counts: Vec<ConfusionCounts> = runs.iter().map(|r| r.counts).collect();
    let (p, rc) = macro_prec_recall(&counts, policy);
    let sus: Vec<f64> = runs.iter().filter_map(|r| r.t11su).collect();
    let macro_t11su = if sus.is_empty() {
        0.0
    } else {
        sus.iter().sum::<f64>() / sus.len() as f64
    };
    let mean_t11u = if runs.is_empty() {
        0.0
    } else {
        runs.iter().map(|r| r.t11u as f64).sum::<f64>() / runs.len() as f64
    };
    ArmSummary {
        learner,
        seed_relevant_docs: seed_docs,
        macro_t11su,
        macro_precision: p,
        macro_recall: rc,
        mean_t11u,
        p_vs_baseline: None,
        topics,
    }
}

/// Per-topic T11SU pairs shared by two arms (topics undefined in either
/// arm are dropped).
fn paired_t11su(a: &ArmSummary, b: &ArmSummary) -> (Vec<f64>, Vec<f64>) {
    let index: BTreeMap<&str, f64> = b
        .topics
        .iter()
        .filter_map(|t| t.t11su.map(|v| (t.topic_id.as_str(), v)))
        .collect();
    let mut va = Vec::new();
    let mut vb = Vec::new();
    for t in &a.topics {
        if let (Some(x), Some(y)) = (t.t11su, index.get(t.topic_id.as_str())) {
            va.push(x);
            vb.push(*y);
        }
    }
    (va, vb)
}

/// Execute learner × seed-count × topic runs and aggregate. Runs are
/// independent and fan out across the thread pool; output order follows
/// the configuration, so results are deterministic regardless of `jobs`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    data: &LoadedData,
    topics: &[String],
) -> Result<ExperimentResults> {
    let mut run_configs = Vec::new();
    for learner in &cfg.learners {
        for seed_docs in &cfg.seed_relevant_docs {
            for topic in topics {
                run_configs.push(RunConfig {
                    topic_id: topic.clone(),
                    learner: *learner,
                    seed_relevant_docs: *seed_docs,
                    feedback: cfg.feedback,
                    settings: cfg.settings.clone(),
                });
            }
        }
    }

    let env = data.env();
    let results: Vec<RunResult> = run_configs
        .par_iter()
        .map(|rc| run_filtering(rc, &env))
        .collect::<Result<_>>()?;

    let per_arm = topics.len();
    let mut arms = Vec::new();
    let mut idx = 0;
    for learner in &cfg.learners {
        for seed_docs in &cfg.seed_relevant_docs {
            let runs = &results[idx..idx + per_arm];
            idx += per_arm;
            arms.push(arm_from_runs(
                *learner,
                *seed_docs,
                runs,
                cfg.zero_delivery_policy,
            ));
        }
    }

    // significance against the baseline arm with the same seed count
    let baselines: BTreeMap<usize, ArmSummary> = arms
        .iter()
        .filter(|a| a.learner == cfg.significance_baseline)
        .map(|a| (a.seed_relevant_docs, a.clone()))
        .collect();
    for arm in &mut arms {
        if arm.learner == cfg.significance_baseline {
            continue;
        }
        if let Some(base) = baselines.get(&arm.seed_relevant_docs) {
            let (va, vb) = paired_t11su(arm, base);
            match paired_t_test(&va, &vb) {
                Ok(p) => arm.p_vs_baseline = Some(p),
                Err(e) => log::warn!(
                    "t-test degenerate for {} (seeds={}): {e}",
                    arm.learner.tag(),
                    arm.seed_relevant_docs
                ),
            }
        }
    }

    Ok(ExperimentResults {
        feedback: cfg.feedback,
        significance_baseline: cfg.significance_baseline,
        arms,
    })
}

/// Run inside a dedicated rayon pool of `jobs` threads (0 = default).
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(f)
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Aligned text table with ↑/↓ marks at p < 0.05 against the baseline.
pub fn render_report(results: &ExperimentResults) -> String {
    let baseline_su: BTreeMap<usize, f64> = results
        .arms
        .iter()
        .filter(|a| a.learner == results.significance_baseline)
        .map(|a| (a.seed_relevant_docs, a.macro_t11su))
        .collect();

    let mut out = String::new();
    out.push_str(&format!(
        "{:<10} {:>5} {:>8} {:>8} {:>8} {:>9} {:>10}  sig\n",
        "learner", "seeds", "T11SU", "prec", "recall", "meanT11U", "p-value"
    ));
    out.push_str(&"-".repeat(68));
    out.push('\n');
    for arm in &results.arms {
        let p_str = arm
            .p_vs_baseline
            .map(|p| format!("{p:.4}"))
            .unwrap_or_else(|| "-".to_string());
        let mark = match (arm.p_vs_baseline, baseline_su.get(&arm.seed_relevant_docs)) {
            (Some(p), Some(base)) if p < SIGNIFICANCE_LEVEL => {
                if arm.macro_t11su > *base {
                    "↑"
                } else {
                    "↓"
                }
            }
            _ => "",
        };
        out.push_str(&format!(
            "{:<10} {:>5} {:>8.4} {:>8.4} {:>8.4} {:>9.2} {:>10}  {}\n",
            arm.learner.tag(),
            arm.seed_relevant_docs,
            arm.macro_t11su,
            arm.macro_precision,
            arm.macro_recall,
            arm.mean_t11u,
            p_str,
            mark
        ));
    }
    out.push_str(&format!(
        "\nbaseline for significance: {}; marks at p < {}\n",
        results.significance_baseline.tag(),
        SIGNIFICANCE_LEVEL
    ));
    out
}

pub fn write_results(out_dir: &Path, results: &ExperimentResults) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let json = serde_json::to_string_pretty(results)?;
    let path = out_dir.join("results.json");
    fs::write(&path, json).map_err(|e| Error::Io { path, source: e })?;
    let path = out_dir.join("report.txt");
    fs::write(&path, render_report(results)).map_err(|e| Error::Io { path, source: e })?;
    Ok(())
}

pub fn read_results(out_dir: &Path) -> Result<ExperimentResults> {
    let path = out_dir.join("results.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::Io { path, source: e })?;
    Ok(serde_json::from_str(&text)?)
}

// ---------------------------------------------------------------------------
// Hyperparameter sweep
// ---------------------------------------------------------------------------

/// One grid point; unset dimensions inherit the configured settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub t_suff: f64,
    pub t_nec: f64,
    pub prior_mu: f64,
    pub threshold: f64,
}

impl SweepPoint {
    fn apply(&self, s: &HarnessSettings) -> HarnessSettings {
        let mut s = s.clone();
        s.gcm.lambda1 = self.lambda1;
        s.gcm.lambda2 = self.lambda2;
        s.gcm.lambda3 = self.lambda3;
        s.gcm.lambda4 = self.lambda4;
        s.refs.default_t_suff = self.t_suff;
        s.refs.default_t_nec = self.t_nec;
        s.prior_mu = self.prior_mu;
        s.threshold = self.threshold;
        s
    }
}

fn axis(vals: &[f64], fallback: f64) -> Vec<f64> {
    if vals.is_empty() {
        vec![fallback]
    } else {
        vals.to_vec()
    }
}

fn grid_points(cfg: &ExperimentConfig) -> Vec<SweepPoint> {
    let s = &cfg.settings;
    let g = &cfg.sweep;
    let mut points = Vec::new();
    for &l1 in &axis(&g.lambda1, s.gcm.lambda1) {
        for &l2 in &axis(&g.lambda2, s.gcm.lambda2) {
            for &l3 in &axis(&g.lambda3, s.gcm.lambda3) {
                for &l4 in &axis(&g.lambda4, s.gcm.lambda4) {
                    for &ts in &axis(&g.t_suff, s.refs.default_t_suff) {
                        for &tn in &axis(&g.t_nec, s.refs.default_t_nec) {
                            for &mu in &axis(&g.prior_mu, s.prior_mu) {
                                for &th in &axis(&g.threshold, s.threshold) {
                                    points.push(SweepPoint {
                                        lambda1: l1,
                                        lambda2: l2,
                                        lambda3: l3,
                                        lambda4: l4,
                                        t_suff: ts,
                                        t_nec: tn,
                                        prior_mu: mu,
                                        threshold: th,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    points
}

/// Best grid point per learner on the tuning topics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub learner: LearnerKind,
    pub best: SweepPoint,
    /// Macro T11SU averaged over seed-count cells.
    pub objective: f64,
    pub points_evaluated: usize,
}

/// Exhaustive grid search maximizing macro T11SU on the tuning topics.
/// Ties keep the first point in grid order.
pub fn run_sweep(cfg: &ExperimentConfig, data: &LoadedData) -> Result<Vec<SweepOutcome>> {
    if cfg.tuning_topics.is_empty() {
        return Err(Error::InvalidConfig(
            "sweep requires non-empty tuning_topics".into(),
        ));
    }
    let points = grid_points(cfg);
    let mut best: BTreeMap<&'static str, (LearnerKind, SweepPoint, f64)> = BTreeMap::new();
    for point in &points {
        let mut point_cfg = cfg.clone();
        point_cfg.settings = point.apply(&cfg.settings);
        let results = run_experiment(&point_cfg, data, &cfg.tuning_topics)?;
        for learner in &cfg.learners {
            let arms: Vec<&ArmSummary> = results
                .arms
                .iter()
                .filter(|a| a.learner == *learner)
                .collect();
            let obj =
                arms.iter().map(|a| a.macro_t11su).sum::<f64>() / arms.len().max(1) as f64;
            let entry = best.entry(learner.tag());
            match entry {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert((*learner, point.clone(), obj));
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    if obj > o.get().2 {
                        o.insert((*learner, point.clone(), obj));
                    }
                }
            }
        }
    }
    // report in the configured learner order
    Ok(cfg
        .learners
        .iter()
        .filter_map(|l| best.get(l.tag()))
        .map(|(l, p, o)| SweepOutcome {
            learner: *l,
            best: p.clone(),
            objective: *o,
            points_evaluated: points.len(),
        })
        .collect())
}

pub fn write_sweep(out_dir: &Path, outcomes: &[SweepOutcome]) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let path = out_dir.join("sweep.json");
    let json = serde_json::to_string_pretty(outcomes)?;
    fs::write(&path, json).map_err(|e| Error::Io { path, source: e })?;
    Ok(())
}
