//! Adaptive filtering protocol for one (topic, learner) run.
//!
//! A run starts from the topic statement plus 0–2 seed relevant documents,
//! applies first-round faceted feedback, then streams the test documents
//! in date order: vectorize → predict → deliver, with immediate relevance
//! feedback on delivered documents and a profile update after each
//! judgment. Once a third of the stream has been processed and at least
//! two documents have been delivered, a single second feedback round fires.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{
    bool_filter, make_pseudo_doc, train_gec, train_l2lr, train_prior, BoolMode, LearnerKind,
};
use crate::candidates::{
    classify_unlabeled, predict_prepared, rank_facet_features, top_candidates, CandidateList,
};
use crate::corpus::{vectorize, vectorize_adhoc, PreparedDoc, Qrels, StreamStats, Tokenizer, Topic};
use crate::error::{Error, Result};
use crate::feature::FeatureId;
use crate::gcm::{gcm_train, FeatureLabelSet, GcmConfig, GcmProblem, ReferenceDistributions};
use crate::metrics::{precision, recall, t11su, t11u, ConfusionCounts, ZeroDeliveryPolicy};
use crate::profile::{
    rocchio_scores, select_profile_features, LabeledDoc, LabeledSet, RocchioCoeffs, UserProfile,
    DEFAULT_DELIVERY_THRESHOLD, DEFAULT_MAX_FACETS, DEFAULT_MAX_TERMS,
};

// ---------------------------------------------------------------------------
// Feedback types
// ---------------------------------------------------------------------------

/// Feature labels from one feedback round.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct FeatureFeedback {
    pub round: u8,
    #[serde(default)]
    pub relevant: Vec<FeatureId>,
    #[serde(default)]
    pub sufficient: Vec<FeatureId>,
    #[serde(default)]
    pub necessary: Vec<FeatureId>,
}

impl FeatureFeedback {
    pub fn is_empty(&self) -> bool {
        self.relevant.is_empty() && self.sufficient.is_empty() && self.necessary.is_empty()
    }

    /// All labeled features.
    pub fn all(&self) -> BTreeSet<FeatureId> {
        self.relevant
            .iter()
            .chain(self.sufficient.iter())
            .chain(self.necessary.iter())
            .cloned()
            .collect()
    }
}

/// One feedback event in a run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeedbackEvent {
    DocJudgment { doc_id: String, relevant: bool },
    FeatureLabels(FeatureFeedback),
}

/// Replayed feature feedback keyed by (topic, round).
pub type ReplayMap = BTreeMap<(String, u8), FeatureFeedback>;

#[derive(Debug, Deserialize)]
struct ReplayEntry {
    topic_id: String,
    round: u8,
    #[serde(default)]
    relevant: Vec<String>,
    #[serde(default)]
    sufficient: Vec<String>,
    #[serde(default)]
    necessary: Vec<String>,
}

fn parse_feature_list(raw: &[String], context: &str) -> Vec<FeatureId> {
    raw.iter()
        .filter_map(|s| {
            let f = FeatureId::facet_from_str(s);
            if f.is_none() {
                log::warn!("{context}: dropping unparseable feature name `{s}`");
            }
            f
        })
        .collect()
}

/// Load a feedback replay file (JSON array; feature strings "facet:value").
pub fn load_feedback_replay(path: &Path) -> Result<ReplayMap> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let entries: Vec<ReplayEntry> = serde_json::from_reader(BufReader::new(file))?;
    let mut map = ReplayMap::new();
    for e in entries {
        if !(e.round == 1 || e.round == 2) {
            return Err(Error::InvalidConfig(format!(
                "replay round must be 1 or 2, got {} for topic {}",
                e.round, e.topic_id
            )));
        }
        let ctx = format!("replay {}:{}", e.topic_id, e.round);
        let fb = FeatureFeedback {
            round: e.round,
            relevant: parse_feature_list(&e.relevant, &ctx),
            sufficient: parse_feature_list(&e.sufficient, &ctx),
            necessary: parse_feature_list(&e.necessary, &ctx),
        };
        if map.insert((e.topic_id.clone(), e.round), fb).is_some() {
            return Err(Error::DuplicateFeedback {
                topic_id: e.topic_id,
                round: e.round,
            });
        }
    }
    Ok(map)
}

/// Interaction mechanism of the simulated user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackTask {
    /// Select "relevant" features (mapped into both label sets).
    Relevant,
    /// Select sufficient and necessary features separately.
    #[default]
    NecessarySufficient,
}

/// Where feature feedback comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackSource {
    #[default]
    None,
    Replay,
    Oracle,
}

/// Ground-truth feedback: labels each shown candidate by its true
/// sufficiency/necessity measured from qrels over the whole corpus.
#[allow(clippy::too_many_arguments)]
pub fn synthetic_feedback_oracle(
    topic_id: &str,
    corpus: &[PreparedDoc],
    qrels: &Qrels,
    s_min: f64,
    n_min: f64,
    shown: &[FeatureId],
    task: FeedbackTask,
    round: u8,
) -> FeatureFeedback {
    let mut fb = FeatureFeedback {
        round,
        ..Default::default()
    };
    let relevant_total: usize = corpus
        .iter()
        .filter(|d| qrels.is_relevant(topic_id, &d.doc_id))
        .count();
    for f in shown {
        let mut with_f = 0usize;
        let mut rel_with_f = 0usize;
        for d in corpus {
            if d.has_feature(f) {
                with_f += 1;
                if qrels.is_relevant(topic_id, &d.doc_id) {
                    rel_with_f += 1;
                }
            }
        }
        let suff = if with_f > 0 {
            rel_with_f as f64 / with_f as f64
        } else {
            0.0
        };
        let nec = if relevant_total > 0 {
            rel_with_f as f64 / relevant_total as f64
        } else {
            0.0
        };
        let is_suff = suff >= s_min;
        let is_nec = nec >= n_min;
        match task {
            FeedbackTask::Relevant => {
                if is_suff || is_nec {
                    fb.relevant.push(f.clone());
                }
            }
            FeedbackTask::NecessarySufficient => {
                if is_suff {
                    fb.sufficient.push(f.clone());
                }
                if is_nec {
                    fb.necessary.push(f.clone());
                }
            }
        }
    }
    fb
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

/// Which documents the constraint/candidate pool contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PoolMode {
    /// Initial training pool plus unlabeled stream documents processed
    /// so far.
    #[default]
    Growing,
    /// Initial training pool only.
    Fixed,
}

fn default_threshold() -> f64 {
    DEFAULT_DELIVERY_THRESHOLD
}
fn default_train_fraction() -> f64 {
    0.25
}
fn default_retrain_every() -> usize {
    1
}
fn default_max_terms() -> usize {
    DEFAULT_MAX_TERMS
}
fn default_max_facets() -> usize {
    DEFAULT_MAX_FACETS
}
fn default_alpha() -> f64 {
    2.0
}
fn default_beta() -> f64 {
    1.0
}
fn default_pool_size() -> usize {
    crate::candidates::DEFAULT_POOL_SIZE
}
fn default_shown_size() -> usize {
    crate::candidates::DEFAULT_SHOWN_SIZE
}
fn default_prior_mu() -> f64 {
    1.0
}
fn default_oracle_s_min() -> f64 {
    0.8
}
fn default_oracle_n_min() -> f64 {
    0.5
}
fn default_rocchio() -> (f64, f64, f64) {
    (1.0, 0.75, 0.15)
}

/// Hyperparameters shared by every run of an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarnessSettings {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Leading fraction of the corpus used as the unlabeled training pool.
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    /// Retrain after this many new document judgments.
    #[serde(default = "default_retrain_every")]
    pub retrain_every: usize,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    #[serde(default = "default_max_facets")]
    pub max_facets: usize,
    /// Rocchio (a, b, c).
    #[serde(default = "default_rocchio")]
    pub rocchio: (f64, f64, f64),
    #[serde(default)]
    pub gcm: GcmConfig,
    #[serde(default)]
    pub refs: ReferenceDistributions,
    #[serde(default = "default_prior_mu")]
    pub prior_mu: f64,
    /// Candidate scoring weights (α for L⁺, β for C⁺).
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_pool_size")]
    pub pool_size: usize,
    #[serde(default = "default_shown_size")]
    pub shown_size: usize,
    #[serde(default)]
    pub pool_mode: PoolMode,
    #[serde(default = "default_oracle_s_min")]
    pub oracle_s_min: f64,
    #[serde(default = "default_oracle_n_min")]
    pub oracle_n_min: f64,
    #[serde(default)]
    pub oracle_task: FeedbackTask,
}

impl Default for HarnessSettings {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

/// Configuration of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub topic_id: String,
    pub learner: LearnerKind,
    #[serde(default)]
    pub seed_relevant_docs: usize,
    #[serde(default)]
    pub feedback: FeedbackSource,
    #[serde(default)]
    pub settings: HarnessSettings,
}

// ---------------------------------------------------------------------------
// Run result
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeliveryRecord {
    pub doc_id: String,
    pub score: f64,
    pub delivered: bool,
    pub relevant: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TimelineEvent {
    Init {
        seed_docs: Vec<String>,
        pool_size: usize,
        stream_len: usize,
    },
    FeatureFeedback {
        round: u8,
        shown: Vec<String>,
        relevant: Vec<String>,
        sufficient: Vec<String>,
        necessary: Vec<String>,
    },
    Delivery {
        /// 1-based position in the test stream.
        index: usize,
        doc_id: String,
        relevant: bool,
    },
    Round2Trigger {
        index: usize,
    },
    StreamEnd {
        processed: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub topic_id: String,
    pub learner: LearnerKind,
    pub seed_relevant_docs: usize,
    pub counts: ConfusionCounts,
    pub t11u: i64,
    pub t11su: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub timeline: Vec<TimelineEvent>,
    /// Full per-document delivery log; kept out of the summary JSON.
    #[serde(skip)]
    pub log: Vec<DeliveryRecord>,
    /// Every judgment and feature-label event, in order.
    #[serde(skip)]
    pub events: Vec<FeedbackEvent>,
}

impl RunResult {
    pub fn delivered_ids(&self) -> BTreeSet<&str> {
        self.log
            .iter()
            .filter(|r| r.delivered)
            .map(|r| r.doc_id.as_str())
            .collect()
    }

    /// Delivery log as TSV.
    pub fn log_tsv(&self) -> String {
        let mut out = String::from("doc_id\tscore\tdelivered\trelevant\n");
        for r in &self.log {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                r.doc_id, r.score, r.delivered as u8, r.relevant as u8
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Shared run environment
// ---------------------------------------------------------------------------

/// Immutable inputs shared across runs of one experiment.
pub struct RunEnv<'a> {
    pub prepared: &'a [PreparedDoc],
    pub topics: &'a [Topic],
    pub qrels: &'a Qrels,
    pub tokenizer: &'a Tokenizer,
    pub replay: Option<&'a ReplayMap>,
}

// ---------------------------------------------------------------------------
// The run itself
// ---------------------------------------------------------------------------

struct RunState<'a> {
    cfg: &'a RunConfig,
    env: &'a RunEnv<'a>,
    topic: &'a Topic,
    stats: StreamStats,
    /// Unlabeled pool (training pool plus, in Growing mode, undelivered
    /// stream documents).
    pool: Vec<&'a PreparedDoc>,
    labeled: LabeledSet<f64>,
    /// Prepared views of L⁺ for candidate counting.
    labeled_pos_docs: Vec<&'a PreparedDoc>,
    feature_labels: FeatureLabelSet,
    /// Every feature the user has labeled (any list).
    user_facets: BTreeSet<FeatureId>,
    profile: UserProfile<f64>,
    timeline: Vec<TimelineEvent>,
    events: Vec<FeedbackEvent>,
}

impl<'a> RunState<'a> {
    fn uses_feature_feedback(&self) -> bool {
        self.cfg.learner != LearnerKind::Baseline
            && self.cfg.feedback != FeedbackSource::None
    }

    /// Boolean-filter learners keep the logistic pipeline identical to
    /// the baseline; feature feedback only drives the post-filter.
    fn is_boolean(&self) -> bool {
        matches!(self.cfg.learner, LearnerKind::BoolAnd | LearnerKind::BoolOr)
    }

    fn query_vector(&self) -> crate::sparse::SparseVector<f64> {
        // user-labeled facets are injected into the query before Rocchio;
        // boolean learners keep the query untouched
        let facets: Vec<FeatureId> = if self.is_boolean() {
            Vec::new()
        } else {
            self.user_facets.iter().cloned().collect()
        };
        vectorize_adhoc(
            &self.topic.statement(),
            &facets,
            self.env.tokenizer,
            &self.stats,
        )
    }

    fn retrain(&mut self) -> Result<()> {
        let s = &self.cfg.settings;
        let (a, b, c) = s.rocchio;
        let coeffs = RocchioCoeffs { a, b, c };

        // Pseudo learners train on an augmented labeled set
        let pseudo = match self.cfg.learner {
            LearnerKind::PseudoD if !self.user_facets.is_empty() => Some(make_pseudo_doc(
                &self.user_facets,
                None,
                self.env.tokenizer,
                &self.stats,
            )),
            LearnerKind::PseudoQ if !self.user_facets.is_empty() => Some(make_pseudo_doc(
                &self.user_facets,
                Some(self.topic),
                self.env.tokenizer,
                &self.stats,
            )),
            _ => None,
        };
        let mut training_set;
        let labeled: &LabeledSet<f64> = if let Some(p) = pseudo {
            training_set = self.labeled.clone();
            training_set.push(p, true);
            &training_set
        } else {
            &self.labeled
        };

        let query = self.query_vector();
        let scores = rocchio_scores(&query, labeled, coeffs);
        let forced: BTreeSet<FeatureId> = if self.is_boolean() {
            BTreeSet::new()
        } else {
            self.user_facets.clone()
        };
        let active = match self.cfg.learner {
            LearnerKind::FeatSel => {
                // only user-selected facet features may enter the profile
                let term_scores = scores
                    .iter()
                    .filter(|(f, _)| !f.is_facet())
                    .map(|(f, w)| (f.clone(), *w))
                    .collect();
                select_profile_features(&term_scores, s.max_terms, s.max_facets, &forced)
            }
            _ => select_profile_features(&scores, s.max_terms, s.max_facets, &forced),
        };

        let init = self.profile.weights().clone();
        let outcome = match self.cfg.learner {
            LearnerKind::Baseline
            | LearnerKind::BoolAnd
            | LearnerKind::BoolOr
            | LearnerKind::FeatSel
            | LearnerKind::PseudoD
            | LearnerKind::PseudoQ => train_l2lr(
                labeled,
                s.gcm.lambda4,
                &active,
                &init,
                s.gcm.grad_tol,
                s.gcm.max_iters,
            )?,
            LearnerKind::Prior => train_prior(
                labeled,
                &self.user_facets,
                s.prior_mu,
                s.gcm.lambda4,
                &active,
                &init,
                s.gcm.grad_tol,
                s.gcm.max_iters,
            )?,
            LearnerKind::Gec => train_gec(
                labeled,
                &self.user_facets,
                &s.refs,
                &self.pool,
                &self.stats,
                &s.gcm,
                &active,
                &init,
            )?,
            LearnerKind::Gcm => {
                let problem = GcmProblem {
                    labeled,
                    feature_labels: &self.feature_labels,
                    refs: &s.refs,
                    pool: &self.pool,
                    stats: &self.stats,
                    active: &active,
                    config: &s.gcm,
                };
                gcm_train(&problem, &init, "gcm")?
            }
        };
        self.profile = outcome.profile;
        Ok(())
    }

    fn candidates(&self, round: u8) -> CandidateList<f64> {
        let s = &self.cfg.settings;
        let split = classify_unlabeled(&self.profile, &self.pool, &self.stats, s.threshold);
        let pseudo_pos = split.positives.iter().map(|i| self.pool[*i]);
        let ranked = rank_facet_features(
            self.labeled_pos_docs.iter().copied(),
            pseudo_pos,
            &self.stats,
            s.alpha,
            s.beta,
        );
        let exclude = if round == 2 {
            self.user_facets.clone()
        } else {
            BTreeSet::new()
        };
        top_candidates(ranked, s.pool_size, s.shown_size, &exclude)
    }

    fn obtain_feedback(&self, shown: &[FeatureId], round: u8) -> Result<FeatureFeedback> {
        let s = &self.cfg.settings;
        match self.cfg.feedback {
            FeedbackSource::None => Ok(FeatureFeedback {
                round,
                ..Default::default()
            }),
            FeedbackSource::Oracle => Ok(synthetic_feedback_oracle(
                &self.cfg.topic_id,
                self.env.prepared,
                self.env.qrels,
                s.oracle_s_min,
                s.oracle_n_min,
                shown,
                s.oracle_task,
                round,
            )),
            FeedbackSource::Replay => {
                let replay = self.env.replay.ok_or_else(|| Error::InvalidConfig(
                    "feedback source is replay but no replay file was provided".to_string(),
                ))?;
                replay
                    .get(&(self.cfg.topic_id.clone(), round))
                    .cloned()
                    .ok_or_else(|| Error::MissingFeedback {
                        topic_id: self.cfg.topic_id.clone(),
                        round,
                    })
            }
        }
    }

    fn apply_feedback(&mut self, fb: &FeatureFeedback, shown: &[FeatureId]) {
        self.timeline.push(TimelineEvent::FeatureFeedback {
            round: fb.round,
            shown: shown.iter().map(|f| f.to_string()).collect(),
            relevant: fb.relevant.iter().map(|f| f.to_string()).collect(),
            sufficient: fb.sufficient.iter().map(|f| f.to_string()).collect(),
            necessary: fb.necessary.iter().map(|f| f.to_string()).collect(),
        });
        self.events.push(FeedbackEvent::FeatureLabels(fb.clone()));
        for f in &fb.relevant {
            self.feature_labels.add_relevant(f.clone());
        }
        for f in &fb.sufficient {
            self.feature_labels.sufficient.insert(f.clone());
        }
        for f in &fb.necessary {
            self.feature_labels.necessary.insert(f.clone());
        }
        self.user_facets.extend(fb.all());
    }

    /// Run one feedback round: candidates → user labels → retrain.
    fn feedback_round(&mut self, round: u8) -> Result<()> {
        if !self.uses_feature_feedback() {
            return Ok(());
        }
        let list = self.candidates(round);
        let fb = self.obtain_feedback(&list.shown, round)?;
        // the oracle/replay may label only shown candidates; replay files
        // are trusted to name features the user actually saw
        self.apply_feedback(&fb, &list.shown);
        // boolean learners use the labels only in the post-filter, so
        // their logistic model has nothing new to learn here
        if !self.is_boolean() {
            self.retrain()?;
        }
        Ok(())
    }
}

/// Execute the full protocol for one topic/learner configuration.
pub fn run_filtering(cfg: &RunConfig, env: &RunEnv<'_>) -> Result<RunResult> {
    let topic = env
        .topics
        .iter()
        .find(|t| t.topic_id == cfg.topic_id)
        .ok_or_else(|| Error::UnknownTopic(cfg.topic_id.clone()))?;
    let s = &cfg.settings;

    let train_count =
        ((env.prepared.len() as f64) * s.train_fraction).floor() as usize;
    let (train_pool, stream) = env.prepared.split_at(train_count.min(env.prepared.len()));

    // seed relevant documents: date order from the pre-test segment,
    // topped up (and removed from the stream) if the segment runs short
    let mut seed_docs: Vec<&PreparedDoc> = train_pool
        .iter()
        .filter(|d| env.qrels.is_relevant(&cfg.topic_id, &d.doc_id))
        .take(cfg.seed_relevant_docs)
        .collect();
    let mut moved_from_stream: BTreeSet<String> = BTreeSet::new();
    if seed_docs.len() < cfg.seed_relevant_docs {
        for d in stream {
            if seed_docs.len() == cfg.seed_relevant_docs {
                break;
            }
            if env.qrels.is_relevant(&cfg.topic_id, &d.doc_id) {
                log::info!(
                    "run {}/{}: moving stream doc {} into the seed set",
                    cfg.topic_id,
                    cfg.learner.tag(),
                    d.doc_id
                );
                seed_docs.push(d);
                moved_from_stream.insert(d.doc_id.clone());
            }
        }
    }
    if seed_docs.len() < cfg.seed_relevant_docs {
        return Err(Error::InvalidConfig(format!(
            "topic {} has only {} relevant documents, {} seeds requested",
            cfg.topic_id,
            seed_docs.len(),
            cfg.seed_relevant_docs
        )));
    }
    let stream_docs: Vec<&PreparedDoc> = stream
        .iter()
        .filter(|d| !moved_from_stream.contains(&d.doc_id))
        .collect();

    // statistics cover the training pool and any moved seed docs
    let mut stats = StreamStats::new();
    for d in train_pool {
        stats.update(d);
    }
    for id in &moved_from_stream {
        let d = seed_docs.iter().find(|d| &d.doc_id == id).unwrap();
        stats.update(d);
    }

    let seed_ids: BTreeSet<String> = seed_docs.iter().map(|d| d.doc_id.clone()).collect();
    let pool: Vec<&PreparedDoc> = train_pool
        .iter()
        .filter(|d| !seed_ids.contains(&d.doc_id))
        .collect();

    let mut state = RunState {
        cfg,
        env,
        topic,
        stats,
        pool,
        labeled: LabeledSet::new(),
        labeled_pos_docs: Vec::new(),
        feature_labels: FeatureLabelSet::new(),
        user_facets: BTreeSet::new(),
        profile: UserProfile::zero(BTreeSet::new(), cfg.learner.tag()),
        timeline: Vec::new(),
        events: Vec::new(),
    };

    // seed documents enter the labeled set as relevant
    for d in &seed_docs {
        let vec = vectorize(d, &state.stats)?;
        state.labeled.push(
            LabeledDoc {
                doc_id: d.doc_id.clone(),
                vec,
            },
            true,
        );
        state.labeled_pos_docs.push(d);
        state.events.push(FeedbackEvent::DocJudgment {
            doc_id: d.doc_id.clone(),
            relevant: true,
        });
    }

    state.timeline.push(TimelineEvent::Init {
        seed_docs: seed_docs.iter().map(|d| d.doc_id.clone()).collect(),
        pool_size: state.pool.len(),
        stream_len: stream_docs.len(),
    });

    state.retrain()?;
    state.feedback_round(1)?;

    // stream processing
    let stream_len = stream_docs.len();
    let trigger_at = stream_len.div_ceil(3);
    let mut round2_done = false;
    let mut accepted = 0usize;
    let mut pending_judgments = 0usize;
    let mut counts = ConfusionCounts::default();
    let mut log_records = Vec::with_capacity(stream_len);

    counts.relevant_total = stream_docs
        .iter()
        .filter(|d| env.qrels.is_relevant(&cfg.topic_id, &d.doc_id))
        .count() as u64;

    for (i, doc) in stream_docs.iter().enumerate() {
        let index = i + 1;
        state.stats.update(doc);
        let p = predict_prepared(&state.profile, doc, &state.stats);
        let lr_accept = p > s.threshold;
        // boolean post-filter on the user-visible delivery
        let deliver = lr_accept
            && match cfg.learner {
                LearnerKind::BoolAnd => bool_filter(BoolMode::And, &state.user_facets, doc),
                LearnerKind::BoolOr => bool_filter(BoolMode::Or, &state.user_facets, doc),
                _ => true,
            };
        let relevant = env.qrels.is_relevant(&cfg.topic_id, &doc.doc_id);
        log_records.push(DeliveryRecord {
            doc_id: doc.doc_id.clone(),
            score: p,
            delivered: deliver,
            relevant,
        });
        if deliver {
            if relevant {
                counts.relevant_delivered += 1;
            } else {
                counts.nonrelevant_delivered += 1;
            }
            state.timeline.push(TimelineEvent::Delivery {
                index,
                doc_id: doc.doc_id.clone(),
                relevant,
            });
        }
        // the learner sees judgments for logistic-accepted documents;
        // for non-boolean learners that set equals the delivered set
        if lr_accept {
            accepted += 1;
            let vec = vectorize(doc, &state.stats)?;
            state.labeled.push(
                LabeledDoc {
                    doc_id: doc.doc_id.clone(),
                    vec,
                },
                relevant,
            );
            if relevant {
                state.labeled_pos_docs.push(doc);
            }
            state.events.push(FeedbackEvent::DocJudgment {
                doc_id: doc.doc_id.clone(),
                relevant,
            });
            pending_judgments += 1;
            if pending_judgments >= s.retrain_every {
                state.retrain()?;
                pending_judgments = 0;
            }
        } else if s.pool_mode == PoolMode::Growing {
            state.pool.push(doc);
        }
        // the trigger counts judged (logistic-accepted) documents so the
        // interaction schedule does not depend on any post-filter
        if !round2_done && index >= trigger_at && accepted >= 2 {
            round2_done = true;
            state
                .timeline
                .push(TimelineEvent::Round2Trigger { index });
            state.feedback_round(2)?;
        }
    }
    state.timeline.push(TimelineEvent::StreamEnd {
        processed: stream_len,
    });

    Ok(RunResult {
        topic_id: cfg.topic_id.clone(),
        learner: cfg.learner,
        seed_relevant_docs: cfg.seed_relevant_docs,
        t11u: t11u(&counts),
        t11su: t11su(&counts),
        precision: precision(&counts, ZeroDeliveryPolicy::Zero),
        recall: recall(&counts),
        counts,
        timeline: state.timeline,
        log: log_records,
        events: state.events,
    })
}
