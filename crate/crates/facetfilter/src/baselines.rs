//! Comparison strategies: the shared L2-regularized logistic trainer and
//! the five ways of consuming feature feedback that GCM is compared against.
//!
//! GEC (sufficiency-only expectation constraints plus a labeled-instance
//! term) is realized as the GCM objective with the necessity term off,
//! so the two share one optimizer path.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{vectorize_adhoc, PreparedDoc, StreamStats, Tokenizer, Topic};
use crate::error::Result;
use crate::feature::FeatureId;
use crate::gcm::{
    gcm_train, FeatureLabelSet, GcmConfig, GcmProblem, ReferenceDistributions, TrainOutcome,
};
use crate::optim::{minimize, OptimOptions};
use crate::profile::{LabeledDoc, LabeledSet, UserProfile};
use crate::scalar::Scalar;
use crate::sparse::SparseVector;

/// Profile learning strategy for one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Baseline,
    BoolAnd,
    BoolOr,
    FeatSel,
    PseudoD,
    PseudoQ,
    Prior,
    Gec,
    Gcm,
}

impl LearnerKind {
    pub fn tag(&self) -> &'static str {
        match self {
            LearnerKind::Baseline => "baseline",
            LearnerKind::BoolAnd => "bool_and",
            LearnerKind::BoolOr => "bool_or",
            LearnerKind::FeatSel => "feat_sel",
            LearnerKind::PseudoD => "pseudo_d",
            LearnerKind::PseudoQ => "pseudo_q",
            LearnerKind::Prior => "prior",
            LearnerKind::Gec => "gec",
            LearnerKind::Gcm => "gcm",
        }
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "baseline" => Ok(LearnerKind::Baseline),
            "bool_and" => Ok(LearnerKind::BoolAnd),
            "bool_or" => Ok(LearnerKind::BoolOr),
            "feat_sel" => Ok(LearnerKind::FeatSel),
            "pseudo_d" => Ok(LearnerKind::PseudoD),
            "pseudo_q" => Ok(LearnerKind::PseudoQ),
            "prior" => Ok(LearnerKind::Prior),
            "gec" => Ok(LearnerKind::Gec),
            "gcm" => Ok(LearnerKind::Gcm),
            other => Err(format!("unknown learner `{other}`")),
        }
    }
}

/// L2-regularized logistic regression: the GCM objective with both
/// feature terms off.
pub fn train_l2lr<S: Scalar>(
    labeled: &LabeledSet<S>,
    lambda4: f64,
    active: &BTreeSet<FeatureId>,
    init: &SparseVector<S>,
    grad_tol: f64,
    max_iters: usize,
) -> Result<TrainOutcome<S>> {
    let config = GcmConfig {
        lambda1: 1.0,
        lambda2: 0.0,
        lambda3: 0.0,
        lambda4,
        grad_tol,
        max_iters,
    };
    let feature_labels = FeatureLabelSet::new();
    let refs = ReferenceDistributions::default();
    let stats = StreamStats::new();
    let problem = GcmProblem {
        labeled,
        feature_labels: &feature_labels,
        refs: &refs,
        pool: &[],
        stats: &stats,
        active,
        config: &config,
    };
    gcm_train(&problem, init, "baseline")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolMode {
    And,
    Or,
}

/// Boolean facet filter applied after logistic acceptance. An empty
/// selected set passes everything.
pub fn bool_filter(mode: BoolMode, selected: &BTreeSet<FeatureId>, doc: &PreparedDoc) -> bool {
    if selected.is_empty() {
        log::debug!("bool_filter: empty selected set passes all documents");
        return true;
    }
    match mode {
        BoolMode::And => selected.iter().all(|f| doc.facet_features.contains(f)),
        BoolMode::Or => selected.iter().any(|f| doc.facet_features.contains(f)),
    }
}

/// Pseudo-relevant positive instance from user-selected facets, optionally
/// combined with the topic statement ("Pseudo-Q").
pub fn make_pseudo_doc<S: Scalar>(
    selected: &BTreeSet<FeatureId>,
    topic: Option<&Topic>,
    tokenizer: &Tokenizer,
    stats: &StreamStats,
) -> LabeledDoc<S> {
    let facets: Vec<FeatureId> = selected.iter().cloned().collect();
    let text = topic.map(|t| t.statement()).unwrap_or_default();
    LabeledDoc {
        doc_id: "__pseudo__".to_string(),
        vec: vectorize_adhoc(&text, &facets, tokenizer, stats),
    }
}

/// Logistic regression with a Gaussian prior whose mean is μ on the
/// selected features and 0 elsewhere:
/// minimize −Σ log P(yᵢ|dᵢ,θ) + λ₄‖θ − μ·s‖².
#[allow(clippy::too_many_arguments)]
pub fn train_prior<S: Scalar>(
    labeled: &LabeledSet<S>,
    selected: &BTreeSet<FeatureId>,
    mu: f64,
    lambda4: f64,
    active: &BTreeSet<FeatureId>,
    init: &SparseVector<S>,
    grad_tol: f64,
    max_iters: usize,
) -> Result<TrainOutcome<S>> {
    let features: Vec<FeatureId> = active.iter().cloned().collect();
    let index: std::collections::HashMap<&FeatureId, usize> =
        features.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let rows: Vec<(Vec<(usize, S)>, S)> = labeled
        .instances()
        .map(|(v, y)| {
            let row: Vec<(usize, S)> = v
                .iter()
                .filter_map(|(f, w)| index.get(f).map(|i| (*i, *w)))
                .collect();
            (row, S::c(y as f64))
        })
        .collect();
    let mean: Vec<S> = features
        .iter()
        .map(|f| {
            if selected.contains(f) {
                S::c(mu)
            } else {
                S::zero()
            }
        })
        .collect();
    let l4 = S::c(lambda4);
    let two = S::c(2.0);

    let init_dense: Vec<S> = features.iter().map(|f| init.get(f)).collect();
    let result = minimize(
        |theta: &[S]| {
            let mut loss = S::zero();
            let mut grad = vec![S::zero(); theta.len()];
            for (row, y) in &rows {
                let z: S = row.iter().map(|(i, w)| theta[*i] * *w).sum();
                let m = -*y * z;
                loss = loss
                    + if m > S::zero() {
                        m + (-m).exp().ln_1p()
                    } else {
                        m.exp().ln_1p()
                    };
                let coef = -*y * crate::profile::sigmoid(m);
                for (i, w) in row {
                    grad[*i] = grad[*i] + coef * *w;
                }
            }
            for i in 0..theta.len() {
                let d = theta[i] - mean[i];
                loss = loss + l4 * d * d;
                grad[i] = grad[i] + two * l4 * d;
            }
            Ok((loss, grad))
        },
        init_dense,
        OptimOptions {
            grad_tol,
            max_iters,
        },
    )?;
    let weights: SparseVector<S> = features
        .iter()
        .cloned()
        .zip(result.theta.iter().copied())
        .collect();
    Ok(TrainOutcome {
        profile: UserProfile::new(weights, active.clone(), "prior"),
        final_loss: result.loss,
        skipped: Vec::new(),
    })
}

/// Generalized-expectation training with a labeled-instance term: the GCM
/// objective with all selected features treated as sufficient and the
/// necessity term disabled.
#[allow(clippy::too_many_arguments)]
pub fn train_gec<S: Scalar>(
    labeled: &LabeledSet<S>,
    selected: &BTreeSet<FeatureId>,
    refs: &ReferenceDistributions,
    pool: &[&PreparedDoc],
    stats: &StreamStats,
    config: &GcmConfig,
    active: &BTreeSet<FeatureId>,
    init: &SparseVector<S>,
) -> Result<TrainOutcome<S>> {
    let feature_labels = FeatureLabelSet {
        sufficient: selected.clone(),
        necessary: BTreeSet::new(),
    };
    let config = GcmConfig {
        lambda3: 0.0,
        ..config.clone()
    };
    let problem = GcmProblem {
        labeled,
        feature_labels: &feature_labels,
        refs,
        pool,
        stats,
        active,
        config: &config,
    };
    gcm_train(&problem, init, "gec")
}
