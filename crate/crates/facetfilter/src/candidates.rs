//! Faceted-feature candidate ranking for user feedback.
//!
//! Candidates are scored tf·idf style from the user-labeled relevant
//! documents and the documents the current profile would deliver.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::corpus::{PreparedDoc, StreamStats};
use crate::feature::FeatureId;
use crate::profile::UserProfile;
use crate::scalar::Scalar;

/// Default candidate pool and shown-list sizes.
pub const DEFAULT_POOL_SIZE: usize = 20;
pub const DEFAULT_SHOWN_SIZE: usize = 10;

/// Score a prepared document against a profile without materializing the
/// full vector: only the profile's active features are weighted.
pub fn predict_prepared<S: Scalar>(
    profile: &UserProfile<S>,
    doc: &PreparedDoc,
    stats: &StreamStats,
) -> S {
    let len = doc.token_len as f64;
    let avg = stats.avg_doc_length();
    let mut z = S::zero();
    for (f, w) in profile.weights().iter() {
        let tf = if f.is_bias() {
            z = z + *w;
            continue;
        } else if f.is_facet() {
            if doc.facet_features.contains(f) {
                1.0
            } else {
                continue;
            }
        } else {
            match doc.term_counts.get(f) {
                Some(tf) => *tf as f64,
                None => continue,
            }
        };
        let idf: S = stats.idf(f);
        z = z + *w * S::c(tf / (tf + 0.5 + 1.5 * len / avg)) * idf;
    }
    crate::profile::sigmoid(z)
}

/// Unlabeled pool split by the current profile's delivery rule.
/// Holds indices into the pool slice.
#[derive(Debug, Clone)]
pub struct PseudoSplit {
    pub positives: Vec<usize>,
    pub negatives: Vec<usize>,
}

/// Classify the unlabeled pool: a document is pseudo-positive iff the
/// profile would deliver it (p > threshold).
pub fn classify_unlabeled<S: Scalar>(
    profile: &UserProfile<S>,
    pool: &[&PreparedDoc],
    stats: &StreamStats,
    threshold: S,
) -> PseudoSplit {
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for (i, doc) in pool.iter().enumerate() {
        if predict_prepared(profile, doc, stats) > threshold {
            positives.push(i);
        } else {
            negatives.push(i);
        }
    }
    PseudoSplit {
        positives,
        negatives,
    }
}

/// score(f) = (α·N(f, L⁺) + β·N(f, C⁺)) · IDF(f), with N counting
/// documents that contain f. A feature never observed (df = 0) scores 0.
pub fn score_feature<S: Scalar>(
    f: &FeatureId,
    n_labeled_pos: usize,
    n_pseudo_pos: usize,
    stats: &StreamStats,
    alpha: f64,
    beta: f64,
) -> S {
    let idf: S = stats.idf(f);
    S::c(alpha * n_labeled_pos as f64 + beta * n_pseudo_pos as f64) * idf
}

/// Score every facet feature occurring in L⁺ or C⁺ in one pass.
pub fn rank_facet_features<'a, S: Scalar>(
    labeled_pos: impl Iterator<Item = &'a PreparedDoc>,
    pseudo_pos: impl Iterator<Item = &'a PreparedDoc>,
    stats: &StreamStats,
    alpha: f64,
    beta: f64,
) -> Vec<(FeatureId, S)> {
    let mut l_counts: BTreeMap<FeatureId, usize> = BTreeMap::new();
    let mut c_counts: BTreeMap<FeatureId, usize> = BTreeMap::new();
    for d in labeled_pos {
        for f in &d.facet_features {
            *l_counts.entry(f.clone()).or_insert(0) += 1;
        }
    }
    for d in pseudo_pos {
        for f in &d.facet_features {
            *c_counts.entry(f.clone()).or_insert(0) += 1;
        }
    }
    let mut features: BTreeSet<FeatureId> = l_counts.keys().cloned().collect();
    features.extend(c_counts.keys().cloned());
    features
        .into_iter()
        .map(|f| {
            let s = score_feature(
                &f,
                l_counts.get(&f).copied().unwrap_or(0),
                c_counts.get(&f).copied().unwrap_or(0),
                stats,
                alpha,
                beta,
            );
            (f, s)
        })
        .collect()
}

/// Ranked facet-feature candidates: a retained pool plus the shorter
/// list actually shown to the user.
#[derive(Debug, Clone)]
pub struct CandidateList<S: Scalar> {
    pub pool: Vec<(FeatureId, S)>,
    pub shown: Vec<FeatureId>,
}

impl<S: Scalar> CandidateList<S> {
    /// Exportable JSON, usable for constructing replay files by hand.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "pool": self.pool.iter().map(|(f, s)| json!({
                "feature": f.to_string(),
                "score": s.to_f64(),
            })).collect::<Vec<_>>(),
            "shown": self.shown.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Keep the top `pool_size` positive-scoring facet features; show the top
/// `shown_size` of those, skipping features in `exclude` (already labeled
/// in an earlier round). Ties break by FeatureId order.
pub fn top_candidates<S: Scalar>(
    scores: Vec<(FeatureId, S)>,
    pool_size: usize,
    shown_size: usize,
    exclude: &BTreeSet<FeatureId>,
) -> CandidateList<S> {
    debug_assert!(pool_size >= shown_size);
    let mut scored: Vec<(FeatureId, S)> = scores
        .into_iter()
        .filter(|(f, s)| f.is_facet() && *s > S::zero())
        .collect();
    scored.sort_by(|(fa, wa), (fb, wb)| {
        wb.partial_cmp(wa)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| fa.cmp(fb))
    });
    scored.truncate(pool_size);
    let shown = scored
        .iter()
        .map(|(f, _)| f.clone())
        .filter(|f| !exclude.contains(f))
        .take(shown_size)
        .collect();
    CandidateList {
        pool: scored,
        shown,
    }
}
