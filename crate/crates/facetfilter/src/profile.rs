//! User profiles: which features a learner may weight, how documents are
//! scored, and when a document is delivered.

use std::collections::BTreeSet;

use serde_json::json;

use crate::feature::{FeatureId, FeatureKind};
use crate::scalar::Scalar;
use crate::sparse::SparseVector;

/// Default caps on profile features.
pub const DEFAULT_MAX_TERMS: usize = 30;
pub const DEFAULT_MAX_FACETS: usize = 10;

/// Expected-utility-optimal delivery threshold for T11U = 2R⁺ − N⁺:
/// E[utility per delivery] = 3p − 1 > 0 iff p > 1/3.
pub const DEFAULT_DELIVERY_THRESHOLD: f64 = 1.0 / 3.0;

/// Rocchio coefficients (query, positive centroid, negative centroid).
#[derive(Debug, Clone, Copy)]
pub struct RocchioCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for RocchioCoeffs {
    fn default() -> Self {
        RocchioCoeffs {
            a: 1.0,
            b: 0.75,
            c: 0.15,
        }
    }
}

/// A labeled document: its vector plus identity for bookkeeping.
#[derive(Debug, Clone)]
pub struct LabeledDoc<S: Scalar> {
    pub doc_id: String,
    pub vec: SparseVector<S>,
}

/// User-judged documents split by label.
#[derive(Debug, Clone)]
pub struct LabeledSet<S: Scalar> {
    pub positives: Vec<LabeledDoc<S>>,
    pub negatives: Vec<LabeledDoc<S>>,
}

impl<S: Scalar> Default for LabeledSet<S> {
    fn default() -> Self {
        LabeledSet {
            positives: Vec::new(),
            negatives: Vec::new(),
        }
    }
}

impl<S: Scalar> LabeledSet<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, doc: LabeledDoc<S>, relevant: bool) {
        if relevant {
            self.positives.push(doc);
        } else {
            self.negatives.push(doc);
        }
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty() && self.negatives.is_empty()
    }

    /// (vector, y = ±1) view used by the trainers.
    pub fn instances(&self) -> impl Iterator<Item = (&SparseVector<S>, i8)> {
        self.positives
            .iter()
            .map(|d| (&d.vec, 1i8))
            .chain(self.negatives.iter().map(|d| (&d.vec, -1i8)))
    }
}

fn centroid<S: Scalar>(docs: &[LabeledDoc<S>]) -> SparseVector<S> {
    let mut c = SparseVector::new();
    if docs.is_empty() {
        return c;
    }
    let inv = S::one() / S::c(docs.len() as f64);
    for d in docs {
        c.add_scaled(inv, &d.vec);
    }
    c
}

/// Rocchio feature scores: a·q + b·centroid(L⁺) − c·centroid(L⁻).
/// User-labeled faceted features should already be injected into the
/// query vector by the caller.
pub fn rocchio_scores<S: Scalar>(
    query: &SparseVector<S>,
    labeled: &LabeledSet<S>,
    coeffs: RocchioCoeffs,
) -> SparseVector<S> {
    let mut scores = SparseVector::new();
    scores.add_scaled(S::c(coeffs.a), query);
    scores.add_scaled(S::c(coeffs.b), &centroid(&labeled.positives));
    scores.add_scaled(-S::c(coeffs.c), &centroid(&labeled.negatives));
    scores
}

/// Top-k by (score desc, FeatureId asc).
fn top_k<S: Scalar>(mut scored: Vec<(FeatureId, S)>, k: usize) -> Vec<FeatureId> {
    scored.sort_by(|(fa, wa), (fb, wb)| {
        wb.partial_cmp(wa)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| fa.cmp(fb))
    });
    scored.into_iter().take(k).map(|(f, _)| f).collect()
}

/// Select the active feature set: top `max_terms` terms and top
/// `max_facets` facet features by score. User-labeled facets are always
/// included, displacing the lowest-scoring selected facets when the cap
/// binds; the bias is always active and never counted against a cap.
pub fn select_profile_features<S: Scalar>(
    scores: &SparseVector<S>,
    max_terms: usize,
    max_facets: usize,
    user_labeled_facets: &BTreeSet<FeatureId>,
) -> BTreeSet<FeatureId> {
    let terms: Vec<(FeatureId, S)> = scores
        .iter()
        .filter(|(f, _)| f.kind == FeatureKind::Term)
        .map(|(f, w)| (f.clone(), *w))
        .collect();

    let mut active: BTreeSet<FeatureId> = top_k(terms, max_terms).into_iter().collect();

    // forced facets first (by score among themselves if over the cap)
    let forced: Vec<(FeatureId, S)> = user_labeled_facets
        .iter()
        .map(|f| (f.clone(), scores.get(f)))
        .collect();
    let forced_kept = top_k(forced, max_facets);
    let remaining = max_facets - forced_kept.len();

    let other_facets: Vec<(FeatureId, S)> = scores
        .iter()
        .filter(|(f, _)| f.kind == FeatureKind::Facet && !user_labeled_facets.contains(f))
        .map(|(f, w)| (f.clone(), *w))
        .collect();

    active.extend(forced_kept);
    active.extend(top_k(other_facets, remaining));
    active.insert(FeatureId::bias());
    active
}

/// Per-topic user profile: a weight vector over an active feature set.
#[derive(Debug, Clone)]
pub struct UserProfile<S: Scalar> {
    weights: SparseVector<S>,
    pub active_features: BTreeSet<FeatureId>,
    pub learner_tag: String,
}

impl<S: Scalar> UserProfile<S> {
    /// Weights outside the active set are dropped on construction, so
    /// prediction never sees them.
    pub fn new(
        weights: SparseVector<S>,
        active_features: BTreeSet<FeatureId>,
        learner_tag: impl Into<String>,
    ) -> Self {
        let mut active = active_features;
        active.insert(FeatureId::bias());
        let weights = weights
            .iter()
            .filter(|(f, _)| active.contains(f))
            .map(|(f, w)| (f.clone(), *w))
            .collect();
        UserProfile {
            weights,
            active_features: active,
            learner_tag: learner_tag.into(),
        }
    }

    pub fn zero(active_features: BTreeSet<FeatureId>, learner_tag: impl Into<String>) -> Self {
        Self::new(SparseVector::new(), active_features, learner_tag)
    }

    pub fn weights(&self) -> &SparseVector<S> {
        &self.weights
    }

    pub fn score(&self, doc_vec: &SparseVector<S>) -> S {
        self.weights.dot(doc_vec)
    }

    /// JSON snapshot for inspection and fixtures.
    pub fn to_json(&self) -> serde_json::Value {
        let mut terms = serde_json::Map::new();
        let mut facets = serde_json::Map::new();
        let mut bias = 0.0f64;
        for (f, w) in self.weights.iter() {
            let w = w.to_f64().unwrap_or(f64::NAN);
            match f.kind {
                FeatureKind::Bias => bias = w,
                FeatureKind::Term => {
                    terms.insert(f.name.clone(), json!(w));
                }
                FeatureKind::Facet => {
                    facets.insert(f.name.clone(), json!(w));
                }
            }
        }
        json!({
            "learner": self.learner_tag,
            "bias": bias,
            "terms": terms,
            "facets": facets,
        })
    }
}

/// Numerically stable sigmoid.
pub fn sigmoid<S: Scalar>(z: S) -> S {
    if z >= S::zero() {
        S::one() / (S::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (S::one() + e)
    }
}

/// P(y = +1 | d, θ). Features outside the active set contribute zero.
pub fn predict<S: Scalar>(profile: &UserProfile<S>, doc_vec: &SparseVector<S>) -> S {
    sigmoid(profile.score(doc_vec))
}

/// Deliver iff p strictly exceeds the threshold.
pub fn delivery_decision<S: Scalar>(p: S, threshold: S) -> bool {
    p > threshold
}
