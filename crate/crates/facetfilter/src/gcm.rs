//! The Generalization Constraint Model.
//!
//! A logistic user profile trained on a unified objective: negative
//! log-likelihood of user-judged documents, KL penalties tying the
//! model-implied sufficiency P(y=+1|f=+1,θ) and necessity P(f=+1|y=+1,θ)
//! of user-labeled facet features to reference Bernoulli distributions,
//! and an L2 regularizer:
//!
//!   L(θ) = −λ₁ Σ_L log P(yᵢ|dᵢ,θ)
//!        + λ₂ Σ_{F_s} D(P_{y|f,θ} ‖ T_{y|f})
//!        + λ₃ Σ_{F_n} D(P_{f|y,θ} ‖ T_{f|y})
//!        + λ₄ ‖θ‖²
//!
//! Sufficiency is the mean of P(y=+1|d,θ) over unlabeled-pool documents
//! carrying the feature; necessity follows from Bayes' rule with P(f)
//! estimated from feature occurrence in the pool.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{PreparedDoc, StreamStats};
use crate::error::{Error, Result};
use crate::feature::FeatureId;
use crate::profile::{predict, LabeledSet, UserProfile};
use crate::scalar::Scalar;
use crate::sparse::SparseVector;

/// User-labeled features. A feature may be in both sets; relevance-style
/// ("Task I") feedback maps each selected feature into both.
#[derive(Debug, Clone, Default)]
pub struct FeatureLabelSet {
    pub sufficient: BTreeSet<FeatureId>,
    pub necessary: BTreeSet<FeatureId>,
}

impl FeatureLabelSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// All labeled features (either list).
    pub fn all(&self) -> BTreeSet<FeatureId> {
        self.sufficient.union(&self.necessary).cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.sufficient.is_empty() && self.necessary.is_empty()
    }

    /// "Relevant" labels enter both sets.
    pub fn add_relevant(&mut self, f: FeatureId) {
        self.sufficient.insert(f.clone());
        self.necessary.insert(f);
    }
}

/// Per-facet Bernoulli reference targets, strictly inside (0,1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FacetReference {
    pub t_suff: f64,
    pub t_nec: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceDistributions {
    pub default_t_suff: f64,
    pub default_t_nec: f64,
    /// Overrides keyed by facet name (the part before `:`).
    #[serde(default)]
    pub per_facet: BTreeMap<String, FacetReference>,
}

impl Default for ReferenceDistributions {
    fn default() -> Self {
        ReferenceDistributions {
            default_t_suff: 0.7,
            default_t_nec: 0.5,
            per_facet: BTreeMap::new(),
        }
    }
}

fn interior(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

impl ReferenceDistributions {
    pub fn validate(&self) -> Result<()> {
        let ok = interior(self.default_t_suff)
            && interior(self.default_t_nec)
            && self
                .per_facet
                .values()
                .all(|r| interior(r.t_suff) && interior(r.t_nec));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "reference distributions must lie strictly inside (0,1)".to_string(),
            ))
        }
    }

    fn facet_name(f: &FeatureId) -> &str {
        f.name.split(':').next().unwrap_or(&f.name)
    }

    pub fn t_suff(&self, f: &FeatureId) -> f64 {
        self.per_facet
            .get(Self::facet_name(f))
            .map(|r| r.t_suff)
            .unwrap_or(self.default_t_suff)
    }

    pub fn t_nec(&self, f: &FeatureId) -> f64 {
        self.per_facet
            .get(Self::facet_name(f))
            .map(|r| r.t_nec)
            .unwrap_or(self.default_t_nec)
    }
}

/// Term weights of the unified objective plus optimizer settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GcmConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub grad_tol: f64,
    pub max_iters: usize,
}

impl Default for GcmConfig {
    fn default() -> Self {
        GcmConfig {
            lambda1: 1.0,
            lambda2: 1.0,
            lambda3: 1.0,
            lambda4: 0.01,
            grad_tol: 1e-6,
            max_iters: 500,
        }
    }
}

impl GcmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda1 < 0.0 || self.lambda2 < 0.0 || self.lambda3 < 0.0 {
            return Err(Error::InvalidConfig("lambdas must be non-negative".into()));
        }
        if self.lambda4 <= 0.0 {
            return Err(Error::InvalidConfig(
                "lambda4 must be positive to keep training well-posed".into(),
            ));
        }
        Ok(())
    }
}

/// How P(f) is estimated from the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfEstimate {
    /// (count + 1) / (|pool| + 2); default, robust on tiny pools.
    AddOne,
    /// count / |pool|; used by the Bayes-identity oracle.
    Empirical,
}

/// Bernoulli KL divergence D(p ‖ t) in nats, with 0·ln 0 = 0.
/// The reference t must be interior so the divergence stays finite.
pub fn kl_bernoulli<S: Scalar>(p: S, t: S) -> Result<S> {
    if t <= S::zero() || t >= S::one() {
        return Err(Error::InvalidConfig(format!(
            "reference probability {t} must be inside (0,1)"
        )));
    }
    let term = |p: S, t: S| {
        if p == S::zero() {
            S::zero()
        } else {
            p * (p / t).ln()
        }
    };
    Ok(term(p, t) + term(S::one() - p, S::one() - t))
}

/// Model-implied sufficiency: mean of P(y=+1|d,θ) over the pool
/// documents where f appears (sign = +1) or not (sign = −1).
pub fn estimate_sufficiency<S: Scalar>(
    f: &FeatureId,
    sign: i8,
    profile: &UserProfile<S>,
    pool: &[&SparseVector<S>],
) -> Result<S> {
    let present = sign > 0;
    let mut sum = S::zero();
    let mut count = 0usize;
    for d in pool {
        if d.contains(f) == present {
            sum = sum + predict(profile, d);
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Degenerate(format!(
            "no pool document with {f} {}",
            if present { "present" } else { "absent" }
        )));
    }
    Ok(sum / S::c(count as f64))
}

/// Necessity from its parts: n = a·q / (a·q + b·(1−q)) where a, b are
/// the sign = ±1 sufficiency estimates and q = P(f=+1).
pub fn necessity_from_parts<S: Scalar>(a: S, b: S, q: S) -> S {
    let num = a * q;
    num / (num + b * (S::one() - q))
}

/// Model-implied necessity at y = +1, via Bayes' rule.
pub fn estimate_necessity<S: Scalar>(
    f: &FeatureId,
    profile: &UserProfile<S>,
    pool: &[&SparseVector<S>],
    pf: PfEstimate,
) -> Result<S> {
    let count = pool.iter().filter(|d| d.contains(f)).count();
    if count == 0 || count == pool.len() {
        return Err(Error::Degenerate(format!(
            "pool degenerate for {f}: {count} of {} documents carry it",
            pool.len()
        )));
    }
    let a = estimate_sufficiency(f, 1, profile, pool)?;
    let b = estimate_sufficiency(f, -1, profile, pool)?;
    let q = match pf {
        PfEstimate::AddOne => S::c((count as f64 + 1.0) / (pool.len() as f64 + 2.0)),
        PfEstimate::Empirical => S::c(count as f64 / pool.len() as f64),
    };
    Ok(necessity_from_parts(a, b, q))
}

// ---------------------------------------------------------------------------
// Training problem
// ---------------------------------------------------------------------------

const PROB_EPS: f64 = 1e-12;

/// Projected sparse row: (active-feature index, weight).
type Row<S> = Vec<(usize, S)>;

struct SuffTerm<S> {
    /// Pool indices of C_f (f present).
    members: Vec<usize>,
    t: S,
    lambda: S,
}

struct NecTerm<S> {
    present: Vec<usize>,
    absent: Vec<usize>,
    /// Smoothed P(f = +1).
    q: S,
    t: S,
    lambda: S,
}

/// Everything one training call needs, projected onto a fixed active
/// feature set.
pub struct GcmProblem<'a, S: Scalar> {
    pub labeled: &'a LabeledSet<S>,
    pub feature_labels: &'a FeatureLabelSet,
    pub refs: &'a ReferenceDistributions,
    pub pool: &'a [&'a PreparedDoc],
    pub stats: &'a StreamStats,
    pub active: &'a BTreeSet<FeatureId>,
    pub config: &'a GcmConfig,
}

struct Design<S: Scalar> {
    features: Vec<FeatureId>,
    docs: Vec<(Row<S>, S)>,
    pool_rows: Vec<Row<S>>,
    suff_terms: Vec<SuffTerm<S>>,
    nec_terms: Vec<NecTerm<S>>,
    lambda1: S,
    lambda4: S,
    /// (feature, reason) pairs for penalty terms that had to be skipped.
    skipped: Vec<(FeatureId, String)>,
}

fn softplus<S: Scalar>(x: S) -> S {
    if x > S::zero() {
        x + x.neg().exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn clamp_prob<S: Scalar>(p: S) -> S {
    p.max(S::c(PROB_EPS)).min(S::one() - S::c(PROB_EPS))
}

impl<'a, S: Scalar> GcmProblem<'a, S> {
    fn project_sparse(&self, index: &HashMap<&FeatureId, usize>, v: &SparseVector<S>) -> Row<S> {
        v.iter()
            .filter_map(|(f, w)| index.get(f).map(|i| (*i, *w)))
            .collect()
    }

    /// Project a pool document with current-stats weighting, restricted
    /// to active features.
    fn project_doc(&self, doc: &PreparedDoc) -> Row<S> {
        let len = doc.token_len as f64;
        let avg = self.stats.avg_doc_length();
        let mut row = Vec::new();
        for (i, f) in self.features_iter().enumerate() {
            let tf = if f.is_bias() {
                row.push((i, S::one()));
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
            let idf: S = self.stats.idf(f);
            row.push((i, S::c(tf / (tf + 0.5 + 1.5 * len / avg)) * idf));
        }
        row
    }

    fn features_iter(&self) -> impl Iterator<Item = &FeatureId> {
        self.active.iter()
    }

    fn build(&self) -> Design<S> {
        let features: Vec<FeatureId> = self.active.iter().cloned().collect();
        let index: HashMap<&FeatureId, usize> =
            features.iter().enumerate().map(|(i, f)| (f, i)).collect();

        let docs = self
            .labeled
            .instances()
            .map(|(v, y)| (self.project_sparse(&index, v), S::c(y as f64)))
            .collect();

        let needs_pool = (!self.feature_labels.is_empty())
            && (self.config.lambda2 > 0.0 || self.config.lambda3 > 0.0);
        let pool_rows: Vec<Row<S>> = if needs_pool {
            self.pool.iter().map(|d| self.project_doc(d)).collect()
        } else {
            Vec::new()
        };

        let mut skipped = Vec::new();
        let mut suff_terms = Vec::new();
        let mut nec_terms = Vec::new();

        if needs_pool {
            // pool membership per labeled feature
            let wanted: BTreeSet<FeatureId> = self.feature_labels.all();
            let mut present: BTreeMap<&FeatureId, Vec<usize>> =
                wanted.iter().map(|f| (f, Vec::new())).collect();
            for (i, d) in self.pool.iter().enumerate() {
                for f in &wanted {
                    if d.has_feature(f) {
                        present.get_mut(f).unwrap().push(i);
                    }
                }
            }
            if self.config.lambda2 > 0.0 {
                for f in &self.feature_labels.sufficient {
                    let members = &present[f];
                    if members.is_empty() {
                        skipped.push((f.clone(), "no pool document carries it".to_string()));
                        continue;
                    }
                    suff_terms.push(SuffTerm {
                        members: members.clone(),
                        t: S::c(self.refs.t_suff(f)),
                        lambda: S::c(self.config.lambda2),
                    });
                }
            }
            if self.config.lambda3 > 0.0 {
                for f in &self.feature_labels.necessary {
                    let members = &present[f];
                    if members.is_empty() || members.len() == self.pool.len() {
                        skipped.push((f.clone(), "pool degenerate".to_string()));
                        continue;
                    }
                    let member_set: BTreeSet<usize> = members.iter().copied().collect();
                    let absent: Vec<usize> = (0..self.pool.len())
                        .filter(|i| !member_set.contains(i))
                        .collect();
                    let q = (members.len() as f64 + 1.0) / (self.pool.len() as f64 + 2.0);
                    nec_terms.push(NecTerm {
                        present: members.clone(),
                        absent,
                        q: S::c(q),
                        t: S::c(self.refs.t_nec(f)),
                        lambda: S::c(self.config.lambda3),
                    });
                }
            }
        }
        for (f, reason) in &skipped {
            log::debug!("gcm: skipping penalty for {f}: {reason}");
        }

        Design {
            features,
            docs,
            pool_rows,
            suff_terms,
            nec_terms,
            lambda1: S::c(self.config.lambda1),
            lambda4: S::c(self.config.lambda4),
            skipped,
        }
    }
}

impl<S: Scalar> Design<S> {
    fn dot(row: &Row<S>, theta: &[S]) -> S {
        row.iter().map(|(i, w)| theta[*i] * *w).sum()
    }

    /// Loss and gradient in a single pass.
    fn value_and_grad(&self, theta: &[S]) -> (S, Vec<S>) {
        let mut loss = S::zero();
        let mut grad = vec![S::zero(); theta.len()];

        // document likelihood
        for (row, y) in &self.docs {
            let z = Self::dot(row, theta);
            loss = loss + self.lambda1 * softplus(-*y * z);
            let coef = self.lambda1 * (-*y) * crate::profile::sigmoid(-*y * z);
            for (i, w) in row {
                grad[*i] = grad[*i] + coef * *w;
            }
        }

        // shared pool predictions
        let pool_p: Vec<S> = self
            .pool_rows
            .iter()
            .map(|row| crate::profile::sigmoid(Self::dot(row, theta)))
            .collect();

        let kl = |p: S, t: S| -> (S, S) {
            // value and d/dp, with p clamped away from the endpoints
            let p = clamp_prob(p);
            let v = p * (p / t).ln() + (S::one() - p) * ((S::one() - p) / (S::one() - t)).ln();
            let d = (p / t).ln() - ((S::one() - p) / (S::one() - t)).ln();
            (v, d)
        };
        let mean_p = |idx: &[usize]| -> S {
            idx.iter().map(|i| pool_p[*i]).sum::<S>() / S::c(idx.len() as f64)
        };
        // accumulate c · mean_{i∈idx} p(1−p)·x_i into grad
        let add_mean_grad = |grad: &mut Vec<S>, idx: &[usize], c: S| {
            let inv = c / S::c(idx.len() as f64);
            for i in idx {
                let p = pool_p[*i];
                let coef = inv * p * (S::one() - p);
                for (j, w) in &self.pool_rows[*i] {
                    grad[*j] = grad[*j] + coef * *w;
                }
            }
        };

        for term in &self.suff_terms {
            let s = mean_p(&term.members);
            let (v, dv) = kl(s, term.t);
            loss = loss + term.lambda * v;
            add_mean_grad(&mut grad, &term.members, term.lambda * dv);
        }

        for term in &self.nec_terms {
            let a = mean_p(&term.present);
            let b = mean_p(&term.absent);
            let q = term.q;
            let denom = a * q + b * (S::one() - q);
            let n = a * q / denom;
            let (v, dv) = kl(n, term.t);
            loss = loss + term.lambda * v;
            let dn_da = q * b * (S::one() - q) / (denom * denom);
            let dn_db = -(a * q * (S::one() - q)) / (denom * denom);
            add_mean_grad(&mut grad, &term.present, term.lambda * dv * dn_da);
            add_mean_grad(&mut grad, &term.absent, term.lambda * dv * dn_db);
        }

        // regularizer
        let two = S::c(2.0);
        for (g, t) in grad.iter_mut().zip(theta.iter()) {
            *g = *g + two * self.lambda4 * *t;
        }
        loss = loss + self.lambda4 * theta.iter().map(|t| *t * *t).sum::<S>();

        (loss, grad)
    }

    fn to_sparse(&self, theta: &[S]) -> SparseVector<S> {
        self.features
            .iter()
            .cloned()
            .zip(theta.iter().copied())
            .collect()
    }

    fn to_dense(&self, v: &SparseVector<S>) -> Vec<S> {
        self.features.iter().map(|f| v.get(f)).collect()
    }
}

/// Unified loss at θ. Infeasible penalty terms are skipped (and logged),
/// keeping the value finite.
pub fn gcm_loss<S: Scalar>(problem: &GcmProblem<'_, S>, theta: &SparseVector<S>) -> Result<S> {
    let design = problem.build();
    let dense = design.to_dense(theta);
    let (loss, _) = design.value_and_grad(&dense);
    if loss.is_finite() {
        Ok(loss)
    } else {
        Err(Error::NonFiniteLoss(format!("loss {loss}")))
    }
}

/// Analytic gradient of the unified loss at θ.
pub fn gcm_gradient<S: Scalar>(
    problem: &GcmProblem<'_, S>,
    theta: &SparseVector<S>,
) -> Result<SparseVector<S>> {
    let design = problem.build();
    let dense = design.to_dense(theta);
    let (_, grad) = design.value_and_grad(&dense);
    Ok(design.to_sparse(&grad))
}

/// Result of a training call: the profile plus skipped-penalty diagnostics.
pub struct TrainOutcome<S: Scalar> {
    pub profile: UserProfile<S>,
    pub final_loss: S,
    pub skipped: Vec<(FeatureId, String)>,
}

/// Minimize the unified loss from `init` over the fixed active set.
pub fn gcm_train<S: Scalar>(
    problem: &GcmProblem<'_, S>,
    init: &SparseVector<S>,
    learner_tag: &str,
) -> Result<TrainOutcome<S>> {
    problem.config.validate()?;
    problem.refs.validate()?;
    let design = problem.build();
    let init_dense = design.to_dense(init);
    let opts = crate::optim::OptimOptions {
        grad_tol: problem.config.grad_tol,
        max_iters: problem.config.max_iters,
    };
    let result = crate::optim::minimize(
        |theta| {
            let (loss, grad) = design.value_and_grad(theta);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss(format!(
                    "loss {loss} during {learner_tag} training"
                )));
            }
            Ok((loss, grad))
        },
        init_dense,
        opts,
    )?;
    let weights = design.to_sparse(&result.theta);
    Ok(TrainOutcome {
        profile: UserProfile::new(weights, problem.active.clone(), learner_tag),
        final_loss: result.loss,
        skipped: design.skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(n: &str) -> FeatureId {
        FeatureId::term(n)
    }
    fn facet(v: &str) -> FeatureId {
        FeatureId::facet("g", v)
    }

    fn vec_of(entries: &[(FeatureId, f64)]) -> SparseVector<f64> {
        entries.iter().cloned().collect()
    }

    fn profile_with(entries: &[(FeatureId, f64)]) -> UserProfile<f64> {
        let active: BTreeSet<FeatureId> = entries.iter().map(|(f, _)| f.clone()).collect();
        UserProfile::new(vec_of(entries), active, "test")
    }

    #[test]
    fn kl_identity_and_hand_value() {
        assert_eq!(kl_bernoulli(0.3f64, 0.3).unwrap(), 0.0);
        let v = kl_bernoulli(0.5f64, 0.25).unwrap();
        let expect = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((v - expect).abs() < 1e-12);
        assert!((v - 0.1438).abs() < 5e-4);
        assert!(kl_bernoulli(0.5f64, 0.0).is_err());
        assert!(kl_bernoulli(0.5f64, 1.0).is_err());
        // endpoints of p are fine
        assert!(kl_bernoulli(0.0f64, 0.5).unwrap().is_finite());
    }

    #[test]
    fn kl_nonnegative_property() {
        let mut state = 123456789u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let p = next();
            let t = next().clamp(1e-6, 1.0 - 1e-6);
            assert!(kl_bernoulli(p, t).unwrap() >= -1e-15);
        }
    }

    #[test]
    fn sufficiency_is_mean_over_carriers() {
        // two docs carrying f with p 0.9 and 0.7 → 0.8
        let f = facet("v");
        let d1 = vec_of(&[(f.clone(), 1.0), (FeatureId::bias(), 1.0)]);
        let d2 = vec_of(&[(f.clone(), 2.0), (FeatureId::bias(), 1.0)]);
        let d3 = vec_of(&[(FeatureId::bias(), 1.0)]);
        // solve for weights giving p = .9 / .7 on d1/d2:
        // z1 = w_f + w_b = ln(9), z2 = 2 w_f + w_b = ln(7/3)
        let z1 = 9.0f64.ln();
        let z2 = (0.7f64 / 0.3).ln();
        let w_f = z2 - z1;
        let w_b = z1 - w_f;
        let prof = profile_with(&[(f.clone(), w_f), (FeatureId::bias(), w_b)]);
        let pool = [&d1, &d2, &d3];
        let s = estimate_sufficiency(&f, 1, &prof, &pool).unwrap();
        assert!((s - 0.8).abs() < 1e-12);
        // zero profile → 0.5 regardless
        let zero = UserProfile::<f64>::zero(Default::default(), "test");
        assert_eq!(estimate_sufficiency(&f, 1, &zero, &pool).unwrap(), 0.5);
        // singleton C_f equals predict
        let s1 = estimate_sufficiency(&f, -1, &prof, &pool).unwrap();
        assert_eq!(s1, predict(&prof, &d3));
        // empty C_f signals
        let g = facet("missing");
        assert!(estimate_sufficiency(&g, 1, &prof, &pool).is_err());
    }

    #[test]
    fn necessity_hand_evaluation() {
        // a=0.8, b=0.2, q=0.25 → 4/7
        let n = necessity_from_parts(0.8f64, 0.2, 0.25);
        assert!((n - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn necessity_of_zero_profile_is_pf() {
        let f = facet("v");
        let d1 = vec_of(&[(f.clone(), 1.0)]);
        let d2 = vec_of(&[(term("x"), 1.0)]);
        let d3 = vec_of(&[(term("y"), 1.0)]);
        let pool = [&d1, &d2, &d3];
        let zero = UserProfile::<f64>::zero(Default::default(), "test");
        let n = estimate_necessity(&f, &zero, &pool, PfEstimate::Empirical).unwrap();
        assert!((n - 1.0 / 3.0).abs() < 1e-12);
        let n = estimate_necessity(&f, &zero, &pool, PfEstimate::AddOne).unwrap();
        assert!((n - 2.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn necessity_degenerate_pool_signals() {
        let f = facet("v");
        let d1 = vec_of(&[(f.clone(), 1.0)]);
        let d2 = vec_of(&[(f.clone(), 2.0)]);
        let pool = [&d1, &d2];
        let zero = UserProfile::<f64>::zero(Default::default(), "test");
        assert!(estimate_necessity(&f, &zero, &pool, PfEstimate::AddOne).is_err());
    }

    // Bayes identity: with empirical P(f), necessity = Σ_{d∋f} p_d / Σ_d p_d.
    #[test]
    fn necessity_matches_bruteforce_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n_docs = rng.gen_range(2..=50);
            let f = facet("v");
            let mut docs: Vec<SparseVector<f64>> = Vec::new();
            for i in 0..n_docs {
                let mut v = SparseVector::new();
                // guarantee at least one doc with and one without f
                let has = if i == 0 {
                    true
                } else if i == 1 {
                    false
                } else {
                    rng.gen_bool(0.5)
                };
                if has {
                    v.set(f.clone(), rng.gen_range(0.1..1.0));
                }
                v.set(term("a"), rng.gen_range(-1.0..1.0));
                v.set(FeatureId::bias(), 1.0);
                docs.push(v);
            }
            let prof = profile_with(&[
                (f.clone(), rng.gen_range(-2.0..2.0)),
                (term("a"), rng.gen_range(-2.0..2.0)),
                (FeatureId::bias(), rng.gen_range(-1.0..1.0)),
            ]);
            let pool: Vec<&SparseVector<f64>> = docs.iter().collect();
            let nec = estimate_necessity(&f, &prof, &pool, PfEstimate::Empirical).unwrap();
            let num: f64 = docs
                .iter()
                .filter(|d| d.contains(&f))
                .map(|d| predict(&prof, d))
                .sum();
            let den: f64 = docs.iter().map(|d| predict(&prof, d)).sum();
            assert!((nec - num / den).abs() < 1e-10);
        }
    }
}
