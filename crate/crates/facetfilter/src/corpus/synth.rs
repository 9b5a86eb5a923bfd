//! Synthetic corpus generator with planted faceted features.
//!
//! Each topic plants one facet-value feature with target sufficiency
//! P(y=1|f=1) and necessity P(f=1|y=1). Counts are assigned exactly
//! (up to rounding) before an optional label-noise pass, so the
//! empirical statistics of large corpora sit on the targets.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Corpus, Date, Document, Qrels, Topic};
use crate::error::{Error, Result};
use crate::feature::FeatureId;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthTopicSpec {
    /// Target P(y=1|f=1) of the planted feature.
    pub sufficiency: f64,
    /// Target P(f=1|y=1) of the planted feature.
    pub necessity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BackgroundFacet {
    pub name: String,
    /// Number of distinct values; each document draws one uniformly.
    pub cardinality: usize,
}

fn default_feature_rate() -> f64 {
    0.08
}
fn default_doc_len() -> usize {
    25
}
fn default_vocab_size() -> usize {
    500
}
fn default_signal_terms() -> usize {
    5
}
fn default_signal_prob() -> f64 {
    0.5
}
fn default_signal_leak() -> f64 {
    0.02
}
fn default_planted_facet() -> String {
    "plant".to_string()
}
fn default_background_facets() -> Vec<BackgroundFacet> {
    vec![BackgroundFacet {
        name: "src".to_string(),
        cardinality: 400,
    }]
}

/// Generator parameters; JSON-loadable (see the repo README for the schema).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_docs: usize,
    pub topics: Vec<SynthTopicSpec>,
    #[serde(default)]
    pub noise_rate: f64,
    /// P(f=1) of each planted feature.
    #[serde(default = "default_feature_rate")]
    pub feature_rate: f64,
    #[serde(default = "default_vocab_size")]
    pub vocab_size: usize,
    #[serde(default = "default_doc_len")]
    pub doc_len: usize,
    /// Topic-specific terms planted in relevant documents.
    #[serde(default = "default_signal_terms")]
    pub signal_terms: usize,
    #[serde(default = "default_signal_prob")]
    pub signal_prob: f64,
    /// Probability a non-relevant document leaks a signal term.
    #[serde(default = "default_signal_leak")]
    pub signal_leak: f64,
    #[serde(default = "default_planted_facet")]
    pub planted_facet: String,
    #[serde(default = "default_background_facets")]
    pub background_facets: Vec<BackgroundFacet>,
}

/// Planted feature for topic index `i`, e.g. `plant:t03`.
pub fn planted_feature(spec: &SynthSpec, topic_idx: usize) -> FeatureId {
    FeatureId::facet(&spec.planted_facet, &format!("t{topic_idx:02}"))
}

fn topic_id(i: usize) -> String {
    format!("t{i:02}")
}

/// Monotone index → date map (28-day months keep every date valid).
fn date_for(idx: usize) -> Date {
    let year = 1996 + idx / 336;
    let rem = idx % 336;
    let month = rem / 28 + 1;
    let day = rem % 28 + 1;
    Date::parse(&format!("{year:04}-{month:02}-{day:02}")).expect("generated date valid")
}

struct TopicAssignment {
    has_feature: Vec<bool>,
    relevant: Vec<bool>,
}

fn assign_topic(
    spec: &SynthSpec,
    t: &SynthTopicSpec,
    topic_idx: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TopicAssignment> {
    let n = spec.n_docs;
    let infeasible = |msg: String| Error::InfeasibleSynthSpec(format!("topic {topic_idx}: {msg}"));
    if !(0.0..=1.0).contains(&t.sufficiency) || !(t.necessity > 0.0 && t.necessity <= 1.0) {
        return Err(infeasible(format!(
            "sufficiency {} / necessity {} out of range",
            t.sufficiency, t.necessity
        )));
    }
    let n_f = (spec.feature_rate * n as f64).round() as usize;
    if n_f == 0 || n_f > n {
        return Err(infeasible(format!(
            "feature_rate {} gives {n_f} feature docs out of {n}",
            spec.feature_rate
        )));
    }
    let n_rel_f = (t.sufficiency * n_f as f64).round() as usize;
    let n_rel_total = (n_rel_f as f64 / t.necessity).round() as usize;
    if n_rel_total < n_rel_f {
        return Err(infeasible("necessity > 1 implied by rounding".to_string()));
    }
    let n_rel_nf = n_rel_total - n_rel_f;
    if n_rel_nf > n - n_f {
        return Err(infeasible(format!(
            "needs {n_rel_nf} relevant docs without the feature but only {} docs available",
            n - n_f
        )));
    }
    // exact-count assignment via a seeded shuffle
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut has_feature = vec![false; n];
    let mut relevant = vec![false; n];
    for &i in order.iter().take(n_f) {
        has_feature[i] = true;
    }
    for &i in order.iter().take(n_rel_f) {
        relevant[i] = true; // relevant docs with the feature
    }
    for &i in order.iter().skip(n_f).take(n_rel_nf) {
        relevant[i] = true; // relevant docs without it
    }
    if spec.noise_rate > 0.0 {
        for r in relevant.iter_mut() {
            if rng.gen::<f64>() < spec.noise_rate {
                *r = !*r;
            }
        }
    }
    Ok(TopicAssignment {
        has_feature,
        relevant,
    })
}

/// Generate a corpus, topics, and qrels. Deterministic given the seed.
pub fn synth_corpus(spec: &SynthSpec, seed: u64) -> Result<(Corpus, Vec<Topic>, Qrels)> {
    if spec.topics.is_empty() {
        return Err(Error::InfeasibleSynthSpec("no topics".to_string()));
    }
    if spec.vocab_size == 0 {
        return Err(Error::InfeasibleSynthSpec("vocab_size = 0".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let assignments: Vec<TopicAssignment> = spec
        .topics
        .iter()
        .enumerate()
        .map(|(i, t)| assign_topic(spec, t, i, &mut rng))
        .collect::<Result<_>>()?;

    let mut qrels = Qrels::new();
    for (i, a) in assignments.iter().enumerate() {
        let tid = topic_id(i);
        for (doc_idx, rel) in a.relevant.iter().enumerate() {
            if *rel {
                qrels.set(&tid, &format!("d{doc_idx:05}"), true);
            }
        }
    }

    let signal = |t: usize, j: usize| format!("sig{t:02}x{j}");

    let mut docs = Vec::with_capacity(spec.n_docs);
    for doc_idx in 0..spec.n_docs {
        let mut tokens: Vec<String> = (0..spec.doc_len)
            .map(|_| format!("bg{}", rng.gen_range(0..spec.vocab_size)))
            .collect();
        let mut facets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (t, a) in assignments.iter().enumerate() {
            let p = if a.relevant[doc_idx] {
                spec.signal_prob
            } else {
                spec.signal_leak
            };
            for j in 0..spec.signal_terms {
                if rng.gen::<f64>() < p {
                    tokens.push(signal(t, j));
                }
            }
            if a.has_feature[doc_idx] {
                facets
                    .entry(spec.planted_facet.clone())
                    .or_default()
                    .insert(format!("t{t:02}"));
            }
        }
        for bf in &spec.background_facets {
            if bf.cardinality > 0 {
                let v = rng.gen_range(0..bf.cardinality);
                facets
                    .entry(bf.name.clone())
                    .or_default()
                    .insert(format!("v{v}"));
            }
        }
        docs.push(Document {
            doc_id: format!("d{doc_idx:05}"),
            date: date_for(doc_idx),
            text: tokens.join(" "),
            facets,
        });
    }

    let topics = (0..spec.topics.len())
        .map(|t| Topic {
            topic_id: topic_id(t),
            title: format!("synthetic topic {t:02}"),
            description: (0..spec.signal_terms)
                .map(|j| signal(t, j))
                .collect::<Vec<_>>()
                .join(" "),
            narrative: String::new(),
        })
        .collect();

    Ok((Corpus::from_docs(docs)?, topics, qrels))
}

/// Empirical (sufficiency, necessity) of a facet feature measured
/// against qrels over the whole corpus. `None` when undefined.
pub fn measure_feature(
    corpus: &Corpus,
    qrels: &Qrels,
    topic_id: &str,
    feature: &FeatureId,
) -> (Option<f64>, Option<f64>) {
    let mut with_f = 0usize;
    let mut rel_with_f = 0usize;
    let mut rel = 0usize;
    for d in &corpus.docs {
        let has = d.facets.iter().any(|(facet, values)| {
            values
                .iter()
                .any(|v| &FeatureId::facet(facet, v) == feature)
        });
        let is_rel = qrels.is_relevant(topic_id, &d.doc_id);
        if has {
            with_f += 1;
            if is_rel {
                rel_with_f += 1;
            }
        }
        if is_rel {
            rel += 1;
        }
    }
    let suff = (with_f > 0).then(|| rel_with_f as f64 / with_f as f64);
    let nec = (rel > 0).then(|| rel_with_f as f64 / rel as f64);
    (suff, nec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n_docs: usize, s: f64, n: f64) -> SynthSpec {
        SynthSpec {
            n_docs,
            topics: vec![SynthTopicSpec {
                sufficiency: s,
                necessity: n,
            }],
            noise_rate: 0.0,
            feature_rate: default_feature_rate(),
            vocab_size: 200,
            doc_len: 15,
            signal_terms: 3,
            signal_prob: 0.5,
            signal_leak: 0.02,
            planted_facet: "plant".to_string(),
            background_facets: default_background_facets(),
        }
    }

    #[test]
    fn degenerate_targets_are_exact() {
        let sp = spec(500, 1.0, 1.0);
        let (corpus, _, qrels) = synth_corpus(&sp, 3).unwrap();
        let f = planted_feature(&sp, 0);
        let (s, n) = measure_feature(&corpus, &qrels, "t00", &f);
        assert_eq!(s, Some(1.0));
        assert_eq!(n, Some(1.0));
    }

    #[test]
    fn targets_hit_within_tolerance() {
        let sp = spec(5000, 0.9, 0.8);
        let (corpus, _, qrels) = synth_corpus(&sp, 7).unwrap();
        let f = planted_feature(&sp, 0);
        let (s, n) = measure_feature(&corpus, &qrels, "t00", &f);
        assert!((s.unwrap() - 0.9).abs() <= 0.05, "sufficiency {s:?}");
        assert!((n.unwrap() - 0.8).abs() <= 0.05, "necessity {n:?}");
    }

    #[test]
    fn same_seed_same_output() {
        let sp = spec(300, 0.9, 0.8);
        let (c1, t1, q1) = synth_corpus(&sp, 42).unwrap();
        let (c2, t2, q2) = synth_corpus(&sp, 42).unwrap();
        let j1 = serde_json::to_string(&c1.docs).unwrap();
        let j2 = serde_json::to_string(&c2.docs).unwrap();
        assert_eq!(j1, j2);
        assert_eq!(
            serde_json::to_string(&t1).unwrap(),
            serde_json::to_string(&t2).unwrap()
        );
        assert_eq!(
            serde_json::to_string(&q1).unwrap(),
            serde_json::to_string(&q2).unwrap()
        );
    }

    #[test]
    fn infeasible_spec_rejected() {
        // necessity so low that relevant docs without the feature
        // exceed the corpus
        let sp = spec(100, 1.0, 0.05);
        assert!(matches!(
            synth_corpus(&sp, 1),
            Err(Error::InfeasibleSynthSpec(_))
        ));
    }
}
