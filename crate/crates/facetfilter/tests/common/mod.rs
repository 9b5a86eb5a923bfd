//! Shared fixtures for the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use facetfilter::baselines::LearnerKind;
use facetfilter::corpus::{Date, Document, PreparedDoc, Qrels, Tokenizer, Topic};
use facetfilter::feature::FeatureId;
use facetfilter::sim::{
    run_filtering, FeatureFeedback, FeedbackSource, ReplayMap, RunConfig, RunEnv, RunResult,
};

pub fn doc(idx: usize, text: &str, kind: Option<&str>) -> Document {
    let month = idx / 28 + 1;
    let day = idx % 28 + 1;
    let mut facets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    if let Some(k) = kind {
        facets
            .entry("kind".to_string())
            .or_default()
            .insert(k.to_string());
    }
    Document {
        doc_id: format!("d{idx:02}"),
        date: Date::parse(&format!("1996-{month:02}-{day:02}")).unwrap(),
        text: text.to_string(),
        facets,
    }
}

/// 40 documents: 10 training-pool docs then a 30-document stream.
/// Relevant documents talk about cats and carry `kind:cat`.
pub fn fixture() -> (Vec<PreparedDoc>, Vec<Topic>, Qrels) {
    let cat = "feline whiskers purr napping window sill";
    let dog = "canine fetch bark walking park leash";
    let news = "council budget meeting road repairs vote";
    let sport = "match score goal keeper season standings";
    // relevant docs: d03 (training pool), stream positions 3, 6, 10, 15, 23, 28
    let relevant: BTreeSet<usize> = [3, 12, 15, 19, 24, 32, 37].into_iter().collect();
    let mut docs = Vec::new();
    for idx in 0..40 {
        let d = if relevant.contains(&idx) {
            doc(idx, cat, Some("cat"))
        } else if idx % 3 == 0 {
            doc(idx, dog, Some("dog"))
        } else if idx % 3 == 1 {
            doc(idx, news, None)
        } else {
            doc(idx, sport, Some("dog"))
        };
        docs.push(d);
    }
    let tokenizer = Tokenizer::default();
    let prepared = docs
        .iter()
        .map(|d| PreparedDoc::from_document(d, &tokenizer))
        .collect();
    let topics = vec![Topic {
        topic_id: "cats".to_string(),
        title: "cats".to_string(),
        description: "feline whiskers purr".to_string(),
        narrative: String::new(),
    }];
    let mut qrels = Qrels::new();
    for idx in &relevant {
        qrels.set("cats", &format!("d{idx:02}"), true);
    }
    (prepared, topics, qrels)
}

pub fn replay() -> ReplayMap {
    let cat = FeatureId::facet("kind", "cat");
    let mut map = ReplayMap::new();
    map.insert(
        ("cats".to_string(), 1),
        FeatureFeedback {
            round: 1,
            relevant: Vec::new(),
            sufficient: vec![cat.clone()],
            necessary: vec![cat.clone()],
        },
    );
    map.insert(
        ("cats".to_string(), 2),
        FeatureFeedback {
            round: 2,
            relevant: Vec::new(),
            sufficient: Vec::new(),
            necessary: vec![cat],
        },
    );
    map
}

pub fn run_fixture(learner: LearnerKind, feedback: FeedbackSource) -> RunResult {
    let (prepared, topics, qrels) = fixture();
    let tokenizer = Tokenizer::default();
    let map = replay();
    let env = RunEnv {
        prepared: &prepared,
        topics: &topics,
        qrels: &qrels,
        tokenizer: &tokenizer,
        replay: Some(&map),
    };
    let cfg = RunConfig {
        topic_id: "cats".to_string(),
        learner,
        seed_relevant_docs: 1,
        feedback,
        settings: Default::default(),
    };
    run_filtering(&cfg, &env).unwrap()
}
