//! Corpus loading, tokenization, streaming statistics, and document vectors.
//!
//! Documents are semi-structured: free text plus facet-value metadata.
//! Streams are ordered by publishing date, and all weighting statistics
//! (`N`, `df`, average length) cover only documents counted so far.
//!
//! All logarithms in the engine are natural logs.

pub mod synth;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::FeatureId;
use crate::scalar::Scalar;
use crate::sparse::SparseVector;

/// Calendar date in `YYYY-MM-DD` form. The format sorts lexicographically,
/// which is exactly the stream order we need.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Date(String);

impl Date {
    pub fn parse(s: &str) -> Option<Date> {
        let bytes = s.as_bytes();
        if bytes.len() != 10 || bytes[4] != b'-' || bytes[7] != b'-' {
            return None;
        }
        let digits = |r: std::ops::Range<usize>| bytes[r].iter().all(u8::is_ascii_digit);
        if !(digits(0..4) && digits(5..7) && digits(8..10)) {
            return None;
        }
        let month: u8 = s[5..7].parse().ok()?;
        let day: u8 = s[8..10].parse().ok()?;
        if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
            return None;
        }
        Some(Date(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One semi-structured document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub date: Date,
    pub text: String,
    #[serde(default)]
    pub facets: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Topic {
    pub topic_id: String,
    pub title: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub narrative: String,
}

impl Topic {
    /// Full topic statement, preprocessed identically to document text.
    pub fn statement(&self) -> String {
        format!("{} {} {}", self.title, self.description, self.narrative)
    }
}

/// Binary relevance judgments keyed by (topic, document).
/// Absent pairs are non-relevant.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, bool>>,
}

impl Qrels {
    pub fn new() -> Self {
        Qrels::default()
    }

    pub fn set(&mut self, topic_id: &str, doc_id: &str, relevant: bool) {
        self.judgments
            .entry(topic_id.to_string())
            .or_default()
            .insert(doc_id.to_string(), relevant);
    }

    pub fn is_relevant(&self, topic_id: &str, doc_id: &str) -> bool {
        self.judgments
            .get(topic_id)
            .and_then(|m| m.get(doc_id))
            .copied()
            .unwrap_or(false)
    }

    pub fn topic_ids(&self) -> impl Iterator<Item = &String> {
        self.judgments.keys()
    }

    pub fn relevant_count(&self, topic_id: &str) -> usize {
        self.judgments
            .get(topic_id)
            .map(|m| m.values().filter(|r| **r).count())
            .unwrap_or(0)
    }
}

/// Ordered document sequence (ascending date, ties by doc_id).
#[derive(Debug, Clone)]
pub struct Corpus {
    pub docs: Vec<Document>,
}

impl Corpus {
    /// Sort and check uniqueness; used both by the loader and the
    /// synthetic generator.
    pub fn from_docs(mut docs: Vec<Document>) -> Result<Corpus> {
        docs.sort_by(|a, b| a.date.cmp(&b.date).then_with(|| a.doc_id.cmp(&b.doc_id)));
        let mut seen: HashMap<&str, ()> = HashMap::with_capacity(docs.len());
        for d in &docs {
            if seen.insert(d.doc_id.as_str(), ()).is_some() {
                return Err(Error::Malformed {
                    path: "<memory>".into(),
                    line: 0,
                    message: format!("duplicate doc_id `{}`", d.doc_id),
                });
            }
        }
        Ok(Corpus { docs })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

/// Conventional IR preprocessing: casefold, split on non-alphanumerics,
/// drop short tokens and stopwords.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    pub min_len: usize,
    pub stopwords: BTreeSet<String>,
}

/// Small default stopword list; pass an empty set to disable.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "an", "and", "are", "as", "at", "be", "but", "by", "for", "from", "had", "has", "have", "he",
    "her", "his", "if", "in", "into", "is", "it", "its", "not", "of", "on", "or", "she", "that",
    "the", "their", "them", "then", "they", "this", "to", "was", "we", "were", "which", "will",
    "with", "you",
];

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer {
            min_len: 2,
            stopwords: DEFAULT_STOPWORDS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Tokenizer {
    pub fn without_stopwords() -> Self {
        Tokenizer {
            min_len: 2,
            stopwords: BTreeSet::new(),
        }
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(|t| t.to_lowercase())
            .filter(|t| t.chars().count() >= self.min_len && !self.stopwords.contains(t))
            .collect()
    }
}

/// A document reduced to its feature counts, ready for stats and vectors.
#[derive(Debug, Clone)]
pub struct PreparedDoc {
    pub doc_id: String,
    pub date: Date,
    /// Distinct term features with their in-document frequency.
    pub term_counts: BTreeMap<FeatureId, u32>,
    /// Facet-value features (presence only).
    pub facet_features: BTreeSet<FeatureId>,
    /// Term-token count (with multiplicity) — `length(d)` in the weighting.
    pub token_len: u64,
}

impl PreparedDoc {
    pub fn from_document(doc: &Document, tokenizer: &Tokenizer) -> PreparedDoc {
        let tokens = tokenizer.tokenize(&doc.text);
        let token_len = tokens.len() as u64;
        let mut term_counts: BTreeMap<FeatureId, u32> = BTreeMap::new();
        for t in tokens {
            *term_counts.entry(FeatureId::term(t)).or_insert(0) += 1;
        }
        let mut facet_features = BTreeSet::new();
        for (facet, values) in &doc.facets {
            for v in values {
                facet_features.insert(FeatureId::facet(facet, v));
            }
        }
        PreparedDoc {
            doc_id: doc.doc_id.clone(),
            date: doc.date.clone(),
            term_counts,
            facet_features,
            token_len,
        }
    }

    /// All distinct features of the document (terms then facets).
    pub fn features(&self) -> impl Iterator<Item = &FeatureId> {
        self.term_counts.keys().chain(self.facet_features.iter())
    }

    pub fn has_feature(&self, f: &FeatureId) -> bool {
        if f.is_facet() {
            self.facet_features.contains(f)
        } else {
            self.term_counts.contains_key(f)
        }
    }
}

/// Incremental statistics over processed documents.
#[derive(Debug, Clone, Default)]
pub struct StreamStats {
    pub n_processed: u64,
    pub df: HashMap<FeatureId, u64>,
    pub total_length: u64,
}

impl StreamStats {
    pub fn new() -> Self {
        StreamStats::default()
    }

    pub fn avg_doc_length(&self) -> f64 {
        if self.n_processed == 0 {
            0.0
        } else {
            self.total_length as f64 / self.n_processed as f64
        }
    }

    pub fn df(&self, f: &FeatureId) -> u64 {
        self.df.get(f).copied().unwrap_or(0)
    }

    /// Count one not-previously-counted document.
    pub fn update(&mut self, doc: &PreparedDoc) {
        self.n_processed += 1;
        self.total_length += doc.token_len;
        for f in doc.features() {
            *self.df.entry(f.clone()).or_insert(0) += 1;
        }
    }

    /// Normalized IDF: ln((N+0.5)/df) / ln(N+1). Non-negative because
    /// df ≤ N. Zero when df = 0 (feature never observed).
    pub fn idf<S: Scalar>(&self, f: &FeatureId) -> S {
        let df = self.df(f);
        if df == 0 {
            return S::zero();
        }
        let n = self.n_processed as f64;
        S::c(((n + 0.5) / df as f64).ln() / (n + 1.0).ln())
    }
}

fn tf_part<S: Scalar>(tf: f64, len: f64, avg_len: f64) -> S {
    S::c(tf / (tf + 0.5 + 1.5 * len / avg_len))
}

/// Okapi-style weight for one feature occurrence.
fn feature_weight<S: Scalar>(tf: f64, len: f64, stats: &StreamStats, f: &FeatureId) -> Result<S> {
    let df = stats.df(f);
    if df == 0 {
        return Err(Error::DfInconsistent {
            feature: f.to_string(),
        });
    }
    let idf: S = stats.idf(f);
    Ok(tf_part::<S>(tf, len, stats.avg_doc_length()) * idf)
}

/// Build the weighted vector of an already-counted document.
///
/// Terms use their in-document frequency; facet features use tf = 1.
/// The bias feature is included with weight exactly 1.
pub fn vectorize<S: Scalar>(doc: &PreparedDoc, stats: &StreamStats) -> Result<SparseVector<S>> {
    debug_assert!(stats.n_processed >= 1);
    let len = doc.token_len as f64;
    let mut v = SparseVector::new();
    for (f, tf) in &doc.term_counts {
        v.set(f.clone(), feature_weight(*tf as f64, len, stats, f)?);
    }
    for f in &doc.facet_features {
        v.set(f.clone(), feature_weight(1.0, len, stats, f)?);
    }
    v.set(FeatureId::bias(), S::one());
    Ok(v)
}

/// Vectorize ad-hoc content (topic statements, pseudo-documents) that is
/// not part of the stream: features the stats have never seen are
/// silently dropped instead of being an error.
pub fn vectorize_adhoc<S: Scalar>(
    text: &str,
    facets: &[FeatureId],
    tokenizer: &Tokenizer,
    stats: &StreamStats,
) -> SparseVector<S> {
    let tokens = tokenizer.tokenize(text);
    let len = tokens.len() as f64;
    let mut term_counts: BTreeMap<FeatureId, u32> = BTreeMap::new();
    for t in tokens {
        *term_counts.entry(FeatureId::term(t)).or_insert(0) += 1;
    }
    let mut v = SparseVector::new();
    if stats.n_processed > 0 {
        for (f, tf) in &term_counts {
            if stats.df(f) > 0 {
                let w = feature_weight(*tf as f64, len, stats, f).expect("df checked");
                v.set(f.clone(), w);
            }
        }
        for f in facets {
            if stats.df(f) > 0 {
                let w = feature_weight(1.0, len, stats, f).expect("df checked");
                v.set(f.clone(), w);
            }
        }
    }
    v.set(FeatureId::bias(), S::one());
    v
}

/// Load a JSONL corpus file; documents come back in stream order.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let reader = BufReader::new(file);
    let mut docs = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            message: e.to_string(),
        })?;
        if doc.doc_id.is_empty() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: line_no,
                message: "empty doc_id".to_string(),
            });
        }
        if Date::parse(doc.date.as_str()).is_none() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("invalid date `{}`", doc.date),
            });
        }
        if let Some(first) = seen.insert(doc.doc_id.clone(), line_no) {
            return Err(Error::DuplicateDocId {
                path: path.to_path_buf(),
                doc_id: doc.doc_id,
                first_line: first,
                second_line: line_no,
            });
        }
        docs.push(doc);
    }
    docs.sort_by(|a, b| a.date.cmp(&b.date).then_with(|| a.doc_id.cmp(&b.doc_id)));
    Ok(Corpus { docs })
}

/// Load a JSON array of topics.
pub fn load_topics(path: &Path) -> Result<Vec<Topic>> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let topics: Vec<Topic> = serde_json::from_reader(BufReader::new(file))?;
    for t in &topics {
        if t.title.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "topic `{}` has an empty title",
                t.topic_id
            )));
        }
    }
    Ok(topics)
}

/// Load TREC-convention qrels: `topic_id 0 doc_id rel` with rel in {0,1}.
pub fn load_qrels(path: &Path) -> Result<Qrels> {
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let reader = BufReader::new(file);
    let mut qrels = Qrels::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let malformed = |msg: &str| Error::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            message: msg.to_string(),
        };
        if fields.len() != 4 {
            return Err(malformed("expected 4 whitespace-separated fields"));
        }
        let rel = match fields[3] {
            "0" => false,
            "1" => true,
            other => return Err(malformed(&format!("rel must be 0 or 1, got `{other}`"))),
        };
        qrels.set(fields[0], fields[2], rel);
    }
    Ok(qrels)
}
