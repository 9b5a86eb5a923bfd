//! Feature identities shared by documents, profiles, and learners.
//!
//! The feature space mixes three kinds: term tokens, facet-value pairs,
//! and a single bias feature that is always present with weight 1.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Name used for the bias feature.
pub const BIAS_NAME: &str = "__bias__";

/// Kind of a feature. The derived ordering (bias < facet < term) combined
/// with the name gives the total order used for deterministic tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    Bias,
    Facet,
    Term,
}

/// Identity of one feature in the shared feature space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FeatureId {
    pub kind: FeatureKind,
    pub name: String,
}

impl FeatureId {
    pub fn term(token: impl Into<String>) -> Self {
        FeatureId {
            kind: FeatureKind::Term,
            name: token.into(),
        }
    }

    /// Facet-value pair. The value is trimmed and casefolded; values are
    /// atomic and never tokenized.
    pub fn facet(facet: &str, value: &str) -> Self {
        FeatureId {
            kind: FeatureKind::Facet,
            name: format!("{}:{}", facet.trim(), value.trim().to_lowercase()),
        }
    }

    /// Parse an external "facet:value" string (replay files, configs).
    pub fn facet_from_str(s: &str) -> Option<Self> {
        let (facet, value) = s.split_once(':')?;
        if facet.trim().is_empty() || value.trim().is_empty() {
            return None;
        }
        Some(FeatureId::facet(facet, value))
    }

    pub fn bias() -> Self {
        FeatureId {
            kind: FeatureKind::Bias,
            name: BIAS_NAME.to_string(),
        }
    }

    pub fn is_term(&self) -> bool {
        self.kind == FeatureKind::Term
    }

    pub fn is_facet(&self) -> bool {
        self.kind == FeatureKind::Facet
    }

    pub fn is_bias(&self) -> bool {
        self.kind == FeatureKind::Bias
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FeatureKind::Bias => write!(f, "bias"),
            FeatureKind::Facet => write!(f, "{}", self.name),
            FeatureKind::Term => write!(f, "term:{}", self.name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn facet_canonicalizes_value() {
        let f = FeatureId::facet("Region", "  UNITED KINGDOM ");
        assert_eq!(f.name, "Region:united kingdom");
    }

    #[test]
    fn order_is_kind_then_name() {
        let b = FeatureId::bias();
        let f = FeatureId::facet("Region", "uk");
        let t = FeatureId::term("aardvark");
        assert!(b < f && f < t);
        assert!(FeatureId::term("aa") < FeatureId::term("ab"));
    }

    #[test]
    fn facet_from_str_rejects_bare_names() {
        assert!(FeatureId::facet_from_str("noseparator").is_none());
        assert!(FeatureId::facet_from_str("Region:UK").is_some());
    }
}
