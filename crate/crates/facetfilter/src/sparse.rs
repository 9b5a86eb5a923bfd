//! Sparse weighted vectors over the shared feature space.

use std::collections::BTreeMap;

use crate::feature::FeatureId;
use crate::scalar::Scalar;

/// Sparse feature → weight map. Explicit zeros are never stored, so
/// membership in the support doubles as feature presence.
///
/// Backed by a `BTreeMap` so iteration order is the deterministic
/// `FeatureId` order used everywhere for tie-breaking.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<S: Scalar> {
    entries: BTreeMap<FeatureId, S>,
}

impl<S: Scalar> Default for SparseVector<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> SparseVector<S> {
    pub fn new() -> Self {
        SparseVector {
            entries: BTreeMap::new(),
        }
    }

    /// Set a weight; zero weights delete the entry.
    pub fn set(&mut self, feature: FeatureId, weight: S) {
        if weight == S::zero() {
            self.entries.remove(&feature);
        } else {
            self.entries.insert(feature, weight);
        }
    }

    pub fn add(&mut self, feature: FeatureId, delta: S) {
        let w = self.get(&feature) + delta;
        self.set(feature, w);
    }

    pub fn get(&self, feature: &FeatureId) -> S {
        self.entries.get(feature).copied().unwrap_or_else(S::zero)
    }

    pub fn contains(&self, feature: &FeatureId) -> bool {
        self.entries.contains_key(feature)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FeatureId, &S)> {
        self.entries.iter()
    }

    pub fn features(&self) -> impl Iterator<Item = &FeatureId> {
        self.entries.keys()
    }

    pub fn dot(&self, other: &SparseVector<S>) -> S {
        // iterate the smaller side
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .entries
            .iter()
            .map(|(f, w)| *w * big.get(f))
            .sum()
    }

    pub fn norm_sq(&self) -> S {
        self.entries.values().map(|w| *w * *w).sum()
    }

    pub fn scale(&mut self, factor: S) {
        if factor == S::zero() {
            self.entries.clear();
        } else {
            for w in self.entries.values_mut() {
                *w = *w * factor;
            }
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: S, other: &SparseVector<S>) {
        for (f, w) in other.entries.iter() {
            self.add(f.clone(), factor * *w);
        }
    }
}

impl<S: Scalar> FromIterator<(FeatureId, S)> for SparseVector<S> {
    fn from_iter<T: IntoIterator<Item = (FeatureId, S)>>(iter: T) -> Self {
        let mut v = SparseVector::new();
        for (f, w) in iter {
            v.set(f, w);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fid(n: &str) -> FeatureId {
        FeatureId::term(n)
    }

    #[test]
    fn zero_weights_are_dropped() {
        let mut v: SparseVector<f64> = SparseVector::new();
        v.set(fid("a"), 1.0);
        v.set(fid("a"), 0.0);
        assert!(!v.contains(&fid("a")));
        v.add(fid("b"), 2.0);
        v.add(fid("b"), -2.0);
        assert!(v.is_empty());
    }

    #[test]
    fn dot_over_intersection() {
        let v: SparseVector<f64> = [(fid("a"), 2.0), (fid("b"), 3.0)].into_iter().collect();
        let w: SparseVector<f64> = [(fid("b"), 4.0), (fid("c"), 5.0)].into_iter().collect();
        assert_eq!(v.dot(&w), 12.0);
    }

    #[test]
    fn add_scaled_accumulates() {
        let mut v: SparseVector<f64> = [(fid("a"), 1.0)].into_iter().collect();
        let w: SparseVector<f64> = [(fid("a"), 2.0), (fid("b"), 1.0)].into_iter().collect();
        v.add_scaled(0.5, &w);
        assert_eq!(v.get(&fid("a")), 2.0);
        assert_eq!(v.get(&fid("b")), 0.5);
    }
}
