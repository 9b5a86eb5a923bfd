//! Adaptive document filtering from faceted feedback.
//!
//! An incoming stream of semi-structured documents is filtered against a
//! per-topic user profile — a logistic model over term, facet-value, and
//! bias features. The profile learns from two feedback channels: binary
//! relevance judgments on delivered documents, and labels on facet-value
//! features a user marks as evidence of relevance (sufficiency) or as an
//! expected property of relevant documents (necessity). The constraint
//! model ties the model-implied sufficiency and necessity of labeled
//! features to reference distributions through KL penalties, sharing one
//! unified objective with the plain L2 logistic baseline.
//!
//! Numeric code is generic over the scalar type (`f32`/`f64`) via
//! [`scalar::Scalar`]; the aliases below fix `f64` for ordinary use.

pub mod baselines;
pub mod candidates;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod feature;
pub mod gcm;
pub mod metrics;
pub mod optim;
pub mod profile;
pub mod scalar;
pub mod sim;
pub mod sparse;

pub use error::{Error, Result};

/// Default scalar type for the engine.
pub type Scalar = f64;

/// Sparse feature vector over [`Scalar`].
pub type SparseVector = sparse::SparseVector<Scalar>;

/// User profile over [`Scalar`].
pub type UserProfile = profile::UserProfile<Scalar>;

/// Labeled document set over [`Scalar`].
pub type LabeledSet = profile::LabeledSet<Scalar>;
