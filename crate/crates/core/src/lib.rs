//! Type embeddings derived from pre-trained entity embeddings.
//!
//! A type is represented extensionally by the entities asserted to have it:
//! its embedding is the normalized weighted mean of those entities' unit
//! vectors, where an entity with `n` distinct types contributes `1/n` of its
//! vector to each. Derivation is a two-pass stream over the type assertions
//! ([`embedder`]), after which the model scores arbitrary entity vectors
//! against every type ([`recommend`]).
//!
//! The crate is `no_std` (with `alloc`); file formats, streaming IO and the
//! command line live in the `typeforge` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x >= bound)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod embedder;
pub mod error;
pub mod eval;
pub mod knn;
pub mod ontology;
pub mod partition;
pub mod projection;
pub mod recommend;
pub mod store;
pub mod tsne;
pub mod vector;

pub use embedder::{Accumulator, Observation, TypeCensus, TypeCounter, TypeEmbeddingModel};
pub use error::{Error, Result};
pub use eval::{recall_at_k, RecallAccumulator, Truth};
pub use knn::KnnIndex;
pub use ontology::OntologyIndex;
pub use partition::{PartitionSpec, StratifiedPartitioner};
pub use projection::{select_subtype_matrix, ProjectionJob};
pub use recommend::{Normalizer, RecommendationList, Recommender, ScoredType, TypeId, TypeScorer};
pub use store::{EntityEmbeddingStore, InsertOutcome};
pub use tsne::{TsneConfig, TsneOutput};

/// A `(subject, rdf:type, type)` statement with both ends resolved to IRIs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeAssertion {
    pub subject: alloc::string::String,
    pub type_iri: alloc::string::String,
}

impl TypeAssertion {
    pub fn new(
        subject: impl Into<alloc::string::String>,
        type_iri: impl Into<alloc::string::String>,
    ) -> Self {
        Self {
            subject: subject.into(),
            type_iri: type_iri.into(),
        }
    }
}
