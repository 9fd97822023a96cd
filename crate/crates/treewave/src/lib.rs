//! Wavelength assignment for all-to-all routing on tree-shaped optical
//! networks.
//!
//! The crate builds the tree families (complete m-ary trees, spiders,
//! double trees), enumerates their unique all-to-all routing, computes
//! cut-based lower bounds and the edge-forwarding index, produces optimal
//! wavelength assignments via closed-form constructions, and certifies
//! optimality against an independent exact chromatic-number search.

pub mod bounds;
pub mod colorings;
pub mod designs;
pub mod exact;
pub mod graph;
pub mod table;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("self-verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
