//! Exact derangement, harmonic, hyperharmonic and degenerate (λ-deformed)
//! harmonic numbers, with machinery to verify their recurrences, closed forms
//! and generating functions by exact comparison.
//!
//! Degenerate quantities are polynomials in a formal λ ([`exact::LPoly`]);
//! equality of two such polynomials certifies an identity for every λ.

pub mod cli;
pub mod exact;
pub mod identities;
pub mod sequences;
pub mod series;

pub use exact::{ExactError, ExactValue, Int, LPoly, Rat};
pub use identities::{CheckContext, CheckReport, IdentityId, Params};
pub use sequences::{SequenceCache, SequenceKind, SequenceTable};
