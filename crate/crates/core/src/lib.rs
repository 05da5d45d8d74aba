//! Attachable state objects with swappable big-memory backings.
//!
//! An abstract object declares a logical interface plus executable bindings
//! over a foundation. Declaring it *attachable* lets a session substitute
//! another object's bindings at definition time, without touching the books
//! that were written against the interface. The crate pairs that mechanism
//! with three interchangeable byte-memory models and a deterministic
//! benchmark harness:
//!
//! - [`registry`]: the world of defined objects, the attachment table,
//!   compatibility checking, and exec/foundation substitution.
//! - [`loader`]: book scripts with include semantics, compiled-cache
//!   handling, and dispatch tracing.
//! - [`memory`]: the uniform-cost paged model, the flat-plus-list
//!   asymmetric model, a brute-force oracle, and the registry-backed
//!   `attached` construction.
//! - [`bench`]: splitmix64-driven workloads, timing, and report formats.
//! - [`fuzz`]: the oracle-equivalence harness.

pub mod bench;
pub mod fuzz;
mod ident;
pub mod loader;
pub mod memory;
pub mod registry;

pub use ident::{Ident, InvalidIdent};
