//! Two-party inconsistency measurement over private propositional knowledge bases.
//!
//! Two agents each hold a knowledge base over a shared signature. The protocols in
//! [`protocols`] let them compute the drastic measure of the union, and an upper bound of
//! the contension measure, while exchanging only ciphertexts produced by the homomorphic
//! emulation in [`he`]. Every protocol result has a plaintext counterpart in [`measures`],
//! and [`privacy`] audits recorded transcripts for input leakage.
//!
//! ## Modules
//!
//! * [`logic`]: formulas, knowledge bases, two- and three-valued semantics, model enumeration.
//! * [`measures`]: plaintext reference measures (drastic, contension, min-mismatch).
//! * [`he`]: probabilistic public-key sealing plus operation-expression ciphertexts over Z_q.
//! * [`runtime`]: frames, length-prefixed wire format, memory/TCP channels, transcripts.
//! * [`protocols`]: the two-party state machines.
//! * [`privacy`]: transcript audit and guessing-probability bounds.
//!
//! Data-parallel loops (interpretation enumeration, batch encryption, per-row circuits) run on
//! rayon when the `parallel` feature is enabled and fall back to plain iterators otherwise; see
//! [`Exec`].
#![deny(unsafe_code)]

pub mod he;
pub mod limits;
pub mod logic;
pub mod measures;
mod par;
pub mod privacy;
pub mod protocols;
pub mod runtime;

pub use par::Exec;
