//! Local distinguishability of generalized Bell states in C^d ⊗ C^d.
//!
//! A generalized Bell state is the maximally entangled state |X^m Z^n⟩ obtained
//! from the canonical state |1⟩ = Σ_a |a⟩|a⟩/√d by applying a Weyl operator on
//! Alice's side. This crate decides when a set of them can be told apart by
//! local operations and classical communication:
//!
//! - [`zmod`]: residues mod d and the group Sp(d) with its affine action.
//! - [`weyl`]: symbolic Weyl operators, GBS sets and their dense realizations.
//! - [`criterion`]: F-type / F-equivalence tests, exact cyclotomic vanishing
//!   sums and the prime-dimension classifier.
//! - [`clifford`]: unitary synthesis for Sp(d) elements and set transforms.
//! - [`oracle`]: one-way LOCC certificates (states making the shifted copies
//!   pairwise orthogonal), analytic and by numerical search.
//! - [`protocol`]: Monte-Carlo simulation of the computational-basis protocol.
//! - [`census`]: exhaustive or sampled classification of all ℓ-subsets.
//! - [`cli`]: the command implementations behind the `gbs-locc` binary.

pub mod census;
pub mod cli;
pub mod clifford;
pub mod criterion;
mod error;
pub mod oracle;
pub mod protocol;
pub mod weyl;
pub mod zmod;

pub use error::{Error, Result};
