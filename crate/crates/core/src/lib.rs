//! Keyword-guessing laboratory for a pairing-based multi-owner searchable
//! encryption scheme.
//!
//! - [`group`]: symmetric pairing interface over BLS12-381 with optional
//!   exponent transcripts for independent checking.
//! - [`prmkr`]: the scheme as published, weaknesses included.
//! - [`attacks`]: offline keyword guessing on indexes and trapdoors, trapdoor
//!   forgery with a leaked `r_i`, the mismatched-randomness correctness
//!   failure, and document decryption from public parameters.
//! - [`hardened`]: the master-secret blinded variant.
//! - [`store`]: encrypted document store and file-backed cloud directory.
//! - [`envelope`]: typed JSON file envelopes.
//! - [`cli`]: the `kga-lab` command-line harness.

pub mod attacks;
pub mod cli;
pub mod demo;
pub mod envelope;
pub mod group;
pub mod hardened;
pub mod prmkr;
pub mod store;

pub use group::{GroupElement, HashSpec, Scalar, TargetElement};
