//! Permutation modulation spherical codes with rate adaptation.
//!
//! A permutation modulation code takes an initial vector whose entries are
//! `k` distinct values with multiplicities `m = (m_1, ..., m_k)` and uses
//! all `M = n!/(m_1!...m_k!)` distinct rearrangements of it as unit-norm
//! codewords. This crate constructs such codes for arbitrary target rates
//! by selecting `N <= M` rearrangements spread as evenly as possible along
//! a transposition Gray ordering of the multiset permutations, and decodes
//! them over an AWGN channel with a candidate-list detector whose cost is
//! independent of `N`.
//!
//! Module map:
//!
//! - [`ivp`] -- initial vector design (energy-minimizing value/multiplicity
//!   pairs) and parameter search for a target `(n, R)`.
//! - [`mperm`] -- multiset permutation combinatorics: Gray listing,
//!   lexicographic rank/unrank, and the lex-to-Gray translation table.
//! - [`codebook`] -- rate-adapted codeword selection, encoding, and the
//!   binary codebook format.
//! - [`channel`] -- AWGN transmission with a per-trial seeded noise stream.
//! - [`decoder`] -- rank-order detection, candidate-list decoding, and an
//!   exact maximum-likelihood reference.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature
//! (on by default) only adds `std::error::Error` impls for the error types.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channel;
pub mod codebook;
pub mod decoder;
pub mod ivp;
pub mod mperm;

pub use channel::ChannelParams;
pub use codebook::{Codebook, SelectionPlan};
pub use decoder::{DecodeResult, MlDecodeResult};
pub use ivp::InitialVector;
pub use mperm::SymbolSequence;
