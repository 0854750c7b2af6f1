//! Assisted quantum secret sharing (AQSS) toolkit.
//!
//! Conventional quantum secret sharing requires every pair of authorized sets
//! to overlap, otherwise two disjoint coalitions could each reconstruct a copy
//! of the quantum secret and violate no-cloning. This crate implements the
//! assisted variant, where the dealer withholds a small number of *home
//! shares* so that arbitrary monotone access structures become realizable:
//!
//! * [`access`] — access-structure parsing and analysis: the pairwise-overlap
//!   (no-cloning) check, the access-structure graph, exact minimum clique
//!   partitions (the partial-link classification number λ), maximalization,
//!   and nested-threshold share plans with λ−1 home shares.
//! * [`quantum`] — a dense statevector simulator for registers of
//!   prime-dimension qudits: permutation gates, Fourier/diagonal bases,
//!   measurement, partial trace, state distances, and the quantum one-time
//!   pad.
//! * [`schemes`] — finite-field machinery, Shamir and monotone classical
//!   secret sharing, and the polynomial-code quantum threshold scheme.
//! * [`engine`] — end-to-end quantum execution of share plans: sharing,
//!   coalition reconstruction, leakage certification, and the
//!   encrypted-home-share variant.
//! * [`qkd`] — a two-group key distribution protocol built from EPR pairs
//!   merged into GHZ states, with parity sifting, an abort decision, and
//!   code-based reconciliation.
//! * [`oracle`] — independent brute-force oracles used by the acceptance
//!   tests and the `aqss oracle` subcommand.
//!
//! Every stochastic operation takes an explicit [`rng::RngStream`], so whole
//! runs replay bit-identically from one seed.

pub mod access;
pub mod cli;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod qkd;
pub mod quantum;
pub mod report;
pub mod rng;
pub mod schemes;

pub use error::{Error, Result};
