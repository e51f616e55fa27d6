//! Simulation and verification toolkit for randomized two-party protocols
//! built around equality fingerprinting and greater-than comparison, plus the
//! proof-theoretic machinery they plug into: a Cutting Planes refutation
//! verifier, search trees extracted from tree-like refutations, and the
//! two-party search game played over those trees with threshold-function
//! subprotocols.
//!
//! Everything is exact and reproducible: inputs and protocol randomness come
//! from seedable counter-mode coin streams, transcripts account every bit a
//! protocol charges, arithmetic on coefficients is arbitrary-precision, and
//! error probabilities can be measured empirically against their analytic
//! budgets (see [`bench`]).
//!
//! Module map:
//!
//! * [`bits`], [`coins`], [`transcript`] — shared plumbing: packed bit
//!   strings, shared randomness, bit accounting.
//! * [`eq`] — one-sided-error equality via inner-product fingerprints.
//! * [`gt`] — baseline greater-than: binary search over prefixes with
//!   high-confidence equality checks.
//! * [`walk`] — greater-than as a random walk over a search tree with cheap,
//!   constant-size checks and backtracking; chains below the leaves absorb
//!   confident answers.
//! * [`threshold`] — degree-1 threshold functions with big-integer
//!   coefficients, evaluated by two parties via one walk comparison.
//! * [`cp`] — Cutting Planes refutations: parsing and line-by-line
//!   verification.
//! * [`kw`] — search trees from tree-like refutations and the randomized
//!   two-party game that finds a falsified axiom.
//! * [`bench`] — seeded empirical error/communication measurements.

pub mod bench;
pub mod bits;
pub mod coins;
pub mod cp;
pub mod eq;
pub mod error;
pub mod gt;
pub mod kw;
pub mod threshold;
pub mod transcript;
pub mod walk;

mod util;

pub use bits::BitString;
pub use coins::{CoinSource, CoinStream, ExplicitCoins};
pub use error::ProtocolError;
pub use transcript::{bits_used, Party, ProtocolResult, Transcript, TranscriptEvent};
