//! Fair odds for noisy probabilities.
//!
//! Two bettors hold unbiased but noisy beliefs about a binary event whose
//! true relative frequency is `p_t`. Each belief is a uniform draw from an
//! envelope `[L, H]` around `p_t`, the bettor with the higher belief backs
//! the event, and the pair wagers at the odds implied by a weighted
//! consensus `p_c`. This crate evaluates the resulting margins in closed
//! form, solves for the shift `m` that makes odds `1 / (p_c + m)` fair, and
//! checks every closed form against quadrature and Monte Carlo oracles.
//!
//! Module map:
//!
//! - [`beliefs`]: probabilities, weight of evidence (bans) and the noise envelope.
//! - [`pricing`]: consensus, subjective/objective margins, the seller's
//!   conditional mean margin at fixed `p_t`.
//! - [`posterior`]: the distribution of `p_c` given `p_t` and of `p_t` given `p_c`.
//! - [`fairsolver`]: the piecewise mean-margin systems, fair adjustments and `w1*`.
//! - [`montecarlo`]: the basic game and the elicitation game, simulated end to end.
//! - [`verify`], [`figures`]: oracle sweeps and plot-ready data series.
//! - [`cli`]: the `noisyodds` command line.

// Negated float comparisons are how NaN gets rejected; segment tests read
// like the inequalities they encode.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_range_contains)]

pub mod beliefs;
pub mod cli;
mod error;
pub mod fairsolver;
pub mod figures;
pub mod manifest;
pub mod montecarlo;
pub mod numeric;
pub mod posterior;
pub mod pricing;
pub mod verify;

pub use beliefs::{BeliefEnvelope, Probability, WeightOfEvidence};
pub use error::{Error, Result};
pub use fairsolver::{Adjustment, W1Star};
pub use posterior::{PosteriorDensity, Variant};
pub use pricing::{ConsensusQuote, WeightRule};

/// Master seed used when neither `--seed` nor `NOISYODDS_SEED` is given.
pub const DEFAULT_SEED: u64 = 0x5eed;
