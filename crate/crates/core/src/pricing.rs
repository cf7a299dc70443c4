//! Consensus odds, per-wager margins and the seller's conditional mean
//! margin under noisy beliefs.
//!
//! Margins are in stake multiples: a settled wager at decimal odds `o`
//! pays the buyer `o - 1` on a win and costs one stake on a loss.

use serde::{Deserialize, Serialize};

use crate::beliefs::{BeliefEnvelope, Probability};
use crate::error::{check_closed, check_open, domain, Error, Result};
use crate::numeric::{xlog, xlog1p};

/// Expected payoff per unit stake.
pub type MarginValue = f64;

/// Weight `w1` placed on the seller's probability; the buyer's gets `1 - w1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightRule {
    w1: f64,
}

impl WeightRule {
    /// Equal weights, the basic game's pricing rule.
    pub const EQUAL: WeightRule = WeightRule { w1: 0.5 };
    /// All weight on the seller, as when one party quotes the odds.
    pub const SELLER_ONLY: WeightRule = WeightRule { w1: 1.0 };

    pub fn new(w1: f64) -> Result<Self> {
        check_closed("w1", w1, 0.0, 1.0, "0 <= w1 <= 1")?;
        Ok(Self { w1 })
    }

    pub fn w1(self) -> f64 {
        self.w1
    }

    pub fn buyer_weight(self) -> f64 {
        1.0 - self.w1
    }
}

impl Default for WeightRule {
    fn default() -> Self {
        Self::EQUAL
    }
}

/// An agreed probability and the decimal odds it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsensusQuote {
    pub p_c: Probability,
    pub odds: f64,
    pub rule: WeightRule,
}

impl ConsensusQuote {
    /// Quote at an agreed probability, rejecting `p_c = 0` (infinite odds).
    pub fn at(p_c: Probability, rule: WeightRule) -> Result<Self> {
        if p_c.get() <= 0.0 {
            return Err(Error::Degenerate("consensus probability is zero (infinite odds)"));
        }
        Ok(Self {
            p_c,
            odds: 1.0 / p_c.get(),
            rule,
        })
    }

    /// The same quote with its probability shifted by `m`.
    pub fn adjusted(&self, m: f64) -> Result<Self> {
        let p = self.p_c.get() + m;
        if !(p > 0.0 && p <= 1.0) {
            return Err(domain("p_c + m", p, "0 < p_c + m <= 1"));
        }
        Self::at(Probability::new(p)?, self.rule)
    }
}

/// Forms the consensus `p_c = p_b (1 - w1) + p_s w1`.
pub fn consensus(p_b: Probability, p_s: Probability, rule: WeightRule) -> Result<ConsensusQuote> {
    let p_c = p_b.get() * rule.buyer_weight() + p_s.get() * rule.w1();
    // A convex combination of two values in [0, 1] stays there.
    ConsensusQuote::at(Probability::new(p_c.clamp(0.0, 1.0))?, rule)
}

/// Buyer's subjective margin `(1/p_c - 1) p_b - (1 - p_b)`.
pub fn buyer_subjective_margin(p_b: Probability, quote: &ConsensusQuote) -> MarginValue {
    let p = p_b.get();
    (quote.odds - 1.0) * p - (1.0 - p)
}

/// Seller's subjective margin `(1 - p_s) - (1/p_c - 1) p_s`.
pub fn seller_subjective_margin(p_s: Probability, quote: &ConsensusQuote) -> MarginValue {
    let p = p_s.get();
    (1.0 - p) - (quote.odds - 1.0) * p
}

/// Seller's margin judged against the true frequency:
/// `(1 - p_t) - p_t (1/p_c - 1)`.
pub fn seller_objective_margin(p_t: Probability, p_c_effective: Probability) -> Result<MarginValue> {
    let q = p_c_effective.get();
    if q <= 0.0 {
        return Err(Error::Degenerate("effective consensus probability is zero"));
    }
    let p = p_t.get();
    Ok((1.0 - p) - p * (1.0 / q - 1.0))
}

/// The two readings of the cost/benefit asymmetry at mispricing `iota`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymmetry {
    /// Beneficial minus costly margin, `-2 ι p_t / (ι² - p_t²)`. Never negative.
    pub literal: f64,
    /// Beneficial plus costly margin, `-2 ι² / (p_t² - ι²)`. Never positive.
    pub net: f64,
}

/// Compares the seller's margin when `p_c = p_t + ι` (beneficial) with the
/// margin when `p_c = p_t - ι` (costly).
pub fn asymmetry_delta(p_t: Probability, iota: f64) -> Result<Asymmetry> {
    let p = p_t.get();
    if !(iota >= 0.0) || !iota.is_finite() {
        return Err(domain("iota", iota, "iota >= 0"));
    }
    if iota >= p {
        return Err(Error::Pole {
            name: "iota",
            value: iota,
        });
    }
    let denom = iota * iota - p * p;
    Ok(Asymmetry {
        literal: -2.0 * iota * p / denom,
        net: 2.0 * iota * iota / denom,
    })
}

/// Companion of [`asymmetry_delta`]: the sum of the two margins.
pub fn net_asymmetry(p_t: Probability, iota: f64) -> Result<f64> {
    asymmetry_delta(p_t, iota).map(|a| a.net)
}

/// Mean of the seller's objective margin over all wagers where the seller
/// holds the lower belief (`p_s < p_b`), both beliefs drawn from the
/// envelope around `p_t`, and the consensus weighs them by `rule`.
///
/// Below chance the value is flat in `p_t`; at and above chance it uses the
/// mirrored envelope. Every log difference is taken as a single `ln_1p` of
/// a ratio, since `c` and `d` are negative.
pub fn conditional_mean_seller_margin(p_t: Probability, epsilon: f64, rule: WeightRule) -> Result<MarginValue> {
    let p = p_t.get();
    check_open("p_t", p, 0.0, 1.0, "0 < p_t < 1")?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(domain("epsilon", epsilon, "0 < epsilon <= 1"));
    }
    let w1 = rule.w1();
    check_open("w1", w1, 0.0, 1.0, "0 < w1 < 1 (use the simulator at the endpoints)")?;

    let r = epsilon * p.min(1.0 - p) / p;
    if r < SERIES_CUTOFF {
        return Ok(small_noise_margin(r, w1));
    }

    let c = -p * (1.0 - epsilon);
    let d = -p * (epsilon + 1.0);
    let g = 2.0 * p * epsilon;

    if p < 0.5 {
        let dgw = d + g * w1;
        let z1 = g * (1.0 - w1) / dgw;
        let z2 = -g * w1 / dgw;
        check_log_arg(c, z1)?;
        check_log_arg(d, z2)?;
        let num = xlog1p(c, z1) / (1.0 - w1) + xlog1p(d, z2) / w1;
        Ok(1.0 + num / (g * epsilon))
    } else {
        let h = w1 * (g - 2.0 * epsilon) + epsilon - c;
        let z1 = (g - 2.0 * epsilon) * (1.0 - w1) / h;
        let z2 = -w1 * (g - 2.0 * epsilon) / h;
        check_log_arg(-(d + epsilon), z1)?;
        check_log_arg(epsilon - c, z2)?;
        let num = xlog1p(d + epsilon, z1) / (1.0 - w1) - xlog1p(epsilon - c, z2) / w1;
        // g ε (-4ε/g + 1/p² + 1) rearranged so it stays accurate as p -> 1.
        let denom = 2.0 * epsilon * epsilon * (1.0 - p) * (1.0 - p) / p;
        Ok(1.0 + num / denom)
    }
}

/// Below this relative half-width the log form loses digits to cancellation.
const SERIES_CUTOFF: f64 = 1e-3;

/// Series form of the conditional margin for a narrow envelope.
///
/// With beliefs `p_t (1 + r x)`, `x ~ U(-1, 1)`, the margin is
/// `E[1 - 1/(1 + rY)] = sum_k (-1)^(k+1) r^k E[Y^k]` where
/// `Y = w1 x_s + (1 - w1) x_b` over the ordered pair `x_s < x_b`.
fn small_noise_margin(r: f64, w1: f64) -> f64 {
    // E[x_s^j x_b^l] over the triangle -1 < x_s < x_b < 1 with density 1/2
    let even_int = |n: usize| if n.is_multiple_of(2) { 2.0 / (n + 1) as f64 } else { 0.0 };
    let pair_moment = |j: usize, l: usize| {
        let sign = if j.is_multiple_of(2) { -1.0 } else { 1.0 };
        (even_int(l + j + 1) - sign * even_int(l)) / (2.0 * (j + 1) as f64)
    };
    let mut total = 0.0;
    let mut rk = 1.0;
    for k in 1..=10usize {
        rk *= r;
        let mut moment = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            moment += binom * w1.powi(j as i32) * (1.0 - w1).powi((k - j) as i32) * pair_moment(j, k - j);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * rk * moment;
    }
    total
}

fn check_log_arg(prefactor: f64, z: f64) -> Result<()> {
    if prefactor != 0.0 && !(1.0 + z > 0.0) {
        return Err(domain("log-ratio argument", 1.0 + z, "positive"));
    }
    Ok(())
}

/// Which end of the weight interval a limit is taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WeightEnd {
    Buyer,
    Seller,
}

/// Limit of [`conditional_mean_seller_margin`] as `w1 -> 0` (all weight on
/// the buyer) or `w1 -> 1` (all weight on the seller), written in terms of
/// the envelope bounds.
pub(crate) fn weight_limit_margin(p_t: Probability, epsilon: f64, end: WeightEnd) -> Result<f64> {
    let env = BeliefEnvelope::new(p_t, epsilon)?;
    let (l, h) = (env.lower().get(), env.upper().get());
    let span = h - l;
    if !(span > 0.0) {
        return Err(Error::Degenerate("noise envelope has zero width (L = H)"));
    }
    let scale = 2.0 * p_t.get() / (span * span);
    let inner = match end {
        WeightEnd::Buyer => -xlog(l, l / h) - span,
        WeightEnd::Seller => span - xlog(h, h / l),
    };
    Ok(1.0 + scale * inner)
}
