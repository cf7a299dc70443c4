//! Probabilities, weight of evidence and the noise envelope around a true
//! relative frequency.
//!
//! Weight of evidence is measured in bans (log10 of a likelihood ratio) and
//! maps to probability through the base-10 logistic `1 / (10^-w + 1)`.
//! A bettor's belief about an event with relative frequency `p_t` is a
//! uniform draw from `[L, H] = [p_t - E, p_t + E]`, `E = ε·min(p_t, 1 - p_t)`.

use std::f64::consts::LN_10;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_closed, domain, Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        check_closed("probability", value, 0.0, 1.0, "0 <= p <= 1")?;
        Ok(Self(value))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Probability of the complementary outcome.
    #[inline]
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Weight of evidence for a hypothesis, in bans.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct WeightOfEvidence(f64);

impl WeightOfEvidence {
    pub fn new(bans: f64) -> Result<Self> {
        if bans.is_finite() {
            Ok(Self(bans))
        } else {
            Err(domain("weight of evidence", bans, "finite"))
        }
    }

    #[inline]
    pub fn bans(self) -> f64 {
        self.0
    }
}

impl fmt::Display for WeightOfEvidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ban", self.0)
    }
}

#[inline]
fn logistic10(w: f64) -> f64 {
    1.0 / (10f64.powf(-w) + 1.0)
}

/// Converts evidence to probability: `1 / (10^-w + 1)`.
///
/// Evidence for one hypothesis is evidence against its complement, so
/// `woe_to_probability(w) + woe_to_probability(-w) == 1` up to rounding.
/// Beyond roughly ±16 bans the result rounds to exactly 0 or 1.
pub fn woe_to_probability(w: WeightOfEvidence) -> Probability {
    Probability(logistic10(w.0))
}

/// Inverse of [`woe_to_probability`]: `-ln((1 - p) / p) / ln 10`.
///
/// Certainty carries infinite evidence and is rejected.
pub fn probability_to_woe(p: Probability) -> Result<WeightOfEvidence> {
    let p = p.get();
    if p <= 0.0 || p >= 1.0 {
        return Err(domain("probability", p, "0 < p < 1 (finite evidence)"));
    }
    Ok(WeightOfEvidence(-((1.0 - p) / p).ln() / LN_10))
}

/// The interval `[L, H]` from which noisy beliefs about `p_t` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefEnvelope {
    p_t: Probability,
    epsilon: f64,
    e: f64,
    l: Probability,
    h: Probability,
}

impl BeliefEnvelope {
    pub fn new(p_t: Probability, epsilon: f64) -> Result<Self> {
        check_closed("epsilon", epsilon, 0.0, 1.0, "0 <= epsilon <= 1")?;
        let p = p_t.get();
        let e = epsilon * (1.0 - p).min(p);
        // p ± e stays inside [0, 1] by construction; clamp away rounding.
        let l = (p - e).clamp(0.0, p);
        let h = (p + e).clamp(p, 1.0);
        Ok(Self {
            p_t,
            epsilon,
            e,
            l: Probability(l),
            h: Probability(h),
        })
    }

    pub fn p_t(&self) -> Probability {
        self.p_t
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Half-width `E`.
    pub fn half_width(&self) -> f64 {
        self.e
    }

    pub fn lower(&self) -> Probability {
        self.l
    }

    pub fn upper(&self) -> Probability {
        self.h
    }

    pub fn width(&self) -> f64 {
        self.h.0 - self.l.0
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.h.0 > self.l.0)
    }

    /// `(L, H)` read off the rhombus traced by the four lines
    /// `(1 ± ε)·p_t`, `(1 - ε)·p_t + ε` and `(1 + ε)·p_t - ε`:
    /// `H = min(left, top)`, `L = max(right, bottom)`.
    pub fn rhombus_bounds(&self) -> (f64, f64) {
        rhombus_bounds(self.p_t.get(), self.epsilon)
    }

    fn require_spread(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::Degenerate("noise envelope has zero width (L = H)"))
        } else {
            Ok(())
        }
    }
}

/// `(L, H)` from the rhombus form, for any `p_t` in `[0, 1]`.
pub fn rhombus_bounds(p_t: f64, epsilon: f64) -> (f64, f64) {
    let left = (1.0 + epsilon) * p_t;
    let top = (1.0 - epsilon) * p_t + epsilon;
    let right = (1.0 + epsilon) * p_t - epsilon;
    let bottom = (1.0 - epsilon) * p_t;
    (right.max(bottom), left.min(top))
}

/// Builds the envelope for `p_t` at noise fraction `epsilon`.
pub fn belief_envelope(p_t: Probability, epsilon: f64) -> Result<BeliefEnvelope> {
    BeliefEnvelope::new(p_t, epsilon)
}

/// Draws one belief uniformly from `[L, H]`.
pub fn sample_belief<R: Rng + ?Sized>(env: &BeliefEnvelope, rng: &mut R) -> Probability {
    let u: f64 = rng.random();
    let x = env.l.0 + env.width() * u;
    Probability(x.clamp(env.l.0, env.h.0))
}

/// Range of evidence `[woe(L), woe(H)]` consistent with the envelope.
/// Endpoints are infinite when `L = 0` or `H = 1`.
pub fn woe_support(env: &BeliefEnvelope) -> (f64, f64) {
    let to_woe = |p: f64| {
        if p <= 0.0 {
            f64::NEG_INFINITY
        } else if p >= 1.0 {
            f64::INFINITY
        } else {
            (p / (1.0 - p)).log10()
        }
    };
    (to_woe(env.l.0), to_woe(env.h.0))
}

/// CDF of the gathered evidence when beliefs are uniform on `[L, H]`:
/// `clamp((σ(w) - L) / (H - L), 0, 1)` with `σ` the base-10 logistic.
pub fn woe_cdf(w: WeightOfEvidence, env: &BeliefEnvelope) -> Result<f64> {
    env.require_spread()?;
    let p = logistic10(w.0);
    Ok(((p - env.l.0) / env.width()).clamp(0.0, 1.0))
}

/// The same CDF evaluated segment by segment, with the selectors
/// `a = ln(1/H - 1) + w ln 10` and `b = ln(1/L - 1) + w ln 10`.
///
/// `a > 0` exactly when `σ(w) > H` and `b > 0` exactly when `σ(w) > L`, so
/// the segment with `a > 0` and `L > 0` is the upper tail (value 1) and the
/// fall-through segment is the lower tail (value 0).
pub fn woe_cdf_segmented(w: WeightOfEvidence, env: &BeliefEnvelope) -> Result<f64> {
    env.require_spread()?;
    let (l, h) = (env.l.0, env.h.0);
    let w = w.0;
    let a = (1.0 / h - 1.0).ln() + w * LN_10;
    let b = (1.0 / l - 1.0).ln() + w * LN_10;
    let span = h - l;
    let value = if l > 0.0 && a > 0.0 {
        1.0
    } else if l == 0.0 && a <= 0.0 {
        let t = 10f64.powf(w);
        if t.is_infinite() {
            1.0 / span
        } else {
            t / ((t + 1.0) * span)
        }
    } else if l == 0.0 && a > 0.0 {
        h / span
    } else if l > 0.0 && a <= 0.0 && b > 0.0 {
        (1.0 - 2.0 * l + (0.5 * w * LN_10).tanh()) / (2.0 * span)
    } else {
        0.0
    };
    Ok(value)
}

/// Density of the gathered evidence, per ban:
/// `10^w ln 10 / ((10^w + 1)^2 (H - L))` on `[woe(L), woe(H)]`, else 0.
pub fn woe_pdf(w: WeightOfEvidence, env: &BeliefEnvelope) -> Result<f64> {
    env.require_spread()?;
    let p = logistic10(w.0);
    if p < env.l.0 || p > env.h.0 {
        return Ok(0.0);
    }
    // 10^w / (10^w + 1)^2 == σ(w)·(1 - σ(w)), which does not overflow.
    let q = logistic10(-w.0);
    Ok(p * q * LN_10 / env.width())
}
