//! Distribution of the true frequency `p_t` given an agreed probability `p_c`.
//!
//! Stacking the densities of `p_c` for every `p_t` under a uniform prior and
//! slicing at a fixed `p_c` gives a kernel in `p_t`. In the basic game the
//! consensus is the average of two uniform beliefs, so each slice is
//! triangular; when one party quotes alone it is uniform. The printed
//! kernels are proportional to the posterior, and [`PosteriorDensity`]
//! divides by their exact integral.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::beliefs::{BeliefEnvelope, Probability};
use crate::error::{domain, Error, Result};

/// How the consensus is formed from the beliefs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Equal weights on two noisy beliefs: `p_c` is triangular around `p_t`.
    BasicGame,
    /// One party quotes his own belief: `p_c` is uniform around `p_t`.
    DeFinetti,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::BasicGame, Variant::DeFinetti];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::BasicGame => "basic",
            Variant::DeFinetti => "definetti",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "basic" | "basic-game" | "basicgame" => Ok(Variant::BasicGame),
            "definetti" | "de-finetti" => Ok(Variant::DeFinetti),
            other => Err(Error::Config(format!(
                "unknown variant `{other}` (expected `basic` or `definetti`)"
            ))),
        }
    }
}

/// Symmetric triangular density of the consensus on `[L, H]`, peaking at
/// `p_t` with height `2 / (H - L)`.
pub fn consensus_density(p_c_value: Probability, env: &BeliefEnvelope) -> Result<f64> {
    if env.is_degenerate() {
        return Err(Error::Degenerate("noise envelope has zero width (L = H)"));
    }
    let (a, b) = (env.lower().get(), env.upper().get());
    let x = p_c_value.get();
    let w2 = (b - a) * (b - a);
    let v = if a + b < 2.0 * x && b >= x {
        4.0 * (b - x) / w2
    } else if a <= x && a + b >= 2.0 * x {
        -4.0 * (a - x) / w2
    } else {
        0.0
    };
    Ok(v)
}

/// Uniform density of a single quoted belief on `[L, H]`.
pub fn quote_density(p_c_value: Probability, env: &BeliefEnvelope) -> Result<f64> {
    if env.is_degenerate() {
        return Err(Error::Degenerate("noise envelope has zero width (L = H)"));
    }
    let x = p_c_value.get();
    let (a, b) = (env.lower().get(), env.upper().get());
    Ok(if a <= x && x <= b { 1.0 / (b - a) } else { 0.0 })
}

/// Interval of `p_t` values whose envelope can produce `p_c`.
pub fn support(p_c: f64, epsilon: f64) -> (f64, f64) {
    // (P - ε)/(1 - ε) and P/(1 - ε) run off to ∓∞ as ε -> 1, which is the
    // right limit: at full noise only the other bound binds.
    let lo = (p_c / (1.0 + epsilon)).max((p_c - epsilon) / (1.0 - epsilon));
    let hi = (p_c / (1.0 - epsilon)).min((p_c + epsilon) / (1.0 + epsilon));
    (lo, hi)
}

/// The piecewise kernel in `p_t` for the basic game, exactly as tabulated:
/// one pair of pieces below chance (`2ε p_t < ε`) and a mirrored pair at
/// and above it. Zero off the tabulated supports.
pub fn pt_density_given_pc(p_t_value: Probability, p_c: Probability, epsilon: f64) -> f64 {
    let t = p_t_value.get();
    let p = p_c.get();
    let e = epsilon;
    let e2 = e * e;
    if 2.0 * e * t < e {
        if p <= t && t <= p / (1.0 - e) {
            ((e - 1.0) * t + p) / (e2 * t * t)
        } else if p / (e + 1.0) <= t && t <= p {
            ((e + 1.0) * t - p) / (e2 * t * t)
        } else {
            0.0
        }
    } else {
        let u2 = (t - 1.0) * (t - 1.0);
        if p <= t && t <= (p + e) / (e + 1.0) {
            (e - (e + 1.0) * t + p) / (e2 * u2)
        } else if (p - e) / (1.0 - e) <= t && t <= p {
            (e + (1.0 - e) * t - p) / (e2 * u2)
        } else {
            0.0
        }
    }
}

/// The piecewise kernel in `p_t` when the quote carries only the quoting
/// party's belief: `1/(2ε(1 - p_t))` at and above chance, `1/(2ε p_t)` below.
pub fn definetti_pt_density(p_t_value: Probability, p_c: Probability, epsilon: f64) -> f64 {
    let t = p_t_value.get();
    let e = epsilon;
    let (lo, hi) = support(p_c.get(), e);
    if !(t >= lo && t <= hi) {
        return 0.0;
    }
    if 2.0 * e * t - e >= 0.0 {
        1.0 / (2.0 * e * (1.0 - t))
    } else {
        1.0 / (2.0 * e * t)
    }
}

/// Normalized density of `p_t` given `p_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDensity {
    pub p_c: Probability,
    pub epsilon: f64,
    pub variant: Variant,
    pub support_lo: Probability,
    pub support_hi: Probability,
    normalizer: f64,
    first_moment: f64,
}

impl PosteriorDensity {
    pub fn new(p_c: Probability, epsilon: f64, variant: Variant) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(domain("epsilon", epsilon, "0 < epsilon <= 1"));
        }
        let p = p_c.get();
        if p <= 0.0 || p >= 1.0 {
            return Err(Error::Degenerate("p_t given p_c is a point mass at p_c in {0, 1}"));
        }
        let (lo, hi) = support(p, epsilon);
        let (normalizer, first_moment) = moments(p, epsilon, variant, lo, hi);
        Ok(Self {
            p_c,
            epsilon,
            variant,
            support_lo: Probability::new(lo.clamp(0.0, 1.0))?,
            support_hi: Probability::new(hi.clamp(0.0, 1.0))?,
            normalizer,
            first_moment,
        })
    }

    /// The tabulated (unnormalized) kernel at `p_t`.
    pub fn kernel(&self, p_t: Probability) -> f64 {
        match self.variant {
            Variant::BasicGame => pt_density_given_pc(p_t, self.p_c, self.epsilon),
            Variant::DeFinetti => definetti_pt_density(p_t, self.p_c, self.epsilon),
        }
    }

    /// The kernel rebuilt from its definition: the density of `p_c` under
    /// the envelope around `p_t`. Shares no code with [`Self::kernel`].
    pub fn assembled_kernel(&self, p_t: f64) -> f64 {
        assembled_kernel(p_t, self.p_c, self.epsilon, self.variant)
    }

    pub fn pdf(&self, p_t: Probability) -> f64 {
        self.kernel(p_t) / self.normalizer
    }

    /// Integral of the kernel over its support.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Posterior mean of `p_t`.
    pub fn mean(&self) -> f64 {
        self.first_moment / self.normalizer
    }

    /// Integral of `p_t` times the kernel.
    pub fn kernel_first_moment(&self) -> f64 {
        self.first_moment
    }

    /// Points where the kernel has a kink or a jump.
    pub fn breakpoints(&self) -> [f64; 4] {
        [self.support_lo.get(), self.p_c.get(), 0.5, self.support_hi.get()]
    }
}

/// Density of `p_c` at the envelope around `t`, as a function of `t`.
pub fn assembled_kernel(t: f64, p_c: Probability, epsilon: f64, variant: Variant) -> f64 {
    let Ok(pt) = Probability::new(t) else {
        return 0.0;
    };
    let Ok(env) = BeliefEnvelope::new(pt, epsilon) else {
        return 0.0;
    };
    let density = match variant {
        Variant::BasicGame => consensus_density(p_c, &env),
        Variant::DeFinetti => quote_density(p_c, &env),
    };
    density.unwrap_or(0.0)
}

/// `(∫k, ∫t·k)` over the support, in closed form.
fn moments(p: f64, e: f64, variant: Variant, lo: f64, hi: f64) -> (f64, f64) {
    let mut z = 0.0;
    let mut m1 = 0.0;
    // clip [a, b] to one side of chance
    let below = |a: f64, b: f64| (a.max(lo), b.min(hi).min(0.5));
    let above = |a: f64, b: f64| (a.max(lo).max(0.5), b.min(hi));
    match variant {
        Variant::BasicGame => {
            // k = (αs + β)/(ε² s²) with s = t below chance, s = 1 - t above
            let pieces = [
                (below(f64::NEG_INFINITY, p), 1.0 + e, -p, false),
                (below(p, f64::INFINITY), e - 1.0, p, false),
                (above(p, f64::INFINITY), 1.0 + e, -(1.0 - p), true),
                (above(f64::NEG_INFINITY, p), e - 1.0, 1.0 - p, true),
            ];
            for ((a, b), alpha, beta, mirrored) in pieces {
                if b <= a {
                    continue;
                }
                let f = |s: f64| (alpha * s.ln() - beta / s) / (e * e);
                let g = |s: f64| (alpha * s + beta * s.ln()) / (e * e);
                if mirrored {
                    let (s0, s1) = (1.0 - b, 1.0 - a);
                    z += f(s1) - f(s0);
                    m1 += (f(s1) - f(s0)) - (g(s1) - g(s0));
                } else {
                    z += f(b) - f(a);
                    m1 += g(b) - g(a);
                }
            }
        }
        Variant::DeFinetti => {
            let (a, b) = below(f64::NEG_INFINITY, f64::INFINITY);
            if b > a {
                z += (b / a).ln() / (2.0 * e);
                m1 += (b - a) / (2.0 * e);
            }
            let (a, b) = above(f64::NEG_INFINITY, f64::INFINITY);
            if b > a {
                let (s0, s1) = (1.0 - b, 1.0 - a);
                z += (s1 / s0).ln() / (2.0 * e);
                m1 += ((s1 / s0).ln() - (s1 - s0)) / (2.0 * e);
            }
        }
    }
    (z, m1)
}
