//! The weight on the seller's belief that makes the basic game fair for a
//! given true frequency and noise level. No closed form exists, so it is
//! found by a bracketed search over `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::beliefs::Probability;
use crate::error::{check_closed, check_open, Error, Result};
use crate::numeric::bracketed_root;
use crate::pricing::{conditional_mean_seller_margin, weight_limit_margin, WeightEnd, WeightRule};

/// Endpoint values this close to zero are taken as exact roots.
const ENDPOINT_TOL: f64 = 1e-12;

/// Fair weight on the seller's probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct W1Star {
    pub w1: f64,
    /// Every weight is fair (no noise); `w1` is the conventional 1/2.
    pub degenerate: bool,
    /// Conditional mean seller margin at `w1`.
    pub residual: f64,
}

/// Seller's conditional mean margin as a function of `w1` on the closed
/// interval, using the limiting values at the ends.
fn margin_at(p_t: Probability, epsilon: f64, w1: f64) -> f64 {
    let v = if w1 <= 0.0 {
        weight_limit_margin(p_t, epsilon, WeightEnd::Buyer)
    } else if w1 >= 1.0 {
        weight_limit_margin(p_t, epsilon, WeightEnd::Seller)
    } else {
        WeightRule::new(w1).and_then(|r| conditional_mean_seller_margin(p_t, epsilon, r))
    };
    v.unwrap_or(f64::NAN)
}

/// Finds `w1*` such that the seller's conditional mean margin is zero.
pub fn solve_w1_star(p_t: Probability, epsilon: f64) -> Result<W1Star> {
    check_open("p_t", p_t.get(), 0.0, 1.0, "0 < p_t < 1")?;
    check_closed("epsilon", epsilon, 0.0, 1.0, "0 <= epsilon <= 1")?;
    if epsilon == 0.0 {
        return Ok(W1Star {
            w1: 0.5,
            degenerate: true,
            residual: 0.0,
        });
    }
    let f = |w: f64| margin_at(p_t, epsilon, w);
    let (f0, f1) = (f(0.0), f(1.0));
    for (w, v) in [(0.0, f0), (1.0, f1)] {
        if v.abs() <= ENDPOINT_TOL {
            return Ok(W1Star {
                w1: w,
                degenerate: false,
                residual: v,
            });
        }
    }
    // With L = 0 the seller-only limit is -inf; step inside the interval.
    let hi = if f1.is_finite() { 1.0 } else { 1.0 - 1e-12 };
    let w1 = bracketed_root(f, 0.0, hi, 1e-12).map_err(|e| match e {
        Error::NoRoot { .. } => Error::NoRoot {
            lo: 0.0,
            hi: 1.0,
            f_lo: f0,
            f_hi: f1,
        },
        other => other,
    })?;
    Ok(W1Star {
        w1,
        degenerate: false,
        residual: f(w1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prob(x: f64) -> Probability {
        Probability::new(x).unwrap()
    }

    #[test]
    fn full_noise_below_chance_puts_all_weight_on_the_buyer() {
        for p in [0.1, 0.3, 0.5] {
            let w = solve_w1_star(prob(p), 1.0).unwrap();
            assert!(w.w1 < 1e-9, "p={p}: {}", w.w1);
        }
    }

    #[test]
    fn no_noise_is_degenerate() {
        let w = solve_w1_star(prob(0.3), 0.0).unwrap();
        assert!(w.degenerate);
        assert_eq!(w.w1, 0.5);
    }

    #[test]
    fn plug_back() {
        for p in [0.3, 0.7] {
            for e in [0.25, 0.75] {
                let w = solve_w1_star(prob(p), e).unwrap();
                assert!(w.w1 > 0.0 && w.w1 < 0.5);
                let r = conditional_mean_seller_margin(prob(p), e, WeightRule::new(w.w1).unwrap()).unwrap();
                assert!(r.abs() < 1e-10, "p={p} e={e}: {r}");
            }
        }
    }

    #[test]
    fn nonincreasing_in_noise() {
        for p in [0.05, 0.2, 0.35, 0.5] {
            let mut prev = f64::INFINITY;
            for k in 1..=20 {
                let e = k as f64 / 20.0;
                let w = solve_w1_star(prob(p), e).unwrap().w1;
                assert!(w <= prev + 1e-12, "p={p} e={e}: {w} > {prev}");
                prev = w;
            }
        }
    }
}
