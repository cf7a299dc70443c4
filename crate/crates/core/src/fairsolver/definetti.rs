//! Five-segment system for a quote that carries only the quoting party's
//! noisy belief, the counterpart choosing her side afterwards.
//!
//! Region table (first match wins, `P = p_c`):
//!
//! | seg | region                                            |
//! |-----|---------------------------------------------------|
//! | i   | `2P + ε <= 1` (`< 1` once `ε >= 1/3`)             |
//! | ii  | `2P > 1 + ε`                                      |
//! | iii | `2P = 1 + ε`, `ε < 1`                             |
//! | iv  | `1 - ε < 2P < 1 + ε`                              |
//! | v   | `2P + ε = 1`, `1/3 <= ε < 1`                      |
//!
//! The tabulated conditions leave `ε = 1` to a zero fall-through, but the
//! iv expression stays valid there (its intermediates do not involve
//! `atanh ε`), so iv is continued to `ε = 1`. In `x2 = ln((1 - P)/P_C)` the
//! bare `P` is read as `P_C`.

use super::{check_inputs, check_m, Form, PiecewiseEvaluation, Segment};
use crate::beliefs::Probability;
use crate::error::{Error, Result};
use crate::posterior::Variant;

/// Intermediates shared by the five segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeFinettiSubstitutions {
    pub x: [f64; 8],
}

impl DeFinettiSubstitutions {
    const NAMES: [&'static str; 8] = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"];

    #[inline]
    fn get(&self, i: usize) -> f64 {
        self.x[i - 1]
    }

    pub fn named(&self) -> Vec<(&'static str, f64)> {
        Self::NAMES.iter().copied().zip(self.x.iter().copied()).collect()
    }
}

/// Substitution table at `(p_c, ε)`.
pub fn definetti_substitutions(p_c: Probability, epsilon: f64) -> DeFinettiSubstitutions {
    let p = p_c.get();
    let e = epsilon;
    let x1 = ((1.0 - p) / (e + 1.0)).ln();
    let x2 = ((1.0 - p) / p).ln();
    let x3 = (p / (e + 1.0)).ln();
    let x4 = ((e + 1.0) / p).ln();
    let x5 = std::f64::consts::LN_2;
    let x6 = e.atanh();
    let x7 = -x1 - x3 - 2.0 * x5;
    let x8 = 4.0 * x5 - 4.0 * x4;
    DeFinettiSubstitutions {
        x: [x1, x2, x3, x4, x5, x6, x7, x8],
    }
}

/// First segment whose tabulated condition holds, `None` on the zero
/// fall-through.
fn tabulated_segment(p: f64, e: f64) -> Option<Segment> {
    let third = 1.0 / 3.0;
    if e + 1.0 >= 2.0 * p
        && ((0.0 < e && e < third && (2.0 * p + e == 1.0 || (p > 0.0 && 2.0 * p + e <= 1.0)))
            || (p > 0.0 && 3.0 * e >= 1.0 && 2.0 * p + e < 1.0))
    {
        Some(Segment::I)
    } else if e + 1.0 < 2.0 * p && p < 1.0 && ((2.0 * p + e > 1.0 && e > 0.0) || (2.0 * p + e >= 1.0 && 3.0 * e >= 1.0))
    {
        Some(Segment::II)
    } else if 2.0 * p + e > 1.0 && e < 1.0 && e + 1.0 == 2.0 * p {
        Some(Segment::III)
    } else if e < 1.0 && e + 1.0 > 2.0 * p && 2.0 * p + e > 1.0 {
        Some(Segment::IV)
    } else if third <= e && e < 1.0 && e + 1.0 > 2.0 * p && 2.0 * p + e == 1.0 {
        Some(Segment::V)
    } else {
        None
    }
}

/// Segment used at `(p_c, ε)`, with `ε = 1` routed to iv.
pub fn definetti_segment(p_c: Probability, epsilon: f64) -> Result<(Segment, Form)> {
    let p = p_c.get();
    match tabulated_segment(p, epsilon) {
        Some(seg) => Ok((seg, Form::Tabulated)),
        None if epsilon == 1.0 && p > 0.0 && p < 1.0 => Ok((Segment::IV, Form::Continued)),
        None => Err(Error::NoRegion {
            system: "de finetti",
            p_c: p,
            epsilon,
        }),
    }
}

fn value(seg: Segment, p: f64, e: f64, m: f64, s: &DeFinettiSubstitutions) -> f64 {
    let x = |i| s.get(i);
    let q = m + p;
    match seg {
        Segment::I => (p / (e * e - 1.0)) / q + x(6) / e,
        Segment::II => ((p - 1.0) / (e * e - 1.0) + x(6) * (q - 1.0) / e) / q,
        Segment::III => (2.0 * p * x(2) * (-m - p + 1.0) + 2.0 * p - 1.0) / (4.0 * e * p * q),
        Segment::IV => {
            ((e + 1.0) * x(7) * q + (e + 1.0) * x(1) + (e + 1.0) * x(5) + 2.0 * p - 1.0) / (2.0 * e * (e + 1.0) * q)
        }
        Segment::V => (-e + (p - 1.0) * x(8) * q + 2.0 * p - 1.0) / (4.0 * e * (e + 1.0) * q),
        _ => f64::NAN,
    }
}

fn m_value(seg: Segment, p: f64, e: f64, s: &DeFinettiSubstitutions) -> f64 {
    let x = |i| s.get(i);
    match seg {
        Segment::I => p * ((e * e - 1.0) * x(6) + e) / ((1.0 - e * e) * x(6)),
        Segment::II => (p - 1.0) * ((e * e - 1.0) * x(6) + e) / ((1.0 - e * e) * x(6)),
        Segment::III => (2.0 * p - 1.0) / (2.0 * p * x(2)) - p + 1.0,
        Segment::IV => -(p * ((e + 1.0) * x(7) + 2.0) + (e + 1.0) * x(1) + (e + 1.0) * x(5) - 1.0) / ((e + 1.0) * x(7)),
        Segment::V => (e - 2.0 * p + 1.0) / ((p - 1.0) * x(8)) - p,
        _ => f64::NAN,
    }
}

/// Seller's margin integrated against the slice kernel, with segment and
/// intermediates.
pub fn definetti_mean_margin_detailed(p_c: Probability, epsilon: f64, m: f64) -> Result<PiecewiseEvaluation> {
    check_inputs(p_c, epsilon)?;
    check_m(p_c.get(), m)?;
    let (seg, form) = definetti_segment(p_c, epsilon)?;
    let s = definetti_substitutions(p_c, epsilon);
    Ok(PiecewiseEvaluation {
        variant: Variant::DeFinetti,
        segment: seg,
        form,
        value: value(seg, p_c.get(), epsilon, m, &s),
        substitutions: s.named(),
    })
}

/// Seller's margin integrated against the slice kernel (unnormalized).
pub fn definetti_mean_margin(p_c: Probability, epsilon: f64, m: f64) -> Result<f64> {
    definetti_mean_margin_detailed(p_c, epsilon, m).map(|e| e.value)
}

/// Closed-form `m` for the region containing `(p_c, ε)`.
pub fn definetti_tabulated_m(p_c: Probability, epsilon: f64) -> Result<(Segment, Form, f64)> {
    check_inputs(p_c, epsilon)?;
    let (seg, form) = definetti_segment(p_c, epsilon)?;
    let s = definetti_substitutions(p_c, epsilon);
    Ok((seg, form, m_value(seg, p_c.get(), epsilon, &s)))
}

/// Value exactly as tabulated, including the zero fall-through.
pub fn literal_definetti_value(p_c: f64, epsilon: f64, m: f64) -> f64 {
    let Ok(pc) = Probability::new(p_c) else {
        return f64::NAN;
    };
    match tabulated_segment(p_c, epsilon) {
        Some(seg) => value(seg, p_c, epsilon, m, &definetti_substitutions(pc, epsilon)),
        None => 0.0,
    }
}

/// `m` exactly as tabulated, including the zero fall-through.
pub fn literal_definetti_m(p_c: f64, epsilon: f64) -> f64 {
    let Ok(pc) = Probability::new(p_c) else {
        return f64::NAN;
    };
    match tabulated_segment(p_c, epsilon) {
        Some(seg) => m_value(seg, p_c, epsilon, &definetti_substitutions(pc, epsilon)),
        None => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairsolver::{quadrature_kernel_margin, root_adjustment};

    fn prob(x: f64) -> Probability {
        Probability::new(x).unwrap()
    }

    const CASES: [(Segment, f64, f64); 11] = [
        (Segment::I, 0.2, 0.3),
        (Segment::I, 0.1, 0.5),
        (Segment::I, 0.35, 0.3), // on 2P + ε = 1 with ε < 1/3
        (Segment::II, 0.8, 0.3),
        (Segment::III, 0.75, 0.5),
        (Segment::IV, 0.4, 0.5),
        (Segment::IV, 0.6, 0.5),
        (Segment::IV, 0.5, 0.5),
        (Segment::IV, 0.3, 1.0),
        (Segment::IV, 0.9, 1.0),
        (Segment::V, 0.25, 0.5),
    ];

    #[test]
    fn regions_follow_the_table() {
        for (seg, p, e) in CASES {
            assert_eq!(definetti_segment(prob(p), e).unwrap().0, seg, "p={p} e={e}");
        }
        assert_eq!(definetti_segment(prob(0.3), 1.0).unwrap().1, Form::Continued);
    }

    #[test]
    fn every_segment_matches_quadrature() {
        for (_, p, e) in CASES {
            for m in [0.0, 0.03, -0.02] {
                let cf = definetti_mean_margin(prob(p), e, m).unwrap();
                let q = quadrature_kernel_margin(prob(p), e, m, Variant::DeFinetti).unwrap();
                assert!((cf - q).abs() < 1e-9, "p={p} e={e} m={m}: {cf} vs {q}");
            }
        }
    }

    #[test]
    fn every_m_matches_the_root() {
        for (_, p, e) in CASES {
            let (_, _, m) = definetti_tabulated_m(prob(p), e).unwrap();
            let r = root_adjustment(prob(p), e, Variant::DeFinetti).unwrap();
            assert!((m - r).abs() < 1e-10, "p={p} e={e}: {m} vs {r}");
        }
    }

    #[test]
    fn full_noise_falls_through_literally() {
        assert_eq!(literal_definetti_value(0.3, 1.0, 0.0), 0.0);
        let q = quadrature_kernel_margin(prob(0.3), 1.0, 0.0, Variant::DeFinetti).unwrap();
        assert!(q.abs() > 1e-3);
    }
}
