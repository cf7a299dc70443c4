//! Nine-segment system for the basic game, where the quote is the average of
//! two noisy beliefs.
//!
//! Region table (first match wins, `P = p_c`, `a = ε`):
//!
//! | seg  | region                                                     |
//! |------|------------------------------------------------------------|
//! | i    | `2P + ε <= 1` (`< 1` once `ε >= 1/2`), `ε < 1`            |
//! | ii   | `2P > 1 + ε`                                               |
//! | iii  | `2P = 1`, `ε < 1`                                          |
//! | iv   | `2P = 1 + ε`, `ε < 1`                                      |
//! | v    | `ε = 1`, `P <= 1/2`                                        |
//! | vi   | `ε = 1`, `P > 1/2`                                         |
//! | vii  | `1 < 2P < 1 + ε`, `ε < 1`                                  |
//! | viii | `2P + ε = 1`, `1/2 <= ε < 1`                               |
//! | ix   | `1 - ε < 2P < 1`, `ε < 1`                                  |
//!
//! Three substitutions are corrected relative to the tabulated list:
//! `x7 = ln((1 + a)/(1 - P))`, `x8 = ln((1 - P)/(1 + a))` and
//! `x12 = ln((1 + a)(1 - P))`. With these, segments vii and ix integrate
//! correctly, and at `ε = 1` they reproduce the quadrature in the regions of
//! v and vi, whose tabulated expressions do not. The tabulated `m` for
//! segment iv has its sign flipped.
//!
//! [`literal_basic_value`] and [`literal_basic_m`] keep the expressions
//! exactly as tabulated so the discrepancies can be reported.

use super::{check_inputs, check_m, Form, PiecewiseEvaluation, Segment};
use crate::beliefs::Probability;
use crate::error::{Error, Result};
use crate::posterior::Variant;

/// Intermediates shared by the nine segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasicSubstitutions {
    pub x: [f64; 17],
}

impl BasicSubstitutions {
    const NAMES: [&'static str; 17] = [
        "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "x11", "x12", "x13", "x14", "x15", "x16", "x17",
    ];

    #[inline]
    fn get(&self, i: usize) -> f64 {
        self.x[i - 1]
    }

    pub fn named(&self) -> Vec<(&'static str, f64)> {
        Self::NAMES.iter().copied().zip(self.x.iter().copied()).collect()
    }
}

/// Which reading of the substitution list to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reading {
    Corrected,
    Literal,
}

fn substitutions(p: f64, a: f64, m: f64, reading: Reading) -> BasicSubstitutions {
    let x1 = (a + 1.0).ln();
    let x2 = (1.0 - a).ln();
    let x3 = (1.0 - p).ln();
    let x4 = (1.0 / p).ln();
    let x5 = (1.0 / (p * p)).ln();
    let x6 = ((1.0 - p) / p).ln();
    let (x7, x8, x12) = match reading {
        Reading::Corrected => (
            ((a + 1.0) / (1.0 - p)).ln(),
            ((1.0 - p) / (1.0 + a)).ln(),
            ((a + 1.0) * (1.0 - p)).ln(),
        ),
        Reading::Literal => (
            ((-a - 1.0) / (-p - 1.0)).ln(),
            ((1.0 - p) / (1.0 - a)).ln(),
            ((a + 1.0) * (-(1.0 - p))).ln(),
        ),
    };
    let x9 = p.ln();
    let x10 = p.powi(4).ln();
    let x11 = std::f64::consts::LN_2;
    let x13 = (2.0 * p - 1.0).atanh();
    let x14 = 2.0 * x1 - x3 - x9 - 2.0 * x11 - 2.0;
    let x15 = 2.0 * x3 + 2.0 * x11 + x14;
    let x16 = -x3 - x11 - x14 - 2.0;
    let x17 = x14 * (p + m) + x11;
    BasicSubstitutions {
        x: [
            x1, x2, x3, x4, x5, x6, x7, x8, x9, x10, x11, x12, x13, x14, x15, x16, x17,
        ],
    }
}

/// Substitution table at `(p_c, ε, m)` under the corrected reading.
pub fn basic_substitutions(p_c: Probability, epsilon: f64, m: f64) -> BasicSubstitutions {
    substitutions(p_c.get(), epsilon, m, Reading::Corrected)
}

/// First segment whose tabulated condition holds.
pub fn basic_segment(p_c: Probability, epsilon: f64) -> Result<Segment> {
    let p = p_c.get();
    let e = epsilon;
    let seg = if e + 1.0 >= 2.0 * p
        && 0.0 < p
        && p <= 0.5
        && ((0.0 < e && e < 0.5 && 2.0 * p + e <= 1.0) || (0.5 <= e && e < 1.0 && 2.0 * p + e < 1.0))
    {
        Segment::I
    } else if 0.5 < p
        && p < 1.0
        && e + 1.0 < 2.0 * p
        && ((2.0 * p + e > 1.0 && e > 0.0) || (2.0 * p + e >= 1.0 && 2.0 * e >= 1.0))
    {
        Segment::II
    } else if 2.0 * p == 1.0 && e < 1.0 && e > 0.0 {
        Segment::III
    } else if e + 1.0 == 2.0 * p && 0.5 < p && p < 1.0 && e < 1.0 {
        Segment::IV
    } else if e == 1.0 && 0.0 < p && p <= 0.5 {
        Segment::V
    } else if e == 1.0 && 2.0 * p > 1.0 && p < 1.0 {
        Segment::VI
    } else if e + 1.0 > 2.0 * p && 2.0 * p > 1.0 && e < 1.0 {
        Segment::VII
    } else if 0.5 <= e && e < 1.0 && 0.0 < p && p < 0.5 && 2.0 * p + e == 1.0 {
        Segment::VIII
    } else if e < 1.0 && 2.0 * p < 1.0 && 2.0 * p + e > 1.0 {
        Segment::IX
    } else {
        return Err(Error::NoRegion {
            system: "basic game",
            p_c: p,
            epsilon: e,
        });
    };
    Ok(seg)
}

/// Tabulated expression of one segment.
fn value(seg: Segment, p: f64, e: f64, m: f64, s: &BasicSubstitutions) -> f64 {
    let x = |i| s.get(i);
    let q = p + m;
    let e2 = e * e;
    match seg {
        Segment::I => {
            (((e + 2.0) * x(1) - (e - 2.0) * x(2)) * p + m * ((e + 1.0) * x(1) - (e - 1.0) * x(2))) / (e2 * q)
        }
        Segment::II => (e * (x(1) - x(2)) * (p + m - 1.0) + (x(1) + x(2)) * (2.0 * p + m - 2.0)) / (e2 * q),
        Segment::III => 2.0 * m * ((e + 1.0) * x(1) - e) / (e2 * q),
        Segment::IV => {
            (2.0 * m * (x(3) * (-p) + x(9) * p + x(3)) + 2.0 * x(11) * (2.0 * p + m - 2.0)
                - p * (2.0 * x(6) * p - 5.0 * x(3) + x(9))
                - 3.0 * x(3)
                + x(5) / 2.0)
                / (e2 * q)
        }
        Segment::V => {
            (p * (-2.0 * p - 3.0 * x(3) + 3.0 * x(11) + 1.0) - m * (2.0 * p + 2.0 * x(3) - 2.0 * x(11) + 1.0)
                + 3.0 * x(3))
                / q
        }
        Segment::VI => {
            (m * (2.0 * p + 2.0 * x(4) + 2.0 * x(11) - 3.0) + p * (2.0 * p + 3.0 * x(4) + 3.0 * x(11) - 3.0)
                - 3.0 * x(11)
                + 1.0)
                / q
        }
        Segment::VII => {
            (e * (-x(7) + x(17) + 1.0) + 4.0 * p * (p + m + x(1) - x(13) - 1.0) + m * x(15) - 2.0 * x(11) - 2.0 * x(12)
                + 1.0)
                / (e2 * q)
        }
        Segment::VIII => {
            (2.0 * m * x(16) * p
                + x(1) * (2.0 * m * (p + 1.0) + p * (5.0 - 2.0 * p))
                + 0.5 * (x(10) + 4.0 * x(11)) * p * p
                + x(16) * p)
                / (e2 * q)
        }
        Segment::IX => {
            (e * (x(8) + x(17) + 1.0) + 4.0 * p * (-p - m + x(1) + x(13) + 1.0) + 4.0 * m * x(1) - m * x(15)
                + 2.0 * x(8)
                + 2.0 * x(11)
                - 1.0)
                / (e2 * q)
        }
    }
}

/// Tabulated `m` of one segment (before any sign correction).
fn m_value(seg: Segment, p: f64, e: f64, s: &BasicSubstitutions) -> f64 {
    let x = |i| s.get(i);
    match seg {
        Segment::I => ((e - 2.0) * x(2) - (e + 2.0) * x(1)) * p / ((e + 1.0) * x(1) - (e - 1.0) * x(2)),
        Segment::II => ((e - 2.0) * x(2) - (e + 2.0) * x(1)) * (p - 1.0) / ((e + 1.0) * x(1) - (e - 1.0) * x(2)),
        Segment::III => 0.0,
        Segment::IV => {
            (p * (-4.0 * x(6) * p + 10.0 * x(3) - 2.0 * x(9)) + 8.0 * x(11) * (p - 1.0) - 6.0 * x(3) + x(5))
                / (8.0 * x(13) * p + 4.0 * x(3) + 4.0 * x(11))
        }
        Segment::V => {
            (p * (-2.0 * p - 3.0 * x(3) + 3.0 * x(11) + 1.0) + 3.0 * x(3)) / (2.0 * p + 2.0 * x(3) - 2.0 * x(11) + 1.0)
        }
        Segment::VI => {
            (p * (-2.0 * p - 3.0 * x(4) - 3.0 * x(11) + 3.0) + 3.0 * x(11) - 1.0)
                / (2.0 * p + 2.0 * x(4) + 2.0 * x(11) - 3.0)
        }
        Segment::VII => {
            (e * (x(7) - x(11) - 1.0) + (-2.0 * x(1) + 2.0 * x(13) + 2.0) * p + 2.0 * x(11) + 2.0 * x(12) - 1.0)
                / (e * (2.0 * x(1) - x(3) - x(9) - 2.0 * x(11) - 2.0) + 4.0 * p + 2.0 * x(1) - 2.0 * x(13) - 2.0)
                - p
        }
        Segment::VIII => {
            p * (x(1) * (6.0 - 4.0 * p) + (x(10) + 4.0 * x(11)) * p + 2.0 * (x(9) + x(11)))
                / (4.0 * x(1) * (p - 1.0) - 4.0 * (x(9) + x(11)) * p)
        }
        Segment::IX => {
            (e * (x(8) + x(11) + 1.0) + (2.0 * x(1) + 2.0 * x(13) + 2.0) * p + 2.0 * x(8) + 2.0 * x(11) - 1.0)
                / (e * (-2.0 * x(1) + x(3) + x(9) + 2.0 * x(11) + 2.0) + 4.0 * p - 2.0 * x(1) - 2.0 * x(13) - 2.0)
                - p
        }
    }
}

/// Expression actually used in a region, and how it relates to the table.
fn effective(seg: Segment) -> (Segment, Form) {
    match seg {
        Segment::V => (Segment::IX, Form::Continued),
        Segment::VI => (Segment::VII, Form::Continued),
        Segment::VII | Segment::IX => (seg, Form::Amended),
        _ => (seg, Form::Tabulated),
    }
}

/// Seller's margin integrated against the slice kernel, with segment and
/// intermediates.
pub fn basicgame_mean_margin_detailed(p_c: Probability, epsilon: f64, m: f64) -> Result<PiecewiseEvaluation> {
    check_inputs(p_c, epsilon)?;
    check_m(p_c.get(), m)?;
    let seg = basic_segment(p_c, epsilon)?;
    let (used, form) = effective(seg);
    let s = basic_substitutions(p_c, epsilon, m);
    Ok(PiecewiseEvaluation {
        variant: Variant::BasicGame,
        segment: seg,
        form,
        value: value(used, p_c.get(), epsilon, m, &s),
        substitutions: s.named(),
    })
}

/// Seller's margin integrated against the slice kernel (unnormalized).
pub fn basicgame_mean_margin(p_c: Probability, epsilon: f64, m: f64) -> Result<f64> {
    basicgame_mean_margin_detailed(p_c, epsilon, m).map(|e| e.value)
}

/// Closed-form `m` for the region containing `(p_c, ε)`.
pub fn basicgame_tabulated_m(p_c: Probability, epsilon: f64) -> Result<(Segment, Form, f64)> {
    check_inputs(p_c, epsilon)?;
    let seg = basic_segment(p_c, epsilon)?;
    let (used, mut form) = effective(seg);
    let s = basic_substitutions(p_c, epsilon, 0.0);
    let mut m = m_value(used, p_c.get(), epsilon, &s);
    if seg == Segment::IV {
        m = -m;
        form = Form::Amended;
    }
    Ok((seg, form, m))
}

/// A segment's value exactly as tabulated, under the tabulated
/// substitutions, evaluated whatever region `(p_c, ε)` falls in.
pub fn literal_basic_value(seg: Segment, p_c: f64, epsilon: f64, m: f64) -> f64 {
    let s = substitutions(p_c, epsilon, m, Reading::Literal);
    value(seg, p_c, epsilon, m, &s)
}

/// A segment's `m` exactly as tabulated.
pub fn literal_basic_m(seg: Segment, p_c: f64, epsilon: f64) -> f64 {
    let s = substitutions(p_c, epsilon, 0.0, Reading::Literal);
    m_value(seg, p_c, epsilon, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairsolver::{quadrature_kernel_margin, root_adjustment};

    fn prob(x: f64) -> Probability {
        Probability::new(x).unwrap()
    }

    const CASES: [(Segment, f64, f64); 14] = [
        (Segment::I, 0.2, 0.3),
        (Segment::I, 0.1, 0.7),
        (Segment::I, 0.3, 0.4), // on 2P + ε = 1, kept in i while ε < 1/2
        (Segment::II, 0.8, 0.3),
        (Segment::II, 0.95, 0.5),
        (Segment::III, 0.5, 0.5),
        (Segment::IV, 0.75, 0.5),
        (Segment::V, 0.3, 1.0),
        (Segment::V, 0.5, 1.0),
        (Segment::VI, 0.7, 1.0),
        (Segment::VII, 0.6, 0.5),
        (Segment::VIII, 0.25, 0.5),
        (Segment::IX, 0.4, 0.5),
        (Segment::IX, 0.3, 0.6),
    ];

    #[test]
    fn regions_follow_the_table() {
        for (seg, p, e) in CASES {
            assert_eq!(basic_segment(prob(p), e).unwrap(), seg, "p={p} e={e}");
        }
    }

    #[test]
    fn every_segment_matches_quadrature() {
        for (_, p, e) in CASES {
            for m in [0.0, 0.03, -0.02] {
                let cf = basicgame_mean_margin(prob(p), e, m).unwrap();
                let q = quadrature_kernel_margin(prob(p), e, m, Variant::BasicGame).unwrap();
                assert!((cf - q).abs() < 1e-9, "p={p} e={e} m={m}: {cf} vs {q}");
            }
        }
    }

    #[test]
    fn every_m_matches_the_root() {
        for (_, p, e) in CASES {
            let (_, _, m) = basicgame_tabulated_m(prob(p), e).unwrap();
            let r = root_adjustment(prob(p), e, Variant::BasicGame).unwrap();
            assert!((m - r).abs() < 1e-10, "p={p} e={e}: {m} vs {r}");
        }
    }

    #[test]
    fn segment_iii_is_linear_in_m() {
        let v = basicgame_mean_margin(prob(0.5), 0.5, 0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn tabulated_errata_are_visible_literally() {
        // x12 as tabulated takes the log of a negative number
        assert!(literal_basic_value(Segment::VII, 0.6, 0.5, 0.0).is_nan());
        // the tabulated m for iv has the opposite sign of the root
        let r = root_adjustment(prob(0.75), 0.5, Variant::BasicGame).unwrap();
        let lit = literal_basic_m(Segment::IV, 0.75, 0.5);
        assert!((lit + r).abs() < 1e-10);
        // v as tabulated disagrees with the quadrature
        let q = quadrature_kernel_margin(prob(0.3), 1.0, 0.0, Variant::BasicGame).unwrap();
        assert!((literal_basic_value(Segment::V, 0.3, 1.0, 0.0) - q).abs() > 1e-3);
        // segments that need no correction agree in both readings
        for (seg, p, e) in [
            (Segment::I, 0.2, 0.3),
            (Segment::II, 0.8, 0.3),
            (Segment::VIII, 0.25, 0.5),
        ] {
            let a = literal_basic_value(seg, p, e, 0.01);
            let b = basicgame_mean_margin(prob(p), e, 0.01).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn substitutions_are_exposed() {
        let ev = basicgame_mean_margin_detailed(prob(0.6), 0.5, 0.0).unwrap();
        assert_eq!(ev.segment, Segment::VII);
        assert_eq!(ev.form, Form::Amended);
        assert_eq!(ev.substitutions.len(), 17);
        assert!((ev.substitution("x11").unwrap() - 2f64.ln()).abs() < 1e-15);
    }
}
