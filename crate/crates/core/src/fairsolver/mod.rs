//! Fair-odds adjustments.
//!
//! When a quote `p_c` is formed from noisy beliefs, the true frequency is
//! spread around it and the seller's mean margin at odds `1/p_c` is not
//! zero. This module evaluates that mean margin in closed form (a piecewise
//! system for each way of forming the quote), finds the shift `m` that makes
//! odds `1/(p_c + m)` fair, and checks both against direct quadrature.
//!
//! The closed-form systems integrate the margin against the *unnormalized*
//! slice kernel from [`crate::posterior`]; dividing by the kernel's integral
//! gives the conditional mean. The root in `m` is the same either way.

mod basic;
mod definetti;
mod weights;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::beliefs::Probability;
use crate::error::{check_open, domain, Result};
use crate::numeric::{bracketed_root, integrate_piecewise};
use crate::posterior::{support, PosteriorDensity, Variant};

pub use basic::{
    basic_segment, basic_substitutions, basicgame_mean_margin, basicgame_mean_margin_detailed, basicgame_tabulated_m,
    literal_basic_m, literal_basic_value,
};
pub use definetti::{
    definetti_mean_margin, definetti_mean_margin_detailed, definetti_segment, definetti_substitutions,
    definetti_tabulated_m, literal_definetti_m, literal_definetti_value,
};
pub use weights::{solve_w1_star, W1Star};

/// Offset keeping the adjusted probability strictly inside `(0, 1)`.
pub const BRACKET_MARGIN: f64 = 1e-9;
/// Root tolerance for the bracketed fallback.
pub const ROOT_TOL: f64 = 1e-12;
/// Largest plug-back residual accepted from a closed-form `m`.
pub const PLUG_BACK_TOL: f64 = 1e-10;

/// Roman-numeral label of a piece of a piecewise system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Segment {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
    IX,
}

impl Segment {
    pub const BASIC: [Segment; 9] = [
        Segment::I,
        Segment::II,
        Segment::III,
        Segment::IV,
        Segment::V,
        Segment::VI,
        Segment::VII,
        Segment::VIII,
        Segment::IX,
    ];
    pub const DEFINETTI: [Segment; 5] = [Segment::I, Segment::II, Segment::III, Segment::IV, Segment::V];

    pub fn as_str(self) -> &'static str {
        match self {
            Segment::I => "i",
            Segment::II => "ii",
            Segment::III => "iii",
            Segment::IV => "iv",
            Segment::V => "v",
            Segment::VI => "vi",
            Segment::VII => "vii",
            Segment::VIII => "viii",
            Segment::IX => "ix",
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a segment's expression relates to the tabulated one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    /// As tabulated.
    Tabulated,
    /// Tabulated expression with a corrected substitution or sign.
    Amended,
    /// A neighbouring segment's expression, continued into this region.
    Continued,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Tabulated => "tabulated",
            Form::Amended => "amended",
            Form::Continued => "continued",
        })
    }
}

/// A closed-form evaluation together with the segment and intermediates used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseEvaluation {
    pub variant: Variant,
    pub segment: Segment,
    pub form: Form,
    pub value: f64,
    pub substitutions: Vec<(&'static str, f64)>,
}

impl PiecewiseEvaluation {
    pub fn substitution(&self, name: &str) -> Option<f64> {
        self.substitutions.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }
}

/// How an adjustment was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Bracketed,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed-form",
            Method::Bracketed => "bracketed",
        })
    }
}

/// The shift `m` making odds `1/(p_c + m)` fair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Adjustment {
    pub p_c: Probability,
    pub epsilon: f64,
    pub m: f64,
    pub variant: Variant,
    pub segment: Segment,
    pub form: Form,
    pub method: Method,
    /// Conditional mean seller margin at `m`, by quadrature.
    pub residual: f64,
}

impl Adjustment {
    pub fn fair_probability(&self) -> f64 {
        self.p_c.get() + self.m
    }

    pub fn fair_odds(&self) -> f64 {
        1.0 / self.fair_probability()
    }
}

fn check_inputs(p_c: Probability, epsilon: f64) -> Result<()> {
    check_open("p_c", p_c.get(), 0.0, 1.0, "0 < p_c < 1")?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(domain("epsilon", epsilon, "0 < epsilon <= 1"));
    }
    Ok(())
}

fn check_m(p_c: f64, m: f64) -> Result<f64> {
    let q = p_c + m;
    if !(q > 0.0 && q < 1.0) || !m.is_finite() {
        return Err(domain("m", m, "0 < p_c + m < 1"));
    }
    Ok(q)
}

/// Integral of the seller's objective margin at odds `1/(p_c + m)` against
/// the slice kernel, by adaptive quadrature. The kernel is rebuilt from the
/// consensus density around each `p_t`, independently of the closed forms.
pub fn quadrature_kernel_margin(p_c: Probability, epsilon: f64, m: f64, variant: Variant) -> Result<f64> {
    check_inputs(p_c, epsilon)?;
    let q = check_m(p_c.get(), m)?;
    let (lo, hi) = support(p_c.get(), epsilon);
    let bp = [p_c.get(), 0.5];
    Ok(integrate_piecewise(
        |t| (1.0 - t / q) * crate::posterior::assembled_kernel(t, p_c, epsilon, variant),
        lo,
        hi,
        &bp,
    ))
}

/// Integral of the slice kernel itself, by quadrature.
pub fn quadrature_normalizer(p_c: Probability, epsilon: f64, variant: Variant) -> Result<f64> {
    check_inputs(p_c, epsilon)?;
    let (lo, hi) = support(p_c.get(), epsilon);
    Ok(integrate_piecewise(
        |t| crate::posterior::assembled_kernel(t, p_c, epsilon, variant),
        lo,
        hi,
        &[p_c.get(), 0.5],
    ))
}

/// Conditional mean of the seller's objective margin given the quote `p_c`,
/// at odds `1/(p_c + m)`, by quadrature.
pub fn quadrature_mean_margin(p_c: Probability, epsilon: f64, m: f64, variant: Variant) -> Result<f64> {
    let num = quadrature_kernel_margin(p_c, epsilon, m, variant)?;
    Ok(num / quadrature_normalizer(p_c, epsilon, variant)?)
}

/// Closed-form conditional mean margin: the tabulated system divided by the
/// kernel's exact integral.
pub fn normalized_mean_margin(p_c: Probability, epsilon: f64, m: f64, variant: Variant) -> Result<f64> {
    let raw = match variant {
        Variant::BasicGame => basicgame_mean_margin(p_c, epsilon, m)?,
        Variant::DeFinetti => definetti_mean_margin(p_c, epsilon, m)?,
    };
    Ok(raw / PosteriorDensity::new(p_c, epsilon, variant)?.normalizer())
}

/// Fair adjustment for the basic game.
pub fn solve_fair_adjustment(p_c: Probability, epsilon: f64) -> Result<Adjustment> {
    solve_adjustment(p_c, epsilon, Variant::BasicGame)
}

/// Fair adjustment when the quote carries only the quoting party's belief.
pub fn solve_definetti_adjustment(p_c: Probability, epsilon: f64) -> Result<Adjustment> {
    solve_adjustment(p_c, epsilon, Variant::DeFinetti)
}

/// Closed-form `m` where it passes plug-back, else a bracketed root of the
/// quadrature margin over `(-p_c, 1 - p_c)`.
pub fn solve_adjustment(p_c: Probability, epsilon: f64, variant: Variant) -> Result<Adjustment> {
    check_inputs(p_c, epsilon)?;
    let (segment, form, closed) = match variant {
        Variant::BasicGame => basicgame_tabulated_m(p_c, epsilon)?,
        Variant::DeFinetti => definetti_tabulated_m(p_c, epsilon)?,
    };
    let p = p_c.get();
    if check_m(p, closed).is_ok() {
        let residual = quadrature_mean_margin(p_c, epsilon, closed, variant)?;
        if residual.abs() <= PLUG_BACK_TOL {
            return Ok(Adjustment {
                p_c,
                epsilon,
                m: closed,
                variant,
                segment,
                form,
                method: Method::ClosedForm,
                residual,
            });
        }
    }
    let m = root_adjustment(p_c, epsilon, variant)?;
    Ok(Adjustment {
        p_c,
        epsilon,
        m,
        variant,
        segment,
        form,
        method: Method::Bracketed,
        residual: quadrature_mean_margin(p_c, epsilon, m, variant)?,
    })
}

/// Closed-form `m` without the quadrature plug-back, cheap enough to call
/// once per simulated wager. Zero without noise; falls back to the
/// bracketed root if the closed form leaves `(-p_c, 1 - p_c)`.
pub fn quick_adjustment(p_c: Probability, epsilon: f64, variant: Variant) -> Result<f64> {
    if epsilon == 0.0 {
        return Ok(0.0);
    }
    let (_, _, m) = match variant {
        Variant::BasicGame => basicgame_tabulated_m(p_c, epsilon)?,
        Variant::DeFinetti => definetti_tabulated_m(p_c, epsilon)?,
    };
    if check_m(p_c.get(), m).is_ok() {
        Ok(m)
    } else {
        root_adjustment(p_c, epsilon, variant)
    }
}

/// Root of the quadrature margin in `m`, ignoring every closed form.
pub fn root_adjustment(p_c: Probability, epsilon: f64, variant: Variant) -> Result<f64> {
    check_inputs(p_c, epsilon)?;
    let p = p_c.get();
    let lo = -p + BRACKET_MARGIN;
    let hi = 1.0 - p - BRACKET_MARGIN;
    let z = quadrature_normalizer(p_c, epsilon, variant)?;
    let f = |m: f64| {
        quadrature_kernel_margin(p_c, epsilon, m, variant)
            .map(|v| v / z)
            .unwrap_or(f64::NAN)
    };
    bracketed_root(f, lo, hi, ROOT_TOL)
}
