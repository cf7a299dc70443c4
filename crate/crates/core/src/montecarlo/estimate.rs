//! Sample means and standard errors over ledgers or streamed trials.

use serde::{Deserialize, Serialize};

use super::{GameLedger, GameRecord, Role};
use crate::error::{Error, Result};

/// Running mean and variance (Welford), mergeable across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MarginAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MarginAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two disjoint samples.
    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let d = other.mean - self.mean;
        self.mean += d * nb / n;
        self.m2 += other.m2 + d * d * na * nb / n;
        self.n += other.n;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance with the `n - 1` divisor.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            f64::NAN
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn estimate(&self, filter_description: impl Into<String>) -> Result<MarginEstimate> {
        let filter_description = filter_description.into();
        if self.n < 2 {
            return Err(Error::EmptySelection {
                filter: filter_description,
                n: self.n,
            });
        }
        Ok(MarginEstimate {
            mean: self.mean,
            std_error: self.std_error(),
            n: self.n,
            filter_description,
        })
    }
}

/// Mean with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub filter_description: String,
}

impl MarginEstimate {
    /// `(mean - target) / std_error`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.std_error
    }

    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Denominator of a margin estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizePer {
    /// Average over settled bets among the selected records.
    Bet,
    /// Average over all selected records; unsettled ones count as zero.
    Trial,
}

/// Whose payoff is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Perspective {
    Seller,
    Buyer,
    Player1,
    Player2,
}

/// Realized payoff or its expectation given the record's `p_t`.
///
/// Both have the same mean; the expected form removes the outcome coin
/// from the variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Realized,
    Expected,
}

impl Perspective {
    /// The payoff attributable to this perspective, or `None` when the
    /// record is excluded under `normalize`.
    pub fn value(self, r: &GameRecord, measure: Measure, normalize: NormalizePer) -> Option<f64> {
        if !r.settled() {
            return match normalize {
                NormalizePer::Bet => None,
                NormalizePer::Trial => Some(0.0),
            };
        }
        let seller = match measure {
            Measure::Realized => r.payoff_seller,
            Measure::Expected => r.expected_seller_payoff(),
        };
        let sign = match (self, r.role_of_player1) {
            (Perspective::Seller, _) => 1.0,
            (Perspective::Buyer, _) => -1.0,
            (Perspective::Player1, Role::Seller) | (Perspective::Player2, Role::Buyer) => 1.0,
            (Perspective::Player1, _) | (Perspective::Player2, _) => -1.0,
        };
        Some(sign * seller)
    }
}

/// Mean and standard error of the seller's realized payoff over the
/// records selected by `filter`.
pub fn estimate_margin<F>(ledger: &GameLedger, filter: F, normalize_per: NormalizePer) -> Result<MarginEstimate>
where
    F: Fn(&GameRecord) -> bool,
{
    estimate_payoff(
        ledger,
        filter,
        "custom filter",
        Perspective::Seller,
        Measure::Realized,
        normalize_per,
    )
}

/// General form of [`estimate_margin`].
pub fn estimate_payoff<F>(
    ledger: &GameLedger,
    filter: F,
    description: &str,
    perspective: Perspective,
    measure: Measure,
    normalize_per: NormalizePer,
) -> Result<MarginEstimate>
where
    F: Fn(&GameRecord) -> bool,
{
    let mut acc = MarginAccumulator::new();
    for r in ledger.records.iter().filter(|r| filter(r)) {
        if let Some(v) = perspective.value(r, measure, normalize_per) {
            acc.push(v);
        }
    }
    acc.estimate(format!(
        "{description} ({perspective:?}, {measure:?}, per {normalize_per:?})"
    ))
}

/// Evenly spaced `p_c` bins `[c - half_width, c + half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub first_center: f64,
    pub step: f64,
    pub count: usize,
    pub half_width: f64,
}

impl BinSpec {
    /// Half-width used for every `p_c`-conditioned estimate.
    pub const DEFAULT_HALF_WIDTH: f64 = 0.005;

    pub fn new(first_center: f64, step: f64, count: usize, half_width: f64) -> Result<Self> {
        if !(step > 0.0 && half_width > 0.0 && count > 0 && first_center.is_finite()) {
            return Err(Error::Config(
                "bin spec needs step > 0, half-width > 0 and count > 0".into(),
            ));
        }
        if 2.0 * half_width > step + 1e-15 && count > 1 {
            return Err(Error::Config("bins must not overlap".into()));
        }
        Ok(Self {
            first_center,
            step,
            count,
            half_width,
        })
    }

    /// Centers `0.05, 0.10, ..., 0.95` at the default half-width.
    pub fn default_grid() -> Self {
        Self {
            first_center: 0.05,
            step: 0.05,
            count: 19,
            half_width: Self::DEFAULT_HALF_WIDTH,
        }
    }

    /// A single bin.
    pub fn single(center: f64, half_width: f64) -> Self {
        Self {
            first_center: center,
            step: 1.0,
            count: 1,
            half_width,
        }
    }

    pub fn center(&self, i: usize) -> f64 {
        self.first_center + self.step * i as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.center(i)).collect()
    }

    /// Bin holding `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let k = ((x - self.first_center) / self.step).round();
        if !(k >= 0.0 && k < self.count as f64) {
            return None;
        }
        let i = k as usize;
        ((x - self.center(i)).abs() <= self.half_width).then_some(i)
    }
}

/// One accumulator per `p_c` bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedMargins {
    pub spec: BinSpec,
    pub bins: Vec<MarginAccumulator>,
}

impl BinnedMargins {
    pub fn new(spec: BinSpec) -> Self {
        Self {
            spec,
            bins: vec![MarginAccumulator::new(); spec.count],
        }
    }

    pub fn push(&mut self, p_c: f64, value: f64) {
        if let Some(i) = self.spec.locate(p_c) {
            self.bins[i].push(value);
        }
    }

    pub fn push_record(&mut self, r: &GameRecord, perspective: Perspective, measure: Measure, normalize: NormalizePer) {
        if let Some(v) = perspective.value(r, measure, normalize) {
            self.push(r.p_c, v);
        }
    }

    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            a.merge(b);
        }
    }

    /// `(center, estimate)` for every bin with at least two samples.
    pub fn estimates(&self) -> Vec<(f64, MarginEstimate)> {
        self.bins
            .iter()
            .enumerate()
            .filter_map(|(i, acc)| {
                let c = self.spec.center(i);
                acc.estimate(format!(
                    "p_c in [{:.4}, {:.4}]",
                    c - self.spec.half_width,
                    c + self.spec.half_width
                ))
                .ok()
                .map(|e| (c, e))
            })
            .collect()
    }
}
