use thiserror::Error;

/// Errors raised by the numerical routines and the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the region where the quantity is defined.
    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A distribution collapsed to a point mass, or a denominator vanished.
    #[error("degenerate: {0}")]
    Degenerate(&'static str),

    /// The expression has a pole at the requested argument.
    #[error("pole at {name} = {value}")]
    Pole { name: &'static str, value: f64 },

    /// No segment of a piecewise system covers the requested point.
    #[error("no segment of the {system} system covers p_c = {p_c}, epsilon = {epsilon}")]
    NoRegion {
        system: &'static str,
        p_c: f64,
        epsilon: f64,
    },

    /// A bracketed root search found no sign change.
    #[error("no root in [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The root search did not converge within its iteration budget.
    #[error("root search did not converge in [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64 },

    /// A simulation configuration failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An estimator was asked to summarise fewer than two records.
    #[error("selection '{filter}' matched {n} records; at least 2 are required")]
    EmptySelection { filter: String, n: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain { name, value, expected }
}

/// Rejects NaN as well as values outside `[lo, hi]`.
pub(crate) fn check_closed(name: &'static str, value: f64, lo: f64, hi: f64, expected: &'static str) -> Result<()> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(domain(name, value, expected))
    }
}

pub(crate) fn check_open(name: &'static str, value: f64, lo: f64, hi: f64, expected: &'static str) -> Result<()> {
    if value > lo && value < hi {
        Ok(())
    } else {
        Err(domain(name, value, expected))
    }
}
