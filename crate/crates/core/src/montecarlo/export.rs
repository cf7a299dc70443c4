//! Ledger CSV export.

use std::io::Write;

use super::{Action, GameLedger, GameRecord};
use crate::error::Result;

/// Header row, in record field order.
pub const LEDGER_COLUMNS: [&str; 13] = [
    "trial_id",
    "p_t",
    "p_b",
    "p_s",
    "role_of_player1",
    "p_c",
    "m_applied",
    "odds",
    "action_buyer",
    "action_seller",
    "outcome",
    "payoff_buyer",
    "payoff_seller",
];

/// 17 significant digits, enough to round-trip any `f64`.
fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn action(a: Option<Action>) -> &'static str {
    a.map_or("", Action::as_str)
}

/// Streaming CSV writer for ledger rows.
pub struct LedgerWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> LedgerWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(LEDGER_COLUMNS)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &GameRecord) -> Result<()> {
        self.inner.write_record([
            r.trial_id.to_string(),
            float(r.p_t),
            float(r.p_b),
            float(r.p_s),
            r.role_of_player1.as_str().to_string(),
            float(r.p_c),
            float(r.m_applied),
            float(r.odds),
            action(r.action_buyer).to_string(),
            action(r.action_seller).to_string(),
            r.outcome.as_str().to_string(),
            float(r.payoff_buyer),
            float(r.payoff_seller),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Writes a whole ledger with its header row.
pub fn write_ledger_csv<W: Write>(ledger: &GameLedger, out: W) -> Result<()> {
    let mut w = LedgerWriter::new(out)?;
    for r in &ledger.records {
        w.write(r)?;
    }
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{simulate, GameConfig, PtMode};

    #[test]
    fn csv_round_trips_floats_and_is_reproducible() {
        let cfg = GameConfig::new(PtMode::UniformPrior, 0.5, 200, 4);
        let ledger = simulate(&cfg).unwrap();
        let mut a = Vec::new();
        write_ledger_csv(&ledger, &mut a).unwrap();
        let mut b = Vec::new();
        write_ledger_csv(&simulate(&cfg).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);

        let mut rd = csv::Reader::from_reader(a.as_slice());
        assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), LEDGER_COLUMNS);
        for (row, r) in rd.records().zip(&ledger.records) {
            let row = row.unwrap();
            assert_eq!(row[1].parse::<f64>().unwrap().to_bits(), r.p_t.to_bits());
            assert_eq!(row[7].parse::<f64>().unwrap().to_bits(), r.odds.to_bits());
        }
    }
}
