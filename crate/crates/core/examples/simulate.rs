//! The basic game end to end: who loses at naive odds, who profits by
//! choosing when to bet, and what the fair adjustment does to both.

use noisyodds::montecarlo::{
    estimate_payoff, figure5_strategy, simulate, AdjustmentSource, GameConfig, Measure, NormalizePer, Perspective,
    PtMode, StrategyMatrix,
};
use noisyodds::Result;

fn main() -> Result<()> {
    let base = GameConfig::new(PtMode::UniformPrior, 0.5, 1_000_000, 7);
    let runs = [
        ("naive odds, both always bet", base),
        (
            "naive odds, player 1 picks his bets",
            base.with_strategies(figure5_strategy(), StrategyMatrix::ALWAYS_BET),
        ),
        (
            "fair odds, player 1 picks his bets",
            base.with_strategies(figure5_strategy(), StrategyMatrix::ALWAYS_BET)
                .with_adjustment(AdjustmentSource::FairSolver),
        ),
    ];
    for (label, cfg) in runs {
        let ledger = simulate(&cfg)?;
        println!("{label}");
        for (who, p) in [("seller", Perspective::Seller), ("player 1", Perspective::Player1)] {
            let e = estimate_payoff(&ledger, |_| true, who, p, Measure::Realized, NormalizePer::Trial)?;
            println!("  {who:<9} {:+.5} ± {:.5}", e.mean, e.std_error);
        }
    }
    Ok(())
}
