//! Honest quoting punished: one party names his belief as the price and
//! the other picks her side.

use noisyodds::montecarlo::{
    fold_trials, simulate_definetti, AdjustmentSource, GameConfig, MarginAccumulator, Measure, NormalizePer,
    Perspective, PtMode,
};
use noisyodds::{Result, Variant};

fn main() -> Result<()> {
    for eps in [0.5, 1.0] {
        for adjust in [AdjustmentSource::None, AdjustmentSource::FairSolver] {
            let cfg = GameConfig::new(PtMode::UniformPrior, eps, 2_000_000, 11).with_adjustment(adjust);
            let acc = fold_trials(
                &cfg,
                Variant::DeFinetti,
                MarginAccumulator::new,
                |a, r| {
                    if let Some(v) = Perspective::Player1.value(r, Measure::Expected, NormalizePer::Bet) {
                        a.push(v)
                    }
                },
                |a, b| a.merge(&b),
            )?;
            println!(
                "eps={eps:<4} {adjust:?}: quoting party earns {:+.5} ± {:.5}",
                acc.mean(),
                acc.std_error()
            );
        }
    }

    let small = simulate_definetti(&GameConfig::new(PtMode::UniformPrior, 0.5, 5, 11))?;
    for r in &small.records {
        println!(
            "  quote {:.3}  odds {:.3}  he is {:<6}  {}",
            r.p_c,
            r.odds,
            r.role_of_player1.as_str(),
            r.outcome.as_str()
        );
    }
    Ok(())
}
