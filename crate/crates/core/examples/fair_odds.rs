//! Fair adjustments and fair odds across agreed probabilities.

use noisyodds::fairsolver::solve_fair_adjustment;
use noisyodds::{Probability, Result};

fn main() -> Result<()> {
    let eps = 0.5;
    println!("epsilon = {eps}");
    println!(
        "{:>5} {:>11} {:>8} {:>8} {:>10}  segment",
        "p_c", "m", "1/p_c", "fair", "residual"
    );
    for i in 1..=19 {
        let p = i as f64 * 0.05;
        let adj = solve_fair_adjustment(Probability::new(p)?, eps)?;
        println!(
            "{p:>5.2} {:>+11.6} {:>8.4} {:>8.4} {:>10.1e}  {} ({})",
            adj.m,
            1.0 / p,
            adj.fair_odds(),
            adj.residual,
            adj.segment,
            adj.form
        );
    }
    Ok(())
}
