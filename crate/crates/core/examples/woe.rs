//! Noise envelopes and the evidence they imply.
//!
//! Run with `cargo run --example woe`.

use noisyodds::beliefs::{belief_envelope, probability_to_woe, woe_cdf, woe_support, WeightOfEvidence};
use noisyodds::{Probability, Result};

fn main() -> Result<()> {
    for eps in [0.5, 1.0] {
        println!("epsilon = {eps}");
        for p in [0.05, 0.5, 0.95] {
            let env = belief_envelope(Probability::new(p)?, eps)?;
            let (lo, hi) = woe_support(&env);
            let woe_t = probability_to_woe(env.p_t())?.bans();
            let median = woe_cdf(WeightOfEvidence::new(woe_t)?, &env)?;
            println!(
                "  p_t = {p:<5} beliefs in [{:.4}, {:.4}]  evidence in [{lo:+.3}, {hi:+.3}] bans  CDF at woe_t = {woe_t:+.2}: {median:.3}",
                env.lower().get(),
                env.upper().get(),
            );
        }
    }
    Ok(())
}
