//! The seller's losing position when both sides bet at the average of
//! their beliefs.

use noisyodds::pricing::{asymmetry_delta, conditional_mean_seller_margin};
use noisyodds::{Probability, Result, WeightRule};

fn main() -> Result<()> {
    println!("seller's mean margin, equal weights");
    println!("{:>6} {:>10} {:>10} {:>10}", "p_t", "eps=0.25", "eps=0.5", "eps=1");
    for p in [0.1, 0.3, 0.5 - 1e-9, 0.7, 0.9] {
        let row: Vec<String> = [0.25, 0.5, 1.0]
            .iter()
            .map(|&e| conditional_mean_seller_margin(Probability::new(p)?, e, WeightRule::EQUAL))
            .map(|v| v.map(|v| format!("{v:>10.5}")))
            .collect::<Result<_>>()?;
        println!("{p:>6.2} {}", row.join(" "));
    }

    println!();
    println!("gain when p_c overshoots p_t by iota, against loss when it undershoots");
    for iota in [0.05, 0.1, 0.2] {
        let a = asymmetry_delta(Probability::HALF, iota)?;
        println!("  iota = {iota:<4}  difference {:+.4}  sum {:+.4}", a.literal, a.net);
    }
    Ok(())
}
