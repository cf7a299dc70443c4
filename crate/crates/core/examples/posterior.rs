//! Where the true frequency lies once a price has been agreed.

use noisyodds::{PosteriorDensity, Probability, Result, Variant};

fn main() -> Result<()> {
    for variant in Variant::ALL {
        for eps in [0.5, 1.0] {
            for p_c in [0.05, 0.5, 0.95] {
                let d = PosteriorDensity::new(Probability::new(p_c)?, eps, variant)?;
                println!(
                    "{variant:<9} eps={eps:<4} p_c={p_c:<5} support [{:.4}, {:.4}]  E[p_t] = {:.5}  shift {:+.5}",
                    d.support_lo,
                    d.support_hi,
                    d.mean(),
                    d.mean() - p_c
                );
            }
        }
    }
    Ok(())
}
