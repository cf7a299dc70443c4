//! How much weight the seller's belief may carry before indiscriminate
//! betting stops being fair.

use noisyodds::fairsolver::solve_w1_star;
use noisyodds::{Probability, Result};

fn main() -> Result<()> {
    let noise = [0.25, 0.5, 0.75, 1.0];
    print!("{:>5}", "p_t");
    for e in noise {
        print!(" {:>9}", format!("eps={e}"));
    }
    println!();
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        print!("{p:>5.1}");
        for e in noise {
            let w = solve_w1_star(Probability::new(p)?, e)?;
            print!(" {:>9.5}", w.w1);
        }
        println!();
    }
    Ok(())
}
