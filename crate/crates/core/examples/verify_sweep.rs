//! Runs the full closed-form/oracle sweep and prints a summary by status.

use noisyodds::verify::{run, Status, VerifyOptions};

fn main() {
    let report = run(&VerifyOptions::default());
    for status in [Status::Ok, Status::Fail, Status::Erratum, Status::DocumentedDiscrepancy] {
        println!("{status:>24}: {}", report.count(status));
    }
    for f in report.findings.iter().filter(|f| f.status != Status::Ok) {
        println!(
            "{:<28} {:<9} p_c={:<8.4} eps={:<8.4} seg={:<14} closed={:+.9e} oracle={:+.9e} [{}]",
            f.quantity, f.variant, f.p_c, f.epsilon, f.segment_id, f.closed_form, f.oracle, f.status
        );
    }
}
