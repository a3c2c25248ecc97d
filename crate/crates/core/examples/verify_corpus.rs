//! Runs the randomized inequality corpora (relative isoperimetric fit,
//! Lipschitz bound, raster and Monte Carlo agreement, small-mass
//! expansion, minimizer diagnostics) and prints one line per check.
//! Pass `full` for the default corpus sizes.
//!
//! `cargo run --release --example verify_corpus [full]`

use std::time::Instant;

use isoshape::oracle::{total_violations, verify, CorpusOptions};

fn main() -> isoshape::Result<()> {
    let opts = if std::env::args().nth(1).as_deref() == Some("full") {
        CorpusOptions::default()
    } else {
        CorpusOptions {
            blobs: 16,
            lipschitz_pairs: 20,
            agreement_shapes: 5,
            mc_shapes: 2,
            ..Default::default()
        }
    };
    let start = Instant::now();
    let reports = verify(&opts)?;
    for r in &reports {
        println!("{:<28} trials {:>4}  violations {:>3}  worst margin {:.3e}", r.check, r.trials, r.violations, r.worst_margin);
    }
    println!("{} violations in total ({:.1?})", total_violations(&reports), start.elapsed());
    Ok(())
}
