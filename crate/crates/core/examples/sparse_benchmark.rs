//! Times the active-rows kernel against the full matrix form on random
//! indicator events and checks that both give the same weights.
//!
//! Usage: `cargo run --release --example sparse_benchmark [j] [k] [events] [density]`

use widrow_hoff::rule::Precision;
use widrow_hoff::sparse::{bench_run, Backend, SparseEventBatch};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = |n: usize, default: &str| std::env::args().nth(n).unwrap_or_else(|| default.into());
    let j: usize = arg(1, "2000").parse()?;
    let k: usize = arg(2, "2000").parse()?;
    let events: usize = arg(3, "100").parse()?;
    let density: f64 = arg(4, "0.01").parse()?;

    let batch = SparseEventBatch::random(events, j, k, density, 1);
    let d = batch.density();
    println!(
        "{events} events, j={j}, k={k}: {:.1} cues and {:.1} outcomes active per event",
        d.mean_active_cues, d.mean_active_outcomes
    );
    let sparse = bench_run(&batch, Backend::Sparse, 0.01, Precision::Double, 1)?;
    let dense = bench_run(&batch, Backend::Dense, 0.01, Precision::Double, 1)?;
    for run in [&sparse, &dense] {
        let r = &run.report;
        println!(
            "{:>6}: {:.4}s, {:.0} events/s",
            r.backend, r.seconds, r.events_per_second
        );
    }
    println!(
        "dense/sparse time ratio {:.1}, max weight difference {:.1e}",
        dense.report.seconds / sparse.report.seconds,
        sparse.weights.max_abs_diff(&dense.weights)
    );
    Ok(())
}
