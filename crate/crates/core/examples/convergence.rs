//! Trains on a seeded Gaussian sample three ways and compares the weights
//! with a least-squares fit of the same sample.
//!
//! Usage: `cargo run --release --example convergence [repeats]`

use std::time::Instant;

use widrow_hoff::experiments::{run_convergence_experiment, ConvergenceConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = ConvergenceConfig::default();
    if let Some(r) = std::env::args().nth(1) {
        config.repeats = r.parse()?;
    }
    let start = Instant::now();
    let table = run_convergence_experiment(&config)?;
    table.write_tsv(std::io::stdout().lock())?;
    println!(
        "adjusted R2 {:.4}, F {:.1} on ({}, {}) df",
        table.ols.adj_r_squared, table.ols.f_statistic, table.ols.df_model, table.ols.df_residual
    );
    println!("max |shuffled - ols| = {:.5}", table.shuffled_gap());
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
