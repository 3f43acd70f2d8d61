//! Trial-level features for a downstream classifier: a synthetic table of
//! pupil samples with missing values is imputed, z-scored and learned in one
//! shuffled pass; activations and weights are exported per trial.
//!
//! With sixty z-scored cues the default learning rate is above the
//! stability limit, so the weights grow very large; a warning says so.
//!
//! Usage: `cargo run --example pupil_features [features.csv]`

use std::fs::File;
use std::io::BufWriter;

use widrow_hoff::experiments::{gen_pupil_table, run_pupil_pipeline, PupilConfig, PupilSpec};
use widrow_hoff::rule::max_stable_learning_rate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let table = gen_pupil_table(&PupilSpec::default())?;
    let run = run_pupil_pipeline(&table, &PupilConfig::default())?;
    println!(
        "{} trials, {} sample cues, {} conditions",
        table.n_rows(),
        run.weights.n_cues(),
        run.weights.n_outcomes()
    );
    println!(
        "learning rate {} against a stability limit of {:.4}",
        PupilConfig::default().learning_rate,
        max_stable_learning_rate(&run.events.events)
    );
    for (m, name) in run.events.outcome_names.iter().enumerate() {
        let column = run.weights.column(m);
        let norm: f64 = column.iter().map(|w| w.abs()).sum();
        println!("{name:>6}: weight 1-norm {norm:.3}");
    }
    match std::env::args().nth(1) {
        Some(path) => {
            run.export_features(BufWriter::new(File::create(&path)?))?;
            println!("features written to {path}");
        }
        None => println!("pass a path to export the per-trial features as CSV"),
    }
    Ok(())
}
