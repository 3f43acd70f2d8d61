//! Learns blue, green and red from cone-cell cues and prints the final
//! weights. Pass a path to also write the weight trajectories as TSV.

use std::fs::File;
use std::io::BufWriter;

use widrow_hoff::experiments::{run_color_experiment, Color, ColorExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::init();
    let config = ColorExperimentConfig::default();
    let run = run_color_experiment(&config)?;

    println!("{:>8} {:>10} {:>10} {:>10}", "cone", "blue", "green", "red");
    for cone in Color::ALL {
        print!("{:>8}", cone.name());
        for name in Color::ALL {
            print!(" {:>10.4}", run.weight(cone, name));
        }
        println!();
    }
    let p = run.sign_patterns();
    println!(
        "sign patterns: red {} blue {} green {}",
        p.red, p.blue, p.green
    );

    if let Some(path) = std::env::args().nth(1) {
        run.write_trajectory_tsv(BufWriter::new(File::create(&path)?))?;
        println!("trajectories written to {path}");
    }
    Ok(())
}
