use std::io::Write;
use std::process::ExitCode;

use widrow_hoff::cli::{self, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match cli::run(std::env::args_os()) {
        Ok(manifest) => {
            // A closed stdout (e.g. piped into `head`) is not a failure.
            let mut out = std::io::stdout().lock();
            let stats = serde_json::to_string_pretty(&manifest.stats).unwrap_or_default();
            let _ = writeln!(out, "{stats}");
            let _ = writeln!(
                out,
                "wrote {} and {} to {}",
                manifest.outputs.join(", "),
                cli::MANIFEST_FILE,
                manifest.out_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(CliError::Clap(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            ExitCode::from(code)
        }
        Err(e) => {
            let code = e.exit_code();
            eprintln!("error: {:#}", anyhow::Error::new(e));
            ExitCode::from(code)
        }
    }
}
