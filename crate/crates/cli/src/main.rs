use clap::Parser;
use l3lab::commands::{run, Cli};
use l3lab::{config, CliError};
use std::process::ExitCode;
use std::time::Instant;

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("L3LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("L3LAB_THREADS = '{v}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut args: Vec<String> = std::env::args().collect();
    if let Some(path) = config::config_path(&args) {
        match config::load(path.as_ref()) {
            Ok(entries) => args = config::merge(&args, &entries),
            Err(e) => {
                eprintln!("error: config {e}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse_from(args);
    let result = init_threads().and_then(|()| {
        let outcome = run(&cli.command)?;
        let body = outcome.record.render(cli.format);
        match &cli.out {
            Some(path) => std::fs::write(path, body)?,
            None => print!("{body}"),
        }
        Ok(outcome.failed)
    });
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
