use std::process::ExitCode;

use clap::Parser;
use lmls_cli::{run_bench, Args, BenchConfig, CliError};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => e.exit(),
    };
    let result = BenchConfig::from_args(args).and_then(|cfg| {
        let outcome = run_bench(&cfg)?;
        let finals: Vec<f64> = outcome.traces.iter().map(|t| t.final_cost()).collect();
        let mut sorted = finals.clone();
        sorted.sort_by(f64::total_cmp);
        eprintln!(
            "{}: {} trial(s), median final cost {:e}",
            cfg.algo.name(),
            finals.len(),
            sorted[sorted.len() / 2]
        );
        if cfg.out.is_none() {
            print!("{}", outcome.aggregate.to_csv_string());
        }
        Ok::<_, CliError>(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Args(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
