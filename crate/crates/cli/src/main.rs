use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use spectral_pairs_cli::{golden, run_str, Defaults};

/// Reads one JSON request on stdin and writes one JSON result.
///
/// Exit codes: 0 for conclusive results (including refutations), 2 for
/// malformed input, 3 for internal errors. SPECTRAL_PAIRS_THREADS caps the
/// worker pool.
#[derive(Parser, Debug)]
#[command(name = "spectral-pairs", version)]
struct Args {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Default tolerance for requests that leave it out.
    #[arg(long)]
    tol: Option<f64>,
    /// Default radius for requests that leave it out.
    #[arg(long)]
    radius: Option<f64>,
    /// Default search bound for tiling and IFS searches.
    #[arg(long)]
    n_max: Option<i64>,
    /// Seed for sample grids.
    #[arg(long)]
    seed: Option<u64>,
    /// Write per-sample partial sums of a Parseval scan as CSV.
    #[arg(long)]
    dump_csv: Option<PathBuf>,
}

fn configure_threads() {
    if let Some(n) = std::env::var("SPECTRAL_PAIRS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    configure_threads();
    let mut input = String::new();
    if let Err(e) = std::io::stdin().read_to_string(&mut input) {
        eprintln!("failed to read stdin: {e}");
        return ExitCode::from(2);
    }
    let defaults = Defaults {
        tol: args.tol,
        radius: args.radius,
        n_max: args.n_max,
        seed: args.seed,
    };
    let outcome = run_str(&input, &defaults);

    if outcome.json["cmd"] == "golden" {
        if let Some(cases) = outcome.json["payload"]["cases"].as_array() {
            let rows: Vec<golden::CaseResult> = cases
                .iter()
                .map(|c| golden::CaseResult {
                    tag: c["tag"].as_str().unwrap_or("").into(),
                    cmd: c["cmd"].as_str().unwrap_or("").into(),
                    passed: c["passed"].as_bool().unwrap_or(false),
                    detail: c["detail"].as_str().unwrap_or("").into(),
                })
                .collect();
            eprint!("{}", golden::table(&rows));
        }
    }

    let text = serde_json::to_string_pretty(&outcome.json).expect("JSON values serialize") + "\n";
    let written = match &args.out {
        Some(path) => std::fs::write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("failed to write output: {e}");
        return ExitCode::from(3);
    }
    if let (Some(path), Some(csv)) = (&args.dump_csv, &outcome.csv) {
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("failed to write CSV: {e}");
            return ExitCode::from(3);
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}
