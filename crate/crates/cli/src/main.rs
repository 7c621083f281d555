use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use semitor_cli::{error_json, run, Command, Options};

/// Classify semi-tori C^2/Γ with algebraic lattices and their quotient elliptic curves.
#[derive(Parser, Debug)]
#[command(name = "semitor", version)]
struct Args {
    command: Command,
    /// JSON lattice document.
    file: PathBuf,
    /// Height bound for enumerated quotient triples.
    #[arg(long, default_value_t = 3)]
    height: u32,
    /// Largest height searched for a non-isogenous pair.
    #[arg(long, default_value_t = 6)]
    witness_cap: u32,
    /// Largest height searched for a normalizing basis.
    #[arg(long, default_value_t = 10)]
    norm_height: u32,
    /// Emit the machine-readable report.
    #[arg(long)]
    json: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().expect("thread pool already initialized");
    }
    let input = match std::fs::read_to_string(&args.file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.file.display());
            return ExitCode::from(2);
        }
    };
    let opts = Options { height: args.height, witness_cap: args.witness_cap, norm_height: args.norm_height };
    match run(args.command, &input, &opts) {
        Ok(out) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&out.json).unwrap());
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            if args.json {
                println!("{}", serde_json::to_string_pretty(&error_json(args.command, &e)).unwrap());
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
