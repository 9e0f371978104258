//! Regenerate the bundled curve fixture.
//!
//! Enumerates reduced integral models in a coefficient box, keeps
//! minimal rank-0 curves below the conductor bound, and writes them as
//! JSONL (gzip when the output path ends in `.gz`). The run is
//! deterministic: same options, byte-identical output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use murmurlab_core::empirics::gen::{generate, GenOptions};
use murmurlab_core::empirics::record::write_jsonl;

#[derive(Parser, Debug)]
#[command(
    name = "gen-fixture",
    about = "Enumerate small Weierstrass models and emit the rank-0 curve fixture"
)]
struct Args {
    /// Output path (.jsonl or .jsonl.gz)
    #[arg(long, default_value = "data/curves.jsonl.gz")]
    out: PathBuf,
    /// Keep conductors strictly below this bound
    #[arg(long, default_value_t = 10_000)]
    max_conductor: u64,
    /// Store a_p for all primes up to this bound
    #[arg(long, default_value_t = 600)]
    ap_bound: u64,
    /// Enumerate |a4| up to this bound
    #[arg(long, default_value_t = 300)]
    a4_bound: i64,
    /// Enumerate |a6| up to this bound
    #[arg(long, default_value_t = 3_000)]
    a6_bound: i64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = GenOptions {
        max_conductor: args.max_conductor,
        ap_bound: args.ap_bound,
        a4_bound: args.a4_bound,
        a6_bound: args.a6_bound,
    };
    let t0 = std::time::Instant::now();
    let (records, counters) = match generate(&opts) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("generation failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    eprintln!(
        "scanned {} models in {:.1?}: {} singular, {} unsupported discriminant, \
         {} non-minimal, {} additive at 2 (descoped), {} conductor out of range, \
         {} odd sign, {} even sign with vanishing L",
        counters.models,
        t0.elapsed(),
        counters.singular,
        counters.unsupported_disc,
        counters.non_minimal,
        counters.additive_at_two,
        counters.conductor_too_big,
        counters.odd_sign,
        counters.even_sign_l_zero,
    );
    eprintln!("kept {} rank-0 curves", records.len());
    if let Some(dir) = args.out.parent() {
        if !dir.as_os_str().is_empty() {
            if let Err(e) = std::fs::create_dir_all(dir) {
                eprintln!("cannot create {}: {e}", dir.display());
                return ExitCode::FAILURE;
            }
        }
    }
    if let Err(e) = write_jsonl(&args.out, &records) {
        eprintln!("cannot write {}: {e}", args.out.display());
        return ExitCode::FAILURE;
    }
    eprintln!("wrote {}", args.out.display());
    ExitCode::SUCCESS
}
