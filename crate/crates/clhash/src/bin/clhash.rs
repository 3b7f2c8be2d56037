//! Command-line front end: hash files or stdin, manage key files, run the
//! self-test battery, the statistical suites, and the throughput benchmark.
//!
//! stdout carries machine-readable output only; diagnostics go to stderr.
//! Exit codes: 0 success, 1 verification or statistical failure (or failed
//! inputs), 2 usage error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use clhash::bench::{bench_run, emit_csv, SchemeRegistry, DEFAULT_LENGTHS};
use clhash::stats::{
    avalanche_test, lowbit_universality_test, twobytes_test, MIN_AVALANCHE_TRIALS,
};
use clhash::verify::{run_battery, VerifyOptions};
use clhash::{clhash, ClKey, HashConfig, SplitMix64};

#[derive(Parser)]
#[command(
    name = "clhash",
    version,
    about = "64-bit universal hashing on carry-less multiplication: hashing, keys, validation, benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hash files (or stdin as "-"); prints one "<hex>  <name>" line each
    #[command(group(ArgGroup::new("keysrc").required(true).args(["seed", "key"])))]
    Hash {
        /// Files to hash; "-" reads stdin
        #[arg(default_value = "-")]
        inputs: Vec<String>,
        /// Derive the key from this seed
        #[arg(long)]
        seed: Option<u64>,
        /// Load the key from a CLH1 key file
        #[arg(long)]
        key: Option<PathBuf>,
        /// Apply the bit-mixing finalizer
        #[arg(long)]
        finalize: bool,
        /// Write output here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive a key from a seed and write it as a CLH1 key file
    Keygen {
        #[arg(long)]
        seed: u64,
        /// Destination path for the key file
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the self-test battery; nonzero exit on any failure
    Verify {
        /// Random inputs per oracle-equivalence suite
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-bit avalanche measurement; gate: worst bias < 0.03
    #[command(group(ArgGroup::new("keysrc").args(["seed", "key"])))]
    Avalanche {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        key: Option<PathBuf>,
        /// Input length in bytes
        #[arg(long, default_value_t = 8)]
        len: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long)]
        finalize: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated-output collision rate of a message pair over random keys
    Universality {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Truncation width L' in bits (8..=24)
        #[arg(long, default_value_t = 16)]
        lbits: u32,
        /// Number of independent keys
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Length of the two random messages
        #[arg(long, default_value_t = 64)]
        msg_len: usize,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hash all inputs with at most two non-zero bytes (lengths 4..=20);
    /// any full-width collision fails
    #[command(group(ArgGroup::new("keysrc").args(["seed", "key"])))]
    Twobytes {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long)]
        finalize: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Throughput sweep; emits CSV
    Bench {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Input lengths in bytes
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
        /// Scheme names to run
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Hash {
            inputs,
            seed,
            key,
            finalize,
            out,
        } => cmd_hash(&inputs, seed, key.as_deref(), finalize, out.as_deref()),
        Command::Keygen { seed, out } => cmd_keygen(seed, &out),
        Command::Verify { trials, json, out } => cmd_verify(trials, json, out.as_deref()),
        Command::Avalanche {
            seed,
            key,
            len,
            trials,
            finalize,
            json,
            out,
        } => cmd_avalanche(seed, key.as_deref(), len, trials, finalize, json, out.as_deref()),
        Command::Universality {
            seed,
            lbits,
            trials,
            msg_len,
            json,
            out,
        } => cmd_universality(seed, lbits, trials, msg_len, json, out.as_deref()),
        Command::Twobytes {
            seed,
            key,
            finalize,
            json,
            out,
        } => cmd_twobytes(seed, key.as_deref(), finalize, json, out.as_deref()),
        Command::Bench {
            seed,
            lengths,
            schemes,
            out,
        } => cmd_bench(seed, lengths, schemes, out.as_deref()),
    }
}

fn load_key(seed: u64, key_path: Option<&std::path::Path>) -> Result<ClKey, ExitCode> {
    match key_path {
        Some(path) => ClKey::load(path).map_err(|e| {
            eprintln!("clhash: cannot load key {}: {e}", path.display());
            ExitCode::from(EXIT_FAILURE)
        }),
        None => Ok(ClKey::derive(seed)),
    }
}

fn write_out(out: Option<&std::path::Path>, content: &str) -> ExitCode {
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, content) {
                eprintln!("clhash: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_FAILURE);
            }
            ExitCode::SUCCESS
        }
        None => {
            print!("{content}");
            ExitCode::SUCCESS
        }
    }
}

fn cmd_hash(
    inputs: &[String],
    seed: Option<u64>,
    key_path: Option<&std::path::Path>,
    finalize: bool,
    out: Option<&std::path::Path>,
) -> ExitCode {
    let key = match load_key(seed.unwrap_or(0), key_path) {
        Ok(k) => k,
        Err(code) => return code,
    };
    let config = HashConfig { finalize };
    let mut lines = String::new();
    let mut failed = false;
    for name in inputs {
        let data = if name == "-" {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).map(|_| buf)
        } else {
            std::fs::read(name)
        };
        match data {
            Ok(bytes) => {
                let h = clhash(&key, &bytes, config);
                lines.push_str(&format!("{h:016x}  {name}\n"));
            }
            Err(e) => {
                eprintln!("clhash: cannot read {name}: {e}");
                failed = true;
            }
        }
    }
    let write_code = write_out(out, &lines);
    if failed {
        ExitCode::from(EXIT_FAILURE)
    } else {
        write_code
    }
}

fn cmd_keygen(seed: u64, out: &std::path::Path) -> ExitCode {
    let key = ClKey::derive(seed);
    match key.save(out) {
        Ok(()) => {
            eprintln!(
                "clhash: wrote {}-byte key file to {}",
                clhash::key::KEY_FILE_BYTES,
                out.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("clhash: cannot write key file {}: {e}", out.display());
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn cmd_verify(trials: u64, json: bool, out: Option<&std::path::Path>) -> ExitCode {
    let opts = VerifyOptions {
        random_checks: trials,
        ..VerifyOptions::default()
    };
    let report = run_battery(&opts);
    let content = if json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        let mut text = String::new();
        for s in &report.suites {
            text.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                s.name,
                s.checks,
                s.failures,
                if s.passed() { "pass" } else { "FAIL" }
            ));
        }
        text
    };
    let code = write_out(out, &content);
    if !report.all_passed() {
        eprintln!("clhash: self-test battery FAILED");
        return ExitCode::from(EXIT_FAILURE);
    }
    code
}

fn cmd_avalanche(
    seed: u64,
    key_path: Option<&std::path::Path>,
    len: usize,
    trials: u64,
    finalize: bool,
    json: bool,
    out: Option<&std::path::Path>,
) -> ExitCode {
    if trials < MIN_AVALANCHE_TRIALS {
        eprintln!("clhash: --trials must be at least {MIN_AVALANCHE_TRIALS}");
        return ExitCode::from(EXIT_USAGE);
    }
    if len == 0 || len > 1024 {
        eprintln!("clhash: --len must be in 1..=1024");
        return ExitCode::from(EXIT_USAGE);
    }
    let key = match load_key(seed, key_path) {
        Ok(k) => k,
        Err(code) => return code,
    };
    let report = avalanche_test(&key, len, trials, HashConfig { finalize }, seed);
    let pass = report.passes();
    let content = if json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        format!(
            "avalanche\tinput_len={}\ttrials={}\tfinalize={}\tworst_bias={:.6}\t{}\n",
            report.input_len,
            report.trials,
            report.finalize,
            report.worst_bias,
            if pass { "pass" } else { "FAIL" }
        )
    };
    let code = write_out(out, &content);
    if !pass {
        eprintln!(
            "clhash: avalanche gate failed (worst bias {:.6} >= {:.2})",
            report.worst_bias,
            clhash::stats::AVALANCHE_BIAS_GATE
        );
        return ExitCode::from(EXIT_FAILURE);
    }
    code
}

fn cmd_universality(
    seed: u64,
    lbits: u32,
    trials: u64,
    msg_len: usize,
    json: bool,
    out: Option<&std::path::Path>,
) -> ExitCode {
    if msg_len == 0 {
        eprintln!("clhash: --msg-len must be positive");
        return ExitCode::from(EXIT_USAGE);
    }
    // two distinct random messages of the requested length
    let mut rng = SplitMix64::new(seed ^ 0x6d73_675f_6762);
    let mut msg_a = vec![0u8; msg_len];
    let mut msg_b = vec![0u8; msg_len];
    rng.fill_bytes(&mut msg_a);
    rng.fill_bytes(&mut msg_b);
    if msg_a == msg_b {
        msg_b[0] ^= 1;
    }
    let report = match lowbit_universality_test(&msg_a, &msg_b, lbits, trials, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("clhash: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let pass = report.passes();
    let content = if json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        format!(
            "universality\tlbits={}\ttrials={}\tcollisions={}\tbound={:.3}\t{}\n",
            lbits,
            report.trials,
            report.collisions,
            report.bound,
            if pass { "pass" } else { "FAIL" }
        )
    };
    let code = write_out(out, &content);
    if !pass {
        eprintln!(
            "clhash: universality gate failed ({} collisions, bound {:.3})",
            report.collisions, report.bound
        );
        return ExitCode::from(EXIT_FAILURE);
    }
    code
}

fn cmd_twobytes(
    seed: u64,
    key_path: Option<&std::path::Path>,
    finalize: bool,
    json: bool,
    out: Option<&std::path::Path>,
) -> ExitCode {
    let key = match load_key(seed, key_path) {
        Ok(k) => k,
        Err(code) => return code,
    };
    let report = twobytes_test(&key, HashConfig { finalize });
    let pass = report.passes();
    let content = if json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        format!(
            "twobytes\tinputs={}\tcollisions={}\tbound={:.6}\t{}\n",
            report.trials,
            report.collisions,
            report.bound,
            if pass { "pass" } else { "FAIL" }
        )
    };
    let code = write_out(out, &content);
    if !pass {
        eprintln!(
            "clhash: two-byte sweep found {} collisions",
            report.collisions
        );
        return ExitCode::from(EXIT_FAILURE);
    }
    code
}

fn cmd_bench(
    seed: u64,
    lengths: Option<Vec<usize>>,
    schemes: Option<Vec<String>>,
    out: Option<&std::path::Path>,
) -> ExitCode {
    let lengths = lengths.unwrap_or_else(|| DEFAULT_LENGTHS.to_vec());
    if lengths.is_empty() || lengths.contains(&0) {
        eprintln!("clhash: --lengths must be positive byte counts");
        return ExitCode::from(EXIT_USAGE);
    }
    let registry = SchemeRegistry::with_builtins(seed);
    let schemes = schemes.unwrap_or_else(|| registry.names());
    match bench_run(&registry, &schemes, &lengths, seed) {
        Ok(results) => write_out(out, &emit_csv(&results)),
        Err(e) => {
            eprintln!("clhash: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
