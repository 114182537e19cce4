use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};

use pmod_sim::{describe_code, emit_csv, load_or_build, run_sweep_on};
use pmod_sim::{CodeSpec, DecoderMode, SimConfig};

/// Permutation modulation code simulator: constructs rate-adapted codes,
/// runs seeded AWGN Monte-Carlo sweeps with candidate-list and exact ML
/// decoding on shared noise, and writes one CSV row per SNR point.
#[derive(Debug, Parser)]
#[command(name = "pmod-sim", version)]
struct Cli {
    /// Template values, comma separated (with --m).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1..)]
    mu: Option<Vec<f64>>,

    /// Template multiplicities, comma separated (with --mu).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    m: Option<Vec<u32>>,

    /// Sequence length for parameter search (with --k and --rate).
    #[arg(long)]
    n: Option<usize>,

    /// Number of distinct values for parameter search.
    #[arg(long)]
    k: Option<usize>,

    /// Target rate in bits per dimension; accepts decimals or fractions
    /// like 1/3. Optional with --mu/--m (default: keep every arrangement).
    #[arg(long, value_parser = parse_rate)]
    rate: Option<f64>,

    /// Sweep start, dB.
    #[arg(long, default_value_t = -15.0, allow_negative_numbers = true)]
    snr_start: f64,

    /// Sweep stop, dB (inclusive).
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    snr_stop: f64,

    /// Sweep step, dB.
    #[arg(long, default_value_t = 1.0)]
    snr_step: f64,

    /// Trials per SNR point.
    #[arg(long, default_value_t = 1000)]
    trials: u64,

    /// Master seed; trial t draws from noise stream (seed, t).
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Decoders to run on each trial.
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,

    /// CSV output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Codebook file: loaded when it exists, otherwise built from the
    /// code flags and saved here.
    #[arg(long)]
    codebook: Option<PathBuf>,

    /// Force the noise to zero (debugging aid).
    #[arg(long)]
    zero_noise: bool,

    /// Print the code description instead of simulating.
    #[arg(long)]
    describe: bool,

    /// Worker threads per SNR point.
    #[arg(long, default_value_t = 1)]
    workers: usize,

    /// Measure decoder wall time (forces a single worker; with this flag
    /// off the timing columns are zero and output is seed-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Near,
    Ml,
    Both,
}

impl From<ModeArg> for DecoderMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Near => DecoderMode::Near,
            ModeArg::Ml => DecoderMode::Ml,
            ModeArg::Both => DecoderMode::Both,
        }
    }
}

/// Accepts "0.2" or "1/5".
fn parse_rate(text: &str) -> Result<f64, String> {
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("bad rate {text}"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("bad rate {text}"))?;
            num / den
        }
        None => text.trim().parse().map_err(|_| format!("bad rate {text}"))?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(format!("rate must be positive and finite, got {text}"))
    }
}

fn code_spec(cli: &Cli) -> Result<Option<CodeSpec>> {
    match (&cli.mu, &cli.m, cli.n, cli.k) {
        (Some(mu), Some(m), None, None) => Ok(Some(CodeSpec::Explicit {
            values: mu.clone(),
            multiplicities: m.clone(),
            target_rate: cli.rate,
        })),
        (None, None, Some(n), Some(k)) => {
            let Some(rate) = cli.rate else { bail!("search mode needs --rate") };
            Ok(Some(CodeSpec::Search { n, k, target_rate: rate }))
        }
        (None, None, None, None) => Ok(None),
        _ => bail!("give either --mu with --m, or --n with --k and --rate"),
    }
}

fn sweep_points(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step <= 0.0 || !step.is_finite() {
        bail!("--snr-step must be positive");
    }
    if stop < start {
        bail!("--snr-stop is below --snr-start");
    }
    let mut points = Vec::new();
    for i in 0.. {
        let db = start + i as f64 * step;
        if db > stop + step * 1e-9 {
            break;
        }
        points.push(db);
    }
    Ok(points)
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let spec = code_spec(&cli)?;
    let cb = load_or_build(spec.as_ref(), cli.codebook.as_ref())?;

    if cli.describe {
        print!("{}", describe_code(&cb));
        return Ok(());
    }

    let cfg = SimConfig {
        code: spec.unwrap_or(CodeSpec::Explicit {
            values: cb.initial().values().to_vec(),
            multiplicities: cb.initial().multiplicities().to_vec(),
            target_rate: None,
        }),
        snr_db: sweep_points(cli.snr_start, cli.snr_stop, cli.snr_step)?,
        trials: cli.trials,
        seed: cli.seed,
        mode: cli.mode.into(),
        zero_noise: cli.zero_noise,
        workers: cli.workers,
        timing: cli.timing,
    };
    let rows = run_sweep_on(&cb, &cfg)?;

    match &cli.out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("creating output {}", path.display()))?;
            let mut out = BufWriter::new(file);
            emit_csv(&rows, &mut out)
                .with_context(|| format!("writing output {}", path.display()))?;
            out.flush().with_context(|| format!("writing output {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            emit_csv(&rows, &mut stdout.lock()).context("writing CSV to stdout")?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(error) = run() {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}
