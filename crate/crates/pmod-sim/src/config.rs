//! Simulation configuration and codebook resolution.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use pmod::codebook::Codebook;
use pmod::ivp::{self, InitialVector, SearchGrid};

/// How the code under test is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum CodeSpec {
    /// Explicit template values and multiplicities. Without a target
    /// rate, every arrangement becomes a codeword.
    Explicit { values: Vec<f64>, multiplicities: Vec<u32>, target_rate: Option<f64> },
    /// Grid search at fixed `k` for sequence length `n` and target rate.
    Search { n: usize, k: usize, target_rate: f64 },
}

impl CodeSpec {
    /// Builds the codebook this spec describes.
    pub fn build(&self) -> Result<Codebook> {
        match self {
            CodeSpec::Explicit { values, multiplicities, target_rate } => {
                let initial = InitialVector::new(values.clone(), multiplicities.clone())
                    .map_err(|e| anyhow!("bad code template: {e}"))?;
                let size = match target_rate {
                    Some(rate) => ivp::required_code_size(initial.n(), *rate)
                        .map_err(|e| anyhow!("bad target rate: {e}"))?,
                    None => {
                        let report = ivp::code_size(&initial);
                        u64::try_from(&report.count)
                            .map_err(|_| anyhow!("full code too large without a target rate"))?
                    }
                };
                Codebook::with_size(initial, size).map_err(|e| anyhow!("cannot build code: {e}"))
            }
            CodeSpec::Search { n, k, target_rate } => {
                let grid = SearchGrid { k_min: *k, k_max: *k, ..SearchGrid::default() };
                let candidates = ivp::search_parameters(*n, *target_rate, &grid)
                    .map_err(|e| anyhow!("parameter search failed: {e}"))?;
                let (initial, _) = candidates.into_iter().next().ok_or_else(|| {
                    anyhow!(
                        "no initial vector with n={n}, k={k} reaches rate {target_rate}; \
                         refine the grid or relax the rate"
                    )
                })?;
                let size = ivp::required_code_size(*n, *target_rate)
                    .map_err(|e| anyhow!("bad target rate: {e}"))?;
                Codebook::with_size(initial, size).map_err(|e| anyhow!("cannot build code: {e}"))
            }
        }
    }

    /// Checks a loaded codebook against whatever this spec pins down.
    pub fn check_against(&self, cb: &Codebook) -> Result<()> {
        match self {
            CodeSpec::Explicit { values, multiplicities, .. } => {
                if cb.initial().values() != values.as_slice()
                    || cb.initial().multiplicities() != multiplicities.as_slice()
                {
                    bail!("stored codebook disagrees with --mu/--m");
                }
            }
            CodeSpec::Search { n, k, .. } => {
                if cb.dim() != *n || cb.symbol_count() != *k {
                    bail!("stored codebook disagrees with --n/--k");
                }
            }
        }
        Ok(())
    }
}

/// A full simulation request.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code: CodeSpec,
    /// SNR points in dB, in sweep order.
    pub snr_db: Vec<f64>,
    /// Trials per SNR point.
    pub trials: u64,
    /// Master seed; trial `t` uses noise stream `(seed, t)`.
    pub seed: u64,
    pub mode: DecoderMode,
    /// Force the noise to zero (debugging aid).
    pub zero_noise: bool,
    /// Worker threads for trials within an SNR point.
    pub workers: usize,
    /// Measure decoder wall time. Timing runs are forced to a single
    /// worker; without this flag the timing columns stay zero so that
    /// equal-seed runs emit byte-identical CSV.
    pub timing: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            bail!("SNR sweep is empty");
        }
        if self.snr_db.iter().any(|db| !db.is_finite()) {
            bail!("SNR sweep contains a non-finite value");
        }
        if self.trials == 0 {
            bail!("need at least one trial per SNR point");
        }
        if self.workers == 0 {
            bail!("need at least one worker");
        }
        Ok(())
    }
}

/// Decoders to run per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderMode {
    Near,
    Ml,
    Both,
}

impl DecoderMode {
    pub fn runs_near(&self) -> bool {
        matches!(self, DecoderMode::Near | DecoderMode::Both)
    }

    pub fn runs_ml(&self) -> bool {
        matches!(self, DecoderMode::Ml | DecoderMode::Both)
    }
}

/// Resolves the codebook: load it from `path` when the file exists,
/// otherwise build it from `spec` and, if a path was given, save it.
pub fn load_or_build(spec: Option<&CodeSpec>, path: Option<&PathBuf>) -> Result<Codebook> {
    if let Some(path) = path {
        if path.exists() {
            let bytes =
                fs::read(path).with_context(|| format!("reading codebook {}", path.display()))?;
            let cb = Codebook::from_bytes(&bytes)
                .map_err(|e| anyhow!("loading codebook {}: {e}", path.display()))?;
            if let Some(spec) = spec {
                spec.check_against(&cb)?;
            }
            return Ok(cb);
        }
    }
    let spec = spec.ok_or_else(|| anyhow!("no code specified: give --mu/--m or --n/--k/--rate"))?;
    let cb = spec.build()?;
    if let Some(path) = path {
        fs::write(path, cb.to_bytes())
            .with_context(|| format!("writing codebook {}", path.display()))?;
    }
    Ok(cb)
}
