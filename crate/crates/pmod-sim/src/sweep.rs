//! Seeded Monte-Carlo sweeps with paired decoder evaluation.

use std::time::{Duration, Instant};

use anyhow::Result;
use pmod::channel::{self, trial_rng, ChannelParams};
use pmod::codebook::Codebook;
use pmod::decoder;
use rand::Rng;
use rayon::prelude::*;

use crate::config::{DecoderMode, SimConfig};

/// Aggregates of one SNR point. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub trials: u64,
    pub block_errors_nearml: u64,
    pub block_errors_ml: u64,
    pub bler_nearml: f64,
    pub bler_ml: f64,
    pub wilson_lo_nearml: f64,
    pub wilson_hi_nearml: f64,
    pub wilson_lo_ml: f64,
    pub wilson_hi_ml: f64,
    /// Mean distinct candidates per candidate-list decode.
    pub mean_candidates: f64,
    /// Total wall time in the candidate-list decoder, seconds.
    pub wall_time_nearml: f64,
    /// Total wall time in the maximum-likelihood decoder, seconds.
    pub wall_time_ml: f64,
}

/// 95% Wilson score interval for `errors` out of `trials`.
///
/// Stays valid at low error counts where the normal approximation
/// collapses, which is the regime block-error sweeps live in.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    const Z: f64 = 1.959963984540054;
    if trials == 0 {
        return (0.0, 0.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the boundary counts the lower (upper) limit is exactly p.
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    near_errors: u64,
    ml_errors: u64,
    candidate_sum: u64,
}

impl Tally {
    fn add(self, other: Tally) -> Tally {
        Tally {
            near_errors: self.near_errors + other.near_errors,
            ml_errors: self.ml_errors + other.ml_errors,
            candidate_sum: self.candidate_sum + other.candidate_sum,
        }
    }
}

/// One paired trial: draw a message and a noise realization from the
/// trial's stream, then run every enabled decoder on the same received
/// vector.
fn run_trial(
    cb: &Codebook,
    params: &ChannelParams,
    seed: u64,
    trial: u64,
    zero_noise: bool,
    mode: DecoderMode,
    timers: Option<&mut (Duration, Duration)>,
) -> Tally {
    let mut rng = trial_rng(seed, trial);
    let message = rng.random_range(0..cb.size());
    let x = cb.encode(message).expect("message within code size");
    let y = if zero_noise {
        channel::transmit_noiseless(&x, params).expect("codewords are unit norm")
    } else {
        channel::transmit(&x, params, &mut rng).expect("codewords are unit norm")
    };

    let mut tally = Tally::default();
    match timers {
        Some((near_time, ml_time)) => {
            if mode.runs_near() {
                let start = Instant::now();
                let result = decoder::decode(&y, cb, params);
                *near_time += start.elapsed();
                tally.near_errors = u64::from(result.message != message);
                tally.candidate_sum = u64::from(result.counters.candidates);
            }
            if mode.runs_ml() {
                let start = Instant::now();
                let result = decoder::ml_decode(&y, cb, params);
                *ml_time += start.elapsed();
                tally.ml_errors = u64::from(result.message != message);
            }
        }
        None => {
            if mode.runs_near() {
                let result = decoder::decode(&y, cb, params);
                tally.near_errors = u64::from(result.message != message);
                tally.candidate_sum = u64::from(result.counters.candidates);
            }
            if mode.runs_ml() {
                let result = decoder::ml_decode(&y, cb, params);
                tally.ml_errors = u64::from(result.message != message);
            }
        }
    }
    tally
}

fn run_point(cb: &Codebook, cfg: &SimConfig, snr_db: f64) -> Result<SweepRow> {
    let rho = channel::snr_db_to_linear(snr_db);
    let params = ChannelParams::new(rho, cb.dim())?;

    let mut near_time = Duration::ZERO;
    let mut ml_time = Duration::ZERO;
    let tally = if cfg.timing || cfg.workers <= 1 {
        // Timing runs stay on one worker so the reported ratio reflects
        // decoder cost, not scheduling.
        let mut timers = (Duration::ZERO, Duration::ZERO);
        let mut total = Tally::default();
        for trial in 0..cfg.trials {
            let timers = cfg.timing.then_some(&mut timers);
            total = total.add(run_trial(
                cb,
                &params,
                cfg.seed,
                trial,
                cfg.zero_noise,
                cfg.mode,
                timers,
            ));
        }
        (near_time, ml_time) = timers;
        total
    } else {
        (0..cfg.trials)
            .into_par_iter()
            .map(|trial| run_trial(cb, &params, cfg.seed, trial, cfg.zero_noise, cfg.mode, None))
            .reduce(Tally::default, Tally::add)
    };

    let (near_lo, near_hi) = if cfg.mode.runs_near() {
        wilson_interval(tally.near_errors, cfg.trials)
    } else {
        (0.0, 0.0)
    };
    let (ml_lo, ml_hi) =
        if cfg.mode.runs_ml() { wilson_interval(tally.ml_errors, cfg.trials) } else { (0.0, 0.0) };
    Ok(SweepRow {
        snr_db,
        trials: cfg.trials,
        block_errors_nearml: tally.near_errors,
        block_errors_ml: tally.ml_errors,
        bler_nearml: tally.near_errors as f64 / cfg.trials as f64,
        bler_ml: tally.ml_errors as f64 / cfg.trials as f64,
        wilson_lo_nearml: near_lo,
        wilson_hi_nearml: near_hi,
        wilson_lo_ml: ml_lo,
        wilson_hi_ml: ml_hi,
        mean_candidates: tally.candidate_sum as f64 / cfg.trials as f64,
        wall_time_nearml: near_time.as_secs_f64(),
        wall_time_ml: ml_time.as_secs_f64(),
    })
}

/// Runs the configured sweep on `cb`, one row per SNR point.
///
/// Every trial's randomness is keyed by `(seed, trial index)`, so the
/// statistics are identical for any worker count; both decoders see the
/// same noise realization within a trial.
pub fn run_sweep_on(cb: &Codebook, cfg: &SimConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if cfg.timing || cfg.workers <= 1 {
        cfg.snr_db.iter().map(|&db| run_point(cb, cfg, db)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
        pool.install(|| cfg.snr_db.iter().map(|&db| run_point(cb, cfg, db)).collect())
    }
}

/// Builds the codebook from the config and runs the sweep.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<SweepRow>> {
    let cb = cfg.code.build()?;
    run_sweep_on(&cb, cfg)
}
