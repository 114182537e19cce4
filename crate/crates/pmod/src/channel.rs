//! AWGN transmission.
//!
//! A unit-norm codeword `x` is received as `y = sqrt(rho * n) * x + w`
//! with `w` i.i.d. standard normal, so `rho` is the linear SNR at the
//! receiver. Noise comes from an explicit per-trial stream: ChaCha8
//! keyed by the master seed with the trial index as the stream number
//! (see [`trial_rng`]), which makes Monte-Carlo results independent of
//! how trials are scheduled across workers. Normal deviates are drawn
//! with `rand_distr`'s ziggurat sampler, so a pinned dependency set
//! reproduces runs bit for bit.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // f64 math comes from the trait under no_std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Norm tolerance accepted by [`transmit`].
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Channel description: linear SNR and dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    rho: f64,
    dim: usize,
}

/// Errors from channel parameterization and transmission.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    /// SNR must be positive and finite.
    BadSnr { rho: f64 },
    /// Dimension must be at least 1.
    BadDimension,
    /// Input length does not match the channel dimension.
    LengthMismatch { expected: usize, got: usize },
    /// Input is not unit norm within [`NORM_TOLERANCE`].
    NotUnitNorm { norm: f64 },
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::BadSnr { rho } => write!(f, "SNR must be positive, got {rho}"),
            ChannelError::BadDimension => write!(f, "dimension must be at least 1"),
            ChannelError::LengthMismatch { expected, got } => {
                write!(f, "expected a length-{expected} vector, got {got}")
            }
            ChannelError::NotUnitNorm { norm } => {
                write!(f, "input norm {norm} is not 1 within {NORM_TOLERANCE}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ChannelError {}

impl ChannelParams {
    pub fn new(rho: f64, dim: usize) -> Result<Self, ChannelError> {
        if rho <= 0.0 || !rho.is_finite() {
            return Err(ChannelError::BadSnr { rho });
        }
        if dim == 0 {
            return Err(ChannelError::BadDimension);
        }
        Ok(ChannelParams { rho, dim })
    }

    /// Linear SNR at the receiver.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Amplitude applied to the unit-norm codeword, `sqrt(rho * n)`.
    pub fn scale(&self) -> f64 {
        (self.rho * self.dim as f64).sqrt()
    }
}

/// `10^(db/10)`.
pub fn snr_db_to_linear(db: f64) -> f64 {
    (10.0f64).powf(db / 10.0)
}

/// The noise stream of one trial: ChaCha8 keyed by `master_seed`, stream
/// number `trial`. Streams for different trials never overlap, so trials
/// can run concurrently in any order without changing their draws.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Transmits `x` over the AWGN channel using draws from `rng`.
pub fn transmit<R: Rng + ?Sized>(
    x: &[f64],
    params: &ChannelParams,
    rng: &mut R,
) -> Result<Vec<f64>, ChannelError> {
    check_input(x, params)?;
    let scale = params.scale();
    Ok(x.iter().map(|&v| scale * v + rng.sample::<f64, _>(StandardNormal)).collect())
}

/// Transmission with the noise forced to zero: `y = sqrt(rho * n) * x`.
pub fn transmit_noiseless(x: &[f64], params: &ChannelParams) -> Result<Vec<f64>, ChannelError> {
    check_input(x, params)?;
    let scale = params.scale();
    Ok(x.iter().map(|&v| scale * v).collect())
}

fn check_input(x: &[f64], params: &ChannelParams) -> Result<(), ChannelError> {
    if x.len() != params.dim {
        return Err(ChannelError::LengthMismatch { expected: params.dim, got: x.len() });
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(ChannelError::NotUnitNorm { norm });
    }
    Ok(())
}
