//! Initial vector design.
//!
//! The codewords of a permutation modulation code are the rearrangements
//! of one initial vector with `k` distinct component values. For a given
//! `k`, the energy-minimizing family of initial vectors places the values
//! on the integer-spaced grid centered at zero and derives the
//! multiplicities from a two-parameter exponential profile; see
//! [`solve_ivp`]. [`search_parameters`] scans that two-parameter family
//! over a configurable grid for vectors matching a target dimension and
//! rate.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
#[allow(unused_imports)] // f64 math comes from the trait under no_std
use num_traits::{Float, ToPrimitive};

use crate::mperm;

/// Errors from initial vector construction and search.
#[derive(Debug, Clone, PartialEq)]
pub enum IvpError {
    /// `lambda` must be positive, `eta` negative.
    BadLagrangeParams { lambda: f64, eta: f64 },
    /// Need at least one symbol value.
    NoSymbols,
    /// More distinct values than the symbol representation supports.
    TooManySymbols { count: usize },
    /// A multiplicity rounded to zero; the parameters give no valid code.
    DegenerateMultiplicity { index: usize },
    /// A multiplicity exceeds the 32-bit representation.
    MultiplicityOverflow { index: usize },
    /// Component values must be strictly increasing and finite.
    BadValues,
    /// The target rate needs more codewords than the index space holds.
    RateTooHigh { bits: f64 },
    /// Grid description is unusable (empty ranges or wrong signs).
    BadGrid(&'static str),
}

impl fmt::Display for IvpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IvpError::BadLagrangeParams { lambda, eta } => {
                write!(f, "need lambda > 0 and eta < 0, got ({lambda}, {eta})")
            }
            IvpError::NoSymbols => write!(f, "need at least one symbol value"),
            IvpError::TooManySymbols { count } => {
                write!(f, "{count} distinct values exceed the supported symbol range")
            }
            IvpError::DegenerateMultiplicity { index } => {
                write!(f, "degenerate multiplicity: component {index} rounds to zero")
            }
            IvpError::MultiplicityOverflow { index } => {
                write!(f, "multiplicity {index} does not fit 32 bits")
            }
            IvpError::BadValues => write!(f, "values must be finite and strictly increasing"),
            IvpError::RateTooHigh { bits } => {
                write!(f, "target rate needs 2^{bits:.2} codewords, beyond the index space")
            }
            IvpError::BadGrid(reason) => write!(f, "bad search grid: {reason}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for IvpError {}

/// The two Lagrangian parameters of the multiplicity profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeParams {
    lambda: f64,
    eta: f64,
}

impl LagrangeParams {
    /// Requires `lambda > 0` and `eta < 0`.
    pub fn new(lambda: f64, eta: f64) -> Result<Self, IvpError> {
        if !lambda.is_finite() || !eta.is_finite() || lambda <= 0.0 || eta >= 0.0 {
            return Err(IvpError::BadLagrangeParams { lambda, eta });
        }
        Ok(LagrangeParams { lambda, eta })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// The value/multiplicity template whose rearrangements form the code.
///
/// `values` are strictly increasing; `multiplicities[i]` says how many
/// positions hold `values[i]`. The sequence length is `n()`, the sum of
/// the multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialVector {
    values: Vec<f64>,
    multiplicities: Vec<u32>,
}

impl InitialVector {
    pub fn new(values: Vec<f64>, multiplicities: Vec<u32>) -> Result<Self, IvpError> {
        if values.is_empty() {
            return Err(IvpError::NoSymbols);
        }
        if values.len() > mperm::MAX_SYMBOLS {
            return Err(IvpError::TooManySymbols { count: values.len() });
        }
        if values.len() != multiplicities.len() {
            return Err(IvpError::BadValues);
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IvpError::BadValues);
        }
        if let Some(index) = multiplicities.iter().position(|&m| m == 0) {
            return Err(IvpError::DegenerateMultiplicity { index });
        }
        Ok(InitialVector { values, multiplicities })
    }

    /// Distinct component values, strictly increasing.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Repetition count per value.
    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Number of distinct values.
    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// Sequence length.
    pub fn n(&self) -> usize {
        mperm::total_length(&self.multiplicities)
    }

    /// Squared norm of the template, `sum(m_i * value_i^2)`.
    pub fn energy(&self) -> f64 {
        self.values.iter().zip(&self.multiplicities).map(|(&v, &m)| f64::from(m) * v * v).sum()
    }
}

/// Code size, rate, and energy of an initial vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSizeReport {
    /// Number of distinct rearrangements, exact.
    pub count: BigUint,
    /// Bits per dimension, `log2(count) / n`.
    pub rate: f64,
    /// Squared norm of the template.
    pub energy: f64,
}

/// Solves the fixed-`k` initial vector problem for the given parameters.
///
/// Values are the integer-spaced grid `-(k-1)/2 + (i-1)`; multiplicities
/// are `exp(-(value^2 + eta)/lambda)` rounded to the nearest integer
/// (ties away from zero). Any multiplicity rounding to zero rejects the
/// parameter pair.
pub fn solve_ivp(k: usize, params: &LagrangeParams) -> Result<InitialVector, IvpError> {
    if k == 0 {
        return Err(IvpError::NoSymbols);
    }
    if k > mperm::MAX_SYMBOLS {
        return Err(IvpError::TooManySymbols { count: k });
    }
    let mut values = Vec::with_capacity(k);
    let mut multiplicities = Vec::with_capacity(k);
    for i in 0..k {
        let value = -((k - 1) as f64) / 2.0 + i as f64;
        let raw = (-(value * value + params.eta) / params.lambda).exp();
        if !raw.is_finite() || raw >= u32::MAX as f64 {
            return Err(IvpError::MultiplicityOverflow { index: i });
        }
        let m = raw.round() as u32;
        if m == 0 {
            return Err(IvpError::DegenerateMultiplicity { index: i });
        }
        values.push(value);
        multiplicities.push(m);
    }
    InitialVector::new(values, multiplicities)
}

/// Exact code size and rate of an initial vector.
pub fn code_size(iv: &InitialVector) -> CodeSizeReport {
    let count = mperm::multiset_count(iv.multiplicities());
    let rate = log2_big(&count) / iv.n() as f64;
    CodeSizeReport { count, rate, energy: iv.energy() }
}

/// `log2` of an arbitrary-precision integer (0 maps to 0).
fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return 0.0;
    }
    if bits <= 53 {
        let v = x.to_u64().unwrap_or(u64::MAX);
        return (v as f64).log2();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// Codewords needed for rate `target_rate` at dimension `n`:
/// `ceil(2^(n * target_rate))`.
///
/// Exponents that are integers up to floating-point error snap to the
/// exact power of two so that e.g. `n = 50`, `rate = 1/5` yields 1024
/// rather than 1025.
pub fn required_code_size(n: usize, target_rate: f64) -> Result<u64, IvpError> {
    let bits = n as f64 * target_rate;
    if bits.is_nan() || bits <= 0.0 || bits >= 63.0 {
        return Err(IvpError::RateTooHigh { bits });
    }
    let raw = bits.exp2();
    let nearest = raw.round();
    let size = if (raw - nearest).abs() <= raw * 1e-9 { nearest } else { raw.ceil() };
    Ok(size as u64)
}

/// Parameter grid scanned by [`search_parameters`].
///
/// `lambda` is sampled logarithmically, `eta` linearly, for each `k` in
/// the inclusive range. The defaults cover the regime of interest for
/// low-rate codes. The eta axis is sampled densely because a middle
/// multiplicity of `m` at scale `lambda` is only produced inside an eta
/// window of width about `lambda / m`: around 0.002 for the length-100
/// templates, against which the default step is 0.00122.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub eta_min: f64,
    pub eta_max: f64,
    pub eta_points: usize,
    pub k_min: usize,
    pub k_max: usize,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            lambda_min: 0.1,
            lambda_max: 100.0,
            lambda_points: 64,
            eta_min: -10.0,
            eta_max: -0.01,
            eta_points: 8192,
            k_min: 2,
            k_max: 8,
        }
    }
}

impl SearchGrid {
    fn validate(&self) -> Result<(), IvpError> {
        let bounds = [self.lambda_min, self.lambda_max, self.eta_min, self.eta_max];
        if bounds.iter().any(|b| !b.is_finite()) {
            return Err(IvpError::BadGrid("grid bounds must be finite"));
        }
        if self.lambda_min <= 0.0 || self.lambda_max < self.lambda_min {
            return Err(IvpError::BadGrid("lambda range must be positive and ordered"));
        }
        if self.eta_max >= 0.0 || self.eta_min > self.eta_max {
            return Err(IvpError::BadGrid("eta range must be negative and ordered"));
        }
        if self.lambda_points == 0 || self.eta_points == 0 {
            return Err(IvpError::BadGrid("need at least one grid point per axis"));
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(IvpError::BadGrid("bad k range"));
        }
        Ok(())
    }

    fn lambda_at(&self, i: usize) -> f64 {
        if self.lambda_points == 1 {
            return self.lambda_min;
        }
        let t = i as f64 / (self.lambda_points - 1) as f64;
        self.lambda_min * (self.lambda_max / self.lambda_min).powf(t)
    }

    fn eta_at(&self, i: usize) -> f64 {
        if self.eta_points == 1 {
            return self.eta_min;
        }
        let t = i as f64 / (self.eta_points - 1) as f64;
        self.eta_min + (self.eta_max - self.eta_min) * t
    }
}

/// Scans the grid for initial vectors with sequence length `n` and at
/// least `ceil(2^(n * target_rate))` rearrangements.
///
/// Distinct `(values, multiplicities)` pairs are reported once, sorted by
/// ascending energy (ties by `k`, then multiplicities); the result is
/// deterministic for a fixed grid. An empty result means no grid point
/// matched; callers may refine the grid.
pub fn search_parameters(
    n: usize,
    target_rate: f64,
    grid: &SearchGrid,
) -> Result<Vec<(InitialVector, CodeSizeReport)>, IvpError> {
    grid.validate()?;
    let needed = BigUint::from(required_code_size(n, target_rate)?);
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut found: Vec<(InitialVector, CodeSizeReport)> = Vec::new();
    for k in grid.k_min..=grid.k_max {
        for li in 0..grid.lambda_points {
            let lambda = grid.lambda_at(li);
            for ei in 0..grid.eta_points {
                let params = LagrangeParams::new(lambda, grid.eta_at(ei))?;
                let Ok(iv) = solve_ivp(k, &params) else { continue };
                if iv.n() != n || !seen.insert(iv.multiplicities().to_vec()) {
                    continue;
                }
                let report = code_size(&iv);
                if report.count >= needed {
                    found.push((iv, report));
                }
            }
        }
    }
    found.sort_by(|a, b| {
        a.1.energy
            .total_cmp(&b.1.energy)
            .then_with(|| a.0.k().cmp(&b.0.k()))
            .then_with(|| a.0.multiplicities().cmp(b.0.multiplicities()))
    });
    Ok(found)
}
