//! Candidate-list decoding.
//!
//! Over the full permutation modulation, maximum-likelihood detection is
//! a rank-order assignment ([`slepian_detect`]): the `m_1` smallest
//! received components get symbol 0, the next `m_2` symbol 1, and so on.
//! For a rate-adapted subset that detection can land on an unselected
//! arrangement, so [`decode`] forms `2^(k-1)` variants of the received
//! vector -- one per subset of the sorted block boundaries, with the two
//! components straddling each chosen boundary interchanged -- detects
//! each variant, and maps the results through the lex-to-Gray table and
//! the selection plan inverse into message candidates. The final choice
//! is maximum likelihood over that candidate set only, so the work grows
//! with `2^(k-1) * n log n` and not with the code size.
//!
//! [`ml_decode`] is the exact reference: a distance scan over all `N`
//! codewords.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // f64 math comes from the trait under no_std
use num_traits::Float;

use crate::channel::ChannelParams;
use crate::codebook::Codebook;
use crate::mperm::{self, SymbolSequence};

/// Sorting permutation of a received vector.
///
/// `order()[p]` is the original position of the `p`-th smallest
/// component. Ties keep original-position order, so the permutation is
/// deterministic for any input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortPermutation {
    order: Vec<u32>,
}

impl SortPermutation {
    pub fn of(y: &[f64]) -> Self {
        let mut order: Vec<u32> = (0..y.len() as u32).collect();
        order.sort_by(|&a, &b| y[a as usize].total_cmp(&y[b as usize]));
        SortPermutation { order }
    }

    /// Sorted position -> original position.
    pub fn order(&self) -> &[u32] {
        &self.order
    }
}

/// Operation counts of one [`decode`] call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecodeCounters {
    /// Received-vector variants formed (`2^(k-1)`).
    pub variants: u32,
    /// Lexicographic rank computations.
    pub rank_ops: u32,
    /// Distinct message candidates after deduplication.
    pub candidates: u32,
    /// Codeword distance evaluations in the final step.
    pub distance_evals: u64,
}

/// Outcome of one [`decode`] call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Estimated message index.
    pub message: u64,
    /// Distinct candidates inspected, ascending.
    pub candidates: Vec<u64>,
    pub counters: DecodeCounters,
}

/// Outcome of one [`ml_decode`] call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MlDecodeResult {
    /// Estimated message index.
    pub message: u64,
    /// Codeword distance evaluations (always the code size).
    pub distance_evals: u64,
}

/// Rank-order detection over the full permutation modulation.
///
/// Assigns symbol 0 to the positions of the `m_1` smallest components of
/// `y`, symbol 1 to the next `m_2` smallest, and so on. Equivalent to a
/// maximum-likelihood search over all `M` arrangements, in `O(n log n)`.
pub fn slepian_detect(y: &[f64], multiplicity: &[u32]) -> SymbolSequence {
    let perm = SortPermutation::of(y);
    detect_with_order(&perm, multiplicity)
}

fn detect_with_order(perm: &SortPermutation, multiplicity: &[u32]) -> SymbolSequence {
    let n = perm.order.len();
    debug_assert_eq!(mperm::total_length(multiplicity), n);
    let mut symbols = vec![0u8; n];
    let mut next = 0usize;
    for (sym, &m) in multiplicity.iter().enumerate() {
        for _ in 0..m {
            symbols[perm.order[next] as usize] = sym as u8;
            next += 1;
        }
    }
    SymbolSequence::from_raw(symbols)
}

/// Sorted positions straddled by each block boundary: boundary `l`
/// (1-based) sits after the cumulative count `m_1 + ... + m_l`.
fn block_boundaries(multiplicity: &[u32]) -> Vec<usize> {
    let mut boundaries = Vec::with_capacity(multiplicity.len().saturating_sub(1));
    let mut cum = 0usize;
    for &m in &multiplicity[..multiplicity.len() - 1] {
        cum += m as usize;
        boundaries.push(cum);
    }
    boundaries
}

/// Variant `j` of the received vector: for each set bit `l` of `j`
/// (low to high), the components occupying sorted positions `M_l` and
/// `M_l + 1` are interchanged, where `M_l` is the cumulative size of the
/// first `l` blocks. Variant 0 is `y` itself.
///
/// # Panics
///
/// When `variant >= 2^(k-1)` or `y` does not match the multiplicities.
pub fn create_variant(y: &[f64], variant: u64, multiplicity: &[u32]) -> Vec<f64> {
    let k = multiplicity.len();
    assert!((1..=33).contains(&k), "unsupported symbol count {k}");
    assert!(variant < 1u64 << (k - 1), "variant {variant} out of range");
    assert_eq!(y.len(), mperm::total_length(multiplicity), "length mismatch");
    let perm = SortPermutation::of(y);
    let mut out = y.to_vec();
    for (bit, &boundary) in block_boundaries(multiplicity).iter().enumerate() {
        if variant >> bit & 1 == 1 {
            let a = perm.order[boundary - 1] as usize;
            let b = perm.order[boundary] as usize;
            out.swap(a, b);
        }
    }
    out
}

/// Detection of variant `j`, derived from the base detection by swapping
/// the symbols at the boundary positions instead of re-sorting.
fn variant_detection(
    base: &SymbolSequence,
    perm: &SortPermutation,
    variant: u64,
    boundaries: &[usize],
) -> SymbolSequence {
    let mut symbols = base.symbols().to_vec();
    for (bit, &boundary) in boundaries.iter().enumerate() {
        if variant >> bit & 1 == 1 {
            let a = perm.order[boundary - 1] as usize;
            let b = perm.order[boundary] as usize;
            symbols.swap(a, b);
        }
    }
    SymbolSequence::from_raw(symbols)
}

/// Maps a detected arrangement to the nearest selected message index:
/// lexicographic rank, lex-to-Gray translation, plan inverse, rounding
/// half away from zero, clamped to `{0, ..., N-1}`.
pub fn new_candidate(z: &SymbolSequence, cb: &Codebook) -> u64 {
    let lex = mperm::lex_rank(z, cb.multiplicities()).expect("detection matches multiplicities");
    let gray = cb.table().lookup(lex);
    let estimate = cb.plan().message_estimate(gray.0 as f64);
    let rounded = estimate.round();
    let max = (cb.size() - 1) as f64;
    rounded.clamp(0.0, max) as u64
}

/// Candidate-list decoding of one received vector.
///
/// Runs rank-order detection on all `2^(k-1)` boundary variants, maps
/// each to a message candidate, and returns the maximum-likelihood
/// choice among the distinct candidates (ties to the smallest index).
///
/// # Panics
///
/// When `y` is not of the codebook dimension.
pub fn decode(y: &[f64], cb: &Codebook, params: &ChannelParams) -> DecodeResult {
    let m = cb.multiplicities();
    let k = m.len();
    assert_eq!(y.len(), cb.dim(), "received vector length mismatch");
    assert!(k <= 33, "unsupported symbol count {k}");

    let perm = SortPermutation::of(y);
    let base = detect_with_order(&perm, m);
    let boundaries = block_boundaries(m);
    let variant_count = 1u64 << (k - 1);

    let mut counters = DecodeCounters::default();
    let mut candidates: Vec<u64> = Vec::with_capacity(variant_count as usize);
    for j in 0..variant_count {
        let z = if j == 0 { base.clone() } else { variant_detection(&base, &perm, j, &boundaries) };
        counters.variants += 1;
        counters.rank_ops += 1;
        candidates.push(new_candidate(&z, cb));
    }
    candidates.sort_unstable();
    candidates.dedup();
    counters.candidates = candidates.len() as u32;

    let scale = params.scale();
    let mut best = candidates[0];
    let mut best_distance = f64::INFINITY;
    for &candidate in &candidates {
        let d = cb.distance_sq(y, scale, candidate);
        counters.distance_evals += 1;
        if d < best_distance {
            best_distance = d;
            best = candidate;
        }
    }
    DecodeResult { message: best, candidates, counters }
}

/// Exact maximum-likelihood decoding: distance scan over all codewords,
/// ties to the smallest index.
///
/// # Panics
///
/// When `y` is not of the codebook dimension.
pub fn ml_decode(y: &[f64], cb: &Codebook, params: &ChannelParams) -> MlDecodeResult {
    assert_eq!(y.len(), cb.dim(), "received vector length mismatch");
    let scale = params.scale();
    let mut best = 0u64;
    let mut best_distance = f64::INFINITY;
    for message in 0..cb.size() {
        let d = cb.distance_sq(y, scale, message);
        if d < best_distance {
            best_distance = d;
            best = message;
        }
    }
    MlDecodeResult { message: best, distance_evals: cb.size() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{self, trial_rng};
    use crate::ivp::InitialVector;
    use rand::Rng;

    fn code1() -> Codebook {
        let iv = InitialVector::new(vec![-1.0, 0.0, 1.0], vec![1, 23, 1]).unwrap();
        Codebook::with_size(iv, 323).unwrap()
    }

    fn small_code() -> Codebook {
        // n = 4, m = (2, 2): M = 6, keep 4.
        let iv = InitialVector::new(vec![-0.5, 0.5], vec![2, 2]).unwrap();
        Codebook::with_size(iv, 4).unwrap()
    }

    #[test]
    fn detection_assigns_by_rank() {
        let z = slepian_detect(&[0.3, -0.2, 0.9, -0.7], &[2, 2]);
        assert_eq!(z.symbols(), &[1, 0, 1, 0]);
    }

    #[test]
    fn detection_ignores_positive_affine_maps() {
        let y = [0.4, -1.3, 0.0, 2.2, 0.1, -0.6];
        let m = [1, 3, 2];
        let base = slepian_detect(&y, &m);
        let mapped: Vec<f64> = y.iter().map(|&v| 3.7 * v + 11.0).collect();
        assert_eq!(slepian_detect(&mapped, &m), base);
    }

    #[test]
    fn sort_permutation_is_stable_on_ties() {
        let perm = SortPermutation::of(&[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(perm.order(), &[1, 3, 0, 2]);
    }

    #[test]
    fn variant_zero_is_identity() {
        let y = [0.25, -0.5, 0.125, 0.75];
        assert_eq!(create_variant(&y, 0, &[2, 2]), y.to_vec());
    }

    #[test]
    fn variant_swaps_block_boundaries() {
        // m = (1, 23, 1): boundaries after sorted positions 1 and 24.
        let cb = code1();
        let y: Vec<f64> = (0..25).map(|i| ((i * 7 % 25) as f64) - 12.0).collect();
        let perm = SortPermutation::of(&y);
        let v1 = create_variant(&y, 1, cb.multiplicities());
        let (a, b) = (perm.order()[0] as usize, perm.order()[1] as usize);
        assert_eq!(v1[a], y[b]);
        assert_eq!(v1[b], y[a]);
        let v3 = create_variant(&y, 3, cb.multiplicities());
        let (c, d) = (perm.order()[23] as usize, perm.order()[24] as usize);
        assert_eq!(v3[a], y[b]);
        assert_eq!(v3[b], y[a]);
        assert_eq!(v3[c], y[d]);
        assert_eq!(v3[d], y[c]);
    }

    #[test]
    fn variant_detection_matches_composition() {
        let cb = small_code();
        let m = cb.multiplicities();
        let mut rng = trial_rng(11, 0);
        for trial in 0..200 {
            let y: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let perm = SortPermutation::of(&y);
            let base = detect_with_order(&perm, m);
            let boundaries = block_boundaries(m);
            for j in 0..2u64 {
                let via_values = slepian_detect(&create_variant(&y, j, m), m);
                let via_symbols = variant_detection(&base, &perm, j, &boundaries);
                assert_eq!(via_values, via_symbols, "trial {trial} variant {j}");
            }
        }
    }

    #[test]
    fn noiseless_round_trip_code1() {
        let cb = code1();
        let params = ChannelParams::new(1.0, cb.dim()).unwrap();
        for message in [0u64, 1, 45, 277, 278, 322] {
            let x = cb.encode(message).unwrap();
            let y = channel::transmit_noiseless(&x, &params).unwrap();
            let result = decode(&y, &cb, &params);
            assert_eq!(result.message, message);
            assert!(result.candidates.contains(&message));
            assert!(result.counters.candidates <= 4);
        }
    }

    #[test]
    fn candidate_count_is_bounded() {
        let cb = code1();
        let params = ChannelParams::new(0.5, cb.dim()).unwrap();
        for trial in 0..100 {
            let x = cb.encode(trial % cb.size()).unwrap();
            let y = channel::transmit(&x, &params, &mut trial_rng(5, trial)).unwrap();
            let result = decode(&y, &cb, &params);
            assert!(result.counters.candidates <= 4);
            assert!(result.counters.variants == 4);
            assert!(result.candidates.binary_search(&result.message).is_ok());
        }
    }

    #[test]
    fn ml_scans_every_codeword() {
        let cb = small_code();
        let params = ChannelParams::new(2.0, cb.dim()).unwrap();
        let x = cb.encode(2).unwrap();
        let y = channel::transmit_noiseless(&x, &params).unwrap();
        let result = ml_decode(&y, &cb, &params);
        assert_eq!(result.message, 2);
        assert_eq!(result.distance_evals, 4);
    }

    #[test]
    fn ml_matches_naive_rescan() {
        let cb = code1();
        let params = ChannelParams::new(0.8, cb.dim()).unwrap();
        let scale = params.scale();
        for trial in 0..50 {
            let x = cb.encode((trial * 13) % cb.size()).unwrap();
            let y = channel::transmit(&x, &params, &mut trial_rng(29, trial)).unwrap();
            let fast = ml_decode(&y, &cb, &params).message;
            // Independent route: expanded inner-product form per codeword.
            let y_sq: f64 = y.iter().map(|v| v * v).sum();
            let mut best = 0u64;
            let mut best_metric = f64::INFINITY;
            for message in 0..cb.size() {
                let w = cb.encode(message).unwrap();
                let dot: f64 = y.iter().zip(&w).map(|(&a, &b)| a * b).sum();
                let metric = y_sq - 2.0 * scale * dot + scale * scale;
                if metric < best_metric {
                    best_metric = metric;
                    best = message;
                }
            }
            assert_eq!(fast, best, "trial {trial}");
        }
    }

    #[test]
    fn decode_message_is_candidate_minimizer() {
        let cb = code1();
        let params = ChannelParams::new(0.3, cb.dim()).unwrap();
        let scale = params.scale();
        for trial in 0..100 {
            let x = cb.encode((trial * 7) % cb.size()).unwrap();
            let y = channel::transmit(&x, &params, &mut trial_rng(31, trial)).unwrap();
            let result = decode(&y, &cb, &params);
            let best = result
                .candidates
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    cb.distance_sq(&y, scale, a).total_cmp(&cb.distance_sq(&y, scale, b))
                })
                .unwrap();
            assert_eq!(result.message, best);
        }
    }
}
