//! Codebook and decoder behaviour against independent references.

use pmod::channel::{self, trial_rng, ChannelParams};
use pmod::codebook::{Codebook, CodebookError, SelectionPlan};
use pmod::decoder;
use pmod::ivp::InitialVector;
use proptest::prelude::*;
use rand::Rng;

fn code1() -> Codebook {
    let iv = InitialVector::new(vec![-1.0, 0.0, 1.0], vec![1, 23, 1]).unwrap();
    Codebook::with_size(iv, 323).unwrap()
}

/// Lexicographic successor, duplicated here so the maximum-likelihood
/// oracle below shares nothing with the library's listing machinery.
fn next_arrangement(a: &mut [u8]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Exhaustive detection over the full permutation modulation: smallest
/// distance between `y` and `scale * arrangement of unit_values`.
fn full_code_ml(y: &[f64], scale: f64, unit_values: &[f64], multiplicity: &[u32]) -> Vec<u8> {
    let mut cur: Vec<u8> = multiplicity
        .iter()
        .enumerate()
        .flat_map(|(sym, &m)| std::iter::repeat_n(sym as u8, m as usize))
        .collect();
    let mut best = cur.clone();
    let mut best_distance = f64::INFINITY;
    loop {
        let d: f64 = cur
            .iter()
            .zip(y)
            .map(|(&s, &v)| {
                let d = v - scale * unit_values[s as usize];
                d * d
            })
            .sum();
        if d < best_distance {
            best_distance = d;
            best = cur.clone();
        }
        if !next_arrangement(&mut cur) {
            break;
        }
    }
    best
}

#[test]
fn rank_order_detection_is_full_code_ml() {
    let mut rng = trial_rng(97, 0);
    let cases: &[(&[f64], &[u32])] = &[
        (&[-1.0, 0.0, 1.0], &[1, 2, 1]),
        (&[-0.7, 0.4], &[3, 3]),
        (&[-1.2, -0.1, 0.8, 1.9], &[2, 1, 2, 1]),
        (&[-2.0, 1.0], &[5, 1]),
    ];
    for &(values, multiplicity) in cases {
        let iv = InitialVector::new(values.to_vec(), multiplicity.to_vec()).unwrap();
        let n = iv.n();
        let unit = pmod::codebook::normalized_values(&iv).unwrap();
        let scale = 1.7;
        for trial in 0..250 {
            let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
            let detected = decoder::slepian_detect(&y, multiplicity);
            let oracle = full_code_ml(&y, scale, &unit, multiplicity);
            assert_eq!(
                detected.symbols(),
                oracle.as_slice(),
                "multiplicity {multiplicity:?} trial {trial}"
            );
        }
    }
}

#[test]
fn candidate_mapping_examples() {
    let cb = code1();
    // Gray position 1 estimates message 0.5; half rounds away from zero.
    let z = &cb.listing()[1];
    assert_eq!(decoder::new_candidate(z, &cb), 1);
    // Gray position 556 is past the tail start 554: 277 + (556-554)/1.
    let z = &cb.listing()[556];
    assert_eq!(decoder::new_candidate(z, &cb), 279);
    // Selected positions come back exactly.
    for message in [0u64, 10, 277, 278, 322] {
        let z = cb.message_sequence(message).unwrap();
        assert_eq!(decoder::new_candidate(z, &cb), message);
    }
}

#[test]
fn near_ml_counters_do_not_depend_on_code_size() {
    let iv = InitialVector::new(vec![-1.0, 0.0, 1.0], vec![1, 48, 1]).unwrap();
    let small = Codebook::with_size(iv.clone(), 323).unwrap();
    let large = Codebook::with_size(iv, 1024).unwrap();
    let params = ChannelParams::new(0.5, 50).unwrap();
    for trial in 0..100u64 {
        let x = small.encode(trial % small.size()).unwrap();
        let y = channel::transmit(&x, &params, &mut trial_rng(61, trial)).unwrap();
        let a = decoder::decode(&y, &small, &params);
        let b = decoder::decode(&y, &large, &params);
        assert_eq!(a.counters.variants, b.counters.variants);
        assert_eq!(a.counters.rank_ops, b.counters.rank_ops);
        assert!(a.counters.candidates <= 4 && b.counters.candidates <= 4);
        assert!(a.counters.distance_evals <= 4 && b.counters.distance_evals <= 4);

        let ml_small = decoder::ml_decode(&y, &small, &params);
        let ml_large = decoder::ml_decode(&y, &large, &params);
        assert_eq!(ml_small.distance_evals, 323);
        assert_eq!(ml_large.distance_evals, 1024);
    }
}

#[test]
fn smaller_selection_never_shrinks_min_distance() {
    let iv = InitialVector::new(vec![-1.0, 0.0, 1.0], vec![1, 23, 1]).unwrap();
    let all = Codebook::with_size(iv.clone(), 600).unwrap();
    let subset = Codebook::with_size(iv.clone(), 323).unwrap();
    let tiny = Codebook::with_size(iv, 32).unwrap();
    let d_all = all.min_distance().unwrap();
    let d_subset = subset.min_distance().unwrap();
    let d_tiny = tiny.min_distance().unwrap();
    assert!(d_subset >= d_all);
    assert!(d_tiny >= d_subset);
    assert!((d_all - all.full_min_distance().unwrap()).abs() < 1e-15);
}

#[test]
fn two_codeword_min_distance_is_the_pair_distance() {
    let iv = InitialVector::new(vec![-0.5, 0.5], vec![1, 1]).unwrap();
    let cb = Codebook::with_size(iv, 2).unwrap();
    let a = cb.encode(0).unwrap();
    let b = cb.encode(1).unwrap();
    let direct: f64 = a.iter().zip(&b).map(|(&x, &y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    assert!((cb.min_distance().unwrap() - direct).abs() < 1e-15);
}

#[test]
fn larger_codes_encode_injectively() {
    for (m, size) in [(vec![1u32, 48, 1], 1024u64), (vec![1, 98, 1], 1024)] {
        let iv = InitialVector::new(vec![-1.0, 0.0, 1.0], m).unwrap();
        let cb = Codebook::with_size(iv, size).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for message in 0..cb.size() {
            assert!(seen.insert(cb.message_sequence(message).unwrap().clone()));
        }
        assert_eq!(seen.len() as u64, size);
    }
}

#[test]
fn oversized_selection_is_rejected() {
    let iv = InitialVector::new(vec![-1.0, 0.0, 1.0], vec![1, 23, 1]).unwrap();
    match Codebook::with_size(iv, 601) {
        Err(CodebookError::RateTooHigh { needed: 601, available: 600 }) => {}
        other => panic!("expected RateTooHigh, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn selection_plans_are_injective_and_invertible(
        total in 1u64..5000,
        size_seed in 0u64..5000,
    ) {
        let size = size_seed % total + 1;
        let plan = SelectionPlan::build(total, size).unwrap();
        let selected: Vec<u64> = plan.selected_indices().collect();
        prop_assert_eq!(selected.len() as u64, size);
        prop_assert!(selected.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(*selected.last().unwrap() < total);
        for message in 0..size {
            let gray = plan.gray_index(message).0 as f64;
            prop_assert_eq!(plan.message_estimate(gray), message as f64);
        }
    }

    #[test]
    fn random_small_codes_round_trip_noiselessly(
        multiplicity in prop::collection::vec(1u32..=3, 2..=4),
        size_seed in 1u64..10_000,
    ) {
        prop_assume!(multiplicity.iter().sum::<u32>() <= 7);
        let k = multiplicity.len();
        let values: Vec<f64> = (0..k).map(|i| i as f64 - (k - 1) as f64 / 2.0).collect();
        let iv = InitialVector::new(values, multiplicity).unwrap();
        let total = u64::try_from(&pmod::ivp::code_size(&iv).count).unwrap();
        let size = size_seed % total + 1;
        let cb = Codebook::with_size(iv, size).unwrap();
        let params = ChannelParams::new(2.0, cb.dim()).unwrap();
        for message in 0..cb.size() {
            let x = cb.encode(message).unwrap();
            let y = channel::transmit_noiseless(&x, &params).unwrap();
            let result = decoder::decode(&y, &cb, &params);
            prop_assert_eq!(result.message, message);
        }
    }
}

#[test]
fn detection_consistency_implies_correct_decode() {
    // Whenever base detection already equals the transmitted arrangement,
    // the decoded message must be the transmitted one.
    let cb = code1();
    let params = ChannelParams::new(0.25, cb.dim()).unwrap();
    let mut checked = 0u32;
    for trial in 0..400u64 {
        let message = trial % cb.size();
        let x = cb.encode(message).unwrap();
        let y = channel::transmit(&x, &params, &mut trial_rng(83, trial)).unwrap();
        let detected = decoder::slepian_detect(&y, cb.multiplicities());
        if detected == *cb.message_sequence(message).unwrap() {
            let result = decoder::decode(&y, &cb, &params);
            assert_eq!(result.message, message, "trial {trial}");
            checked += 1;
        }
    }
    assert!(checked > 0, "no trial exercised the consistency path");
}
