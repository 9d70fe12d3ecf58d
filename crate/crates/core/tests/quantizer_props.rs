use proptest::prelude::*;
use sdcs_core::{
    pcm_quantize, shape_quantize, sigma_delta_quantize, Alphabet, NoiseShaper, TrialRng,
};

fn input(len: usize, amp: f64, seed: u64) -> Vec<f64> {
    let mut rng = TrialRng::new(seed);
    (0..len).map(|_| amp * (2.0 * rng.uniform() - 1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_state_and_error_bounds(
        len in 1usize..300,
        r in 1usize..=4,
        amp in 0.0f64..10.0,
        coarse in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let delta = if coarse { 1.0 } else { 0.01 };
        let y = input(len, amp, seed);
        let a = Alphabet::unbounded(delta).unwrap();
        let res = sigma_delta_quantize(&y, r, &a);
        prop_assert!(res.max_state <= delta / 2.0 + 1e-12);
        let bound = 2f64.powi(r as i32 - 1) * delta + 1e-12;
        for (yj, qj) in y.iter().zip(&res.q) {
            prop_assert!((yj - qj).abs() <= bound);
        }
        let shaper = NoiseShaper::DifferencePower(r);
        prop_assert!(res.reconstruction_residual(&y, &shaper) <= 1e-12);
    }

    #[test]
    fn reconstruction_identity_all_shapers(
        len in 1usize..200,
        r in 0usize..=4,
        mu in 0.05f64..0.95,
        seed in any::<u64>(),
    ) {
        let y = input(len, 5.0, seed);
        let a = Alphabet::unbounded(0.1).unwrap();
        for shaper in [
            NoiseShaper::DifferencePower(r),
            NoiseShaper::HighPassPower(r),
            NoiseShaper::Leaky { order: r, mu },
        ] {
            let res = shape_quantize(&y, &shaper, &a).unwrap();
            prop_assert!(res.reconstruction_residual(&y, &shaper) <= 1e-12);
            prop_assert!(res.max_state <= 0.05 + 1e-12);
            let dense = shaper.to_dense(len);
            let hu = dense.matvec(&res.u).unwrap();
            for ((h, yj), qj) in hu.iter().zip(&y).zip(&res.q) {
                prop_assert!((h - (yj - qj)).abs() <= 1e-12);
            }
        }
        let pcm = pcm_quantize(&y, &a);
        prop_assert!(pcm.reconstruction_residual(&y, &NoiseShaper::Identity) <= 1e-12);
    }

    #[test]
    fn alphabet_usage_bound(len in 1usize..400, r in 1usize..=4, c in 0.1f64..5.0, seed in any::<u64>()) {
        let delta = 0.05;
        // ||y||_inf < C
        let y = input(len, c * 0.999, seed);
        let res = sigma_delta_quantize(&y, r, &Alphabet::unbounded(delta).unwrap());
        let limit = 2 * (c / delta).ceil() as usize + (1 << r) + 1;
        prop_assert!(res.distinct_levels() <= limit);
    }

    #[test]
    fn specializations_are_bit_exact(len in 1usize..100, seed in any::<u64>()) {
        let y = input(len, 3.0, seed);
        let a = Alphabet::unbounded(0.3).unwrap();
        prop_assert_eq!(
            shape_quantize(&y, &NoiseShaper::Identity, &a).unwrap(),
            pcm_quantize(&y, &a)
        );
        prop_assert_eq!(
            shape_quantize(&y, &NoiseShaper::DifferencePower(1), &a).unwrap(),
            sigma_delta_quantize(&y, 1, &a)
        );
    }
}

#[test]
fn second_order_error_bound_fine_step() {
    let y = input(1000, 7.0, 42);
    let res = sigma_delta_quantize(&y, 2, &Alphabet::unbounded(0.01).unwrap());
    let worst = y
        .iter()
        .zip(&res.q)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 0.02 + 1e-12, "{worst}");
}

#[test]
fn pcm_error_within_half_step() {
    let y = input(500, 4.0, 1);
    let res = pcm_quantize(&y, &Alphabet::unbounded(0.07).unwrap());
    assert!(res.max_state <= 0.035 + 1e-15);
    assert!(!res.overloaded);
}

#[test]
fn repeated_runs_are_identical() {
    let y = input(256, 2.0, 77);
    let a = Alphabet::unbounded(0.013).unwrap();
    let shaper = NoiseShaper::Leaky { order: 3, mu: 0.8 };
    let first = shape_quantize(&y, &shaper, &a).unwrap();
    let second = shape_quantize(&y, &shaper, &a).unwrap();
    assert_eq!(first, second);
    assert!(first.q.iter().zip(&second.q).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn finite_alphabet_clips_and_continues() {
    // Two bits with step 0.5 cover only |w| <= 1; a large input overloads
    // but the run completes and keeps the recursion identity.
    let y = [0.2, 0.3, 4.0, 0.1, -0.2, 0.0];
    let a = Alphabet::finite(0.5, 2).unwrap();
    let shaper = NoiseShaper::DifferencePower(1);
    let res = shape_quantize(&y, &shaper, &a).unwrap();
    assert!(res.overloaded);
    assert_eq!(res.overload_index, Some(2));
    assert_eq!(res.q.len(), y.len());
    assert!(res.q.iter().all(|q| q.abs() <= 0.75));
    assert!(res.reconstruction_residual(&y, &shaper) <= 1e-12);
}

#[test]
fn sufficient_bits_never_overload() {
    // ||y||_inf < 1 with r = 2 needs at most 2*ceil(1/delta) + 2^r + 1 levels.
    let delta = 0.1;
    let y = input(2000, 0.99, 5);
    let a = Alphabet::finite(delta, 5).unwrap();
    let res = sigma_delta_quantize(&y, 2, &a);
    assert!(!res.overloaded);
    assert!(res.max_state <= delta / 2.0 + 1e-12);
}
