use sdcs_core::linalg::operator_norm_inf;
use sdcs_core::stats::{ks_two_sample, Summary};
use sdcs_core::studies::{inf_norm_study, sigma_min_study, sigma_min_trial};
use sdcs_core::{
    sample_matrix, sample_signal, Ensemble, EnsembleSpec, MagnitudeModel, SignalSpec,
};

fn spec(kind: Ensemble, rows: usize, cols: usize, seed: u64) -> EnsembleSpec {
    EnsembleSpec {
        kind,
        rows,
        cols,
        seed,
    }
}

#[test]
fn unit_gaussian_moments() {
    let a = sample_matrix(&spec(Ensemble::GaussianUnit, 10_000, 1, 3));
    let s = a.as_slice();
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (s.len() - 1) as f64;
    assert!(mean.abs() <= 0.05, "mean {mean}");
    assert!((0.9..=1.1).contains(&var), "variance {var}");
}

#[test]
fn scaled_columns_have_unit_norm() {
    let a = sample_matrix(&spec(Ensemble::GaussianScaled, 1000, 200, 4));
    let inside = (0..200)
        .filter(|&j| {
            let sq: f64 = a.col_to_vec(j).iter().map(|v| v * v).sum();
            (0.8..=1.2).contains(&sq)
        })
        .count();
    assert!(inside as f64 >= 0.99 * 200.0, "{inside} of 200");
}

#[test]
fn bernoulli_inf_norm_is_k() {
    for k in [1, 3, 10] {
        let a = sample_matrix(&spec(Ensemble::BernoulliPm1, 40, k, k as u64));
        assert!(a.as_slice().iter().all(|v| v.abs() == 1.0));
        assert_eq!(operator_norm_inf(&a), k as f64);
    }
}

#[test]
fn scaling_relation_in_distribution() {
    let m = 100;
    let unit = sample_matrix(&spec(Ensemble::GaussianUnit, m, 100, 10));
    let scaled = sample_matrix(&spec(Ensemble::GaussianScaled, m, 100, 11));
    let a: Vec<f64> = unit.as_slice().iter().map(|v| v / (m as f64).sqrt()).collect();
    let ks = ks_two_sample(&a, scaled.as_slice()).unwrap();
    assert!(ks.p_value > 1e-3, "p = {}", ks.p_value);
}

#[test]
fn sigma_min_scales_with_normalization() {
    for r in 0..=3 {
        let m = 60;
        let unit = sigma_min_trial(r, m, 5, Ensemble::GaussianUnit, 42).unwrap();
        let scaled = sigma_min_trial(r, m, 5, Ensemble::GaussianScaled, 42).unwrap();
        assert!((unit - (m as f64).sqrt() * scaled).abs() <= 1e-12 * unit, "r = {r}");
    }
}

#[test]
fn seeds_determine_matrices_and_taller_draws_extend() {
    let a = sample_matrix(&spec(Ensemble::GaussianUnit, 30, 8, 5));
    let b = sample_matrix(&spec(Ensemble::GaussianUnit, 30, 8, 5));
    assert!(a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
    let tall = sample_matrix(&spec(Ensemble::GaussianUnit, 50, 8, 5));
    assert_eq!(tall.top_rows(30), a);
}

#[test]
fn signal_models() {
    let x = sample_signal(&SignalSpec {
        n: 100,
        k: 7,
        magnitude: MagnitudeModel::ConstantUnitNorm,
        seed: 1,
    })
    .unwrap();
    let norm: f64 = x.values().iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-15);
    assert_eq!(x.k(), 7);

    let full = sample_signal(&SignalSpec {
        n: 6,
        k: 6,
        magnitude: MagnitudeModel::Gaussian,
        seed: 2,
    })
    .unwrap();
    assert_eq!(full.support(), &[0, 1, 2, 3, 4, 5]);

    assert!(sample_signal(&SignalSpec {
        n: 3,
        k: 4,
        magnitude: MagnitudeModel::Gaussian,
        seed: 0
    })
    .is_err());
}

#[test]
fn supports_of_different_seeds_differ() {
    // C(20, 3) = 1140, so repeats should be rare.
    let draws = 500;
    let mut same = 0;
    for s in 0..draws {
        let a = sample_signal(&SignalSpec {
            n: 20,
            k: 3,
            magnitude: MagnitudeModel::ConstantUnitNorm,
            seed: 2 * s,
        })
        .unwrap();
        let b = sample_signal(&SignalSpec {
            n: 20,
            k: 3,
            magnitude: MagnitudeModel::ConstantUnitNorm,
            seed: 2 * s + 1,
        })
        .unwrap();
        if a.support() == b.support() {
            same += 1;
        }
    }
    assert!(same <= 5, "{same} repeats");
}

#[test]
fn order_zero_study_tracks_square_root_law() {
    let rows = sigma_min_study(0, 10, &[4.0, 8.0, 16.0], 30, 7).unwrap();
    for row in &rows {
        let lower = 0.5 * (1.0 - (1.0 / row.lambda).sqrt());
        assert!(row.min >= lower && row.max <= 1.5, "{row:?}");
    }
}

#[test]
fn study_is_reproducible() {
    let a = sigma_min_study(2, 5, &[4.0], 3, 99).unwrap();
    let b = sigma_min_study(2, 5, &[4.0], 3, 99).unwrap();
    assert_eq!(a, b);
}

#[test]
fn inf_norm_ratios() {
    let bern = inf_norm_study(4, &[2.0, 8.0, 25.0], 5, 0.5, Ensemble::BernoulliPm1, 1).unwrap();
    for row in &bern {
        assert!((row.max_ratio - row.lambda.powf(-0.5)).abs() < 1e-14);
    }
    let gauss = inf_norm_study(20, &[10.0], 200, 0.5, Ensemble::GaussianUnit, 2).unwrap();
    assert!(gauss[0].max_ratio < 1.0, "{:?}", gauss[0]);

    let single = inf_norm_study(1, &[4000.0], 3, 0.5, Ensemble::GaussianUnit, 3).unwrap();
    assert!(single[0].max_ratio < 0.1);
}

#[test]
fn summary_statistics() {
    let s = Summary::of(&[1.0, 4.0, -2.0]).unwrap();
    assert_eq!((s.count, s.min, s.max), (3, -2.0, 4.0));
    assert!((s.mean - 1.0).abs() < 1e-15);
    assert!(Summary::of(&[]).is_none());
}
