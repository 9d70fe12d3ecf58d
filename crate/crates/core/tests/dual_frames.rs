use sdcs_core::dual::{reconstruct_least_squares, right_multiply_by_shaper};
use sdcs_core::linalg::{norm2, operator_norm_2, singular_values, svd, DenseMatrix};
use sdcs_core::{
    canonical_dual, frame_variation, h_dual, reconstruct, sample_matrix, sigma_delta_quantize,
    Alphabet, Ensemble, EnsembleSpec, NoiseShaper, TrialRng,
};

fn gaussian(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    sample_matrix(&EnsembleSpec {
        kind: Ensemble::GaussianUnit,
        rows,
        cols,
        seed,
    })
}

fn shaped_norm(f: &DenseMatrix, shaper: &NoiseShaper) -> f64 {
    operator_norm_2(&right_multiply_by_shaper(f, shaper)).unwrap()
}

#[test]
fn canonical_dual_examples() {
    let e = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
    let d = canonical_dual(&e).unwrap();
    assert!((d.f[(0, 0)] - 0.5).abs() < 1e-15);
    assert!((d.f[(0, 1)] - 0.5).abs() < 1e-15);

    let q = svd(&gaussian(20, 3, 1)).unwrap().u;
    let d = canonical_dual(&q).unwrap();
    assert!(d.f.sub(&q.transpose()).unwrap().max_abs() < 1e-12);
}

#[test]
fn identity_frame_has_identity_dual() {
    let e = DenseMatrix::identity(6);
    for r in 0..=3 {
        let d = h_dual(&e, &NoiseShaper::DifferencePower(r)).unwrap();
        assert!(d.f.sub(&e).unwrap().max_abs() < 1e-10, "r = {r}");
    }
}

#[test]
fn duals_are_left_inverses() {
    for seed in 0..10 {
        let e = gaussian(80, 6, seed);
        for shaper in [
            NoiseShaper::Identity,
            NoiseShaper::DifferencePower(1),
            NoiseShaper::DifferencePower(3),
            NoiseShaper::HighPassPower(2),
            NoiseShaper::Leaky { order: 2, mu: 0.7 },
        ] {
            let d = h_dual(&e, &shaper).unwrap();
            assert!(d.left_inverse_defect(&e).unwrap() <= 1e-8, "{shaper:?}");
        }
    }
}

#[test]
fn order_zero_matches_canonical() {
    let e = gaussian(40, 4, 9);
    let a = h_dual(&e, &NoiseShaper::DifferencePower(0)).unwrap();
    let b = canonical_dual(&e).unwrap();
    assert!(a.f.sub(&b.f).unwrap().max_abs() < 1e-12);
}

#[test]
fn sobolev_dual_is_optimal() {
    let mut rng = TrialRng::new(2024);
    let mut worst_margin = f64::INFINITY;
    for frame in 0..50 {
        let m = 20 + (rng.uniform() * 81.0) as usize;
        let k = 1 + (rng.uniform() * 10.0) as usize;
        let r = 1 + frame % 3;
        let e = gaussian(m.min(100), k, 500 + frame as u64);
        let k = e.cols();
        let shaper = NoiseShaper::DifferencePower(r);
        let sob = h_dual(&e, &shaper).unwrap();
        let best = shaped_norm(&sob.f, &shaper);

        let mut rivals = vec![canonical_dual(&e).unwrap().f];
        let proj = DenseMatrix::identity(e.rows())
            .sub(&e.matmul(&sob.f).unwrap())
            .unwrap();
        for _ in 0..20 {
            let z = DenseMatrix::from_fn(k, e.rows(), |_, _| 0.1 * rng.normal());
            let pert = z.matmul(&proj).unwrap();
            let g = DenseMatrix::from_fn(k, e.rows(), |i, j| sob.f[(i, j)] + pert[(i, j)]);
            assert!(
                g.matmul(&e).unwrap().sub(&DenseMatrix::identity(k)).unwrap().max_abs() < 1e-8
            );
            rivals.push(g);
        }
        for g in &rivals {
            let margin = shaped_norm(g, &shaper) - best;
            worst_margin = worst_margin.min(margin);
            assert!(margin >= -1e-8, "frame {frame}: margin {margin}");
        }
    }
    assert!(worst_margin.is_finite());
}

#[test]
fn sigma_min_equals_inverse_shaped_norm() {
    for seed in 0..10 {
        let e = gaussian(60, 5, 30 + seed);
        for r in 1..=3 {
            let shaper = NoiseShaper::DifferencePower(r);
            let d = h_dual(&e, &shaper).unwrap();
            let norm = d.shaped_operator_norm().unwrap();
            assert!((d.sigma_min() * norm - 1.0).abs() <= 1e-8, "r = {r}");
        }
    }
}

#[test]
fn high_pass_and_difference_spectra_agree() {
    // The high-pass matrix is S D S with S = diag(+1, -1, +1, ...), so its dual
    // for E has the spectrum of the Sobolev dual for S E.
    let e = gaussian(50, 4, 77);
    let flipped = DenseMatrix::from_fn(50, 4, |i, j| if i % 2 == 0 { e[(i, j)] } else { -e[(i, j)] });
    for r in 1..=3 {
        let a = h_dual(&flipped, &NoiseShaper::DifferencePower(r)).unwrap();
        let b = h_dual(&e, &NoiseShaper::HighPassPower(r)).unwrap();
        let sa = singular_values(&a.shaped_operator()).unwrap();
        let sb = singular_values(&b.shaped_operator()).unwrap();
        for (x, y) in sa.values().iter().zip(sb.values()) {
            assert!((x - y).abs() <= 1e-8 * x.max(1.0), "r = {r}: {x} vs {y}");
        }
    }
}

#[test]
fn sobolev_error_bound_per_trial() {
    let delta = 0.05;
    for seed in 0..20 {
        let e = gaussian(120, 5, 900 + seed);
        let mut rng = TrialRng::new(seed);
        let x: Vec<f64> = (0..5).map(|_| rng.normal()).collect();
        let y = e.matvec(&x).unwrap();
        for r in 1..=3 {
            let shaper = NoiseShaper::DifferencePower(r);
            let res = sigma_delta_quantize(&y, r, &Alphabet::unbounded(delta).unwrap());
            let d = h_dual(&e, &shaper).unwrap();
            let xh = reconstruct(&d, &res.q).unwrap();
            let err: Vec<f64> = x.iter().zip(&xh).map(|(a, b)| a - b).collect();
            let bound = norm2(&res.u) / d.sigma_min();
            assert!(norm2(&err) <= bound * (1.0 + 1e-9), "r = {r}");
        }
    }
}

#[test]
fn least_squares_route_agrees() {
    let e = gaussian(90, 4, 55);
    let mut rng = TrialRng::new(56);
    let q: Vec<f64> = (0..90).map(|_| rng.normal()).collect();
    for shaper in [
        NoiseShaper::DifferencePower(2),
        NoiseShaper::Leaky { order: 1, mu: 0.5 },
    ] {
        let a = reconstruct(&h_dual(&e, &shaper).unwrap(), &q).unwrap();
        let b = reconstruct_least_squares(&e, &shaper, &q).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }
}

#[test]
fn reconstruct_trivial_inputs() {
    let e = gaussian(30, 3, 4);
    let d = h_dual(&e, &NoiseShaper::DifferencePower(2)).unwrap();
    assert!(reconstruct(&d, &[0.0; 30]).unwrap().iter().all(|v| *v == 0.0));
    let x = [0.3, -1.1, 2.0];
    let xh = reconstruct(&d, &e.matvec(&x).unwrap()).unwrap();
    for (a, b) in x.iter().zip(&xh) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(reconstruct(&d, &[0.0; 29]).is_err());
}

#[test]
fn frame_variation_examples() {
    let single = DenseMatrix::from_rows(&[vec![3.0], vec![4.0]]).unwrap();
    assert!((frame_variation(&single) - 5.0).abs() < 1e-15);
    let same = DenseMatrix::from_fn(2, 7, |i, _| if i == 0 { 3.0 } else { 4.0 });
    assert!((frame_variation(&same) - 5.0).abs() < 1e-15);
    assert_eq!(frame_variation(&DenseMatrix::zeros(3, 4)), 0.0);
}

#[test]
fn rank_deficient_frame_rejected() {
    let e = DenseMatrix::from_fn(10, 2, |i, _| i as f64);
    assert!(h_dual(&e, &NoiseShaper::DifferencePower(1)).is_err());
}
