use sdcs_core::linalg::norm2;
use sdcs_core::support::{missed_energy_factor, support_margin};
use sdcs_core::{estimate_support, TrialRng};

const TRIALS: usize = 100_000;

/// A k-sparse x and a perturbation with ||x - x'||_2 = eta. Half of the
/// perturbations are concentrated on a few coordinates, which is where the
/// selection is easiest to fool.
fn planted(rng: &mut TrialRng, n: usize, k: usize, eta: f64, floor: f64) -> (Vec<f64>, Vec<usize>, Vec<f64>) {
    let support = rng.subset(n, k);
    let mut x = vec![0.0; n];
    for &j in &support {
        x[j] = rng.sign() * (floor + rng.uniform() * rng.uniform());
    }
    let mut p = vec![0.0; n];
    if rng.uniform() < 0.5 {
        for v in p.iter_mut() {
            *v = rng.normal();
        }
    } else {
        for _ in 0..1 + (rng.uniform() * 2.0 * k as f64) as usize {
            let j = (rng.uniform() * n as f64) as usize;
            p[j] += rng.normal();
        }
    }
    let scale = eta / norm2(&p).max(f64::MIN_POSITIVE);
    let xp: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + scale * b).collect();
    (x, support, xp)
}

#[test]
fn missed_energy_bound_holds() {
    let mut rng = TrialRng::new(8);
    for _ in 0..TRIALS {
        let n = 20 + (rng.uniform() * 40.0) as usize;
        let k = 1 + (rng.uniform() * 6.0) as usize;
        let kprime = k + (rng.uniform() * 4.0) as usize;
        let eta = rng.uniform();
        let (x, support, xp) = planted(&mut rng, n, k, eta, 0.0);
        let chosen = estimate_support(&xp, k, kprime).unwrap();
        let missed: f64 = support
            .iter()
            .filter(|j| chosen.binary_search(j).is_err())
            .map(|&j| x[j] * x[j])
            .sum::<f64>()
            .sqrt();
        let bound = missed_energy_factor(k, kprime) * eta;
        assert!(missed <= bound * (1.0 + 1e-12), "missed {missed} > {bound}");
    }
}

#[test]
fn large_entries_are_always_selected() {
    let mut rng = TrialRng::new(9);
    for _ in 0..TRIALS {
        let n = 20 + (rng.uniform() * 40.0) as usize;
        let k = 1 + (rng.uniform() * 6.0) as usize;
        let kprime = k + (rng.uniform() * 4.0) as usize;
        let eta = 0.01 + rng.uniform();
        let gamma = support_margin(k, kprime);
        let (_, support, xp) = planted(&mut rng, n, k, eta, gamma * eta * (1.0 + 1e-9));
        let chosen = estimate_support(&xp, k, kprime).unwrap();
        assert!(support.iter().all(|j| chosen.binary_search(j).is_ok()));
    }
}

#[test]
fn equal_sizes_give_root_two_margin() {
    for k in 1..20 {
        assert!((support_margin(k, k) - 2f64.sqrt()).abs() < 1e-15);
    }
}
