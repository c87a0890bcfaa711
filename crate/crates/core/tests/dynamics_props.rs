mod common;

use common::*;
use proptest::prelude::*;
use zlap_core::dynamics::{
    apply_polynomial_filter, discrete_approximation, evolve_continuous, evolve_discrete, matrix_exp_oracle,
    minimal_rate, ContinuousOptions, Signal,
};
use zlap_core::operators::{random_walk_operator, z_laplacian};
use zlap_core::{Delays, Graph, Replication, ZLaplacian};

fn setup(seed: u64, n: usize, directed: bool) -> (Graph, Signal, rand_chacha::ChaCha8Rng) {
    let mut r = rng(seed);
    let g = random_connected(&mut r, n, 0.3, directed, true);
    let theta = Signal::new(probability_vec(&mut r, n)).unwrap();
    (g, theta, r)
}

fn random_laplacian(seed: u64, n: usize, directed: bool) -> (ZLaplacian, Signal) {
    let (g, theta, mut r) = setup(seed, n, directed);
    let z = Replication::new(positive_vec(&mut r, n, 0.5, 1.5)).unwrap();
    let t = Delays::new(positive_vec(&mut r, n, 1.0, 4.0)).unwrap();
    (z_laplacian(&g, &z, &t).unwrap(), theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn uniformization_matches_exponential(seed: u64, n in 2usize..20, t in 0.0f64..5.0, directed: bool) {
        let (l, theta) = random_laplacian(seed, n, directed);
        let got = evolve_continuous(&theta, &l, t, &ContinuousOptions::default()).unwrap();
        let oracle = matrix_exp_oracle(&l.matrix().scale(-1.0), t).unwrap().left_mul(&theta.values);
        prop_assert!(max_diff(&got.values, &oracle) < 1e-8);
        prop_assert_eq!(got.time, t);
    }

    #[test]
    fn doubling_the_rate_changes_nothing(seed: u64, n in 2usize..20, t in 0.0f64..5.0) {
        let (l, theta) = random_laplacian(seed, n, false);
        let base = evolve_continuous(&theta, &l, t, &ContinuousOptions::default()).unwrap();
        let opts = ContinuousOptions { rate: Some(2.0 * minimal_rate(l.matrix())), ..Default::default() };
        let doubled = evolve_continuous(&theta, &l, t, &opts).unwrap();
        prop_assert!(max_diff(&base.values, &doubled.values) < 1e-9);
    }

    #[test]
    fn conservative_process_keeps_mass(seed: u64, n in 2usize..20, directed: bool) {
        let (g, theta, mut r) = setup(seed, n, directed);
        let t = Delays::new(positive_vec(&mut r, n, 1.0, 4.0)).unwrap();
        let l = z_laplacian(&g, &Replication::ones(n), &t).unwrap();
        for time in [0.0, 0.3, 1.0, 4.0, 20.0] {
            let s = evolve_continuous(&theta, &l, time, &ContinuousOptions::default()).unwrap();
            prop_assert!((s.sum() - theta.sum()).abs() < 1e-10);
        }
    }

    #[test]
    fn uniform_replication_grows_exponentially(seed: u64, n in 2usize..15, z in 0.3f64..2.0, tau in 1.0f64..4.0, t in 0.0f64..3.0) {
        let (g, theta, _) = setup(seed, n, false);
        let l = z_laplacian(&g, &Replication::uniform(n, z).unwrap(), &Delays::new(vec![tau; n]).unwrap()).unwrap();
        let s = evolve_continuous(&theta, &l, t, &ContinuousOptions::default()).unwrap();
        let expected = theta.sum() * ((z - 1.0) * t / tau).exp();
        prop_assert!((s.sum() - expected).abs() < 1e-8);
    }

    #[test]
    fn random_walk_steps_conserve_mass(seed: u64, n in 2usize..20, steps in 0usize..30, directed: bool) {
        let (g, theta, _) = setup(seed, n, directed);
        let report = evolve_discrete(&theta, &random_walk_operator(&g).unwrap(), steps).unwrap();
        prop_assert_eq!(report.trajectory.len(), steps + 1);
        for w in report.trajectory.windows(2) {
            prop_assert!(w[1].time > w[0].time);
        }
        for s in &report.trajectory {
            prop_assert!((s.sum() - theta.sum()).abs() < 1e-12);
        }
    }

    #[test]
    fn first_order_step_error_is_quadratic(seed: u64, n in 2usize..12) {
        let (l, theta) = random_laplacian(seed, n, false);
        let delta = 0.01 / minimal_rate(l.matrix());
        let error = |d: f64| {
            let approx = discrete_approximation(&l, d).unwrap().matrix.left_mul(&theta.values);
            let exact = matrix_exp_oracle(&l.matrix().scale(-1.0), d).unwrap().left_mul(&theta.values);
            max_diff(&approx, &exact)
        };
        let ratio = error(delta) / error(delta / 2.0);
        prop_assert!((3.5..=4.5).contains(&ratio), "ratio {}", ratio);
    }

    #[test]
    fn polynomial_filter_matches_power_sum(seed: u64, n in 2usize..12, coeffs in prop::collection::vec(-2.0f64..2.0, 1..6)) {
        let (g, theta, _) = setup(seed, n, true);
        let p = random_walk_operator(&g).unwrap();
        let got = apply_polynomial_filter(&theta, &p, &coeffs).unwrap();
        let mut power = theta.values.clone();
        let mut expected = vec![0.0; n];
        for c in &coeffs {
            for (e, x) in expected.iter_mut().zip(&power) {
                *e += c * x;
            }
            power = p.matrix.left_mul(&power);
        }
        prop_assert!(max_diff(&got.values, &expected) < 1e-12);
    }
}

#[test]
fn long_run_reaches_degree_distribution() {
    let g = random_connected(&mut rng(5), 5, 0.4, false, true);
    let l = z_laplacian(&g, &Replication::ones(5), &Delays::ones(5)).unwrap();
    let theta = Signal::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let s = evolve_continuous(&theta, &l, 50.0, &ContinuousOptions::default()).unwrap();
    let d = g.out_degrees().values;
    let total: f64 = d.iter().sum();
    let expected: Vec<f64> = d.iter().map(|x| x / total).collect();
    assert!(max_diff(&s.values, &expected) < 1e-8);
}

#[test]
fn sojourn_counts_track_delays() {
    let g = zlap_core::families::cycle(4);
    let t = Delays::new(vec![1.0, 2.0, 3.0, 5.0]).unwrap();
    let l = z_laplacian(&g, &Replication::ones(4), &t).unwrap();
    let phi = discrete_approximation(&l, 1.0).unwrap().matrix;
    let mut r = rng(11);
    for (v, tau) in t.as_slice().iter().enumerate() {
        let mean = mean_sojourn(&phi, v, 20_000, &mut r);
        assert!((mean - tau).abs() / tau < 0.05, "vertex {v}: {mean} vs {tau}");
    }
}
