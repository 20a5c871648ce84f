//! Monte Carlo controls, streams and batch means.

use hlgt::mc::{batch_means, combined_stderr, init_rng, run_chains, sweep_rng, McConfig};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn recorded_samples_match_record_schedule(sweeps in 512usize..3000, burn in 0.0f64..0.9, thin in 1usize..4) {
        let mc = McConfig { sweeps, burnin_frac: burn, chains: 1, batches: 16, thinning: thin, seed: 1 };
        let recorded = (0..sweeps).filter(|&s| mc.records(s)).count();
        prop_assert_eq!(recorded, mc.recorded_per_chain());
    }

    #[test]
    fn batch_means_of_constant_series(value in -5.0f64..5.0, chains in 1usize..4) {
        let mc = McConfig { sweeps: 640, burnin_frac: 0.0, chains, batches: 16, thinning: 1, seed: 3 };
        let series = vec![vec![value; 640]; chains];
        let est = batch_means(&series, 16, &mc).unwrap();
        prop_assert!((est.mean - value).abs() < 1e-12);
        prop_assert!(est.stderr.abs() < 1e-12);
    }
}

#[test]
fn batch_means_error_matches_independent_formula() {
    let mc = McConfig { sweeps: 320, burnin_frac: 0.0, chains: 1, batches: 16, thinning: 1, seed: 3 };
    let series: Vec<f64> = (0..320).map(|i| ((i / 20) % 2) as f64).collect();
    let est = batch_means(&[series], 16, &mc).unwrap();
    assert!((est.mean - 0.5).abs() < 1e-15);
    let sd = (16.0 * 0.25 / 15.0f64).sqrt();
    assert!((est.stderr - sd / 4.0).abs() < 1e-12, "{}", est.stderr);
}

#[test]
fn streams_are_deterministic_and_distinct() {
    let a: u64 = sweep_rng(7, 1, 3).gen();
    assert_eq!(a, sweep_rng(7, 1, 3).gen::<u64>());
    assert_ne!(a, sweep_rng(7, 1, 4).gen::<u64>());
    assert_ne!(a, sweep_rng(7, 2, 3).gen::<u64>());
    assert_ne!(init_rng(7, 0).gen::<u64>(), init_rng(7, 1).gen::<u64>());
}

#[test]
fn chains_run_in_order() {
    assert_eq!(run_chains(5, |c| c * c), vec![0, 1, 4, 9, 16]);
}

#[test]
fn validation_rejects_bad_controls() {
    let ok = McConfig::default();
    assert!(ok.validate().is_ok());
    for bad in [
        McConfig { chains: 0, ..ok.clone() },
        McConfig { batches: 8, ..ok.clone() },
        McConfig { sweeps: 100, ..ok.clone() },
        McConfig { burnin_frac: 1.0, ..ok.clone() },
        McConfig { thinning: 0, ..ok.clone() },
    ] {
        assert!(bad.validate().is_err());
    }
    assert!((combined_stderr(&[3.0, 4.0]) - 5.0).abs() < 1e-15);
}
