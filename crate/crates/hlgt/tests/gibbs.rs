//! Gibbs measure: conditionals, gauge invariance, serialization and
//! reproducibility.

use hlgt::cellcomplex::{Cell, Chain, LatticeBox, OrientedCell};
use hlgt::forms::{d, EdgeConfig, Form};
use hlgt::gibbs::{
    heatbath_conditional, log_weight, parse_beta, wilson_line, Checkpoint, ExactMeasure, GaugeChain, GaugeUpdate,
    Params, Start,
};
use proptest::prelude::*;

fn config(lat: &LatticeBox, n: u8, vals: &[u8]) -> EdgeConfig {
    let mut s = EdgeConfig::zeros(lat, n);
    for (e, v) in lat.edge_slots().into_iter().zip(vals.iter().cycle()) {
        s.set(e, v % n);
    }
    s
}

fn unit_square_loop() -> Chain {
    let c = OrientedCell::positive(Cell::plaquette([0; 4], 0, 1));
    hlgt::cellcomplex::boundary(c).unwrap()
}

proptest! {
    #[test]
    fn conditional_matches_weight_ratios(
        vals in prop::collection::vec(0u8..4, 12),
        slot_idx in 0usize..12,
        beta in 0.0f64..2.0,
        kappa in 0.0f64..2.0,
    ) {
        let lat = LatticeBox::unit_cube3();
        let p = Params { n: 4, half_width: 0, beta, kappa };
        let mut s = config(&lat, 4, &vals);
        let slot = lat.edge_slots()[slot_idx];
        let cond = heatbath_conditional(&s, &lat, &p, slot);
        let logw: Vec<f64> = (0..4)
            .map(|g| {
                s.set(slot, g);
                log_weight(&s, &lat, &p).unwrap()
            })
            .collect();
        let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = logw.iter().map(|l| (l - top).exp()).sum();
        for g in 0..4 {
            prop_assert!((cond[g] - (logw[g] - top).exp() / z).abs() < 1e-12);
        }
    }

    #[test]
    fn wilson_loop_is_gauge_invariant(vals in prop::collection::vec(0u8..5, 12), eta in prop::collection::vec(0u8..5, 8)) {
        let lat = LatticeBox::unit_cube3();
        let s = config(&lat, 5, &vals);
        let mut eta_form = Form::zero(0, 5);
        for (v, g) in eta.iter().enumerate() {
            eta_form.set(Cell::vertex(lat.vertex_point(v)), *g);
        }
        let moved = s.to_form(&lat).add(&d(&eta_form, &lat).unwrap()).unwrap();
        let moved = EdgeConfig::from_form(&lat, &moved).unwrap();
        let gamma = unit_square_loop();
        let a = wilson_line(&s, &lat, &gamma).unwrap();
        let b = wilson_line(&moved, &lat, &gamma).unwrap();
        prop_assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn checkpoint_round_trip(vals in prop::collection::vec(0u8..3, 12), seed in any::<u64>(), sweeps in any::<u64>()) {
        let lat = LatticeBox::unit_cube3();
        let p = Params { n: 3, half_width: 0, beta: 0.4, kappa: 0.9 };
        let s = config(&lat, 3, &vals);
        let ck = Checkpoint::gauge(&lat, &p, seed, sweeps, &s);
        let mut buf = Vec::new();
        ck.write_to(&mut buf).unwrap();
        let back = Checkpoint::read_from(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(&back, &ck);
        prop_assert_eq!(back.to_edge_config(&lat).unwrap(), s);
    }
}

#[test]
fn infinite_beta_round_trips_through_json() {
    let p = Params { n: 2, half_width: 3, beta: f64::INFINITY, kappa: 1.7 };
    let text = serde_json::to_string(&p).unwrap();
    assert!(text.contains("\"inf\""));
    let back: Params = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
    assert_eq!(parse_beta("inf").unwrap(), f64::INFINITY);
    assert_eq!(parse_beta("0.25").unwrap(), 0.25);
    assert!(parse_beta("warm").is_err());
}

#[test]
fn exact_measure_normalizes() {
    let lat = LatticeBox::unit_cube3();
    let p = Params { n: 2, half_width: 0, beta: 0.7, kappa: 0.3 };
    let m = ExactMeasure::new(&lat, &p).unwrap();
    assert!((m.expectation(|_| 1.0) - 1.0).abs() < 1e-13);
}

#[test]
fn infinite_beta_measure_is_supported_on_closed_configs() {
    let lat = LatticeBox::unit_cube3();
    let p = Params { n: 3, half_width: 0, beta: f64::INFINITY, kappa: 0.5 };
    let m = ExactMeasure::new(&lat, &p).unwrap();
    assert!((m.expectation(|s| if s.is_closed(&lat) { 1.0 } else { 0.0 }) - 1.0).abs() < 1e-13);
}

#[test]
fn chains_are_reproducible_and_restorable() {
    let lat = LatticeBox::centered(1);
    let p = Params { n: 2, half_width: 1, beta: 0.5, kappa: 0.8 };
    let run = |update| {
        let mut c = GaugeChain::new(lat.clone(), p, 11, 2, Start::Hot, update).unwrap();
        for _ in 0..5 {
            c.sweep();
        }
        c
    };
    for update in [GaugeUpdate::HeatBath, GaugeUpdate::Metropolis] {
        let a = run(update);
        let b = run(update);
        assert_eq!(a.sigma(), b.sigma());
        let mut resumed = GaugeChain::new(lat.clone(), p, 11, 2, Start::Cold, update).unwrap();
        resumed.restore(a.sigma().clone(), a.sweeps_done());
        let mut a = a;
        a.sweep();
        resumed.sweep();
        assert_eq!(a.sigma(), resumed.sigma());
    }
}

#[test]
fn gauge_chain_rejects_infinite_beta() {
    let lat = LatticeBox::unit_cube3();
    let p = Params { n: 2, half_width: 0, beta: f64::INFINITY, kappa: 0.8 };
    assert!(GaugeChain::new(lat, p, 1, 0, Start::Cold, GaugeUpdate::HeatBath).is_err());
}
