//! Spin model: closedness of coboundaries, correlations and chains.

use hlgt::cellcomplex::{boundary, Cell, Chain, LatticeBox, OrientedCell};
use hlgt::gibbs::Start;
use hlgt::spinmodel::{
    edge_correlation_exact, exact_expectation, h_kappa_exact, path_endpoints, two_point, SpinChain, SpinConfig,
    SpinUpdate,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn coboundary_is_closed(vals in prop::collection::vec(0u8..5, 8)) {
        let lat = LatticeBox::unit_cube3();
        let eta = SpinConfig::from_values(&lat, 5, vals).unwrap();
        prop_assert!(eta.coboundary(&lat).is_closed(&lat));
    }

    #[test]
    fn two_point_is_symmetric(vals in prop::collection::vec(0u8..4, 8), a in 0usize..8, b in 0usize..8) {
        prop_assert!((two_point(&vals, 4, a, b) - two_point(&vals, 4, b, a)).abs() < 1e-15);
        prop_assert_eq!(two_point(&vals, 4, a, a), 1.0);
    }
}

#[test]
fn loops_have_unit_correlation() {
    let lat = LatticeBox::unit_cube3();
    let gamma = boundary(OrientedCell::positive(Cell::plaquette([0; 4], 0, 1))).unwrap();
    assert_eq!(path_endpoints(&gamma, &lat).unwrap(), None);
    assert_eq!(h_kappa_exact(&gamma, 0.9, 3, &lat).unwrap(), 1.0);
}

#[test]
fn correlation_vanishes_without_coupling() {
    let lat = LatticeBox::unit_cube3();
    let gamma = Chain::from_cell(OrientedCell::positive(Cell::edge([0; 4], 0)));
    assert!(h_kappa_exact(&gamma, 0.0, 2, &lat).unwrap().abs() < 1e-14);
}

#[test]
fn single_edge_correlation_on_two_sites() {
    let lat = LatticeBox::new([0; 4], [1, 0, 0, 0]).unwrap();
    for kappa in [0.1, 0.6, 1.3] {
        let want = (2.0f64 * kappa).tanh();
        let got = exact_expectation(|eta| two_point(eta, 2, 0, 1), &lat, 2, kappa).unwrap();
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }
}

#[test]
fn edge_correlation_increases_with_kappa() {
    let lat = LatticeBox::unit_cube3();
    let a = edge_correlation_exact(0.2, 2, &lat).unwrap();
    let b = edge_correlation_exact(0.8, 2, &lat).unwrap();
    assert!(0.0 < a && a < b && b < 1.0);
}

#[test]
fn spin_chains_are_reproducible() {
    let lat = LatticeBox::centered(1);
    for update in [SpinUpdate::HeatBath, SpinUpdate::SwendsenWang] {
        let run = || {
            let mut c = SpinChain::new(lat.clone(), 2, 0.4, 5, 1, Start::Hot, update).unwrap();
            for _ in 0..4 {
                c.sweep();
            }
            c.eta().clone()
        };
        assert_eq!(run(), run());
    }
}
