//! Vortices, minimal vortices and line reduction.

use hlgt::cellcomplex::{Cell, Chain, LatticeBox, OrientedCell};
use hlgt::forms::{leq, EdgeConfig, Form};
use hlgt::vortices::{curvature, find_vortices, is_minimal_vortex, reduce_line, PathDecoration};
use proptest::prelude::*;

proptest! {
    #[test]
    fn vortices_decompose_curvature(vals in prop::collection::vec((0usize..4096, 1u8..3), 0..5)) {
        let lat = LatticeBox::centered(2);
        let edges = lat.edge_slots();
        let mut s = EdgeConfig::zeros(&lat, 3);
        for (i, g) in vals {
            s.set(edges[i % edges.len()], g);
        }
        let w = curvature(&s, &lat);
        let mut total = Form::zero(2, 3);
        for v in find_vortices(&s, &lat).unwrap() {
            prop_assert!(leq(&v.form, &w, &lat).unwrap());
            prop_assert!(hlgt::forms::d(&v.form, &lat).unwrap().is_zero());
            total = total.add(&v.form).unwrap();
        }
        prop_assert_eq!(total, w);
    }

    #[test]
    fn closed_configurations_have_no_vortices(eta in prop::collection::vec(0u8..4, 81)) {
        let lat = LatticeBox::centered(1);
        let s = EdgeConfig::coboundary_of(&lat, 4, &eta);
        prop_assert!(find_vortices(&s, &lat).unwrap().is_empty());
    }

    #[test]
    fn single_interior_edge_is_a_minimal_vortex(axis in 0usize..4, g in 1u8..5) {
        let lat = LatticeBox::centered(2);
        let e = lat.edge_slot(&Cell::edge([0; 4], axis)).unwrap();
        let mut s = EdgeConfig::zeros(&lat, 5);
        s.set(e, g);
        let vs = find_vortices(&s, &lat).unwrap();
        prop_assert_eq!(vs.len(), 1);
        let c = vs[0].center.unwrap();
        prop_assert_eq!((c.slot, c.g), (e, g));
    }
}

#[test]
fn boundary_edge_vortex_is_not_minimal() {
    let lat = LatticeBox::centered(1);
    let e = lat.edge_slot(&Cell::edge([1, 0, 0, 0], 1)).unwrap();
    let mut s = EdgeConfig::zeros(&lat, 2);
    s.set(e, 1);
    assert!(is_minimal_vortex(&curvature(&s, &lat), &lat).is_none());
}

#[test]
fn zero_configuration_reduces_to_trivial_line() {
    let lat = LatticeBox::centered(2);
    let mut gamma = Chain::zero(1);
    for x in -1..2 {
        gamma.add_oriented(OrientedCell::positive(Cell::edge([x, 0, 0, 0], 0)), 1);
    }
    let deco = PathDecoration::new(&gamma, &lat).unwrap();
    assert_eq!(deco.non_corner_len(), 3);
    assert_eq!(reduce_line(&EdgeConfig::zeros(&lat, 2), &deco, &lat), 0);
}
