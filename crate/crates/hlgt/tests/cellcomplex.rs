//! Properties of cells, chains, boundary and coboundary.

use hlgt::cellcomplex::{boundary, boundary_chain, masks_of_dim, Cell, LatticeBox, OrientedCell};
use proptest::prelude::*;

fn cell_in_b2() -> impl Strategy<Value = Cell> {
    (prop::array::uniform4(-2i32..2), 1usize..=4, any::<prop::sample::Index>()).prop_map(|(base, k, idx)| {
        let masks = masks_of_dim(k);
        Cell::from_mask(base, masks[idx.index(masks.len())])
    })
}

proptest! {
    #[test]
    fn boundary_of_boundary_vanishes(c in cell_in_b2()) {
        prop_assume!(c.dim() >= 2);
        let b = boundary(OrientedCell::positive(c)).unwrap();
        prop_assert!(boundary_chain(&b).unwrap().is_empty());
    }

    #[test]
    fn coboundary_is_dual_to_boundary(c in cell_in_b2()) {
        let lat = LatticeBox::centered(2);
        prop_assume!(lat.contains(&c));
        for (face, a) in boundary(OrientedCell::positive(c)).unwrap().iter() {
            prop_assert_eq!(lat.coboundary(OrientedCell::positive(*face)).unwrap().coeff_of(&c), a);
        }
    }

    #[test]
    fn negation_flips_boundary(c in cell_in_b2()) {
        let pos = boundary(OrientedCell::positive(c)).unwrap();
        let neg = boundary(OrientedCell::positive(c).negate()).unwrap();
        prop_assert_eq!(pos.negate(), neg);
    }

    #[test]
    fn slots_round_trip(v in 0usize..625, axis in 0usize..4) {
        let lat = LatticeBox::centered(2);
        let p = lat.vertex_point(v);
        prop_assert_eq!(lat.vertex_index(&p), Some(v));
        let e = Cell::edge(p, axis);
        match lat.edge_slot(&e) {
            Some(s) => prop_assert_eq!(lat.edge_cell(s), Some(e)),
            None => prop_assert!(!lat.contains(&e)),
        }
    }
}

#[test]
fn unit_cube_counts() {
    let lat = LatticeBox::unit_cube3();
    assert_eq!(lat.num_vertices(), 8);
    assert_eq!(lat.edge_slots().len(), 12);
    assert_eq!(lat.plaquette_slots().len(), 6);
}
