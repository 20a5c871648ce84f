//! Properties of forms: exterior derivative, Stokes, partial order,
//! decompositions and antiderivatives.

use hlgt::cellcomplex::{boundary_chain, Cell, Chain, LatticeBox};
use hlgt::forms::{d, decompose, evaluate, leq, poincare_antiderivative, EdgeConfig, Form};
use proptest::prelude::*;

fn form_on_b2(k: usize, n: u8) -> impl Strategy<Value = Form> {
    let cells = LatticeBox::centered(2).enumerate_cells(k);
    prop::collection::vec((0..cells.len(), 1..n), 0..10).prop_map(move |vals| {
        Form::from_values(k, n, vals.into_iter().map(|(i, v)| (cells[i], v))).unwrap()
    })
}

fn chain_on_b2(k: usize) -> impl Strategy<Value = Chain> {
    let cells = LatticeBox::centered(2).enumerate_cells(k);
    prop::collection::vec((0..cells.len(), -3i64..=3), 0..6).prop_map(move |terms| {
        let mut q = Chain::zero(k);
        for (i, a) in terms {
            q.add_cell(cells[i], a);
        }
        q
    })
}

fn sparse_config(lat: &LatticeBox, n: u8, vals: &[(usize, u8)]) -> EdgeConfig {
    let slots = lat.edge_slots();
    let mut s = EdgeConfig::zeros(lat, n);
    for &(i, v) in vals {
        s.set(slots[i % slots.len()], v % n);
    }
    s
}

proptest! {
    #[test]
    fn dd_vanishes(w in (0usize..3, prop::sample::select(vec![2u8, 3, 5])).prop_flat_map(|(k, n)| form_on_b2(k, n))) {
        let lat = LatticeBox::centered(2);
        prop_assert!(d(&d(&w, &lat).unwrap(), &lat).unwrap().is_zero());
    }

    #[test]
    fn stokes_for_one_forms(w in form_on_b2(1, 3), q in chain_on_b2(2)) {
        let lat = LatticeBox::centered(2);
        let dw = d(&w, &lat).unwrap();
        prop_assert_eq!(evaluate(&dw, &q).unwrap(), evaluate(&w, &boundary_chain(&q).unwrap()).unwrap());
    }

    #[test]
    fn stokes_for_two_forms(w in form_on_b2(2, 5), q in chain_on_b2(3)) {
        let lat = LatticeBox::centered(2);
        let dw = d(&w, &lat).unwrap();
        prop_assert_eq!(evaluate(&dw, &q).unwrap(), evaluate(&w, &boundary_chain(&q).unwrap()).unwrap());
    }

    #[test]
    fn order_is_reflexive_with_zero_bottom(w in form_on_b2(1, 3)) {
        let lat = LatticeBox::centered(2);
        prop_assert!(leq(&w, &w, &lat).unwrap());
        prop_assert!(leq(&Form::zero(1, 3), &w, &lat).unwrap());
    }

    #[test]
    fn decomposition_pieces_sum_and_lie_below(vals in prop::collection::vec((0usize..4096, 1u8..3), 1..4)) {
        let lat = LatticeBox::centered(2);
        let w = d(&sparse_config(&lat, 3, &vals).to_form(&lat), &lat).unwrap();
        prop_assume!(!w.is_zero());
        let pieces = decompose(&w, &lat).unwrap();
        let mut sum = Form::zero(2, 3);
        for p in &pieces {
            prop_assert!(leq(p, &w, &lat).unwrap());
            sum = sum.add(p).unwrap();
        }
        prop_assert_eq!(sum, w);
    }

    #[test]
    fn antiderivative_of_exact_forms(vals in prop::collection::vec((0usize..4096, 1u8..3), 1..5)) {
        let lat = LatticeBox::centered(2);
        let w = d(&sparse_config(&lat, 3, &vals).to_form(&lat), &lat).unwrap();
        prop_assume!(!w.is_zero());
        let a = poincare_antiderivative(&w, &lat).unwrap();
        prop_assert_eq!(d(&a, &lat).unwrap(), w);
    }

    #[test]
    fn edge_config_round_trip(vals in prop::collection::vec((0usize..4096, 0u8..5), 0..20)) {
        let lat = LatticeBox::centered(2);
        let s = sparse_config(&lat, 5, &vals);
        prop_assert_eq!(EdgeConfig::from_form(&lat, &s.to_form(&lat)).unwrap(), s);
    }
}

#[test]
fn zero_form_derivative_of_vertex_is_star() {
    let lat = LatticeBox::centered(1);
    let w = Form::from_values(0, 2, [(Cell::vertex([0; 4]), 1)]).unwrap();
    assert_eq!(d(&w, &lat).unwrap().support_len(), 8);
}
