//! Edge graph clusters, E-sets, restrictions and distances.

use hlgt::cellcomplex::LatticeBox;
use hlgt::clusters::{
    dist0, dist1, e_set, edge_neighbors, restrict, restriction_properties_check, saturated_distances, EdgeGraphView,
    ESet,
};
use hlgt::forms::EdgeConfig;
use proptest::prelude::*;

fn closed(lat: &LatticeBox, n: u8, vals: &[(usize, u8)]) -> EdgeConfig {
    let mut eta = vec![0u8; lat.num_vertices()];
    for &(v, g) in vals {
        eta[v % lat.num_vertices()] = g % n;
    }
    EdgeConfig::coboundary_of(lat, n, &eta)
}

fn spins() -> impl Strategy<Value = Vec<(usize, u8)>> {
    prop::collection::vec((0usize..625, 0u8..3), 0..6)
}

proptest! {
    #[test]
    fn e_set_contains_seeds_and_support_neighbours(a in spins(), b in spins(), seed in 0usize..1000) {
        let lat = LatticeBox::centered(2);
        let (s, t) = (closed(&lat, 3, &a), closed(&lat, 3, &b));
        let edges = lat.edge_slots();
        let e0 = edges[seed % edges.len()];
        let set = e_set(&lat, &[e0], &s, &t);
        prop_assert!(set.contains(e0));
        let view = EdgeGraphView::new(&lat, &s, &t);
        for e in set.iter() {
            prop_assert!(view.same_cluster(e, e0) || e == e0);
        }
    }

    #[test]
    fn restrictions_lie_below(a in spins(), b in spins(), seed in 0usize..1000) {
        let lat = LatticeBox::centered(2);
        let (s, t) = (closed(&lat, 3, &a), closed(&lat, 3, &b));
        let edges = lat.edge_slots();
        prop_assert!(restriction_properties_check(&lat, &s, &t, &[edges[seed % edges.len()]]).unwrap());
    }

    #[test]
    fn restriction_splits_configuration(a in spins(), picks in prop::collection::vec(0usize..4096, 0..30)) {
        let lat = LatticeBox::centered(2);
        let s = closed(&lat, 3, &a);
        let edges = lat.edge_slots();
        let set = ESet::from_slots(picks.iter().map(|i| edges[i % edges.len()]));
        let (inside, outside) = (restrict(&s, &set, true), restrict(&s, &set, false));
        for &e in &edges {
            prop_assert_eq!((inside.get(e) + outside.get(e)) % 3, s.get(e));
            prop_assert!(inside.get(e) == 0 || outside.get(e) == 0);
        }
    }

    #[test]
    fn distances_are_one_step_lipschitz(src in 0usize..4096) {
        let lat = LatticeBox::centered(2);
        let edges = lat.edge_slots();
        let e0 = edges[src % edges.len()];
        let dist = saturated_distances(&lat, &[e0]);
        prop_assert_eq!(dist[e0], Some(0));
        for &e in &edges {
            let de = dist[e].unwrap();
            for f in edge_neighbors(&lat, e) {
                prop_assert!(dist[f].unwrap().abs_diff(de) <= 1);
            }
        }
    }
}

#[test]
fn neighbours_are_symmetric() {
    let lat = LatticeBox::centered(1);
    for e in lat.edge_slots() {
        let ns = edge_neighbors(&lat, e);
        assert!(!ns.contains(&e));
        for f in ns {
            assert!(edge_neighbors(&lat, f).contains(&e));
        }
    }
}

#[test]
fn interior_edge_has_eighteen_neighbours() {
    let lat = LatticeBox::centered(2);
    let e = lat.edge_slot(&hlgt::cellcomplex::Cell::edge([0; 4], 0)).unwrap();
    assert_eq!(edge_neighbors(&lat, e).len(), 18);
}

#[test]
fn seed_distances() {
    let lat = LatticeBox::centered(2);
    let edges = lat.edge_slots();
    let e = edges[10];
    assert_eq!(dist1(&lat, e, &[e]), Some(1));
    let d0 = dist0(&lat, e, &[e]).unwrap();
    assert_eq!((d0.value, d0.lower_bound), (1, false));
    let far = dist0(&lat, edges[edges.len() - 1], &[e]).unwrap();
    assert!(far.value >= 8 && far.lower_bound);
}

#[test]
fn zero_configurations_give_trivial_e_set() {
    let lat = LatticeBox::centered(1);
    let z = EdgeConfig::zeros(&lat, 2);
    let e0 = lat.edge_slots()[3];
    let set = e_set(&lat, &[e0], &z, &z);
    assert_eq!(set.iter().collect::<Vec<_>>(), vec![e0]);
}
