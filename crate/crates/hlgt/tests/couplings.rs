//! Couplings: merged samples agree with their parents on the right regions
//! and decompose consistently.

use hlgt::cellcomplex::LatticeBox;
use hlgt::couplings::{
    decompose_merged, is_decomposition, merge_lgt_z, merge_zz, sample_coupling, write_event_log, CouplingKind,
    EventContext, EventRow, event_indicators,
};
use hlgt::forms::EdgeConfig;
use hlgt::gibbs::Params;
use proptest::prelude::*;

fn closed(lat: &LatticeBox, n: u8, vals: &[(usize, u8)]) -> EdgeConfig {
    let mut eta = vec![0u8; lat.num_vertices()];
    for &(v, g) in vals {
        eta[v % lat.num_vertices()] = g % n;
    }
    EdgeConfig::coboundary_of(lat, n, &eta)
}

fn spins() -> impl Strategy<Value = Vec<(usize, u8)>> {
    prop::collection::vec((0usize..625, 0u8..2), 0..5)
}

proptest! {
    #[test]
    fn zz_merge_splices_parents(a in spins(), b in spins(), seed in 0usize..1000) {
        let lat = LatticeBox::centered(2);
        let (s, t) = (closed(&lat, 2, &a), closed(&lat, 2, &b));
        let edges = lat.edge_slots();
        let e0 = edges[seed % edges.len()];
        let m = merge_zz(&lat, &s, &t, &[e0]).unwrap();
        prop_assert!(m.sigma.is_closed(&lat));
        for &e in &edges {
            let want = if m.eset.contains(e) { s.get(e) } else { t.get(e) };
            prop_assert_eq!(m.sigma.get(e), want);
        }
        let dec = decompose_merged(&m, &lat).unwrap();
        let pieces: Vec<_> = dec.pieces().collect();
        prop_assert!(is_decomposition(&pieces, &m.sigma, &lat).unwrap());
    }

    #[test]
    fn lgt_merge_keeps_closed_parent_off_the_e_set(
        a in prop::collection::vec((0usize..4096, 1u8..2), 0..6),
        b in spins(),
    ) {
        let lat = LatticeBox::centered(2);
        let edges = lat.edge_slots();
        let mut hat = EdgeConfig::zeros(&lat, 2);
        for (i, g) in a {
            hat.set(edges[i % edges.len()], g);
        }
        let t = closed(&lat, 2, &b);
        let m = merge_lgt_z(&lat, &hat, &t).unwrap();
        for &e in &edges {
            if !m.eset.contains(e) {
                prop_assert_eq!(m.sigma.get(e), t.get(e));
            } else {
                prop_assert_eq!(m.sigma.get(e), hat.get(e));
            }
        }
        let dec = decompose_merged(&m, &lat).unwrap();
        let pieces: Vec<_> = dec.pieces().collect();
        prop_assert!(is_decomposition(&pieces, &m.sigma, &lat).unwrap());
    }
}

#[test]
fn merging_rejects_non_closed_parents() {
    let lat = LatticeBox::centered(1);
    let mut s = EdgeConfig::zeros(&lat, 2);
    s.set(lat.edge_slots()[0], 1);
    let z = EdgeConfig::zeros(&lat, 2);
    assert!(merge_zz(&lat, &s, &z, &[]).is_err());
    assert!(merge_lgt_z(&lat, &z, &s).is_err());
    assert!(merge_lgt_z(&lat, &s, &z).is_ok());
}

#[test]
fn sampled_couplings_are_reproducible_and_logged() {
    let lat = LatticeBox::centered(1);
    let p = Params { n: 2, half_width: 1, beta: 0.5, kappa: 1.7 };
    let a = sample_coupling(&lat, &p, CouplingKind::LgtZ, 4, 0, 3).unwrap();
    let b = sample_coupling(&lat, &p, CouplingKind::LgtZ, 4, 0, 3).unwrap();
    assert_eq!(a, b);
    let gamma = hlgt::cellcomplex::Chain::from_cell(hlgt::cellcomplex::OrientedCell::positive(
        hlgt::cellcomplex::Cell::edge([0; 4], 0),
    ));
    let e0 = lat.edge_slot(&hlgt::cellcomplex::Cell::edge([0; 4], 0)).unwrap();
    let ctx = EventContext::new(&gamma, &[e0], &lat).unwrap();
    let rec = event_indicators(&a, &ctx, &lat).unwrap();
    let mut buf = Vec::new();
    write_event_log(&[EventRow::new(a.provenance, &rec)], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 2);
}
