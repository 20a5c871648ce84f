//! The edge graph of a pair of configurations, its clusters, the merged
//! region `E_{E_0, sigma, sigma'}` and the distances `dist_0`, `dist_1`.
//!
//! Edge sets are stored as positive edge slots; each slot stands for both
//! orientations, so a set of `m` slots has `2m` oriented edges. Every edge is
//! adjacent to its negation, hence clusters are symmetric by construction.

use std::collections::{BTreeSet, HashMap, VecDeque};

use arrayvec::ArrayVec;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::cellcomplex::LatticeBox;
use crate::error::Result;
use crate::forms::{leq, EdgeConfig};

/// Edges sharing a plaquette with edge `slot`, each listed once.
pub fn edge_neighbors(lattice: &LatticeBox, slot: usize) -> ArrayVec<usize, 18> {
    let mut out = ArrayVec::new();
    for (p, _) in lattice.edge_plaquettes(slot) {
        for (t, _) in lattice.plaquette_edges(p) {
            if t != slot && !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// A symmetric set of edges, stored as positive edge slots.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ESet {
    slots: BTreeSet<usize>,
}

impl ESet {
    /// The empty set.
    pub fn new() -> Self {
        Self::default()
    }

    /// Set of the given positive slots.
    pub fn from_slots(slots: impl IntoIterator<Item = usize>) -> Self {
        Self { slots: slots.into_iter().collect() }
    }

    /// Whether the edge (either orientation) belongs to the set.
    pub fn contains(&self, slot: usize) -> bool {
        self.slots.contains(&slot)
    }

    /// Number of positive edges.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    /// Number of oriented edges, `2 * len`.
    pub fn oriented_len(&self) -> usize {
        2 * self.slots.len()
    }

    /// Whether the set is empty.
    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Positive slots in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().copied()
    }

    /// Inserts an edge.
    pub fn insert(&mut self, slot: usize) {
        self.slots.insert(slot);
    }

    /// Whether the two sets share an edge.
    pub fn intersects(&self, other: &ESet) -> bool {
        self.slots.iter().any(|s| other.contains(*s))
    }
}

/// The edge graph of `(sigma, sigma')`: two distinct edges are adjacent when
/// one is the negation of the other, or when both lie in the union of the
/// supports and share a plaquette.
pub struct EdgeGraphView<'a> {
    lattice: &'a LatticeBox,
    supported: Vec<bool>,
    components: HashMap<usize, Vec<usize>>,
    root: HashMap<usize, usize>,
}

impl<'a> EdgeGraphView<'a> {
    /// The graph of a pair of configurations.
    pub fn new(lattice: &'a LatticeBox, sigma: &EdgeConfig, sigma_prime: &EdgeConfig) -> Self {
        let supported: Vec<bool> =
            sigma.slots().iter().zip(sigma_prime.slots()).map(|(&a, &b)| a != 0 || b != 0).collect();
        Self::from_supported(lattice, supported)
    }

    /// The graph of a single configuration, `G(sigma) = G(sigma, 0)`.
    pub fn single(lattice: &'a LatticeBox, sigma: &EdgeConfig) -> Self {
        let supported = sigma.slots().iter().map(|&a| a != 0).collect();
        Self::from_supported(lattice, supported)
    }

    /// The saturated graph, in which every edge is supported.
    pub fn saturated(lattice: &'a LatticeBox) -> Self {
        let supported = (0..lattice.num_edge_slots()).map(|s| lattice.edge_slot_valid(s)).collect();
        Self::from_supported(lattice, supported)
    }

    /// The graph with the given supported slots.
    pub fn from_supported(lattice: &'a LatticeBox, supported: Vec<bool>) -> Self {
        let nodes: Vec<usize> = (0..supported.len()).filter(|&s| supported[s]).collect();
        let index: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut uf = UnionFind::<usize>::new(nodes.len());
        for (i, &s) in nodes.iter().enumerate() {
            for t in edge_neighbors(lattice, s) {
                if let Some(&j) = index.get(&t) {
                    uf.union(i, j);
                }
            }
        }
        let mut components: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut root = HashMap::new();
        for (i, &s) in nodes.iter().enumerate() {
            let r = nodes[uf.find(i)];
            components.entry(r).or_default().push(s);
            root.insert(s, r);
        }
        Self { lattice, supported, components, root }
    }

    /// The underlying box.
    pub fn lattice(&self) -> &LatticeBox {
        self.lattice
    }

    /// Whether the edge lies in the union of the supports.
    pub fn is_supported(&self, slot: usize) -> bool {
        self.supported.get(slot).copied().unwrap_or(false)
    }

    /// Adjacency of two positive edges, ignoring orientation. Every edge is
    /// adjacent to itself through its negation.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        a == b || (self.is_supported(a) && self.is_supported(b) && edge_neighbors(self.lattice, a).contains(&b))
    }

    /// Whether two edges lie in the same cluster.
    pub fn same_cluster(&self, a: usize, b: usize) -> bool {
        a == b || matches!((self.root.get(&a), self.root.get(&b)), (Some(x), Some(y)) if x == y)
    }

    /// Positive edges of the cluster of one edge.
    pub fn component(&self, slot: usize) -> Vec<usize> {
        match self.root.get(&slot) {
            Some(r) => self.components[r].clone(),
            None => vec![slot],
        }
    }

    /// Union of the clusters of the given edges.
    pub fn cluster(&self, edges: impl IntoIterator<Item = usize>) -> ESet {
        let mut out = ESet::new();
        for e in edges {
            if out.contains(e) {
                continue;
            }
            for s in self.component(e) {
                out.insert(s);
            }
        }
        out
    }
}

/// Edges of `supp sigma` with a plaquette of their coboundary on which
/// `d sigma` is nonzero.
pub fn generators(lattice: &LatticeBox, sigma: &EdgeConfig) -> Vec<usize> {
    lattice
        .edge_slots()
        .into_iter()
        .filter(|&s| {
            sigma.get(s) != 0 && lattice.edge_plaquettes(s).iter().any(|&(p, _)| sigma.plaquette_value(lattice, p) != 0)
        })
        .collect()
}

/// `E_{E_0, sigma, sigma'}`: the cluster of `E_0` together with the
/// generators of both configurations.
pub fn e_set(lattice: &LatticeBox, e0: &[usize], sigma: &EdgeConfig, sigma_prime: &EdgeConfig) -> ESet {
    let view = EdgeGraphView::new(lattice, sigma, sigma_prime);
    e_set_in(&view, e0, sigma, sigma_prime)
}

/// [`e_set`] on a prebuilt view.
pub fn e_set_in(view: &EdgeGraphView<'_>, e0: &[usize], sigma: &EdgeConfig, sigma_prime: &EdgeConfig) -> ESet {
    let lattice = view.lattice();
    let mut seeds: Vec<usize> = e0.to_vec();
    seeds.extend(generators(lattice, sigma));
    seeds.extend(generators(lattice, sigma_prime));
    view.cluster(seeds)
}

/// `sigma` restricted to the set (`inside = true`) or to its complement.
pub fn restrict(sigma: &EdgeConfig, set: &ESet, inside: bool) -> EdgeConfig {
    let mut out = sigma.clone();
    for (s, v) in sigma.slots().iter().enumerate() {
        if *v != 0 && set.contains(s) != inside {
            out.set(s, 0);
        }
    }
    out
}

/// Checks the four relations `sigma|_{E'} <= sigma`,
/// `sigma|_{E'^c} <= sigma` and the same for `sigma'`, with `E'` the cluster
/// of `E`.
pub fn restriction_properties_check(
    lattice: &LatticeBox,
    sigma: &EdgeConfig,
    sigma_prime: &EdgeConfig,
    edges: &[usize],
) -> Result<bool> {
    let view = EdgeGraphView::new(lattice, sigma, sigma_prime);
    let set = view.cluster(edges.iter().copied());
    for s in [sigma, sigma_prime] {
        let whole = s.to_form(lattice);
        for inside in [true, false] {
            if !leq(&restrict(s, &set, inside).to_form(lattice), &whole, lattice)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Breadth-first distances in the saturated graph from a set of sources.
pub fn saturated_distances(lattice: &LatticeBox, sources: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; lattice.num_edge_slots()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if lattice.edge_slot_valid(s) && dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        let next = dist[s].map(|d| d + 1);
        for t in edge_neighbors(lattice, s) {
            if dist[t].is_none() {
                dist[t] = next;
                queue.push_back(t);
            }
        }
    }
    dist
}

/// `dist_1(e, E_0)`: the fewest positive edges in a cluster of the
/// saturated graph containing `e` and meeting `E_0`. `None` when `E_0` is
/// unreachable.
pub fn dist1(lattice: &LatticeBox, e: usize, e0: &[usize]) -> Option<usize> {
    if e0.contains(&e) {
        return Some(1);
    }
    saturated_distances(lattice, e0)[e].map(|d| d + 1)
}

/// Boundary edges of the box.
pub fn boundary_edges(lattice: &LatticeBox) -> Vec<usize> {
    lattice
        .edge_slots()
        .into_iter()
        .filter(|&s| lattice.is_boundary_cell(&lattice.edge_cell(s).expect("valid slot")))
        .collect()
}

/// `dist_1(e, boundary)`.
pub fn dist1_to_boundary(lattice: &LatticeBox, e: usize) -> Option<usize> {
    dist1(lattice, e, &boundary_edges(lattice))
}

/// A distance value, flagged when only a lower bound is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dist0 {
    pub value: usize,
    pub lower_bound: bool,
}

/// `dist_0(e, E_0)`: exact (`1`) when `e` is in `E_0`, otherwise the lower
/// bound `max(dist_1, 8)`.
pub fn dist0(lattice: &LatticeBox, e: usize, e0: &[usize]) -> Option<Dist0> {
    if e0.contains(&e) {
        return Some(Dist0 { value: 1, lower_bound: false });
    }
    dist1(lattice, e, e0).map(|d| Dist0 { value: d.max(8), lower_bound: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_supports_give_singletons() {
        let lat = LatticeBox::centered(1);
        let z = EdgeConfig::zeros(&lat, 2);
        let view = EdgeGraphView::new(&lat, &z, &z);
        let e = lat.edge_slots()[5];
        assert_eq!(view.cluster([e]).iter().collect::<Vec<_>>(), vec![e]);
        assert!(e_set(&lat, &[], &z, &z).is_empty());
    }

    #[test]
    fn adjacent_edges_have_distance_two() {
        let lat = LatticeBox::centered(2);
        let e = lat.edge_slots()[40];
        let f = edge_neighbors(&lat, e)[0];
        assert_eq!(dist1(&lat, e, &[e]), Some(1));
        assert_eq!(dist1(&lat, e, &[f]), Some(2));
        assert_eq!(dist0(&lat, e, &[f]).unwrap(), Dist0 { value: 8, lower_bound: true });
    }

    #[test]
    fn interior_edge_has_eighteen_neighbours() {
        let lat = LatticeBox::centered(2);
        let e = crate::spinmodel::central_edge(&lat).unwrap();
        assert_eq!(edge_neighbors(&lat, e).len(), 18);
    }
}
