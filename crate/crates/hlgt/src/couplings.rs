//! Disagreement-percolation couplings between the Higgs model and the
//! closed (`beta = infinity`) model, and between two closed models, together
//! with the decidable event indicators used by the cluster bounds.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cellcomplex::LatticeBox;
use crate::clusters::{dist0, dist1_to_boundary, e_set, edge_neighbors, restrict, ESet, EdgeGraphView};
use crate::error::{Error, Result};
use crate::forms::{decompose, reduce, EdgeConfig, Form};
use crate::gibbs::{GaugeChain, GaugeUpdate, Params, Start};
use crate::spinmodel::{SpinChain, SpinUpdate};
use crate::vortices::{plaquettes_disagree, PathDecoration};

/// Which coupling produced a sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingKind {
    /// Two closed configurations forced to agree off the cluster of `e0`.
    Zz { e0: Vec<usize> },
    /// A Higgs configuration and a closed configuration.
    LgtZ,
}

/// Where the parents of a sample came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub chain: u64,
    pub sweep_sigma: u64,
    pub sweep_sigma_prime: u64,
}

/// A coupled pair `(sigma, sigma')` with the region where they may differ.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSample {
    /// `hat sigma` on `eset`, `hat sigma'` elsewhere.
    pub sigma: EdgeConfig,
    /// The closed parent `hat sigma'`.
    pub sigma_prime: EdgeConfig,
    /// The parent `hat sigma`.
    pub parent: EdgeConfig,
    pub eset: ESet,
    pub kind: CouplingKind,
    pub provenance: Option<Provenance>,
}

fn splice(hat: &EdgeConfig, hat_prime: &EdgeConfig, eset: &ESet) -> EdgeConfig {
    let mut out = hat_prime.clone();
    for s in eset.iter() {
        out.set(s, hat.get(s));
    }
    out
}

/// Merges two closed configurations on the cluster of `e0`.
pub fn merge_zz(lattice: &LatticeBox, hat: &EdgeConfig, hat_prime: &EdgeConfig, e0: &[usize]) -> Result<CouplingSample> {
    if !hat.is_closed(lattice) || !hat_prime.is_closed(lattice) {
        return Err(Error::NotClosed);
    }
    let eset = e_set(lattice, e0, hat, hat_prime);
    Ok(CouplingSample {
        sigma: splice(hat, hat_prime, &eset),
        sigma_prime: hat_prime.clone(),
        parent: hat.clone(),
        eset,
        kind: CouplingKind::Zz { e0: e0.to_vec() },
        provenance: None,
    })
}

/// Merges a Higgs configuration with a closed one on `E_{hat sigma, hat sigma'}`.
pub fn merge_lgt_z(lattice: &LatticeBox, hat: &EdgeConfig, hat_prime: &EdgeConfig) -> Result<CouplingSample> {
    if !hat_prime.is_closed(lattice) {
        return Err(Error::NotClosed);
    }
    let eset = e_set(lattice, &[], hat, hat_prime);
    Ok(CouplingSample {
        sigma: splice(hat, hat_prime, &eset),
        sigma_prime: hat_prime.clone(),
        parent: hat.clone(),
        eset,
        kind: CouplingKind::LgtZ,
        provenance: None,
    })
}

enum First {
    Gauge(GaugeChain),
    Spin(SpinChain),
}

/// Two independent parent chains advanced in lockstep.
pub struct CouplingChain {
    lattice: LatticeBox,
    first: First,
    second: SpinChain,
    kind: CouplingKind,
    seed: u64,
    chain: u64,
}

impl CouplingChain {
    /// Parents for `kind` at `params`; `params.beta` is ignored for `Zz`.
    /// The parents use the independent streams `2 chain` and `2 chain + 1`.
    pub fn new(lattice: LatticeBox, params: &Params, kind: CouplingKind, seed: u64, chain: u64) -> Result<Self> {
        let first = match kind {
            CouplingKind::LgtZ => First::Gauge(GaugeChain::new(
                lattice.clone(),
                *params,
                seed,
                2 * chain,
                Start::Cold,
                GaugeUpdate::HeatBath,
            )?),
            CouplingKind::Zz { .. } => First::Spin(SpinChain::new(
                lattice.clone(),
                params.n,
                params.kappa,
                seed,
                2 * chain,
                Start::Hot,
                SpinUpdate::HeatBath,
            )?),
        };
        let second =
            SpinChain::new(lattice.clone(), params.n, params.kappa, seed, 2 * chain + 1, Start::Hot, SpinUpdate::HeatBath)?;
        Ok(Self { lattice, first, second, kind, seed, chain })
    }

    /// One sweep of each parent.
    pub fn sweep(&mut self) {
        match &mut self.first {
            First::Gauge(c) => c.sweep(),
            First::Spin(c) => c.sweep(),
        }
        self.second.sweep();
    }

    /// The merge of the current parents.
    pub fn sample(&self) -> Result<CouplingSample> {
        let (hat, sweeps) = match &self.first {
            First::Gauge(c) => (c.sigma().clone(), c.sweeps_done()),
            First::Spin(c) => (c.closed_config(), c.sweeps_done()),
        };
        let hat_prime = self.second.closed_config();
        let mut s = match &self.kind {
            CouplingKind::LgtZ => merge_lgt_z(&self.lattice, &hat, &hat_prime)?,
            CouplingKind::Zz { e0 } => merge_zz(&self.lattice, &hat, &hat_prime, e0)?,
        };
        s.provenance = Some(Provenance {
            seed: self.seed,
            chain: self.chain,
            sweep_sigma: sweeps,
            sweep_sigma_prime: self.second.sweeps_done(),
        });
        Ok(s)
    }

    /// The underlying box.
    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }
}

/// Runs fresh parents for `sweeps` sweeps and merges them.
pub fn sample_coupling(
    lattice: &LatticeBox,
    params: &Params,
    kind: CouplingKind,
    seed: u64,
    chain: u64,
    sweeps: usize,
) -> Result<CouplingSample> {
    let mut c = CouplingChain::new(lattice.clone(), params, kind, seed, chain)?;
    for _ in 0..sweeps {
        c.sweep();
    }
    c.sample()
}

/// Pieces of the merged configuration: parent pieces inside the E-set and
/// closed-parent pieces outside it.
#[derive(Clone, Debug, PartialEq)]
pub struct MergedDecomposition {
    pub inside: Vec<Form>,
    pub outside: Vec<Form>,
}

impl MergedDecomposition {
    /// All pieces.
    pub fn pieces(&self) -> impl Iterator<Item = &Form> {
        self.inside.iter().chain(&self.outside)
    }
}

fn slot_set(f: &Form, lattice: &LatticeBox) -> Result<BTreeSet<usize>> {
    f.support()
        .map(|c| lattice.edge_slot(c).ok_or_else(|| Error::InvalidCell(format!("edge {c} outside the box"))))
        .collect()
}

/// Decomposes the merged configuration from decompositions of its parents.
pub fn decompose_merged(sample: &CouplingSample, lattice: &LatticeBox) -> Result<MergedDecomposition> {
    let parts = |c: &EdgeConfig| -> Result<Vec<Form>> {
        let f = c.to_form(lattice);
        if f.is_zero() {
            Ok(Vec::new())
        } else {
            decompose(&f, lattice)
        }
    };
    let mut inside = Vec::new();
    for piece in parts(&sample.parent)? {
        if slot_set(&piece, lattice)?.iter().all(|&s| sample.eset.contains(s)) {
            inside.push(piece);
        }
    }
    let mut outside = Vec::new();
    for piece in parts(&sample.sigma_prime)? {
        if slot_set(&piece, lattice)?.iter().all(|&s| !sample.eset.contains(s)) {
            outside.push(piece);
        }
    }
    Ok(MergedDecomposition { inside, outside })
}

/// Checks that `pieces` decompose `sigma`: they sum to `sigma`, have
/// disjoint supports and disjoint `d`-supports.
pub fn is_decomposition(pieces: &[&Form], sigma: &EdgeConfig, lattice: &LatticeBox) -> Result<bool> {
    let mut total = Form::zero(1, sigma.n());
    let mut seen = BTreeSet::new();
    let mut seen_d = BTreeSet::new();
    for p in pieces {
        total = total.add(p)?;
        for c in p.support() {
            if !seen.insert(*c) {
                return Ok(false);
            }
        }
        for c in crate::forms::d(p, lattice)?.support() {
            if !seen_d.insert(*c) {
                return Ok(false);
            }
        }
    }
    Ok(total == sigma.to_form(lattice))
}

/// Size of a cluster and of the curvature of a configuration restricted
/// to it, both counted in positive cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub edges: usize,
    pub excited: usize,
}

/// `|supp d(sigma|_set)|^+`.
pub fn restricted_curvature_len(sigma: &EdgeConfig, set: &ESet, lattice: &LatticeBox) -> usize {
    let restricted = restrict(sigma, set, true);
    let mut plaquettes = BTreeSet::new();
    for s in set.iter() {
        for (p, _) in lattice.edge_plaquettes(s) {
            plaquettes.insert(p);
        }
    }
    plaquettes.into_iter().filter(|&p| restricted.plaquette_value(lattice, p) != 0).count()
}

/// Statistics of the cluster of `seeds` in `view`, with the curvature of
/// `sigma` restricted to it.
pub fn cluster_stats(view: &EdgeGraphView<'_>, seeds: &[usize], sigma: &EdgeConfig) -> ClusterStats {
    let c = view.cluster(seeds.iter().copied());
    ClusterStats { edges: c.len(), excited: restricted_curvature_len(sigma, &c, view.lattice()) }
}

/// Whether `sigma` carries the one-edge vortex `sigma(e) dx_e`: `sigma(e)`
/// is nonzero and every coboundary plaquette of `e` carries it.
pub fn has_edge_vortex(sigma: &EdgeConfig, lattice: &LatticeBox, slot: usize) -> bool {
    let g = sigma.get(slot);
    g != 0
        && lattice
            .edge_plaquettes(slot)
            .iter()
            .all(|&(p, c)| reduce(c as i64 * sigma.plaquette_value(lattice, p) as i64, sigma.n()) == g)
}

/// Edges whose coboundary meets the coboundary of `slot`, including itself.
pub fn plaquette_neighbourhood(lattice: &LatticeBox, slot: usize) -> Vec<usize> {
    let mut out = vec![slot];
    out.extend(edge_neighbors(lattice, slot));
    out
}

/// Path data shared by the event indicators.
#[derive(Clone, Debug)]
pub struct EventContext {
    pub deco: PathDecoration,
    /// Whether the path has nonzero boundary.
    pub open: bool,
    /// `max(dist_0(e, supp gamma_0), 8)` per path edge.
    pub m_disturb: Vec<usize>,
    /// `dist_1(e, boundary)` per path edge.
    pub dist1_boundary: Vec<usize>,
}

impl EventContext {
    /// Context for `gamma` with the reference path `gamma_0` given by its
    /// edge slots.
    pub fn new(gamma: &crate::cellcomplex::Chain, gamma0: &[usize], lattice: &LatticeBox) -> Result<Self> {
        let deco = PathDecoration::new(gamma, lattice)?;
        let open = !crate::cellcomplex::boundary_chain(gamma)?.is_empty();
        let mut m_disturb = Vec::new();
        let mut dist1_boundary = Vec::new();
        for &(s, _) in &deco.edges {
            let d0 = dist0(lattice, s, gamma0).map(|d| d.value).unwrap_or(usize::MAX);
            m_disturb.push(d0.max(8));
            dist1_boundary.push(dist1_to_boundary(lattice, s).unwrap_or(usize::MAX));
        }
        Ok(Self { deco, open, m_disturb, dist1_boundary })
    }

    /// Number of path edges.
    pub fn len(&self) -> usize {
        self.deco.edges.len()
    }

    /// Whether the path is empty.
    pub fn is_empty(&self) -> bool {
        self.deco.edges.is_empty()
    }
}

/// Event indicators of one coupled sample. Per-edge vectors follow the
/// order of the path edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    /// Superset of the event that the closed parent disturbs the path
    /// inside the E-set.
    pub e1_superset: bool,
    /// Superset of the event that the Higgs parent disturbs the path inside
    /// the E-set.
    pub e2_superset: bool,
    /// Two distinct decomposition pieces of `sigma` excite the coboundary of
    /// one path edge; implies the third event.
    pub e3_subset: bool,
    /// Cluster-size superset of the third event.
    pub e3_superset: bool,
    pub e4: Vec<bool>,
    pub e5: Vec<bool>,
    pub e6: Vec<bool>,
    pub e7: Vec<bool>,
    /// Positive edges of the largest parent-pair cluster meeting the path.
    pub max_cluster: usize,
    /// Positive edges of the E-set.
    pub eset_len: usize,
}

/// The fifth event at edge `slot`: the E-set meets the plaquette
/// neighbourhood of `slot` and `sigma(e) - d sigma(p)` is the same nonzero
/// value on every coboundary plaquette.
pub fn e5_event(sigma: &EdgeConfig, eset: &ESet, lattice: &LatticeBox, slot: usize) -> bool {
    if !plaquette_neighbourhood(lattice, slot).into_iter().any(|s| eset.contains(s)) {
        return false;
    }
    let n = sigma.n();
    let mut value = None;
    for (p, c) in lattice.edge_plaquettes(slot) {
        let v = reduce(sigma.get(slot) as i64 - c as i64 * sigma.plaquette_value(lattice, p) as i64, n);
        if v == 0 || value.is_some_and(|w| w != v) {
            return false;
        }
        value = Some(v);
    }
    value.is_some()
}

/// The third-event superset at `slot`: the cluster of the plaquette
/// neighbourhood in `G(sigma)` has at least 2 positive edges and its
/// restriction at least 12 excited positive plaquettes.
pub fn e3_superset_at(view: &EdgeGraphView<'_>, sigma: &EdgeConfig, slot: usize) -> bool {
    let st = cluster_stats(view, &plaquette_neighbourhood(view.lattice(), slot), sigma);
    st.edges >= 2 && st.excited >= 12
}

fn excites(piece: &Form, slot: usize, lattice: &LatticeBox) -> Result<bool> {
    let dp = crate::forms::d(piece, lattice)?;
    Ok(lattice
        .edge_plaquettes(slot)
        .iter()
        .any(|&(p, _)| lattice.plaquette_cell(p).is_some_and(|c| dp.get_cell(&c) != 0)))
}

/// The decomposition-based subset indicator of the third event.
pub fn e3_subset(sigma: &EdgeConfig, ctx: &EventContext, lattice: &LatticeBox) -> Result<bool> {
    let f = sigma.to_form(lattice);
    if f.is_zero() {
        return Ok(false);
    }
    let pieces = decompose(&f, lattice)?;
    for &(s, _) in &ctx.deco.edges {
        let mut count = 0;
        for piece in &pieces {
            if excites(piece, s, lattice)? {
                count += 1;
            }
        }
        if count >= 2 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Evaluates every indicator on a coupled sample.
pub fn event_indicators(sample: &CouplingSample, ctx: &EventContext, lattice: &LatticeBox) -> Result<EventRecord> {
    let parents = EdgeGraphView::new(lattice, &sample.parent, &sample.sigma_prime);
    let single = EdgeGraphView::single(lattice, &sample.sigma);
    let mut e1 = false;
    let mut e2 = false;
    let mut e3 = false;
    let mut max_cluster = 0;
    let mut rec = EventRecord {
        e1_superset: false,
        e2_superset: false,
        e3_subset: false,
        e3_superset: false,
        e4: Vec::new(),
        e5: Vec::new(),
        e6: Vec::new(),
        e7: Vec::new(),
        max_cluster: 0,
        eset_len: sample.eset.len(),
    };
    for (i, &(s, _)) in ctx.deco.edges.iter().enumerate() {
        let st = cluster_stats(&parents, &[s], &sample.parent);
        max_cluster = max_cluster.max(st.edges);
        let excited = st.excited > 0;
        let disturbing = ctx.open && excited && st.edges >= ctx.m_disturb[i];
        e1 |= disturbing;
        e2 |= disturbing
            || (ctx.deco.corner[i] && has_edge_vortex(&sample.parent, lattice, s))
            || (st.excited >= 7 && st.edges >= 2)
            || (excited && st.edges >= ctx.dist1_boundary[i]);
        e3 |= e3_superset_at(&single, &sample.sigma, s);
        rec.e4.push(sample.eset.contains(s) && sample.sigma_prime.get(s) != 0);
        rec.e5.push(e5_event(&sample.sigma, &sample.eset, lattice, s));
        rec.e6.push(sample.sigma_prime.get(s) != 0);
        rec.e7.push(plaquettes_disagree(&sample.sigma, lattice, s));
    }
    rec.e1_superset = e1;
    rec.e2_superset = e2;
    rec.e3_superset = e3;
    rec.e3_subset = e3_subset(&sample.sigma, ctx, lattice)?;
    rec.max_cluster = max_cluster;
    Ok(rec)
}

/// One row of the CSV event log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRow {
    pub seed: u64,
    pub chain: u64,
    pub sweep: u64,
    pub e1_superset: bool,
    pub e2_superset: bool,
    pub e3_subset: bool,
    pub e3_superset: bool,
    pub e4_edges: usize,
    pub e5_edges: usize,
    pub e6_edges: usize,
    pub e7_edges: usize,
    pub max_cluster: usize,
    pub eset_len: usize,
}

impl EventRow {
    /// Summarises a record.
    pub fn new(provenance: Option<Provenance>, rec: &EventRecord) -> Self {
        let count = |v: &[bool]| v.iter().filter(|b| **b).count();
        let p = provenance.unwrap_or(Provenance { seed: 0, chain: 0, sweep_sigma: 0, sweep_sigma_prime: 0 });
        Self {
            seed: p.seed,
            chain: p.chain,
            sweep: p.sweep_sigma,
            e1_superset: rec.e1_superset,
            e2_superset: rec.e2_superset,
            e3_subset: rec.e3_subset,
            e3_superset: rec.e3_superset,
            e4_edges: count(&rec.e4),
            e5_edges: count(&rec.e5),
            e6_edges: count(&rec.e6),
            e7_edges: count(&rec.e7),
            max_cluster: rec.max_cluster,
            eset_len: rec.eset_len,
        }
    }
}

/// Writes event rows as CSV with a header row.
pub fn write_event_log<W: Write>(rows: &[EventRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "seed",
            "chain",
            "sweep",
            "e1_superset",
            "e2_superset",
            "e3_subset",
            "e3_superset",
            "e4_edges",
            "e5_edges",
            "e6_edges",
            "e7_edges",
            "max_cluster",
            "eset_len",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_parents_merge_to_themselves() {
        let lat = LatticeBox::unit_cube3();
        let spins = [0, 1, 1, 0, 0, 0, 1, 0];
        let s = EdgeConfig::coboundary_of(&lat, 2, &spins);
        let m = merge_zz(&lat, &s, &s, &[lat.edge_slots()[0]]).unwrap();
        assert_eq!(m.sigma, s);
    }

    #[test]
    fn closed_higgs_parent_gives_empty_eset() {
        let lat = LatticeBox::unit_cube3();
        let s = EdgeConfig::coboundary_of(&lat, 2, &[1, 0, 0, 0, 0, 0, 0, 0]);
        let z = EdgeConfig::zeros(&lat, 2);
        let m = merge_lgt_z(&lat, &s, &z).unwrap();
        assert!(m.eset.is_empty());
        assert_eq!(m.sigma, z);
    }

    #[test]
    fn open_parent_rejected() {
        let lat = LatticeBox::unit_cube3();
        let mut s = EdgeConfig::zeros(&lat, 2);
        s.set(lat.edge_slots()[0], 1);
        assert!(matches!(merge_zz(&lat, &s, &s, &[]), Err(Error::NotClosed)));
        assert!(matches!(merge_lgt_z(&lat, &s, &s), Err(Error::NotClosed)));
    }

    #[test]
    fn event_log_has_header() {
        let mut buf = Vec::new();
        write_event_log(&[], &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("seed,chain,sweep"));
    }
}
