//! The vertex spin model dual to `beta = infinity`: weight
//! `exp(2 kappa sum_e Re rho(d eta(e)))` over positive edges (Ising for
//! `n = 2`, clock model otherwise).

use num_complex::Complex64;
use petgraph::unionfind::UnionFind;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cellcomplex::{boundary_chain, Chain, LatticeBox};
use crate::error::{Error, Result};
use crate::forms::{reduce, EdgeConfig};
use crate::gibbs::{self, re_rho, Start, MAX_N};
use crate::mc::{self, batch_means, Estimate, McConfig};
use crate::theory;

/// A group element on every vertex of a box, indexed by vertex index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    n: u8,
    values: Vec<u8>,
}

impl SpinConfig {
    /// All spins zero.
    pub fn zeros(lattice: &LatticeBox, n: u8) -> Self {
        Self { n, values: vec![0; lattice.num_vertices()] }
    }

    /// Spins from raw values.
    pub fn from_values(lattice: &LatticeBox, n: u8, values: Vec<u8>) -> Result<Self> {
        if values.len() != lattice.num_vertices() {
            return Err(Error::DimensionMismatch { expected: lattice.num_vertices(), found: values.len() });
        }
        if values.iter().any(|&v| v >= n) {
            return Err(Error::InvalidParameter("spin value out of range".into()));
        }
        Ok(Self { n, values })
    }

    /// Group order.
    pub fn n(&self) -> u8 {
        self.n
    }

    /// Raw values by vertex index.
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Spin at vertex `v`.
    pub fn get(&self, v: usize) -> u8 {
        self.values[v]
    }

    /// The closed configuration `d eta`.
    pub fn coboundary(&self, lattice: &LatticeBox) -> EdgeConfig {
        EdgeConfig::coboundary_of(lattice, self.n, &self.values)
    }
}

/// Update rule for the spin model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SpinUpdate {
    #[default]
    HeatBath,
    SwendsenWang,
}

/// One single-site heat-bath sweep over all vertices in canonical order,
/// one uniform draw per vertex.
pub fn spin_sweep(eta: &mut SpinConfig, lattice: &LatticeBox, kappa: f64, rng: &mut impl Rng) {
    let n = eta.n;
    let re: Vec<f64> = (0..n).map(|g| re_rho(g, n)).collect();
    let mut buf = [0.0f64; MAX_N as usize];
    for v in 0..lattice.num_vertices() {
        let nbrs = lattice.vertex_neighbors(v);
        let w = &mut buf[..n as usize];
        for g in 0..n {
            let s: f64 = nbrs.iter().map(|&u| re[reduce(g as i64 - eta.values[u] as i64, n) as usize]).sum();
            w[g as usize] = 2.0 * kappa * s;
        }
        let m = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for x in w.iter_mut() {
            *x = (*x - m).exp();
            total += *x;
        }
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = n - 1;
        for g in 0..n {
            acc += w[g as usize];
            if u < acc {
                pick = g;
                break;
            }
        }
        eta.values[v] = pick;
    }
}

/// One Swendsen-Wang sweep for `n = 2`: one draw per positive edge for the
/// bonds, then one draw per vertex, the draw of a cluster's smallest vertex
/// deciding its flip.
pub fn swendsen_wang_sweep(eta: &mut SpinConfig, lattice: &LatticeBox, kappa: f64, rng: &mut impl Rng) -> Result<()> {
    if eta.n != 2 {
        return Err(Error::InvalidParameter("Swendsen-Wang requires n = 2".into()));
    }
    let nv = lattice.num_vertices();
    let p_bond = 1.0 - (-4.0 * kappa).exp();
    let mut uf = UnionFind::<usize>::new(nv);
    for e in lattice.edge_slots() {
        let u: f64 = rng.gen();
        let (a, b) = lattice.edge_endpoints(e);
        if eta.values[a] == eta.values[b] && u < p_bond {
            uf.union(a, b);
        }
    }
    let mut decision: Vec<Option<bool>> = vec![None; nv];
    for v in 0..nv {
        let u: f64 = rng.gen();
        let root = uf.find(v);
        let flip = *decision[root].get_or_insert(u < 0.5);
        if flip {
            eta.values[v] ^= 1;
        }
    }
    Ok(())
}

/// A Markov chain for the spin model.
#[derive(Clone, Debug)]
pub struct SpinChain {
    lattice: LatticeBox,
    kappa: f64,
    eta: SpinConfig,
    update: SpinUpdate,
    seed: u64,
    chain: u64,
    sweeps_done: u64,
}

impl SpinChain {
    /// A chain started cold (all zero) or hot (uniform spins).
    pub fn new(lattice: LatticeBox, n: u8, kappa: f64, seed: u64, chain: u64, start: Start, update: SpinUpdate) -> Result<Self> {
        if !(2..=MAX_N).contains(&n) {
            return Err(Error::InvalidParameter(format!("group order must lie in 2..={MAX_N}")));
        }
        if update == SpinUpdate::SwendsenWang && n != 2 {
            return Err(Error::InvalidParameter("Swendsen-Wang requires n = 2".into()));
        }
        let mut eta = SpinConfig::zeros(&lattice, n);
        if start == Start::Hot {
            let mut rng = mc::init_rng(seed, chain);
            for v in eta.values.iter_mut() {
                *v = rng.gen_range(0..n);
            }
        }
        Ok(Self { lattice, kappa, eta, update, seed, chain, sweeps_done: 0 })
    }

    /// Performs one sweep.
    pub fn sweep(&mut self) {
        let mut rng = mc::sweep_rng(self.seed, self.chain, self.sweeps_done);
        match self.update {
            SpinUpdate::HeatBath => spin_sweep(&mut self.eta, &self.lattice, self.kappa, &mut rng),
            SpinUpdate::SwendsenWang => {
                swendsen_wang_sweep(&mut self.eta, &self.lattice, self.kappa, &mut rng).expect("n = 2 checked")
            }
        }
        self.sweeps_done += 1;
    }

    /// Current spins.
    pub fn eta(&self) -> &SpinConfig {
        &self.eta
    }

    /// The closed gauge configuration `d eta`.
    pub fn closed_config(&self) -> EdgeConfig {
        self.eta.coboundary(&self.lattice)
    }

    /// Sweeps performed so far.
    pub fn sweeps_done(&self) -> u64 {
        self.sweeps_done
    }

    /// Replaces the state, e.g. from a checkpoint.
    pub fn restore(&mut self, eta: SpinConfig, sweeps_done: u64) {
        self.eta = eta;
        self.sweeps_done = sweeps_done;
    }
}

/// Runs spin chains and estimates `<obs(eta)>`.
pub fn spin_estimate<F>(obs: F, lattice: &LatticeBox, n: u8, kappa: f64, mc: &McConfig, update: SpinUpdate) -> Result<Estimate>
where
    F: Fn(&SpinConfig) -> f64 + Sync,
{
    let mut v = spin_estimate_many(|eta| vec![obs(eta)], 1, lattice, n, kappa, mc, update)?;
    Ok(v.remove(0))
}

/// Estimates `count` spin observables from the same chains.
pub fn spin_estimate_many<F>(
    obs: F,
    count: usize,
    lattice: &LatticeBox,
    n: u8,
    kappa: f64,
    mc: &McConfig,
    update: SpinUpdate,
) -> Result<Vec<Estimate>>
where
    F: Fn(&SpinConfig) -> Vec<f64> + Sync,
{
    mc.validate()?;
    let series: Vec<Result<Vec<Vec<f64>>>> = mc::run_chains(mc.chains, |c| {
        let mut sc = SpinChain::new(lattice.clone(), n, kappa, mc.seed, c as u64, Start::Cold, update)?;
        let mut out = vec![Vec::with_capacity(mc.recorded_per_chain()); count];
        for s in 0..mc.sweeps {
            sc.sweep();
            if mc.records(s) {
                let values = obs(sc.eta());
                if values.len() != count {
                    return Err(Error::Internal("observable returned the wrong number of values".into()));
                }
                for (o, v) in out.iter_mut().zip(values) {
                    o.push(v);
                }
            }
        }
        Ok(out)
    });
    let series = series.into_iter().collect::<Result<Vec<_>>>()?;
    (0..count)
        .map(|i| {
            let per_chain: Vec<Vec<f64>> = series.iter().map(|chain| chain[i].clone()).collect();
            batch_means(&per_chain, mc.batches, mc)
        })
        .collect()
}

/// Exact `<obs(eta)>` by enumeration of all vertex configurations.
pub fn exact_expectation(obs: impl Fn(&[u8]) -> f64, lattice: &LatticeBox, n: u8, kappa: f64) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    gibbs::for_each_spin_config(lattice, n, kappa, |eta, w| {
        num += w * obs(eta);
        den += w;
    })?;
    Ok(num / den)
}

/// Endpoints `(x1, x2)` (vertex indices) of a path with `boundary = x2 - x1`,
/// or `None` for a generalized loop.
pub fn path_endpoints(gamma: &Chain, lattice: &LatticeBox) -> Result<Option<(usize, usize)>> {
    let b = boundary_chain(gamma)?;
    if b.is_empty() {
        return Ok(None);
    }
    let mut start = None;
    let mut end = None;
    for (v, a) in b.iter() {
        let idx = lattice.vertex_index(&v.base).ok_or_else(|| Error::InvalidCell(format!("vertex {v} outside the box")))?;
        match a {
            1 if end.is_none() => end = Some(idx),
            -1 if start.is_none() => start = Some(idx),
            _ => return Err(Error::InvalidParameter("chain is not a path".into())),
        }
    }
    match (start, end) {
        (Some(x1), Some(x2)) => Ok(Some((x1, x2))),
        _ => Err(Error::InvalidParameter("chain is not a path".into())),
    }
}

/// `Re rho(eta(x2) - eta(x1))`.
pub fn two_point(eta: &[u8], n: u8, x1: usize, x2: usize) -> f64 {
    re_rho(reduce(eta[x2] as i64 - eta[x1] as i64, n), n)
}

/// `H_kappa(gamma)`: exactly 1 for generalized loops, otherwise the
/// spin-spin correlation between the endpoints.
pub fn h_kappa(gamma: &Chain, kappa: f64, n: u8, lattice: &LatticeBox, mc: &McConfig, update: SpinUpdate) -> Result<Estimate> {
    match path_endpoints(gamma, lattice)? {
        None => Ok(Estimate::exact(1.0, mc)),
        Some((x1, x2)) => spin_estimate(|eta| two_point(eta.values(), n, x1, x2), lattice, n, kappa, mc, update),
    }
}

/// Exact `H_kappa(gamma)` on an enumerable box.
pub fn h_kappa_exact(gamma: &Chain, kappa: f64, n: u8, lattice: &LatticeBox) -> Result<f64> {
    match path_endpoints(gamma, lattice)? {
        None => Ok(1.0),
        Some((x1, x2)) => exact_expectation(|eta| two_point(eta, n, x1, x2), lattice, n, kappa),
    }
}

/// Oriented edges of a path as `(edge slot, coefficient)`.
pub fn path_slots(gamma: &Chain, lattice: &LatticeBox) -> Result<Vec<(usize, i64)>> {
    gamma
        .iter()
        .map(|(c, a)| {
            lattice
                .edge_slot(c)
                .map(|s| (s, a))
                .ok_or_else(|| Error::InvalidCell(format!("edge {c} outside the box")))
        })
        .collect()
}

fn theta_product_of(sigma: &EdgeConfig, slots: &[(usize, i64)], table: &[Complex64]) -> f64 {
    let n = sigma.n();
    let mut prod = Complex64::new(1.0, 0.0);
    for &(s, a) in slots {
        let g = reduce(a * sigma.get(s) as i64, n);
        prod *= table[g as usize];
    }
    prod.re
}

/// `Theta_{N,beta,kappa}(gamma) = E_{N,inf,kappa}[prod_{e in gamma} theta(sigma(e))]`.
pub fn theta_product(gamma: &Chain, beta: f64, kappa: f64, n: u8, lattice: &LatticeBox, mc: &McConfig) -> Result<Estimate> {
    if beta.is_infinite() {
        return Err(Error::InvalidParameter("theta_product requires finite beta".into()));
    }
    let slots = path_slots(gamma, lattice)?;
    let table: Vec<Complex64> = (0..n).map(|g| theory::theta(beta, kappa, g, n)).collect();
    spin_estimate(
        |eta| theta_product_of(&eta.coboundary(lattice), &slots, &table),
        lattice,
        n,
        kappa,
        mc,
        SpinUpdate::HeatBath,
    )
}

/// Exact `Theta_{N,beta,kappa}(gamma)` on an enumerable box.
pub fn theta_product_exact(gamma: &Chain, beta: f64, kappa: f64, n: u8, lattice: &LatticeBox) -> Result<f64> {
    let slots = path_slots(gamma, lattice)?;
    let table: Vec<Complex64> = (0..n).map(|g| theory::theta(beta, kappa, g, n)).collect();
    exact_expectation(
        |eta| theta_product_of(&EdgeConfig::coboundary_of(lattice, n, eta), &slots, &table),
        lattice,
        n,
        kappa,
    )
}

/// The edge along axis 1 starting at the centre of the box (the origin for
/// `B_N`).
pub fn central_edge(lattice: &LatticeBox) -> Result<usize> {
    let (lo, hi) = (lattice.lo(), lattice.hi());
    let mut base = [0i32; 4];
    for j in 0..4 {
        base[j] = (lo[j] + hi[j]).div_euclid(2);
    }
    if base[0] == hi[0] {
        base[0] -= 1;
    }
    lattice
        .edge_slot(&crate::cellcomplex::Cell::edge(base, 0))
        .ok_or_else(|| Error::InvalidParameter("box has no edge along axis 1".into()))
}

/// `<L_e>_{inf,kappa,inf} = <Re rho(d eta(e))>` at the central edge.
pub fn edge_correlation(kappa: f64, n: u8, lattice: &LatticeBox, mc: &McConfig, update: SpinUpdate) -> Result<Estimate> {
    let (a, b) = lattice.edge_endpoints(central_edge(lattice)?);
    spin_estimate(|eta| two_point(eta.values(), n, a, b), lattice, n, kappa, mc, update)
}

/// Exact edge correlation on an enumerable box.
pub fn edge_correlation_exact(kappa: f64, n: u8, lattice: &LatticeBox) -> Result<f64> {
    let (a, b) = lattice.edge_endpoints(central_edge(lattice)?);
    exact_expectation(|eta| two_point(eta, n, a, b), lattice, n, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellcomplex::{Cell, OrientedCell};

    #[test]
    fn loop_has_unit_h() {
        let lat = LatticeBox::unit_cube3();
        let gamma = boundary_chain(&Chain::from_cell(OrientedCell::positive(Cell::plaquette([0; 4], 0, 1)))).unwrap();
        let mc = McConfig { sweeps: 512, ..Default::default() };
        let h = h_kappa(&gamma, 0.3, 2, &lat, &mc, SpinUpdate::HeatBath).unwrap();
        assert_eq!((h.mean, h.stderr), (1.0, 0.0));
    }

    #[test]
    fn swendsen_wang_rejects_n3() {
        let lat = LatticeBox::unit_cube3();
        assert!(SpinChain::new(lat, 3, 0.5, 1, 0, Start::Cold, SpinUpdate::SwendsenWang).is_err());
    }

    #[test]
    fn adjacent_two_point_matches_enumeration() {
        let lat = LatticeBox::unit_cube3();
        let gamma = Chain::from_cell(OrientedCell::positive(Cell::edge([0; 4], 0)));
        let exact = h_kappa_exact(&gamma, 0.4, 2, &lat).unwrap();
        let mc = McConfig { sweeps: 20000, chains: 2, batches: 32, ..Default::default() };
        for update in [SpinUpdate::HeatBath, SpinUpdate::SwendsenWang] {
            let est = h_kappa(&gamma, 0.4, 2, &lat, &mc, update).unwrap();
            assert!(est.within(exact, 4.0, 1e-3), "{update:?}: {est:?} vs {exact}");
        }
    }
}
