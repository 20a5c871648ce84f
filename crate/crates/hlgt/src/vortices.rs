//! Vortices of a gauge configuration, corner edges of a path, the line
//! reduction `sum d sigma(p_e)` and an exhaustive decision procedure for
//! whether a configuration disturbs a path on tiny boxes.

use serde::{Deserialize, Serialize};

use crate::cellcomplex::{Chain, LatticeBox};
use crate::error::{Error, Result};
use crate::forms::{d, decompose, find_split, leq, poincare_antiderivative, reduce, EdgeConfig, Form};

/// A piece of `d sigma` in a decomposition, with its centre when minimal.
#[derive(Clone, Debug, PartialEq)]
pub struct Vortex {
    pub form: Form,
    pub center: Option<MinimalCenter>,
}

/// Centre of a minimal vortex `d(g dx)` on the positive edge `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalCenter {
    pub slot: usize,
    pub g: u8,
}

/// `d sigma` as a sparse 2-form.
pub fn curvature(sigma: &EdgeConfig, lattice: &LatticeBox) -> Form {
    let mut f = Form::zero(2, sigma.n());
    for p in lattice.plaquette_slots() {
        let v = sigma.plaquette_value(lattice, p);
        if v != 0 {
            f.set(lattice.plaquette_cell(p).expect("valid plaquette"), v);
        }
    }
    f
}

/// The vortices of `sigma`: the pieces of a decomposition of `d sigma`.
pub fn find_vortices(sigma: &EdgeConfig, lattice: &LatticeBox) -> Result<Vec<Vortex>> {
    let w = curvature(sigma, lattice);
    if w.is_zero() {
        return Ok(Vec::new());
    }
    Ok(decompose(&w, lattice)?
        .into_iter()
        .map(|form| {
            let center = is_minimal_vortex(&form, lattice);
            Vortex { form, center }
        })
        .collect())
}

/// The centre and value when `nu = d(g dx)` for an edge whose coboundary
/// avoids boundary plaquettes; `None` otherwise.
pub fn is_minimal_vortex(nu: &Form, lattice: &LatticeBox) -> Option<MinimalCenter> {
    if nu.dim() != 2 || nu.support_len() != 6 {
        return None;
    }
    let cells: Vec<_> = nu.support().copied().collect();
    if cells.iter().any(|c| lattice.is_boundary_cell(c)) {
        return None;
    }
    let first = lattice.plaquette_slot(&cells[0])?;
    for (e, _) in lattice.plaquette_edges(first) {
        let cob = lattice.edge_plaquettes(e);
        if cob.len() != 6 {
            continue;
        }
        let mut g = None;
        let mut ok = true;
        for &(p, c) in &cob {
            let cell = lattice.plaquette_cell(p)?;
            let v = nu.get_cell(&cell);
            let oriented = if c > 0 { v } else { crate::forms::neg_mod(v, nu.modulus()) };
            if v == 0 || g.is_some_and(|g| g != oriented) {
                ok = false;
                break;
            }
            g = Some(oriented);
        }
        if ok {
            return Some(MinimalCenter { slot: e, g: g? });
        }
    }
    None
}

/// A path with its corner edges and chosen plaquettes `p_e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathDecoration {
    /// `(edge slot, coefficient)` for each edge of the path.
    pub edges: Vec<(usize, i8)>,
    /// Whether each edge is a corner edge.
    pub corner: Vec<bool>,
    /// `(plaquette slot, sign)` with `sign * plaquette` in the coboundary of
    /// the oriented path edge; the lowest plaquette slot is chosen.
    pub p_e: Vec<(usize, i8)>,
}

impl PathDecoration {
    /// Decorates a path with coefficients in `{-1, 1}`.
    pub fn new(gamma: &Chain, lattice: &LatticeBox) -> Result<Self> {
        if gamma.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: gamma.dim() });
        }
        let mut edges = Vec::new();
        for (c, a) in gamma.iter() {
            if a.abs() != 1 {
                return Err(Error::InvalidParameter("path coefficients must lie in {-1, 0, 1}".into()));
            }
            let s = lattice.edge_slot(c).ok_or_else(|| Error::InvalidCell(format!("edge {c} outside the box")))?;
            edges.push((s, a as i8));
        }
        let plaquettes: Vec<Vec<usize>> =
            edges.iter().map(|&(s, _)| lattice.edge_plaquettes(s).iter().map(|&(p, _)| p).collect()).collect();
        let corner = (0..edges.len())
            .map(|i| (0..edges.len()).any(|j| j != i && plaquettes[i].iter().any(|p| plaquettes[j].contains(p))))
            .collect();
        let p_e = edges
            .iter()
            .map(|&(s, a)| {
                let cob = lattice.edge_plaquettes(s);
                let &(p, c) = cob.iter().min_by_key(|(p, _)| *p).ok_or_else(|| {
                    Error::InvalidCell("path edge without plaquettes".into())
                })?;
                Ok((p, c * a))
            })
            .collect::<Result<_>>()?;
        Ok(Self { edges, corner, p_e })
    }

    /// Number of non-corner edges, `|supp(gamma - gamma_c)|`.
    pub fn non_corner_len(&self) -> usize {
        self.corner.iter().filter(|c| !**c).count()
    }

    /// The corner sub-chain `gamma_c`.
    pub fn gamma_c(&self, lattice: &LatticeBox) -> Chain {
        let mut out = Chain::zero(1);
        for (&(s, a), &c) in self.edges.iter().zip(&self.corner) {
            if c {
                out.add_cell(lattice.edge_cell(s).expect("valid edge"), a as i64);
            }
        }
        out
    }

    /// `d sigma(p_e)` for path edge `i`.
    pub fn d_sigma_pe(&self, sigma: &EdgeConfig, lattice: &LatticeBox, i: usize) -> u8 {
        let (p, c) = self.p_e[i];
        reduce(c as i64 * sigma.plaquette_value(lattice, p) as i64, sigma.n())
    }

    /// `sigma(e)` for the oriented path edge `i`.
    pub fn sigma_e(&self, sigma: &EdgeConfig, i: usize) -> u8 {
        let (s, a) = self.edges[i];
        reduce(a as i64 * sigma.get(s) as i64, sigma.n())
    }
}

/// Whether `d sigma` takes different values on two oriented plaquettes of
/// the coboundary of edge `slot`.
pub fn plaquettes_disagree(sigma: &EdgeConfig, lattice: &LatticeBox, slot: usize) -> bool {
    let mut first = None;
    for (p, c) in lattice.edge_plaquettes(slot) {
        let v = reduce(c as i64 * sigma.plaquette_value(lattice, p) as i64, sigma.n());
        match first {
            None => first = Some(v),
            Some(f) if f != v => return true,
            _ => {}
        }
    }
    false
}

/// Indices of the path edges in `gamma'`: non-corner edges whose coboundary
/// plaquettes disagree in `d sigma`.
pub fn gamma_prime(sigma: &EdgeConfig, deco: &PathDecoration, lattice: &LatticeBox) -> Vec<usize> {
    (0..deco.edges.len())
        .filter(|&i| !deco.corner[i] && plaquettes_disagree(sigma, lattice, deco.edges[i].0))
        .collect()
}

/// Indices of the path edges in `(gamma - gamma_c) - gamma'`.
pub fn reduced_edges(sigma: &EdgeConfig, deco: &PathDecoration, lattice: &LatticeBox) -> Vec<usize> {
    (0..deco.edges.len())
        .filter(|&i| !deco.corner[i] && !plaquettes_disagree(sigma, lattice, deco.edges[i].0))
        .collect()
}

/// `sum over e in (gamma - gamma_c) - gamma'` of `d sigma(p_e)`.
pub fn reduce_line(sigma: &EdgeConfig, deco: &PathDecoration, lattice: &LatticeBox) -> u8 {
    let total: i64 = reduced_edges(sigma, deco, lattice).into_iter().map(|i| deco.d_sigma_pe(sigma, lattice, i) as i64).sum();
    reduce(total, sigma.n())
}

/// Size limits of the exhaustive disturbance search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisturbLimits {
    /// Largest number of positive edges of the box.
    pub max_edges: usize,
    /// Largest number of excited positive plaquettes.
    pub max_plaquettes: usize,
}

impl Default for DisturbLimits {
    fn default() -> Self {
        Self { max_edges: 16, max_plaquettes: 16 }
    }
}

/// Every chain with coefficients in `{-1, 0, 1}` on the box whose boundary
/// is `-boundary(gamma)`, as `(edge slot, coefficient)` lists.
pub fn return_paths(gamma: &Chain, lattice: &LatticeBox, max_edges: usize) -> Result<Vec<Vec<(usize, i8)>>> {
    let slots = lattice.edge_slots();
    if slots.len() > max_edges {
        return Err(Error::TooLarge(format!("{} edges exceed the limit {max_edges}", slots.len())));
    }
    let nv = lattice.num_vertices();
    let mut target = vec![0i64; nv];
    for (c, a) in gamma.iter() {
        let s = lattice.edge_slot(c).ok_or_else(|| Error::InvalidCell(format!("edge {c} outside the box")))?;
        let (t, h) = lattice.edge_endpoints(s);
        target[h] -= a;
        target[t] += a;
    }
    let mut closes_at: Vec<Vec<usize>> = vec![Vec::new(); slots.len()];
    for (v, &tv) in target.iter().enumerate() {
        let last = slots.iter().rposition(|&s| {
            let (t, h) = lattice.edge_endpoints(s);
            t == v || h == v
        });
        match last {
            Some(i) => closes_at[i].push(v),
            None if tv != 0 => return Ok(Vec::new()),
            None => {}
        }
    }
    let mut out = Vec::new();
    let mut balance = vec![0i64; nv];
    let mut coef = vec![0i8; slots.len()];
    struct Search<'a> {
        slots: &'a [usize],
        lattice: &'a LatticeBox,
        closes_at: &'a [Vec<usize>],
        target: &'a [i64],
    }
    fn recurse(
        ctx: &Search<'_>,
        i: usize,
        balance: &mut [i64],
        coef: &mut [i8],
        out: &mut Vec<Vec<(usize, i8)>>,
    ) {
        if i == ctx.slots.len() {
            out.push(ctx.slots.iter().zip(coef.iter()).filter(|(_, &a)| a != 0).map(|(&s, &a)| (s, a)).collect());
            return;
        }
        let (t, h) = ctx.lattice.edge_endpoints(ctx.slots[i]);
        for a in [0i8, 1, -1] {
            balance[h] += a as i64;
            balance[t] -= a as i64;
            coef[i] = a;
            if ctx.closes_at[i].iter().all(|&v| balance[v] == ctx.target[v]) {
                recurse(ctx, i + 1, balance, coef, out);
            }
            balance[h] -= a as i64;
            balance[t] += a as i64;
        }
        coef[i] = 0;
    }
    let ctx = Search { slots: &slots, lattice, closes_at: &closes_at, target: &target };
    recurse(&ctx, 0, &mut balance, &mut coef, &mut out);
    Ok(out)
}

fn eval_slots(values: &EdgeConfig, chain: &[(usize, i8)]) -> u8 {
    reduce(chain.iter().map(|&(s, a)| a as i64 * values.get(s) as i64).sum(), values.n())
}

/// Whether every vortex in a configuration with curvature `w` is a minimal
/// vortex centred on one of `allowed` edge slots. Enumerates every closed
/// irreducible restriction of `w`.
pub fn vortices_allowed(w: &Form, allowed: &[usize], lattice: &LatticeBox, max_plaquettes: usize) -> Result<bool> {
    if w.is_zero() {
        return Ok(true);
    }
    let cells: Vec<_> = w.support().copied().collect();
    if cells.len() > max_plaquettes {
        return Err(Error::TooLarge(format!("{} excited plaquettes exceed the limit", cells.len())));
    }
    for mask in 1u64..(1u64 << cells.len()) {
        let chosen: Vec<_> = (0..cells.len()).filter(|&i| mask >> i & 1 == 1).map(|i| cells[i]).collect();
        let nu = w.restrict(|c| chosen.binary_search(c).is_ok());
        if !d(&nu, lattice)?.is_zero() || find_split(&nu, lattice, cells.len())?.is_some() {
            continue;
        }
        match is_minimal_vortex(&nu, lattice) {
            Some(center) if allowed.contains(&center.slot) => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Slots of the non-corner edges of the path.
pub fn non_corner_slots(deco: &PathDecoration) -> Vec<usize> {
    deco.edges.iter().zip(&deco.corner).filter(|(_, c)| !**c).map(|(&(s, _), _)| s).collect()
}

/// Precomputed data for deciding disturbance on one path.
pub struct DisturbOracle<'a> {
    lattice: &'a LatticeBox,
    gamma: Chain,
    gamma_slots: Vec<(usize, i8)>,
    paths: Vec<Vec<(usize, i8)>>,
    allowed: Vec<usize>,
    limits: DisturbLimits,
}

impl<'a> DisturbOracle<'a> {
    /// Enumerates the return paths of `gamma` once.
    pub fn new(gamma: &Chain, lattice: &'a LatticeBox, limits: DisturbLimits) -> Result<Self> {
        let deco = PathDecoration::new(gamma, lattice)?;
        let paths = return_paths(gamma, lattice, limits.max_edges)?;
        Ok(Self {
            lattice,
            gamma: gamma.clone(),
            gamma_slots: deco.edges.clone(),
            paths,
            allowed: non_corner_slots(&deco),
            limits,
        })
    }

    /// Number of candidate return paths.
    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    fn witness_for(&self, sigma: &EdgeConfig, hathat: &EdgeConfig, sigma_zero: &[usize]) -> bool {
        let target = crate::forms::neg_mod(eval_slots(hathat, &self.gamma_slots), sigma.n());
        sigma_zero.iter().any(|&i| eval_slots(hathat, &self.paths[i]) == target)
    }

    /// Whether `sigma` disturbs the path. Candidate `hathat sigma` are
    /// antiderivatives of closed restrictions of `d sigma`; conditions
    /// (iii) and (iv) depend on `hathat sigma` only through its curvature.
    pub fn disturbs(&self, sigma: &EdgeConfig) -> Result<bool> {
        let lattice = self.lattice;
        let sigma_zero: Vec<usize> =
            (0..self.paths.len()).filter(|&i| eval_slots(sigma, &self.paths[i]) == 0).collect();
        if sigma_zero.is_empty() {
            return Ok(true);
        }
        let w = curvature(sigma, lattice);
        let cells: Vec<_> = w.support().copied().collect();
        if cells.len() > self.limits.max_plaquettes {
            return Err(Error::TooLarge(format!("{} excited plaquettes exceed the limit", cells.len())));
        }
        for mask in 0u64..(1u64 << cells.len()) {
            let chosen: Vec<_> = (0..cells.len()).filter(|&i| mask >> i & 1 == 1).map(|i| cells[i]).collect();
            let omega = w.restrict(|c| chosen.binary_search(c).is_ok());
            if !d(&omega, lattice)?.is_zero() {
                continue;
            }
            let hathat = if omega.is_zero() {
                EdgeConfig::zeros(lattice, sigma.n())
            } else {
                EdgeConfig::from_form(lattice, &poincare_antiderivative(&omega, lattice)?)?
            };
            if !self.witness_for(sigma, &hathat, &sigma_zero) {
                continue;
            }
            let rest = w.sub(&omega)?;
            if vortices_allowed(&rest, &self.allowed, lattice, self.limits.max_plaquettes)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The same decision with `hathat sigma` ranging over every 1-form of
    /// the box and condition (i) checked directly. Exponential in the number
    /// of edges; intended for boxes with at most 8 edges.
    pub fn disturbs_unpruned(&self, sigma: &EdgeConfig) -> Result<bool> {
        let lattice = self.lattice;
        let slots = lattice.edge_slots();
        if slots.len() > 8 {
            return Err(Error::TooLarge("the unpruned search supports at most 8 edges".into()));
        }
        let n = sigma.n();
        let sigma_zero: Vec<usize> =
            (0..self.paths.len()).filter(|&i| eval_slots(sigma, &self.paths[i]) == 0).collect();
        let dsigma = curvature(sigma, lattice);
        let total = (n as u64).pow(slots.len() as u32);
        let mut hathat = EdgeConfig::zeros(lattice, n);
        for idx in 0..total {
            let mut rest = idx;
            for &s in &slots {
                hathat.set(s, (rest % n as u64) as u8);
                rest /= n as u64;
            }
            let dh = curvature(&hathat, lattice);
            if !leq(&dh, &dsigma, lattice)? {
                continue;
            }
            if !self.witness_for(sigma, &hathat, &sigma_zero) {
                continue;
            }
            let mut diff = sigma.clone();
            for &s in &slots {
                diff.set(s, reduce(sigma.get(s) as i64 - hathat.get(s) as i64, n));
            }
            if vortices_allowed(&curvature(&diff, lattice), &self.allowed, lattice, self.limits.max_plaquettes)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The path being tested.
    pub fn gamma(&self) -> &Chain {
        &self.gamma
    }
}

/// One-shot [`DisturbOracle::disturbs`].
pub fn disturbs_exact(sigma: &EdgeConfig, gamma: &Chain, lattice: &LatticeBox, limits: DisturbLimits) -> Result<bool> {
    DisturbOracle::new(gamma, lattice, limits)?.disturbs(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellcomplex::{Cell, OrientedCell};

    #[test]
    fn single_edge_excitation_is_a_minimal_vortex() {
        let lat = LatticeBox::centered(2);
        let e = crate::spinmodel::central_edge(&lat).unwrap();
        let mut s = EdgeConfig::zeros(&lat, 3);
        s.set(e, 2);
        let v = find_vortices(&s, &lat).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].form.support_len(), 6);
        assert_eq!(v[0].center, Some(MinimalCenter { slot: e, g: 2 }));
    }

    #[test]
    fn zero_config_does_not_disturb() {
        let lat = LatticeBox::unit_cube3();
        let gamma = Chain::from_cell(OrientedCell::positive(Cell::edge([0; 4], 0)));
        let z = EdgeConfig::zeros(&lat, 2);
        assert!(!disturbs_exact(&z, &gamma, &lat, DisturbLimits::default()).unwrap());
        assert_eq!(reduce_line(&z, &PathDecoration::new(&gamma, &lat).unwrap(), &lat), 0);
    }
}
