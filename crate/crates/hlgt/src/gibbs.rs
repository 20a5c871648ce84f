//! The fixed-length abelian Higgs model in unitary gauge.
//!
//! All weights sum `Re rho` over positive cells and double the result, which
//! equals the sum of `rho` over all oriented cells. `beta = infinity` is
//! represented by [`f64::INFINITY`] and restricts the measure to closed
//! configurations; it is sampled through the vertex spin model.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cellcomplex::{Chain, LatticeBox};
use crate::error::{Error, Result};
pub use crate::forms::EdgeConfig;
use crate::forms::{reduce, Form};
use crate::mc::{self, batch_means, Estimate, McConfig};
use crate::spinmodel::{self, SpinChain, SpinConfig, SpinUpdate};

/// Model parameters: group order `n`, box half-width `N`, `beta` (possibly
/// infinite) and `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: u8,
    pub half_width: u32,
    #[serde(with = "beta_serde")]
    pub beta: f64,
    pub kappa: f64,
}

impl Params {
    /// Validated parameters.
    pub fn new(n: u8, half_width: u32, beta: f64, kappa: f64) -> Result<Self> {
        let p = Self { n, half_width, beta, kappa };
        p.validate()?;
        Ok(p)
    }

    /// Checks ranges.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > MAX_N {
            return Err(Error::InvalidParameter(format!("group order must lie in 2..={MAX_N}")));
        }
        if self.half_width == 0 {
            return Err(Error::InvalidParameter("box half-width must be positive".into()));
        }
        if self.beta.is_nan() || self.beta < 0.0 {
            return Err(Error::InvalidParameter("beta must be nonnegative".into()));
        }
        if !self.kappa.is_finite() || self.kappa < 0.0 {
            return Err(Error::InvalidParameter("kappa must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// The box `B_N`.
    pub fn lattice(&self) -> LatticeBox {
        LatticeBox::centered(self.half_width)
    }

    /// Whether `beta = infinity`.
    pub fn beta_infinite(&self) -> bool {
        self.beta.is_infinite()
    }
}

/// Serializes `beta`, writing infinity as the string `"inf"`.
pub mod beta_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => super::parse_beta(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Parses a `beta` value, accepting `inf`, `infinity` and `INFINITY`.
pub fn parse_beta(text: &str) -> Result<f64> {
    match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| Error::Parse(format!("bad beta value {text:?}"))),
    }
}

/// `Re rho(g) = cos(2 pi g / n)`.
#[inline]
pub fn re_rho(g: u8, n: u8) -> f64 {
    (2.0 * PI * g as f64 / n as f64).cos()
}

/// `rho(g) = exp(2 pi i g / n)`.
pub fn rho(g: u8, n: u8) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * g as f64 / n as f64)
}

fn re_table(n: u8) -> Vec<f64> {
    (0..n).map(|g| re_rho(g, n)).collect()
}

/// `log` of the unnormalized weight:
/// `2 kappa sum_e Re rho(sigma(e)) + 2 beta sum_p Re rho(d sigma(p))`.
pub fn log_weight(sigma: &EdgeConfig, lattice: &LatticeBox, p: &Params) -> Result<f64> {
    if p.beta_infinite() {
        return Err(Error::InvalidParameter("log weight is undefined at beta = infinity".into()));
    }
    let re = re_table(p.n);
    let edge: f64 = lattice.edge_slots().into_iter().map(|e| re[sigma.get(e) as usize]).sum();
    let plaq: f64 =
        lattice.plaquette_slots().into_iter().map(|q| re[sigma.plaquette_value(lattice, q) as usize]).sum();
    Ok(2.0 * p.kappa * edge + 2.0 * p.beta * plaq)
}

/// Largest supported group order.
pub const MAX_N: u8 = 32;

/// Exact conditional distribution of the value on edge `slot` given all
/// other edges.
pub fn heatbath_conditional(sigma: &EdgeConfig, lattice: &LatticeBox, p: &Params, slot: usize) -> Vec<f64> {
    let re = re_table(p.n);
    let mut w = [0.0; MAX_N as usize];
    let w = &mut w[..p.n as usize];
    conditional_logw(sigma, lattice, p, slot, &re, w);
    normalize_exp(w);
    w.to_vec()
}

fn conditional_logw(sigma: &EdgeConfig, lattice: &LatticeBox, p: &Params, slot: usize, re: &[f64], out: &mut [f64]) {
    let n = p.n as i32;
    let cur = sigma.get(slot) as i32;
    let plaquettes = lattice.edge_plaquettes(slot);
    let mut rest = [(0i32, 0i32); 6];
    for (i, &(q, c)) in plaquettes.iter().enumerate() {
        let dv = sigma.plaquette_value(lattice, q) as i32;
        rest[i] = (c as i32, (dv - c as i32 * cur).rem_euclid(n));
    }
    for g in 0..n {
        let mut plaq = 0.0;
        for &(c, r) in &rest[..plaquettes.len()] {
            plaq += re[(c * g + r).rem_euclid(n) as usize];
        }
        out[g as usize] = 2.0 * p.kappa * re[g as usize] + 2.0 * p.beta * plaq;
    }
}

fn normalize_exp(w: &mut [f64]) {
    let m = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for x in w.iter_mut() {
        *x = (*x - m).exp();
        total += *x;
    }
    for x in w.iter_mut() {
        *x /= total;
    }
}

/// Single-site update rule for the gauge field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum GaugeUpdate {
    #[default]
    HeatBath,
    Metropolis,
}

/// One heat-bath sweep over all positive edges in canonical order, one
/// uniform draw per edge.
pub fn heatbath_sweep(sigma: &mut EdgeConfig, lattice: &LatticeBox, edges: &[usize], p: &Params, rng: &mut impl Rng) {
    let re = re_table(p.n);
    let mut buf = [0.0; MAX_N as usize];
    let w = &mut buf[..p.n as usize];
    for &slot in edges {
        conditional_logw(sigma, lattice, p, slot, &re, w);
        normalize_exp(w);
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = p.n - 1;
        for g in 0..p.n {
            acc += w[g as usize];
            if u < acc {
                pick = g;
                break;
            }
        }
        sigma.set(slot, pick);
    }
}

/// One Metropolis sweep (uniform proposal among the other `n - 1` values),
/// two uniform draws per edge.
pub fn metropolis_sweep(sigma: &mut EdgeConfig, lattice: &LatticeBox, edges: &[usize], p: &Params, rng: &mut impl Rng) {
    let re = re_table(p.n);
    let mut buf = [0.0; MAX_N as usize];
    let w = &mut buf[..p.n as usize];
    for &slot in edges {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        let cur = sigma.get(slot);
        let step = 1 + ((u1 * (p.n - 1) as f64) as u8).min(p.n - 2);
        let prop = (cur + step) % p.n;
        conditional_logw(sigma, lattice, p, slot, &re, w);
        let delta = w[prop as usize] - w[cur as usize];
        if delta >= 0.0 || u2 < delta.exp() {
            sigma.set(slot, prop);
        }
    }
}

/// Initial state of a chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Start {
    #[default]
    Cold,
    Hot,
}

/// A single Markov chain for the gauge field at finite `beta`.
#[derive(Clone, Debug)]
pub struct GaugeChain {
    lattice: LatticeBox,
    params: Params,
    edges: Vec<usize>,
    sigma: EdgeConfig,
    update: GaugeUpdate,
    seed: u64,
    chain: u64,
    sweeps_done: u64,
}

impl GaugeChain {
    /// A chain on `lattice` started from `start`.
    pub fn new(lattice: LatticeBox, params: Params, seed: u64, chain: u64, start: Start, update: GaugeUpdate) -> Result<Self> {
        params.validate()?;
        if params.beta_infinite() {
            return Err(Error::InvalidParameter("gauge chains require finite beta".into()));
        }
        let edges = lattice.edge_slots();
        let mut sigma = EdgeConfig::zeros(&lattice, params.n);
        if start == Start::Hot {
            let mut rng = mc::init_rng(seed, chain);
            for &e in &edges {
                sigma.set(e, rng.gen_range(0..params.n));
            }
        }
        Ok(Self { lattice, params, edges, sigma, update, seed, chain, sweeps_done: 0 })
    }

    /// Performs one sweep.
    pub fn sweep(&mut self) {
        let mut rng = mc::sweep_rng(self.seed, self.chain, self.sweeps_done);
        match self.update {
            GaugeUpdate::HeatBath => heatbath_sweep(&mut self.sigma, &self.lattice, &self.edges, &self.params, &mut rng),
            GaugeUpdate::Metropolis => {
                metropolis_sweep(&mut self.sigma, &self.lattice, &self.edges, &self.params, &mut rng)
            }
        }
        self.sweeps_done += 1;
    }

    /// Current configuration.
    pub fn sigma(&self) -> &EdgeConfig {
        &self.sigma
    }

    /// The box.
    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    /// Sweeps performed so far.
    pub fn sweeps_done(&self) -> u64 {
        self.sweeps_done
    }

    /// Replaces the state, e.g. from a checkpoint.
    pub fn restore(&mut self, sigma: EdgeConfig, sweeps_done: u64) {
        self.sigma = sigma;
        self.sweeps_done = sweeps_done;
    }

    /// Checkpoint of the current state.
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint::gauge(&self.lattice, &self.params, self.seed, self.sweeps_done, &self.sigma)
    }
}

/// A closed configuration `sigma = d eta` with `eta` drawn from `sweeps`
/// sweeps of the spin model.
pub fn sample_closed(lattice: &LatticeBox, p: &Params, seed: u64, chain: u64, sweeps: usize) -> Result<EdgeConfig> {
    if !p.beta_infinite() {
        return Err(Error::InvalidParameter("sample_closed requires beta = infinity".into()));
    }
    let mut sc = SpinChain::new(lattice.clone(), p.n, p.kappa, seed, chain, Start::Hot, SpinUpdate::HeatBath)?;
    for _ in 0..sweeps {
        sc.sweep();
    }
    Ok(sc.closed_config())
}

/// `rho(sigma(gamma))`.
pub fn wilson_line(sigma: &EdgeConfig, lattice: &LatticeBox, gamma: &Chain) -> Result<Complex64> {
    Ok(rho(sigma.evaluate(lattice, gamma)?, sigma.n()))
}

/// Full-model Wilson line `rho(sigma(gamma) - phi(boundary gamma))`.
pub fn full_wilson_line(sigma: &EdgeConfig, phi: &[u8], lattice: &LatticeBox, gamma: &Chain) -> Result<Complex64> {
    let n = sigma.n();
    let mut acc = sigma.evaluate(lattice, gamma)? as i64;
    for (v, a) in crate::cellcomplex::boundary_chain(gamma)?.iter() {
        let idx = lattice.vertex_index(&v.base).ok_or_else(|| Error::InvalidCell(format!("vertex {v} outside the box")))?;
        acc -= a * phi[idx] as i64;
    }
    Ok(rho(reduce(acc, n), n))
}

/// Runs `mc.chains` chains and estimates `<obs>`. At `beta = infinity` the
/// chains run the spin model and `obs` sees `d eta`.
pub fn estimate<F>(obs: F, lattice: &LatticeBox, p: &Params, mc: &McConfig, update: GaugeUpdate) -> Result<Estimate>
where
    F: Fn(&EdgeConfig) -> f64 + Sync,
{
    let mut v = estimate_many(|s| vec![obs(s)], 1, lattice, p, mc, update)?;
    Ok(v.remove(0))
}

/// Estimates `count` observables from the same chains; `obs` returns one
/// value per observable.
pub fn estimate_many<F>(
    obs: F,
    count: usize,
    lattice: &LatticeBox,
    p: &Params,
    mc: &McConfig,
    update: GaugeUpdate,
) -> Result<Vec<Estimate>>
where
    F: Fn(&EdgeConfig) -> Vec<f64> + Sync,
{
    mc.validate()?;
    p.validate()?;
    let series: Vec<Result<Vec<Vec<f64>>>> = mc::run_chains(mc.chains, |c| {
        let mut out = vec![Vec::with_capacity(mc.recorded_per_chain()); count];
        let mut record = |values: Vec<f64>| -> Result<()> {
            if values.len() != count {
                return Err(Error::Internal("observable returned the wrong number of values".into()));
            }
            for (o, v) in out.iter_mut().zip(values) {
                o.push(v);
            }
            Ok(())
        };
        if p.beta_infinite() {
            let mut sc = SpinChain::new(lattice.clone(), p.n, p.kappa, mc.seed, c as u64, Start::Cold, SpinUpdate::HeatBath)?;
            for s in 0..mc.sweeps {
                sc.sweep();
                if mc.records(s) {
                    record(obs(&sc.closed_config()))?;
                }
            }
        } else {
            let mut gc = GaugeChain::new(lattice.clone(), *p, mc.seed, c as u64, Start::Cold, update)?;
            for s in 0..mc.sweeps {
                gc.sweep();
                if mc.records(s) {
                    record(obs(gc.sigma()))?;
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

/// Largest configuration count accepted by the enumeration oracles.
pub const ENUMERATION_LIMIT: f64 = (1u64 << 26) as f64;

fn check_enumerable(base: u8, count: usize) -> Result<()> {
    let total = (base as f64).powi(count as i32);
    if total > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(format!("{base}^{count} configurations exceed 2^26")));
    }
    Ok(())
}

/// Visits every edge configuration of the box with its weight relative to
/// the zero configuration (finite `beta` only).
pub fn for_each_config(lattice: &LatticeBox, p: &Params, mut visit: impl FnMut(&EdgeConfig, f64)) -> Result<()> {
    if p.beta_infinite() {
        return Err(Error::InvalidParameter("use for_each_closed_config at beta = infinity".into()));
    }
    let edges = lattice.edge_slots();
    check_enumerable(p.n, edges.len())?;
    let re = re_table(p.n);
    let mut sigma = EdgeConfig::zeros(lattice, p.n);
    let mut logw = 0.0f64;
    loop {
        visit(&sigma, logw.exp());
        let mut i = 0;
        loop {
            if i == edges.len() {
                return Ok(());
            }
            let e = edges[i];
            let old = sigma.get(e);
            let new = (old + 1) % p.n;
            let before: f64 = lattice.edge_plaquettes(e).iter().map(|&(q, _)| re[sigma.plaquette_value(lattice, q) as usize]).sum();
            sigma.set(e, new);
            let after: f64 = lattice.edge_plaquettes(e).iter().map(|&(q, _)| re[sigma.plaquette_value(lattice, q) as usize]).sum();
            logw += 2.0 * p.kappa * (re[new as usize] - re[old as usize]) + 2.0 * p.beta * (after - before);
            if new != 0 {
                break;
            }
            i += 1;
        }
    }
}

/// Visits every vertex configuration with weight
/// `exp(2 kappa sum_e (Re rho(d eta(e)) - 1))`.
pub fn for_each_spin_config(lattice: &LatticeBox, n: u8, kappa: f64, mut visit: impl FnMut(&[u8], f64)) -> Result<()> {
    let nv = lattice.num_vertices();
    check_enumerable(n, nv)?;
    let re = re_table(n);
    let edges = lattice.edge_slots();
    let mut eta = vec![0u8; nv];
    loop {
        let mut s = 0.0;
        for &e in &edges {
            let (a, b) = lattice.edge_endpoints(e);
            s += re[reduce(eta[b] as i64 - eta[a] as i64, n) as usize] - 1.0;
        }
        visit(&eta, (2.0 * kappa * s).exp());
        let mut i = 0;
        loop {
            if i == nv {
                return Ok(());
            }
            eta[i] = (eta[i] + 1) % n;
            if eta[i] != 0 {
                break;
            }
            i += 1;
        }
    }
}

/// An explicitly stored probability measure on edge configurations of a
/// tiny box: either `mu_{beta,kappa}` or, at `beta = infinity`, the measure
/// on closed configurations.
#[derive(Clone, Debug)]
pub struct ExactMeasure {
    pub configs: Vec<EdgeConfig>,
    pub probs: Vec<f64>,
}

impl ExactMeasure {
    /// Enumerates the measure for `p` on `lattice`.
    pub fn new(lattice: &LatticeBox, p: &Params) -> Result<Self> {
        let mut configs = Vec::new();
        let mut weights = Vec::new();
        if p.beta_infinite() {
            let mut acc: HashMap<EdgeConfig, f64> = HashMap::new();
            for_each_spin_config(lattice, p.n, p.kappa, |eta, w| {
                *acc.entry(EdgeConfig::coboundary_of(lattice, p.n, eta)).or_insert(0.0) += w;
            })?;
            let mut entries: Vec<(EdgeConfig, f64)> = acc.into_iter().collect();
            entries.sort_by(|a, b| a.0.slots().cmp(b.0.slots()));
            for (c, w) in entries {
                configs.push(c);
                weights.push(w);
            }
        } else {
            for_each_config(lattice, p, |s, w| {
                configs.push(s.clone());
                weights.push(w);
            })?;
        }
        let z = neumaier_sum(weights.iter().copied());
        let probs = weights.into_iter().map(|w| w / z).collect();
        Ok(Self { configs, probs })
    }

    /// `E[f]`.
    pub fn expectation(&self, f: impl Fn(&EdgeConfig) -> f64) -> f64 {
        neumaier_sum(self.configs.iter().zip(&self.probs).map(|(c, p)| p * f(c)))
    }

    /// Complex `E[f]`.
    pub fn expectation_complex(&self, f: impl Fn(&EdgeConfig) -> Complex64) -> Complex64 {
        let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
        for (c, p) in self.configs.iter().zip(&self.probs) {
            let v = f(c) * *p;
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value())
    }
}

/// Exact `<obs>` by enumeration over all configurations (closed ones when
/// `beta = infinity`) of `lattice`.
pub fn exact_expectation(obs: impl Fn(&EdgeConfig) -> f64, lattice: &LatticeBox, p: &Params) -> Result<f64> {
    p.validate()?;
    let mut num = 0.0;
    let mut den = 0.0;
    if p.beta_infinite() {
        for_each_spin_config(lattice, p.n, p.kappa, |eta, w| {
            num += w * obs(&EdgeConfig::coboundary_of(lattice, p.n, eta));
            den += w;
        })?;
    } else {
        for_each_config(lattice, p, |s, w| {
            num += w * obs(s);
            den += w;
        })?;
    }
    Ok(num / den)
}

/// Exact full-model expectation of `f(sigma, phi)` over the pair
/// `(sigma, phi)` with weight
/// `exp(2 beta sum_p Re rho(d sigma) + 2 kappa sum_e Re rho(sigma(e) - d phi(e)))`.
pub fn full_model_expectation(
    f: impl Fn(&EdgeConfig, &[u8]) -> Complex64,
    lattice: &LatticeBox,
    p: &Params,
) -> Result<Complex64> {
    if p.beta_infinite() {
        return Err(Error::InvalidParameter("full model enumeration requires finite beta".into()));
    }
    let nv = lattice.num_vertices();
    let edges = lattice.edge_slots();
    check_enumerable(p.n, nv + edges.len())?;
    let re = re_table(p.n);
    let (mut num_re, mut num_im, mut den) = (Neumaier::default(), Neumaier::default(), Neumaier::default());
    let unit = Params { beta: p.beta, kappa: 0.0, ..*p };
    for_each_config(lattice, &unit, |sigma, plaq_w| {
        let mut phi = vec![0u8; nv];
        let (mut inner_num, mut inner_den) = (Complex64::new(0.0, 0.0), 0.0);
        loop {
            let mut s = 0.0;
            for &e in &edges {
                let (a, b) = lattice.edge_endpoints(e);
                let v = reduce(sigma.get(e) as i64 - phi[b] as i64 + phi[a] as i64, p.n);
                s += re[v as usize] - 1.0;
            }
            let w = (2.0 * p.kappa * s).exp();
            inner_num += f(sigma, &phi) * w;
            inner_den += w;
            let mut i = 0;
            let done = loop {
                if i == nv {
                    break true;
                }
                phi[i] = (phi[i] + 1) % p.n;
                if phi[i] != 0 {
                    break false;
                }
                i += 1;
            };
            if done {
                break;
            }
        }
        num_re.add(plaq_w * inner_num.re);
        num_im.add(plaq_w * inner_num.im);
        den.add(plaq_w * inner_den);
    })?;
    Ok(Complex64::new(num_re.value(), num_im.value()) / den.value())
}

/// Compensated sum of `values`.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    /// Adds `x`.
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// The compensated total.
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Gauge transform `sigma(e) -> -eta(x) + sigma(e) + eta(y)`,
/// `phi -> phi + eta`.
pub fn gauge_transform(sigma: &Form, phi: &Form, eta: &Form, lattice: &LatticeBox) -> Result<(Form, Form)> {
    if sigma.dim() != 1 || phi.dim() != 0 || eta.dim() != 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: sigma.dim() });
    }
    let s2 = sigma.add(&crate::forms::d(eta, lattice)?)?;
    let p2 = phi.add(eta)?;
    Ok((s2, p2))
}

/// Binary checkpoint of a chain: little-endian header followed by one byte
/// per site in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub magic: [u8; 4],
    pub n: u32,
    pub half_width: u32,
    pub beta: f64,
    pub kappa: f64,
    pub seed: u64,
    pub sweeps: u64,
    pub sites: Vec<u8>,
}

/// Current checkpoint format version.
pub const CHECKPOINT_VERSION: u32 = 1;

impl Checkpoint {
    /// Gauge-field checkpoint (magic `HLGT`), one byte per positive edge.
    pub fn gauge(lattice: &LatticeBox, p: &Params, seed: u64, sweeps: u64, sigma: &EdgeConfig) -> Self {
        let sites = lattice.edge_slots().into_iter().map(|e| sigma.get(e)).collect();
        Self {
            magic: *b"HLGT",
            n: p.n as u32,
            half_width: p.half_width,
            beta: p.beta,
            kappa: p.kappa,
            seed,
            sweeps,
            sites,
        }
    }

    /// Restores the gauge field stored in a `HLGT` checkpoint.
    pub fn to_edge_config(&self, lattice: &LatticeBox) -> Result<EdgeConfig> {
        if &self.magic != b"HLGT" {
            return Err(Error::Parse("not a gauge checkpoint".into()));
        }
        let edges = lattice.edge_slots();
        if edges.len() != self.sites.len() {
            return Err(Error::DimensionMismatch { expected: edges.len(), found: self.sites.len() });
        }
        let mut sigma = EdgeConfig::zeros(lattice, self.n as u8);
        for (e, v) in edges.into_iter().zip(&self.sites) {
            sigma.set(e, *v);
        }
        Ok(sigma)
    }

    /// Spin checkpoint (magic `HSPN`), one byte per vertex.
    pub fn spins(p: &Params, seed: u64, sweeps: u64, eta: &SpinConfig) -> Self {
        Self {
            magic: *b"HSPN",
            n: p.n as u32,
            half_width: p.half_width,
            beta: f64::INFINITY,
            kappa: p.kappa,
            seed,
            sweeps,
            sites: eta.values().to_vec(),
        }
    }

    /// Writes the checkpoint. Infinite `beta` is stored as NaN.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(&self.magic)?;
        w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        w.write_all(&self.n.to_le_bytes())?;
        w.write_all(&self.half_width.to_le_bytes())?;
        let beta = if self.beta.is_infinite() { f64::NAN } else { self.beta };
        w.write_all(&beta.to_le_bytes())?;
        w.write_all(&self.kappa.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.sweeps.to_le_bytes())?;
        w.write_all(&self.sites)?;
        Ok(())
    }

    /// Reads a checkpoint written by [`Checkpoint::write_to`].
    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        fn take<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
            let mut b = [0u8; K];
            r.read_exact(&mut b)?;
            Ok(b)
        }
        let magic = take::<4>(r)?;
        if &magic != b"HLGT" && &magic != b"HSPN" {
            return Err(Error::Parse("unknown checkpoint magic".into()));
        }
        let version = u32::from_le_bytes(take::<4>(r)?);
        if version != CHECKPOINT_VERSION {
            return Err(Error::Parse(format!("unsupported checkpoint version {version}")));
        }
        let n = u32::from_le_bytes(take::<4>(r)?);
        let half_width = u32::from_le_bytes(take::<4>(r)?);
        let beta = f64::from_le_bytes(take::<8>(r)?);
        let beta = if beta.is_nan() { f64::INFINITY } else { beta };
        let kappa = f64::from_le_bytes(take::<8>(r)?);
        let seed = u64::from_le_bytes(take::<8>(r)?);
        let sweeps = u64::from_le_bytes(take::<8>(r)?);
        let mut sites = Vec::new();
        r.read_to_end(&mut sites)?;
        Ok(Self { magic, n, half_width, beta, kappa, seed, sweeps, sites })
    }
}

/// Exact spin-model expectation used by the duality checks.
pub fn exact_spin_expectation(obs: impl Fn(&[u8]) -> f64, lattice: &LatticeBox, n: u8, kappa: f64) -> Result<f64> {
    spinmodel::exact_expectation(obs, lattice, n, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellcomplex::{boundary, Cell, OrientedCell};

    #[test]
    fn zero_config_log_weight() {
        let lat = LatticeBox::centered(1);
        let p = Params::new(2, 1, 0.3, 0.7).unwrap();
        let w = log_weight(&EdgeConfig::zeros(&lat, 2), &lat, &p).unwrap();
        let expect = 2.0 * 0.7 * 216.0 + 2.0 * 0.3 * 216.0;
        assert!((w - expect).abs() < 1e-9);
    }

    #[test]
    fn single_flip_changes_weight_by_4kappa_12beta() {
        let lat = LatticeBox::centered(2);
        let p = Params::new(2, 2, 0.3, 0.7).unwrap();
        let mut s = EdgeConfig::zeros(&lat, 2);
        let w0 = log_weight(&s, &lat, &p).unwrap();
        s.set(lat.edge_slot(&Cell::edge([0; 4], 2)).unwrap(), 1);
        let w1 = log_weight(&s, &lat, &p).unwrap();
        assert!((w1 - w0 - (-4.0 * 0.7 - 24.0 * 0.3)).abs() < 1e-9);
    }

    #[test]
    fn infinite_beta_rejected_for_log_weight() {
        let lat = LatticeBox::unit_cube3();
        let p = Params::new(2, 1, f64::INFINITY, 0.7).unwrap();
        assert!(log_weight(&EdgeConfig::zeros(&lat, 2), &lat, &p).is_err());
    }

    #[test]
    fn single_plaquette_expectation_is_tanh() {
        let lat = LatticeBox::unit_square();
        for beta in [0.1, 0.5, 1.3] {
            let p = Params::new(2, 1, beta, 0.0).unwrap();
            let q = lat.plaquette_slots()[0];
            let v = exact_expectation(|s| re_rho(s.plaquette_value(&lat, q), 2), &lat, &p).unwrap();
            assert!((v - (2.0 * beta).tanh()).abs() < 1e-12);
        }
    }

    #[test]
    fn wilson_line_examples() {
        let lat = LatticeBox::unit_cube3();
        let p = OrientedCell::positive(Cell::plaquette([0; 4], 0, 1));
        let gamma = boundary(p).unwrap();
        let mut s = EdgeConfig::zeros(&lat, 2);
        assert!((wilson_line(&s, &lat, &gamma).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        s.set(lat.edge_slot(&Cell::edge([0; 4], 0)).unwrap(), 1);
        assert!((wilson_line(&s, &lat, &gamma).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn checkpoint_roundtrip_is_bit_exact() {
        let lat = LatticeBox::centered(1);
        let p = Params::new(3, 1, 0.4, 0.2).unwrap();
        let mut chain = GaugeChain::new(lat.clone(), p, 11, 0, Start::Hot, GaugeUpdate::HeatBath).unwrap();
        chain.sweep();
        let cp = chain.checkpoint();
        let mut bytes = Vec::new();
        cp.write_to(&mut bytes).unwrap();
        let back = Checkpoint::read_from(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, cp);
        assert_eq!(&bytes[..4], b"HLGT");
        assert_eq!(back.to_edge_config(&lat).unwrap(), *chain.sigma());
    }

    #[test]
    fn beta_parsing() {
        assert!(parse_beta("INFINITY").unwrap().is_infinite());
        assert_eq!(parse_beta("0.5").unwrap(), 0.5);
        let p = Params::new(2, 3, f64::INFINITY, 1.0).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let back: Params = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
