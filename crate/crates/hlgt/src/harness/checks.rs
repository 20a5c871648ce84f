//! The thirteen acceptance criteria. Each check returns a
//! [`CriterionResult`] with a one-line detail; exhaustive checks run on the
//! tiny boxes and Monte Carlo checks use the built-in experiment budgets.

use std::collections::HashMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cellcomplex::{boundary, boundary_chain, Cell, Chain, LatticeBox, OrientedCell};
use crate::clusters::{dist0, e_set};
use crate::couplings::{merge_lgt_z, merge_zz, CouplingSample};
use crate::error::{Error, Result};
use crate::forms::{d, evaluate, EdgeConfig, Form};
use crate::gibbs::{full_model_expectation, full_wilson_line, rho, wilson_line, ExactMeasure, Neumaier, Params};
use crate::harness::config::{ConfigFile, ExperimentConfig, PathSpec};
use crate::harness::experiments::{
    event_bounds, event_names, event_values, line_estimates, path_context, run_cluster_events, run_main_theorem,
    run_short_line, run_upper_bound, spin_estimates,
};
use crate::mc::{self, combined_stderr, init_rng};
use crate::spinmodel::h_kappa_exact;
use crate::theory;
use crate::vortices::{gamma_prime, reduce_line, DisturbLimits, DisturbOracle, PathDecoration};

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}: {} ({:.1} s)", self.id, self.name, self.detail, self.seconds)
    }
}

/// Which criteria to run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AcceptanceOptions {
    /// Criterion ids to run; all when empty.
    pub only: Vec<u8>,
}

/// Names of the criteria, indexed by id minus one.
pub const CRITERIA: [&str; 13] = [
    "exterior calculus exactness",
    "antiderivative correspondence",
    "unitary-gauge identity",
    "coupling marginals",
    "E-set stability",
    "resampling identity",
    "line reduction",
    "upper bound",
    "Z_2 closed forms",
    "spin duality",
    "main comparison at desk scale",
    "cluster-event bounds",
    "short-line bound",
];

type Check = fn() -> Result<(bool, String)>;

const CHECKS: [Check; 13] = [
    check_exterior_calculus,
    check_antiderivative,
    check_unitary_gauge,
    check_coupling_marginals,
    check_eset_stability,
    check_resampling,
    check_line_reduction,
    check_upper_bound,
    check_z2_closed_forms,
    check_spin_duality,
    check_main_comparison,
    check_cluster_events,
    check_short_line,
];

/// Runs one criterion by id; errors count as failures.
pub fn run_criterion(id: u8) -> Result<CriterionResult> {
    let idx = (id as usize)
        .checked_sub(1)
        .filter(|&i| i < CHECKS.len())
        .ok_or_else(|| Error::InvalidParameter(format!("no criterion {id}")))?;
    mc::init_thread_pool();
    let t = Instant::now();
    let (passed, detail) = match CHECKS[idx]() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Ok(CriterionResult { id, name: CRITERIA[idx].into(), passed, detail, seconds: t.elapsed().as_secs_f64() })
}

/// Runs the selected criteria in order.
pub fn run_acceptance(opts: &AcceptanceOptions) -> Result<Vec<CriterionResult>> {
    (1..=CHECKS.len() as u8).filter(|id| opts.only.is_empty() || opts.only.contains(id)).map(run_criterion).collect()
}

fn edge(base: [i32; 4], axis: usize) -> Chain {
    Chain::from_cell(OrientedCell::positive(Cell::edge(base, axis)))
}

fn straight(len: i32) -> Chain {
    let mut g = Chain::zero(1);
    for i in 0..len {
        g.add_cell(Cell::edge([i, 0, 0, 0], 0), 1);
    }
    g
}

/// The 7-edge box `[0, 2] x [0, 1]`.
fn seven_edge_box() -> Result<LatticeBox> {
    LatticeBox::new([0; 4], [2, 1, 0, 0])
}

/// Every edge configuration of a box with values in `{0, 1}` per slot when
/// `n = 2`, in general every assignment.
fn all_configs(lattice: &LatticeBox, n: u8) -> Vec<EdgeConfig> {
    let slots = lattice.edge_slots();
    let total = (n as usize).pow(slots.len() as u32);
    (0..total)
        .map(|mut m| {
            let mut s = EdgeConfig::zeros(lattice, n);
            for &e in &slots {
                s.set(e, (m % n as usize) as u8);
                m /= n as usize;
            }
            s
        })
        .collect()
}

fn check_exterior_calculus() -> Result<(bool, String)> {
    let b1 = LatticeBox::centered(1);
    let mut failures = 0usize;
    let mut checked = 0usize;
    for k in 2..=4 {
        for c in b1.enumerate_cells(k) {
            checked += 1;
            if !boundary_chain(&boundary(OrientedCell::positive(c))?)?.is_empty() {
                failures += 1;
            }
        }
    }
    for k in 0..4 {
        for c in b1.enumerate_cells(k) {
            let oc = OrientedCell::positive(c);
            for (up, a) in b1.coboundary(oc)?.iter() {
                checked += 1;
                if boundary(OrientedCell::positive(*up))?.coeff(oc) != a {
                    failures += 1;
                }
            }
        }
        for up in b1.enumerate_cells(k + 1) {
            for (f, a) in boundary(OrientedCell::positive(up))?.iter() {
                checked += 1;
                if b1.coboundary(OrientedCell::positive(*f))?.coeff_of(&up) != a {
                    failures += 1;
                }
            }
        }
    }
    let b2 = LatticeBox::centered(2);
    let cells: Vec<Vec<Cell>> = (0..=4).map(|k| b2.enumerate_cells(k)).collect();
    let mut rng = init_rng(0x0dec, 0);
    let mut random = 0usize;
    for n in [2u8, 3, 5] {
        for _ in 0..1000 {
            let k = rng.gen_range(0..3);
            let values: Vec<(Cell, u8)> =
                (0..12).map(|_| (cells[k][rng.gen_range(0..cells[k].len())], rng.gen_range(1..n))).collect();
            let w = Form::from_values(k, n, values)?;
            let dw = d(&w, &b2)?;
            if !d(&dw, &b2)?.is_zero() {
                failures += 1;
            }
            let mut q = Chain::zero(k + 1);
            for _ in 0..6 {
                q.add_cell(cells[k + 1][rng.gen_range(0..cells[k + 1].len())], rng.gen_range(-3..=3));
            }
            if evaluate(&dw, &q)? != evaluate(&w, &boundary_chain(&q)?)? {
                failures += 1;
            }
            random += 1;
        }
    }
    Ok((failures == 0, format!("{checked} exhaustive and {random} random instances, {failures} failures")))
}

fn check_antiderivative() -> Result<(bool, String)> {
    let lat = LatticeBox::unit_cube3();
    let n = 2u8;
    let nv = lat.num_vertices();
    let mut images: HashMap<Vec<u8>, usize> = HashMap::new();
    for m in 0..(1usize << nv) {
        let eta: Vec<u8> = (0..nv).map(|i| (m >> i & 1) as u8).collect();
        *images.entry(EdgeConfig::coboundary_of(&lat, n, &eta).slots().to_vec()).or_default() += 1;
    }
    let closed: Vec<EdgeConfig> = all_configs(&lat, n).into_iter().filter(|s| s.is_closed(&lat)).collect();
    let onto = closed.iter().all(|s| images.get(s.slots()) == Some(&(n as usize)));
    let ok = onto && images.len() == closed.len() && images.len() == 128;
    Ok((ok, format!("{} zero-forms onto {} closed 1-forms of {}, each hit {n} times: {onto}", 1 << nv, images.len(), closed.len())))
}

fn check_unitary_gauge() -> Result<(bool, String)> {
    let lat = LatticeBox::unit_cube3();
    let mut gamma = edge([0; 4], 0);
    gamma.add_cell(Cell::edge([1, 0, 0, 0], 1), 1);
    let mut worst = 0.0f64;
    for beta in [0.2, 0.7, 1.5] {
        for kappa in [0.3, 1.0, 1.8] {
            let p = Params { n: 2, half_width: 0, beta, kappa };
            let full = full_model_expectation(
                |s, phi| full_wilson_line(s, phi, &lat, &gamma).unwrap_or(Complex64::new(f64::NAN, 0.0)),
                &lat,
                &p,
            )?;
            let unitary = ExactMeasure::new(&lat, &p)?
                .expectation_complex(|s| wilson_line(s, &lat, &gamma).unwrap_or(Complex64::new(f64::NAN, 0.0)));
            worst = worst.max((full - unitary).norm());
        }
    }
    Ok((worst <= 1e-12, format!("3x3 grid on the 12-edge box, max |difference| = {worst:.2e}")))
}

const COUPLING_POINTS: [(f64, f64); 4] = [(0.3, 0.5), (0.7, 1.0), (1.0, 1.8), (0.1, 0.2)];

/// Exhaustive pushforward error of the merged configuration against its
/// target law.
fn pushforward_error(
    lat: &LatticeBox,
    first: &ExactMeasure,
    second: &ExactMeasure,
    merge: impl Fn(&EdgeConfig, &EdgeConfig) -> Result<CouplingSample>,
) -> Result<f64> {
    let mut push: HashMap<Vec<u8>, f64> = HashMap::new();
    for (s, ps) in first.configs.iter().zip(&first.probs) {
        for (t, pt) in second.configs.iter().zip(&second.probs) {
            *push.entry(merge(s, t)?.sigma.slots().to_vec()).or_default() += ps * pt;
        }
    }
    let mut err = 0.0f64;
    for (s, ps) in first.configs.iter().zip(&first.probs) {
        err = err.max((push.remove(s.slots()).unwrap_or(0.0) - ps).abs());
    }
    let stray: f64 = push.values().sum();
    let _ = lat;
    Ok(err.max(stray))
}

fn check_coupling_marginals() -> Result<(bool, String)> {
    let lat = LatticeBox::unit_cube3();
    let e0 = vec![lat.edge_slot(&Cell::edge([0; 4], 0)).expect("edge in box")];
    let (mut lgt, mut zz) = (0.0f64, 0.0f64);
    for (beta, kappa) in COUPLING_POINTS {
        let mu = ExactMeasure::new(&lat, &Params { n: 2, half_width: 0, beta, kappa })?;
        let nu = ExactMeasure::new(&lat, &Params { n: 2, half_width: 0, beta: f64::INFINITY, kappa })?;
        lgt = lgt.max(pushforward_error(&lat, &mu, &nu, |s, t| merge_lgt_z(&lat, s, t))?);
        zz = zz.max(pushforward_error(&lat, &nu, &nu, |s, t| merge_zz(&lat, s, t, &e0))?);
    }
    let ok = lgt <= 1e-12 && zz <= 1e-12;
    Ok((ok, format!("4 points on the 12-edge box, max error Higgs/closed {lgt:.2e}, closed/closed {zz:.2e}")))
}

fn stable(sample: &CouplingSample, lat: &LatticeBox, e0: &[usize]) -> bool {
    let again = e_set(lat, e0, &sample.sigma, &sample.sigma_prime);
    let agree = lat.edge_slots().into_iter().all(|e| {
        if sample.eset.contains(e) {
            sample.sigma.get(e) == sample.parent.get(e)
        } else {
            sample.sigma.get(e) == sample.sigma_prime.get(e)
        }
    });
    again == sample.eset && agree
}

fn check_eset_stability() -> Result<(bool, String)> {
    let lat = LatticeBox::unit_cube3();
    let e0 = vec![lat.edge_slot(&Cell::edge([0; 4], 0)).expect("edge in box")];
    let all = all_configs(&lat, 2);
    let closed: Vec<&EdgeConfig> = all.iter().filter(|s| s.is_closed(&lat)).collect();
    let (mut pairs, mut bad) = (0usize, 0usize);
    for s in &all {
        for t in &closed {
            pairs += 1;
            if !stable(&merge_lgt_z(&lat, s, t)?, &lat, &[]) {
                bad += 1;
            }
        }
    }
    for s in &closed {
        for t in &closed {
            pairs += 1;
            if !stable(&merge_zz(&lat, s, t, &e0)?, &lat, &e0) {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("{pairs} parent pairs on the 12-edge box, {bad} violations")))
}

/// Both sides of the resampling identity by enumeration.
pub fn resampling_sides(lat: &LatticeBox, gamma: &Chain, p: &Params) -> Result<(Complex64, Complex64)> {
    let deco = PathDecoration::new(gamma, lat)?;
    let coord: Vec<usize> = deco.edges.iter().map(|&(s, _)| lat.edge_plaquettes(s).len()).collect();
    let m = ExactMeasure::new(lat, p)?;
    let mut sums = [Neumaier::default(); 4];
    for (s, pr) in m.configs.iter().zip(&m.probs) {
        let l = rho(reduce_line(s, &deco, lat), p.n) * *pr;
        let excluded = gamma_prime(s, &deco, lat);
        let mut prod = Complex64::new(1.0, 0.0);
        for (i, &(slot, _)) in deco.edges.iter().enumerate() {
            if deco.corner[i] || excluded.contains(&slot) {
                continue;
            }
            let g_hat = crate::forms::reduce(deco.sigma_e(s, i) as i64 - deco.d_sigma_pe(s, lat, i) as i64, p.n);
            prod *= theory::theta_coordination(p.beta, p.kappa, g_hat, p.n, coord[i]);
        }
        let r = prod * *pr;
        for (acc, v) in sums.iter_mut().zip([l.re, l.im, r.re, r.im]) {
            acc.add(v);
        }
    }
    let v: Vec<f64> = sums.iter().map(Neumaier::value).collect();
    Ok((Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])))
}

fn check_resampling() -> Result<(bool, String)> {
    let cube = LatticeBox::unit_cube3();
    let small = seven_edge_box()?;
    let cases = [
        (&cube, edge([0; 4], 0), Params { n: 2, half_width: 0, beta: 0.3, kappa: 0.5 }),
        (&cube, edge([0; 4], 0), Params { n: 2, half_width: 0, beta: 1.0, kappa: 1.8 }),
        (&small, straight(2), Params { n: 2, half_width: 0, beta: 0.7, kappa: 1.0 }),
        (&cube, edge([0; 4], 0), Params { n: 3, half_width: 0, beta: 0.5, kappa: 0.8 }),
    ];
    let mut worst = 0.0f64;
    for (lat, gamma, p) in &cases {
        let (l, r) = resampling_sides(lat, gamma, p)?;
        worst = worst.max((l - r).norm());
    }
    Ok((worst <= 1e-12, format!("4 points on the tiny boxes (n = 2, 2, 2, 3), max |LHS - RHS| = {worst:.2e}")))
}

/// Counts `(non-disturbing, violations)` of the line reduction over every
/// `Z_2` configuration of `lat`.
pub fn line_reduction_violations(lat: &LatticeBox, gamma: &Chain) -> Result<(usize, usize)> {
    let oracle = DisturbOracle::new(gamma, lat, DisturbLimits::default())?;
    let deco = PathDecoration::new(gamma, lat)?;
    let (mut quiet, mut bad) = (0, 0);
    for s in all_configs(lat, 2) {
        if !oracle.disturbs(&s)? {
            quiet += 1;
            if reduce_line(&s, &deco, lat) != s.evaluate(lat, gamma)? {
                bad += 1;
            }
        }
    }
    Ok((quiet, bad))
}

fn check_line_reduction() -> Result<(bool, String)> {
    let (q1, b1) = line_reduction_violations(&LatticeBox::unit_cube3(), &edge([0; 4], 0))?;
    let (q2, b2) = line_reduction_violations(&seven_edge_box()?, &straight(2))?;
    Ok((
        b1 + b2 == 0,
        format!("12-edge box: {b1} of {q1} non-disturbing configurations violate; 7-edge box: {b2} of {q2}"),
    ))
}

fn builtin(id: &str) -> Result<ExperimentConfig> {
    ConfigFile::builtin()
        .experiments
        .remove(id)
        .ok_or_else(|| Error::InvalidParameter(format!("no built-in experiment {id}")))
}

const TINY_GRID: [(f64, f64); 9] =
    [(0.1, 0.3), (0.1, 1.0), (0.1, 1.8), (0.5, 0.3), (0.5, 1.0), (0.5, 1.8), (1.0, 0.3), (1.0, 1.0), (1.0, 1.8)];

/// Grid satisfying the subcritical-cluster assumption.
const BOUND_GRID: [(f64, f64); 9] =
    [(0.1, 1.7), (0.1, 1.8), (0.1, 2.5), (0.5, 1.7), (0.5, 1.8), (0.5, 2.5), (1.0, 1.7), (1.0, 1.8), (1.0, 2.5)];

fn tiny_paths() -> Result<Vec<(LatticeBox, Chain)>> {
    Ok(vec![(LatticeBox::unit_cube3(), edge([0; 4], 0)), (seven_edge_box()?, straight(2))])
}

fn check_upper_bound() -> Result<(bool, String)> {
    let mut bad = 0;
    let mut worst = f64::NEG_INFINITY;
    for (lat, gamma) in tiny_paths()? {
        let deco = PathDecoration::new(&gamma, &lat)?;
        for (beta, kappa) in TINY_GRID {
            let p = Params { n: 2, half_width: 0, beta, kappa };
            let v = ExactMeasure::new(&lat, &p)?.expectation_complex(|s| wilson_line(s, &lat, &gamma).unwrap_or_default()).norm();
            let b = theory::upper_bound(deco.non_corner_len(), beta, kappa, 2)?;
            worst = worst.max(v - b);
            if v > b {
                bad += 1;
            }
        }
    }
    let report = run_upper_bound("upper_bound", &builtin("upper_bound")?)?;
    let desk = report.rows.iter().find(|r| r.quantity == "abs_line_expectation");
    let (desk_ok, desk_text) = match desk {
        Some(r) => (
            r.pass == Some(true),
            format!("|<L>| = {:.4} +- {:.4} vs bound {:.4}", r.estimate.unwrap_or(f64::NAN), r.stderr.unwrap_or(f64::NAN), r.bound.unwrap_or(f64::NAN)),
        ),
        None => (false, "missing row".into()),
    };
    Ok((
        bad == 0 && desk_ok,
        format!("exact: {bad} of 18 grid cases exceed the bound (max excess {worst:.3e}); desk N=10: {desk_text}"),
    ))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn check_z2_closed_forms() -> Result<(bool, String)> {
    let mut bad = 0;
    let mut points = 0;
    for beta in [0.0, 0.1, 0.4, 1.0, 2.0] {
        for kappa in [0.0, 0.3, 0.9, 1.7, 3.0] {
            points += 1;
            let z = theory::alphas_z2(beta, kappa);
            let mut ok = close(theory::alpha0(beta, 2), z.alpha0_beta)
                && close(theory::alpha0(kappa, 2), z.alpha0_kappa)
                && close(theory::alpha2(beta, kappa, 2), z.alpha2)
                && close(theory::alpha3(beta, kappa, 2), z.alpha3)
                && close(theory::alpha4(beta, kappa, 2), z.alpha4)
                && close(theory::alpha5(beta, kappa, 2)?, z.alpha5)
                && close(theory::alpha6(beta, kappa, 2), z.alpha6);
            for g in 0..2 {
                let t = theory::theta(beta, kappa, g, 2);
                ok &= close(t.re, theory::theta_z2(beta, kappa, g)) && t.im.abs() <= 1e-12;
            }
            if !ok {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("{points} grid points, {bad} mismatches")))
}

fn check_spin_duality() -> Result<(bool, String)> {
    let lat = LatticeBox::unit_cube3();
    let mut gamma = edge([0; 4], 0);
    gamma.add_cell(Cell::edge([1, 0, 0, 0], 1), 1);
    gamma.add_cell(Cell::edge([1, 1, 0, 0], 2), 1);
    let mut worst = 0.0f64;
    for n in [2u8, 3] {
        for kappa in [0.3, 1.0, 1.8] {
            let p = Params { n, half_width: 0, beta: f64::INFINITY, kappa };
            let gauge = ExactMeasure::new(&lat, &p)?.expectation_complex(|s| wilson_line(s, &lat, &gamma).unwrap_or_default());
            worst = worst.max((gauge - h_kappa_exact(&gamma, kappa, n, &lat)?).norm());
        }
    }
    let mut cfg = builtin("short_line")?;
    cfg.kappa = 1.0;
    cfg.path = PathSpec::Straight { len: 4 };
    let lattice = cfg.lattice()?;
    let line = cfg.path.chain(&lattice)?;
    let p = Params { beta: f64::INFINITY, ..cfg.params()? };
    let g = line_estimates(std::slice::from_ref(&line), &lattice, &p, &cfg.mc)?;
    let mut spin_mc = cfg.mc.clone();
    spin_mc.seed = spin_mc.seed.wrapping_add(101);
    let h = spin_estimates(std::slice::from_ref(&line), &lattice, 2, cfg.kappa, &spin_mc)?;
    let err = combined_stderr(&[g[0].stderr, h[0].stderr]);
    let diff = (g[0].mean - h[0].mean).abs();
    let mc_ok = diff <= 3.0 * err;
    Ok((
        worst <= 1e-12 && mc_ok,
        format!(
            "exact max |difference| {worst:.2e} (n = 2, 3); N=6 kappa=1: gauge {:.6} vs spin {:.6}, |diff| {diff:.2e} <= 3 x {err:.2e}: {mc_ok}",
            g[0].mean, h[0].mean
        ),
    ))
}

fn check_main_comparison() -> Result<(bool, String)> {
    let report = run_main_theorem("main_theorem", &builtin("main_theorem")?)?;
    let get = |q: &str| report.rows.iter().find(|r| r.quantity == q);
    let (l, pred, diff) = (get("line_expectation"), get("prediction"), get("abs_difference"));
    let detail = match (l, pred, diff) {
        (Some(l), Some(p), Some(d)) => format!(
            "N=12 open 8x8: <L> = {:.4} +- {:.4}, Theta' H = {:.4} +- {:.4}, |diff| {:.4} <= {:.4}",
            l.estimate.unwrap_or(f64::NAN),
            l.stderr.unwrap_or(f64::NAN),
            p.estimate.unwrap_or(f64::NAN),
            p.stderr.unwrap_or(f64::NAN),
            d.estimate.unwrap_or(f64::NAN),
            d.bound.unwrap_or(f64::NAN)
        ),
        _ => "missing rows".into(),
    };
    let ok = diff.and_then(|d| d.pass) == Some(true);
    Ok((ok, detail))
}

/// Exact indicator probabilities of both couplings on a tiny box, with the
/// matching bounds, as `(name, probability, bound)`. The closed/closed
/// coupling uses the edge set `e0`; path edges inside `e0` are skipped since
/// they always lie in the E-set.
pub fn exact_cluster_events(lat: &LatticeBox, gamma: &Chain, e0: &[usize], p: &Params) -> Result<Vec<(String, f64, f64)>> {
    let ctx = path_context(gamma, lat)?;
    let mu = ExactMeasure::new(lat, p)?;
    let nu = ExactMeasure::new(lat, &Params { beta: f64::INFINITY, ..*p })?;
    let names = event_names(ctx.len());
    let mut acc = vec![0.0; names.len()];
    for (s, ps) in mu.configs.iter().zip(&mu.probs) {
        for (t, pt) in nu.configs.iter().zip(&nu.probs) {
            let (_, v) = event_values(&merge_lgt_z(lat, s, t)?, &ctx, lat)?;
            for (a, x) in acc.iter_mut().zip(v) {
                *a += ps * pt * x;
            }
        }
    }
    let bounds = event_bounds(gamma, lat, p)?;
    let mut out: Vec<(String, f64, f64)> =
        names.into_iter().zip(acc).zip(bounds).map(|((n, a), b)| (n, a, b)).collect();
    let slots: Vec<usize> = ctx.deco.edges.iter().map(|e| e.0).collect();
    let mut zz = vec![0.0; slots.len()];
    for (s, ps) in nu.configs.iter().zip(&nu.probs) {
        for (t, pt) in nu.configs.iter().zip(&nu.probs) {
            let m = merge_zz(lat, s, t, e0)?;
            for (a, &e) in zz.iter_mut().zip(&slots) {
                if m.eset.contains(e) {
                    *a += ps * pt;
                }
            }
        }
    }
    for (i, (&e, a)) in slots.iter().zip(zz).enumerate() {
        if e0.contains(&e) {
            continue;
        }
        let d0 = dist0(lat, e, e0).map(|d| d.value).unwrap_or(usize::MAX);
        out.push((format!("zz[{i}]"), a, theory::zz_bound(d0, p.kappa, p.n)?));
    }
    Ok(out)
}

fn check_cluster_events() -> Result<(bool, String)> {
    let cfg = builtin("cluster_events")?;
    let p = Params { n: 2, half_width: 0, ..cfg.params()? };
    let cube = LatticeBox::unit_cube3();
    let e0 = [cube.edge_slot(&Cell::edge([0, 1, 1, 0], 0)).expect("edge in box")];
    let exact = exact_cluster_events(&cube, &edge([0; 4], 0), &e0, &p)?;
    let exact_bad: Vec<String> = exact
        .iter()
        .filter(|(_, a, b)| a > b)
        .map(|(n, a, b)| format!("{n} {a:.3e} > {b:.3e}"))
        .collect();
    let (report, _) = run_cluster_events("cluster_events", &cfg)?;
    let desk_bad: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.pass == Some(false))
        .map(|r| format!("{} {:.3e} > {:.3e}", r.quantity, r.estimate.unwrap_or(f64::NAN), r.bound.unwrap_or(f64::NAN)))
        .collect();
    let detail = format!(
        "12-edge box exact: {} of {} exceed [{}]; N=8 Monte Carlo: {} of {} exceed [{}]",
        exact_bad.len(),
        exact.len(),
        exact_bad.join("; "),
        desk_bad.len(),
        report.rows.len(),
        desk_bad.join("; ")
    );
    Ok((exact_bad.is_empty() && desk_bad.is_empty(), detail))
}

fn check_short_line() -> Result<(bool, String)> {
    let mut bad = 0;
    let mut cases = 0;
    let mut worst = (0.0f64, 0.0f64);
    for (lat, gamma) in tiny_paths()? {
        for (beta, kappa) in BOUND_GRID {
            cases += 1;
            let p = Params { n: 2, half_width: 0, beta, kappa };
            let l = |q: &Params| -> Result<Complex64> {
                Ok(ExactMeasure::new(&lat, q)?.expectation_complex(|s| wilson_line(s, &lat, &gamma).unwrap_or_default()))
            };
            let diff = (l(&p)? - l(&Params { beta: f64::INFINITY, ..p })?).norm();
            let bound = theory::short_line_bound(gamma.len(), beta, kappa, 2)?;
            if diff > bound {
                bad += 1;
                if diff / bound > worst.0 / worst.1.max(f64::MIN_POSITIVE) {
                    worst = (diff, bound);
                }
            }
        }
    }
    let report = run_short_line("short_line", &builtin("short_line")?)?;
    let desk = report.rows.iter().find(|r| r.quantity == "abs_difference");
    let (desk_ok, desk_text) = match desk {
        Some(r) => (
            r.pass == Some(true),
            format!("|diff| = {:.3e} +- {:.3e} vs bound {:.3e}", r.estimate.unwrap_or(f64::NAN), r.stderr.unwrap_or(f64::NAN), r.bound.unwrap_or(f64::NAN)),
        ),
        None => (false, "missing row".into()),
    };
    Ok((bad == 0 && desk_ok, format!(
            "exact: {bad} of {cases} grid cases exceed the bound (worst {:.3e} > {:.3e}); desk N=6: {desk_text}",
            worst.0, worst.1
        )))
}

/// Outcome of one randomized property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
}

fn sparse_config(lattice: &LatticeBox, n: u8, edges: usize, rng: &mut impl Rng) -> EdgeConfig {
    let slots = lattice.edge_slots();
    let mut s = EdgeConfig::zeros(lattice, n);
    for _ in 0..edges {
        s.set(slots[rng.gen_range(0..slots.len())], rng.gen_range(1..n));
    }
    s
}

fn random_closed(lattice: &LatticeBox, n: u8, rng: &mut impl Rng) -> EdgeConfig {
    let eta: Vec<u8> = (0..lattice.num_vertices()).map(|_| if rng.gen_bool(0.05) { rng.gen_range(0..n) } else { 0 }).collect();
    EdgeConfig::coboundary_of(lattice, n, &eta)
}

/// Randomized invariants on `B_2`: `dd = 0`, Stokes, vortex pieces of
/// `d sigma`, restriction to clusters and E-set stability of both couplings.
pub fn run_property_suite(seed: u64, cases: usize) -> Result<Vec<PropertyResult>> {
    let lat = LatticeBox::centered(2);
    let cells: Vec<Vec<Cell>> = (0..=4).map(|k| lat.enumerate_cells(k)).collect();
    let mut rng = init_rng(seed, 0);
    let mut tally = |name: &str, f: &mut dyn FnMut(&mut rand_chacha::ChaCha8Rng) -> Result<bool>| -> Result<PropertyResult> {
        let mut failures = 0;
        for _ in 0..cases {
            if !f(&mut rng)? {
                failures += 1;
            }
        }
        Ok(PropertyResult { name: name.into(), cases, failures })
    };
    let mut out = Vec::new();
    out.push(tally("dd = 0 and Stokes", &mut |rng| {
        let n = [2u8, 3, 5][rng.gen_range(0..3)];
        let k = rng.gen_range(0..3);
        let values: Vec<(Cell, u8)> = (0..8).map(|_| (cells[k][rng.gen_range(0..cells[k].len())], rng.gen_range(1..n))).collect();
        let w = Form::from_values(k, n, values)?;
        let dw = d(&w, &lat)?;
        let mut q = Chain::zero(k + 1);
        for _ in 0..4 {
            q.add_cell(cells[k + 1][rng.gen_range(0..cells[k + 1].len())], rng.gen_range(-2..=2));
        }
        Ok(d(&dw, &lat)?.is_zero() && evaluate(&dw, &q)? == evaluate(&w, &boundary_chain(&q)?)?)
    })?);
    out.push(tally("vortices decompose d sigma", &mut |rng| {
        let s = sparse_config(&lat, 2, 3, rng);
        let whole = crate::vortices::curvature(&s, &lat);
        let mut sum = Form::zero(2, 2);
        for v in crate::vortices::find_vortices(&s, &lat)? {
            if !crate::forms::leq(&v.form, &whole, &lat)? || !d(&v.form, &lat)?.is_zero() {
                return Ok(false);
            }
            sum = sum.add(&v.form)?;
        }
        Ok(sum == whole)
    })?);
    out.push(tally("cluster restrictions are below the configuration", &mut |rng| {
        let s = sparse_config(&lat, 3, 6, rng);
        let t = random_closed(&lat, 3, rng);
        let slots = lat.edge_slots();
        let e = slots[rng.gen_range(0..slots.len())];
        crate::clusters::restriction_properties_check(&lat, &s, &t, &[e])
    })?);
    out.push(tally("E-set stability of both couplings", &mut |rng| {
        let s = sparse_config(&lat, 2, 6, rng);
        let a = random_closed(&lat, 2, rng);
        let b = random_closed(&lat, 2, rng);
        let slots = lat.edge_slots();
        let e0 = [slots[rng.gen_range(0..slots.len())]];
        Ok(stable(&merge_lgt_z(&lat, &s, &a)?, &lat, &[]) && stable(&merge_zz(&lat, &a, &b, &e0)?, &lat, &e0))
    })?);
    Ok(out)
}
