//! Closed-form constants, predictions and bounds.
//!
//! Activities are `phi_r(g) = exp(r (Re rho(g) - 1))` with `phi_inf` the
//! indicator of `g = 0`. All sums over cells use the doubled positive-cell
//! convention, so a single excited plaquette contributes `phi_beta(g)^2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::{re_rho, rho, MAX_N};

/// Number of plaquettes around an interior edge.
pub const COORDINATION: usize = 6;

/// Largest group order accepted by the brute-force minimization of `alpha5`.
pub const ALPHA5_MAX_N: u8 = 8;

fn check_n(n: u8) -> Result<()> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::InvalidParameter(format!("group order must lie in 2..={MAX_N}")));
    }
    Ok(())
}

/// `log phi_r(g)`, with `-inf` for `r = inf` and `g != 0`.
pub fn log_phi(r: f64, g: u8, n: u8) -> f64 {
    let g = g % n;
    if g == 0 {
        0.0
    } else if r.is_infinite() {
        f64::NEG_INFINITY
    } else {
        r * (re_rho(g, n) - 1.0)
    }
}

/// The activity `phi_r(g)`.
pub fn phi(r: f64, g: u8, n: u8) -> f64 {
    log_phi(r, g, n).exp()
}

fn weighted_mean(logw: &[f64], values: impl Fn(usize) -> Complex64) -> Complex64 {
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (i, &l) in logw.iter().enumerate() {
        let w = (l - top).exp();
        num += values(i) * w;
        den += w;
    }
    num / den
}

/// `theta_c(g_hat) = sum_g rho(g) phi_beta(g)^(2c) phi_kappa(g + g_hat)^2 /
/// sum_g phi_beta(g)^(2c) phi_kappa(g + g_hat)^2`, the conditional mean of
/// `rho` on an edge seeing `c` plaquettes.
pub fn theta_coordination(beta: f64, kappa: f64, g_hat: u8, n: u8, c: usize) -> Complex64 {
    let logw: Vec<f64> = (0..n)
        .map(|g| {
            let lb = log_phi(beta, g, n);
            let b = if c == 0 { 0.0 } else { 2.0 * c as f64 * lb };
            b + 2.0 * log_phi(kappa, ((g as u16 + g_hat as u16) % n as u16) as u8, n)
        })
        .collect();
    weighted_mean(&logw, |g| rho(g as u8, n))
}

/// `theta_{beta,kappa}(g_hat)` for an interior edge.
pub fn theta(beta: f64, kappa: f64, g_hat: u8, n: u8) -> Complex64 {
    theta_coordination(beta, kappa, g_hat, n, COORDINATION)
}

/// Closed form of `theta` for `Z_2`.
pub fn theta_z2(beta: f64, kappa: f64, g_hat: u8) -> f64 {
    let x = if g_hat.is_multiple_of(2) { (-24.0 * beta - 4.0 * kappa).exp() } else { (-24.0 * beta + 4.0 * kappa).exp() };
    if x.is_infinite() {
        return -1.0;
    }
    (1.0 - x) / (1.0 + x)
}

/// `alpha0(r) = sum_{g != 0} phi_r(g)^2`.
pub fn alpha0(r: f64, n: u8) -> f64 {
    (1..n).map(|g| phi(r, g, n).powi(2)).sum()
}

/// `alpha1(r) = max_{g != 0} phi_r(g)^2`.
pub fn alpha1(r: f64, n: u8) -> f64 {
    (1..n).map(|g| phi(r, g, n).powi(2)).fold(0.0, f64::max)
}

/// `alpha1(r) / alpha0(r)`, continued to `r = inf` by its limit.
pub fn alpha1_over_alpha0(r: f64, n: u8) -> f64 {
    let top = (1..n).map(|g| re_rho(g, n)).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = if r.is_infinite() {
        (1..n).filter(|&g| re_rho(g, n) >= top - 1e-12).count() as f64
    } else {
        (1..n).map(|g| (2.0 * r * (re_rho(g, n) - top)).exp()).sum()
    };
    1.0 / s
}

/// `alpha2 = alpha0(beta) alpha0(kappa)^(1/6)`.
pub fn alpha2(beta: f64, kappa: f64, n: u8) -> f64 {
    alpha0(beta, n) * alpha0(kappa, n).powf(1.0 / 6.0)
}

/// `alpha3 = |1 - theta(0)|`.
pub fn alpha3(beta: f64, kappa: f64, n: u8) -> f64 {
    (Complex64::new(1.0, 0.0) - theta(beta, kappa, 0, n)).norm()
}

/// `alpha4 = max_g |theta(g) - theta(0)|`.
pub fn alpha4(beta: f64, kappa: f64, n: u8) -> f64 {
    let t0 = theta(beta, kappa, 0, n);
    (0..n).map(|g| (theta(beta, kappa, g, n) - t0).norm()).fold(0.0, f64::max)
}

/// `alpha5 = min over (g_1..g_6) of 1 - |sum_g rho(g) w(g) / sum_g w(g)|`
/// with `w(g) = prod_k phi_beta(g + g_k)^2 phi_kappa(g)^2`, by exhaustive
/// search over `G^6`.
pub fn alpha5(beta: f64, kappa: f64, n: u8) -> Result<f64> {
    check_n(n)?;
    if n > ALPHA5_MAX_N {
        return Err(Error::TooLarge(format!("alpha5 brute force supports n <= {ALPHA5_MAX_N}")));
    }
    let lb: Vec<f64> = (0..n).map(|g| 2.0 * log_phi(beta, g, n)).collect();
    let lk: Vec<f64> = (0..n).map(|g| 2.0 * log_phi(kappa, g, n)).collect();
    let total = (n as usize).pow(COORDINATION as u32);
    let mut best = f64::INFINITY;
    let mut gk = [0usize; COORDINATION];
    let mut logw = vec![0.0; n as usize];
    for idx in 0..total {
        let mut rest = idx;
        for slot in gk.iter_mut() {
            *slot = rest % n as usize;
            rest /= n as usize;
        }
        for (g, w) in logw.iter_mut().enumerate() {
            *w = lk[g] + gk.iter().map(|&k| lb[(g + k) % n as usize]).sum::<f64>();
        }
        let m = weighted_mean(&logw, |g| rho(g as u8, n)).norm();
        best = best.min(1.0 - m);
    }
    Ok(best.max(0.0))
}

/// `alpha6 = max_g |1 - theta(g)|`.
pub fn alpha6(beta: f64, kappa: f64, n: u8) -> f64 {
    (0..n).map(|g| (Complex64::new(1.0, 0.0) - theta(beta, kappa, g, n)).norm()).fold(0.0, f64::max)
}

/// The `Z_2` closed forms of the alphas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphasZ2 {
    pub alpha0_beta: f64,
    pub alpha0_kappa: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
    pub alpha5: f64,
    pub alpha6: f64,
}

/// Closed-form alphas for `Z_2`.
pub fn alphas_z2(beta: f64, kappa: f64) -> AlphasZ2 {
    let a = (-24.0 * beta - 4.0 * kappa).exp();
    let b = (-24.0 * beta + 4.0 * kappa).exp();
    let a35 = 2.0 * a / (1.0 + a);
    let a4 = 2.0 * (-24.0 * beta).exp() * ((4.0 * kappa).exp() - (-4.0 * kappa).exp()) / ((1.0 + a) * (1.0 + b));
    AlphasZ2 {
        alpha0_beta: (-4.0 * beta).exp(),
        alpha0_kappa: (-4.0 * kappa).exp(),
        alpha2: (-4.0 * (beta + kappa / 6.0)).exp(),
        alpha3: a35,
        alpha4: a4,
        alpha5: a35,
        alpha6: 2.0 * b / (1.0 + b),
    }
}

/// Left-hand side `18^2 alpha0(kappa) (2 + alpha0(kappa))` of the
/// subcritical-cluster assumption.
pub fn assumption_a_lhs(kappa: f64, n: u8) -> f64 {
    let a = alpha0(kappa, n);
    324.0 * a * (2.0 + a)
}

/// Whether the subcritical-cluster assumption holds.
pub fn assumption_a(kappa: f64, n: u8) -> bool {
    assumption_a_lhs(kappa, n) < 1.0
}

/// The `kappa` at which the assumption becomes an equality, by bisection to
/// `1e-10`.
pub fn assumption_a_threshold(n: u8) -> Result<f64> {
    check_n(n)?;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while assumption_a_lhs(hi, n) >= 1.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if assumption_a_lhs(mid, n) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn positive_inverse(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 {
        Ok(1.0 / x)
    } else {
        Err(Error::Precondition(format!("{what}: the geometric series diverges")))
    }
}

/// `K = 18^-3 (1 - 18^2 (2 + alpha0) alpha0)^-1`.
pub fn k(kappa: f64, n: u8) -> Result<f64> {
    let a = alpha0(kappa, n);
    Ok(positive_inverse(1.0 - 324.0 * (2.0 + a) * a, "K")? / 5832.0)
}

/// `K' = 18^2 (2 + alpha0)`.
pub fn k_prime(kappa: f64, n: u8) -> f64 {
    324.0 * (2.0 + alpha0(kappa, n))
}

/// Ratio `18^2 (a1 + a2 + a1 a2)` of the two-model cluster expansion.
pub fn two_model_ratio(kappa1: f64, kappa2: f64, n: u8) -> f64 {
    let (a, b) = (alpha0(kappa1, n), alpha0(kappa2, n));
    324.0 * (a + b + a * b)
}

/// `K_hat = 18^-3 (1 - 18^2 (a1 + a2 + a1 a2))^-1`.
pub fn k_hat(kappa1: f64, kappa2: f64, n: u8) -> Result<f64> {
    Ok(positive_inverse(1.0 - two_model_ratio(kappa1, kappa2, n), "K hat")? / 5832.0)
}

/// `K'' = 4 (18^2 + 18 alpha0(kappa) (1 - 18^2 alpha0(kappa))^-1)
/// alpha1(beta)^6 / alpha0(beta)^6`.
pub fn k_dprime(beta: f64, kappa: f64, n: u8) -> Result<f64> {
    let a = alpha0(kappa, n);
    let inv = positive_inverse(1.0 - 324.0 * a, "K''")?;
    Ok(4.0 * (324.0 + 18.0 * a * inv) * alpha1_over_alpha0(beta, n).powi(6))
}

/// `K''' = (18^-3 + 18^-1) (1 - 18^2 alpha0(kappa))^-1`.
pub fn k_tprime(kappa: f64, n: u8) -> Result<f64> {
    let a = alpha0(kappa, n);
    Ok((1.0 / 5832.0 + 1.0 / 18.0) * positive_inverse(1.0 - 324.0 * a, "K'''")?)
}

/// `K_3 = 18^4 K'''`.
pub fn k3(kappa: f64, n: u8) -> Result<f64> {
    Ok(18f64.powi(4) * k_tprime(kappa, n)?)
}

/// `K_4 = K 18^10 (2^8 alpha0^-1 ((1 + alpha0/2)^8 - 1) + 2^8 K')`.
pub fn k4(kappa: f64, n: u8) -> Result<f64> {
    let a = alpha0(kappa, n);
    let series = if a > 0.0 { 256.0 * ((1.0 + a / 2.0).powi(8) - 1.0) / a } else { 256.0 * 4.0 };
    Ok(k(kappa, n)? * 18f64.powi(10) * (series + 256.0 * k_prime(kappa, n)))
}

/// `K_5 = 2 K 18^8 (18^2 + 1) (2 + alpha0)^7`.
pub fn k5(kappa: f64, n: u8) -> Result<f64> {
    let a = alpha0(kappa, n);
    Ok(k(kappa, n)? * 2.0 * 18f64.powi(8) * 325.0 * (2.0 + a).powi(7))
}

/// `K_5' = K (1 + ((2 + alpha0) alpha0)^-1)`.
pub fn k5_prime(kappa: f64, n: u8) -> Result<f64> {
    let a = alpha0(kappa, n);
    Ok(k(kappa, n)? * (1.0 + 1.0 / ((2.0 + a) * a)))
}

/// `K_6 = 18^13 (1 - 18^2 alpha0)^-1`.
pub fn k6(kappa: f64, n: u8) -> Result<f64> {
    let a = alpha0(kappa, n);
    Ok(18f64.powi(13) * positive_inverse(1.0 - 324.0 * a, "K_6")?)
}

/// `K_7 = 6 K''`.
pub fn k7(beta: f64, kappa: f64, n: u8) -> Result<f64> {
    Ok(6.0 * k_dprime(beta, kappa, n)?)
}

/// Every constant at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantSet {
    pub n: u8,
    #[serde(with = "crate::gibbs::beta_serde")]
    pub beta: f64,
    pub kappa: f64,
    pub alpha0_beta: f64,
    pub alpha0_kappa: f64,
    pub alpha1_beta: f64,
    pub alpha1_kappa: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
    pub alpha5: Option<f64>,
    pub alpha6: f64,
    pub k: Option<f64>,
    pub k_prime: f64,
    pub k_hat: Option<f64>,
    pub k_dprime: Option<f64>,
    pub k_tprime: Option<f64>,
    pub k3: Option<f64>,
    pub k4: Option<f64>,
    pub k5: Option<f64>,
    pub k5_prime: Option<f64>,
    pub k6: Option<f64>,
    pub k7: Option<f64>,
    pub assumption_a: bool,
}

/// Evaluates all constants. Constants whose defining series diverge (the
/// assumption fails) are `None`, as is `alpha5` for `n > 8`.
pub fn constants(beta: f64, kappa: f64, n: u8) -> Result<ConstantSet> {
    check_n(n)?;
    if beta.is_nan() || beta < 0.0 || !kappa.is_finite() || kappa < 0.0 {
        return Err(Error::InvalidParameter("beta and kappa must be nonnegative".into()));
    }
    Ok(ConstantSet {
        n,
        beta,
        kappa,
        alpha0_beta: alpha0(beta, n),
        alpha0_kappa: alpha0(kappa, n),
        alpha1_beta: alpha1(beta, n),
        alpha1_kappa: alpha1(kappa, n),
        alpha2: alpha2(beta, kappa, n),
        alpha3: alpha3(beta, kappa, n),
        alpha4: alpha4(beta, kappa, n),
        alpha5: alpha5(beta, kappa, n).ok(),
        alpha6: alpha6(beta, kappa, n),
        k: k(kappa, n).ok(),
        k_prime: k_prime(kappa, n),
        k_hat: k_hat(kappa, kappa, n).ok(),
        k_dprime: k_dprime(beta, kappa, n).ok(),
        k_tprime: k_tprime(kappa, n).ok(),
        k3: k3(kappa, n).ok(),
        k4: k4(kappa, n).ok(),
        k5: k5(kappa, n).ok(),
        k5_prime: k5_prime(kappa, n).ok(),
        k6: k6(kappa, n).ok(),
        k7: k7(beta, kappa, n).ok(),
        assumption_a: assumption_a(kappa, n),
    })
}

/// Bound on the probability that the Higgs/closed coupling cluster of an
/// edge has at least `2M` edges and its restriction has at least `2M'`
/// excited plaquettes. `dist_boundary` is `dist_1(e, boundary)`.
pub fn zlgt_cluster_bound(m: usize, m_prime: usize, dist_boundary: usize, beta: f64, kappa1: f64, kappa2: f64, n: u8) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let x = two_model_ratio(kappa1, kappa2, n);
    let kh = k_hat(kappa1, kappa2, n)?;
    let a1 = alpha1(beta, n);
    let tail = a1.powi(m_prime.max(6) as i32);
    let mut total = 0.0;
    if m_prime > 0 {
        if m == 1 {
            total += x * tail;
        }
        total += kh * x.powi(m.max(2) as i32) * tail;
    }
    if (1..=5).contains(&m_prime) {
        total += kh * x.powi(dist_boundary as i32) * a1;
    }
    if m_prime == 0 {
        total += kh * x.powi(m.max(8) as i32);
    }
    Ok(total)
}

/// `K (K' alpha0(kappa))^dist0`: the closed/closed coupling bound on
/// `e` joining the merged region of `E_0`.
pub fn zz_bound(dist0: usize, kappa: f64, n: u8) -> Result<f64> {
    Ok(k(kappa, n)? * (k_prime(kappa, n) * alpha0(kappa, n)).powi(dist0 as i32))
}

/// `K'' alpha2`: bound on a plaquette being excited.
pub fn plaquette_bound(beta: f64, kappa: f64, n: u8) -> Result<f64> {
    Ok(k_dprime(beta, kappa, n)? * alpha2(beta, kappa, n))
}

/// `K''' (18^2 alpha0(kappa))^M alpha1(beta)^M'`: bound on the cluster of
/// the edges around `e` having at least `2M` edges and `2M'` excited
/// plaquettes.
pub fn before_e3_bound(m: usize, m_prime: usize, beta: f64, kappa: f64, n: u8) -> Result<f64> {
    Ok(k_tprime(kappa, n)? * (324.0 * alpha0(kappa, n)).powi(m as i32) * alpha1(beta, n).powi(m_prime as i32))
}

/// Bound for the first superset event of a path.
pub fn e1_bound(open: bool, dist0_to_gamma0: &[usize], supp: usize, dist1_boundary: usize, beta: f64, kappa: f64, n: u8) -> Result<f64> {
    if !open {
        return Ok(0.0);
    }
    let (kk, kp, a0) = (k(kappa, n)?, k_prime(kappa, n), alpha0(kappa, n));
    let lead = kk * kp.powi(8) * a0.powi(8) * alpha1(beta, n).powi(6);
    let sum: f64 = dist0_to_gamma0.iter().map(|&d| (kp * a0).powi(d.saturating_sub(8) as i32)).sum();
    Ok(lead * sum + kk * supp as f64 * (kp * a0).powi(dist1_boundary as i32))
}

/// Bound for the second superset event of a path.
#[allow(clippy::too_many_arguments)]
pub fn e2_bound(
    open: bool,
    dist0_to_gamma0: &[usize],
    supp: usize,
    corners: usize,
    dist1_boundary: usize,
    beta: f64,
    kappa: f64,
    n: u8,
) -> Result<f64> {
    let (kk, kp, a0) = (k(kappa, n)?, k_prime(kappa, n), alpha0(kappa, n));
    let a1 = alpha1(beta, n);
    let mut total = 0.0;
    if open {
        let sum: f64 = dist0_to_gamma0.iter().map(|&d| (kp * a0).powi(d.saturating_sub(8) as i32)).sum();
        total += kk * kp.powi(8) * a0.powi(8) * a1.powi(6) * sum;
    }
    total += k_dprime(beta, kappa, n)? * corners as f64 * alpha2(beta, kappa, n).powi(6);
    total += kk * kp * kp * supp as f64 * a0 * a0 * a1.powi(7);
    total += 4.0 * kk * supp as f64 * (kp * a0).powi(dist1_boundary as i32);
    Ok(total)
}

/// `K_3 |supp gamma| alpha0(kappa)^2 alpha1(beta)^12`.
pub fn e3_bound(supp: usize, beta: f64, kappa: f64, n: u8) -> Result<f64> {
    Ok(k3(kappa, n)? * supp as f64 * alpha0(kappa, n).powi(2) * alpha1(beta, n).powi(12))
}

/// `K_4 alpha0^9 alpha1(beta)^6 + K (K' alpha0)^dist1`.
pub fn e4_bound(dist1_boundary: usize, beta: f64, kappa: f64, n: u8) -> Result<f64> {
    let a0 = alpha0(kappa, n);
    Ok(k4(kappa, n)? * a0.powi(9) * alpha1(beta, n).powi(6)
        + k(kappa, n)? * (k_prime(kappa, n) * a0).powi(dist1_boundary as i32))
}

/// `K_5 alpha1^6 alpha0^6 max(alpha0, alpha1^6) + K_5' (K' alpha0)^dist1`.
pub fn e5_bound(dist1_boundary: usize, beta: f64, kappa: f64, n: u8) -> Result<f64> {
    let (a0, a1) = (alpha0(kappa, n), alpha1(beta, n));
    Ok(k5(kappa, n)? * a1.powi(6) * a0.powi(6) * a0.max(a1.powi(6))
        + k5_prime(kappa, n)? * (k_prime(kappa, n) * a0).powi(dist1_boundary as i32))
}

/// `K_6 alpha0(kappa)^8`.
pub fn e6_bound(kappa: f64, n: u8) -> Result<f64> {
    Ok(k6(kappa, n)? * alpha0(kappa, n).powi(8))
}

/// `K_7 alpha2^6`.
pub fn e7_bound(beta: f64, kappa: f64, n: u8) -> Result<f64> {
    Ok(k7(beta, kappa, n)? * alpha2(beta, kappa, n).powi(6))
}

/// `2 K' (1 + K K' alpha0) |supp gamma| alpha0(kappa) alpha1(beta)^6`,
/// bounding the distance of a line expectation from its `beta = inf`
/// value.
pub fn short_line_bound(supp: usize, beta: f64, kappa: f64, n: u8) -> Result<f64> {
    let (kk, kp, a0) = (k(kappa, n)?, k_prime(kappa, n), alpha0(kappa, n));
    Ok(2.0 * kp * (1.0 + kk * kp * a0) * supp as f64 * a0 * alpha1(beta, n).powi(6))
}

/// `exp(-|supp(gamma - gamma_c)| alpha5)`.
pub fn upper_bound(non_corner: usize, beta: f64, kappa: f64, n: u8) -> Result<f64> {
    Ok((-(non_corner as f64) * alpha5(beta, kappa, n)?).exp())
}

/// `Theta'(gamma) = exp(-2 |supp gamma| e^{-24 beta - 4 kappa}
/// (1 + (e^{8 kappa} - 1) <L_e>))` for `Z_2`.
pub fn theta_prime(supp: usize, beta: f64, kappa: f64, edge_corr: f64, n: u8) -> Result<f64> {
    if n != 2 {
        return Err(Error::InvalidParameter("Theta' is defined for Z_2 only".into()));
    }
    if !(-1.0..=1.0).contains(&edge_corr) {
        return Err(Error::InvalidParameter("edge correlation must lie in [-1, 1]".into()));
    }
    let rate = (-24.0 * beta - 4.0 * kappa).exp() * (1.0 + ((8.0 * kappa).exp() - 1.0) * edge_corr);
    Ok((-2.0 * supp as f64 * rate).exp())
}

/// The main error envelope with its metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// Constant `2 18^3 + |supp|^{1/2} e^{-4 kappa} (18^2 (2 + e^{-4 kappa}))^{min(l1, l2)}`.
    pub constant: f64,
    /// `constant (e^{-4(beta + kappa/6)} + |supp|^{-1/2})^{1/4}`.
    pub value: f64,
    /// The `o_kappa(1)` term of the constant is not included.
    pub excludes_o_kappa: bool,
    /// The envelope exceeds 2 and so says nothing about a quantity in `[-1, 1]`.
    pub vacuous: bool,
    pub note: String,
}

/// The `Z_2` error envelope for a rectangular line of sides `l1, l2`.
pub fn main_bound(supp: usize, l1: usize, l2: usize, beta: f64, kappa: f64) -> Result<Envelope> {
    if l1 < 8 || l2 < 8 {
        return Err(Error::Precondition("rectangle sides must be at least 8".into()));
    }
    if supp < 24 {
        return Err(Error::Precondition("the line must have at least 24 edges".into()));
    }
    if !assumption_a(kappa, 2) {
        return Err(Error::Precondition("kappa violates the subcritical-cluster assumption".into()));
    }
    if 6.0 * beta <= kappa {
        return Err(Error::Precondition("requires 6 beta > kappa".into()));
    }
    let s = supp as f64;
    let e = (-4.0 * kappa).exp();
    let constant = 2.0 * 18f64.powi(3) + s.sqrt() * e * (324.0 * (2.0 + e)).powi(l1.min(l2) as i32);
    let value = constant * ((-4.0 * (beta + kappa / 6.0)).exp() + s.powf(-0.5)).powf(0.25);
    Ok(Envelope {
        constant,
        value,
        excludes_o_kappa: true,
        vacuous: value > 2.0,
        note: "envelope excludes o_kappa(1)".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn theta_matches_z2_closed_form() {
        for &b in &[0.0, 0.2, 0.7] {
            for &k in &[0.0, 0.5, 1.7] {
                for g in 0..2 {
                    assert_abs_diff_eq!(theta(b, k, g, 2).re, theta_z2(b, k, g), epsilon = 1e-12);
                    assert_abs_diff_eq!(theta(b, k, g, 2).im, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn theta_vanishes_at_zero_couplings() {
        for n in 2..7 {
            assert_abs_diff_eq!(theta(0.0, 0.0, 0, n).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn alpha5_brute_force_matches_closed_form() {
        let z = alphas_z2(0.5, 1.0);
        assert_abs_diff_eq!(alpha5(0.5, 1.0, 2).unwrap(), z.alpha5, epsilon = 1e-12);
        assert!(alpha5(0.1, 0.1, 9).is_err());
    }

    #[test]
    fn threshold_for_z2() {
        let t = assumption_a_threshold(2).unwrap();
        let root = (-((1.0f64 + 1.0 / 324.0).sqrt() - 1.0).ln()) / 4.0;
        assert!((t - root).abs() < 1e-9, "{t}");
        assert!(assumption_a(t + 1e-6, 2));
        assert!(!assumption_a(t - 1e-6, 2));
    }

    #[test]
    fn theta_prime_pinned_value() {
        let v = theta_prime(32, 1.0, 1.7, 0.0, 2).unwrap();
        assert_abs_diff_eq!(v, (-64.0 * (-30.8f64).exp()).exp(), epsilon = 1e-15);
        assert!(theta_prime(32, 1.0, 1.7, 0.0, 3).is_err());
    }

    #[test]
    fn envelope_is_flagged() {
        let e = main_bound(32, 8, 8, 1.0, 1.7).unwrap();
        assert!(e.excludes_o_kappa);
        assert!(e.vacuous);
        assert!(main_bound(4, 8, 8, 1.0, 1.7).is_err());
    }

    #[test]
    fn infinite_beta_ratio_limit() {
        assert_eq!(alpha1_over_alpha0(f64::INFINITY, 2), 1.0);
        assert_eq!(alpha1_over_alpha0(f64::INFINITY, 5), 0.5);
        assert_abs_diff_eq!(alpha1_over_alpha0(0.3, 2), 1.0, epsilon = 1e-15);
    }
}
