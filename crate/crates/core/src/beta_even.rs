//! Even-β two-point function through its β-dimensional integral form,
//! Selberg and Morris constants, the evenness-in-N factor, the `1/N²`
//! identity, the moment recurrence and the leading small-s coefficients.
//!
//! The β-dimensional integrals are symmetric in the variables, so they are
//! evaluated on the ordered region `0 < u₁ < … < u_β < 1` with
//! `u = (1 − cos φ)/2` and collapsed coordinates
//! `φ_β = π t_β, φ_k = φ_{k+1} t_k`. On that region the Vandermonde factor
//! has no kinks; the endpoint powers of every `t_k` go into Gauss–Jacobi
//! weights.

use crate::error::{invalid, Error, Result};
use crate::numerics::{gauss_jacobi, ChebGrid, Q};
use num_complex::Complex64;
use num_traits::{One, Zero};
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest point count kept in the rule cache.
const CACHE_POINTS: usize = 1 << 21;

fn default_nodes(beta: u32) -> usize {
    match beta {
        2 => 24,
        4 => 24,
        _ => 12,
    }
}

fn check_beta(beta: u32) -> Result<()> {
    if matches!(beta, 2 | 4 | 6) {
        Ok(())
    } else {
        invalid(format!("beta must be 2, 4 or 6, got {beta}"))
    }
}

fn ln_factorial(k: u32) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// `∫_{[0,1]^n} ∏ u^a (1−u)^b ∏_{j<k} |u_k − u_j|^{2c} du`, Selberg's product.
pub fn selberg(n: usize, a: f64, b: f64, c: f64) -> Result<f64> {
    Ok(ln_selberg(n, a, b, c)?.exp())
}

pub fn ln_selberg(n: usize, a: f64, b: f64, c: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let mut bound = 1.0 / nf;
    if n > 1 {
        bound = bound.min((a + 1.0) / (nf - 1.0)).min((b + 1.0) / (nf - 1.0));
    }
    if !(a > -1.0 && b > -1.0 && c > -bound) {
        return invalid(format!("Selberg integral diverges at n={n}, (a, b, c) = ({a}, {b}, {c})"));
    }
    let mut s = 0.0;
    for j in 0..n {
        let jc = j as f64 * c;
        s += ln_gamma(a + 1.0 + jc) + ln_gamma(b + 1.0 + jc) + ln_gamma(1.0 + (j as f64 + 1.0) * c)
            - ln_gamma(a + b + 2.0 + (nf + j as f64 - 1.0) * c)
            - ln_gamma(1.0 + c);
    }
    Ok(s)
}

fn gamma_arg(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return invalid(format!("Gamma argument {x} is not positive"));
    }
    Ok(ln_gamma(x))
}

/// Morris integral `M_N(a, b, λ)` as a Gamma-function product.
pub fn morris(n: usize, a: f64, b: f64, lam: f64) -> Result<f64> {
    let mut s = 0.0;
    for j in 0..n {
        let lj = lam * j as f64;
        s += gamma_arg(lj + a + b + 1.0)? + gamma_arg(lam * (j as f64 + 1.0) + 1.0)?
            - gamma_arg(lj + a + 1.0)?
            - gamma_arg(lj + b + 1.0)?
            - gamma_arg(1.0 + lam)?;
    }
    Ok(s.exp())
}

fn kappa_steps(n: usize, kappa: f64) -> Result<Vec<u64>> {
    if !(kappa > 0.0) || (2.0 * kappa).fract() != 0.0 {
        return invalid(format!("kappa must be a positive half-integer, got {kappa}"));
    }
    (1..n)
        .map(|k| {
            let m = k as f64 * kappa;
            if m.fract() == 0.0 {
                Ok(m as u64)
            } else {
                invalid(format!("k·kappa = {m} is not an integer"))
            }
        })
        .collect()
}

/// `∏_{k=1}^{n−1} ∏_{l=1}^{kκ} (κ²N² − l²)`.
pub fn evenness_factor(n: usize, kappa: f64, big_n: f64) -> Result<f64> {
    let steps = kappa_steps(n, kappa)?;
    let kn2 = kappa * kappa * big_n * big_n;
    Ok(steps
        .iter()
        .flat_map(|&m| 1..=m)
        .map(|l| kn2 - (l * l) as f64)
        .product())
}

/// `N^{−κn(n−1)}` times [`evenness_factor`], computed factor by factor.
pub fn evenness_factor_scaled(n: usize, kappa: f64, big_n: f64) -> Result<f64> {
    let steps = kappa_steps(n, kappa)?;
    let n2 = big_n * big_n;
    Ok(steps
        .iter()
        .flat_map(|&m| 1..=m)
        .map(|l| kappa * kappa - (l * l) as f64 / n2)
        .product())
}

/// Exact coefficients `c_j` of `N^{−2j}` in the normalised evenness factor
/// `∏ (1 − l²/(κ²N²))`, integer κ.
pub fn evenness_expansion(n: usize, kappa: u32) -> Result<Vec<Q>> {
    let steps = kappa_steps(n, kappa as f64)?;
    let k2 = Q::from_integer((kappa * kappa) as i128);
    let mut poly = vec![Q::one()];
    for l in steps.iter().flat_map(|&m| 1..=m) {
        let c = -Q::from_integer((l * l) as i128) / k2;
        let mut next = vec![Q::zero(); poly.len() + 1];
        for (i, &p) in poly.iter().enumerate() {
            next[i] += p;
            next[i + 1] += p * c;
        }
        poly = next;
    }
    Ok(poly)
}

/// `v_s(κ) = κ^{−s} Σ_{j=1}^{n−1} Σ_{l=1}^{jκ} l^s`.
pub fn v_sum(n: usize, kappa: u32, s: u32) -> Result<Q> {
    let steps = kappa_steps(n, kappa as f64)?;
    let total: i128 = steps
        .iter()
        .flat_map(|&m| 1..=m)
        .map(|l| (l as i128).pow(s))
        .sum();
    Ok(Q::new(total, (kappa as i128).pow(s)))
}

/// Closed form `v₂(κ) = (n/12κ)(n−1)(κ(n−1)+1)(κn+1)`.
pub fn v2_closed_form(n: usize, kappa: u32) -> Q {
    let (n, k) = (n as i128, kappa as i128);
    Q::new(n * (n - 1) * (k * (n - 1) + 1) * (k * n + 1), 12 * k)
}

/// Ordered-region quadrature for `∫_{[0,1]^β} w(u) |Δ(u)|^{4/β} g(u) du`
/// with symmetric g, `w = ∏ u_j^{−1+2/β}(1−u_j)^{−1+2/β}`.
#[derive(Debug)]
pub struct SimplexRule {
    pub beta: usize,
    pub nodes: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl SimplexRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate<F: FnMut(&[f64]) -> Complex64>(&self, mut g: F) -> Complex64 {
        self.points
            .chunks_exact(self.beta)
            .zip(&self.weights)
            .map(|(u, &w)| g(u) * w)
            .sum()
    }
}

fn simplex_points(beta: usize, nodes: usize, mut emit: impl FnMut(&[f64], f64)) -> Result<()> {
    let b = beta as f64;
    let gamma = 4.0 / b - 1.0;
    let c = 4.0 / b;
    // t_k exponents at 0 and 1
    let rules = (1..=beta)
        .map(|k| {
            let kf = k as f64;
            let alpha = (kf - 1.0) + kf * gamma + c * kf * (kf - 1.0);
            let delta = if k < beta { c } else { gamma };
            gauss_jacobi(nodes, alpha, delta).map(|r| (alpha, delta, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let ln_fact: f64 = (1..=beta).map(|k| (k as f64).ln()).sum();
    let mut idx = vec![0usize; beta];
    let mut phi = vec![0.0; beta];
    let mut u = vec![0.0; beta];
    let total = nodes.pow(beta as u32);
    for flat in 0..total {
        let mut r = flat;
        for i in idx.iter_mut() {
            *i = r % nodes;
            r /= nodes;
        }
        let t = |k: usize| rules[k].2.nodes[idx[k]];
        phi[beta - 1] = PI * t(beta - 1);
        for k in (0..beta - 1).rev() {
            phi[k] = phi[k + 1] * t(k);
        }
        for k in 0..beta {
            u[k] = (1.0 - phi[k].cos()) / 2.0;
        }
        // log of the full integrand weight, then divide out the Jacobi powers
        let mut lw = ln_fact + PI.ln();
        for k in 1..beta {
            lw += phi[k].ln();
        }
        for &p in phi.iter() {
            lw += gamma * (p.sin() / 2.0).ln();
        }
        for j in 1..beta {
            for i in 0..j {
                // φ_j − φ_i = φ_j (1 − t_i ⋯ t_{j−1})
                let prod: f64 = (i..j).map(t).product();
                let half_diff = phi[j] * (1.0 - prod) / 2.0;
                let d = ((phi[i] + phi[j]) / 2.0).sin() * half_diff.sin();
                lw += c * d.ln();
            }
        }
        let mut gw = 1.0;
        for (k, (alpha, delta, rule)) in rules.iter().enumerate() {
            let tk = t(k);
            lw -= alpha * tk.ln() + delta * (1.0 - tk).ln();
            gw *= rule.weights[idx[k]];
        }
        emit(&u, gw * lw.exp());
    }
    Ok(())
}

fn rule_cache() -> &'static Mutex<HashMap<(usize, usize), Arc<SimplexRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<SimplexRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached ordered-region rule with `nodes` points per collapsed coordinate.
pub fn simplex_rule(beta: usize, nodes: usize) -> Result<Arc<SimplexRule>> {
    if beta == 0 || nodes == 0 {
        return invalid("simplex rule needs beta >= 1 and nodes >= 1");
    }
    let total = nodes
        .checked_pow(beta as u32)
        .filter(|&t| t <= 16 * CACHE_POINTS)
        .ok_or_else(|| Error::InvalidArgument(format!("{nodes}^{beta} quadrature points is too many")))?;
    if let Some(r) = rule_cache().lock().expect("rule cache poisoned").get(&(beta, nodes)) {
        return Ok(Arc::clone(r));
    }
    let mut points = Vec::with_capacity(total * beta);
    let mut weights = Vec::with_capacity(total);
    simplex_points(beta, nodes, |u, w| {
        points.extend_from_slice(u);
        weights.push(w);
    })?;
    let rule = Arc::new(SimplexRule { beta, nodes, points, weights });
    if total <= CACHE_POINTS {
        rule_cache()
            .lock()
            .expect("rule cache poisoned")
            .insert((beta, nodes), Arc::clone(&rule));
    }
    Ok(rule)
}

/// Brute-force tensor Gauss–Jacobi version of the same integral, for checks.
pub fn tensor_integral<F: FnMut(&[f64]) -> Complex64>(beta: usize, nodes: usize, mut g: F) -> Result<Complex64> {
    let a = -1.0 + 2.0 / beta as f64;
    let rule = gauss_jacobi(nodes, a, a)?;
    let c = 4.0 / beta as f64;
    let mut u = vec![0.0; beta];
    let mut sum = Complex64::zero();
    for flat in 0..nodes.pow(beta as u32) {
        let mut r = flat;
        let mut w = 1.0;
        for x in u.iter_mut() {
            let i = r % nodes;
            r /= nodes;
            *x = rule.nodes[i];
            w *= rule.weights[i];
        }
        for j in 1..beta {
            for i in 0..j {
                w *= (u[j] - u[i]).abs().powf(c);
            }
        }
        sum += g(&u) * w;
    }
    Ok(sum)
}

/// `ln S_β(−1+2/β, −1+2/β, 2/β)`, the value of the β-dimensional integral at zero separation.
fn ln_norm(beta: u32) -> Result<f64> {
    let a = -1.0 + 2.0 / beta as f64;
    ln_selberg(beta as usize, a, a, 2.0 / beta as f64)
}

/// `ln[(κ!)³ / (β! (3κ)!)] − ln S`.
fn ln_const(beta: u32) -> Result<f64> {
    let k = beta / 2;
    Ok(3.0 * ln_factorial(k) - ln_factorial(beta) - ln_factorial(3 * k) - ln_norm(beta)?)
}

/// Finite-N or limiting size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemSize {
    Finite(f64),
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenBetaQuery {
    pub beta: u32,
    pub n: SystemSize,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvenBetaValue {
    pub value: f64,
    pub imag_residue: f64,
    pub nodes: usize,
    /// Change against the rule with `nodes / 4` more points per coordinate.
    pub convergence: f64,
    pub warning: Option<String>,
}

/// `(N−1)/N · Γ(κ(N+1)+1)/Γ(κ(N−1)+1)` as a polynomial in N, valid for real N.
fn gamma_ratio_poly(beta: u32, n: f64) -> f64 {
    let k = (beta / 2) as f64;
    (n - 1.0) / n * (1..=beta).map(|l| k * n - k + l as f64).product::<f64>()
}

/// Finite-N prefactor of the integral at integer N through the Morris integral,
/// before the simplification to a Gamma ratio.
pub fn finite_prefactor_morris(beta: u32, n: usize) -> Result<f64> {
    check_beta(beta)?;
    let k = beta / 2;
    let nf = n as f64;
    let ln = (nf - 1.0).ln() - nf.ln() + nf * ln_factorial(k) - ln_gamma(k as f64 * nf + 1.0)
        + morris(n - 2, beta as f64, beta as f64, k as f64)?.ln()
        - ln_norm(beta)?;
    Ok(ln.exp())
}

/// The same prefactor after simplification.
pub fn finite_prefactor(beta: u32, n: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(ln_const(beta)?.exp() * gamma_ratio_poly(beta, n))
}

fn rho2_integral(n: SystemSize, x: f64, rule: &SimplexRule) -> Complex64 {
    match n {
        SystemSize::Limit => {
            let th = 2.0 * PI * x;
            rule.integrate(|u| Complex64::from_polar(1.0, th * u.iter().sum::<f64>()))
        }
        SystemSize::Finite(nn) => {
            let z = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * PI * x / nn);
            let p = nn - 2.0;
            rule.integrate(|u| {
                let s: Complex64 = u.iter().map(|&v| (Complex64::new(1.0, 0.0) - z * v).ln()).sum();
                (s * p).exp()
            })
        }
    }
}

fn rho2_prefactor(beta: u32, n: SystemSize, x: f64) -> Result<Complex64> {
    let b = beta as f64;
    let k = b / 2.0;
    Ok(match n {
        SystemSize::Limit => {
            let mag = (b * k.ln() + ln_const(beta)?).exp() * (2.0 * PI * x).powi(beta as i32);
            Complex64::from_polar(mag, -PI * b * x)
        }
        SystemSize::Finite(nn) => {
            let mag = finite_prefactor(beta, nn)? * (2.0 * (PI * x / nn).sin()).powi(beta as i32);
            Complex64::from_polar(mag, -PI * b * x * (nn - 2.0) / nn)
        }
    })
}

fn validate_query(q: &EvenBetaQuery) -> Result<()> {
    check_beta(q.beta)?;
    if !q.x.is_finite() {
        return invalid("x must be finite");
    }
    if let SystemSize::Finite(n) = q.n {
        if !(n.abs() > 4.0) {
            return invalid(format!("finite N must satisfy |N| > 4, got {n}"));
        }
        if q.x.abs() >= n.abs() / 2.0 {
            return invalid(format!("|x| = {} must be below |N|/2 = {}", q.x.abs(), n.abs() / 2.0));
        }
    }
    Ok(())
}

fn rho2_at(q: &EvenBetaQuery, nodes: usize) -> Result<Complex64> {
    let rule = simplex_rule(q.beta as usize, nodes)?;
    Ok(rho2_prefactor(q.beta, q.n, q.x)? * rho2_integral(q.n, q.x, &rule))
}

/// Two-point function with diagnostics; `nodes` defaults by β.
pub fn rho2_even_beta_with(q: &EvenBetaQuery, nodes: Option<usize>) -> Result<EvenBetaValue> {
    validate_query(q)?;
    let nodes = nodes.unwrap_or_else(|| default_nodes(q.beta));
    if q.x == 0.0 {
        return Ok(EvenBetaValue { value: 0.0, imag_residue: 0.0, nodes, convergence: 0.0, warning: None });
    }
    let v = rho2_at(q, nodes)?;
    let finer = rho2_at(q, nodes + nodes / 4)?;
    let convergence = (finer.re - v.re).abs();
    let tol = if q.beta == 6 { 1e-5 } else { 1e-7 };
    let mut warning = None;
    if convergence > tol {
        warning = Some(format!("quadrature moved the result by {convergence:.2e}"));
    }
    if v.im.abs() > 1e-9 {
        warning = Some(format!("imaginary residue {:.2e}", v.im.abs()));
    }
    Ok(EvenBetaValue { value: v.re, imag_residue: v.im.abs(), nodes, convergence, warning })
}

/// `ρ̃_{(2),β}(x, 0)` for even β at finite (real) N or in the bulk limit.
pub fn rho2_even_beta(q: &EvenBetaQuery) -> Result<f64> {
    validate_query(q)?;
    if q.x == 0.0 {
        return Ok(0.0);
    }
    Ok(rho2_at(q, default_nodes(q.beta))?.re)
}

/// Per-point outcome of the `1/N²` identity check.
#[derive(Debug, Clone, PartialEq)]
pub struct Identity421Report {
    pub x: Vec<f64>,
    pub estimate: Vec<f64>,
    pub predicted: Vec<f64>,
    pub max_residual: f64,
}

/// Richardson estimate of the `N⁻²` coefficient against
/// `−(1/(6β)) (x² ρ₀)″`, with ρ₀ from the limit formula.
pub fn verify_421_report(beta: u32, x_grid: &[f64], n_pair: (usize, usize)) -> Result<Identity421Report> {
    check_beta(beta)?;
    let (n1, n2) = n_pair;
    if n1 < 16 || n2 != 2 * n1 {
        return invalid(format!("N pair must be (N, 2N) with N >= 16, got ({n1}, {n2})"));
    }
    if x_grid.iter().any(|&x| !(0.2..=2.0).contains(&x)) {
        return invalid("x grid must lie in [0.2, 2]");
    }
    let rho = |n: SystemSize, x: f64| rho2_even_beta(&EvenBetaQuery { beta, n, x });
    let grid = ChebGrid::new(28, 0.1, 2.1)?;
    let samples = grid
        .nodes
        .iter()
        .map(|&x| Ok(x * x * rho(SystemSize::Limit, x)?))
        .collect::<Result<Vec<_>>>()?;
    let d2 = grid.derivative(&samples, 2)?;
    let mut report = Identity421Report { x: vec![], estimate: vec![], predicted: vec![], max_residual: 0.0 };
    for &x in x_grid {
        let r0 = rho(SystemSize::Limit, x)?;
        let e = |n: usize| -> Result<f64> { Ok((n * n) as f64 * (rho(SystemSize::Finite(n as f64), x)? - r0)) };
        let (e1, e2) = (e(n1)?, e(n2)?);
        let est = (4.0 * e2 - e1) / 3.0;
        let pred = -grid.interpolate(&d2, x) / (6.0 * beta as f64);
        report.max_residual = report.max_residual.max((est - pred).abs());
        report.x.push(x);
        report.estimate.push(est);
        report.predicted.push(pred);
    }
    Ok(report)
}

pub fn verify_421(beta: u32, x_grid: &[f64], n_pair: (usize, usize)) -> Result<f64> {
    Ok(verify_421_report(beta, x_grid, n_pair)?.max_residual)
}

/// `𝓘^{(m)}(a₁, …, a_m)` at angle θ.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentIntegral {
    pub beta: u32,
    pub theta: f64,
    pub exponents: Vec<u32>,
}

fn check_moment_beta(beta: u32) -> Result<()> {
    if matches!(beta, 2 | 4) {
        Ok(())
    } else {
        Err(Error::NotImplemented(format!("moment integrals need beta 2 or 4, got {beta}")))
    }
}

/// Ordered tuples of distinct indices in `0..beta` of length m.
fn distinct_tuples(beta: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..beta)
                    .filter(|j| !t.contains(j))
                    .map(|j| {
                        let mut s = t.clone();
                        s.push(j);
                        s
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

fn moment_with_rule(beta: u32, theta: f64, exps: &[u32], rule: &SimplexRule) -> Complex64 {
    let tuples = distinct_tuples(beta as usize, exps.len());
    if tuples.is_empty() {
        return Complex64::zero();
    }
    rule.integrate(|u| {
        let poly: f64 = tuples
            .iter()
            .map(|t| t.iter().zip(exps).map(|(&j, &a)| u[j].powi(a as i32)).product::<f64>())
            .sum();
        Complex64::from_polar(poly, theta * u.iter().sum::<f64>())
    })
}

const MOMENT_NODES: usize = 16;

pub fn moment_integral(m: &MomentIntegral) -> Result<Complex64> {
    check_moment_beta(m.beta)?;
    if m.exponents.len() > 4 || m.exponents.iter().any(|&a| a > 8) {
        return Err(Error::NotImplemented("moment integrals need m <= 4 and exponents <= 8".into()));
    }
    let rule = simplex_rule(m.beta as usize, MOMENT_NODES)?;
    Ok(moment_with_rule(m.beta, m.theta, &m.exponents, &rule))
}

/// One check of the moment recurrence or its initial conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum AppendixACase {
    /// The recurrence for exponents with `a₁ ≥ 2`.
    Recurrence { theta: f64, exponents: Vec<u32> },
    /// `𝓘^{(m)}(0, a₂, …) = (β − m + 1) 𝓘^{(m−1)}(a₂, …)`.
    LeadingZero { theta: f64, exponents: Vec<u32> },
    /// `𝓘[(Σu)^m]` against its partition expansion and against `(−i)^m ∂_θ^m 𝓘[1]`.
    PowerSum { theta: f64, m: u32 },
}

struct Moments<'a> {
    beta: u32,
    theta: f64,
    rule: &'a SimplexRule,
    memo: HashMap<Vec<u32>, Complex64>,
}

impl Moments<'_> {
    fn get(&mut self, exps: &[u32]) -> Complex64 {
        if let Some(v) = self.memo.get(exps) {
            return *v;
        }
        let v = moment_with_rule(self.beta, self.theta, exps, self.rule);
        self.memo.insert(exps.to_vec(), v);
        v
    }
}

fn with_front(front: &[u32], rest: &[u32]) -> Vec<u32> {
    front.iter().chain(rest).copied().collect()
}

fn even(x: i64) -> f64 {
    if x % 2 == 0 {
        1.0
    } else {
        0.0
    }
}

/// Sign used in the pair terms of the recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecurrenceForm {
    /// `sgn(a₁ − a_k)` for both j = 1, 2.
    Printed,
    /// `sgn(a₁ + 1 − j − a_k)`; differs from the printed form only when a_k = a₁.
    Corrected,
}

/// Both sides of the recurrence for exponents `a` (a₁ ≥ 2).
fn recurrence_sides(mm: &mut Moments, a: &[u32], form: RecurrenceForm) -> (Complex64, Complex64) {
    let b = mm.beta as f64;
    let a1 = a[0] as i64;
    let rest = &a[1..];
    let i = Complex64::i();
    let lhs = -i * mm.theta * (mm.get(&with_front(&[a[0] - 1], rest)) - mm.get(a));
    let mut bracket = Complex64::zero();
    for j in 1..=2i64 {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let q = a1 - j;
        let mut inner = Complex64::zero();
        for k in 0..=q / 2 {
            inner += mm.get(&with_front(&[k as u32, (q - k) as u32], rest));
        }
        if q % 2 == 0 {
            inner -= 0.5 * mm.get(&with_front(&[(q / 2) as u32, (q / 2) as u32], rest));
        }
        bracket += sign * inner;
    }
    for kk in 1..rest.len() + 1 {
        let ak = a[kk] as i64;
        let others: Vec<u32> = rest.iter().enumerate().filter(|(p, _)| *p + 1 != kk).map(|(_, &v)| v).collect();
        for j in 1..=2i64 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let sgn = match form {
                RecurrenceForm::Printed => (a1 - ak).signum() as f64,
                RecurrenceForm::Corrected => (a1 + 1 - j - ak).signum() as f64,
            };
            if sgn == 0.0 {
                continue;
            }
            let q = a1 + ak - j;
            let mut inner = Complex64::zero();
            for l in (a1 + 1 - j).min(ak)..=q / 2 {
                inner += mm.get(&with_front(&[l as u32, (q - l) as u32], &others));
            }
            inner -= 0.5 * even(q) * mm.get(&with_front(&[(q / 2) as u32, (q / 2) as u32], &others));
            bracket += sgn * sign * inner;
        }
    }
    let rhs = bracket * (4.0 / b)
        + (2.0 / b + a1 as f64 - 2.0) * mm.get(&with_front(&[a[0] - 2], rest))
        - (4.0 / b + a1 as f64 - 2.0) * mm.get(&with_front(&[a[0] - 1], rest));
    (lhs, rhs)
}

/// Integer partitions of m, parts in non-increasing order.
fn partitions(m: u32) -> Vec<Vec<u32>> {
    fn go(m: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if m == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=m.min(max)).rev() {
            cur.push(p);
            go(m - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(m, m, &mut vec![], &mut out);
    out
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// `m!/(τ! s_τ!)` for a partition τ.
fn partition_weight(tau: &[u32]) -> f64 {
    let m: u32 = tau.iter().sum();
    let tau_fact: f64 = tau.iter().map(|&t| factorial(t)).product();
    let mut mult: HashMap<u32, u32> = HashMap::new();
    for &t in tau {
        *mult.entry(t).or_default() += 1;
    }
    let s_fact: f64 = mult.values().map(|&c| factorial(c)).product();
    factorial(m) / (tau_fact * s_fact)
}

/// `𝓘[(Σu)^m]` by direct quadrature.
fn power_sum_moment(theta: f64, m: u32, rule: &SimplexRule) -> Complex64 {
    rule.integrate(|u| {
        let s: f64 = u.iter().sum();
        Complex64::from_polar(s.powi(m as i32), theta * s)
    })
}

/// `(−i)^m ∂_θ^m 𝓘[1]` by Richardson-extrapolated central differences.
fn derivative_moment(theta: f64, m: u32, rule: &SimplexRule) -> Complex64 {
    let f = |t: f64| rule.integrate(|u| Complex64::from_polar(1.0, t * u.iter().sum::<f64>()));
    let stencil = |h: f64| -> Complex64 {
        // m-th central difference
        (0..=m)
            .map(|j| {
                let c = factorial(m) / (factorial(j) * factorial(m - j));
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                f(theta + (m as f64 / 2.0 - j as f64) * h) * (sign * c)
            })
            .sum::<Complex64>()
            / h.powi(m as i32)
    };
    let h = 0.04;
    let (a, b, c) = (stencil(h), stencil(h / 2.0), stencil(h / 4.0));
    let (ab, bc) = ((b * 4.0 - a) / 3.0, (c * 4.0 - b) / 3.0);
    let d = (bc * 16.0 - ab) / 15.0;
    d * Complex64::i().powi(-(m as i32))
}

/// Largest absolute residual over the cases.
pub fn verify_appendix_a(beta: u32, cases: &[AppendixACase]) -> Result<f64> {
    verify_appendix_a_with(beta, cases, RecurrenceForm::Corrected)
}

pub fn verify_appendix_a_with(beta: u32, cases: &[AppendixACase], form: RecurrenceForm) -> Result<f64> {
    check_moment_beta(beta)?;
    let rule = simplex_rule(beta as usize, MOMENT_NODES)?;
    let mut worst: f64 = 0.0;
    for case in cases {
        let r = match case {
            AppendixACase::Recurrence { theta, exponents } => {
                if exponents.is_empty() || exponents[0] < 2 || exponents.len() > 3 {
                    return invalid("recurrence needs 1 <= m <= 3 and a1 >= 2");
                }
                let mut mm = Moments { beta, theta: *theta, rule: &rule, memo: HashMap::new() };
                let (l, r) = recurrence_sides(&mut mm, exponents, form);
                (l - r).norm()
            }
            AppendixACase::LeadingZero { theta, exponents } => {
                if exponents.first() != Some(&0) {
                    return invalid("leading-zero case needs a1 = 0");
                }
                let m = exponents.len() as f64;
                let lhs = moment_with_rule(beta, *theta, exponents, &rule);
                let rhs = moment_with_rule(beta, *theta, &exponents[1..], &rule) * (beta as f64 - m + 1.0);
                (lhs - rhs).norm()
            }
            AppendixACase::PowerSum { theta, m } => {
                let direct = power_sum_moment(*theta, *m, &rule);
                let expanded: Complex64 = partitions(*m)
                    .iter()
                    .map(|tau| moment_with_rule(beta, *theta, tau, &rule) * partition_weight(tau))
                    .sum();
                let deriv = derivative_moment(*theta, *m, &rule);
                (direct - expanded).norm().max((direct - deriv).norm())
            }
        };
        worst = worst.max(r);
    }
    Ok(worst)
}

/// The `(−i)^m ∂_θ^m 𝓘[1]` side of the power-sum condition, by differences.
pub fn theta_derivative_moment(beta: u32, theta: f64, m: u32) -> Result<Complex64> {
    check_moment_beta(beta)?;
    let rule = simplex_rule(beta as usize, MOMENT_NODES)?;
    Ok(derivative_moment(theta, m, &rule))
}

fn appendix_b_parts(k: usize, beta: u32) -> Result<(usize, u32, f64)> {
    if beta == 0 || beta % 2 != 0 {
        return invalid(format!("beta must be a positive even integer, got {beta}"));
    }
    let kappa = beta / 2;
    let n = k + 2;
    let kf = kappa as f64;
    let mut ln = ln_selberg(k, beta as f64, beta as f64, kf)? + n as f64 * ln_factorial(kappa)
        - ln_gamma(n as f64 * kf + 1.0)
        - ln_factorial(k as u32);
    for j in 1..n {
        ln += ln_gamma(kf * j as f64 + 1.0) - ln_gamma(kf * (n + j) as f64 + 1.0);
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let p = kappa * (n * (n - 1)) as u32;
    Ok((n, kappa, sign * (ln + p as f64 * (2.0 * PI).ln()).exp()))
}

/// Coefficient of `ξ^k s^{k + κ(k+2)(k+1)}` at finite N (n = k + 2 < N/2).
pub fn appendix_b_coefficient(k: usize, beta: u32, big_n: f64) -> Result<f64> {
    let (n, kappa, c) = appendix_b_parts(k, beta)?;
    if 2.0 * n as f64 >= big_n.abs() {
        return invalid(format!("need k + 2 < N/2, got k = {k}, N = {big_n}"));
    }
    Ok(c * evenness_factor_scaled(n, kappa as f64, big_n)?)
}

/// The N → ∞ value of [`appendix_b_coefficient`].
pub fn appendix_b_limit(k: usize, beta: u32) -> Result<f64> {
    let (n, kappa, c) = appendix_b_parts(k, beta)?;
    Ok(c * (kappa as f64).powi((kappa as usize * n * (n - 1)) as i32))
}
