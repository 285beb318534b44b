//! Gauss rules from the three-term recurrence of the underlying orthogonal
//! polynomials.
//!
//! Nodes start from the Golub–Welsch eigenvalues of the Jacobi matrix and are
//! then polished by Newton's method on the orthonormal recurrence; weights come
//! from the Christoffel function at the polished nodes.

use crate::error::{invalid, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// Weight function of a rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    /// Unit weight on `[lo, hi]`.
    Legendre,
    /// `u^a_exp (1 - u)^b_exp` on `[0, 1]`.
    Jacobi { a_exp: f64, b_exp: f64 },
}

/// Nodes and weights of an n-point Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_j f(x_j)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// The same rule moved affinely onto `[lo, hi]`.
    pub fn rescaled(&self, lo: f64, hi: f64) -> QuadratureRule {
        let scale = (hi - lo) / (self.hi - self.lo);
        QuadratureRule {
            kind: self.kind,
            nodes: self.nodes.iter().map(|x| lo + (x - self.lo) * scale).collect(),
            weights: self.weights.iter().map(|w| w * scale).collect(),
            lo,
            hi,
        }
    }
}

/// Monic recurrence `p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}`, stored
/// for k = 0..=n, plus the zeroth moment.
struct Recurrence {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    mu0: f64,
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Recurrence on [0, 1] for the weight u^a (1-u)^b.
fn jacobi_recurrence(n: usize, a: f64, b: f64) -> Recurrence {
    // classical (1-x)^al (1+x)^be on [-1,1], u = (1+x)/2
    let (al, be) = (b, a);
    let s = al + be;
    let mut alpha = Vec::with_capacity(n + 1);
    let mut beta = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let kf = k as f64;
        let ak = if k == 0 {
            (be - al) / (s + 2.0)
        } else {
            (be * be - al * al) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0))
        };
        let bk = match k {
            0 => 0.0,
            1 => 4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + s).powi(2) * (3.0 + s)),
            _ => {
                let t = 2.0 * kf + s;
                4.0 * kf * (kf + al) * (kf + be) * (kf + s) / (t * t * (t + 1.0) * (t - 1.0))
            }
        };
        alpha.push((1.0 + ak) / 2.0);
        beta.push(bk / 4.0);
    }
    Recurrence {
        alpha,
        beta,
        mu0: ln_beta(a + 1.0, b + 1.0).exp(),
    }
}

/// Orthonormal values p̂_0..=p̂_n at x, and p̂_n'(x).
fn orthonormal(rec: &Recurrence, n: usize, x: f64) -> (Vec<f64>, f64) {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0 / rec.mu0.sqrt());
    let (mut prev, mut dprev, mut dcur) = (0.0, 0.0, 0.0);
    for k in 0..n {
        let sb = rec.beta[k].sqrt();
        let sb_next = rec.beta[k + 1].sqrt();
        let cur = p[k];
        let next = ((x - rec.alpha[k]) * cur - sb * prev) / sb_next;
        let dnext = (cur + (x - rec.alpha[k]) * dcur - sb * dprev) / sb_next;
        prev = cur;
        dprev = dcur;
        dcur = dnext;
        p.push(next);
    }
    (p, dcur)
}

fn gauss_from_recurrence(rec: &Recurrence, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = rec.alpha[k];
        if k + 1 < n {
            let off = rec.beta[k + 1].sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jm).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = orthonormal(rec, n, *x);
            let step = p[n] / dp;
            if !step.is_finite() {
                break;
            }
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-3) {
                break;
            }
        }
        let (p, _) = orthonormal(rec, n, *x);
        let christoffel: f64 = p[..n].iter().map(|v| v * v).sum();
        weights.push(1.0 / christoffel);
    }
    (nodes, weights)
}

/// n-point Gauss–Legendre rule on `[lo, hi]`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return invalid("gauss_legendre needs n >= 1");
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return invalid(format!("gauss_legendre needs finite lo < hi, got [{lo}, {hi}]"));
    }
    let rec = jacobi_recurrence(n, 0.0, 0.0);
    let (nodes, weights) = gauss_from_recurrence(&rec, n);
    let unit = QuadratureRule {
        kind: RuleKind::Legendre,
        nodes,
        weights,
        lo: 0.0,
        hi: 1.0,
    };
    Ok(unit.rescaled(lo, hi))
}

type RuleCache = RwLock<HashMap<usize, Arc<QuadratureRule>>>;

/// Gauss–Legendre rule on `[0, 1]` from a process-wide read-mostly cache.
pub fn legendre_unit(n: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(r) = cache.read().expect("rule cache poisoned").get(&n) {
        return Ok(Arc::clone(r));
    }
    let rule = Arc::new(gauss_legendre(n, 0.0, 1.0)?);
    cache
        .write()
        .expect("rule cache poisoned")
        .entry(n)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

/// n-point Gauss–Jacobi rule for `∫₀¹ f(u) u^a_exp (1-u)^b_exp du`.
pub fn gauss_jacobi(n: usize, a_exp: f64, b_exp: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return invalid("gauss_jacobi needs n >= 1");
    }
    if !(a_exp > -1.0 && b_exp > -1.0) || !a_exp.is_finite() || !b_exp.is_finite() {
        return invalid(format!("gauss_jacobi exponents must exceed -1, got ({a_exp}, {b_exp})"));
    }
    let rec = jacobi_recurrence(n, a_exp, b_exp);
    let (nodes, weights) = gauss_from_recurrence(&rec, n);
    Ok(QuadratureRule {
        kind: RuleKind::Jacobi { a_exp, b_exp },
        nodes,
        weights,
        lo: 0.0,
        hi: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn midpoint() {
        let r = gauss_legendre(1, 0.0, 1.0).unwrap();
        assert!((r.nodes[0] - 0.5).abs() < 1e-16);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_points_cubic_exact() {
        let r = gauss_legendre(2, 0.0, 1.0).unwrap();
        assert!((r.integrate(|x| x * x) - 1.0 / 3.0).abs() <= 1e-15);
        assert!((r.integrate(|x| x * x * x) - 0.25).abs() <= 1e-15);
    }

    #[test]
    fn sine_over_half_period() {
        let r = gauss_legendre(20, 0.0, PI).unwrap();
        assert!((r.integrate(f64::sin) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn legendre_weights_sum() {
        for n in [1, 2, 7, 16, 64, 128] {
            let r = gauss_legendre(n, -0.5, 2.5).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 3.0).abs() / 3.0 < 1e-13, "n={n} sum={s}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.nodes.iter().all(|&x| x > -0.5 && x < 2.5));
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn jacobi_zero_exponents_is_legendre() {
        let j = gauss_jacobi(24, 0.0, 0.0).unwrap();
        let l = gauss_legendre(24, 0.0, 1.0).unwrap();
        for k in 0..24 {
            assert!((j.nodes[k] - l.nodes[k]).abs() < 1e-13);
            assert!((j.weights[k] - l.weights[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobi_beta_values() {
        let r = gauss_jacobi(12, -0.5, -0.5).unwrap();
        assert!((r.integrate(|_| 1.0) - PI).abs() < 1e-12);
        assert!((r.integrate(|u| u) - PI / 2.0).abs() < 1e-12);
    }

    fn moment_check(r: &QuadratureRule, exact: impl Fn(usize) -> f64) {
        let n = r.len();
        for k in 0..2 * n {
            let q = r.integrate(|x| x.powi(k as i32));
            let e = exact(k);
            assert!(((q - e) / e).abs() < 1e-11, "k={k} q={q} e={e}");
        }
    }

    #[test]
    fn moments_legendre() {
        for n in [3, 10, 32] {
            let r = gauss_legendre(n, 0.0, 2.0).unwrap();
            moment_check(&r, |k| 2f64.powi(k as i32 + 1) / (k as f64 + 1.0));
        }
    }

    #[test]
    fn moments_jacobi() {
        for &(a, b) in &[(-0.5, -0.5), (0.0, 0.0), (-0.75, 0.25), (1.5, 0.5), (0.0, 1.0)] {
            for n in [4, 12, 24] {
                let r = gauss_jacobi(n, a, b).unwrap();
                moment_check(&r, |k| ln_beta(a + k as f64 + 1.0, b + 1.0).exp());
            }
        }
    }

    #[test]
    fn cached_rule_matches_fresh() {
        let a = legendre_unit(17).unwrap();
        let b = legendre_unit(17).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, gauss_legendre(17, 0.0, 1.0).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
        assert!(gauss_legendre(4, 1.0, 0.0).is_err());
        assert!(gauss_legendre(4, 0.0, f64::INFINITY).is_err());
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
    }
}
