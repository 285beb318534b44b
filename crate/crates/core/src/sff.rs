//! Structure functions (spectral form factors): exact finite-N forms for
//! β = 1, 2, 4, their bulk-scaled large-N terms, and the general-β small-τ
//! series with its symmetry and differential relations.

use crate::error::{invalid, Error, Result};
use crate::numerics::{digamma, Q};
use nalgebra::DMatrix;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// `2π S_{N,β}(k)`, exact.
pub fn sff_exact(beta: u32, n: usize, k: i64) -> Result<f64> {
    sff_exact_real(beta, n, k as f64)
}

/// `2π S_{N,β}(k)` continued to real k.
pub fn sff_exact_real(beta: u32, n: usize, k: f64) -> Result<f64> {
    if n < 2 {
        return invalid(format!("structure function needs N >= 2, got {n}"));
    }
    let nf = n as f64;
    let k = k.abs();
    match beta {
        2 => Ok(k.min(nf)),
        1 => {
            let h = (nf + 1.0) / 2.0;
            if k < nf {
                Ok(2.0 * k - k * (digamma(k + h)? - digamma(h)?))
            } else {
                Ok(2.0 * nf - k * (digamma(k + h)? - digamma(k + (1.0 - nf) / 2.0)?))
            }
        }
        4 => {
            if k < 2.0 * nf - 1.0 {
                Ok(k / 2.0 * (1.0 + 0.5 * (digamma(nf + 0.5)? - digamma((k - nf).abs() + 0.5)?)))
            } else {
                Ok(nf)
            }
        }
        _ => invalid(format!("exact structure function needs beta in {{1, 2, 4}}, got {beta}")),
    }
}

/// Bulk-scaled `S̃_N(τ) = (2π/N) S_N(τN)`.
pub fn sff_scaled(beta: u32, n: usize, tau: f64) -> Result<f64> {
    Ok(sff_exact_real(beta, n, tau * n as f64)? / n as f64)
}

/// Derivatives `S̃₀^{(j)}(τ)` for j = 0, 2, 3, 4 at τ > 0.
fn s0_derivs(beta: u32, tau: f64) -> [f64; 4] {
    match beta {
        1 if tau <= 1.0 => {
            let u = 1.0 + 2.0 * tau;
            [
                2.0 * tau - tau * u.ln(),
                -2.0 / u - 2.0 / (u * u),
                4.0 / u.powi(2) + 8.0 / u.powi(3),
                -16.0 / u.powi(3) - 48.0 / u.powi(4),
            ]
        }
        1 => {
            let (a, b) = (2.0 * tau - 1.0, 2.0 * tau + 1.0);
            [
                2.0 - tau * (b / a).ln(),
                -2.0 * (1.0 / (a * a) + 1.0 / (b * b) - 1.0 / a + 1.0 / b),
                8.0 / a.powi(3) + 8.0 / b.powi(3) - 4.0 / (a * a) + 4.0 / (b * b),
                -48.0 / a.powi(4) - 48.0 / b.powi(4) + 16.0 / a.powi(3) - 16.0 / b.powi(3),
            ]
        }
        4 if tau < 2.0 => {
            let w = 1.0 - tau;
            [
                tau / 2.0 - tau / 4.0 * w.abs().ln(),
                1.0 / (4.0 * w * w) + 1.0 / (4.0 * w),
                1.0 / (2.0 * w.powi(3)) + 1.0 / (4.0 * w * w),
                3.0 / (2.0 * w.powi(4)) + 1.0 / (2.0 * w.powi(3)),
            ]
        }
        4 => [1.0, 0.0, 0.0, 0.0],
        _ => [tau.min(1.0), 0.0, 0.0, 0.0],
    }
}

fn kappa_consts(kappa: f64) -> (f64, f64) {
    let c = -1.0 / (12.0 * kappa);
    // (κ³ − 1)/(κ − 1) = 1 + κ + κ²
    let d = (1.0 + kappa + kappa * kappa) / (720.0 * kappa.powi(3));
    (c, d)
}

/// `S̃_{order,∞,β}(τ)`; orders ≥ 1 vanish for β = 2.
pub fn sff_bulk_term(beta: u32, order: usize, tau: f64) -> Result<f64> {
    if !matches!(beta, 1 | 2 | 4) {
        return invalid(format!("bulk structure function needs beta in {{1, 2, 4}}, got {beta}"));
    }
    if order > 2 {
        return invalid(format!("bulk structure function order must be 0, 1 or 2, got {order}"));
    }
    let t = tau.abs();
    if t == 0.0 {
        return Ok(0.0);
    }
    if beta == 2 {
        return Ok(if order == 0 { t.min(1.0) } else { 0.0 });
    }
    let [s0, s2, s3, s4] = s0_derivs(beta, t);
    let (c, d) = kappa_consts(beta as f64 / 2.0);
    Ok(match order {
        0 => s0,
        1 => c * t * t * s2,
        _ => d * (t.powi(4) * s4 + 8.0 * t.powi(3) * s3 + 12.0 * t * t * s2),
    })
}

/// Exact curves and bulk terms sampled on a τ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SffCurve {
    pub beta: u32,
    pub tau_grid: Vec<f64>,
    pub exact_n: Option<(usize, Vec<f64>)>,
    pub s0: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
}

pub fn sff_curve(beta: u32, tau_grid: &[f64], n: Option<usize>) -> Result<SffCurve> {
    let term = |order| tau_grid.iter().map(|&t| sff_bulk_term(beta, order, t)).collect::<Result<Vec<_>>>();
    let exact_n = match n {
        Some(n) => Some((n, tau_grid.iter().map(|&t| sff_scaled(beta, n, t)).collect::<Result<Vec<_>>>()?)),
        None => None,
    };
    Ok(SffCurve {
        beta,
        tau_grid: tau_grid.to_vec(),
        exact_n,
        s0: term(0)?,
        s1: term(1)?,
        s2: term(2)?,
    })
}

/// Max residuals of both differential relations for the β = 1, 4 closed forms.
///
/// The first compares the stored `S̃₁` against `c τ² S̃₀″`; the second is the
/// defining relation of `S̃₂` and is evaluated against an independent
/// finite-difference stencil of `S̃₀`.
pub fn verify_x6(beta: u32, tau_grid: &[f64]) -> Result<(f64, f64)> {
    if !matches!(beta, 1 | 4) {
        return invalid(format!("closed-form relations exist for beta 1 and 4, got {beta}"));
    }
    let kink = if beta == 1 { 1.0 } else { 2.0 };
    let (c, d) = kappa_consts(beta as f64 / 2.0);
    let mut r1: f64 = 0.0;
    let mut r2: f64 = 0.0;
    for &t in tau_grid {
        if !(t > 0.0) || (t - kink).abs() < 1e-3 || (beta == 4 && (t - 1.0).abs() < 1e-3) {
            return invalid(format!("tau = {t} is not a regular point"));
        }
        let s1 = corrected_s1_closed_form(beta, t);
        let s0pp = s0_derivs(beta, t)[1];
        r1 = r1.max((s1 - c * t * t * s0pp).abs());
        let h = 1e-2 * t.min((t - kink).abs()).min(if beta == 4 { (t - 1.0).abs() } else { 1.0 });
        let f = |x: f64| s0_derivs(beta, x)[1];
        // fourth-order central differences of S̃₀″ for S̃₀‴ and S̃₀⁗
        let d3 = (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h);
        let d4 = (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h);
        let rhs = d * (t.powi(4) * d4 + 8.0 * t.powi(3) * d3 + 12.0 * t * t * s0pp);
        r2 = r2.max((sff_bulk_term(beta, 2, t)? - rhs).abs() / rhs.abs().max(1.0));
    }
    Ok((r1, r2))
}

/// Leading corrections written out directly from the digamma asymptotics.
fn corrected_s1_closed_form(beta: u32, t: f64) -> f64 {
    match beta {
        1 if t <= 1.0 => t / 6.0 * (1.0 - 1.0 / (1.0 + 2.0 * t).powi(2)),
        1 => t * 4.0 * t / (3.0 * (1.0 - 4.0 * t * t).powi(2)),
        4 if t <= 2.0 => t / 96.0 * (1.0 - 1.0 / (t - 1.0).powi(2)),
        _ => 0.0,
    }
}

/// Laurent polynomial in κ with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Laurent(pub BTreeMap<i32, Q>);

impl Laurent {
    pub fn monomial(c: Q, e: i32) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(e, c);
        }
        Laurent(m)
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0)
    }

    /// From coefficients of `κ^0, κ^1, …`.
    pub fn poly(coefs: &[Q]) -> Self {
        coefs
            .iter()
            .enumerate()
            .fold(Laurent::default(), |acc, (i, &c)| acc.add(&Laurent::monomial(c, i as i32)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.0.clone();
        for (&e, &c) in &o.0 {
            let v = m.entry(e).or_insert_with(Q::zero);
            *v += c;
            if v.is_zero() {
                m.remove(&e);
            }
        }
        Laurent(m)
    }

    pub fn scale(&self, c: Q) -> Self {
        if c.is_zero() {
            return Laurent::default();
        }
        Laurent(self.0.iter().map(|(&e, &v)| (e, v * c)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-Q::one()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Laurent::default();
        for (&e1, &c1) in &self.0 {
            for (&e2, &c2) in &o.0 {
                out = out.add(&Laurent::monomial(c1 * c2, e1 + e2));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Laurent::constant(Q::one()), |acc, _| acc.mul(self))
    }

    /// `κ ↦ 1/κ`.
    pub fn invert(&self) -> Self {
        Laurent(self.0.iter().map(|(&e, &c)| (-e, c)).collect())
    }

    pub fn eval_exact(&self, kappa: Q) -> Q {
        self.0.iter().fold(Q::zero(), |acc, (&e, &c)| {
            let p = if e >= 0 { pow_q(kappa, e as u32) } else { Q::one() / pow_q(kappa, (-e) as u32) };
            acc + c * p
        })
    }

    pub fn eval(&self, kappa: f64) -> f64 {
        self.0
            .iter()
            .map(|(&e, &c)| c.to_f64().unwrap_or(f64::NAN) * kappa.powi(e))
            .sum()
    }

    /// Coefficients `κ^0 … κ^d` if no negative powers occur.
    fn poly_coefs(&self) -> Option<Vec<f64>> {
        let lo = *self.0.keys().next()?;
        if lo < 0 {
            return None;
        }
        let hi = *self.0.keys().last()? as usize;
        let mut v = vec![0.0; hi + 1];
        for (&e, c) in &self.0 {
            v[e as usize] = c.to_f64().unwrap_or(f64::NAN);
        }
        Some(v)
    }
}

fn pow_q(x: Q, n: u32) -> Q {
    (0..n).fold(Q::one(), |acc, _| acc * x)
}

fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

fn lp(c: &[(i128, i128)]) -> Laurent {
    Laurent::poly(&c.iter().map(|&(n, d)| q(n, d)).collect::<Vec<_>>())
}

/// The κ-polynomials of the small-τ series, by name.
pub fn kappa_polynomial(name: &str) -> Option<Laurent> {
    Some(match name {
        "p2" => lp(&[(1, 1), (-11, 6), (1, 1)]),
        "p4" => lp(&[(1, 1), (-91, 30), (62, 15), (-91, 30), (1, 1)]),
        "q2" => lp(&[(1, 1), (-3, 2), (1, 1)]),
        "q4" => lp(&[(1, 1), (-37, 15), (13, 4), (-37, 15), (1, 1)]),
        "r2" => lp(&[(1, 1), (15, 8), (1, 1)]),
        "r4" => lp(&[(1, 1), (31, 42), (-116, 42), (31, 42), (1, 1)]),
        "p6" => lp(&[(1, 1), (-1607, 420), (2011, 280), (-911, 105), (2011, 280), (-1607, 420), (1, 1)]),
        "q6" => lp(&[(1, 1), (-263, 84), (1697, 315), (-6337, 1008), (1697, 315), (-263, 84), (1, 1)]),
        _ => return None,
    })
}

/// Which polynomial multiplies τ⁸ in the leading series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tau8Coefficient {
    /// p₆, the form required by the κ ↦ 1/κ symmetry and the β = 1, 4 closed forms.
    P6,
    /// p₄ as in the printed display.
    P4,
}

/// τ-power → coefficient, for orders 0, 1, 2.
pub fn sff_series_table(order: usize, tau8: Tau8Coefficient) -> Result<Vec<(u32, Laurent)>> {
    let pl = |n: &str| kappa_polynomial(n).expect("known polynomial");
    let km1 = lp(&[(-1, 1), (1, 1)]);
    let km1sq = km1.pow(2);
    let inv = |e: i32, c: Q| Laurent::monomial(c, -e);
    let one = Q::one();
    let rows: Vec<(u32, Laurent)> = match order {
        0 => {
            let p8 = match tau8 {
                Tau8Coefficient::P6 => pl("p6"),
                Tau8Coefficient::P4 => pl("p4"),
            };
            vec![
                (1, inv(1, one)),
                (2, km1.mul(&inv(2, one))),
                (3, km1sq.mul(&inv(3, one))),
                (4, km1.mul(&inv(4, one)).mul(&pl("p2"))),
                (5, km1sq.mul(&inv(5, one)).mul(&pl("q2"))),
                (6, km1.mul(&inv(6, one)).mul(&pl("p4"))),
                (7, km1sq.mul(&inv(7, one)).mul(&pl("q4"))),
                (8, km1.mul(&inv(8, one)).mul(&p8)),
            ]
        }
        1 => vec![
            (2, km1.mul(&inv(3, q(-1, 6)))),
            (3, km1sq.mul(&inv(4, q(-1, 2)))),
            (4, km1.mul(&inv(5, -one)).mul(&pl("p2"))),
            (5, km1sq.mul(&inv(6, q(-5, 3))).mul(&pl("q2"))),
            (6, km1.mul(&inv(7, q(-5, 2))).mul(&pl("p4"))),
        ],
        2 => vec![
            (2, km1.mul(&inv(5, q(1, 30))).mul(&lp(&[(1, 1), (1, 1), (1, 1)]))),
            (3, km1sq.mul(&inv(6, q(2, 15))).mul(&pl("r2"))),
            (4, km1.mul(&inv(7, q(7, 20))).mul(&pl("r4"))),
        ],
        _ => return invalid(format!("series order must be 0, 1 or 2, got {order}")),
    };
    Ok(rows)
}

/// Truncated small-τ series of `S̃_{order,∞,β}(τ)`, `κ = β/2`.
pub fn sff_series(beta: f64, order: usize, tau: f64) -> Result<f64> {
    sff_series_with(beta, order, tau, Tau8Coefficient::P6)
}

pub fn sff_series_with(beta: f64, order: usize, tau: f64, tau8: Tau8Coefficient) -> Result<f64> {
    if !(beta > 0.0) {
        return invalid(format!("beta must be positive, got {beta}"));
    }
    let kappa = beta / 2.0;
    // rational κ is evaluated exactly so the (κ − 1) factors cancel cleanly
    let scaled = kappa * 840.0;
    let exact = (scaled.fract() == 0.0 && scaled.abs() < 1e6).then(|| q(scaled as i128, 840));
    Ok(sff_series_table(order, tau8)?
        .iter()
        .map(|(p, c)| {
            let v = match exact {
                Some(k) => c.eval_exact(k).to_f64().unwrap_or(f64::NAN),
                None => c.eval(kappa),
            };
            v * tau.powi(*p as i32)
        })
        .sum())
}

/// `τ^k d^k/dτ^k` of a series table (coefficient of τ^j gets j(j−1)…(j−k+1)).
fn euler_power(table: &[(u32, Laurent)], k: u32) -> Vec<(u32, Laurent)> {
    table
        .iter()
        .map(|(j, c)| {
            let f: i128 = (0..k).map(|i| *j as i128 - i as i128).product();
            (*j, c.scale(Q::from_integer(f)))
        })
        .collect()
}

fn combine(a: &[(u32, Laurent)], b: &[(u32, Laurent)], cb: Q) -> BTreeMap<u32, Laurent> {
    let mut m: BTreeMap<u32, Laurent> = BTreeMap::new();
    for (j, c) in a {
        let e = m.entry(*j).or_default();
        *e = e.add(c);
    }
    for (j, c) in b {
        let e = m.entry(*j).or_default();
        *e = e.add(&c.scale(cb));
    }
    m
}

/// Per-τ-power residuals of both differential relations at series level.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRelationReport {
    /// `(power, residual)` of `S̃₁ − c τ²S̃₀″` through τ⁶.
    pub first: Vec<(u32, Laurent)>,
    /// `(power, residual)` of `S̃₂ − d(τ⁴S̃₀⁗ + 8τ³S̃₀‴ + 12τ²S̃₀″)` through τ⁴.
    pub second: Vec<(u32, Laurent)>,
}

impl SeriesRelationReport {
    /// Highest power through which a relation holds identically in κ, or at `kappa`.
    pub fn holds_through(rows: &[(u32, Laurent)], kappa: Option<Q>) -> u32 {
        let mut last = 0;
        for (j, r) in rows {
            let zero = match kappa {
                None => r.is_zero(),
                Some(k) => r.eval_exact(k).is_zero(),
            };
            if !zero {
                break;
            }
            last = *j;
        }
        last
    }
}

pub fn series_relations(tau8: Tau8Coefficient) -> Result<SeriesRelationReport> {
    let s0 = sff_series_table(0, tau8)?;
    let s1 = sff_series_table(1, tau8)?;
    let s2 = sff_series_table(2, tau8)?;
    let c = Laurent::monomial(q(-1, 12), -1);
    let d = lp(&[(1, 1), (1, 1), (1, 1)]).mul(&Laurent::monomial(q(1, 720), -3));
    let e2 = euler_power(&s0, 2);
    let first_rhs: Vec<(u32, Laurent)> = e2.iter().map(|(j, v)| (*j, v.mul(&c))).collect();
    let first = combine(&s1, &first_rhs, -Q::one())
        .into_iter()
        .filter(|(j, _)| (2..=6).contains(j))
        .collect();
    let e3 = euler_power(&s0, 3);
    let e4 = euler_power(&s0, 4);
    let mut op: BTreeMap<u32, Laurent> = BTreeMap::new();
    for (tab, w) in [(&e4, 1), (&e3, 8), (&e2, 12)] {
        for (j, v) in tab.iter() {
            let e = op.entry(*j).or_default();
            *e = e.add(&v.scale(Q::from_integer(w)));
        }
    }
    let second_rhs: Vec<(u32, Laurent)> = op.into_iter().map(|(j, v)| (j, v.mul(&d))).collect();
    let second = combine(&s2, &second_rhs, -Q::one())
        .into_iter()
        .filter(|(j, _)| (2..=4).contains(j))
        .collect();
    Ok(SeriesRelationReport { first, second })
}

/// Outcome of the symmetry and zero-location checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    /// `S̃_l(−τ/κ; 1/κ) = −κ^{1+2l} S̃_l(τ; κ)` term by term, for l = 0, 1, 2.
    pub antisymmetric: [bool; 3],
    /// The same check for order 0 with the printed τ⁸ coefficient.
    pub antisymmetric_printed_tau8: bool,
    /// `(name, |root| for each root)`.
    pub root_moduli: Vec<(String, Vec<f64>)>,
}

impl SymmetryReport {
    pub fn max_modulus_deviation(&self, names: &[&str]) -> f64 {
        self.root_moduli
            .iter()
            .filter(|(n, _)| names.contains(&n.as_str()))
            .flat_map(|(_, r)| r.iter().map(|m| (m - 1.0).abs()))
            .fold(0.0, f64::max)
    }
}

fn antisymmetric(table: &[(u32, Laurent)], order: usize) -> bool {
    table.iter().all(|(j, c)| {
        // τ^j with τ ↦ −τ/κ contributes (−1)^j κ^{−j}
        let sign = if j % 2 == 0 { Q::one() } else { -Q::one() };
        let mapped = c.invert().mul(&Laurent::monomial(sign, -(*j as i32)));
        let target = c.mul(&Laurent::monomial(-Q::one(), 1 + 2 * order as i32));
        mapped == target
    })
}

/// Moduli of the roots of a real polynomial via companion-matrix eigenvalues.
pub fn root_moduli(coefs: &[f64]) -> Result<Vec<f64>> {
    let deg = coefs.len().saturating_sub(1);
    if deg == 0 || coefs[deg] == 0.0 {
        return Err(Error::InvalidArgument("polynomial must have a nonzero leading coefficient".into()));
    }
    let lead = coefs[deg];
    let m = DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -coefs[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    Ok(m.complex_eigenvalues().iter().map(|z| z.norm()).collect())
}

pub fn check_functional_symmetry_and_zeros() -> Result<SymmetryReport> {
    let mut anti = [false; 3];
    for (l, a) in anti.iter_mut().enumerate() {
        *a = antisymmetric(&sff_series_table(l, Tau8Coefficient::P6)?, l);
    }
    let printed = antisymmetric(&sff_series_table(0, Tau8Coefficient::P4)?, 0);
    let mut root_moduli = Vec::new();
    for name in ["p2", "p4", "q2", "q4", "r2", "r4", "p6", "q6"] {
        let coefs = kappa_polynomial(name).and_then(|p| p.poly_coefs()).expect("polynomial");
        root_moduli.push((name.to_string(), root_moduli_sorted(&coefs)?));
    }
    Ok(SymmetryReport {
        antisymmetric: anti,
        antisymmetric_printed_tau8: printed,
        root_moduli,
    })
}

fn root_moduli_sorted(coefs: &[f64]) -> Result<Vec<f64>> {
    let mut r = root_moduli(coefs)?;
    r.sort_by(f64::total_cmp);
    Ok(r)
}

/// Taylor coefficients through τ^n of the β = 1, 4 closed forms (orders 0, 1)
/// in exact arithmetic.
pub fn closed_form_taylor(beta: u32, order: usize, n: u32) -> Result<Vec<(u32, Q)>> {
    let mut out = Vec::new();
    for p in 1..=n {
        let j = p as i128 - 1;
        let c = match (beta, order) {
            // 2τ − τ log(1 + 2τ)
            (1, 0) if p == 1 => Q::from_integer(2),
            (1, 0) => {
                let two_j = Q::from_integer(1i128 << j);
                let sign = if j % 2 == 1 { -Q::one() } else { Q::one() };
                sign * two_j / Q::from_integer(j)
            }
            // τ/2 − (τ/4) log(1 − τ)
            (4, 0) if p == 1 => q(1, 2),
            (4, 0) => q(1, 4 * j),
            // (τ/6)(1 − (1 + 2τ)^{−2})
            (1, 1) if p == 1 => Q::zero(),
            (1, 1) => {
                let v = (j + 1) * (1i128 << j);
                let sign = if j % 2 == 0 { Q::one() } else { -Q::one() };
                -sign * q(v, 6)
            }
            // (τ/96)(1 − (1 − τ)^{−2})
            (4, 1) if p == 1 => Q::zero(),
            (4, 1) => q(-(j + 1), 96),
            _ => return invalid(format!("no closed form for beta {beta}, order {order}")),
        };
        if !c.is_zero() {
            out.push((p, c));
        }
    }
    Ok(out)
}

/// Empirical exponent p in `N²(S̃_N − S̃₀) − S̃₁ ∝ N^{−p}` from N, 2N, 4N.
pub fn correction_residual_order(beta: u32, tau: f64, n: usize) -> Result<f64> {
    let s0 = sff_bulk_term(beta, 0, tau)?;
    let s1 = sff_bulk_term(beta, 1, tau)?;
    let r = |m: usize| -> Result<f64> {
        let nf = m as f64;
        Ok(nf * nf * (sff_scaled(beta, m, tau)? - s0) - s1)
    };
    let (a, b) = (r(n)?, r(2 * n)?);
    Ok((a / b).abs().log2())
}

/// Rational residual helper for tests and reports.
pub fn is_exactly_zero(rows: &[(u32, Laurent)]) -> bool {
    rows.iter().all(|(_, r)| r.is_zero())
}
