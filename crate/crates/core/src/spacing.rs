//! Spacing-distribution generating functions, small-s series tables and the
//! Wigner surmise.

use crate::correlations::rho2_bulk_term;
use crate::error::{invalid, Result};
use crate::gap::e_bulk;
pub use crate::numerics::Q;
use crate::numerics::ChebGrid;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::f64::consts::PI;

fn q(n: i128, d: i128) -> Q {
    Ratio::new(n, d)
}

/// One power of s: `π^pi_pow · Σ_k xi[k] ξ^k · s^s_pow`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTerm {
    pub s_pow: u32,
    pub pi_pow: u32,
    pub xi: Vec<Q>,
}

/// A truncated small-s series with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTable {
    pub name: String,
    pub terms: Vec<SeriesTerm>,
}

fn trim(mut v: Vec<Q>) -> Vec<Q> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn add_poly(a: &mut Vec<Q>, b: &[Q]) {
    if a.len() < b.len() {
        a.resize(b.len(), Q::zero());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += *y;
    }
}

impl SeriesTable {
    /// Merges equal powers and drops vanishing terms. Panics if two terms
    /// with the same power of s carry different powers of π.
    pub fn new(name: &str, terms: Vec<SeriesTerm>) -> Self {
        let mut map: BTreeMap<u32, SeriesTerm> = BTreeMap::new();
        for t in terms {
            match map.get_mut(&t.s_pow) {
                Some(e) => {
                    assert_eq!(e.pi_pow, t.pi_pow, "mixed powers of π at s^{}", t.s_pow);
                    add_poly(&mut e.xi, &t.xi);
                }
                None => {
                    map.insert(t.s_pow, t);
                }
            }
        }
        let terms = map
            .into_values()
            .filter_map(|mut t| {
                t.xi = trim(t.xi);
                (!t.xi.is_empty()).then_some(t)
            })
            .collect();
        SeriesTable { name: name.to_string(), terms }
    }

    pub fn max_power(&self) -> u32 {
        self.terms.last().map_or(0, |t| t.s_pow)
    }

    /// Terms with `s_pow ≤ p`.
    pub fn truncated(&self, p: u32) -> Self {
        let terms = self.terms.iter().filter(|t| t.s_pow <= p).cloned().collect();
        SeriesTable::new(&self.name, terms)
    }

    pub fn scaled(&self, c: Q) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| SeriesTerm {
                xi: t.xi.iter().map(|x| x * c).collect(),
                ..t.clone()
            })
            .collect();
        SeriesTable::new(&self.name, terms)
    }

    /// `d²/ds²` applied term by term.
    pub fn second_derivative(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.s_pow >= 2)
            .map(|t| {
                let f = Q::from_integer((t.s_pow * (t.s_pow - 1)) as i128);
                SeriesTerm {
                    s_pow: t.s_pow - 2,
                    pi_pow: t.pi_pow,
                    xi: t.xi.iter().map(|x| x * f).collect(),
                }
            })
            .collect();
        SeriesTable::new(&format!("{}''", self.name), terms)
    }

    /// Multiplies by `s^k`.
    pub fn times_s_pow(&self, k: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| SeriesTerm { s_pow: t.s_pow + k, ..t.clone() })
            .collect();
        SeriesTable::new(&self.name, terms)
    }

    /// Divides the ξ-polynomials by ξ^k; `None` if some term is not divisible.
    pub fn divide_xi_pow(&self, k: usize) -> Option<Self> {
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.xi.iter().take(k).any(|c| !c.is_zero()) {
                return None;
            }
            terms.push(SeriesTerm {
                xi: t.xi.iter().skip(k).copied().collect(),
                ..t.clone()
            });
        }
        Some(SeriesTable::new(&self.name, terms))
    }

    /// `c·(d²/ds²)(s²·self)` truncated to the stored order.
    pub fn differential_image(&self, c: Q) -> Self {
        self.times_s_pow(2).second_derivative().scaled(c).truncated(self.max_power())
    }

    pub fn eval(&self, s: f64, xi: f64) -> f64 {
        eval_series(self, s, xi)
    }

    /// Gap series of the finite-N CUE through s¹¹, exact in `1/N²`.
    pub fn e_cue_finite(n: u64) -> Self {
        let h = q(1, (n as i128) * (n as i128));
        let terms = e_cue_source()
            .into_iter()
            .map(|(s_pow, pi_pow, xi_pow, c, hp)| {
                let mut val = Q::zero();
                let mut hk = Q::from_integer(1);
                for a in hp {
                    val += a * hk;
                    hk *= h;
                }
                xi_term(s_pow, pi_pow, xi_pow, c * val)
            })
            .collect();
        SeriesTable::new(&format!("E_CUE(N={n})"), terms)
    }

    /// Coefficient of `N^{−2l}` in the finite-N gap series.
    pub fn e_bulk_beta2(l: usize) -> Self {
        let terms = e_cue_source()
            .into_iter()
            .map(|(s_pow, pi_pow, xi_pow, c, hp)| {
                let a = hp.get(l).copied().unwrap_or_else(Q::zero);
                xi_term(s_pow, pi_pow, xi_pow, c * a)
            })
            .collect();
        SeriesTable::new(&format!("E_{l},2"), terms)
    }

    /// Spacing generating function at β = 2, order `l ∈ {0, 1, 2}`, through s⁹.
    pub fn p_bulk_beta2(l: usize) -> Self {
        let rows: &[(u32, u32, i128, i128, usize)] = match l {
            0 => &[
                (2, 2, 1, 3, 0),
                (4, 4, -2, 45, 0),
                (6, 6, 1, 315, 0),
                (7, 6, -1, 4050, 1),
                (8, 8, -2, 14175, 0),
                (9, 8, 11, 496125, 1),
            ],
            1 => &[
                (2, 2, -1, 3, 0),
                (4, 4, 1, 9, 0),
                (6, 6, -2, 135, 0),
                (7, 6, 1, 675, 1),
                (8, 8, 1, 945, 0),
                (9, 8, -121, 595350, 1),
            ],
            2 => &[
                (4, 4, -1, 15, 0),
                (6, 6, 1, 45, 0),
                (7, 6, -1, 450, 1),
                (8, 8, -2, 675, 0),
                (9, 8, 44, 70875, 1),
            ],
            _ => &[],
        };
        let terms = rows
            .iter()
            .map(|&(s, p, n, d, k)| xi_term(s, p, k, q(n, d)))
            .collect();
        SeriesTable::new(&format!("P_{l},2"), terms)
    }

    /// Spacing generating function at β = 1, order `l ∈ {0, 1}`, through s⁹.
    pub fn p_bulk_beta1(l: usize) -> Self {
        // (ξ − 2) and (ξ − 2)(3ξ − 32) = 3ξ² − 38ξ + 64
        let lin = |c: Q| vec![c * q(-2, 1), c];
        let quad = |c: Q| vec![c * q(64, 1), c * q(-38, 1), c * q(3, 1)];
        let plain = |c: Q| vec![c];
        let rows: Vec<(u32, u32, Vec<Q>)> = match l {
            0 => vec![
                (1, 2, plain(q(1, 6))),
                (3, 4, plain(q(-1, 60))),
                (4, 4, lin(q(-1, 270))),
                (5, 6, plain(q(1, 1680))),
                (6, 6, lin(q(1, 4725))),
                (7, 8, plain(q(-1, 90720))),
                (8, 8, quad(q(1, 5292000))),
                (9, 10, plain(q(1, 7983360))),
            ],
            1 => vec![
                (1, 2, plain(q(-1, 6))),
                (3, 4, plain(q(1, 18))),
                (4, 4, lin(q(1, 54))),
                (5, 6, plain(q(-1, 240))),
                (6, 6, lin(q(-4, 2025))),
                (7, 8, plain(q(1, 7560))),
                (8, 8, quad(q(-1, 352800))),
                (9, 10, plain(q(-1, 435456))),
            ],
            _ => vec![],
        };
        let terms = rows
            .into_iter()
            .map(|(s_pow, pi_pow, xi)| SeriesTerm { s_pow, pi_pow, xi })
            .collect();
        SeriesTable::new(&format!("P_{l},1"), terms)
    }
}

fn xi_term(s_pow: u32, pi_pow: u32, xi_pow: usize, c: Q) -> SeriesTerm {
    let mut xi = vec![Q::zero(); xi_pow + 1];
    xi[xi_pow] = c;
    SeriesTerm { s_pow, pi_pow, xi }
}

type Row = (u32, u32, usize, Q, Vec<Q>);

/// `(s power, π power, ξ power, rational prefactor, polynomial in h = 1/N²)`.
fn e_cue_source() -> Vec<Row> {
    let one = Q::from_integer(1);
    let poly = |coefs: &[i128]| coefs.iter().map(|&c| Q::from_integer(c)).collect::<Vec<_>>();
    let mul = |a: &[Q], b: &[Q]| {
        let mut out = vec![Q::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let prod = |fs: &[&[i128]]| fs.iter().fold(vec![one], |acc, f| mul(&acc, &poly(f)));
    vec![
        (0, 0, 0, one, vec![one]),
        (1, 0, 1, -one, vec![one]),
        (4, 2, 2, q(1, 36), prod(&[&[1, -1]])),
        (6, 4, 2, q(-1, 1350), prod(&[&[1, -1], &[2, -3]])),
        (8, 6, 2, q(1, 52920), prod(&[&[1, -1], &[1, -2], &[3, -5]])),
        (9, 6, 3, q(-1, 291600), prod(&[&[1, -4], &[1, -1], &[1, -1]])),
        (10, 8, 2, q(-1, 1275750), prod(&[&[1, -1], &[2, -3], &[1, -5, 7]])),
        (11, 8, 3, q(1, 29767500), prod(&[&[1, -1], &[1, -1], &[1, -4], &[6, -19]])),
    ]
}

/// Evaluates the truncated series in floating point.
pub fn eval_series(table: &SeriesTable, s: f64, xi: f64) -> f64 {
    table
        .terms
        .iter()
        .map(|t| {
            let poly = t.xi.iter().rev().fold(0.0, |acc, c| acc * xi + c.to_f64().unwrap_or(f64::NAN));
            poly * PI.powi(t.pi_pow as i32) * s.powi(t.s_pow as i32)
        })
        .sum()
}

/// `(1/ξ²) d²/ds² 𝓔_{order,β}`, falling back to the two-point term at ξ = 0.
pub fn p_bulk(beta: u32, order: usize, s: f64, xi: f64) -> Result<f64> {
    if !matches!(beta, 1 | 2 | 4) || order > 1 {
        return invalid(format!("p_bulk needs beta in {{1, 2, 4}} and order 0 or 1, got ({beta}, {order})"));
    }
    if !(s > 0.0 && s <= 3.0) {
        return invalid(format!("p_bulk needs s in (0, 3], got {s}"));
    }
    if !(0.0..=1.0).contains(&xi) {
        return invalid(format!("xi must lie in [0, 1], got {xi}"));
    }
    if xi == 0.0 {
        return rho2_bulk_term(beta, order, s);
    }
    let curve = SpacingCurve::new(beta, order, xi)?;
    Ok(curve.at(s))
}

/// `P_{order,β}(·; ξ)` sampled once on a 64-point Chebyshev grid over `[0, 4]`.
#[derive(Debug, Clone)]
pub struct SpacingCurve {
    grid: ChebGrid,
    values: Vec<f64>,
}

impl SpacingCurve {
    pub const S_MAX: f64 = 4.0;

    pub fn new(beta: u32, order: usize, xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi <= 1.0) {
            return invalid(format!("SpacingCurve needs xi in (0, 1], got {xi}"));
        }
        let grid = ChebGrid::new(64, 0.0, Self::S_MAX)?;
        let mut e = Vec::with_capacity(grid.len());
        for &s in &grid.nodes {
            e.push(e_bulk(beta, order, s, xi)?);
        }
        let values = grid
            .derivative(&e, 2)?
            .into_iter()
            .map(|v| v / (xi * xi))
            .collect();
        Ok(SpacingCurve { grid, values })
    }

    pub fn at(&self, s: f64) -> f64 {
        self.grid.interpolate(&self.values, s)
    }

    /// `c·(d²/ds²)(s² P)` evaluated spectrally.
    pub fn differential_image(&self, c: f64) -> Result<Vec<f64>> {
        let s2p: Vec<f64> = self.grid.nodes.iter().zip(&self.values).map(|(s, p)| s * s * p).collect();
        Ok(self.grid.derivative(&s2p, 2)?.into_iter().map(|v| c * v).collect())
    }

    pub fn grid(&self) -> &ChebGrid {
        &self.grid
    }
}

const SURMISE_A: f64 = 32.0 / (PI * PI);
const SURMISE_B: f64 = 4.0 / PI;

/// `(32s²/π²) e^{−4s²/π}`.
pub fn wigner_surmise(s: f64) -> f64 {
    SURMISE_A * s * s * (-SURMISE_B * s * s).exp()
}

/// `−(1/12)(d²/ds²)(s² p^W(s))`.
pub fn surmise_correction(s: f64) -> f64 {
    let (b, s2) = (SURMISE_B, s * s);
    -SURMISE_A / 12.0 * (12.0 * s2 - 18.0 * b * s2 * s2 + 4.0 * b * b * s2 * s2 * s2) * (-b * s2).exp()
}

/// Max over the grids of `|P₁ − c_β (d²/ds²)(s² P₀)|`, `c_β = −1/(6β)`.
pub fn verify_spacing_identity(beta: u32, s_grid: &[f64], xi_grid: &[f64]) -> Result<f64> {
    if !matches!(beta, 1 | 2 | 4) {
        return invalid(format!("beta must be 1, 2 or 4, got {beta}"));
    }
    if s_grid.iter().any(|&s| !(s > 0.0 && s <= SpacingCurve::S_MAX)) {
        return invalid("s grid must lie in (0, 4]");
    }
    let c = -1.0 / (6.0 * beta as f64);
    let mut worst: f64 = 0.0;
    for &xi in xi_grid {
        let p0 = SpacingCurve::new(beta, 0, xi)?;
        let p1 = SpacingCurve::new(beta, 1, xi)?;
        let image = p0.differential_image(c)?;
        for &s in s_grid {
            let rhs = p0.grid().interpolate(&image, s);
            worst = worst.max((p1.at(s) - rhs).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss_legendre;

    #[test]
    fn spacing_tables_follow_from_gap_series() {
        // P = (1/ξ²) E'' applied to each 1/N² order of the gap series
        for l in 0..3 {
            let derived = SeriesTable::e_bulk_beta2(l)
                .second_derivative()
                .divide_xi_pow(2)
                .unwrap()
                .truncated(9);
            let table = SeriesTable::p_bulk_beta2(l);
            assert_eq!(derived.terms, table.terms, "order {l}");
        }
    }

    #[test]
    fn series_identities_exact() {
        let img = SeriesTable::p_bulk_beta2(0).differential_image(q(-1, 12));
        assert_eq!(img.terms, SeriesTable::p_bulk_beta2(1).terms);
        let img = SeriesTable::p_bulk_beta1(0).differential_image(q(-1, 6));
        assert_eq!(img.terms, SeriesTable::p_bulk_beta1(1).terms);
        let e = SeriesTable::e_bulk_beta2(0);
        let e1 = e.second_derivative().times_s_pow(2).scaled(q(-1, 12)).truncated(e.max_power());
        assert_eq!(e1.terms, SeriesTable::e_bulk_beta2(1).terms);
    }

    #[test]
    fn series_values() {
        let e = SeriesTable::e_bulk_beta2(0);
        assert_eq!(eval_series(&e, 0.0, 0.7), 1.0);
        assert_eq!(eval_series(&SeriesTable::p_bulk_beta2(1), 0.0, 0.7), 0.0);
        let s: f64 = 0.2;
        let lead = 1.0 - s + PI.powi(2) * s.powi(4) / 36.0;
        assert!((eval_series(&e, s, 1.0) - lead).abs() < 2e-4);
        let p2 = SeriesTable::p_bulk_beta2(2).truncated(4);
        assert!((eval_series(&p2, 0.1, 1.0) / (-PI.powi(4) * 1e-4 / 15.0) - 1.0).abs() < 1e-14);
        // N → ∞ limit of the finite table
        let big = SeriesTable::e_cue_finite(1000);
        assert!((eval_series(&big, 0.3, 0.6) - eval_series(&e, 0.3, 0.6)).abs() < 1e-8);
    }

    #[test]
    fn tables_match_retyped_values() {
        let t = SeriesTable::p_bulk_beta1(0);
        let s8 = t.terms.iter().find(|t| t.s_pow == 8).unwrap();
        // π⁸(ξ−2)(3ξ−32)/5292000 at ξ = 1: (−1)(−29)/5292000
        let v: Q = s8.xi.iter().fold(Q::zero(), |a, c| a + c);
        assert_eq!(v, q(29, 5292000));
        let t = SeriesTable::e_cue_finite(2);
        // the ξ³ terms carry a factor 1 − 4/N²
        assert!(t.terms.iter().all(|t| t.s_pow != 9 && t.s_pow != 11));
    }

    #[test]
    fn p_bulk_small_s() {
        let s: f64 = 0.1;
        let p = p_bulk(2, 0, s, 1.0).unwrap();
        let two_terms = PI.powi(2) * s * s / 3.0 - 2.0 * PI.powi(4) * s.powi(4) / 45.0;
        assert!((p / two_terms - 1.0).abs() < 2e-4);
        let p = p_bulk(2, 1, s, 1.0).unwrap();
        let two_terms = -PI.powi(2) * s * s / 3.0 + PI.powi(4) * s.powi(4) / 9.0;
        assert!((p / two_terms - 1.0).abs() < 5e-4);
        for (beta, table) in [
            (2, SeriesTable::p_bulk_beta2(0)),
            (2, SeriesTable::p_bulk_beta2(1)),
            (1, SeriesTable::p_bulk_beta1(0)),
            (1, SeriesTable::p_bulk_beta1(1)),
        ] {
            let order = if table.name.starts_with("P_0") { 0 } else { 1 };
            for xi in [0.5, 1.0] {
                let p = p_bulk(beta, order, s, xi).unwrap();
                let series = eval_series(&table, s, xi);
                assert!((p / series - 1.0).abs() < 1e-6, "{} {p} {series}", table.name);
            }
        }
    }

    #[test]
    fn xi_zero_uses_two_point_function() {
        for beta in [1, 2, 4] {
            let small = p_bulk(beta, 0, 0.8, 1e-3).unwrap();
            let zero = p_bulk(beta, 0, 0.8, 0.0).unwrap();
            assert!((small - zero).abs() < 5e-3, "beta {beta}: {small} {zero}");
        }
    }

    #[test]
    fn level_repulsion() {
        for beta in [2, 4] {
            let c = SpacingCurve::new(beta, 0, 1.0).unwrap();
            assert!(c.at(0.0).abs() < 1e-8);
            assert!((0..30).all(|i| c.at(0.1 * i as f64) > -1e-8));
        }
        let c = SpacingCurve::new(1, 0, 1.0).unwrap();
        let s = 1e-3;
        assert!((c.at(s) / (PI * PI * s / 6.0) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn identities_numerically() {
        let s: Vec<f64> = (0..24).map(|i| 0.2 + 0.1 * i as f64).collect();
        assert!(verify_spacing_identity(2, &s, &[0.5, 1.0]).unwrap() < 1e-4);
        assert!(verify_spacing_identity(1, &s, &[1.0]).unwrap() < 1e-4);
        assert!(verify_spacing_identity(4, &s, &[1.0]).unwrap() < 1e-4);
    }

    #[test]
    fn surmise_moments() {
        let rule = gauss_legendre(200, 0.0, 12.0).unwrap();
        assert!((rule.integrate(wigner_surmise) - 1.0).abs() < 1e-10);
        assert!((rule.integrate(|s| s * wigner_surmise(s)) - 1.0).abs() < 1e-10);
        assert!(rule.integrate(surmise_correction).abs() < 1e-9);
        assert!(rule.integrate(|s| s * surmise_correction(s)).abs() < 1e-9);
    }

    #[test]
    fn surmise_correction_matches_differences() {
        let h = 1e-4;
        for s in [0.3, 0.9, 1.7] {
            let g = |s: f64| s * s * wigner_surmise(s);
            let fd = -(g(s + h) - 2.0 * g(s) + g(s - h)) / (h * h) / 12.0;
            assert!((fd - surmise_correction(s)).abs() < 1e-6);
        }
    }

    #[test]
    fn correction_moments_vanish() {
        let c = SpacingCurve::new(2, 1, 1.0).unwrap();
        let rule = gauss_legendre(64, 0.0, 4.0).unwrap();
        assert!(rule.integrate(|s| c.at(s)).abs() < 1e-3);
        assert!(rule.integrate(|s| s * c.at(s)).abs() < 1e-3);
    }

    #[test]
    fn surmise_tracks_exact_correction() {
        let c = SpacingCurve::new(2, 1, 1.0).unwrap();
        let worst = (0..=300)
            .map(|i| 0.01 * i as f64)
            .map(|s| (c.at(s) - surmise_correction(s)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.02, "{worst}");
    }
}
