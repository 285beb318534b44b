//! Gap-probability generating functions.
//!
//! Bulk values come from Nyström discretisations of Fredholm determinants on
//! a Gauss–Legendre grid; finite-N CUE values from an exact N×N Toeplitz
//! determinant. β = 1 and β = 4 are assembled from the ± kernels on `(0, s/2)`.

use crate::error::{invalid, Error, Result};
use crate::kernels::{kernel_eval, KernelSpec};
use crate::numerics::{legendre_unit, ChebGrid, DEFAULT_LEGENDRE_NODES};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// `E₀`, `E₁` at one `(s, ξ, β)` plus diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct GapResult {
    pub s: f64,
    pub xi: f64,
    pub beta: u32,
    pub e0: f64,
    pub e1: f64,
    pub quad_order: usize,
    /// `|E₀(n) − E₀(n/2)|`, a cheap convergence indicator.
    pub convergence: f64,
    pub warning: Option<String>,
}

struct Nystrom {
    det: f64,
    correction: f64,
}

/// `det(I − ξK)` and `−det(I − ξK)·Tr((I − ξK)⁻¹ ξL)` on `(0, a)`.
fn nystrom(k: KernelSpec, l: Option<KernelSpec>, a: f64, xi: f64, n: usize) -> Result<Nystrom> {
    if a == 0.0 || xi == 0.0 {
        return Ok(Nystrom { det: 1.0, correction: 0.0 });
    }
    let unit = legendre_unit(n)?;
    let x: Vec<f64> = unit.nodes.iter().map(|u| u * a).collect();
    let sw: Vec<f64> = unit.weights.iter().map(|w| (w * a).sqrt()).collect();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        d - xi * sw[i] * kernel_eval(k, x[i], x[j]) * sw[j]
    });
    let lu = m.lu();
    let det = lu.determinant();
    let correction = match l {
        None => 0.0,
        Some(l) => {
            let lm = DMatrix::from_fn(n, n, |i, j| xi * sw[i] * kernel_eval(l, x[i], x[j]) * sw[j]);
            let sol = lu
                .solve(&lm)
                .ok_or_else(|| Error::InvalidArgument("I − ξK is singular".into()))?;
            -det * sol.trace()
        }
    };
    Ok(Nystrom { det, correction })
}

fn check_args(s: f64, xi: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return invalid(format!("interval length must be finite and >= 0, got {s}"));
    }
    if !(0.0..=1.0).contains(&xi) {
        return invalid(format!("xi must lie in [0, 1], got {xi}"));
    }
    Ok(())
}

/// `det(I − ξ𝕂_s)` for a kernel on `(0, s)` with an n-point rule.
pub fn fredholm_det(kernel: KernelSpec, s: f64, xi: f64, n: usize) -> Result<f64> {
    check_args(s, xi)?;
    Ok(nystrom(kernel, None, s, xi, n)?.det)
}

/// `−det(I − ξ𝕂_s)·Tr((I − ξ𝕂_s)⁻¹ ξ𝕃_s)` with an n-point rule.
pub fn fredholm_trace_correction(k: KernelSpec, l: KernelSpec, s: f64, xi: f64, n: usize) -> Result<f64> {
    check_args(s, xi)?;
    Ok(nystrom(k, Some(l), s, xi, n)?.correction)
}

/// Doubles n from 16 until successive determinants agree to 1e-10.
pub fn fredholm_det_converged(kernel: KernelSpec, s: f64, xi: f64) -> Result<(f64, usize, Option<String>)> {
    check_args(s, xi)?;
    let mut n = 16;
    let mut prev = nystrom(kernel, None, s, xi, n)?.det;
    while n < 256 {
        n *= 2;
        let cur = nystrom(kernel, None, s, xi, n)?.det;
        if (cur - prev).abs() < 1e-10 {
            return Ok((cur, n, None));
        }
        prev = cur;
    }
    Ok((prev, n, Some("Fredholm determinant not converged at n = 256".into())))
}

/// `(E₀±, E₁±)(s; ξ)`: the ± kernels on `(0, s/2)`.
pub fn e_pm(plus: bool, s: f64, xi: f64, n: usize) -> Result<(f64, f64)> {
    check_args(s, xi)?;
    let (k, l) = if plus {
        (KernelSpec::PlusSym, KernelSpec::LPlus)
    } else {
        (KernelSpec::MinusSym, KernelSpec::LMinus)
    };
    let r = nystrom(k, Some(l), s / 2.0, xi, n)?;
    Ok((r.det, r.correction))
}

fn e_pair(beta: u32, s: f64, xi: f64, n: usize) -> Result<(f64, f64)> {
    check_args(s, xi)?;
    match beta {
        2 => {
            let r = nystrom(KernelSpec::SineLimit, Some(KernelSpec::LCorrection), s, xi, n)?;
            Ok((r.det, r.correction))
        }
        1 => {
            let xh = 2.0 * xi - xi * xi;
            let (m0, m1) = e_pm(false, s, xh, n)?;
            let (p0, p1) = e_pm(true, s, xh, n)?;
            let w = 1.0 / (2.0 - xi);
            Ok((w * ((1.0 - xi) * m0 + p0), w * ((1.0 - xi) * m1 + p1)))
        }
        4 => {
            let (m0, m1) = e_pm(false, s, xi, n)?;
            let (p0, p1) = e_pm(true, s, xi, n)?;
            Ok((0.5 * (m0 + p0), 0.125 * (m1 + p1)))
        }
        _ => invalid(format!("e_bulk needs beta in {{1, 2, 4}}, got {beta}")),
    }
}

/// Bulk `E_{order,β}((0,s); ξ)` with the default rule.
pub fn e_bulk(beta: u32, order: usize, s: f64, xi: f64) -> Result<f64> {
    e_bulk_with(beta, order, s, xi, DEFAULT_LEGENDRE_NODES)
}

pub fn e_bulk_with(beta: u32, order: usize, s: f64, xi: f64, n: usize) -> Result<f64> {
    let (e0, e1) = e_pair(beta, s, xi, n)?;
    match order {
        0 => Ok(e0),
        1 => Ok(e1),
        _ => invalid(format!("e_bulk order must be 0 or 1, got {order}")),
    }
}

/// Both orders at once with a convergence indicator against n/2 nodes.
pub fn gap_bulk(beta: u32, s: f64, xi: f64, n: usize) -> Result<GapResult> {
    if n < 16 {
        return invalid("Fredholm quadrature order must be at least 16");
    }
    let (e0, e1) = e_pair(beta, s, xi, n)?;
    let (half, _) = e_pair(beta, s, xi, n / 2)?;
    let convergence = (e0 - half).abs();
    let warning = (convergence > 1e-10).then(|| format!("E0 changed by {convergence:.3e} between n/2 and n"));
    Ok(GapResult {
        s,
        xi,
        beta,
        e0,
        e1,
        quad_order: n,
        convergence,
        warning,
    })
}

/// Max over `s_grid` of `|E₁ − c_β s² E₀″|`, `c_β = −1/(6β)`, with `E₀″`
/// from a 64-point Chebyshev fit on `[0, 1.07·max s]`.
pub fn verify_gap_identity(beta: u32, s_grid: &[f64], xi: f64) -> Result<f64> {
    if s_grid.is_empty() || s_grid.iter().any(|&s| !(s > 0.0 && s <= 6.0)) {
        return invalid("identity grid must be nonempty within (0, 6]");
    }
    let hi = 1.07 * s_grid.iter().copied().fold(0.0, f64::max);
    let g = ChebGrid::new(64, 0.0, hi)?;
    let mut e0 = Vec::with_capacity(g.len());
    for &s in &g.nodes {
        e0.push(e_bulk(beta, 0, s, xi)?);
    }
    let d2 = g.derivative(&e0, 2)?;
    let c = -1.0 / (6.0 * beta as f64);
    let mut worst: f64 = 0.0;
    for &s in s_grid {
        let e1 = e_bulk(beta, 1, s, xi)?;
        worst = worst.max((e1 - c * s * s * g.interpolate(&d2, s)).abs());
    }
    Ok(worst)
}

/// Exact `𝓔_N^CUE((0,φ); ξ) = det[δ_jk − (ξ/2π)∫₀^φ e^{i(j−k)θ} dθ]`.
pub fn e_finite_cue(n: usize, phi: f64, xi: f64) -> Result<f64> {
    if n == 0 {
        return invalid("N must be positive");
    }
    if !(phi >= 0.0 && phi <= 2.0 * PI) {
        return invalid(format!("phi must lie in [0, 2π], got {phi}"));
    }
    if !(0.0..=1.0).contains(&xi) {
        return invalid(format!("xi must lie in [0, 1], got {xi}"));
    }
    let coeff = |m: i64| -> Complex64 {
        if m == 0 {
            Complex64::new(phi, 0.0)
        } else {
            let mf = m as f64;
            // (e^{imφ} − 1)/(im)
            Complex64::new((mf * phi).sin() / mf, (1.0 - (mf * phi).cos()) / mf)
        }
    };
    let c = xi / (2.0 * PI);
    let m = DMatrix::from_fn(n, n, |j, k| {
        let d = if j == k { 1.0 } else { 0.0 };
        Complex64::new(d, 0.0) - coeff(j as i64 - k as i64) * c
    });
    Ok(m.determinant().re)
}

/// Richardson output for the finite-N CUE data.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub e0: f64,
    pub e1: f64,
    /// Empirical exponent of `E_N − E₀ − E₁/N²`.
    pub residual_order: f64,
    pub warning: Option<String>,
}

/// Fits `E_N = Σ_l c_l N^{−2l}` through the given N, reads off c₀ and c₁, and
/// measures the order of what remains after two terms against the Fredholm
/// limit.
pub fn extract_correction(ns: &[usize], s: f64, xi: f64) -> Result<Extrapolation> {
    if ns.len() < 3 {
        return invalid("extract_correction needs at least three N values");
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let h: Vec<f64> = ns.iter().map(|&n| 1.0 / (n as f64).powi(2)).collect();
    let mut e = Vec::with_capacity(ns.len());
    for &n in &ns {
        e.push(e_finite_cue(n, 2.0 * PI * s / n as f64, xi)?);
    }
    let coef = poly_fit_exact(&h, &e);
    let monotone = e.windows(3).all(|w| (w[1] - w[0]) * (w[2] - w[1]) > 0.0);
    let limit = e_bulk(2, 0, s, xi)?;
    // r(N) = N²(E_N − E₀) = E₁ + c N^{2−q}
    let r: Vec<f64> = ns
        .iter()
        .zip(&e)
        .map(|(&n, &v)| (n as f64).powi(2) * (v - limit))
        .collect();
    let k = r.len();
    let ratio = (r[k - 3] - r[k - 2]) / (r[k - 2] - r[k - 1]);
    let step = ns[k - 2] as f64 / ns[k - 3] as f64;
    let residual_order = 2.0 + ratio.ln() / step.ln();
    Ok(Extrapolation {
        e0: coef[0],
        e1: coef[1],
        residual_order,
        warning: (!monotone).then(|| "finite-N data not monotone in N".to_string()),
    })
}

/// Coefficients of the interpolating polynomial through `(h_i, y_i)`.
fn poly_fit_exact(h: &[f64], y: &[f64]) -> Vec<f64> {
    let n = h.len();
    let v = DMatrix::from_fn(n, n, |i, j| h[i].powi(j as i32));
    let rhs = nalgebra::DVector::from_column_slice(y);
    let sol = v.lu().solve(&rhs).expect("distinct abscissae");
    sol.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ChebGrid;
    use crate::spacing::{eval_series, SeriesTable};

    #[test]
    fn trivial_limits() {
        assert_eq!(e_bulk(2, 0, 1.3, 0.0).unwrap(), 1.0);
        assert_eq!(e_bulk(2, 1, 1.3, 0.0).unwrap(), 0.0);
        assert_eq!(e_bulk(2, 0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(e_bulk(4, 1, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(e_finite_cue(12, 1.0, 0.0).unwrap(), 1.0);
        assert!(e_finite_cue(12, 2.0 * PI, 1.0).unwrap().abs() < 1e-12);
        assert!(e_bulk(2, 0, 1.0, 1.5).is_err());
    }

    #[test]
    fn small_s_behaviour() {
        let v = e_bulk(2, 0, 1e-3, 1.0).unwrap();
        assert!((v - (1.0 - 1e-3)).abs() < 1e-6);
        let s: f64 = 0.05;
        let v = e_bulk(2, 0, s, 1.0).unwrap();
        let series = 1.0 - s + PI.powi(2) * s.powi(4) / 36.0;
        assert!((v - series).abs() < 1e-8);
    }

    #[test]
    fn correction_matches_series() {
        // E₁ is the coefficient of 1/N² in the finite-N series
        let (s, xi) = (0.1, 1.0);
        let got = e_bulk(2, 1, s, xi).unwrap();
        let series = eval_series(&SeriesTable::e_bulk_beta2(1), s, xi);
        assert!((got - series).abs() < 1e-6, "{got} {series}");
    }

    #[test]
    fn finite_cue_matches_series() {
        let n = 20usize;
        let s = 0.5;
        let v = e_finite_cue(n, 2.0 * PI * s / n as f64, 1.0).unwrap();
        let series = eval_series(&SeriesTable::e_cue_finite(n as u64), s, 1.0);
        assert!((v - series).abs() < 1e-6, "{v} {series}");
    }

    #[test]
    fn nystrom_spectral_convergence() {
        let reference = fredholm_det(KernelSpec::SineLimit, 2.0, 1.0, 256).unwrap();
        let err = |n| (fredholm_det(KernelSpec::SineLimit, 2.0, 1.0, n).unwrap() - reference).abs();
        let (e8, e12, e16) = (err(8), err(12), err(16));
        assert!(e12 < e8 / 50.0 && e16 < 1e-12, "{e8} {e12} {e16}");
        let (v, n, w) = fredholm_det_converged(KernelSpec::SineLimit, 1.0, 1.0).unwrap();
        assert!(w.is_none() && n <= 64);
        assert!((v - fredholm_det(KernelSpec::SineLimit, 1.0, 1.0, 128).unwrap()).abs() < 1e-12);
    }

    fn identity_residual(beta: u32, xi: f64) -> f64 {
        let grid: Vec<f64> = (0..30).map(|i| 0.1 + 0.1 * i as f64).collect();
        verify_gap_identity(beta, &grid, xi).unwrap()
    }

    #[test]
    fn generating_function_identities() {
        for xi in [0.25, 0.5, 1.0] {
            assert!(identity_residual(2, xi) < 1e-6);
            assert!(identity_residual(1, xi) < 1e-5);
            assert!(identity_residual(4, xi) < 1e-5);
        }
    }

    #[test]
    fn pm_level_identity() {
        let g = ChebGrid::new(64, 0.0, 3.2).unwrap();
        for plus in [true, false] {
            let xi = 0.8;
            let e0 = g.sample(|s| e_pm(plus, s, xi, 64).unwrap().0);
            let d2 = g.derivative(&e0, 2).unwrap();
            for s in [0.4, 1.1, 2.5] {
                let e1 = e_pm(plus, s, xi, 64).unwrap().1;
                assert!((e1 + s * s / 6.0 * g.interpolate(&d2, s)).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn spectral_second_derivative_against_differences() {
        let g = ChebGrid::new(64, 0.0, 3.0).unwrap();
        let e0 = g.sample(|s| e_bulk(2, 0, s, 1.0).unwrap());
        let d2 = g.derivative(&e0, 2).unwrap();
        let h = 1e-3;
        let s = 1.2;
        let f = |s| e_bulk(2, 0, s, 1.0).unwrap();
        let fd = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h);
        assert!((g.interpolate(&d2, s) - fd).abs() < 1e-5);
    }

    #[test]
    fn e0_decreasing_in_s() {
        let vals: Vec<f64> = (0..20).map(|i| e_bulk(1, 0, 0.15 * i as f64, 0.6).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(vals.iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn richardson_recovers_limit() {
        let ex = extract_correction(&[20, 40, 80], 1.0, 1.0).unwrap();
        assert!((ex.e0 - e_bulk(2, 0, 1.0, 1.0).unwrap()).abs() < 1e-7);
        assert!((ex.e1 - e_bulk(2, 1, 1.0, 1.0).unwrap()).abs() < 1e-4);
        assert!((ex.residual_order - 4.0).abs() < 0.3, "{}", ex.residual_order);
        assert!(ex.warning.is_none());
    }
}
