//! n-point correlations: determinants of the CUE kernel, Pfaffians of the
//! COE/CSE 2×2 kernels, and the closed-form bulk two-point terms.
//!
//! Bulk variables: for β = 1, 2 an angle is `θ = 2πX/N` and ρ_n is scaled by
//! `(2π/N)^n`. For β = 4 the CSE kernel runs at index 2N and the closed forms
//! use `θ = πX/N` with scale `(π/N)^n`, so the limiting two-point function
//! tends to 1/4 rather than 1.

use crate::error::{invalid, Error, Result};
use crate::kernels::{cue_kernel, pfaffian_entries, sinc};
use crate::numerics::{sine_integral, ChebGrid};
use nalgebra::DMatrix;
use std::f64::consts::PI;

fn has_repeats(angles: &[f64]) -> bool {
    angles
        .iter()
        .enumerate()
        .any(|(i, a)| angles[i + 1..].iter().any(|b| a == b))
}

/// `det[K_N(θ_j, θ_k)]`.
pub fn rho_n_cue(n: usize, angles: &[f64]) -> Result<f64> {
    if angles.is_empty() || angles.len() > n {
        return invalid(format!("rho_n_cue needs 1 <= n <= N, got n={} N={n}", angles.len()));
    }
    if has_repeats(angles) {
        return Ok(0.0);
    }
    let m = angles.len();
    let k = DMatrix::from_fn(m, m, |i, j| cue_kernel(n, angles[i], angles[j]));
    Ok(k.determinant())
}

/// Pfaffian of a real antisymmetric matrix of even order.
///
/// Householder reduction to tridiagonal skew form; each reflector contributes
/// a factor −1 and every other subdiagonal entry enters the product.
pub fn pfaffian(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if n != a.ncols() {
        return invalid("pfaffian needs a square matrix");
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(1.0);
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..=i {
            if (a[(i, j)] + a[(j, i)]).abs() > 1e-12 * scale {
                return invalid(format!("matrix is not antisymmetric at ({i},{j})"));
            }
        }
    }
    let mut a = a.clone();
    let mut pf = 1.0;
    for i in 0..n - 2 {
        let m = n - i - 1;
        let x: Vec<f64> = (0..m).map(|r| a[(i + 1 + r, i)]).collect();
        let sigma: f64 = x[1..].iter().map(|v| v * v).sum();
        let (alpha, v) = if sigma == 0.0 {
            (x[0], None)
        } else {
            let norm = (x[0] * x[0] + sigma).sqrt();
            let mut v = x.clone();
            let alpha = if x[0] <= 0.0 {
                v[0] -= norm;
                norm
            } else {
                v[0] += norm;
                -norm
            };
            let vn = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.iter_mut().for_each(|c| *c /= vn);
            (alpha, Some(v))
        };
        a[(i + 1, i)] = alpha;
        a[(i, i + 1)] = -alpha;
        for r in i + 2..n {
            a[(r, i)] = 0.0;
            a[(i, r)] = 0.0;
        }
        if let Some(v) = v {
            // A ← H A H on the trailing block, H = I − 2vvᵀ
            let w: Vec<f64> = (0..m)
                .map(|r| 2.0 * (0..m).map(|c| a[(i + 1 + r, i + 1 + c)] * v[c]).sum::<f64>())
                .collect();
            for r in 0..m {
                for c in 0..m {
                    a[(i + 1 + r, i + 1 + c)] += v[r] * w[c] - w[r] * v[c];
                }
            }
            pf = -pf;
        }
        if i % 2 == 0 {
            pf *= -alpha;
        }
    }
    Ok(pf * a[(n - 2, n - 1)])
}

/// Which Pfaffian ensemble.
fn pfaffian_block(beta: u32, n: usize, delta: f64) -> [[f64; 2]; 2] {
    match beta {
        1 => {
            let e = pfaffian_entries(n);
            let s = e.s(delta);
            [[e.j(delta), s], [-s, -e.d(delta)]]
        }
        _ => {
            let e = pfaffian_entries(2 * n);
            let s = 0.5 * e.s(delta);
            [[0.5 * e.i(delta), s], [-s, -0.5 * e.d(delta)]]
        }
    }
}

/// ρ_n for the COE (β = 1) or CSE (β = 4) as the Pfaffian of the 2n×2n
/// matrix built from 2×2 kernel blocks at `θ_j − θ_k`.
pub fn rho_n_pfaffian(beta: u32, n: usize, angles: &[f64]) -> Result<f64> {
    if beta != 1 && beta != 4 {
        return invalid(format!("rho_n_pfaffian needs beta 1 or 4, got {beta}"));
    }
    if angles.is_empty() || angles.len() > n {
        return invalid(format!("rho_n_pfaffian needs 1 <= n <= N, got n={} N={n}", angles.len()));
    }
    let m = angles.len();
    let mut a = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for j in 0..m {
        for k in 0..m {
            let b = pfaffian_block(beta, n, angles[j] - angles[k]);
            for r in 0..2 {
                for c in 0..2 {
                    a[(2 * j + r, 2 * k + c)] = b[r][c];
                }
            }
        }
    }
    pfaffian(&a)
}

/// Bulk-scaled finite-N n-point function (see the module notes for β = 4).
pub fn rho_n_bulk(beta: u32, n: usize, points: &[f64]) -> Result<f64> {
    let unit = match beta {
        1 | 2 => 2.0 * PI / n as f64,
        4 => PI / n as f64,
        _ => return invalid(format!("beta must be 1, 2 or 4, got {beta}")),
    };
    let angles: Vec<f64> = points.iter().map(|x| unit * x).collect();
    let rho = if beta == 2 {
        rho_n_cue(n, &angles)?
    } else {
        rho_n_pfaffian(beta, n, &angles)?
    };
    Ok(unit.powi(points.len() as i32) * rho)
}

/// `sin u − u cos u`, series near zero.
fn sin_minus_ucos(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        let u2 = u * u;
        u * u2 / 3.0 * (1.0 - u2 / 10.0 * (1.0 - u2 / 28.0 * (1.0 - u2 / 54.0)))
    } else {
        u.sin() - u * u.cos()
    }
}

/// Closed-form `ρ_{(2),l,β}^bulk(x, 0)`: β ∈ {1, 2, 4}, l ∈ {0, 1}, plus
/// l = 2 for β = 2. Values at x = 0 are the one-sided limits (all zero).
pub fn rho2_bulk_term(beta: u32, order: usize, x: f64) -> Result<f64> {
    let u = PI * x;
    let sgn = if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    };
    match (beta, order) {
        (2, 0) => Ok(1.0 - sinc(x).powi(2)),
        (2, 1) => Ok(-u.sin().powi(2) / 3.0),
        (2, 2) => Ok(-(u * u.sin()).powi(2) / 15.0),
        (1 | 4, 0 | 1) if x == 0.0 => Ok(0.0),
        (1, 0) => {
            let g = sin_minus_ucos(u);
            Ok(1.0 - sinc(x).powi(2) + g * (PI * sgn - 2.0 * sine_integral(u)) / (2.0 * u * u))
        }
        (1, 1) => {
            let g = sin_minus_ucos(u);
            let h = u.sin() + u * u.cos();
            Ok((-4.0 * u.sin().powi(2) - 2.0 * g * g / (u * u) - (PI * sgn - 2.0 * sine_integral(u)) * h)
                / 12.0)
        }
        (4, 0) => {
            let g = sin_minus_ucos(u);
            Ok(0.25 * (1.0 - sinc(x).powi(2)) - sine_integral(u) * g / (4.0 * u * u))
        }
        (4, 1) => {
            let s = u.sin();
            let inner = 1.0 + s * s + sinc(x).powi(2) - (2.0 * u).sin() / u
                - sine_integral(u) * (u * u.cos() + s);
            Ok(-inner / 96.0)
        }
        _ => Err(Error::InvalidArgument(format!(
            "no two-point bulk term for beta={beta} order={order}"
        ))),
    }
}

/// Which two-point identity to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rho2Identity {
    /// `ρ₁ = c_β (x² ρ₀)''` with `c_β = −1/(6β)`.
    FirstOrder,
    /// `ρ₂ = −((πx)²/60)(x² ρ₀)''` at β = 2.
    SecondOrderBeta2,
}

/// Max residual of a two-point identity on `grid`, derivatives taken
/// spectrally on a Chebyshev grid spanning the requested points.
pub fn verify_rho2_identity(beta: u32, which: Rho2Identity, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() || grid.iter().any(|&x| x <= 0.0) {
        return invalid("identity grid must be nonempty and avoid x <= 0");
    }
    if which == Rho2Identity::SecondOrderBeta2 && beta != 2 {
        return invalid("second-order identity is only stated for beta = 2");
    }
    let lo = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo == hi { (lo * 0.9, hi * 1.1) } else { (lo, hi) };
    let cheb = ChebGrid::new(48, lo, hi)?;
    let mut f = Vec::with_capacity(cheb.len());
    for &x in &cheb.nodes {
        f.push(x * x * rho2_bulk_term(beta, 0, x)?);
    }
    let d2 = cheb.derivative(&f, 2)?;
    let mut worst: f64 = 0.0;
    for &x in grid {
        let second = cheb.interpolate(&d2, x);
        let (lhs, rhs) = match which {
            Rho2Identity::FirstOrder => (rho2_bulk_term(beta, 1, x)?, -second / (6.0 * beta as f64)),
            Rho2Identity::SecondOrderBeta2 => {
                (rho2_bulk_term(2, 2, x)?, -(PI * x).powi(2) / 60.0 * second)
            }
        };
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}
