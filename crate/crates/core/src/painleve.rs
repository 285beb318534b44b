//! σ-form Painlevé V route to the β = 2 gap generating functions.
//!
//! `E₀(s) = exp ∫₀^{πs} σ₀(t)/t dt` and `E₁(s) = E₀(s) ∫₀^{πs} σ₁(t)/t dt`
//! with `σ₁ = −(1/12)(2tσ₀σ₀′ + t²σ₀″)`.

use crate::error::{invalid, Error, Result};
use crate::numerics::{ode_integrate_with, OdeOptions, OdeProblem};
use crate::numerics::Q;
use num_traits::{ToPrimitive, Zero};
use std::f64::consts::PI;

pub const MAX_SERIES_TERMS: usize = 12;
pub const T0: f64 = 1e-2;
/// Pointwise bound on the σ-form residual along accepted trajectories.
pub const RESIDUAL_BOUND: f64 = 1e-8;

/// Polynomial in `x = ξ/π`, lowest degree first.
pub type XPoly = Vec<Q>;

fn pmul(a: &[Q], b: &[Q]) -> XPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn padd(a: &mut XPoly, b: &[Q], c: Q) {
    if a.len() < b.len() {
        a.resize(b.len(), Q::zero());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += *y * c;
    }
}

fn peval(p: &[Q], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
}

/// Coefficient of `t^m` in `f·g` given coefficient lists.
fn conv(f: &[XPoly], g: &[XPoly], m: usize) -> XPoly {
    let mut out = Vec::new();
    for i in 0..=m {
        if i < f.len() && m - i < g.len() {
            padd(&mut out, &pmul(&f[i], &g[m - i]), Q::from_integer(1));
        }
    }
    out
}

/// Exact Taylor coefficients `a_0 … a_{n−1}` of σ₀ as polynomials in ξ/π.
///
/// Generated from the differentiated equation
/// `t²σ‴ + tσ″ + 6t(σ′)² + 4t²σ′ − 4σ(t + σ′) = 0`, which fixes
/// `(m+1)m²·a_{m+1}` from lower coefficients once `a_1 = −ξ/π` is given.
pub fn sigma0_series_exact(n_terms: usize) -> Result<Vec<XPoly>> {
    if n_terms < 2 {
        return invalid("sigma0 series needs at least 2 terms");
    }
    if n_terms > MAX_SERIES_TERMS {
        return invalid(format!("sigma0 series is limited to {MAX_SERIES_TERMS} terms, got {n_terms}"));
    }
    let one = Q::from_integer(1);
    let mut a: Vec<XPoly> = vec![Vec::new(), vec![Q::zero(), -one]];
    for m in 1..n_terms - 1 {
        // σ′ coefficients: (k+1) a_{k+1}
        let dp: Vec<XPoly> = (0..a.len() - 1)
            .map(|k| a[k + 1].iter().map(|c| c * Q::from_integer(k as i128 + 1)).collect())
            .collect();
        let mut rest = Vec::new();
        padd(&mut rest, &conv(&dp, &dp, m - 1), Q::from_integer(6));
        if m >= 2 {
            padd(&mut rest, &a[m - 1], Q::from_integer(4 * (m as i128 - 1) - 4));
        }
        padd(&mut rest, &conv(&a, &dp, m), Q::from_integer(-4));
        let d = Q::from_integer(((m + 1) * m * m) as i128);
        let next: XPoly = rest.iter().map(|c| -c / d).collect();
        a.push(next);
    }
    Ok(a)
}

/// Taylor coefficients of σ₀ at fixed ξ; entry k multiplies `t^k`.
pub fn sigma0_series(xi: f64, n_terms: usize) -> Result<Vec<f64>> {
    if !(xi > 0.0 && xi <= 1.0) {
        return invalid(format!("xi must lie in (0, 1], got {xi}"));
    }
    let x = xi / PI;
    Ok(sigma0_series_exact(n_terms)?.iter().map(|p| peval(p, x)).collect())
}

/// Taylor coefficients of `−(1/12)(2tσ₀σ₀′ + t²σ₀″)` from those of σ₀,
/// exact through `t^{n−1}`.
pub fn sigma1_series_exact(a: &[XPoly]) -> Vec<XPoly> {
    let n = a.len();
    let dp: Vec<XPoly> = (0..n - 1)
        .map(|k| a[k + 1].iter().map(|c| c * Q::from_integer(k as i128 + 1)).collect())
        .collect();
    (0..n)
        .map(|k| {
            let mut c = Vec::new();
            if k >= 1 {
                padd(&mut c, &conv(a, &dp, k - 1), Q::from_integer(2));
            }
            padd(&mut c, &a[k], Q::from_integer((k * k.saturating_sub(1)) as i128));
            c.iter().map(|v| v * Q::new(-1, 12)).collect()
        })
        .collect()
}

fn sum_series(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * t + v)
}

/// `(tσ″)² + 4(tσ′ − σ)(tσ′ − σ + (σ′)²)`.
pub fn sigma_form_residual(t: f64, s: f64, sp: f64, spp: f64) -> f64 {
    let u = t * sp - s;
    (t * spp).powi(2) + 4.0 * u * (u + sp * sp)
}

fn sigma1_of(t: f64, s: f64, sp: f64, spp: f64) -> f64 {
    -(2.0 * t * s * sp + t * t * spp) / 12.0
}

/// State: σ, σ′, σ″, ∫σ/t, ∫σ₁/t.
fn rhs(t: f64, y: &[f64]) -> Vec<f64> {
    let (s, sp, spp) = (y[0], y[1], y[2]);
    let sppp = -(t * spp + 6.0 * t * sp * sp + 4.0 * t * t * sp - 4.0 * s * (t + sp)) / (t * t);
    vec![sp, spp, sppp, s / t, sigma1_of(t, s, sp, spp) / t]
}

/// Trajectory of σ₀ with derived columns, on the accepted ODE nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSolution {
    pub xi: f64,
    pub tol: f64,
    pub grid: Vec<f64>,
    pub sigma0: Vec<f64>,
    pub sigma0_prime: Vec<f64>,
    pub sigma0_doubleprime: Vec<f64>,
    /// Empty until `sigma1_from_sigma0` is applied.
    pub sigma1: Vec<f64>,
    pub ode_residual: Vec<f64>,
    /// `∫₀^t σ₀/u du` per node.
    pub log_e0: Vec<f64>,
    /// `∫₀^t σ₁/u du` per node.
    pub int_sigma1: Vec<f64>,
}

impl SigmaSolution {
    pub fn t_max(&self) -> f64 {
        *self.grid.last().expect("nonempty grid")
    }

    pub fn max_residual(&self) -> f64 {
        self.ode_residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

fn initial_state(xi: f64, t0: f64) -> Result<Vec<f64>> {
    let exact = sigma0_series_exact(MAX_SERIES_TERMS)?;
    let x = xi / PI;
    let a: Vec<f64> = exact.iter().map(|p| peval(p, x)).collect();
    let b: Vec<f64> = sigma1_series_exact(&exact).iter().map(|p| peval(p, x)).collect();
    let d1: Vec<f64> = (1..a.len()).map(|k| k as f64 * a[k]).collect();
    let d2: Vec<f64> = (2..a.len()).map(|k| (k * (k - 1)) as f64 * a[k]).collect();
    // ∫₀^t Σ c_k u^{k−1} du = Σ c_k t^k / k
    let int = |c: &[f64]| (1..c.len()).map(|k| c[k] * t0.powi(k as i32) / k as f64).sum::<f64>();
    Ok(vec![
        sum_series(&a, t0),
        sum_series(&d1, t0),
        sum_series(&d2, t0),
        int(&a),
        int(&b),
    ])
}

/// Integrates σ₀ from `t0` to `t_max`, landing exactly on each of `stops`.
pub fn solve_sigma0_with(xi: f64, t_max: f64, tol: f64, t0: f64, stops: &[f64]) -> Result<SigmaSolution> {
    if !(0.0..=1.0).contains(&xi) {
        return invalid(format!("xi must lie in [0, 1], got {xi}"));
    }
    if !(t_max > t0 && t_max <= 12.0 * PI) {
        return invalid(format!("t_max must lie in ({t0}, 12π], got {t_max}"));
    }
    if !(t0 > 0.0 && t0 <= 0.1) {
        return invalid(format!("start point must lie in (0, 0.1], got {t0}"));
    }
    let state0 = if xi == 0.0 { vec![0.0; 5] } else { initial_state(xi, t0)? };
    let mut opts = OdeOptions::with_tol(tol);
    opts.stops = stops.iter().copied().filter(|&s| s > t0 && s < t_max).collect();
    let traj = ode_integrate_with(&OdeProblem::new(rhs, t0, state0), t_max, &opts)?;
    let col = |k: usize| traj.y.iter().map(|y| y[k]).collect::<Vec<f64>>();
    let ode_residual: Vec<f64> = traj
        .t
        .iter()
        .zip(&traj.y)
        .map(|(&t, y)| sigma_form_residual(t, y[0], y[1], y[2]))
        .collect();
    if let Some(i) = ode_residual.iter().position(|r| !(r.abs() <= RESIDUAL_BOUND)) {
        let last_good = if i == 0 { t0 } else { traj.t[i - 1] };
        return Err(Error::IntegrationFailure {
            t: last_good,
            reason: format!("sigma-form residual {:.3e} at t = {}", ode_residual[i], traj.t[i]),
        });
    }
    Ok(SigmaSolution {
        xi,
        tol,
        grid: traj.t.clone(),
        sigma0: col(0),
        sigma0_prime: col(1),
        sigma0_doubleprime: col(2),
        sigma1: Vec::new(),
        ode_residual,
        log_e0: col(3),
        int_sigma1: col(4),
    })
}

pub fn solve_sigma0(xi: f64, t_max: f64, tol: f64) -> Result<SigmaSolution> {
    solve_sigma0_with(xi, t_max, tol, T0, &[])
}

/// Fills `sigma1` pointwise from σ₀, σ₀′, σ₀″.
pub fn sigma1_from_sigma0(mut sol: SigmaSolution) -> SigmaSolution {
    sol.sigma1 = (0..sol.grid.len())
        .map(|i| sigma1_of(sol.grid[i], sol.sigma0[i], sol.sigma0_prime[i], sol.sigma0_doubleprime[i]))
        .collect();
    sol
}

/// `E₀(s)` (order 0) or `E₁(s)` (order 1) from a σ₀ trajectory.
///
/// Below the first node the series is used; between nodes the ODE is
/// continued from the nearest node to `πs`.
pub fn e_tau(sol: &SigmaSolution, s: f64, order: usize) -> Result<f64> {
    if order > 1 {
        return invalid(format!("e_tau order must be 0 or 1, got {order}"));
    }
    if !(s >= 0.0) {
        return invalid(format!("s must be >= 0, got {s}"));
    }
    let t = PI * s;
    if t > sol.t_max() {
        return Err(Error::OutOfRange(format!(
            "πs = {t} lies beyond the trajectory end {}",
            sol.t_max()
        )));
    }
    let (i0, i1) = if sol.xi == 0.0 || t == 0.0 {
        (0.0, 0.0)
    } else if t <= sol.grid[0] {
        let st = initial_state(sol.xi, t)?;
        (st[3], st[4])
    } else {
        let k = sol.grid.partition_point(|&g| g <= t) - 1;
        if sol.grid[k] == t {
            (sol.log_e0[k], sol.int_sigma1[k])
        } else {
            let y0 = vec![
                sol.sigma0[k],
                sol.sigma0_prime[k],
                sol.sigma0_doubleprime[k],
                sol.log_e0[k],
                sol.int_sigma1[k],
            ];
            let seg = ode_integrate_with(&OdeProblem::new(rhs, sol.grid[k], y0), t, &OdeOptions::with_tol(sol.tol))?;
            let y = seg.last();
            (y[3], y[4])
        }
    };
    let e0 = i0.exp();
    Ok(if order == 0 { e0 } else { e0 * i1 })
}

/// `E₀` and `E₁` at each requested s from a single trajectory.
pub fn e_tau_grid(xi: f64, s: &[f64], tol: f64) -> Result<Vec<(f64, f64)>> {
    let s_max = s.iter().copied().fold(0.0, f64::max);
    let t_max = (PI * s_max).max(2.0 * T0);
    let stops: Vec<f64> = s.iter().map(|v| PI * v).collect();
    let sol = solve_sigma0_with(xi, t_max, tol, T0, &stops)?;
    s.iter()
        .map(|&v| Ok((e_tau(&sol, v, 0)?, e_tau(&sol, v, 1)?)))
        .collect()
}
