//! Adaptive Dormand–Prince 5(4) integration with cubic Hermite dense output.

use crate::error::{invalid, Error, Result};

/// Initial value problem `y' = rhs(t, y)`, `y(t0) = state0`.
pub struct OdeProblem<F>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    pub rhs: F,
    pub t0: f64,
    pub state0: Vec<f64>,
}

impl<F> OdeProblem<F>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    pub fn new(rhs: F, t0: f64, state0: Vec<f64>) -> Self {
        OdeProblem { rhs, t0, state0 }
    }

    pub fn dimension(&self) -> usize {
        self.state0.len()
    }
}

/// Step-size control knobs.
#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub max_steps: usize,
    /// Times the integrator must land on exactly (clipped to the interval).
    pub stops: Vec<f64>,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions {
            rtol: tol,
            atol: tol,
            h_init: None,
            h_min: 1e-14,
            max_steps: 200_000,
            stops: Vec::new(),
        }
    }
}

/// Accepted steps: times, states and derivatives at each node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub dy: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        *self.t.last().expect("trajectory holds at least the initial point")
    }

    pub fn last(&self) -> &[f64] {
        self.y.last().expect("nonempty trajectory")
    }

    /// State at an accepted node time, if `t` is one (exact comparison).
    pub fn at_node(&self, t: f64) -> Option<&[f64]> {
        self.t.iter().position(|&s| s == t).map(|i| self.y[i].as_slice())
    }

    /// Cubic Hermite interpolation between accepted steps.
    pub fn interpolate(&self, t: f64) -> Option<Vec<f64>> {
        let (t0, t1) = (self.t[0], self.t_end());
        if !(t >= t0 && t <= t1) {
            return None;
        }
        let i = match self.t.binary_search_by(|s| s.total_cmp(&t)) {
            Ok(i) => return Some(self.y[i].clone()),
            Err(i) => i - 1,
        };
        let (ta, tb) = (self.t[i], self.t[i + 1]);
        let h = tb - ta;
        let u = (t - ta) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        Some(
            (0..self.y[i].len())
                .map(|k| {
                    h00 * self.y[i][k]
                        + h10 * h * self.dy[i][k]
                        + h01 * self.y[i + 1][k]
                        + h11 * h * self.dy[i + 1][k]
                })
                .collect(),
        )
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrate from `t0` to `t_end` with `rtol = atol = tol`.
pub fn ode_integrate<F>(problem: &OdeProblem<F>, t_end: f64, tol: f64) -> Result<Trajectory>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    ode_integrate_with(problem, t_end, &OdeOptions::with_tol(tol))
}

pub fn ode_integrate_with<F>(problem: &OdeProblem<F>, t_end: f64, opts: &OdeOptions) -> Result<Trajectory>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return invalid("ode tolerance must be positive");
    }
    if !(t_end >= problem.t0) || !t_end.is_finite() {
        return invalid(format!("ode integrates forward only: t0={} t_end={t_end}", problem.t0));
    }
    let dim = problem.dimension();
    let f = &problem.rhs;
    let mut t = problem.t0;
    let mut y = problem.state0.clone();
    let mut dy = f(t, &y);
    if dy.len() != dim || !finite(&dy) || !finite(&y) {
        return Err(Error::IntegrationFailure {
            t,
            reason: "non-finite initial data".into(),
        });
    }
    let mut stops: Vec<f64> = opts.stops.iter().copied().filter(|&s| s > t && s < t_end).collect();
    stops.push(t_end);
    stops.sort_by(|a, b| a.total_cmp(b));
    stops.dedup();
    let mut next_stop = 0;

    let mut traj = Trajectory {
        t: vec![t],
        y: vec![y.clone()],
        dy: vec![dy.clone()],
    };
    if t_end == t {
        return Ok(traj);
    }
    let span = t_end - t;
    let mut h = opts.h_init.unwrap_or(span * 1e-3).min(span);
    let mut k = vec![vec![0.0; dim]; 7];
    let mut tmp = vec![0.0; dim];
    let mut steps = 0;
    while next_stop < stops.len() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::IntegrationFailure {
                t,
                reason: "step budget exhausted".into(),
            });
        }
        let target = stops[next_stop];
        let mut landing = false;
        if t + h >= target || (target - t - h) < 1e-12 * h {
            h = target - t;
            landing = true;
        }
        k[0].copy_from_slice(&dy);
        let mut ok = true;
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                tmp[i] = acc;
            }
            let ks = f(t + C[s] * h, &tmp);
            if !finite(&ks) {
                ok = false;
                break;
            }
            k[s] = ks;
        }
        // stage 7 is evaluated at the 5th-order solution (FSAL)
        let err = if ok {
            let mut e = 0.0f64;
            for i in 0..dim {
                let est: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
                let sc = opts.atol + opts.rtol * y[i].abs().max(tmp[i].abs());
                e = e.max((est / sc).abs());
            }
            e
        } else {
            f64::INFINITY
        };
        if err <= 1.0 {
            t = if landing { target } else { t + h };
            y.copy_from_slice(&tmp);
            dy.copy_from_slice(&k[6]);
            traj.t.push(t);
            traj.y.push(y.clone());
            traj.dy.push(dy.clone());
            if landing {
                next_stop += 1;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= fac;
        }
        if h < opts.h_min * t.abs().max(1.0) {
            return Err(Error::IntegrationFailure {
                t,
                reason: "step size underflow".into(),
            });
        }
    }
    Ok(traj)
}
