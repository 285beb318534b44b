//! Chebyshev points of the second kind, differentiation matrices and
//! barycentric interpolation.

use crate::error::{invalid, Result};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Chebyshev–Lobatto grid on `[lo, hi]`, nodes in increasing order.
#[derive(Debug, Clone)]
pub struct ChebGrid {
    pub lo: f64,
    pub hi: f64,
    pub nodes: Vec<f64>,
    d1: DMatrix<f64>,
}

impl ChebGrid {
    pub fn new(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n < 4 {
            return invalid(format!("Chebyshev grid needs at least 4 points, got {n}"));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return invalid(format!("Chebyshev grid needs finite lo < hi, got [{lo}, {hi}]"));
        }
        let m = n - 1;
        // x_j = -cos(jπ/m) on [-1, 1], increasing
        let x: Vec<f64> = (0..n).map(|j| -((j as f64) * PI / m as f64).cos()).collect();
        let c = |j: usize| if j == 0 || j == m { 2.0 } else { 1.0 };
        let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
        let mut d = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    // sin-form difference x_i - x_j to limit cancellation
                    let dx = 2.0
                        * (((i + j) as f64) * PI / (2.0 * m as f64)).sin()
                        * (((i as f64) - (j as f64)) * PI / (2.0 * m as f64)).sin();
                    d[(i, j)] = c(i) / c(j) * sign(i + j) / dx;
                }
            }
            // negative-sum trick for the diagonal
            let row: f64 = (0..n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
            d[(i, i)] = -row;
        }
        let scale = 2.0 / (hi - lo);
        d *= scale;
        let nodes = x.iter().map(|&v| lo + (v + 1.0) * (hi - lo) / 2.0).collect();
        Ok(ChebGrid { lo, hi, nodes, d1: d })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Samples `f` at the grid nodes.
    pub fn sample<F: FnMut(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().copied().map(f).collect()
    }

    /// First or second derivative of the interpolant at the nodes.
    pub fn derivative(&self, samples: &[f64], order: usize) -> Result<Vec<f64>> {
        if samples.len() != self.len() {
            return invalid("sample count does not match grid");
        }
        let mut v = DVector::from_column_slice(samples);
        for _ in 0..order {
            v = &self.d1 * v;
        }
        Ok(v.iter().copied().collect())
    }

    /// Barycentric evaluation of the interpolant at an arbitrary point.
    pub fn interpolate(&self, samples: &[f64], x: f64) -> f64 {
        let n = self.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let dx = x - self.nodes[j];
            if dx == 0.0 {
                return samples[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                w *= 0.5;
            }
            num += w / dx * samples[j];
            den += w / dx;
        }
        num / den
    }
}

/// Derivative of `samples` given on an n-point Chebyshev grid over `[0, s_max]`.
pub fn spectral_derivative(samples: &[f64], s_max: f64, order: usize) -> Result<Vec<f64>> {
    if !(1..=2).contains(&order) {
        return invalid("spectral_derivative supports order 1 or 2");
    }
    let grid = ChebGrid::new(samples.len(), 0.0, s_max)?;
    grid.derivative(samples, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_second_derivative() {
        let g = ChebGrid::new(32, 0.0, 3.0).unwrap();
        let d2 = g.derivative(&g.sample(|s| s * s), 2).unwrap();
        assert!(d2.iter().all(|v| (v - 2.0).abs() < 1e-10));
    }

    #[test]
    fn sine_second_derivative() {
        let g = ChebGrid::new(48, 0.0, 2.0).unwrap();
        let d2 = g.derivative(&g.sample(|s| (PI * s).sin()), 2).unwrap();
        for (x, v) in g.nodes.iter().zip(&d2) {
            assert!((v + PI * PI * (PI * x).sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn twice_first_equals_second() {
        let g = ChebGrid::new(40, 0.0, 1.5).unwrap();
        let f = g.sample(|s| (s * 1.3).exp() * (2.0 * s).cos());
        let a = g.derivative(&g.derivative(&f, 1).unwrap(), 1).unwrap();
        let b = g.derivative(&f, 2).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-7);
        }
    }

    #[test]
    fn barycentric_off_grid() {
        let g = ChebGrid::new(80, -1.0, 2.0).unwrap();
        let f = g.sample(|s| 1.0 / (1.0 + s * s));
        for x in [-0.77, 0.0, 0.123, 1.999] {
            assert!((g.interpolate(&f, x) - 1.0 / (1.0 + x * x)).abs() < 1e-9);
        }
    }

    #[test]
    fn too_few_points() {
        assert!(spectral_derivative(&[1.0, 2.0, 3.0], 1.0, 1).is_err());
        assert!(spectral_derivative(&[0.0; 16], 1.0, 3).is_err());
    }
}
