//! Scalar correlation kernels and the entries of the 2×2 Pfaffian kernels.
//!
//! Bulk-scaled kernels take points with mean spacing one. Angle-valued
//! functions (`S_N`, `D_N`, `I_N`, `J_N`) take a real angle θ.

use std::f64::consts::PI;

/// Which scalar kernel to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `(2π/N) K_N^CUE(2πx/N, 2πy/N)`.
    CueFiniteN(usize),
    /// `sin π(x−y) / π(x−y)`.
    SineLimit,
    /// `(π(x−y)/6) sin π(x−y)`.
    LCorrection,
    /// `K(x,y) + K(x,−y)`.
    PlusSym,
    /// `K(x,y) − K(x,−y)`.
    MinusSym,
    /// `L(x,y) + L(x,−y)`.
    LPlus,
    /// `L(x,y) − L(x,−y)`.
    LMinus,
}

/// `sin(πx)/(πx)`, Taylor expanded near zero.
pub fn sinc(x: f64) -> f64 {
    let u = PI * x;
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0))
    } else {
        u.sin() / u
    }
}

/// `sin(πd)/(N sin(πd/N))`, with the removable points `d ∈ NZ` filled in.
pub fn cue_bulk(n: usize, d: f64) -> f64 {
    let nf = n as f64;
    let m = (d / nf).round();
    let r = d - m * nf;
    let sign = if (m as i64 * (n as i64 - 1)) % 2 == 0 { 1.0 } else { -1.0 };
    if r.abs() < 1e-6 {
        // expand around d = mN: the ratio is sign · sinc-like in r
        let u = PI * r;
        let v = u / nf;
        let num = 1.0 - u * u / 6.0 + u.powi(4) / 120.0;
        let den = 1.0 - v * v / 6.0 + v.powi(4) / 120.0;
        return sign * num / den;
    }
    (PI * d).sin() / (nf * (PI * d / nf).sin())
}

fn l_corr(d: f64) -> f64 {
    PI * d / 6.0 * (PI * d).sin()
}

/// Evaluate a scalar kernel at `(x, y)`.
pub fn kernel_eval(spec: KernelSpec, x: f64, y: f64) -> f64 {
    match spec {
        KernelSpec::CueFiniteN(n) => cue_bulk(n, x - y),
        KernelSpec::SineLimit => sinc(x - y),
        KernelSpec::LCorrection => l_corr(x - y),
        KernelSpec::PlusSym => sinc(x - y) + sinc(x + y),
        KernelSpec::MinusSym => sinc(x - y) - sinc(x + y),
        KernelSpec::LPlus => l_corr(x - y) + l_corr(x + y),
        KernelSpec::LMinus => l_corr(x - y) - l_corr(x + y),
    }
}

/// Terms of `sin(πd)/(N sin(πd/N)) = Σ_l N^{−2l} k_l(d)`, `d = x − y`.
///
/// Order 0 is the sine kernel, order 1 the L-correction and order 2 is
/// `7(πd)⁴/360 · sinc(d)`.
pub fn cue_kernel_bulk_expansion(x: f64, y: f64, order: usize) -> f64 {
    let d = x - y;
    match order {
        0 => sinc(d),
        1 => l_corr(d),
        2 => 7.0 * (PI * d).powi(4) / 360.0 * sinc(d),
        _ => panic!("cue_kernel_bulk_expansion: order {order} not tabulated"),
    }
}

/// CUE kernel `K_N(θ, φ) = (1/2π) sin(N(θ−φ)/2) / sin((θ−φ)/2)` in angles.
pub fn cue_kernel(n: usize, theta: f64, phi: f64) -> f64 {
    PfaffianKernelEntries::new(n).s(theta - phi)
}

/// `S_N, D_N, I_N, J_N, ε_N` for a fixed N, evaluated from the Dirichlet sum
/// `S_N(θ) = (1/2π) Σ_p e^{ipθ}`, `p = −(N−1)/2, …, (N−1)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfaffianKernelEntries {
    pub n: usize,
}

pub fn pfaffian_entries(n: usize) -> PfaffianKernelEntries {
    PfaffianKernelEntries::new(n)
}

impl PfaffianKernelEntries {
    pub fn new(n: usize) -> Self {
        PfaffianKernelEntries { n }
    }

    /// Positive frequencies p of the Dirichlet sum (half-integers for even N).
    fn freqs(&self) -> impl Iterator<Item = f64> {
        let n = self.n;
        let first = if n % 2 == 0 { 0.5 } else { 1.0 };
        (0..n / 2).map(move |j| first + j as f64)
    }

    pub fn s(&self, theta: f64) -> f64 {
        let zero = if self.n % 2 == 1 { 1.0 } else { 0.0 };
        let sum: f64 = self.freqs().map(|p| (p * theta).cos()).sum();
        (zero + 2.0 * sum) / (2.0 * PI)
    }

    pub fn d(&self, theta: f64) -> f64 {
        let sum: f64 = self.freqs().map(|p| p * (p * theta).sin()).sum();
        -2.0 * sum / (2.0 * PI)
    }

    /// `∫₀^θ S_N`, integrated term by term.
    pub fn i(&self, theta: f64) -> f64 {
        let zero = if self.n % 2 == 1 { theta } else { 0.0 };
        let sum: f64 = self.freqs().map(|p| (p * theta).sin() / p).sum();
        (zero + 2.0 * sum) / (2.0 * PI)
    }

    /// Parity-dependent step: `½(−1)^m` (N even) or `m + ½` (N odd) on
    /// `(2πm, 2π(m+1))`; `0` resp. `m` at `θ = 2πm`.
    pub fn epsilon(&self, theta: f64) -> f64 {
        let m = (theta / (2.0 * PI)).floor();
        let on_boundary = theta == 2.0 * PI * m;
        if self.n % 2 == 0 {
            if on_boundary {
                0.0
            } else if (m as i64).rem_euclid(2) == 0 {
                0.5
            } else {
                -0.5
            }
        } else if on_boundary {
            m
        } else {
            m + 0.5
        }
    }

    pub fn j(&self, theta: f64) -> f64 {
        self.i(theta) - self.epsilon(theta)
    }
}
