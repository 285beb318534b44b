//! Sine integral, digamma and harmonic numbers.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Euler's constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B₂, B₄, …, B₁₂.
const BERNOULLI_EVEN: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// Si(x) = ∫₀ˣ sin t / t dt.
///
/// Power series for |x| ≤ 2, otherwise the continued fraction for E₁(ix).
pub fn sine_integral(x: f64) -> f64 {
    let t = x.abs();
    let v = if t <= 2.0 {
        let mut term = t;
        let mut sum = t;
        let t2 = t * t;
        let mut k = 0usize;
        loop {
            let kf = k as f64;
            term *= -t2 / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
            let add = term / (2.0 * kf + 3.0);
            sum += add;
            k += 1;
            if add.abs() < 1e-18 * sum.abs() || k > 60 {
                break;
            }
        }
        sum
    } else {
        // modified Lentz on E1(it)
        let tiny = 1e-300;
        let mut b = Complex64::new(1.0, t);
        let mut c = Complex64::new(1.0 / tiny, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 2..200 {
            let a = -((i - 1) * (i - 1)) as f64;
            b += 2.0;
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + Complex64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
                break;
            }
        }
        let h = Complex64::new(t.cos(), -t.sin()) * h;
        FRAC_PI_2 + h.im
    };
    v.copysign(x)
}

/// Digamma ψ(z) for real z away from the poles at 0, −1, −2, ….
pub fn digamma(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("digamma of non-finite {z}")));
    }
    if z <= 0.0 && z == z.floor() {
        return Err(Error::Domain(format!("digamma pole at {z}")));
    }
    if z < 0.5 {
        // ψ(z) = ψ(1 - z) - π cot(π z)
        let r = digamma(1.0 - z)?;
        return Ok(r - PI / (PI * z).tan());
    }
    let mut acc = 0.0;
    let mut w = z;
    while w < 10.0 {
        acc -= 1.0 / w;
        w += 1.0;
    }
    Ok(acc + digamma_asymptotic(w))
}

/// log z − 1/(2z) − Σ_{k=1}^{6} B_{2k} / (2k z^{2k}).
fn digamma_asymptotic(z: f64) -> f64 {
    let inv2 = 1.0 / (z * z);
    let mut pow = inv2;
    let mut tail = 0.0;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        tail += b / (2.0 * (k as f64 + 1.0)) * pow;
        pow *= inv2;
    }
    z.ln() - 0.5 / z - tail
}

/// H_n = Σ_{j=1}^{n} 1/j, summed from the small end.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).rev().map(|j| 1.0 / j as f64).sum()
}

/// Large-n expansion log n + γ + 1/(2n) − Σ_{k=1}^{terms} B_{2k}/(2k n^{2k}).
pub fn harmonic_asymptotic(n: f64, terms: usize) -> f64 {
    let inv2 = 1.0 / (n * n);
    let mut pow = inv2;
    let mut tail = 0.0;
    for (k, b) in BERNOULLI_EVEN.iter().take(terms).enumerate() {
        tail += b / (2.0 * (k as f64 + 1.0)) * pow;
        pow *= inv2;
    }
    n.ln() + EULER_GAMMA + 0.5 / n - tail
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + h * i as f64;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    fn sinc(t: f64) -> f64 {
        if t == 0.0 {
            1.0
        } else {
            t.sin() / t
        }
    }

    #[test]
    fn si_basics() {
        assert_eq!(sine_integral(0.0), 0.0);
        assert!((sine_integral(50.0) - FRAC_PI_2).abs() < 0.02);
        assert_eq!(sine_integral(-1.3), -sine_integral(1.3));
    }

    #[test]
    fn si_against_simpson() {
        for &x in &[0.3, 1.0, 2.0, 2.5, PI, 7.0, 20.0, 50.0] {
            let q = simpson(sinc, 0.0, x, 200_000);
            assert!((sine_integral(x) - q).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn si_branch_seam_is_continuous() {
        let a = sine_integral(2.0 - 1e-12);
        let b = sine_integral(2.0 + 1e-12);
        assert!((b - a - 2e-12 * 2f64.sin() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
        let n = 3u64;
        let expect = -EULER_GAMMA - 2.0 * 2f64.ln() + 2.0 * harmonic(2 * n) - harmonic(n);
        assert!((digamma(n as f64 + 0.5).unwrap() - expect).abs() < 1e-13);
        let (nn, k) = (7.0, 3.0);
        let lhs = digamma(-nn + k + 0.5).unwrap();
        let rhs = digamma(nn + 0.5 - k).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn digamma_poles() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-3.0).is_err());
        assert!(digamma(-2.5).is_ok());
    }

    #[test]
    fn harmonic_asymptotics_order() {
        // the remainder after three Bernoulli terms is 1/(240 n⁸) + O(n⁻¹⁰);
        // at n ≥ 50 it is below double roundoff, so the ratio test runs lower
        let err = |n: u64| harmonic(n) - harmonic_asymptotic(n as f64, 3);
        for n in [5u64, 10] {
            let ratio = err(n) / err(2 * n);
            assert!((ratio / 256.0 - 1.0).abs() < 0.1, "n={n} ratio={ratio}");
            let scaled = err(n) * (n as f64).powi(8) * 240.0;
            assert!((scaled - 1.0).abs() < 0.1);
        }
        for n in [50u64, 100, 200] {
            assert!(err(n).abs() < 5e-15, "n={n}");
        }
    }
}
