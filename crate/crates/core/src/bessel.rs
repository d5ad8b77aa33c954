//! Bessel functions of the first kind, orders 0 and 1, and the zeros of J0.
//!
//! Below `HANKEL_CROSSOVER` both orders come out of one Miller backward
//! recurrence normalised with `J0 + 2·Σ J2k = 1`. Above it the Hankel
//! asymptotic expansion is summed until its terms stop shrinking; at the
//! crossover the smallest term is far below f64 resolution.

use std::f64::consts::PI;

const HANKEL_CROSSOVER: f64 = 25.0;
const RESCALE_LIMIT: f64 = 1e250;

/// J0(x).
pub fn j0(x: f64) -> f64 {
    j0_j1(x).0
}

/// J1(x).
pub fn j1(x: f64) -> f64 {
    j0_j1(x).1
}

/// Evaluates (J0(x), J1(x)) together; both fall out of the same recurrence.
pub fn j0_j1(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax == 0.0 {
        return (1.0, 0.0);
    }
    let (j0, j1) = if ax < HANKEL_CROSSOVER {
        miller(ax)
    } else {
        (hankel(0.0, ax), hankel(1.0, ax))
    };
    (j0, if x < 0.0 { -j1 } else { j1 })
}

fn miller(x: f64) -> (f64, f64) {
    // Even start index well above x: J_start(x) is below 1e-20 for x < 25.
    let start = 2 * ((x as usize + 40) / 2 + 1);
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // b_{k+1}
    let mut cur = 1e-30; // b_k
    let mut even_sum = 0.0;
    let mut b1 = 0.0;
    for k in (1..=start).rev() {
        let prev = (k as f64) * two_over_x * cur - next;
        next = cur;
        cur = prev;
        // cur is now b_{k-1}
        let idx = k - 1;
        if idx == 1 {
            b1 = cur;
        } else if idx > 0 && idx % 2 == 0 {
            even_sum += cur;
        }
        if cur.abs() > RESCALE_LIMIT {
            cur /= RESCALE_LIMIT;
            next /= RESCALE_LIMIT;
            even_sum /= RESCALE_LIMIT;
            b1 /= RESCALE_LIMIT;
        }
    }
    let norm = cur + 2.0 * even_sum;
    (cur / norm, b1 / norm)
}

fn hankel(order: f64, x: f64) -> f64 {
    let mu = 4.0 * order * order;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if a.abs() >= last || a.abs() < 1e-18 {
            break;
        }
        last = a.abs();
        // sign pattern: k = 1 → +Q, 2 → −P, 3 → −Q, 4 → +P, ...
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
    }
    let chi = x - (0.5 * order + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// The `n`-th positive zero of J0 (1-based), by Newton refinement of
/// McMahon's estimate.
///
/// # Panics
/// Panics if `n == 0`.
pub fn j0_zero(n: usize) -> f64 {
    assert!(n >= 1, "zeros of J0 are numbered from 1");
    let beta = (n as f64 - 0.25) * PI;
    let b8 = 8.0 * beta;
    let mut alpha = beta + 1.0 / b8 - 124.0 / (3.0 * b8.powi(3)) + 120_928.0 / (15.0 * b8.powi(5));
    for _ in 0..50 {
        let (f, df) = j0_j1(alpha);
        // d/dx J0 = −J1
        let step = f / df;
        alpha += step;
        if step.abs() <= 1e-15 * alpha {
            break;
        }
    }
    alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    /// J_n(x) = (1/π)∫₀^π cos(nτ − x sin τ) dτ; the trapezoid rule on a
    /// periodic integrand converges geometrically.
    fn integral_oracle(order: f64, x: f64) -> f64 {
        let steps = 4000;
        let h = PI / steps as f64;
        let mut sum = 0.0;
        for i in 0..=steps {
            let t = i as f64 * h;
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            sum += w * (order * t - x * t.sin()).cos();
        }
        sum * h / PI
    }

    #[test]
    fn matches_integral_representation() {
        let mut x = 0.01;
        while x < 120.0 {
            let (a, b) = j0_j1(x);
            assert!((a - integral_oracle(0.0, x)).abs() < 2e-14, "J0({x})");
            assert!((b - integral_oracle(1.0, x)).abs() < 2e-14, "J1({x})");
            x *= 1.07;
        }
    }

    #[test]
    fn crossover_is_continuous() {
        for dx in [-1e-9, 0.0, 1e-9] {
            let x = HANKEL_CROSSOVER + dx;
            assert!((j0(x) - integral_oracle(0.0, x)).abs() < 1e-15);
            assert!((j1(x) - integral_oracle(1.0, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn tabulated_values() {
        assert_eq!(j0(0.0), 1.0);
        assert!((j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((j1(-1.0) + 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((j0(-2.5) - j0(2.5)).abs() == 0.0);
    }

    #[test]
    fn first_zeros() {
        let table = [
            2.404_825_557_695_773,
            5.520_078_110_286_311,
            8.653_727_912_911_013,
            11.791_534_439_014_281,
            14.930_917_708_487_787,
        ];
        for (i, &z) in table.iter().enumerate() {
            assert!((j0_zero(i + 1) - z).abs() < 1e-13 * z, "zero {}", i + 1);
        }
        // J1 at the first zero, via the integral oracle
        let a = j0_zero(1);
        assert!((j1(a).powi(2) - 0.269_514_123_941_9).abs() < 1e-12);
    }

    #[test]
    fn large_zeros_are_zeros() {
        for n in [10, 50, 100, 200, 500] {
            let a = j0_zero(n);
            assert!(j0(a).abs() < 1e-14, "n = {n}");
            let beta = (n as f64 - 0.25) * PI;
            assert!((a - beta).abs() < 0.01);
        }
    }
}
