//! The ball kernel `B_d(ρ) = Γ(d/2+1) (2/ρ)^{d/2} J_{d/2}(ρ)`, the mean of
//! `e^{iρ x_1}` over the unit ball of `R^d`.
//!
//! Small arguments use the power series directly. Beyond that, even `d` goes
//! through `J_m` with Miller's downward recurrence normalized by
//! `J_0 + 2 Σ J_{2k} = 1`, and odd `d = 2ℓ + 1` through the spherical Bessel
//! function, `B_d(ρ) = (2ℓ+1)!! j_ℓ(ρ) / ρ^ℓ`, also by downward recurrence.

use crate::error::{domain, Result};

/// Below this argument the alternating series loses less than a few ulps.
const SERIES_CUTOFF: f64 = 2.0;

const RESCALE: f64 = 1e250;

pub fn ball_kernel(d: usize, rho: f64) -> Result<f64> {
    if d == 0 {
        return domain("ball kernel needs d ≥ 1");
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return domain(format!("ball kernel argument must be finite and ≥ 0, got {rho}"));
    }
    Ok(ball_kernel_unchecked(d, rho))
}

pub(crate) fn ball_kernel_unchecked(d: usize, rho: f64) -> f64 {
    if rho == 0.0 {
        return 1.0;
    }
    if rho <= SERIES_CUTOFF {
        series(d, rho)
    } else {
        recurrence(d, rho)
    }
}

fn recurrence(d: usize, rho: f64) -> f64 {
    if d % 2 == 0 {
        let m = d / 2;
        // m! (2/ρ)^m J_m(ρ), accumulated factor by factor to avoid overflow
        let scale = (1..=m).fold(1.0, |acc, k| acc * 2.0 * k as f64 / rho);
        scale * bessel_j(m, rho)
    } else {
        let l = (d - 1) / 2;
        // (2ℓ+1)!! / ρ^ℓ
        let scale = (1..=l).fold(1.0, |acc, k| acc * (2 * k + 1) as f64 / rho);
        scale * spherical_j(l, rho)
    }
}

/// `Σ_k (−ρ²/4)^k Γ(ν+1) / (k! Γ(k+ν+1))` with `ν = d/2`.
fn series(d: usize, rho: f64) -> f64 {
    let nu = d as f64 / 2.0;
    let q = -rho * rho / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    for k in 1..200 {
        term *= q / (k as f64 * (k as f64 + nu));
        // Kahan-compensated accumulation
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn start_order(order: usize, x: f64) -> usize {
    let base = order.max(x.ceil() as usize);
    let m = base + 30 + (40.0 * base as f64).sqrt() as usize;
    m + (m % 2)
}

/// `J_m(x)` for integer `m ≥ 0` and `x > 0`.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    let top = start_order(m, x);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut want = 0.0;
    for k in (1..=top).rev() {
        if k == m {
            want = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            norm /= RESCALE;
            want /= RESCALE;
        }
    }
    // cur now holds the unnormalized J_0
    if m == 0 {
        want = cur;
    }
    norm += cur;
    want / norm
}

/// Spherical Bessel `j_ℓ(x)` for `x > 0`.
pub fn spherical_j(l: usize, x: f64) -> f64 {
    let j0 = x.sin() / x;
    if l == 0 {
        return j0;
    }
    let j1 = (x.sin() / x - x.cos()) / x;
    let top = start_order(l, x);
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut want = 0.0;
    let mut at_one = 0.0;
    for k in (1..=top).rev() {
        if k == l {
            want = cur;
        }
        if k == 1 {
            at_one = cur;
        }
        let prev = (2 * k + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            want /= RESCALE;
            at_one /= RESCALE;
        }
    }
    // j_0 and j_1 never vanish together; normalize on the larger one
    if j0.abs() >= j1.abs() {
        want * j0 / cur
    } else {
        want * j1 / at_one
    }
}
