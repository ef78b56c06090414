//! Reference computations for the acceptance suite. None of these call the
//! closed forms they are compared against.

#![allow(dead_code)]

use std::f64::consts::PI;

use bvchain::volterra::bessel_j;
use bvchain::{CMatrix, C64};

/// `J_n(x) = (1/2pi) int_0^{2pi} cos(n s - x sin s) ds` by the periodic trapezoid rule,
/// spectrally accurate once the node count exceeds `|x| + n` comfortably.
pub fn bessel_by_integral(n: i64, x: f64) -> f64 {
    let m = 64 + 2 * (x.abs().ceil() as usize + n.unsigned_abs() as usize);
    let h = 2.0 * PI / m as f64;
    (0..m).map(|i| (n as f64 * i as f64 * h - x * (i as f64 * h).sin()).cos()).sum::<f64>() / m as f64
}

/// `(1/2pi) int dp exp(-i p n) exp(-i (g cos p + h) tau)` summed on `m` equispaced nodes.
pub fn plane_wave_kernel(n: i64, g: f64, h: f64, tau: f64, m: usize) -> C64 {
    let step = 2.0 * PI / m as f64;
    let sum: C64 = (0..m)
        .map(|i| {
            let p = i as f64 * step;
            C64::from_polar(1.0, -p * n as f64 - (g * p.cos() + h) * tau)
        })
        .sum();
    sum / m as f64
}

/// `int_T^inf t^-a exp(i k t) dt` from its asymptotic series, summed until the terms
/// stop shrinking.
fn oscillatory_tail(a: f64, k: f64, t: f64) -> C64 {
    let lead = C64::new(0.0, 1.0) * C64::from_polar(1.0, k * t) * t.powf(-a) / k;
    let ratio = C64::new(0.0, -1.0) / (k * t);
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for m in 0..200 {
        let next = term * ratio * (a + m as f64);
        if next.norm() >= term.norm() || next.norm() < 1e-18 {
            break;
        }
        term = next;
        sum += term;
    }
    lead * sum
}

/// `int_0^inf J_n(g t) exp(i omega t) dt`: adaptive quadrature on unit panels up to a
/// cutoff, then the Hankel expansion of `J_n` integrated term by term.
pub fn halfline_by_quadrature(n: i64, omega: f64, g: f64) -> C64 {
    let kmin = (omega + g).abs().min((omega - g).abs());
    let cutoff = (60.0 / kmin).max(60.0 / g).ceil();
    let mut head = C64::new(0.0, 0.0);
    let panels = cutoff as usize;
    for i in 0..panels {
        let (a, b) = (i as f64, i as f64 + 1.0);
        let re = quadrature::integrate(|t| bessel_j(n, g * t).unwrap() * (omega * t).cos(), a, b, 1e-14).integral;
        let im = quadrature::integrate(|t| bessel_j(n, g * t).unwrap() * (omega * t).sin(), a, b, 1e-14).integral;
        head += C64::new(re, im);
    }
    // J_n(x) ~ sqrt(2/(pi x)) Re[exp(i(x - phi)) sum_k i^k a_k x^-k], phi = n pi/2 + pi/4
    let phi = n as f64 * PI / 2.0 + PI / 4.0;
    let nu2 = 4.0 * (n * n) as f64;
    let mut ak = 1.0;
    let mut tail = C64::new(0.0, 0.0);
    let ipow = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
    for k in 0..30usize {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            ak *= (nu2 - odd * odd) / (k as f64 * 8.0);
        }
        let c = ak * g.powi(-(k as i32));
        if c == 0.0 {
            break;
        }
        let a = k as f64 + 0.5;
        let plus = ipow[k % 4] * C64::from_polar(1.0, -phi) * oscillatory_tail(a, omega + g, cutoff);
        let minus = ipow[(4 - k % 4) % 4] * C64::from_polar(1.0, phi) * oscillatory_tail(a, omega - g, cutoff);
        let term = (plus + minus) * c;
        tail += term;
        if term.norm() < 1e-17 {
            break;
        }
    }
    head + tail * 0.5 * (2.0 / (PI * g)).sqrt()
}

/// Least-squares fit of `samples` (taken at `times`) to `sum_k c_k basis(t, k)` for
/// `k < n_basis`; returns the coefficients.
pub fn linear_fit<F: Fn(f64, usize) -> C64>(times: &[f64], samples: &[C64], n_basis: usize, basis: F) -> Vec<C64> {
    let a = CMatrix::from_fn(times.len(), n_basis, |r, k| basis(times[r], k));
    let y = CMatrix::from_fn(times.len(), 1, |r, _| samples[r]);
    let sol = a.svd(true, true).solve(&y, 1e-14).expect("svd solve");
    sol.column(0).iter().copied().collect()
}

/// Mean of `values` sampled at `times` over `[a, b]`, by the trapezoid rule.
pub fn window_mean(times: &[f64], values: &[f64], a: f64, b: f64) -> f64 {
    let mut s = 0.0;
    for i in 1..times.len() {
        let (t0, t1) = (times[i - 1], times[i]);
        if t0 >= a - 1e-12 && t1 <= b + 1e-12 {
            s += 0.5 * (t1 - t0) * (values[i - 1] + values[i]);
        }
    }
    s / (b - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_integral_agrees_with_recurrence() {
        for n in 0..6 {
            for x in [0.3, 2.0, 11.0] {
                assert!((bessel_by_integral(n, x) - bessel_j(n, x).unwrap()).abs() < 1e-13);
            }
        }
    }
}
