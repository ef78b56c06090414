//! Integer-order Bessel functions of the first kind.

use crate::error::{Error, Result};

/// Largest supported `|n|`.
pub const MAX_BESSEL_ORDER: i64 = 64;

/// `J_n(x)` for `|n| <= 64` and any real `x`.
pub fn bessel_j(n: i64, x: f64) -> Result<f64> {
    if n.abs() > MAX_BESSEL_ORDER {
        return Err(Error::BesselOrder { n, max: MAX_BESSEL_ORDER });
    }
    let m = n.unsigned_abs() as usize;
    let v = bessel_table(m, x.abs())[m];
    // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x)
    let flips = (n < 0) as u32 + (x < 0.0) as u32;
    Ok(if m % 2 == 1 && flips == 1 { -v } else { v })
}

/// `[J_0(x), ..., J_nmax(x)]` for `x >= 0`.
///
/// Power series for `x < 1`, Miller's backward recurrence normalized by
/// `J_0 + 2 sum_k J_2k = 1` otherwise.
pub fn bessel_table(nmax: usize, x: f64) -> Vec<f64> {
    debug_assert!(x >= 0.0);
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < 1.0 {
        for (n, v) in out.iter_mut().enumerate() {
            *v = series(n, x);
        }
        return out;
    }
    let top = nmax.max(x.ceil() as usize) + 20 + (10.0 * x.cbrt()).ceil() as usize;
    let start = top + top % 2;
    let mut next = 0.0;
    let mut cur = 1.0;
    let mut norm = 2.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        let idx = k - 1;
        if idx <= nmax {
            out[idx] = cur;
        }
        if idx % 2 == 0 {
            norm += if idx == 0 { cur } else { 2.0 * cur };
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

fn series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..60 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}
