//! Free propagator of the XX chain and its half-line Fourier transform.

use super::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::C64;

/// `(-i)^n` for any integer `n`.
pub(crate) fn minus_i_pow(n: i64) -> C64 {
    match n.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// Site-space propagator of the homogeneous XX chain over a distance `n`:
///
/// `G_n(tau) = (1/2pi) int dp exp(-i p n) exp(-i (g cos p + h) tau) = exp(-i h tau) (-i)^n J_n(g tau)`.
pub fn momentum_kernel(n: i64, g: f64, h: f64, tau: f64) -> Result<C64> {
    let j = bessel_j(n, g * tau)?;
    Ok(C64::from_polar(1.0, -h * tau) * minus_i_pow(n) * j)
}

/// `int_0^inf J_n(g t) exp(i Omega t) dt` for `g > 0`.
///
/// Inside the band this is `exp(i n asin(Omega/g)) / sqrt(g^2 - Omega^2)`; outside it
/// decays like `(g / (|Omega| + sqrt(Omega^2 - g^2)))^n`.
pub fn bessel_halfline_transform(n: i64, omega: f64, g: f64) -> Result<C64> {
    if !(g > 0.0) {
        return Err(Error::InvalidModel(format!("half-line transform needs g > 0, got {g}")));
    }
    if (omega.abs() - g).abs() < 1e-9 {
        return Err(Error::BandEdge { omega, g });
    }
    let m = n.abs();
    // J_{-n} = (-1)^n J_n
    let parity = if n < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
    let v = if omega.abs() < g {
        let root = (g * g - omega * omega).sqrt();
        C64::from_polar(1.0 / root, m as f64 * (omega / g).asin())
    } else {
        let root = (omega * omega - g * g).sqrt();
        let ratio = (g / (root + omega.abs())).powi(m as i32);
        if omega > 0.0 {
            // i * i^n
            C64::new(0.0, 1.0) * minus_i_pow(-m) * (ratio / root)
        } else {
            // -i * (-i)^n
            C64::new(0.0, -1.0) * minus_i_pow(m) * (ratio / root)
        }
    };
    Ok(v * parity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Direct quadrature of the defining momentum integral.
    fn kernel_oracle(n: i64, g: f64, h: f64, tau: f64) -> C64 {
        let m = 4096;
        let dp = 2.0 * PI / m as f64;
        let mut s = C64::new(0.0, 0.0);
        for k in 0..m {
            let p = k as f64 * dp;
            s += C64::from_polar(1.0, -p * n as f64 - (g * p.cos() + h) * tau);
        }
        s / m as f64
    }

    #[test]
    fn kernel_matches_momentum_integral() {
        for n in [-3i64, -1, 0, 1, 2, 5] {
            for &tau in &[0.0, 0.7, 3.0, 11.0] {
                let k = momentum_kernel(n, 1.3, 0.4, tau).unwrap();
                assert!((k - kernel_oracle(n, 1.3, 0.4, tau)).norm() < 1e-13, "n={n} tau={tau}");
            }
        }
    }

    #[test]
    fn first_order_kernel_carries_minus_i() {
        let k = momentum_kernel(1, 1.0, 0.0, 2.0).unwrap();
        let j1 = bessel_j(1, 2.0).unwrap();
        assert!((k - C64::new(0.0, -j1)).norm() < 1e-15);
    }

    #[test]
    fn transform_zero_order_in_band_is_real() {
        let v = bessel_halfline_transform(0, 0.5, 1.0).unwrap();
        assert!((v.re - 1.0 / 0.75f64.sqrt()).abs() < 1e-15 && v.im == 0.0);
        let v = bessel_halfline_transform(0, 2.0, 1.0).unwrap();
        assert!(v.re.abs() < 1e-16 && (v.im - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let v = bessel_halfline_transform(0, -2.0, 1.0).unwrap();
        assert!(v.re.abs() < 1e-16 && (v.im + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn transform_rejects_band_edge() {
        assert!(matches!(bessel_halfline_transform(2, 1.0 + 1e-10, 1.0), Err(Error::BandEdge { .. })));
        assert!(matches!(bessel_halfline_transform(0, -1.0, 1.0), Err(Error::BandEdge { .. })));
    }

    #[test]
    fn transform_is_continuous_in_order_parity() {
        for &w in &[-2.5, -0.3, 0.8, 1.7] {
            for n in 1..6i64 {
                let a = bessel_halfline_transform(-n, w, 1.2).unwrap();
                let b = bessel_halfline_transform(n, w, 1.2).unwrap();
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((a - b * s).norm() < 1e-15);
            }
        }
    }
}
