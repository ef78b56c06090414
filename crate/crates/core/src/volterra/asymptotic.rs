//! Long-time limits after switching on a single field impurity.
//!
//! The chain starts in the thermal state of a homogeneous XX chain with uniform
//! field `h0` (occupations `f_p = f(g cos p + h0)`), and a field `h` is switched on
//! at one site.

use std::f64::consts::PI;

use super::kernel::bessel_halfline_transform;
use crate::error::{Error, Result};
use crate::spectral::thermal_occupation;

fn occupation(g: f64, h0: f64, beta: f64, p: f64) -> f64 {
    thermal_occupation(beta, g * p.cos() + h0)
}

fn integrate_p<F: Fn(f64) -> f64>(f: F) -> f64 {
    let pieces = 32;
    (0..pieces)
        .map(|i| {
            let a = -PI + 2.0 * PI * i as f64 / pieces as f64;
            let b = a + 2.0 * PI / pieces as f64;
            quadrature::integrate(&f, a, b, 1e-14).integral
        })
        .sum()
}

/// Magnetization before the impurity is switched on: `(1/pi) int f_p dp - 1`.
pub fn initial_magnetization(g: f64, beta: f64, h0: f64) -> f64 {
    integrate_p(|p| occupation(g, h0, beta, p)) / PI - 1.0
}

/// Scattering-continuum shift of the impurity-site magnetization:
///
/// `-(h^2 / pi) int_{-pi}^{pi} f_p / (g^2 sin^2 p + h^2) dp`.
///
/// This ignores the bound state the impurity creates, see [`bound_state_shift`].
pub fn asymptotic_quench_observable(g: f64, h: f64, beta: f64, h0: f64) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    -h * h / PI * integrate_p(|p| occupation(g, h0, beta, p) / (g * g * p.sin().powi(2) + h * h))
}

/// Time-averaged contribution of the impurity bound state at energy
/// `sign(h) sqrt(g^2 + h^2)`: `(1/pi) int f_p A^4 sinh^2 k / (cosh k - cos p)^2 dp`
/// with `sinh k = |h|/g` and `A^2 = tanh k`.
pub fn bound_state_shift(g: f64, h: f64, beta: f64, h0: f64) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    let kappa = (h.abs() / g.abs()).asinh();
    let a2 = kappa.tanh();
    let (sh, ch) = (kappa.sinh(), kappa.cosh());
    // the bound state is even about the impurity, so its overlap is the same for p and -p
    a2 * a2 * sh * sh / PI * integrate_p(|p| occupation(g, h0, beta, p) / (ch - p.cos()).powi(2))
}

/// Long-time average of the impurity-site magnetization, continuum plus bound state.
pub fn asymptotic_local_magnetization(g: f64, h: f64, beta: f64, h0: f64) -> f64 {
    initial_magnetization(g, beta, h0)
        + asymptotic_quench_observable(g, h, beta, h0)
        + bound_state_shift(g, h, beta, h0)
}

/// `|X(p; inf)|^2 = 1 / |1 + i h J^_0(g cos p)|^2`, the weight of the scattering state
/// at the impurity site, from the half-line transform of the kernel.
pub fn scattering_weight(g: f64, h: f64, p: f64) -> Result<f64> {
    let omega = g * p.cos();
    if (omega.abs() - g.abs()).abs() < 1e-9 {
        return Err(Error::BandEdge { omega, g });
    }
    let jhat = bessel_halfline_transform(0, omega, g.abs())?;
    let denom = crate::C64::new(1.0, 0.0) + crate::C64::new(0.0, h) * jhat;
    Ok(1.0 / denom.norm_sqr())
}
