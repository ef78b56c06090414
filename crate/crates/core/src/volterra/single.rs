//! Single field impurity on the XX chain.

use rayon::prelude::*;

use super::bessel::bessel_table;
use super::grid::{VolterraGrid, VolterraSolution, XTable};
use super::kernel::minus_i_pow;
use crate::error::{Error, Result};
use crate::model::TimeProfile;
use crate::C64;

/// Solves `X(q;t) = exp(-i w_q tau) - i int_t0^t J_0(g (t - s)) h(s) X(q;s) ds`
/// with `w_q = g cos q` (a uniform field only adds a global phase).
///
/// Product trapezoid rule with the newest node treated implicitly; second order
/// in `dt` when every profile breakpoint is a grid node.
pub fn solve_xx_single_impurity(h_profile: &TimeProfile, g: f64, grid: &VolterraGrid) -> Result<XTable> {
    let (hist, end) = grid.weights(h_profile)?;
    let nt = grid.n_times();
    let dt = grid.dt;
    let kernel: Vec<f64> = (0..nt).map(|d| bessel_table(0, (g * d as f64 * dt).abs())[0]).collect();
    for m in 1..nt {
        if (C64::new(1.0, 0.0) + C64::new(0.0, end[m] * kernel[0])).norm() < 1e-6 {
            return Err(Error::SingularStep { t: grid.time(m) });
        }
    }
    let cos_q = grid.cos_q();
    let mut values = vec![C64::new(0.0, 0.0); grid.n_q() * nt];
    values.par_chunks_mut(nt).zip(cos_q.par_iter()).for_each(|(x, &c)| {
        let w = g * c;
        let mut wx = vec![C64::new(0.0, 0.0); nt];
        x[0] = C64::new(1.0, 0.0);
        wx[0] = x[0] * hist[0];
        for m in 1..nt {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..m {
                acc += wx[j] * kernel[m - j];
            }
            let free = C64::from_polar(1.0, -w * m as f64 * dt);
            let rhs = free - C64::new(0.0, 1.0) * acc;
            x[m] = rhs / C64::new(1.0, end[m] * kernel[0]);
            wx[m] = x[m] * hist[m];
        }
    });
    Ok(XTable { grid: grid.clone(), values })
}

/// Amplitudes at other sites from the impurity-site solution:
///
/// `X_k(q;t) = exp(-i w_q tau) - i exp(i q (k - k_hat)) int G_{k-k_hat}(t - s) h(s) X_hat(q;s) ds`
///
/// using the same quadrature weights as [`solve_xx_single_impurity`], so the
/// impurity site reproduces `x_hat` exactly. A uniform field `h` multiplies every
/// amplitude by `exp(-i h tau)`.
pub fn extend_to_sites(
    x_hat: &XTable,
    k_hat: i64,
    sites: &[i64],
    g: f64,
    h: f64,
    h_profile: &TimeProfile,
) -> Result<VolterraSolution> {
    let grid = &x_hat.grid;
    let (hist, end) = grid.weights(h_profile)?;
    let nt = grid.n_times();
    let nq = grid.n_q();
    let dt = grid.dt;
    let max_d = sites.iter().map(|&k| (k - k_hat).unsigned_abs() as usize).max().unwrap_or(0);
    if max_d as i64 > super::bessel::MAX_BESSEL_ORDER {
        return Err(Error::BesselOrder { n: max_d as i64, max: super::bessel::MAX_BESSEL_ORDER });
    }
    let tables: Vec<Vec<f64>> = (0..nt).map(|d| bessel_table(max_d, (g * d as f64 * dt).abs())).collect();
    let cos_q = grid.cos_q();
    let mut out = Vec::with_capacity(sites.len());
    for &k in sites {
        let d = k - k_hat;
        let ad = d.unsigned_abs() as usize;
        let sign = if d < 0 && ad % 2 == 1 { -1.0 } else { 1.0 };
        let gsign = if g < 0.0 && ad % 2 == 1 { -1.0 } else { 1.0 };
        let phase_n = minus_i_pow(d);
        let kernel: Vec<C64> = tables.iter().map(|t| phase_n * (t[ad] * sign * gsign)).collect();
        let mut values = vec![C64::new(0.0, 0.0); nq * nt];
        values.par_chunks_mut(nt).enumerate().for_each(|(qi, x)| {
            let q = grid.q[qi];
            let w = g * cos_q[qi];
            let xh = &x_hat.values[qi * nt..(qi + 1) * nt];
            let shift = C64::from_polar(1.0, q * d as f64);
            for m in 0..nt {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..m {
                    acc += xh[j] * kernel[m - j] * hist[j];
                }
                if m > 0 {
                    acc += xh[m] * kernel[0] * end[m];
                }
                let tau = m as f64 * dt;
                let free = C64::from_polar(1.0, -w * tau);
                x[m] = (free - C64::new(0.0, 1.0) * shift * acc) * C64::from_polar(1.0, -h * tau);
            }
        });
        out.push(values);
    }
    Ok(VolterraSolution::new(grid.clone(), sites.to_vec(), out, None))
}
