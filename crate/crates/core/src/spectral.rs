//! Homogeneous chains: dispersion, Bogoliubov angle and the closed-form flow.
//!
//! For `epsilon_q = g cos q + h` and `Delta_q = gamma sin q` the mode energy is
//! `E_q = sqrt(epsilon_q^2 + Delta_q^2)` and the flow amplitudes are
//!
//! ```text
//! A_qq(t)     = cos(E tau) - i (epsilon / E) sin(E tau)
//! B_{-q,q}(t) = -(Delta / E) sin(E tau),        tau = t - t0
//! ```

use nalgebra::Matrix4;

use crate::bvflow::{BVState, Basis};
use crate::error::{Error, Result};
use crate::model::MomentumGrid;
use crate::{CMatrix, C64};

/// `E_q = sqrt((g cos q + h)^2 + gamma^2 sin^2 q)`.
pub fn dispersion(g: f64, gamma: f64, h: f64, q: f64) -> f64 {
    let (s, c) = q.sin_cos();
    (g * c + h).hypot(gamma * s)
}

/// Angle `phi` in `(-pi/2, pi/2]` with `cos 2phi = epsilon/E` and `sin 2phi = -Delta/E`.
pub fn bogoliubov_angle(g: f64, gamma: f64, h: f64, q: f64) -> Result<f64> {
    let (s, c) = q.sin_cos();
    angle_from_parts(g * c + h, gamma * s, q)
}

fn angle_from_parts(eps: f64, delta: f64, q: f64) -> Result<f64> {
    if eps == 0.0 && delta == 0.0 {
        return Err(Error::DegenerateMode { q });
    }
    // atan2(-0.0, x < 0) is -pi, which would put phi at -pi/2.
    let y = if delta == 0.0 { 0.0 } else { -delta };
    Ok(0.5 * y.atan2(eps))
}

/// Fermi occupation `1 / (exp(beta E) + 1)`, overflow safe, with `beta = inf` allowed.
pub fn thermal_occupation(beta: f64, energy: f64) -> f64 {
    if energy == 0.0 || beta == 0.0 {
        return 0.5;
    }
    let x = beta * energy;
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Closed-form `(A_qq, B_{-q,q})` at time `t` for a flow started at `t0`.
pub fn homogeneous_flow(g: f64, gamma: f64, h: f64, q: f64, t: f64, t0: f64) -> (C64, C64) {
    let (s, c) = q.sin_cos();
    flow_from_parts(g * c + h, gamma * s, t - t0)
}

fn flow_from_parts(eps: f64, delta: f64, tau: f64) -> (C64, C64) {
    let e = eps.hypot(delta);
    let x = e * tau;
    // sin(E tau) / E, continued through E = 0
    let s = if x.abs() < 1e-6 { tau * (1.0 - x * x / 6.0 + x.powi(4) / 120.0) } else { x.sin() / e };
    (C64::new(x.cos(), -eps * s), C64::new(-delta * s, 0.0))
}

/// Mode data of a homogeneous ring on the grid `q_k = 2 pi k / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub g: f64,
    pub gamma: f64,
    pub h: f64,
    pub q: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub delta: Vec<f64>,
    pub energies: Vec<f64>,
    /// `None` for degenerate modes with `E_q = 0`.
    pub angles: Vec<Option<f64>>,
}

impl SpectralData {
    pub fn new(g: f64, gamma: f64, h: f64, n: usize) -> Self {
        let grid = MomentumGrid::new(n);
        let mut out = Self {
            g,
            gamma,
            h,
            q: grid.values(),
            epsilon: Vec::with_capacity(n),
            delta: Vec::with_capacity(n),
            energies: Vec::with_capacity(n),
            angles: Vec::with_capacity(n),
        };
        for i in 0..n {
            let (c, s) = grid.cos_sin(i);
            let (eps, delta) = (g * c + h, gamma * s);
            out.epsilon.push(eps);
            out.delta.push(delta);
            out.energies.push(eps.hypot(delta));
            out.angles.push(angle_from_parts(eps, delta, grid.q(i)).ok());
        }
        out
    }

    pub fn occupations(&self, beta: f64) -> Vec<f64> {
        self.energies.iter().map(|&e| thermal_occupation(beta, e)).collect()
    }
}

/// Full closed-form state on the `n`-point grid.
pub fn homogeneous_state(g: f64, gamma: f64, h: f64, n: usize, t: f64, t0: f64) -> BVState {
    let grid = MomentumGrid::new(n);
    let mut a = CMatrix::zeros(n, n);
    let mut b = CMatrix::zeros(n, n);
    for i in 0..n {
        let (c, s) = grid.cos_sin(i);
        let (aq, bq) = flow_from_parts(g * c + h, gamma * s, t - t0);
        a[(i, i)] = aq;
        b[(grid.neg(i), i)] = bq;
    }
    BVState { t, a, b, basis: Basis::Momentum }
}

/// Single-pair Hamiltonian block on `(a_q, a_-q, a+_q, a+_-q)`.
pub fn pair_block(g: f64, gamma: f64, h: f64, q: f64) -> Matrix4<C64> {
    let (s, c) = q.sin_cos();
    let (eps, d) = (g * c + h, gamma * s);
    let r = |x: f64| C64::new(x, 0.0);
    let i = |x: f64| C64::new(0.0, x);
    Matrix4::new(
        r(eps),
        r(0.0),
        r(0.0),
        i(-d),
        r(0.0),
        r(-eps),
        i(-d),
        r(0.0),
        r(0.0),
        i(d),
        r(eps),
        r(0.0),
        i(d),
        r(0.0),
        r(0.0),
        r(-eps),
    )
}

/// `W(phi) = [[cos phi, -sigma_y sin phi], [sigma_y sin phi, cos phi]]`.
pub fn pair_rotation(phi: f64) -> Matrix4<C64> {
    let (s, c) = phi.sin_cos();
    let r = |x: f64| C64::new(x, 0.0);
    let i = |x: f64| C64::new(0.0, x);
    // sigma_y = [[0, -i], [i, 0]]
    Matrix4::new(
        r(c),
        r(0.0),
        r(0.0),
        i(s),
        r(0.0),
        r(c),
        i(-s),
        r(0.0),
        r(0.0),
        i(-s),
        r(c),
        r(0.0),
        i(s),
        r(0.0),
        r(0.0),
        r(c),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dispersion_values() {
        assert!((dispersion(1.0, 0.0, 0.0, PI / 3.0) - 0.5).abs() < 1e-15);
        assert!((dispersion(1.0, 1.0, 0.0, 0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angle_branch_at_zero_pairing() {
        // Delta = 0 with epsilon < 0 must give +pi/2, not -pi/2.
        let phi = bogoliubov_angle(1.0, 0.0, 0.0, PI).unwrap();
        assert!((phi - PI / 2.0).abs() < 1e-15);
        let phi = bogoliubov_angle(1.0, 1.0, 0.0, PI / 2.0).unwrap();
        assert!((phi + PI / 4.0).abs() < 1e-15);
        assert!(matches!(bogoliubov_angle(1.0, 0.0, 1.0, PI), Err(Error::DegenerateMode { .. })));
    }

    #[test]
    fn rotation_diagonalizes_pair_block() {
        for &(g, gamma, h, q) in &[(1.0, 0.5, 0.3, 0.9), (0.7, -1.2, -0.4, 2.5), (1.0, 1.0, 0.0, PI / 2.0)] {
            let e = dispersion(g, gamma, h, q);
            let w = pair_rotation(bogoliubov_angle(g, gamma, h, q).unwrap());
            let d = w * pair_block(g, gamma, h, q) * w.adjoint();
            let expect = [e, -e, e, -e];
            for r in 0..4 {
                for c in 0..4 {
                    let target = if r == c { expect[r] } else { 0.0 };
                    assert!((d[(r, c)] - target).norm() < 1e-14, "{r},{c}: {}", d[(r, c)]);
                }
            }
        }
    }

    #[test]
    fn closed_form_special_values() {
        let (a, b) = homogeneous_flow(1.0, 0.0, 0.0, 0.4, 1.0, 1.0);
        assert_eq!((a, b), (C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
        // XX chain: pure phase.
        let (a, b) = homogeneous_flow(1.0, 0.0, 0.2, 0.4, 3.0, 0.0);
        let w = 0.4f64.cos() + 0.2;
        assert!((a - C64::from_polar(1.0, -w * 3.0)).norm() < 1e-15);
        assert_eq!(b.norm(), 0.0);
        // zero-energy mode stays put
        let (a, b) = homogeneous_flow(1.0, 0.0, 1.0, PI, 5.0, 0.0);
        assert!((a - C64::new(1.0, 0.0)).norm() < 1e-15 && b.norm() < 1e-15);
    }

    #[test]
    fn occupation_limits() {
        assert_eq!(thermal_occupation(f64::INFINITY, 1.0), 0.0);
        assert_eq!(thermal_occupation(f64::INFINITY, -1.0), 1.0);
        assert_eq!(thermal_occupation(0.0, 3.0), 0.5);
        assert!((thermal_occupation(1e3, 1.0)).abs() < 1e-300);
        assert!((thermal_occupation(1.0, 0.3) + thermal_occupation(1.0, -0.3) - 1.0).abs() < 1e-15);
    }
}
