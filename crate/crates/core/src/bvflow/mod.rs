//! Heisenberg flow of the amplitude matrices `(A, B)`.
//!
//! With `a_q(t) = sum_p (A_qp(t) a_p + B_qp(t) a+_p)` the amplitudes obey
//!
//! ```text
//! i dA/dt = alpha A + conj(beta) conj(B)
//! i dB/dt = alpha B + conj(beta) conj(A)
//! ```
//!
//! starting from `A = 1`, `B = 0`. The same equations hold in the site basis
//! with `(J, K)` in place of `(alpha, beta)`, which is how open chains are run.
//! Column `p` of `(A, B)` evolves independently of the other columns.

mod generator;
mod integrate;

pub use generator::FlowGenerator;
pub use integrate::{
    evolve, integrate_columns, integrate_flow, integrate_observed, FlowSummary, IntegratorConfig, Method, Trajectory,
};

#[cfg(test)]
mod tests;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{MomentumCouplings, MomentumGrid};
use crate::{CMatrix, C64};

/// Basis the amplitudes are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Rows and columns indexed by the momentum grid.
    Momentum,
    /// Rows and columns indexed by site (open chains).
    Site,
}

/// Amplitudes at one time. `a` and `b` are `N x m`, where `m < N` when only
/// selected columns were integrated.
#[derive(Debug, Clone, PartialEq)]
pub struct BVState {
    pub t: f64,
    pub a: CMatrix,
    pub b: CMatrix,
    pub basis: Basis,
}

impl BVState {
    pub fn identity(n: usize, t: f64, basis: Basis) -> Self {
        Self { t, a: CMatrix::identity(n, n), b: CMatrix::zeros(n, n), basis }
    }

    /// Identity restricted to `columns`.
    pub fn identity_columns(n: usize, columns: &[usize], t: f64, basis: Basis) -> Self {
        let mut a = CMatrix::zeros(n, columns.len());
        for (c, &p) in columns.iter().enumerate() {
            a[(p, c)] = C64::new(1.0, 0.0);
        }
        Self { t, a, b: CMatrix::zeros(n, columns.len()), basis }
    }

    pub fn n_modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_full(&self) -> bool {
        self.a.nrows() == self.a.ncols()
    }

    /// Deviation from the canonical anticommutation relations.
    ///
    /// For a full state this is `(max|AA+ + BB+ - 1|, max|AB^T + BA^T|)`.
    /// For a column subset the equivalent orthonormality of the selected
    /// columns of the Nambu matrix is measured instead.
    pub fn car_defect(&self) -> (f64, f64) {
        let m = self.a.ncols();
        let full = self.is_full();
        // full states: rows of A and B become columns of the transposes
        let (x, y) = if full { (self.a.transpose(), self.b.transpose()) } else { (self.a.clone(), self.b.clone()) };
        let col = |z: &CMatrix, i: usize| z.column(i).as_slice().to_vec();
        let cols_x: Vec<Vec<C64>> = (0..m).map(|i| col(&x, i)).collect();
        let cols_y: Vec<Vec<C64>> = (0..m).map(|i| col(&y, i)).collect();
        let zero = C64::new(0.0, 0.0);
        (0..m)
            .into_par_iter()
            .map(|i| {
                let (xi, yi) = (&cols_x[i], &cols_y[i]);
                let mut worst = (0.0f64, 0.0f64);
                for j in i..m {
                    let (xj, yj) = (&cols_x[j], &cols_y[j]);
                    let (mut f, mut s) = (zero, zero);
                    for k in 0..xi.len() {
                        if full {
                            f += xi[k] * xj[k].conj() + yi[k] * yj[k].conj();
                            s += xi[k] * yj[k] + yi[k] * xj[k];
                        } else {
                            f += xi[k].conj() * xj[k] + yi[k] * yj[k].conj();
                            s += xi[k].conj() * yj[k] + yi[k] * xj[k].conj();
                        }
                    }
                    if i == j {
                        f -= C64::new(1.0, 0.0);
                    }
                    worst = (worst.0.max(finite_norm(f)), worst.1.max(finite_norm(s)));
                    if !full && i != j {
                        // the second relation is not symmetric for column subsets
                        let mut s2 = zero;
                        for k in 0..xi.len() {
                            s2 += xj[k].conj() * yi[k] + yj[k] * xi[k].conj();
                        }
                        worst.1 = worst.1.max(finite_norm(s2));
                    }
                }
                worst
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)))
    }

    /// Nambu matrix `[[A, B], [conj B, conj A]]` of a full state.
    pub fn nambu(&self) -> CMatrix {
        let n = self.a.nrows();
        let m = self.a.ncols();
        let mut u = CMatrix::zeros(2 * n, 2 * m);
        u.view_mut((0, 0), (n, m)).copy_from(&self.a);
        u.view_mut((0, m), (n, m)).copy_from(&self.b);
        u.view_mut((n, 0), (n, m)).copy_from(&self.b.conjugate());
        u.view_mut((n, m), (n, m)).copy_from(&self.a.conjugate());
        u
    }

    /// Composition `U_02 = U_12 U_01`, where `self` is `U_12` and `earlier` is `U_01`.
    pub fn compose(&self, earlier: &BVState) -> Result<BVState> {
        if self.basis != earlier.basis || self.a.ncols() != earlier.a.nrows() {
            return Err(Error::DimensionMismatch("incompatible states in composition".into()));
        }
        let a = &self.a * &earlier.a + &self.b * earlier.b.conjugate();
        let b = &self.a * &earlier.b + &self.b * earlier.a.conjugate();
        Ok(BVState { t: self.t, a, b, basis: self.basis })
    }
}

/// `|z|`, with NaN mapped to infinity so that maxima do not drop it.
fn finite_norm(z: C64) -> f64 {
    let r = z.norm();
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

#[cfg(test)]
pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Right-hand side `(dA/dt, dB/dt)` for dense momentum couplings.
pub fn bv_derivative(state: &BVState, mc: &MomentumCouplings) -> Result<(CMatrix, CMatrix)> {
    let n = state.a.nrows();
    if mc.alpha.shape() != (n, n) || mc.beta.shape() != (n, n) || state.b.shape() != state.a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "state is {:?}, couplings are {:?}",
            state.a.shape(),
            mc.alpha.shape()
        )));
    }
    let minus_i = C64::new(0.0, -1.0);
    let bc = mc.beta.conjugate();
    let da = (&mc.alpha * &state.a + &bc * state.b.conjugate()) * minus_i;
    let db = (&mc.alpha * &state.b + &bc * state.a.conjugate()) * minus_i;
    Ok((da, db))
}

/// Site amplitudes `(X_m(p), Y_m(p))` of a momentum-basis ring state.
///
/// `X_m(p) = sum_q exp(-i (q - p) m) A_qp` and
/// `Y_m(p) = sum_q exp(i (q + p) m) conj(B_qp)`, one entry per column in `columns`.
/// Both equal their free values `exp(-i w_p t)` and `0` on a homogeneous XX chain.
pub fn site_amplitudes(state: &BVState, columns: &[usize], site: usize) -> Result<(Vec<C64>, Vec<C64>)> {
    if state.basis != Basis::Momentum {
        return Err(Error::UnsupportedBoundary);
    }
    if columns.len() != state.a.ncols() {
        return Err(Error::DimensionMismatch("column list does not match the state".into()));
    }
    let n = state.a.nrows();
    let grid = MomentumGrid::new(n);
    let x = site as i64;
    let phases: Vec<C64> = (0..n).map(|q| grid.phase(q, x)).collect();
    let mut xs = Vec::with_capacity(columns.len());
    let mut ys = Vec::with_capacity(columns.len());
    for (c, &p) in columns.iter().enumerate() {
        let pp = grid.phase(p, x);
        let mut sx = C64::new(0.0, 0.0);
        let mut sy = C64::new(0.0, 0.0);
        for q in 0..n {
            sx += phases[q].conj() * state.a[(q, c)];
            sy += phases[q] * state.b[(q, c)].conj();
        }
        xs.push(sx * pp);
        ys.push(sy * pp);
    }
    Ok((xs, ys))
}
