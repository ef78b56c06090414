//! Site and momentum coupling matrices.
//!
//! Fermionic form of the chain:
//!
//! ```text
//! H = sum_jk J_jk c+_j c_k + 1/2 sum_jk (conj(K_jk) c+_j c+_k + K_jk c_k c_j)
//! ```
//!
//! with `J_{j,j+1} = (g + g_j)/2`, `J_jj = h + h_j` and
//! `K_{j,j+1} = -K_{j+1,j} = -(gamma + gamma_j)/2`. With
//! `c_j = N^{-1/2} sum_q exp(-i q j) a_q` the momentum couplings are
//!
//! ```text
//! alpha_qp = (1/N) sum_jk J_jk exp(i (q j - p k))
//! beta_qp  = (1/N) sum_jk K_jk exp(-i (q j + p k))
//! ```

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::chain::{Boundary, ChainSpec, ImpurityTerm, MomentumGrid};
use crate::model::profile::Side;
use crate::{CMatrix, C64};

/// `J` (Hermitian) and `K` (antisymmetric) at one instant, in the site basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    pub hopping: CMatrix,
    pub pairing: CMatrix,
    pub t: f64,
    pub boundary: Boundary,
}

/// `alpha` (Hermitian) and `beta` (antisymmetric) on the momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumCouplings {
    pub alpha: CMatrix,
    pub beta: CMatrix,
    pub t: f64,
}

pub(crate) fn homogeneous_site_matrices(spec: &ChainSpec) -> (CMatrix, CMatrix) {
    let n = spec.n_sites;
    let mut j = DMatrix::from_diagonal_element(n, n, C64::new(spec.h, 0.0));
    let mut k = CMatrix::zeros(n, n);
    for b in 1..=spec.n_bonds() {
        add_bond(spec, b, spec.g, spec.gamma, &mut j, &mut k);
    }
    (j, k)
}

fn add_bond(spec: &ChainSpec, b: usize, hop: f64, pair: f64, j: &mut CMatrix, k: &mut CMatrix) {
    let (l, r) = spec.bond_sites(b);
    let (l, r) = (l - 1, r - 1);
    j[(l, r)] += 0.5 * hop;
    j[(r, l)] += 0.5 * hop;
    k[(l, r)] -= 0.5 * pair;
    k[(r, l)] += 0.5 * pair;
}

/// Site matrices of one impurity term at unit amplitude.
pub(crate) fn term_site_matrices(spec: &ChainSpec, term: ImpurityTerm) -> (CMatrix, CMatrix) {
    let n = spec.n_sites;
    let mut j = CMatrix::zeros(n, n);
    let mut k = CMatrix::zeros(n, n);
    match term {
        ImpurityTerm::Field(s) => j[(s - 1, s - 1)] = C64::new(1.0, 0.0),
        ImpurityTerm::Hopping(b) => add_bond(spec, b, 1.0, 0.0, &mut j, &mut k),
        ImpurityTerm::Pairing(b) => add_bond(spec, b, 0.0, 1.0, &mut j, &mut k),
    }
    (j, k)
}

/// Site couplings at `t`, right-continuous in time.
pub fn build_site_couplings(spec: &ChainSpec, t: f64) -> Result<CouplingMatrices> {
    build_site_couplings_at(spec, t, Side::Right)
}

/// Site couplings at `t`, taking profile limits from `side`.
///
/// `Side::Left` at `t0` gives the pre-quench Hamiltonian.
pub fn build_site_couplings_at(spec: &ChainSpec, t: f64, side: Side) -> Result<CouplingMatrices> {
    spec.validate()?;
    spec.check_time(t)?;
    let (mut j, mut k) = homogeneous_site_matrices(spec);
    for (term, profile) in spec.profiles() {
        let c = profile.value(t, side)?;
        match term {
            ImpurityTerm::Field(s) => j[(s - 1, s - 1)] += c,
            ImpurityTerm::Hopping(b) => add_bond(spec, b, c, 0.0, &mut j, &mut k),
            ImpurityTerm::Pairing(b) => add_bond(spec, b, 0.0, c, &mut j, &mut k),
        }
    }
    Ok(CouplingMatrices { hopping: j, pairing: k, t, boundary: spec.boundary })
}

/// `F_qj = exp(i q_q j) / sqrt(N)`.
pub(crate) fn fourier_matrix(n: usize) -> CMatrix {
    let grid = MomentumGrid::new(n);
    let s = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |q, j| grid.phase(q, j as i64 + 1) * s)
}

pub(crate) fn site_to_momentum(f: &CMatrix, j: &CMatrix, k: &CMatrix) -> (CMatrix, CMatrix) {
    let fc = f.conjugate();
    let alpha = f * j * f.adjoint();
    let beta = &fc * k * fc.transpose();
    (alpha, beta)
}

/// Momentum couplings of a periodic chain.
pub fn to_momentum_couplings(c: &CouplingMatrices) -> Result<MomentumCouplings> {
    if c.boundary != Boundary::Periodic {
        return Err(Error::UnsupportedBoundary);
    }
    let n = c.hopping.nrows();
    check_square(&c.hopping, n, "hopping")?;
    check_square(&c.pairing, n, "pairing")?;
    let (alpha, beta) = site_to_momentum(&fourier_matrix(n), &c.hopping, &c.pairing);
    Ok(MomentumCouplings { alpha, beta, t: c.t })
}

/// Inverse of [`to_momentum_couplings`].
pub fn from_momentum_couplings(mc: &MomentumCouplings) -> Result<CouplingMatrices> {
    let n = mc.alpha.nrows();
    check_square(&mc.alpha, n, "alpha")?;
    check_square(&mc.beta, n, "beta")?;
    let f = fourier_matrix(n);
    let fc = f.conjugate();
    let hopping = f.adjoint() * &mc.alpha * &f;
    let pairing = fc.adjoint() * &mc.beta * &f;
    Ok(CouplingMatrices { hopping, pairing, t: mc.t, boundary: Boundary::Periodic })
}

/// Momentum couplings of a ring with field impurities only, assembled directly:
/// `alpha_qp = (g cos q + h) delta_qp + (1/N) sum_k h_k(t) exp(i k (q - p))`,
/// `beta_{q,-q} = -i gamma sin q`.
pub fn xy_momentum_direct(spec: &ChainSpec, t: f64) -> Result<MomentumCouplings> {
    spec.validate()?;
    spec.check_time(t)?;
    if spec.boundary != Boundary::Periodic {
        return Err(Error::UnsupportedBoundary);
    }
    if spec.has_bond_impurities() {
        return Err(Error::InvalidModel("direct momentum assembly handles field impurities only".into()));
    }
    let n = spec.n_sites;
    let grid = MomentumGrid::new(n);
    let mut alpha = CMatrix::zeros(n, n);
    let mut beta = CMatrix::zeros(n, n);
    for i in 0..n {
        let (c, s) = grid.cos_sin(i);
        alpha[(i, i)] = C64::new(spec.g * c + spec.h, 0.0);
        beta[(i, grid.neg(i))] = C64::new(0.0, -spec.gamma * s);
    }
    for (&site, profile) in &spec.impurity_h {
        let amp = profile.evaluate(t)? / n as f64;
        for q in 0..n {
            let uq = grid.phase(q, site as i64);
            for p in 0..n {
                alpha[(q, p)] += uq * grid.phase(p, site as i64).conj() * amp;
            }
        }
    }
    Ok(MomentumCouplings { alpha, beta, t })
}

fn check_square(m: &CMatrix, n: usize, what: &str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!("{what} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::profile::TimeProfile;

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn homogeneous_ring_is_diagonal_in_momentum() {
        let spec = ChainSpec::new(8, Boundary::Periodic, 1.3, 0.4, -0.2);
        let mc = to_momentum_couplings(&build_site_couplings(&spec, 0.5).unwrap()).unwrap();
        let direct = xy_momentum_direct(&spec, 0.5).unwrap();
        assert!(max_diff(&mc.alpha, &direct.alpha) < 1e-13);
        assert!(max_diff(&mc.beta, &direct.beta) < 1e-13);
    }

    #[test]
    fn field_impurity_matches_direct_assembly() {
        let spec = ChainSpec::new(7, Boundary::Periodic, 1.0, 0.6, 0.3)
            .with_window(0.0, 2.0)
            .with_field_impurity(3, TimeProfile::step(0.5, 0.8))
            .with_field_impurity(6, TimeProfile::drive(0.0, 0.2, 1.5, 0.1));
        for t in [0.0, 0.5, 1.3] {
            let mc = to_momentum_couplings(&build_site_couplings(&spec, t).unwrap()).unwrap();
            let direct = xy_momentum_direct(&spec, t).unwrap();
            assert!(max_diff(&mc.alpha, &direct.alpha) < 1e-13);
            assert!(max_diff(&mc.beta, &direct.beta) < 1e-13);
        }
    }

    #[test]
    fn left_limit_gives_pre_quench_couplings() {
        let spec = ChainSpec::new(4, Boundary::Open, 1.0, 0.0, 0.0).with_field_impurity(2, TimeProfile::step(0.0, 1.0));
        let before = build_site_couplings_at(&spec, 0.0, Side::Left).unwrap();
        let after = build_site_couplings(&spec, 0.0).unwrap();
        assert_eq!(before.hopping[(1, 1)].re, 0.0);
        assert_eq!(after.hopping[(1, 1)].re, 1.0);
    }

    #[test]
    fn out_of_window_time_is_rejected() {
        let spec = ChainSpec::new(4, Boundary::Open, 1.0, 0.0, 0.0).with_window(0.0, 1.0);
        assert!(matches!(build_site_couplings(&spec, 1.5), Err(Error::TimeOutOfDomain { .. })));
    }
}
