//! Initial Gaussian states.

use nalgebra::DVector;

use crate::bvflow::Basis;
use crate::error::{Error, Result};
use crate::model::{build_site_couplings_at, to_momentum_couplings, xy_momentum_direct, Boundary, ChainSpec, Side};
use crate::spectral::{thermal_occupation, SpectralData};
use crate::{CMatrix, C64};

/// Gaussian state at `t0`, stored as `Gamma = <Psi Psi+>` with `Psi = (a, a+)`.
///
/// States that are diagonal in the flow basis keep only their occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState {
    pub beta: f64,
    pub basis: Basis,
    /// Quasiparticle energies, ascending.
    pub energies: Vec<f64>,
    /// `f(E)` for each entry of `energies`.
    pub occupations: Vec<f64>,
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Occupation of each basis mode.
    Diagonal(Vec<f64>),
    Dense(CMatrix),
}

impl ThermalState {
    /// State diagonal in the flow basis with mode energies `omega`.
    ///
    /// Energies may be negative; the mode is then more than half filled.
    pub fn diagonal(beta: f64, omega: &[f64], basis: Basis) -> Self {
        let occ: Vec<f64> = omega.iter().map(|&w| thermal_occupation(beta, w)).collect();
        Self::from_occupations(beta, omega, occ, basis)
    }

    fn from_occupations(beta: f64, omega: &[f64], occ: Vec<f64>, basis: Basis) -> Self {
        let mut order: Vec<usize> = (0..omega.len()).collect();
        order.sort_by(|&a, &b| omega[a].total_cmp(&omega[b]));
        Self {
            beta,
            basis,
            energies: order.iter().map(|&i| omega[i]).collect(),
            occupations: order.iter().map(|&i| occ[i]).collect(),
            repr: Repr::Diagonal(occ),
        }
    }

    /// Thermal state of `H = a+ alpha a + 1/2 (a+ conj(beta) a+ + h.c.)`.
    pub fn from_bdg(beta: f64, alpha: &CMatrix, pairing: &CMatrix, basis: Basis) -> Result<Self> {
        let n = alpha.nrows();
        if alpha.shape() != (n, n) || pairing.shape() != (n, n) {
            return Err(Error::DimensionMismatch("BdG blocks must be square and equal".into()));
        }
        if !(beta >= 0.0) {
            return Err(Error::InvalidModel(format!("inverse temperature {beta} must be non-negative")));
        }
        let off_diagonal = (0..n).any(|i| (0..n).any(|j| i != j && alpha[(i, j)].norm() > 0.0));
        let paired = pairing.iter().any(|z| z.norm() > 0.0);
        if !off_diagonal && !paired {
            let omega: Vec<f64> = (0..n).map(|i| alpha[(i, i)].re).collect();
            return Ok(Self::diagonal(beta, &omega, basis));
        }
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(alpha);
        m.view_mut((0, n), (n, n)).copy_from(&pairing.conjugate());
        m.view_mut((n, 0), (n, n)).copy_from(&pairing.transpose());
        m.view_mut((n, n), (n, n)).copy_from(&(-alpha.transpose()));
        let eig = m.symmetric_eigen();
        // <Psi Psi+> = (1 + exp(-beta M))^-1 = 1 - f(M)
        let weights =
            DVector::from_iterator(2 * n, eig.eigenvalues.iter().map(|&l| C64::new(thermal_occupation(beta, -l), 0.0)));
        let v = &eig.eigenvectors;
        let gamma = v * CMatrix::from_diagonal(&weights) * v.adjoint();
        let mut pos: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        pos.sort_by(f64::total_cmp);
        let energies: Vec<f64> = pos[n..].to_vec();
        let occupations = energies.iter().map(|&e| thermal_occupation(beta, e)).collect();
        Ok(Self { beta, basis, energies, occupations, repr: Repr::Dense(gamma) })
    }

    /// Thermal state of the pre-quench Hamiltonian `H(t0-)`, in the flow basis of `spec`.
    pub fn from_spec(spec: &ChainSpec, beta: f64) -> Result<Self> {
        let c = build_site_couplings_at(spec, spec.t0, Side::Left)?;
        match spec.boundary {
            Boundary::Periodic => {
                let mc = to_momentum_couplings(&c)?;
                Self::from_bdg(beta, &mc.alpha, &mc.beta, Basis::Momentum)
            }
            Boundary::Open => Self::from_bdg(beta, &c.hopping, &c.pairing, Basis::Site),
        }
    }

    /// Thermal state of a homogeneous ring, in the momentum basis.
    pub fn homogeneous(g: f64, gamma: f64, h: f64, beta: f64, n: usize) -> Result<Self> {
        let spec = ChainSpec::new(n, Boundary::Periodic, g, gamma, h);
        let mc = xy_momentum_direct(&spec, spec.t0)?;
        Self::from_bdg(beta, &mc.alpha, &mc.beta, Basis::Momentum)
    }

    /// Momentum modes occupied with `f(E_q)` of the given homogeneous couplings.
    pub fn dispersion(g: f64, gamma: f64, h: f64, beta: f64, n: usize) -> Self {
        let data = SpectralData::new(g, gamma, h, n);
        Self::diagonal(beta, &data.energies, Basis::Momentum)
    }

    pub fn n_modes(&self) -> usize {
        match &self.repr {
            Repr::Diagonal(f) => f.len(),
            Repr::Dense(g) => g.nrows() / 2,
        }
    }

    /// Mode occupations in the flow basis when the state is diagonal there.
    pub fn mode_occupations(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Diagonal(f) => Some(f),
            Repr::Dense(_) => None,
        }
    }

    /// `<Psi Psi+>` as a dense `2N x 2N` matrix.
    pub fn covariance(&self) -> CMatrix {
        match &self.repr {
            Repr::Dense(g) => g.clone(),
            Repr::Diagonal(f) => {
                let n = f.len();
                CMatrix::from_diagonal(&DVector::from_iterator(
                    2 * n,
                    f.iter().map(|&x| C64::new(1.0 - x, 0.0)).chain(f.iter().map(|&x| C64::new(x, 0.0))),
                ))
            }
        }
    }

    /// `<o1 o2>` for `o1 = sum x_a Psi_a`, `o2 = sum y_a Psi_a` at `t0`.
    pub(crate) fn contract(&self, x: &[C64], y: &[C64]) -> C64 {
        let n = x.len() / 2;
        // <Psi_a Psi_b> = Gamma_{a, bbar} with bbar the partner index of b
        let swapped = |b: usize| if b < n { y[b + n] } else { y[b - n] };
        match &self.repr {
            Repr::Diagonal(f) => {
                let mut s = C64::new(0.0, 0.0);
                for a in 0..n {
                    s += x[a] * swapped(a) * (1.0 - f[a]) + x[a + n] * swapped(a + n) * f[a];
                }
                s
            }
            Repr::Dense(g) => {
                let mut s = C64::new(0.0, 0.0);
                for b in 0..2 * n {
                    let yb = swapped(b);
                    if yb == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut col = C64::new(0.0, 0.0);
                    for a in 0..2 * n {
                        col += x[a] * g[(a, b)];
                    }
                    s += col * yb;
                }
                s
            }
        }
    }
}
