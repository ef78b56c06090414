use rayon::prelude::*;

use nalgebra::{DMatrixView, DMatrixViewMut};

use super::{BVState, Basis};
use crate::error::{Error, Result};
use crate::model::chain::ImpurityTerm;
use crate::model::couplings::{fourier_matrix, homogeneous_site_matrices, site_to_momentum, term_site_matrices};
use crate::model::{Boundary, ChainSpec, MomentumGrid, Side, TimeProfile};
use crate::{CMatrix, C64};

/// Time-dependent generator of the flow, built once per chain.
///
/// Rings with field impurities only use `alpha = diag(w) + sum_k (h_k/N) u_k u_k^+`
/// with `u_k(q) = exp(i q k)` and a pairing that only links `q` and `-q`, so one
/// column costs `O(N (1 + s))`. Everything else goes through dense matrices.
#[derive(Debug, Clone)]
pub struct FlowGenerator {
    n: usize,
    basis: Basis,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Structured {
        omega: Vec<f64>,
        /// `conj(beta_{q,-q})`
        pairing_conj: Vec<C64>,
        neg: Vec<usize>,
        fields: Vec<(TimeProfile, Vec<C64>)>,
    },
    Dense {
        alpha0: CMatrix,
        beta0_conj: CMatrix,
        terms: Vec<(TimeProfile, CMatrix, CMatrix)>,
    },
}

impl FlowGenerator {
    /// Structured generator where possible, dense otherwise.
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        spec.validate()?;
        if spec.boundary == Boundary::Periodic && !spec.has_bond_impurities() {
            Ok(Self::structured(spec))
        } else {
            Self::dense(spec)
        }
    }

    /// Dense generator, in momentum space for rings and site space for open chains.
    pub fn dense(spec: &ChainSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n_sites;
        let (j0, k0) = homogeneous_site_matrices(spec);
        let terms: Vec<(ImpurityTerm, TimeProfile)> = spec.profiles().map(|(t, p)| (t, p.clone())).collect();
        let (basis, alpha0, beta0, terms) = match spec.boundary {
            Boundary::Periodic => {
                let f = fourier_matrix(n);
                let (a0, b0) = site_to_momentum(&f, &j0, &k0);
                let terms = terms
                    .into_iter()
                    .map(|(term, p)| {
                        let (j, k) = term_site_matrices(spec, term);
                        let (a, b) = site_to_momentum(&f, &j, &k);
                        (p, a, b.conjugate())
                    })
                    .collect();
                (Basis::Momentum, a0, b0, terms)
            }
            Boundary::Open => {
                let terms = terms
                    .into_iter()
                    .map(|(term, p)| {
                        let (j, k) = term_site_matrices(spec, term);
                        (p, j, k.conjugate())
                    })
                    .collect();
                (Basis::Site, j0, k0, terms)
            }
        };
        Ok(Self { n, basis, kind: Kind::Dense { alpha0, beta0_conj: beta0.conjugate(), terms } })
    }

    fn structured(spec: &ChainSpec) -> Self {
        let n = spec.n_sites;
        let grid = MomentumGrid::new(n);
        let mut omega = Vec::with_capacity(n);
        let mut pairing_conj = Vec::with_capacity(n);
        for i in 0..n {
            let (c, s) = grid.cos_sin(i);
            omega.push(spec.g * c + spec.h);
            // beta_{q,-q} = -i gamma sin q
            pairing_conj.push(C64::new(0.0, spec.gamma * s));
        }
        let neg = (0..n).map(|i| grid.neg(i)).collect();
        let fields = spec
            .impurity_h
            .iter()
            .map(|(&site, p)| (p.clone(), (0..n).map(|q| grid.phase(q, site as i64)).collect()))
            .collect();
        Self { n, basis: Basis::Momentum, kind: Kind::Structured { omega, pairing_conj, neg, fields } }
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_structured(&self) -> bool {
        matches!(self.kind, Kind::Structured { .. })
    }

    /// Dense `(alpha, beta)` at `t`, mainly for cross-checks.
    pub fn couplings(&self, t: f64, side: Side) -> Result<(CMatrix, CMatrix)> {
        let n = self.n;
        match &self.kind {
            Kind::Structured { omega, pairing_conj, neg, fields } => {
                let mut alpha = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    n,
                    omega.iter().map(|&w| C64::new(w, 0.0)),
                ));
                let mut beta = CMatrix::zeros(n, n);
                for q in 0..n {
                    beta[(q, neg[q])] = pairing_conj[q].conj();
                }
                for (p, u) in fields {
                    let amp = p.value(t, side)? / n as f64;
                    for c in 0..n {
                        for r in 0..n {
                            alpha[(r, c)] += u[r] * u[c].conj() * amp;
                        }
                    }
                }
                Ok((alpha, beta))
            }
            Kind::Dense { alpha0, beta0_conj, terms } => {
                let mut alpha = alpha0.clone();
                let mut beta_conj = beta0_conj.clone();
                for (p, a, bc) in terms {
                    let c = p.value(t, side)?;
                    alpha += a * C64::new(c, 0.0);
                    beta_conj += bc * C64::new(c, 0.0);
                }
                Ok((alpha, beta_conj.conjugate()))
            }
        }
    }

    /// `(dA/dt, dB/dt)` for a state with any number of columns.
    pub fn derivative(&self, t: f64, side: Side, state: &BVState) -> Result<(CMatrix, CMatrix)> {
        let (n, m) = state.a.shape();
        if n != self.n || state.b.shape() != (n, m) {
            return Err(Error::DimensionMismatch(format!("state has {n} rows, generator {}", self.n)));
        }
        let mut da = vec![C64::new(0.0, 0.0); n * m];
        let mut db = da.clone();
        self.apply(t, side, state.a.as_slice(), state.b.as_slice(), &mut da, &mut db)?;
        Ok((CMatrix::from_vec(n, m, da), CMatrix::from_vec(n, m, db)))
    }

    /// Column-major right-hand side on raw slices.
    pub(crate) fn apply(&self, t: f64, side: Side, a: &[C64], b: &[C64], da: &mut [C64], db: &mut [C64]) -> Result<()> {
        let n = self.n;
        let m = a.len() / n;
        let minus_i = C64::new(0.0, -1.0);
        match &self.kind {
            Kind::Structured { omega, pairing_conj, neg, fields } => {
                let amps =
                    fields.iter().map(|(p, _)| p.value(t, side).map(|v| v / n as f64)).collect::<Result<Vec<f64>>>()?;
                let min_len = (4096 / n).max(1);
                da.par_chunks_mut(n)
                    .zip(db.par_chunks_mut(n))
                    .zip(a.par_chunks(n).zip(b.par_chunks(n)))
                    .with_min_len(min_len)
                    .for_each(|((da, db), (a, b))| {
                        for q in 0..n {
                            da[q] = a[q] * omega[q] + pairing_conj[q] * b[neg[q]].conj();
                            db[q] = b[q] * omega[q] + pairing_conj[q] * a[neg[q]].conj();
                        }
                        for ((_, u), &amp) in fields.iter().zip(&amps) {
                            if amp == 0.0 {
                                continue;
                            }
                            let mut sa = C64::new(0.0, 0.0);
                            let mut sb = C64::new(0.0, 0.0);
                            for q in 0..n {
                                let uc = u[q].conj();
                                sa += uc * a[q];
                                sb += uc * b[q];
                            }
                            let (sa, sb) = (sa * amp, sb * amp);
                            for q in 0..n {
                                da[q] += u[q] * sa;
                                db[q] += u[q] * sb;
                            }
                        }
                        for q in 0..n {
                            da[q] *= minus_i;
                            db[q] *= minus_i;
                        }
                    });
            }
            Kind::Dense { .. } => {
                let (alpha, beta) = self.couplings(t, side)?;
                let beta_conj = beta.conjugate();
                let av = DMatrixView::from_slice(a, n, m);
                let bv = DMatrixView::from_slice(b, n, m);
                let ac = av.conjugate();
                let bc = bv.conjugate();
                let one = C64::new(1.0, 0.0);
                let zero = C64::new(0.0, 0.0);
                let mut dav = DMatrixViewMut::from_slice(da, n, m);
                dav.gemm(minus_i, &alpha, &av, zero);
                dav.gemm(minus_i, &beta_conj, &bc, one);
                let mut dbv = DMatrixViewMut::from_slice(db, n, m);
                dbv.gemm(minus_i, &alpha, &bv, zero);
                dbv.gemm(minus_i, &beta_conj, &ac, one);
            }
        }
        Ok(())
    }
}
