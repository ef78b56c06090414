//! Exact many-body reference for small chains.
//!
//! Basis states are bit strings with bit `j - 1` set when site `j` is occupied
//! (spin up). Fermion operators carry the Jordan-Wigner string
//! `(-1)^(number of occupied sites to the left)` and act as signed permutations.

use std::collections::HashMap;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::{build_site_couplings_at, ChainSpec, MomentumGrid, Side};
use crate::observables::{Mode, Token};
use crate::{CMatrix, C64};

/// Largest chain the oracle will build a Hamiltonian for.
pub const MAX_SITES: usize = 10;
/// Largest chain the oracle will propagate.
pub const MAX_TRAJECTORY_SITES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub matrix: CMatrix,
    pub n_sites: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: CMatrix,
    pub n_sites: usize,
    pub t: f64,
}

impl DensityMatrix {
    /// `<n_j>` for site `j` (1-based).
    pub fn site_density(&self, site: usize) -> f64 {
        (0..self.matrix.nrows()).filter(|s| s >> (site - 1) & 1 == 1).map(|s| self.matrix[(s, s)].re).sum()
    }

    /// `2 <n_j> - 1`.
    pub fn local_magnetization(&self, site: usize) -> f64 {
        2.0 * self.site_density(site) - 1.0
    }

    /// `(2/N) sum_j <n_j> - 1`.
    pub fn global_magnetization(&self) -> f64 {
        let n = self.n_sites;
        let total: f64 = (1..=n).map(|j| self.site_density(j)).sum();
        2.0 * total / n as f64 - 1.0
    }
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    Ok(())
}

fn string_sign(s: usize, bit: usize) -> f64 {
    if (s & ((1 << bit) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `c_j |s>` as `(sign, s')`, `None` when it vanishes. `site` is 1-based.
pub fn annihilate(s: usize, site: usize) -> Option<(f64, usize)> {
    let bit = site - 1;
    (s >> bit & 1 == 1).then(|| (string_sign(s, bit), s ^ (1 << bit)))
}

/// `c+_j |s>` as `(sign, s')`, `None` when it vanishes.
pub fn create(s: usize, site: usize) -> Option<(f64, usize)> {
    let bit = site - 1;
    (s >> bit & 1 == 0).then(|| (string_sign(s, bit), s | (1 << bit)))
}

/// Dense matrix of `c_j` on the `2^n` dimensional space.
pub fn annihilation_operator(n: usize, site: usize) -> Result<DenseOperator> {
    check_size(n, MAX_SITES)?;
    if site == 0 || site > n {
        return Err(Error::DimensionMismatch(format!("site {site} outside 1..={n}")));
    }
    let dim = 1 << n;
    let mut m = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        if let Some((sign, t)) = annihilate(s, site) {
            m[(t, s)] = C64::new(sign, 0.0);
        }
    }
    Ok(DenseOperator { matrix: m, n_sites: n })
}

/// Fermionic Hamiltonian at `t` from the coupling matrices, right-continuous in time.
pub fn build_dense_hamiltonian(spec: &ChainSpec, t: f64) -> Result<DenseOperator> {
    build_dense_hamiltonian_at(spec, t, Side::Right)
}

pub fn build_dense_hamiltonian_at(spec: &ChainSpec, t: f64, side: Side) -> Result<DenseOperator> {
    let n = spec.n_sites;
    check_size(n, MAX_SITES)?;
    let c = build_site_couplings_at(spec, t, side)?;
    let dim = 1 << n;
    let mut h = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        for j in 1..=n {
            for k in 1..=n {
                let jv = c.hopping[(j - 1, k - 1)];
                if jv != C64::new(0.0, 0.0) {
                    if let Some((s1, a)) = annihilate(s, k) {
                        if let Some((s2, b)) = create(a, j) {
                            h[(b, s)] += jv * (s1 * s2);
                        }
                    }
                }
                let kv = c.pairing[(j - 1, k - 1)];
                if kv != C64::new(0.0, 0.0) {
                    // 1/2 conj(K_jk) c+_j c+_k
                    if let Some((s1, a)) = create(s, k) {
                        if let Some((s2, b)) = create(a, j) {
                            h[(b, s)] += kv.conj() * (0.5 * s1 * s2);
                        }
                    }
                    // 1/2 K_jk c_k c_j
                    if let Some((s1, a)) = annihilate(s, j) {
                        if let Some((s2, b)) = annihilate(a, k) {
                            h[(b, s)] += kv * (0.5 * s1 * s2);
                        }
                    }
                }
            }
        }
    }
    Ok(DenseOperator { matrix: h, n_sites: n })
}

/// `sigma^y |b> = -i |1> for b = 0` and `i |0>` for `b = 1` (bit 1 is spin up).
fn sigma_y_phase(s: usize, bit: usize) -> C64 {
    if s >> bit & 1 == 0 {
        C64::new(0.0, -1.0)
    } else {
        C64::new(0.0, 1.0)
    }
}

/// The same chain assembled from Pauli operators:
/// `sum_b (a_b sx sx + b_b sy sy) + sum_j J_jj (sz_j + 1)/2` with
/// `a_b = (t_b + k_b)/2`, `b_b = (t_b - k_b)/2`, `t_b = J_{j,j+1}`, `k_b = K_{j,j+1}`.
///
/// On open chains this equals [`build_dense_hamiltonian`]. On rings the closing
/// bond differs by the fermion parity, so they agree on the odd-parity sector only.
pub fn build_spin_hamiltonian(spec: &ChainSpec, t: f64) -> Result<DenseOperator> {
    let n = spec.n_sites;
    check_size(n, MAX_SITES)?;
    let c = build_site_couplings_at(spec, t, Side::Right)?;
    let dim = 1 << n;
    let mut h = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        for j in 1..=n {
            let field = c.hopping[(j - 1, j - 1)].re;
            if s >> (j - 1) & 1 == 1 {
                h[(s, s)] += field;
            }
        }
    }
    let bonds: Vec<(usize, usize)> = (1..=spec.n_bonds()).map(|b| spec.bond_sites(b)).collect();
    // collect distinct site pairs so that N = 2 rings do not double count
    let mut pairs: HashMap<(usize, usize), (f64, f64)> = HashMap::new();
    for (l, r) in bonds {
        // the bond's own orientation fixes the sign of K on the closing bond
        let tb = c.hopping[(l - 1, r - 1)].re;
        let kb = c.pairing[(l - 1, r - 1)].re;
        pairs.entry((l.min(r), l.max(r))).or_insert((0.5 * (tb + kb), 0.5 * (tb - kb)));
    }
    for (&(x, y), &(a, b)) in &pairs {
        let (bx, by) = (x - 1, y - 1);
        for s in 0..dim {
            let t2 = s ^ (1 << bx) ^ (1 << by);
            h[(t2, s)] += C64::new(a, 0.0) + sigma_y_phase(s, bx) * sigma_y_phase(s, by) * b;
        }
    }
    Ok(DenseOperator { matrix: h, n_sites: n })
}

/// Thermal state of the pre-quench Hamiltonian `H(t0-)`.
///
/// `beta = inf` gives the uniform mixture over the ground space.
pub fn thermal_density(spec: &ChainSpec, beta: f64) -> Result<DensityMatrix> {
    let h = build_dense_hamiltonian_at(spec, spec.t0, Side::Left)?;
    let eig = h.matrix.symmetric_eigen();
    let e0 = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| {
            if beta.is_infinite() {
                if e - e0 < 1e-9 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-beta * (e - e0)).exp()
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let d = DVector::from_iterator(weights.len(), weights.iter().map(|w| C64::new(w / z, 0.0)));
    let v = &eig.eigenvectors;
    let rho = v * CMatrix::from_diagonal(&d) * v.adjoint();
    Ok(DensityMatrix { matrix: rho, n_sites: spec.n_sites, t: spec.t0 })
}

fn exp_minus_i(h: &CMatrix, tau: f64) -> Result<CMatrix> {
    let eig = h.clone().symmetric_eigen();
    let d =
        DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&e| C64::from_polar(1.0, -e * tau)));
    let v = &eig.eigenvectors;
    let u = v * CMatrix::from_diagonal(&d) * v.adjoint();
    let mut defect = u.adjoint() * &u;
    for i in 0..defect.nrows() {
        defect[(i, i)] -= C64::new(1.0, 0.0);
    }
    let worst = defect.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if worst > 1e-10 {
        return Err(Error::Unitarity { defect: worst });
    }
    Ok(u)
}

/// Propagates `rho` from `spec.t0` and returns it at each of `times` (ascending).
///
/// Intervals on which every profile is constant are exponentiated exactly; the
/// rest use midpoint steps no longer than `dt`. Steps land on every breakpoint.
pub fn propagate_exact(rho: &DensityMatrix, spec: &ChainSpec, times: &[f64], dt: f64) -> Result<Vec<DensityMatrix>> {
    check_size(spec.n_sites, MAX_TRAJECTORY_SITES)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidStep(format!("dt = {dt}")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidStep("record times must be ascending".into()));
    }
    for &t in times {
        spec.check_time(t)?;
    }
    let mut points: Vec<f64> = spec.interior_breakpoints();
    points.extend_from_slice(times);
    points.push(spec.t0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let last = times.last().copied().unwrap_or(spec.t0);
    points.retain(|&p| p >= spec.t0 && p <= last);

    let mut current = rho.matrix.clone();
    let mut out = Vec::with_capacity(times.len());
    let mut next_record = 0;
    let emit = |t: f64, m: &CMatrix, out: &mut Vec<DensityMatrix>, next: &mut usize| {
        while *next < times.len() && times[*next] == t {
            out.push(DensityMatrix { matrix: m.clone(), n_sites: spec.n_sites, t });
            *next += 1;
        }
    };
    emit(points[0], &current, &mut out, &mut next_record);
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let constant = spec.profiles().all(|(_, p)| p.is_constant_on(a, b));
        let u = if constant {
            let h = build_dense_hamiltonian(spec, 0.5 * (a + b))?;
            exp_minus_i(&h.matrix, b - a)?
        } else {
            let steps = ((b - a) / dt - 1e-9).ceil().max(1.0) as usize;
            let hstep = (b - a) / steps as f64;
            let mut u = CMatrix::identity(current.nrows(), current.nrows());
            for k in 0..steps {
                let tm = a + (k as f64 + 0.5) * hstep;
                let h = build_dense_hamiltonian(spec, tm)?;
                u = exp_minus_i(&h.matrix, hstep)? * u;
            }
            u
        };
        current = &u * current * u.adjoint();
        emit(b, &current, &mut out, &mut next_record);
    }
    Ok(out)
}

type Sparse = HashMap<usize, C64>;

fn apply_token(token: Token, n: usize, v: &Sparse) -> Result<Sparse> {
    let grid = MomentumGrid::new(n);
    let norm = 1.0 / (n as f64).sqrt();
    // linear combination of site operators: (site, coefficient)
    let combo: Vec<(usize, C64)> = match token {
        Token::Annihilate(Mode::Site(j)) | Token::Create(Mode::Site(j)) => {
            if j == 0 || j > n {
                return Err(Error::DimensionMismatch(format!("site {j} outside 1..={n}")));
            }
            vec![(j, C64::new(1.0, 0.0))]
        }
        // a_q = N^-1/2 sum_j exp(i q j) c_j
        Token::Annihilate(Mode::Momentum(q)) => (1..=n).map(|j| (j, grid.phase(q, j as i64) * norm)).collect(),
        Token::Create(Mode::Momentum(q)) => (1..=n).map(|j| (j, grid.phase(q, j as i64).conj() * norm)).collect(),
    };
    let creating = matches!(token, Token::Create(_));
    let mut out = Sparse::new();
    for (&s, &amp) in v {
        for &(j, c) in &combo {
            let r = if creating { create(s, j) } else { annihilate(s, j) };
            if let Some((sign, t)) = r {
                *out.entry(t).or_insert(C64::new(0.0, 0.0)) += amp * c * sign;
            }
        }
    }
    Ok(out)
}

/// `Tr(rho o_1 o_2 ... o_k)` by direct action on basis states.
pub fn exact_correlator(tokens: &[Token], rho: &DensityMatrix) -> Result<C64> {
    let n = rho.n_sites;
    let dim = rho.matrix.nrows();
    let mut total = C64::new(0.0, 0.0);
    for s in 0..dim {
        let mut v = Sparse::new();
        v.insert(s, C64::new(1.0, 0.0));
        for &tok in tokens.iter().rev() {
            v = apply_token(tok, n, &v)?;
            if v.is_empty() {
                break;
            }
        }
        // <s| rho O |s> = sum_s' rho_{s s'} <s'|O|s>
        for (&t, &amp) in &v {
            total += rho.matrix[(s, t)] * amp;
        }
    }
    Ok(total)
}

/// All many-body levels `E_gs + sum_{k in S} E_k` over subsets `S` of the
/// quasiparticle energies, sorted.
pub fn free_fermion_levels(ground: f64, energies: &[f64]) -> Vec<f64> {
    let n = energies.len();
    let mut levels: Vec<f64> = (0..1usize << n)
        .map(|mask| ground + (0..n).filter(|&k| mask >> k & 1 == 1).map(|k| energies[k]).sum::<f64>())
        .collect();
    levels.sort_by(f64::total_cmp);
    levels
}

/// Parity operator `(-1)^N` as a diagonal of signs.
pub fn parity_signs(n: usize) -> Vec<f64> {
    (0..1usize << n).map(|s| if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 }).collect()
}
