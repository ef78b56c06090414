//! Several impurities (field, hopping, pairing) on an infinite XX background.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::bessel::{bessel_table, MAX_BESSEL_ORDER};
use super::grid::{VolterraGrid, VolterraSolution};
use super::kernel::minus_i_pow;
use crate::error::{Error, Result};
use crate::model::chain::ImpurityTerm;
use crate::model::ChainSpec;
use crate::C64;

/// One impurity term restricted to the support: sparse `(row, col, value)` entries
/// of its unit-amplitude `J` and `K` blocks, with its trapezoid weights.
struct Term {
    hop: Vec<(usize, usize, f64)>,
    pair: Vec<(usize, usize, f64)>,
    hist: Vec<f64>,
    end: Vec<f64>,
}

/// Solves the coupled equations for `X_m(q;t)` and `Y_m(q;t)` on the impurity support
/// of an infinite chain whose homogeneous part is an XX chain (`gamma = 0`):
///
/// ```text
/// X_m = exp(-i w_q tau) - i sum_{j,l} exp(i q (m - l)) int G_{m-j}(t - s) [dJ_jl X_l + dK_jl Y_l](s) ds
/// Y_m =                 + i sum_{j,l} exp(i q (m - l)) int conj(G_{m-j})(t - s) [dK_jl X_l + dJ_jl Y_l](s) ds
/// ```
///
/// with `w_q = g cos q + h` and `G_n(tau) = exp(-i h tau) (-i)^n J_n(g tau)`. Site
/// labels are positions on the infinite chain; bond `b` joins `b` and `b + 1` and
/// `n_sites`/`boundary` of `spec` are ignored. The initial hole component vanishes,
/// which is the case for any initial state diagonal in the momentum modes.
/// Amplitudes at `extra_sites` follow from one more quadrature pass.
pub fn solve_inhomogeneous_system(
    spec: &ChainSpec,
    grid: &VolterraGrid,
    extra_sites: &[i64],
) -> Result<VolterraSolution> {
    if spec.gamma != 0.0 {
        return Err(Error::Unsupported(
            "the Volterra system needs an XX background (gamma = 0); use the flow instead".into(),
        ));
    }
    let mut support = BTreeSet::new();
    let mut raw = Vec::new();
    for (term, profile) in spec.profiles() {
        let (hop, pair): (Vec<(i64, i64, f64)>, Vec<(i64, i64, f64)>) = match term {
            ImpurityTerm::Field(s) => (vec![(s as i64, s as i64, 1.0)], vec![]),
            ImpurityTerm::Hopping(b) => {
                let b = b as i64;
                (vec![(b, b + 1, 0.5), (b + 1, b, 0.5)], vec![])
            }
            ImpurityTerm::Pairing(b) => {
                let b = b as i64;
                (vec![], vec![(b, b + 1, -0.5), (b + 1, b, 0.5)])
            }
        };
        for &(r, c, _) in hop.iter().chain(&pair) {
            support.insert(r);
            support.insert(c);
        }
        let (hist, end) = grid.weights(profile)?;
        raw.push((hop, pair, hist, end));
    }
    let support: Vec<i64> = support.into_iter().collect();
    let s = support.len();
    let pos = |x: i64| support.binary_search(&x).unwrap();
    let terms: Vec<Term> = raw
        .into_iter()
        .map(|(hop, pair, hist, end)| Term {
            hop: hop.into_iter().map(|(r, c, v)| (pos(r), pos(c), v)).collect(),
            pair: pair.into_iter().map(|(r, c, v)| (pos(r), pos(c), v)).collect(),
            hist,
            end,
        })
        .collect();

    let extra: Vec<i64> = extra_sites.iter().copied().filter(|k| !support.contains(k)).collect();
    let rows: Vec<i64> = support.iter().chain(&extra).copied().collect();
    let nr = rows.len();
    let nt = grid.n_times();
    let nq = grid.n_q();
    let dt = grid.dt;

    if s == 0 {
        // nothing scatters: free plane waves
        let cos_q = grid.cos_q();
        let x: Vec<Vec<C64>> = rows
            .iter()
            .map(|_| {
                let mut v = Vec::with_capacity(nq * nt);
                for &c in &cos_q {
                    let w = spec.g * c + spec.h;
                    v.extend((0..nt).map(|m| C64::from_polar(1.0, -w * m as f64 * dt)));
                }
                v
            })
            .collect();
        let y = rows.iter().map(|_| vec![C64::new(0.0, 0.0); nq * nt]).collect();
        return Ok(VolterraSolution::new(grid.clone(), rows, x, Some(y)));
    }

    let max_d =
        rows.iter().flat_map(|&m| support.iter().map(move |&j| (m - j).unsigned_abs())).max().unwrap_or(0) as usize;
    if max_d as i64 > MAX_BESSEL_ORDER {
        return Err(Error::BesselOrder { n: max_d as i64, max: MAX_BESSEL_ORDER });
    }
    // propagator values G_d(tau_k) for site offsets d = row - support site
    let g = spec.g;
    let h = spec.h;
    let tables: Vec<Vec<f64>> = (0..nt).map(|k| bessel_table(max_d, (g * k as f64 * dt).abs())).collect();
    let prop = |d: i64, k: usize| -> C64 {
        let ad = d.unsigned_abs() as usize;
        let flip = ((d < 0) as u32 + (g < 0.0) as u32) % 2 == 1 && ad % 2 == 1;
        let j = if flip { -tables[k][ad] } else { tables[k][ad] };
        C64::from_polar(1.0, -h * k as f64 * dt) * minus_i_pow(d) * j
    };

    // Kernel sequences per term: kxx[t][r][l][k] = sum_j G_{r-j}(tau_k) dJ_jl, etc.
    let zero = C64::new(0.0, 0.0);
    let nterm = terms.len();
    let idx = |t: usize, r: usize, l: usize| (t * nr + r) * s + l;
    let mut kxx = vec![vec![zero; nt]; nterm * nr * s];
    let mut kxy = kxx.clone();
    let mut kyx = kxx.clone();
    let mut kyy = kxx.clone();
    for (ti, term) in terms.iter().enumerate() {
        for (ri, &row) in rows.iter().enumerate() {
            for &(j, l, v) in &term.hop {
                let d = row - support[j];
                for k in 0..nt {
                    let gv = prop(d, k) * v;
                    kxx[idx(ti, ri, l)][k] += gv;
                    kyy[idx(ti, ri, l)][k] += gv.conj();
                }
            }
            for &(j, l, v) in &term.pair {
                let d = row - support[j];
                for k in 0..nt {
                    let gv = prop(d, k) * v;
                    kxy[idx(ti, ri, l)][k] += gv;
                    kyx[idx(ti, ri, l)][k] += gv.conj();
                }
            }
        }
    }

    let cos_q = grid.cos_q();
    let i1 = C64::new(0.0, 1.0);
    // per momentum: (x rows, y rows), each nr x nt
    let per_q: Vec<Result<(Vec<Vec<C64>>, Vec<Vec<C64>>)>> = (0..nq)
        .into_par_iter()
        .map(|qi| {
            let q = grid.q[qi];
            let w = g * cos_q[qi] + h;
            let phase = |r: usize, l: usize| C64::from_polar(1.0, q * (rows[r] - support[l]) as f64);
            let ph: Vec<Vec<C64>> = (0..nr).map(|r| (0..s).map(|l| phase(r, l)).collect()).collect();
            let mut x = vec![vec![zero; nt]; nr];
            let mut y = vec![vec![zero; nt]; nr];
            for r in 0..nr {
                x[r][0] = C64::new(1.0, 0.0);
            }
            for m in 1..nt {
                let free = C64::from_polar(1.0, -w * m as f64 * dt);
                // history sums over nodes 0..m-1
                let mut hx = vec![zero; nr];
                let mut hy = vec![zero; nr];
                for (ti, term) in terms.iter().enumerate() {
                    for r in 0..nr {
                        let mut ax = zero;
                        let mut ay = zero;
                        for l in 0..s {
                            let (a, b, c, d) =
                                (&kxx[idx(ti, r, l)], &kxy[idx(ti, r, l)], &kyx[idx(ti, r, l)], &kyy[idx(ti, r, l)]);
                            let (xl, yl) = (&x[l], &y[l]);
                            let mut sx = zero;
                            let mut sy = zero;
                            for i in 0..m {
                                let wgt = term.hist[i];
                                if wgt == 0.0 {
                                    continue;
                                }
                                let k = m - i;
                                sx += (a[k] * xl[i] + b[k] * yl[i]) * wgt;
                                sy += (c[k] * xl[i] + d[k] * yl[i]) * wgt;
                            }
                            ax += ph[r][l] * sx;
                            ay += ph[r][l] * sy;
                        }
                        hx[r] += ax;
                        hy[r] += ay;
                    }
                }
                // implicit node m on the support: G_d(0) = delta_d0
                let mut mat = DMatrix::<C64>::identity(2 * s, 2 * s);
                for term in &terms {
                    let e = term.end[m];
                    if e == 0.0 {
                        continue;
                    }
                    for &(j, l, v) in &term.hop {
                        let p = ph[j][l];
                        mat[(j, l)] += i1 * p * (v * e);
                        mat[(s + j, s + l)] -= i1 * p * (v * e);
                    }
                    for &(j, l, v) in &term.pair {
                        let p = ph[j][l];
                        mat[(j, s + l)] += i1 * p * (v * e);
                        mat[(s + j, l)] -= i1 * p * (v * e);
                    }
                }
                let rhs =
                    DVector::from_iterator(2 * s, (0..s).map(|r| free - i1 * hx[r]).chain((0..s).map(|r| i1 * hy[r])));
                let lu = mat.lu();
                let det = lu.determinant();
                if det.norm() < 1e-6 {
                    return Err(Error::SingularStep { t: grid.time(m) });
                }
                let z = lu.solve(&rhs).ok_or(Error::SingularStep { t: grid.time(m) })?;
                for r in 0..s {
                    x[r][m] = z[r];
                    y[r][m] = z[s + r];
                }
                // off-support rows: explicit, including the newest node
                for r in s..nr {
                    let mut ax = hx[r];
                    let mut ay = hy[r];
                    for (ti, term) in terms.iter().enumerate() {
                        let e = term.end[m];
                        if e == 0.0 {
                            continue;
                        }
                        for l in 0..s {
                            let (a, b, c, d) =
                                (&kxx[idx(ti, r, l)], &kxy[idx(ti, r, l)], &kyx[idx(ti, r, l)], &kyy[idx(ti, r, l)]);
                            ax += ph[r][l] * (a[0] * x[l][m] + b[0] * y[l][m]) * e;
                            ay += ph[r][l] * (c[0] * x[l][m] + d[0] * y[l][m]) * e;
                        }
                    }
                    x[r][m] = free - i1 * ax;
                    y[r][m] = i1 * ay;
                }
            }
            Ok((x, y))
        })
        .collect();

    let mut xs = vec![vec![zero; nq * nt]; nr];
    let mut ys = vec![vec![zero; nq * nt]; nr];
    for (qi, res) in per_q.into_iter().enumerate() {
        let (x, y) = res?;
        for r in 0..nr {
            xs[r][qi * nt..(qi + 1) * nt].copy_from_slice(&x[r]);
            ys[r][qi * nt..(qi + 1) * nt].copy_from_slice(&y[r]);
        }
    }
    Ok(VolterraSolution::new(grid.clone(), rows, xs, Some(ys)))
}
