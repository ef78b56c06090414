//! Multi-point fermion correlators through Wick contractions.

use super::thermal::ThermalState;
use crate::bvflow::{BVState, Basis};
use crate::error::{Error, Result};
use crate::model::MomentumGrid;
use crate::C64;

/// Largest number of operators in one correlator.
pub const MAX_ORDER: usize = 8;

/// Fermion mode: a momentum-grid index (0-based) or a site label (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Momentum(usize),
    Site(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Token {
    Create(Mode),
    Annihilate(Mode),
}

/// Product of operators, in order, all taken at the time of the state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelatorRequest {
    pub tokens: Vec<Token>,
}

impl CorrelatorRequest {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self { tokens }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WickValue {
    pub value: C64,
    /// Odd products vanish in a Gaussian state with even parity.
    pub odd_order: bool,
}

/// Annihilator of `mode` as a vector over the basis annihilators.
pub(crate) fn mode_vector(mode: Mode, basis: Basis, n: usize) -> Result<Vec<C64>> {
    let grid = MomentumGrid::new(n);
    let s = 1.0 / (n as f64).sqrt();
    let mut w = vec![C64::new(0.0, 0.0); n];
    match (mode, basis) {
        (Mode::Momentum(q), _) if q >= n => {
            return Err(Error::DimensionMismatch(format!("momentum index {q} outside 0..{n}")))
        }
        (Mode::Site(j), _) if j == 0 || j > n => {
            return Err(Error::DimensionMismatch(format!("site {j} outside 1..={n}")))
        }
        (Mode::Momentum(q), Basis::Momentum) => w[q] = C64::new(1.0, 0.0),
        (Mode::Site(j), Basis::Site) => w[j - 1] = C64::new(1.0, 0.0),
        // c_j = N^-1/2 sum_q exp(-i q j) a_q
        (Mode::Site(j), Basis::Momentum) => {
            for (q, wq) in w.iter_mut().enumerate() {
                *wq = grid.phase(q, j as i64).conj() * s;
            }
        }
        // a_q = N^-1/2 sum_j exp(i q j) c_j
        (Mode::Momentum(q), Basis::Site) => {
            for (j, wj) in w.iter_mut().enumerate() {
                *wj = grid.phase(q, j as i64 + 1) * s;
            }
        }
    }
    Ok(w)
}

/// Coefficients of `token` at time `state.t` over `(a, a+)` at `t0`.
pub(crate) fn token_form(token: Token, state: &BVState) -> Result<Vec<C64>> {
    let n = state.a.nrows();
    if !state.is_full() {
        return Err(Error::DimensionMismatch("correlators need the full flow, not a column subset".into()));
    }
    let zero = C64::new(0.0, 0.0);
    let mut x = vec![zero; 2 * n];
    match token {
        Token::Annihilate(m) => x[..n].copy_from_slice(&mode_vector(m, state.basis, n)?),
        Token::Create(m) => {
            for (xi, w) in x[n..].iter_mut().zip(mode_vector(m, state.basis, n)?) {
                *xi = w.conj();
            }
        }
    }
    Ok(propagate_form(&x, state))
}

/// `y = x U` with `U = [[A, B], [conj B, conj A]]`.
pub(crate) fn propagate_form(x: &[C64], state: &BVState) -> Vec<C64> {
    let n = state.a.nrows();
    let zero = C64::new(0.0, 0.0);
    let mut y = vec![zero; 2 * n];
    let (x1, x2) = x.split_at(n);
    for p in 0..n {
        let mut s1 = zero;
        let mut s2 = zero;
        for q in 0..n {
            let (a, b) = (state.a[(q, p)], state.b[(q, p)]);
            if x1[q] != zero {
                s1 += x1[q] * a;
                s2 += x1[q] * b;
            }
            if x2[q] != zero {
                s1 += x2[q] * b.conj();
                s2 += x2[q] * a.conj();
            }
        }
        y[p] = s1;
        y[n + p] = s2;
    }
    y
}

/// Expectation of the ordered product in `req` at time `state.t`.
pub fn wick_expectation(req: &CorrelatorRequest, state: &BVState, th: &ThermalState) -> Result<WickValue> {
    check_compatible(state, th)?;
    let k = req.tokens.len();
    if k > MAX_ORDER {
        return Err(Error::Unsupported(format!("correlators of order {k} (limit {MAX_ORDER})")));
    }
    if k % 2 == 1 {
        return Ok(WickValue { value: C64::new(0.0, 0.0), odd_order: true });
    }
    let forms = req.tokens.iter().map(|&t| token_form(t, state)).collect::<Result<Vec<_>>>()?;
    let mut c = vec![vec![C64::new(0.0, 0.0); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            c[i][j] = th.contract(&forms[i], &forms[j]);
        }
    }
    let idx: Vec<usize> = (0..k).collect();
    Ok(WickValue { value: pairings(&c, &idx), odd_order: false })
}

/// Signed sum over perfect matchings (a Pfaffian by expansion).
fn pairings(c: &[Vec<C64>], idx: &[usize]) -> C64 {
    if idx.is_empty() {
        return C64::new(1.0, 0.0);
    }
    let first = idx[0];
    let mut total = C64::new(0.0, 0.0);
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&r| r != j).collect();
        let sign = if pos % 2 == 1 { 1.0 } else { -1.0 };
        total += c[first][j] * pairings(c, &rest) * sign;
    }
    total
}

pub(crate) fn check_compatible(state: &BVState, th: &ThermalState) -> Result<()> {
    if state.basis != th.basis || state.a.nrows() != th.n_modes() {
        return Err(Error::DimensionMismatch(format!(
            "state ({:?}, {} modes) and initial state ({:?}, {} modes) differ",
            state.basis,
            state.a.nrows(),
            th.basis,
            th.n_modes()
        )));
    }
    Ok(())
}
