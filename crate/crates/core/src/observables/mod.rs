//! Thermal expectation values along the flow.
//!
//! The transverse magnetization is `m = 2 <n> - 1` per site. Closed forms for
//! homogeneous quenches take the continuum limit `(2/N) sum_q -> (1/pi) int dq`.

mod thermal;
mod wick;

pub use thermal::ThermalState;
pub use wick::{wick_expectation, CorrelatorRequest, Mode, Token, WickValue, MAX_ORDER};

use std::f64::consts::PI;

use crate::bvflow::BVState;
use crate::error::{Error, Result};
use crate::spectral::{dispersion, homogeneous_flow, thermal_occupation};
use crate::volterra::VolterraSolution;
use crate::C64;
use wick::{check_compatible, mode_vector, propagate_form};

/// Two-point functions of momentum modes at the state's time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrelator {
    /// `<a+_q a_p>`
    pub normal: C64,
    /// `<a_q a_p>`
    pub anomalous: C64,
    /// `<a+_q a+_p>`
    pub anomalous_dag: C64,
}

/// `<a+_q(t) a_p(t)>` and the anomalous pairs, for momentum indices `q`, `p`.
pub fn pair_correlator(state: &BVState, th: &ThermalState, q: usize, p: usize) -> Result<PairCorrelator> {
    check_compatible(state, th)?;
    let cq = wick::token_form(Token::Create(Mode::Momentum(q)), state)?;
    let aq = wick::token_form(Token::Annihilate(Mode::Momentum(q)), state)?;
    let cp = wick::token_form(Token::Create(Mode::Momentum(p)), state)?;
    let ap = wick::token_form(Token::Annihilate(Mode::Momentum(p)), state)?;
    Ok(PairCorrelator {
        normal: th.contract(&cq, &ap),
        anomalous: th.contract(&aq, &ap),
        anomalous_dag: th.contract(&cq, &cp),
    })
}

fn density(y: &[C64], th: &ThermalState) -> f64 {
    let n = y.len() / 2;
    // o+ has coefficients conj(y) on the partner operators
    let dag: Vec<C64> = y[n..].iter().chain(&y[..n]).map(|z| z.conj()).collect();
    th.contract(&dag, y).re
}

/// Uniform transverse magnetization `(2/N) sum_q <a+_q a_q> - 1`.
pub fn global_transverse_magnetization(state: &BVState, th: &ThermalState) -> Result<f64> {
    check_compatible(state, th)?;
    if !state.is_full() {
        return Err(Error::DimensionMismatch("global magnetization needs the full flow".into()));
    }
    let n = state.a.nrows();
    let mut total = 0.0;
    if let Some(f) = th.mode_occupations() {
        for q in 0..n {
            for p in 0..n {
                total += state.a[(q, p)].norm_sqr() * f[p] + state.b[(q, p)].norm_sqr() * (1.0 - f[p]);
            }
        }
    } else {
        for q in 0..n {
            let mut x = vec![C64::new(0.0, 0.0); 2 * n];
            x[q] = C64::new(1.0, 0.0);
            total += density(&propagate_form(&x, state), th);
        }
    }
    Ok(2.0 * total / n as f64 - 1.0)
}

/// `m_k = 2 <c+_k c_k> - 1` at site `k` (1-based).
pub fn local_transverse_magnetization(site: usize, state: &BVState, th: &ThermalState) -> Result<f64> {
    check_compatible(state, th)?;
    if !state.is_full() {
        return Err(Error::DimensionMismatch("local magnetization needs the full flow".into()));
    }
    let n = state.a.nrows();
    let mut x = mode_vector(Mode::Site(site), state.basis, n)?;
    x.resize(2 * n, C64::new(0.0, 0.0));
    Ok(2.0 * density(&propagate_form(&x, state), th) - 1.0)
}

/// Local magnetization at `site` on every Volterra time node.
///
/// `1 + m_k(t) = (1/pi) int dp [f_p |X_k(p;t)|^2 + (1 - f_p) |Y_k(p;t)|^2]`, evaluated
/// as the periodic trapezoid sum over the solution's momentum grid. `occupations`
/// holds `f_p` on that grid.
pub fn local_magnetization_volterra(sol: &VolterraSolution, site: i64, occupations: &[f64]) -> Result<Vec<f64>> {
    let nq = sol.grid.n_q();
    if occupations.len() != nq {
        return Err(Error::DimensionMismatch(format!("{} occupations for {nq} momenta", occupations.len())));
    }
    let x = sol.x_table(site)?;
    let y = sol.y_table(site);
    let nt = sol.grid.n_times();
    let mut out = Vec::with_capacity(nt);
    for m in 0..nt {
        let mut s = 0.0;
        for (q, &f) in occupations.iter().enumerate() {
            s += f * x[q * nt + m].norm_sqr();
            if let Some(y) = y {
                s += (1.0 - f) * y[q * nt + m].norm_sqr();
            }
        }
        out.push(2.0 * s / nq as f64 - 1.0);
    }
    Ok(out)
}

fn integrate_q<F: Fn(f64) -> f64>(f: F) -> f64 {
    // integrands here are even in q; integrate over [0, pi] in pieces to resolve oscillations
    let pieces = 16;
    let mut total = 0.0;
    for i in 0..pieces {
        let a = PI * i as f64 / pieces as f64;
        let b = PI * (i + 1) as f64 / pieces as f64;
        total += quadrature::integrate(&f, a, b, 1e-13).integral;
    }
    2.0 * total
}

/// Uniform magnetization after a homogeneous quench from the state that
/// occupies each `a_q` with `f(E_q)`:
/// `1 + m(t) = (1/pi) int dq [f |A_qq|^2 + (1 - f) |B_{-q,q}|^2]`.
pub fn xy_homogeneous_quench_mz(g: f64, gamma: f64, h: f64, beta: f64, t: f64, t0: f64) -> f64 {
    let integrand = |q: f64| {
        let f = thermal_occupation(beta, dispersion(g, gamma, h, q));
        let (a, b) = homogeneous_flow(g, gamma, h, q, t, t0);
        f * a.norm_sqr() + (1.0 - f) * b.norm_sqr()
    };
    integrate_q(integrand) / PI - 1.0
}

/// Long-time average of [`xy_homogeneous_quench_mz`].
pub fn xy_quench_mz_time_average(g: f64, gamma: f64, h: f64, beta: f64) -> f64 {
    let integrand = |q: f64| {
        let (s, c) = q.sin_cos();
        let (eps, delta) = (g * c + h, gamma * s);
        let e2 = eps * eps + delta * delta;
        if e2 == 0.0 {
            return 0.5;
        }
        let f = thermal_occupation(beta, e2.sqrt());
        0.5 * f * (1.0 + eps * eps / e2) + 0.5 * (1.0 - f) * delta * delta / e2
    };
    integrate_q(integrand) / PI - 1.0
}

/// Thermal-equilibrium magnetization of the homogeneous chain:
/// `m = -(1/2pi) int dq (epsilon_q / E_q) tanh(beta E_q / 2)`.
pub fn xy_equilibrium_mz(g: f64, gamma: f64, h: f64, beta: f64) -> f64 {
    let integrand = |q: f64| {
        let (s, c) = q.sin_cos();
        let eps = g * c + h;
        let e = eps.hypot(gamma * s);
        if e == 0.0 {
            return 0.0;
        }
        let th = if beta.is_infinite() { 1.0 } else { (0.5 * beta * e).tanh() };
        eps / e * th
    };
    -integrate_q(integrand) / (2.0 * PI)
}
