use super::*;
use crate::bvflow::{integrate_flow, site_amplitudes, Basis, IntegratorConfig};
use crate::model::{Boundary, ChainSpec, TimeProfile};
use crate::observables::{local_magnetization_volterra, local_transverse_magnetization, ThermalState};
use crate::{Error, C64};

const N: usize = 48;
const SITE: usize = 24;

fn flow_records(spec: &ChainSpec, dt_record: f64) -> Vec<crate::bvflow::BVState> {
    let stride = (dt_record / 0.01).round() as usize;
    let cfg = IntegratorConfig { record_stride: stride, ..IntegratorConfig::with_dt(0.01) };
    integrate_flow(spec, &cfg).unwrap().states
}

fn worst_x(sol: &VolterraSolution, states: &[crate::bvflow::BVState], site: i64, every: usize, with_y: bool) -> f64 {
    let cols: Vec<usize> = (0..N).collect();
    let mut worst: f64 = 0.0;
    for (r, st) in states.iter().enumerate() {
        let m = r * every;
        let (x, y) = site_amplitudes(st, &cols, site as usize).unwrap();
        for q in 0..N {
            worst = worst.max((x[q] - sol.x(site, q, m).unwrap()).norm());
            if with_y {
                worst = worst.max((y[q] - sol.y(site, q, m).unwrap()).norm());
            }
        }
    }
    worst
}

#[test]
fn single_impurity_matches_flow() {
    let profile = TimeProfile::ramp(0.0, 2.0, 0.0, 0.9).unwrap();
    let spec = ChainSpec::new(N, Boundary::Periodic, 1.0, 0.0, 0.0)
        .with_window(0.0, 6.0)
        .with_field_impurity(SITE, profile.clone());
    let grid = VolterraGrid::new(0.0, 6.0, 0.01, N).unwrap();
    let xhat = solve_xx_single_impurity(&profile, 1.0, &grid).unwrap();
    let sol = extend_to_sites(&xhat, SITE as i64, &[SITE as i64, SITE as i64 - 3, SITE as i64 + 2], 1.0, 0.0, &profile)
        .unwrap();
    for q in 0..N {
        for m in 0..grid.n_times() {
            assert!((sol.x(SITE as i64, q, m).unwrap() - xhat.get(q, m)).norm() < 1e-13);
        }
    }
    let states = flow_records(&spec, 0.5);
    for k in [SITE as i64, SITE as i64 - 3, SITE as i64 + 2] {
        let err = worst_x(&sol, &states, k, 50, false);
        assert!(err < 2e-4, "site {k}: {err}");
    }
}

#[test]
fn uniform_field_is_a_phase() {
    let profile = TimeProfile::constant(0.6);
    let grid = VolterraGrid::new(0.0, 3.0, 0.01, N).unwrap();
    let xhat = solve_xx_single_impurity(&profile, 1.0, &grid).unwrap();
    let sol = extend_to_sites(&xhat, 0, &[0, 1], 1.0, 0.4, &profile).unwrap();
    let spec =
        ChainSpec::new(N, Boundary::Periodic, 1.0, 0.0, 0.4).with_window(0.0, 3.0).with_field_impurity(N, profile);
    // site 0 of the infinite chain is site N of the ring
    let cols: Vec<usize> = (0..N).collect();
    let states = flow_records(&spec, 1.0);
    for (r, st) in states.iter().enumerate() {
        let (x, _) = site_amplitudes(st, &cols, N).unwrap();
        for q in 0..N {
            assert!((x[q] - sol.x(0, q, 100 * r).unwrap()).norm() < 2e-5);
        }
    }
}

#[test]
fn system_reduces_to_single_impurity() {
    let profile = TimeProfile::switch(0.5, 0.2, -0.8);
    let spec = ChainSpec::new(N, Boundary::Periodic, 1.0, 0.0, 0.3)
        .with_window(0.0, 4.0)
        .with_field_impurity(SITE, profile.clone());
    let grid = VolterraGrid::new(0.0, 4.0, 0.02, N).unwrap();
    let sys = solve_inhomogeneous_system(&spec, &grid, &[SITE as i64 + 4]).unwrap();
    let xhat = solve_xx_single_impurity(&profile, 1.0, &grid).unwrap();
    let single = extend_to_sites(&xhat, SITE as i64, &[SITE as i64, SITE as i64 + 4], 1.0, 0.3, &profile).unwrap();
    for k in [SITE as i64, SITE as i64 + 4] {
        for q in 0..N {
            for m in 0..grid.n_times() {
                let d = sys.x(k, q, m).unwrap() - single.x(k, q, m).unwrap();
                assert!(d.norm() < 1e-12);
                assert_eq!(sys.y(k, q, m).unwrap(), C64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn bond_impurities_match_flow() {
    let spec = ChainSpec::new(N, Boundary::Periodic, 1.0, 0.0, 0.2)
        .with_window(0.0, 5.0)
        .with_hopping_impurity(SITE, TimeProfile::constant(0.5))
        .with_pairing_impurity(SITE + 1, TimeProfile::switch(1.0, 0.0, 0.7))
        .with_field_impurity(SITE - 1, TimeProfile::drive(0.0, 0.4, 1.5, 0.3));
    let grid = VolterraGrid::new(0.0, 5.0, 0.01, N).unwrap();
    let far = SITE as i64 + 6;
    let sol = solve_inhomogeneous_system(&spec, &grid, &[far]).unwrap();
    let states = flow_records(&spec, 0.5);
    for k in [SITE as i64 - 1, SITE as i64, SITE as i64 + 2, far] {
        let err = worst_x(&sol, &states, k, 50, true);
        assert!(err < 5e-5, "site {k}: {err}");
    }
}

#[test]
fn local_magnetization_matches_flow() {
    let (g, h0, beta) = (1.0, 0.3, 1.2);
    let spec = ChainSpec::new(N, Boundary::Periodic, g, 0.0, 0.0)
        .with_window(0.0, 4.0)
        .with_field_impurity(SITE, TimeProfile::constant(0.8))
        .with_pairing_impurity(SITE, TimeProfile::constant(0.4));
    let grid = VolterraGrid::new(0.0, 4.0, 0.01, N).unwrap();
    let sol = solve_inhomogeneous_system(&spec, &grid, &[]).unwrap();
    let omega: Vec<f64> = grid.q.iter().map(|q| g * q.cos() + h0).collect();
    let th = ThermalState::diagonal(beta, &omega, Basis::Momentum);
    let f = th.mode_occupations().unwrap().to_vec();
    let m_vol = local_magnetization_volterra(&sol, SITE as i64, &f).unwrap();
    for (r, st) in flow_records(&spec, 0.5).iter().enumerate() {
        let m = local_transverse_magnetization(SITE, st, &th).unwrap();
        assert!((m - m_vol[50 * r]).abs() < 5e-5, "t = {}: {m} vs {}", st.t, m_vol[50 * r]);
    }
}

#[test]
fn trapezoid_is_second_order() {
    let profile = TimeProfile::drive(0.0, 0.9, 2.0, 0.4);
    let t_end = 4.0;
    let at = |dt: f64| {
        let grid = VolterraGrid::new(0.0, t_end, dt, 16).unwrap();
        let x = solve_xx_single_impurity(&profile, 1.0, &grid).unwrap();
        (0..16).map(|q| x.get(q, grid.n_steps)).collect::<Vec<_>>()
    };
    let reference = at(0.0025);
    let err = |v: Vec<C64>| v.iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let ratio = err(at(0.04)) / err(at(0.02));
    assert!((3.5..4.6).contains(&ratio), "ratio {ratio}");
}

#[test]
fn weak_impurity_is_born_limit() {
    // first order in h: X - X_free scales linearly, the remainder quadratically
    let grid = VolterraGrid::new(0.0, 3.0, 0.01, 8).unwrap();
    let dev = |h: f64| {
        let x = solve_xx_single_impurity(&TimeProfile::constant(h), 1.0, &grid).unwrap();
        let free = solve_xx_single_impurity(&TimeProfile::constant(0.0), 1.0, &grid).unwrap();
        (0..8).map(|q| x.get(q, grid.n_steps) - free.get(q, grid.n_steps)).collect::<Vec<_>>()
    };
    let (a, b) = (dev(0.02), dev(0.01));
    let remainder = a.iter().zip(&b).map(|(x, y)| (x - y * 2.0).norm()).fold(0.0, f64::max);
    let first = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(remainder < 0.05 * first, "{remainder} vs {first}");
}

#[test]
fn off_grid_breakpoint_is_rejected() {
    let grid = VolterraGrid::new(0.0, 2.0, 0.1, 8).unwrap();
    let r = solve_xx_single_impurity(&TimeProfile::step(0.55, 1.0), 1.0, &grid);
    assert!(matches!(r, Err(Error::GridMismatch(_))));
    assert!(matches!(VolterraGrid::new(0.0, 1.05, 0.1, 8), Err(Error::GridMismatch(_))));
}

#[test]
fn xy_background_is_rejected() {
    let spec = ChainSpec::new(8, Boundary::Periodic, 1.0, 0.3, 0.0).with_field_impurity(1, TimeProfile::constant(1.0));
    let grid = VolterraGrid::new(0.0, 1.0, 0.1, 8).unwrap();
    assert!(matches!(solve_inhomogeneous_system(&spec, &grid, &[]), Err(Error::Unsupported(_))));
}
