use proptest::prelude::*;

use super::*;
use crate::model::{build_site_couplings, to_momentum_couplings, Boundary, ChainSpec, Side, TimeProfile};
use crate::spectral::homogeneous_state;

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

fn xy_ring(n: usize, g: f64, gamma: f64, h: f64, t_end: f64) -> ChainSpec {
    ChainSpec::new(n, Boundary::Periodic, g, gamma, h).with_window(0.0, t_end)
}

#[test]
fn homogeneous_flow_matches_closed_form() {
    let spec = xy_ring(16, 1.0, 0.6, 0.3, 4.0);
    let cfg = IntegratorConfig { record_stride: 500, ..IntegratorConfig::default() };
    let traj = integrate_flow(&spec, &cfg).unwrap();
    for s in &traj.states {
        let exact = homogeneous_state(1.0, 0.6, 0.3, 16, s.t, 0.0);
        assert!(max_diff(&s.a, &exact.a) < 1e-10, "A at t={}", s.t);
        assert!(max_diff(&s.b, &exact.b) < 1e-10, "B at t={}", s.t);
    }
    assert!(traj.max_car.0 < 1e-12 && traj.max_car.1 < 1e-12);
}

#[test]
fn zero_pairing_keeps_b_exactly_zero() {
    let spec = xy_ring(12, 1.0, 0.0, 0.2, 2.0)
        .with_field_impurity(4, TimeProfile::step(0.5, 0.7))
        .with_hopping_impurity(7, TimeProfile::constant(0.3));
    let traj = integrate_flow(&spec, &IntegratorConfig::with_dt(0.01)).unwrap();
    for s in &traj.states {
        assert_eq!(s.b.iter().map(|z| z.norm()).sum::<f64>(), 0.0);
    }
}

#[test]
fn structured_and_dense_generators_agree() {
    let spec = xy_ring(10, 1.1, 0.4, -0.3, 1.0)
        .with_field_impurity(2, TimeProfile::constant(0.5))
        .with_field_impurity(9, TimeProfile::drive(0.0, 0.3, 2.0, 0.4));
    let fast = FlowGenerator::new(&spec).unwrap();
    let dense = FlowGenerator::dense(&spec).unwrap();
    assert!(fast.is_structured() && !dense.is_structured());
    let cols: Vec<usize> = (0..10).collect();
    let mut state = BVState::identity_columns(10, &cols, 0.3, Basis::Momentum);
    // a generic state, not just the identity
    for (i, z) in state.a.iter_mut().enumerate() {
        *z += C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()) * 0.2;
    }
    for (i, z) in state.b.iter_mut().enumerate() {
        *z = C64::new((i as f64 * 0.23).cos(), (i as f64 * 0.71).sin()) * 0.1;
    }
    let (da1, db1) = fast.derivative(0.3, Side::Right, &state).unwrap();
    let (da2, db2) = dense.derivative(0.3, Side::Right, &state).unwrap();
    assert!(max_diff(&da1, &da2) < 1e-13);
    assert!(max_diff(&db1, &db2) < 1e-13);

    let mc = to_momentum_couplings(&build_site_couplings(&spec, 0.3).unwrap()).unwrap();
    let (da3, db3) = bv_derivative(&state, &mc).unwrap();
    assert!(max_diff(&da1, &da3) < 1e-13);
    assert!(max_diff(&db1, &db3) < 1e-13);
}

#[test]
fn composition_law_holds() {
    let spec = xy_ring(8, 1.0, 0.5, 0.1, 2.0).with_field_impurity(3, TimeProfile::constant(0.6));
    let cfg = IntegratorConfig { dt: 1e-3, record_stride: 1000, ..IntegratorConfig::default() };
    let full = integrate_flow(&spec, &cfg).unwrap();
    let first = integrate_flow(&spec.clone().with_window(0.0, 1.0), &cfg).unwrap();
    let second = integrate_flow(&spec.clone().with_window(1.0, 2.0), &cfg).unwrap();
    let composed = second.last().compose(first.last()).unwrap();
    assert!(max_diff(&composed.a, &full.last().a) < 1e-10);
    assert!(max_diff(&composed.b, &full.last().b) < 1e-10);
}

#[test]
fn column_subset_matches_full_flow() {
    let spec = xy_ring(12, 1.0, 0.7, 0.2, 1.5)
        .with_field_impurity(5, TimeProfile::step(0.3, 0.8))
        .with_pairing_impurity(8, TimeProfile::constant(0.2));
    let cfg = IntegratorConfig { dt: 5e-3, record_stride: 1000, ..IntegratorConfig::default() };
    let full = integrate_flow(&spec, &cfg).unwrap();
    let cols = [0usize, 5, 11];
    let part = integrate_columns(&spec, &cfg, &cols).unwrap();
    for (c, &p) in cols.iter().enumerate() {
        for q in 0..12 {
            assert!((part.last().a[(q, c)] - full.last().a[(q, p)]).norm() < 1e-13);
            assert!((part.last().b[(q, c)] - full.last().b[(q, p)]).norm() < 1e-13);
        }
    }
    assert!(part.max_car.0 < 1e-10);
}

#[test]
fn rk4_converges_at_fourth_order() {
    let spec = xy_ring(8, 1.0, 0.8, 0.4, 6.0).with_field_impurity(2, TimeProfile::constant(0.5));
    let reference = integrate_flow(&spec, &IntegratorConfig::with_dt(2.5e-3)).unwrap();
    let err = |dt: f64| {
        let cfg = IntegratorConfig { dt, car_tolerance: 1e-3, ..IntegratorConfig::default() };
        let tr = integrate_flow(&spec, &cfg).unwrap();
        max_diff(&tr.last().a, &reference.last().a).max(max_diff(&tr.last().b, &reference.last().b))
    };
    let ratio = err(0.1) / err(0.05);
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn midpoint_converges_at_second_order() {
    let spec = xy_ring(8, 1.0, 0.8, 0.4, 3.0);
    let err = |dt: f64| {
        let cfg = IntegratorConfig { dt, method: Method::Midpoint, car_tolerance: 1e-3, ..IntegratorConfig::default() };
        let tr = integrate_flow(&spec, &cfg).unwrap();
        let exact = homogeneous_state(1.0, 0.8, 0.4, 8, 3.0, 0.0);
        max_diff(&tr.last().a, &exact.a)
    };
    let ratio = err(0.02) / err(0.01);
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

/// Independent path: rotate into the eigenbasis of the homogeneous Nambu
/// generator, integrate the linear system there, rotate back.
#[test]
fn eigenbasis_integration_agrees_with_direct_flow() {
    let n = 6;
    let spec = xy_ring(n, 1.0, 0.5, 0.25, 2.0).with_field_impurity(2, TimeProfile::drive(0.0, 0.4, 1.3, 0.0));
    let direct = integrate_flow(&spec, &IntegratorConfig::with_dt(1e-3)).unwrap();
    let gen = FlowGenerator::dense(&spec).unwrap();

    let nambu = |t: f64| {
        let (alpha, beta) = gen.couplings(t, Side::Right).unwrap();
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&alpha);
        m.view_mut((0, n), (n, n)).copy_from(&beta.conjugate());
        m.view_mut((n, 0), (n, n)).copy_from(&(-&beta));
        m.view_mut((n, n), (n, n)).copy_from(&(-alpha.conjugate()));
        m
    };
    let homogeneous = FlowGenerator::dense(&xy_ring(n, 1.0, 0.5, 0.25, 2.0)).unwrap();
    let (a0, b0) = homogeneous.couplings(0.0, Side::Right).unwrap();
    let mut m0 = CMatrix::zeros(2 * n, 2 * n);
    m0.view_mut((0, 0), (n, n)).copy_from(&a0);
    m0.view_mut((0, n), (n, n)).copy_from(&b0.conjugate());
    m0.view_mut((n, 0), (n, n)).copy_from(&(-&b0));
    m0.view_mut((n, n), (n, n)).copy_from(&(-a0.conjugate()));
    let v = m0.symmetric_eigen().eigenvectors;

    // columns (A; conj B) rotated into the eigenbasis
    let mut xi = v.adjoint() * CMatrix::identity(2 * n, n);
    let rhs = |t: f64, x: &CMatrix| (v.adjoint() * nambu(t) * &v * x) * C64::new(0.0, -1.0);
    let steps = 2000;
    let h = 2.0 / steps as f64;
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = rhs(t, &xi);
        let k2 = rhs(t + h / 2.0, &(&xi + &k1 * C64::new(h / 2.0, 0.0)));
        let k3 = rhs(t + h / 2.0, &(&xi + &k2 * C64::new(h / 2.0, 0.0)));
        let k4 = rhs(t + h, &(&xi + &k3 * C64::new(h, 0.0)));
        xi += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
    }
    let back = &v * xi;
    let a = back.rows(0, n).into_owned();
    let b = back.rows(n, n).conjugate();
    assert!(max_diff(&a, &direct.last().a) < 1e-10);
    assert!(max_diff(&b, &direct.last().b) < 1e-10);
}

#[test]
fn open_chain_runs_in_site_basis() {
    let spec = ChainSpec::new(7, Boundary::Open, 1.0, 0.4, 0.3)
        .with_window(0.0, 1.0)
        .with_field_impurity(1, TimeProfile::step(0.25, 0.5));
    let traj = integrate_flow(&spec, &IntegratorConfig::with_dt(1e-3)).unwrap();
    assert_eq!(traj.last().basis, Basis::Site);
    assert!(traj.max_car.0 < 1e-12);
}

#[test]
fn invalid_step_sizes_are_rejected() {
    let spec = xy_ring(4, 1.0, 0.0, 0.0, 1.0);
    for dt in [0.0, -1.0, 2.0, f64::NAN] {
        assert!(matches!(integrate_flow(&spec, &IntegratorConfig::with_dt(dt)), Err(Error::InvalidStep(_))));
    }
}

#[test]
fn oversized_step_trips_car_check() {
    let spec = xy_ring(8, 4.0, 3.0, 1.0, 20.0);
    let cfg = IntegratorConfig { dt: 0.9, record_stride: 1, ..IntegratorConfig::default() };
    assert!(matches!(integrate_flow(&spec, &cfg), Err(Error::CarViolation { .. })));
}

#[test]
fn site_amplitudes_of_free_xx_chain_are_plane_waves() {
    let spec = xy_ring(16, 1.0, 0.0, 0.0, 2.0);
    let cols = [3usize, 9];
    let traj = integrate_columns(&spec, &IntegratorConfig::with_dt(1e-3), &cols).unwrap();
    let grid = MomentumGrid::new(16);
    let (x, y) = site_amplitudes(traj.last(), &cols, 5).unwrap();
    for (c, &p) in cols.iter().enumerate() {
        let w = grid.cos_sin(p).0;
        assert!((x[c] - C64::from_polar(1.0, -w * 2.0)).norm() < 1e-12);
        assert_eq!(y[c].norm(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn car_is_preserved_for_random_impurities(
        n in 4usize..9,
        g in 0.3f64..1.5,
        gamma in -1.0f64..1.0,
        h in -1.0f64..1.0,
        hi in -1.0f64..1.0,
        gi in -0.5f64..0.5,
        ki in -0.5f64..0.5,
        site in 1usize..4,
    ) {
        let spec = xy_ring(n, g, gamma, h, 1.0)
            .with_field_impurity(site, TimeProfile::step(0.3, hi))
            .with_hopping_impurity(site + 1, TimeProfile::constant(gi))
            .with_pairing_impurity(n, TimeProfile::drive(0.0, ki, 2.0, 0.1));
        let cfg = IntegratorConfig { dt: 2e-3, record_stride: 50, ..IntegratorConfig::default() };
        let traj = integrate_flow(&spec, &cfg).unwrap();
        prop_assert!(traj.max_car.0 < 1e-10 && traj.max_car.1 < 1e-10);
    }

    #[test]
    fn beta_stays_antisymmetric_and_alpha_hermitian(
        n in 3usize..10, g in -1.0f64..1.0, gamma in -1.0f64..1.0, h in -1.0f64..1.0,
        hi in -1.0f64..1.0, site in 1usize..3,
    ) {
        let spec = xy_ring(n, g, gamma, h, 1.0)
            .with_field_impurity(site, TimeProfile::constant(hi))
            .with_pairing_impurity(site, TimeProfile::constant(0.3));
        let mc = to_momentum_couplings(&build_site_couplings(&spec, 0.5).unwrap()).unwrap();
        prop_assert!(max_diff(&mc.alpha, &mc.alpha.adjoint()) < 1e-13);
        prop_assert!(max_diff(&mc.beta, &(-mc.beta.transpose())) < 1e-13);
    }
}
