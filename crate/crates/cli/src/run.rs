//! Evaluates a scenario along each configured solver path.

use std::collections::BTreeMap;

use bvchain::bvflow::{integrate_observed, BVState, IntegratorConfig, Method};
use bvchain::fock::{propagate_exact, thermal_density, MAX_TRAJECTORY_SITES};
use bvchain::model::{validate_hypotheses, Boundary, ChainSpec, MomentumGrid, Side};
use bvchain::observables::{
    global_transverse_magnetization, local_magnetization_volterra, local_transverse_magnetization,
    xy_homogeneous_quench_mz, ThermalState,
};
use bvchain::spectral::{dispersion, homogeneous_state, thermal_occupation};
use bvchain::volterra::{
    asymptotic_local_magnetization, asymptotic_quench_observable, bound_state_shift, initial_magnetization,
    solve_inhomogeneous_system, VolterraGrid,
};
use serde::Serialize;

use crate::config::{
    ClosedFormMode, ComparisonConfig, ComparisonKind, ImpurityKind, InitialKind, MethodConfig, ObservableKind,
    PathKind, ScenarioConfig,
};
use crate::error::CliError;

/// One sampled observable from one path. `site` is `None` for global observables.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub observable: ObservableKind,
    pub path: PathKind,
    pub site: Option<usize>,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub schema: u32,
    pub scenario: String,
    pub passed: bool,
    pub comparisons: Vec<ComparisonResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub car: Option<CarSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub convergence: Vec<ConvergenceEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptote: Option<AsymptoteSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonResult {
    pub observable: String,
    pub a: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
    pub sup: f64,
    pub rms: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarSummary {
    /// `max |A A+ + B B+ - 1|`, or its column-subset form.
    pub max_first: f64,
    /// `max |A B^T + B A^T|`, or its column-subset form.
    pub max_second: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceEstimate {
    pub path: String,
    pub observable: String,
    pub dt: f64,
    /// `sup |x(2 dt) - x(dt)|`
    pub coarse_difference: f64,
    /// `sup |x(dt) - x(dt / 2)|`
    pub fine_difference: f64,
    pub order: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoteSummary {
    pub site: usize,
    pub initial: f64,
    pub continuum_shift: f64,
    pub bound_state_shift: f64,
    /// Initial value plus the continuum shift alone.
    pub continuum_only: f64,
    pub total: f64,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn is_multiple(x: f64, step: f64) -> bool {
    let r = x / step;
    (r - r.round()).abs() < 1e-9 * r.abs().max(1.0)
}

/// Everything that can be checked without running a solver.
pub fn validate_scenario(cfg: &ScenarioConfig) -> Result<ChainSpec, CliError> {
    let spec = cfg.chain_spec().map_err(|e| invalid(e.to_string()))?;
    let report = validate_hypotheses(&spec).map_err(|e| invalid(e.to_string()))?;
    if !report.passed() {
        return Err(invalid(report.failures().join("; ")));
    }
    let m = &cfg.model;
    let obs = &cfg.observables;
    if cfg.solver.paths.is_empty() {
        return Err(invalid("no solver paths"));
    }
    if obs.kinds.is_empty() {
        return Err(invalid("no observables"));
    }
    if !(obs.record_every > 0.0) || !is_multiple(m.t_end - m.t0, obs.record_every) {
        return Err(invalid("record_every must be positive and divide the time window"));
    }
    if obs.kinds.contains(&ObservableKind::LocalMz) && obs.sites.is_empty() {
        return Err(invalid("local_mz needs at least one site"));
    }
    let periodic = spec.boundary == Boundary::Periodic;
    if cfg.initial.state != InitialKind::Thermal && !periodic {
        return Err(invalid("only thermal initial states are available on open chains"));
    }
    if !(cfg.initial.beta >= 0.0) {
        return Err(invalid("beta must be non-negative"));
    }
    for &p in &cfg.solver.paths {
        let finite_sites = matches!(p, PathKind::Flow | PathKind::ClosedForm | PathKind::Oracle);
        if finite_sites && obs.sites.iter().any(|&s| s == 0 || s > m.n_sites) {
            return Err(invalid(format!("sites must lie in 1..={} for the {} path", m.n_sites, p.name())));
        }
        match p {
            PathKind::Flow => {
                let f = &cfg.solver.flow;
                if !(f.dt > 0.0) || !is_multiple(obs.record_every, f.dt) {
                    return Err(invalid("flow dt must divide record_every"));
                }
                if f.car_check_every == 0 {
                    return Err(invalid("car_check_every must be positive"));
                }
                if let Some(b) = spec.interior_breakpoints().iter().find(|&&b| !is_multiple(b - m.t0, f.dt)) {
                    return Err(invalid(format!("breakpoint {b} is not a multiple of the flow dt")));
                }
                if obs.kinds.contains(&ObservableKind::GlobalMz) && !periodic {
                    return Err(invalid("global_mz is computed on periodic chains"));
                }
            }
            PathKind::ClosedForm => {
                if !periodic || !spec.is_homogeneous() {
                    return Err(invalid("the closed form needs a homogeneous periodic chain"));
                }
                if cfg.solver.closed_form.mode == ClosedFormMode::Continuum
                    && (cfg.initial.state != InitialKind::Dispersion || obs.kinds != [ObservableKind::GlobalMz])
                {
                    return Err(invalid("the continuum closed form gives global_mz from a dispersion state"));
                }
            }
            PathKind::Volterra => {
                let v = &cfg.solver.volterra;
                if m.gamma != 0.0 {
                    return Err(invalid("the volterra path needs gamma = 0"));
                }
                if obs.kinds.contains(&ObservableKind::GlobalMz) {
                    return Err(invalid("the volterra path only gives local_mz"));
                }
                if !(v.dt > 0.0) || !is_multiple(obs.record_every, v.dt) || v.n_q == 0 {
                    return Err(invalid("volterra dt must divide record_every and n_q must be positive"));
                }
                if cfg.initial.state == InitialKind::Thermal && !impurities_vanish_before_start(&spec) {
                    return Err(invalid("the volterra path needs an initial state diagonal in momentum"));
                }
            }
            PathKind::Oracle => {
                if m.n_sites > MAX_TRAJECTORY_SITES {
                    return Err(invalid(format!("the oracle path is limited to {MAX_TRAJECTORY_SITES} sites")));
                }
                if cfg.initial.state == InitialKind::Dispersion {
                    return Err(invalid("the oracle path needs a Gibbs initial state"));
                }
                if obs.kinds.contains(&ObservableKind::GlobalMz) && !periodic {
                    return Err(invalid("global_mz is computed on periodic chains"));
                }
            }
            PathKind::Asymptote => {
                asymptote_site(cfg, &spec)?;
            }
        }
    }
    for c in &cfg.comparisons {
        validate_comparison(cfg, c)?;
    }
    Ok(spec)
}

fn impurities_vanish_before_start(spec: &ChainSpec) -> bool {
    let zero = |p: &bvchain::model::TimeProfile| p.value(spec.t0, Side::Left).map(|v| v == 0.0).unwrap_or(false);
    spec.impurity_h.values().chain(spec.impurity_g.values()).chain(spec.impurity_gamma.values()).all(zero)
}

/// The single field impurity whose long-time limit the asymptote path reports.
fn asymptote_site(cfg: &ScenarioConfig, spec: &ChainSpec) -> Result<(usize, f64), CliError> {
    let m = &cfg.model;
    let fields: Vec<_> = m.impurities.iter().filter(|i| i.kind == ImpurityKind::Field).collect();
    if m.gamma != 0.0 || fields.len() != 1 || m.impurities.len() != 1 {
        return Err(invalid("the asymptote path needs one field impurity on an XX chain"));
    }
    let site = fields[0].at;
    let profile = &spec.impurity_h[&site];
    if !profile.is_constant_on(spec.t0, spec.t_end) {
        return Err(invalid("the asymptote path needs an impurity that is constant after t0"));
    }
    if cfg.initial.state == InitialKind::Thermal && !impurities_vanish_before_start(spec) {
        return Err(invalid("the asymptote path needs the impurity switched on at t0"));
    }
    if cfg.initial.state == InitialKind::Dispersion {
        return Err(invalid("the asymptote path needs a Gibbs initial state"));
    }
    if !cfg.observables.sites.contains(&site) {
        return Err(invalid(format!("the asymptote path needs site {site} among the observed sites")));
    }
    let value = profile.value(spec.t0, Side::Right).map_err(|e| invalid(e.to_string()))?;
    Ok((site, value))
}

fn validate_comparison(cfg: &ScenarioConfig, c: &ComparisonConfig) -> Result<(), CliError> {
    let paths = &cfg.solver.paths;
    if !paths.contains(&c.a) || c.b.is_some_and(|b| !paths.contains(&b)) {
        return Err(invalid("comparisons may only name configured paths"));
    }
    if !cfg.observables.kinds.contains(&c.observable) {
        return Err(invalid(format!("comparison of unrequested observable {}", c.observable.name())));
    }
    match (c.observable, c.site) {
        (ObservableKind::LocalMz, Some(s)) if cfg.observables.sites.contains(&s) => {}
        (ObservableKind::LocalMz, _) => return Err(invalid("local_mz comparisons need an observed site")),
        (ObservableKind::GlobalMz, None) => {}
        (ObservableKind::GlobalMz, Some(_)) => return Err(invalid("global_mz comparisons take no site")),
    }
    match c.kind {
        ComparisonKind::Sup | ComparisonKind::WindowMean if c.b.is_none() => {
            return Err(invalid("sup and window_mean comparisons need a second path"))
        }
        ComparisonKind::Period => match c.period {
            Some(p) if p > 0.0 && is_multiple(p, cfg.observables.record_every) => {}
            _ => return Err(invalid("period comparisons need a period that is a multiple of record_every")),
        },
        _ => {}
    }
    if !(c.tolerance >= 0.0) {
        return Err(invalid("tolerances must be non-negative"));
    }
    Ok(())
}

/// Result of running every path of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub series: Vec<Series>,
    pub report: ComparisonReport,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun, CliError> {
    let spec = validate_scenario(cfg)?;
    let times = cfg.record_times();
    let mut series = Vec::new();
    let mut car = None;
    let mut convergence = Vec::new();
    let mut asymptote = None;
    for &path in &cfg.solver.paths {
        match path {
            PathKind::Flow => {
                let (s, c) = run_flow(cfg, &spec, &times, cfg.solver.flow.dt)?;
                car = Some(c);
                if cfg.solver.flow.convergence {
                    let dt = cfg.solver.flow.dt;
                    let (coarse, _) = run_flow(cfg, &spec, &times, 2.0 * dt)?;
                    let (fine, _) = run_flow(cfg, &spec, &times, 0.5 * dt)?;
                    for ((x, y), z) in coarse.iter().zip(&s).zip(&fine) {
                        let e1 = sup_diff(&x.values, &y.values);
                        let e2 = sup_diff(&y.values, &z.values);
                        convergence.push(ConvergenceEstimate {
                            path: path.name().into(),
                            observable: series_label(y),
                            dt,
                            coarse_difference: e1,
                            fine_difference: e2,
                            order: (e1 / e2).log2(),
                        });
                    }
                }
                series.extend(s);
            }
            PathKind::ClosedForm => series.extend(run_closed_form(cfg, &spec, &times)?),
            PathKind::Volterra => series.extend(run_volterra(cfg, &spec, &times)?),
            PathKind::Oracle => series.extend(run_oracle(cfg, &spec, &times)?),
            PathKind::Asymptote => {
                let (s, summary) = run_asymptote(cfg, &spec, &times)?;
                asymptote = Some(summary);
                series.push(s);
            }
        }
    }
    let comparisons: Vec<ComparisonResult> = cfg.comparisons.iter().map(|c| compare(cfg, c, &series)).collect();
    let passed = comparisons.iter().all(|c| c.passed);
    let report = ComparisonReport {
        schema: crate::config::SCHEMA,
        scenario: cfg.name.clone(),
        passed,
        comparisons,
        car,
        convergence,
        asymptote,
    };
    Ok(ScenarioRun { series, report })
}

fn series_label(s: &Series) -> String {
    match s.site {
        Some(k) => format!("{}@{k}", s.observable.name()),
        None => s.observable.name().to_string(),
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Initial state in the basis of the flow.
pub fn initial_state(cfg: &ScenarioConfig, spec: &ChainSpec) -> bvchain::Result<ThermalState> {
    let m = &cfg.model;
    let beta = cfg.initial.beta;
    match cfg.initial.state {
        InitialKind::Thermal => ThermalState::from_spec(spec, beta),
        InitialKind::Dispersion => Ok(ThermalState::dispersion(m.g, m.gamma, m.h, beta, m.n_sites)),
        InitialKind::XxField => {
            let grid = MomentumGrid::new(m.n_sites);
            let omega: Vec<f64> = (0..m.n_sites).map(|i| m.g * grid.cos_sin(i).0 + cfg.initial.h0).collect();
            Ok(ThermalState::diagonal(beta, &omega, bvchain::bvflow::Basis::Momentum))
        }
    }
}

/// Per-record series buffers keyed by (observable, site).
struct Collector {
    keys: Vec<(ObservableKind, Option<usize>)>,
    values: Vec<Vec<f64>>,
}

impl Collector {
    fn new(cfg: &ScenarioConfig, sites: &[usize]) -> Self {
        let mut keys = Vec::new();
        for &k in &cfg.observables.kinds {
            match k {
                ObservableKind::GlobalMz => keys.push((k, None)),
                ObservableKind::LocalMz => keys.extend(sites.iter().map(|&s| (k, Some(s)))),
            }
        }
        let values = vec![Vec::new(); keys.len()];
        Self { keys, values }
    }

    fn push<F>(&mut self, mut eval: F) -> bvchain::Result<()>
    where
        F: FnMut(ObservableKind, Option<usize>) -> bvchain::Result<f64>,
    {
        for (i, &(k, s)) in self.keys.iter().enumerate() {
            self.values[i].push(eval(k, s)?);
        }
        Ok(())
    }

    fn finish(self, path: PathKind, times: &[f64]) -> Vec<Series> {
        self.keys
            .into_iter()
            .zip(self.values)
            .map(|((observable, site), values)| Series { observable, path, site, times: times.to_vec(), values })
            .collect()
    }
}

fn state_observable(k: ObservableKind, site: Option<usize>, st: &BVState, th: &ThermalState) -> bvchain::Result<f64> {
    match k {
        ObservableKind::GlobalMz => global_transverse_magnetization(st, th),
        ObservableKind::LocalMz => local_transverse_magnetization(site.unwrap_or(1), st, th),
    }
}

fn run_flow(
    cfg: &ScenarioConfig,
    spec: &ChainSpec,
    times: &[f64],
    dt: f64,
) -> Result<(Vec<Series>, CarSummary), CliError> {
    let f = &cfg.solver.flow;
    let th = initial_state(cfg, spec)?;
    let icfg = IntegratorConfig {
        dt,
        method: match f.method {
            MethodConfig::Rk4 => Method::Rk4,
            MethodConfig::Midpoint => Method::Midpoint,
        },
        car_tolerance: f.car_tolerance,
        record_stride: (cfg.observables.record_every / dt).round() as usize,
        car_check_every: f.car_check_every,
    };
    let mut col = Collector::new(cfg, &cfg.observables.sites);
    let mut seen = 0usize;
    let columns: Vec<usize> = (0..spec.n_sites).collect();
    let summary = integrate_observed(spec, &icfg, &columns, |st| {
        if seen >= times.len() || (st.t - times[seen]).abs() > 1e-7 * times[seen].abs().max(1.0) {
            return Err(bvchain::Error::InvalidStep(format!("record at t = {} is off the output grid", st.t)));
        }
        seen += 1;
        col.push(|k, s| state_observable(k, s, st, &th))
    })?;
    let car = CarSummary { max_first: summary.max_car.0, max_second: summary.max_car.1, steps: summary.steps };
    Ok((col.finish(PathKind::Flow, times), car))
}

fn run_closed_form(cfg: &ScenarioConfig, spec: &ChainSpec, times: &[f64]) -> Result<Vec<Series>, CliError> {
    let m = &cfg.model;
    let mut col = Collector::new(cfg, &cfg.observables.sites);
    match cfg.solver.closed_form.mode {
        ClosedFormMode::Grid => {
            let th = initial_state(cfg, spec)?;
            for &t in times {
                let st = homogeneous_state(m.g, m.gamma, m.h, m.n_sites, t, m.t0);
                col.push(|k, s| state_observable(k, s, &st, &th))?;
            }
        }
        ClosedFormMode::Continuum => {
            for &t in times {
                col.push(|_, _| Ok(xy_homogeneous_quench_mz(m.g, m.gamma, m.h, cfg.initial.beta, t, m.t0)))?;
            }
        }
    }
    Ok(col.finish(PathKind::ClosedForm, times))
}

/// `f_p` on the Volterra momentum grid for a state diagonal in momentum.
fn volterra_occupations(cfg: &ScenarioConfig, q: &[f64]) -> Vec<f64> {
    let m = &cfg.model;
    let beta = cfg.initial.beta;
    q.iter()
        .map(|&q| match cfg.initial.state {
            InitialKind::XxField => thermal_occupation(beta, m.g * q.cos() + cfg.initial.h0),
            InitialKind::Thermal => thermal_occupation(beta, m.g * q.cos() + m.h),
            InitialKind::Dispersion => thermal_occupation(beta, dispersion(m.g, 0.0, m.h, q)),
        })
        .collect()
}

fn run_volterra(cfg: &ScenarioConfig, spec: &ChainSpec, times: &[f64]) -> Result<Vec<Series>, CliError> {
    let v = &cfg.solver.volterra;
    let grid = VolterraGrid::new(spec.t0, spec.t_end, v.dt, v.n_q)?;
    let sites: Vec<i64> = cfg.observables.sites.iter().map(|&s| s as i64).collect();
    let sol = solve_inhomogeneous_system(spec, &grid, &sites)?;
    let f = volterra_occupations(cfg, &grid.q);
    let stride = (cfg.observables.record_every / v.dt).round() as usize;
    let mut out = Vec::new();
    for &site in &cfg.observables.sites {
        let all = local_magnetization_volterra(&sol, site as i64, &f)?;
        let values = (0..times.len()).map(|i| all[i * stride]).collect();
        out.push(Series {
            observable: ObservableKind::LocalMz,
            path: PathKind::Volterra,
            site: Some(site),
            times: times.to_vec(),
            values,
        });
    }
    Ok(out)
}

fn run_oracle(cfg: &ScenarioConfig, spec: &ChainSpec, times: &[f64]) -> Result<Vec<Series>, CliError> {
    let rho0 = match cfg.initial.state {
        InitialKind::XxField => {
            let pre = ChainSpec::new(spec.n_sites, Boundary::Periodic, spec.g, 0.0, cfg.initial.h0)
                .with_window(spec.t0, spec.t_end);
            thermal_density(&pre, cfg.initial.beta)?
        }
        _ => thermal_density(spec, cfg.initial.beta)?,
    };
    let rhos = propagate_exact(&rho0, spec, times, cfg.solver.oracle.dt)?;
    let mut col = Collector::new(cfg, &cfg.observables.sites);
    for rho in &rhos {
        col.push(|k, s| {
            Ok(match k {
                ObservableKind::GlobalMz => rho.global_magnetization(),
                ObservableKind::LocalMz => rho.local_magnetization(s.unwrap_or(1)),
            })
        })?;
    }
    Ok(col.finish(PathKind::Oracle, times))
}

fn run_asymptote(
    cfg: &ScenarioConfig,
    spec: &ChainSpec,
    times: &[f64],
) -> Result<(Series, AsymptoteSummary), CliError> {
    let (site, h) = asymptote_site(cfg, spec)?;
    let g = cfg.model.g;
    let beta = cfg.initial.beta;
    let h0 = match cfg.initial.state {
        InitialKind::XxField => cfg.initial.h0,
        _ => cfg.model.h,
    };
    let initial = initial_magnetization(g, beta, h0);
    let continuum_shift = asymptotic_quench_observable(g, h, beta, h0);
    let bound = bound_state_shift(g, h, beta, h0);
    let total = asymptotic_local_magnetization(g, h, beta, h0);
    let summary = AsymptoteSummary {
        site,
        initial,
        continuum_shift,
        bound_state_shift: bound,
        continuum_only: initial + continuum_shift,
        total,
    };
    let s = Series {
        observable: ObservableKind::LocalMz,
        path: PathKind::Asymptote,
        site: Some(site),
        times: times.to_vec(),
        values: vec![total; times.len()],
    };
    Ok((s, summary))
}

fn find<'a>(series: &'a [Series], obs: ObservableKind, path: PathKind, site: Option<usize>) -> Option<&'a Series> {
    series.iter().find(|s| s.observable == obs && s.path == path && s.site == site)
}

fn compare(cfg: &ScenarioConfig, c: &ComparisonConfig, series: &[Series]) -> ComparisonResult {
    let a = find(series, c.observable, c.a, c.site);
    let b = c.b.and_then(|b| find(series, c.observable, b, c.site));
    let (sup, rms) = match (c.kind, a, b) {
        (ComparisonKind::Sup, Some(a), Some(b)) => stats(a.values.iter().zip(&b.values).map(|(x, y)| x - y)),
        (ComparisonKind::WindowMean, Some(a), Some(b)) => {
            let mid = cfg.model.t0 + 0.5 * (cfg.model.t_end - cfg.model.t0);
            let mean = |s: &Series| {
                let w: Vec<f64> =
                    s.times.iter().zip(&s.values).filter(|(t, _)| **t >= mid - 1e-9).map(|(_, v)| *v).collect();
                w.iter().sum::<f64>() / w.len() as f64
            };
            let d = (mean(a) - mean(b)).abs();
            (d, d)
        }
        (ComparisonKind::Drift, Some(a), _) => stats(a.values.iter().map(|x| x - a.values[0])),
        (ComparisonKind::Period, Some(a), _) => {
            let k = (c.period.unwrap_or(0.0) / cfg.observables.record_every).round() as usize;
            stats(a.values.iter().zip(a.values.iter().skip(k)).map(|(x, y)| y - x))
        }
        _ => (f64::NAN, f64::NAN),
    };
    ComparisonResult {
        observable: c.observable.name().into(),
        a: c.a.name().into(),
        b: c.b.map(|b| b.name().into()),
        kind: match c.kind {
            ComparisonKind::Sup => "sup",
            ComparisonKind::WindowMean => "window_mean",
            ComparisonKind::Drift => "drift",
            ComparisonKind::Period => "period",
        }
        .into(),
        site: c.site,
        sup,
        rms,
        tolerance: c.tolerance,
        passed: sup <= c.tolerance,
    }
}

fn stats(d: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut sup, mut sq, mut n) = (0.0f64, 0.0, 0usize);
    for x in d {
        sup = sup.max(x.abs());
        sq += x * x;
        n += 1;
    }
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    (sup, (sq / n as f64).sqrt())
}

/// Series grouped by `(observable, site)`, for overlays.
pub(crate) fn group(series: &[Series]) -> BTreeMap<(ObservableKind, Option<usize>), Vec<&Series>> {
    let mut out: BTreeMap<_, Vec<&Series>> = BTreeMap::new();
    for s in series {
        out.entry((s.observable, s.site)).or_default().push(s);
    }
    out
}
