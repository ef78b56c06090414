use super::{BVState, FlowGenerator};
use crate::error::{Error, Result};
use crate::model::{validate_hypotheses, ChainSpec, Side};
use crate::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta.
    Rk4,
    /// Explicit midpoint rule, second order.
    Midpoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    /// Largest step; each interval between breakpoints is split into equal steps no longer than this.
    pub dt: f64,
    pub method: Method,
    /// Tolerated CAR defect. Integration aborts once a checked state exceeds 100 times this.
    pub car_tolerance: f64,
    /// Record every `record_stride` steps (the initial and final states are always recorded).
    pub record_stride: usize,
    /// Check CAR on every `car_check_every`-th recorded state and on the final state.
    pub car_check_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1e-3, method: Method::Rk4, car_tolerance: 1e-10, record_stride: 100, car_check_every: 1 }
    }
}

impl IntegratorConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self { dt, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<BVState>,
    /// Column indices that were integrated.
    pub columns: Vec<usize>,
    /// Largest `(first, second)` CAR defects seen on checked states.
    pub max_car: (f64, f64),
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &BVState {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSummary {
    pub max_car: (f64, f64),
    pub steps: usize,
    pub records: usize,
}

/// Full flow `A(t), B(t)` over the protocol window.
pub fn integrate_flow(spec: &ChainSpec, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let cols: Vec<usize> = (0..spec.n_sites).collect();
    integrate_columns(spec, cfg, &cols)
}

/// Flow restricted to the given columns of `(A, B)`.
pub fn integrate_columns(spec: &ChainSpec, cfg: &IntegratorConfig, columns: &[usize]) -> Result<Trajectory> {
    let mut states = Vec::new();
    let summary = integrate_observed(spec, cfg, columns, |s| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok(Trajectory { states, columns: columns.to_vec(), max_car: summary.max_car, steps: summary.steps })
}

/// Runs the flow and hands every recorded state to `observer` instead of storing it.
pub fn integrate_observed<F>(
    spec: &ChainSpec,
    cfg: &IntegratorConfig,
    columns: &[usize],
    observer: F,
) -> Result<FlowSummary>
where
    F: FnMut(&BVState) -> Result<()>,
{
    spec.validate()?;
    let report = validate_hypotheses(spec)?;
    if !report.passed() {
        return Err(Error::HypothesisViolated(report.failures().join("; ")));
    }
    let generator = FlowGenerator::new(spec)?;
    let n = spec.n_sites;
    if let Some(&bad) = columns.iter().find(|&&c| c >= n) {
        return Err(Error::DimensionMismatch(format!("column {bad} out of range for {n} modes")));
    }
    let initial = BVState::identity_columns(n, columns, spec.t0, generator.basis());
    let mut points = vec![spec.t0];
    points.extend(spec.interior_breakpoints());
    points.push(spec.t_end);
    evolve(&generator, initial, &points, cfg, observer)
}

/// Integrates `initial` under `generator` across consecutive `points`, landing exactly on each.
pub fn evolve<F>(
    generator: &FlowGenerator,
    initial: BVState,
    points: &[f64],
    cfg: &IntegratorConfig,
    mut observer: F,
) -> Result<FlowSummary>
where
    F: FnMut(&BVState) -> Result<()>,
{
    let span = points.last().unwrap() - points[0];
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) || cfg.dt > span {
        return Err(Error::InvalidStep(format!("dt = {} must lie in (0, {span}]", cfg.dt)));
    }
    if cfg.record_stride == 0 || cfg.car_check_every == 0 {
        return Err(Error::InvalidStep("record_stride and car_check_every must be positive".into()));
    }
    let (n, m) = initial.a.shape();
    let basis = initial.basis;
    let mut a = initial.a.as_slice().to_vec();
    let mut b = initial.b.as_slice().to_vec();
    let zero = C64::new(0.0, 0.0);
    let len = n * m;
    let buf = || vec![zero; len];
    let (mut k1, mut k2, mut k3, mut k4) = (buf(), buf(), buf(), buf());
    let (mut l1, mut l2, mut l3, mut l4) = (buf(), buf(), buf(), buf());
    let (mut ta, mut tb) = (buf(), buf());

    let mut summary = FlowSummary { max_car: (0.0, 0.0), steps: 0, records: 0 };
    let limit = 100.0 * cfg.car_tolerance;
    let mut record = |t: f64, a: &[C64], b: &[C64], check: bool, summary: &mut FlowSummary| -> Result<()> {
        let state =
            BVState { t, a: CMatrix::from_column_slice(n, m, a), b: CMatrix::from_column_slice(n, m, b), basis };
        if check {
            let (d1, d2) = state.car_defect();
            summary.max_car = (summary.max_car.0.max(d1), summary.max_car.1.max(d2));
            if d1.max(d2) > limit || !d1.is_finite() || !d2.is_finite() {
                return Err(Error::CarViolation { t, defect: d1.max(d2), limit });
            }
        }
        summary.records += 1;
        observer(&state)
    };

    record(points[0], &a, &b, true, &mut summary)?;
    let total_intervals = points.len() - 1;
    for (iv, w) in points.windows(2).enumerate() {
        let (t_a, t_b) = (w[0], w[1]);
        let steps = ((t_b - t_a) / cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = (t_b - t_a) / steps as f64;
        for s in 0..steps {
            let t = t_a + s as f64 * h;
            let last = s + 1 == steps;
            let t_next = if last { t_b } else { t + h };
            match cfg.method {
                Method::Rk4 => {
                    let tm = t + 0.5 * h;
                    generator.apply(t, Side::Right, &a, &b, &mut k1, &mut l1)?;
                    axpy(&a, 0.5 * h, &k1, &mut ta);
                    axpy(&b, 0.5 * h, &l1, &mut tb);
                    generator.apply(tm, Side::Right, &ta, &tb, &mut k2, &mut l2)?;
                    axpy(&a, 0.5 * h, &k2, &mut ta);
                    axpy(&b, 0.5 * h, &l2, &mut tb);
                    generator.apply(tm, Side::Right, &ta, &tb, &mut k3, &mut l3)?;
                    axpy(&a, h, &k3, &mut ta);
                    axpy(&b, h, &l3, &mut tb);
                    generator.apply(t_next, Side::Left, &ta, &tb, &mut k4, &mut l4)?;
                    let c = h / 6.0;
                    for i in 0..len {
                        a[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * c;
                        b[i] += (l1[i] + (l2[i] + l3[i]) * 2.0 + l4[i]) * c;
                    }
                }
                Method::Midpoint => {
                    generator.apply(t, Side::Right, &a, &b, &mut k1, &mut l1)?;
                    axpy(&a, 0.5 * h, &k1, &mut ta);
                    axpy(&b, 0.5 * h, &l1, &mut tb);
                    generator.apply(t + 0.5 * h, Side::Right, &ta, &tb, &mut k2, &mut l2)?;
                    for i in 0..len {
                        a[i] += k2[i] * h;
                        b[i] += l2[i] * h;
                    }
                }
            }
            summary.steps += 1;
            let is_final = last && iv + 1 == total_intervals;
            if is_final || summary.steps % cfg.record_stride == 0 {
                let check = is_final || summary.records % cfg.car_check_every == 0;
                record(t_next, &a, &b, check, &mut summary)?;
            }
        }
    }
    Ok(summary)
}

fn axpy(x: &[C64], s: f64, y: &[C64], out: &mut [C64]) {
    for ((o, x), y) in out.iter_mut().zip(x).zip(y) {
        *o = x + y * s;
    }
}
