//! Scenario files (`schema = 1`).

use std::collections::BTreeSet;

use bvchain::model::{Boundary, ChainSpec, TimeProfile};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub model: ModelConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    pub solver: SolverConfig,
    pub observables: ObservablesConfig,
    #[serde(default, rename = "compare")]
    pub comparisons: Vec<ComparisonConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n_sites: usize,
    pub boundary: BoundaryConfig,
    pub g: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub h: f64,
    #[serde(default)]
    pub t0: f64,
    pub t_end: f64,
    #[serde(default, rename = "impurity")]
    pub impurities: Vec<ImpurityConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryConfig {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpurityKind {
    Field,
    Hopping,
    Pairing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpurityConfig {
    pub kind: ImpurityKind,
    /// Site for field impurities, bond for the others.
    pub at: usize,
    pub profile: ProfileConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Constant { value: f64 },
    Step { t: f64, value: f64 },
    Switch { t: f64, before: f64, after: f64 },
    Ramp { t_start: f64, t_stop: f64, from: f64, to: f64 },
    Drive { t_on: f64, amplitude: f64, frequency: f64, phase: f64 },
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl ProfileConfig {
    pub fn build(&self) -> bvchain::Result<TimeProfile> {
        Ok(match self {
            ProfileConfig::Constant { value } => TimeProfile::constant(*value),
            ProfileConfig::Step { t, value } => TimeProfile::step(*t, *value),
            ProfileConfig::Switch { t, before, after } => TimeProfile::switch(*t, *before, *after),
            ProfileConfig::Ramp { t_start, t_stop, from, to } => TimeProfile::ramp(*t_start, *t_stop, *from, *to)?,
            ProfileConfig::Drive { t_on, amplitude, frequency, phase } => {
                TimeProfile::drive(*t_on, *amplitude, *frequency, *phase)
            }
            ProfileConfig::Sampled { times, values } => TimeProfile::sampled(times.clone(), values.clone())?,
        })
    }
}

/// Initial Gaussian state at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub state: InitialKind,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Uniform field of the pre-quench XX chain for `state = "xx_field"`.
    #[serde(default)]
    pub h0: f64,
}

fn default_beta() -> f64 {
    1.0
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { state: InitialKind::Thermal, beta: default_beta(), h0: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// Gibbs state of `H(t0-)`.
    Thermal,
    /// Momentum modes filled with `f(E_q)` of the homogeneous couplings.
    Dispersion,
    /// Gibbs state of the homogeneous XX ring with field `h0`.
    XxField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Flow,
    ClosedForm,
    Volterra,
    Oracle,
    /// Long-time limit at a single field impurity (a constant series).
    Asymptote,
}

impl PathKind {
    pub fn name(self) -> &'static str {
        match self {
            PathKind::Flow => "flow",
            PathKind::ClosedForm => "closed_form",
            PathKind::Volterra => "volterra",
            PathKind::Oracle => "oracle",
            PathKind::Asymptote => "asymptote",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [PathKind::Flow, PathKind::ClosedForm, PathKind::Volterra, PathKind::Oracle, PathKind::Asymptote]
            .into_iter()
            .find(|p| p.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub paths: Vec<PathKind>,
    #[serde(default)]
    pub flow: FlowSettings,
    #[serde(default)]
    pub volterra: VolterraSettings,
    #[serde(default)]
    pub oracle: OracleSettings,
    #[serde(default)]
    pub closed_form: ClosedFormSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSettings {
    pub dt: f64,
    pub method: MethodConfig,
    pub car_tolerance: f64,
    /// Check CAR on every n-th record (and always on the last).
    #[serde(default = "default_car_check_every")]
    pub car_check_every: usize,
    /// Also run at `2 dt` and `dt / 2` and report the observed order.
    #[serde(default)]
    pub convergence: bool,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            method: MethodConfig::Rk4,
            car_tolerance: 1e-10,
            car_check_every: default_car_check_every(),
            convergence: false,
        }
    }
}

fn default_car_check_every() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodConfig {
    Rk4,
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolterraSettings {
    pub dt: f64,
    pub n_q: usize,
}

impl Default for VolterraSettings {
    fn default() -> Self {
        Self { dt: 0.01, n_q: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    pub dt: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { dt: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormMode {
    /// The exact solution on the chain's own momentum grid.
    #[default]
    Grid,
    /// Momentum integrals of the infinite chain.
    Continuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedFormSettings {
    #[serde(default)]
    pub mode: ClosedFormMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    /// `(2/N) sum_j <n_j> - 1`
    GlobalMz,
    /// `2 <n_k> - 1` at each configured site.
    LocalMz,
}

impl ObservableKind {
    pub fn name(self) -> &'static str {
        match self {
            ObservableKind::GlobalMz => "global_mz",
            ObservableKind::LocalMz => "local_mz",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservablesConfig {
    pub kinds: Vec<ObservableKind>,
    #[serde(default)]
    pub sites: Vec<usize>,
    /// Sampling interval of every series.
    pub record_every: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonKind {
    /// Pointwise on the shared time grid.
    Sup,
    /// Mean of `a` over `[t_end / 2, t_end]` against the mean of `b` there.
    WindowMean,
    /// `sup |a(t) - a(t0)|`, `b` unused.
    Drift,
    /// `sup |a(t + period) - a(t)|`, `b` unused.
    Period,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    pub observable: ObservableKind,
    pub a: PathKind,
    #[serde(default)]
    pub b: Option<PathKind>,
    pub kind: ComparisonKind,
    pub tolerance: f64,
    #[serde(default)]
    pub site: Option<usize>,
    #[serde(default)]
    pub period: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_true")]
    pub csv: bool,
    #[serde(default = "default_true")]
    pub plotdata: bool,
}

fn default_true() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { csv: true, plotdata: true }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::Parse(format!("unsupported schema {} (expected {SCHEMA})", cfg.schema)));
        }
        Ok(cfg)
    }

    /// Normalized text form.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    pub fn chain_spec(&self) -> bvchain::Result<ChainSpec> {
        let m = &self.model;
        let boundary = match m.boundary {
            BoundaryConfig::Periodic => Boundary::Periodic,
            BoundaryConfig::Open => Boundary::Open,
        };
        let mut spec = ChainSpec::new(m.n_sites, boundary, m.g, m.gamma, m.h).with_window(m.t0, m.t_end);
        for imp in &m.impurities {
            let p = imp.profile.build()?;
            spec = match imp.kind {
                ImpurityKind::Field => spec.with_field_impurity(imp.at, p),
                ImpurityKind::Hopping => spec.with_hopping_impurity(imp.at, p),
                ImpurityKind::Pairing => spec.with_pairing_impurity(imp.at, p),
            };
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Record times `t0, t0 + record_every, ...` up to `t_end`.
    pub fn record_times(&self) -> Vec<f64> {
        let m = &self.model;
        let n = ((m.t_end - m.t0) / self.observables.record_every + 1e-9).floor() as usize;
        (0..=n).map(|k| m.t0 + k as f64 * self.observables.record_every).collect()
    }

    /// Restricts the solver paths, dropping comparisons that need a removed path.
    pub fn restrict_paths(&mut self, keep: &BTreeSet<PathKind>) {
        self.solver.paths.retain(|p| keep.contains(p));
        let paths: BTreeSet<PathKind> = self.solver.paths.iter().copied().collect();
        self.comparisons.retain(|c| paths.contains(&c.a) && c.b.is_none_or(|b| paths.contains(&b)));
    }

    pub fn override_tolerances(&mut self, tol: f64) {
        for c in &mut self.comparisons {
            c.tolerance = tol;
        }
    }
}
