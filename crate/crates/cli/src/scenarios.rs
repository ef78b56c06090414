//! Scenarios shipped with the binary.

use crate::config::ScenarioConfig;
use crate::error::CliError;

pub const BUNDLED: &[(&str, &str)] = &[
    ("homogeneous_xy_quench", include_str!("../scenarios/homogeneous_xy_quench.toml")),
    ("appendix_b_quench", include_str!("../scenarios/appendix_b_quench.toml")),
    ("xx_global_quench", include_str!("../scenarios/xx_global_quench.toml")),
    ("random_impurity_oracle", include_str!("../scenarios/random_impurity_oracle.toml")),
    ("xy_flat_band", include_str!("../scenarios/xy_flat_band.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

pub fn text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load(name: &str) -> Result<ScenarioConfig, CliError> {
    let text = text(name).ok_or_else(|| CliError::Parse(format!("no bundled scenario named {name}")))?;
    ScenarioConfig::parse(text)
}
