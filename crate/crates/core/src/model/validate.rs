//! Checks of the coupling hypotheses the flow and Volterra solvers rely on.

use crate::error::Result;
use crate::model::chain::ChainSpec;
use crate::model::couplings::build_site_couplings_at;
use crate::model::profile::Side;
use crate::CMatrix;

/// Outcome of one hypothesis check.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Largest row or column l1 norm of `J` over the sampled times.
    pub hopping_l1: f64,
    /// Largest row or column l1 norm of `K` over the sampled times.
    pub pairing_l1: f64,
    /// Smallest eigenvalue bound `min_j (J_jj - sum_{k != j} |J_jk|)`.
    pub hopping_lower_bound: f64,
    pub breakpoints: Vec<f64>,
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect()
    }
}

const SAMPLES: usize = 64;

/// Samples the couplings on `[t0, t_end]` and at both sides of every breakpoint.
pub fn validate_hypotheses(spec: &ChainSpec) -> Result<ValidationReport> {
    spec.validate()?;
    let breakpoints = spec.interior_breakpoints();

    let mut limits_ok = Vec::new();
    for (term, profile) in spec.profiles() {
        for &b in &breakpoints {
            if profile.left_limit(b).is_err() || profile.evaluate(b).is_err() {
                limits_ok.push(format!("{term:?}: one-sided limit missing at t = {b}"));
            }
        }
    }
    let mut end_missing = Vec::new();
    for (term, profile) in spec.profiles() {
        if profile.left_limit(spec.t_end).is_err() {
            end_missing.push(format!("{term:?}"));
        }
    }

    let mut times: Vec<(f64, Side)> =
        (0..=SAMPLES).map(|i| (spec.t0 + (spec.t_end - spec.t0) * i as f64 / SAMPLES as f64, Side::Right)).collect();
    times.push((spec.t0, Side::Left));
    times.push((spec.t_end, Side::Left));
    for &b in &breakpoints {
        times.push((b, Side::Left));
        times.push((b, Side::Right));
    }

    let mut hopping_l1 = 0.0f64;
    let mut pairing_l1 = 0.0f64;
    let mut lower = f64::INFINITY;
    let mut undefined = Vec::new();
    for (t, side) in times {
        match build_site_couplings_at(spec, t, side) {
            Ok(c) => {
                hopping_l1 = hopping_l1.max(l1(&c.hopping));
                pairing_l1 = pairing_l1.max(l1(&c.pairing));
                lower = lower.min(gershgorin_lower(&c.hopping));
            }
            Err(_) => undefined.push(t),
        }
    }

    let finite = hopping_l1.is_finite() && pairing_l1.is_finite();
    let checks = vec![
        HypothesisCheck {
            name: "stability",
            passed: lower.is_finite() && undefined.is_empty(),
            detail: format!("J bounded below by {lower:.6e}"),
        },
        HypothesisCheck {
            name: "summability",
            passed: finite && undefined.is_empty(),
            detail: format!("max l1 norms: J {hopping_l1:.6e}, K {pairing_l1:.6e}"),
        },
        HypothesisCheck {
            name: "piecewise continuity",
            passed: limits_ok.is_empty() && undefined.is_empty(),
            detail: if undefined.is_empty() && limits_ok.is_empty() {
                format!("{} breakpoints, all one-sided limits present", breakpoints.len())
            } else {
                let mut msgs = limits_ok.clone();
                if !undefined.is_empty() {
                    msgs.push(format!("couplings undefined at t = {:?}", undefined));
                }
                msgs.join("; ")
            },
        },
        HypothesisCheck {
            name: "end limit",
            passed: end_missing.is_empty(),
            detail: if end_missing.is_empty() {
                "left limit at t_end present".into()
            } else {
                format!("left limit at t_end missing for {}", end_missing.join(", "))
            },
        },
    ];

    Ok(ValidationReport { hopping_l1, pairing_l1, hopping_lower_bound: lower, breakpoints, checks })
}

fn l1(m: &CMatrix) -> f64 {
    let rows = m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>());
    let cols = m.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>());
    rows.chain(cols).fold(0.0, f64::max)
}

fn gershgorin_lower(m: &CMatrix) -> f64 {
    (0..m.nrows())
        .map(|j| {
            let off: f64 = (0..m.ncols()).filter(|&k| k != j).map(|k| m[(j, k)].norm()).sum();
            m[(j, j)].re - off
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::chain::Boundary;
    use crate::model::profile::TimeProfile;

    #[test]
    fn sampled_table_ending_early_fails_end_limit() {
        let table = TimeProfile::sampled(vec![0.0, 0.5, 1.0], vec![0.0, 0.3, 0.1]).unwrap();
        let spec =
            ChainSpec::new(6, Boundary::Periodic, 1.0, 0.0, 0.0).with_window(0.0, 2.0).with_field_impurity(3, table);
        let report = validate_hypotheses(&spec).unwrap();
        assert!(!report.passed());
        assert!(report.failures().iter().any(|m| m.contains("left limit at t_end missing")));
    }

    #[test]
    fn step_protocol_passes() {
        let spec = ChainSpec::new(6, Boundary::Open, 1.0, 0.5, 0.2)
            .with_window(0.0, 2.0)
            .with_field_impurity(3, TimeProfile::step(1.0, 0.4))
            .with_hopping_impurity(2, TimeProfile::ramp(0.2, 0.8, 0.0, 0.3).unwrap());
        let report = validate_hypotheses(&spec).unwrap();
        assert!(report.passed(), "{:?}", report.failures());
        assert_eq!(report.breakpoints, vec![0.2, 0.8, 1.0]);
        assert!(report.hopping_l1 > 1.0);
    }
}
