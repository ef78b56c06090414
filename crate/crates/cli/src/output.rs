//! Series CSV files, the comparison report and plot data.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::run::{group, ComparisonReport, ScenarioRun, Series};

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PlotManifest {
    pub files: Vec<PlotEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotEntry {
    pub file: String,
    pub observable: String,
    pub paths: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
    pub columns: Vec<String>,
}

fn stem(s: &Series) -> String {
    match s.site {
        Some(k) => format!("{}_site{k}", s.observable.name()),
        None => s.observable.name().to_string(),
    }
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

/// Writes one data file per series, an overlay file for every observable that
/// more than one path produced, and `manifest.toml` describing them.
pub fn emit_plotdata(series: &[Series], dir: &Path) -> Result<PlotManifest, CliError> {
    fs::create_dir_all(dir)?;
    let mut manifest = PlotManifest::default();
    for s in series {
        let file = format!("{}_{}.dat", stem(s), s.path.name());
        let mut text = format!("# t {}\n", s.path.name());
        for (t, v) in s.times.iter().zip(&s.values) {
            text.push_str(&format!("{} {}\n", fmt(*t), fmt(*v)));
        }
        fs::write(dir.join(&file), text)?;
        manifest.files.push(PlotEntry {
            file,
            observable: s.observable.name().into(),
            paths: vec![s.path.name().into()],
            site: s.site,
            columns: vec!["t".into(), "value".into()],
        });
    }
    for ((obs, site), members) in group(series) {
        if members.len() < 2 {
            continue;
        }
        let file = format!("{}_overlay.dat", stem(members[0]));
        let names: Vec<String> = members.iter().map(|s| s.path.name().to_string()).collect();
        let mut text = format!("# t {}\n", names.join(" "));
        for (i, t) in members[0].times.iter().enumerate() {
            text.push_str(&fmt(*t));
            for s in &members {
                text.push(' ');
                text.push_str(&fmt(s.values[i]));
            }
            text.push('\n');
        }
        fs::write(dir.join(&file), text)?;
        let mut columns = vec!["t".to_string()];
        columns.extend(names.iter().cloned());
        manifest.files.push(PlotEntry { file, observable: obs.name().into(), paths: names, site, columns });
    }
    let text = toml::to_string(&manifest).expect("manifest serializes");
    fs::write(dir.join("manifest.toml"), text)?;
    Ok(manifest)
}

/// One CSV per `(observable, path)` with header `t,value` or `t,value,site`.
pub fn write_series_csv(series: &[Series], dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let mut keys: Vec<(&str, &str)> = series.iter().map(|s| (s.observable.name(), s.path.name())).collect();
    keys.dedup();
    for (obs, path) in keys {
        let members: Vec<&Series> =
            series.iter().filter(|s| s.observable.name() == obs && s.path.name() == path).collect();
        let local = members.iter().any(|s| s.site.is_some());
        let file = dir.join(format!("{obs}_{path}.csv"));
        let mut w = csv::Writer::from_path(&file)?;
        if local {
            w.write_record(["t", "value", "site"])?;
        } else {
            w.write_record(["t", "value"])?;
        }
        for s in &members {
            for (t, v) in s.times.iter().zip(&s.values) {
                match s.site {
                    Some(k) => w.write_record([fmt(*t), fmt(*v), k.to_string()])?,
                    None => w.write_record([fmt(*t), fmt(*v)])?,
                }
            }
        }
        w.flush()?;
        written.push(file);
    }
    Ok(written)
}

pub fn report_text(report: &ComparisonReport) -> String {
    toml::to_string(report).expect("reports serialize")
}

/// Writes everything a run produced into `dir`.
pub fn write_outputs(run: &ScenarioRun, cfg: &crate::ScenarioConfig, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    if cfg.output.csv {
        write_series_csv(&run.series, dir)?;
    }
    fs::write(dir.join("report.toml"), report_text(&run.report))?;
    if cfg.output.plotdata {
        emit_plotdata(&run.series, &dir.join("plotdata"))?;
    }
    Ok(())
}
