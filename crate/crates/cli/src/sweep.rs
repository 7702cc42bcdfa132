//! Parameter sweeps: one independent run per axis value.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Axis, InitialSection, ScenarioConfig, SweepSection};
use crate::error::{CliError, CliResult};
use crate::output::{write_json, CsvTable};
use crate::scenario::{analytic_p_lz, run_scenario, TOOL, VERSION};

pub const SWEEP_HEADER: [&str; 5] = [
    "axis_value",
    "final_p_lz",
    "final_e_l",
    "final_q",
    "analytic_p_lz",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub base: ScenarioConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub final_p_lz: f64,
    pub final_e_l: f64,
    pub final_q: f64,
    pub analytic_p_lz: f64,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: Vec<f64>, base: ScenarioConfig) -> CliResult<Self> {
        let spec = SweepSpec {
            axis,
            values,
            base: ScenarioConfig { sweep: None, ..base },
        };
        if spec.values.is_empty() {
            return Err(CliError::Config("sweep: no axis values".into()));
        }
        for &x in &spec.values {
            spec.point(x)?.resolve()?;
        }
        Ok(spec)
    }

    /// Reads the `[sweep]` section of a scenario.
    pub fn from_config(cfg: &ScenarioConfig) -> CliResult<Self> {
        let section: &SweepSection = cfg
            .sweep
            .as_ref()
            .ok_or_else(|| CliError::Config("sweep: missing [sweep] section or --axis".into()))?;
        Self::new(section.axis, section.points()?, cfg.clone())
    }

    /// The base scenario with the axis parameter set to `x`.
    pub fn point(&self, x: f64) -> CliResult<ScenarioConfig> {
        let mut cfg = self.base.clone();
        if !x.is_finite() {
            return Err(CliError::Config(format!("sweep: non-finite axis value {x}")));
        }
        let mismatch = |need: &str| {
            CliError::Config(format!("sweep axis {} needs a {need} initial state", self.axis))
        };
        match self.axis {
            Axis::Alpha2 => match &mut cfg.initial {
                InitialSection::Cat { alpha2, .. } => *alpha2 = x,
                _ => return Err(mismatch("cat")),
            },
            Axis::Theta => match &mut cfg.initial {
                InitialSection::Cat { theta, .. } => *theta = x,
                _ => return Err(mismatch("cat")),
            },
            Axis::Temperature => match &mut cfg.initial {
                InitialSection::Thermal { temperature } => *temperature = x,
                _ => return Err(mismatch("thermal")),
            },
            Axis::Delta => cfg.params.delta = x,
            Axis::Omega => {
                if let Some(w0) = cfg.params.omega0.as_mut() {
                    *w0 += x - cfg.params.omega;
                }
                cfg.params.omega = x;
            }
        }
        Ok(cfg)
    }
}

/// Runs every point in parallel; rows come back in axis order.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<Vec<SweepRow>> {
    spec.values
        .par_iter()
        .map(|&x| {
            let cfg = spec.point(x)?;
            let out = run_scenario(&cfg)?;
            Ok(SweepRow {
                axis_value: x,
                final_p_lz: out.series.final_p_lz(),
                final_e_l: out.series.final_e_l(),
                final_q: out.series.final_q(),
                analytic_p_lz: analytic_p_lz(&cfg)?,
            })
        })
        .collect()
}

pub fn sweep_table(rows: &[SweepRow]) -> CsvTable {
    let mut t = CsvTable::new(&SWEEP_HEADER);
    for r in rows {
        t.push_row(&[r.axis_value, r.final_p_lz, r.final_e_l, r.final_q, r.analytic_p_lz]);
    }
    t
}

#[derive(Debug, Serialize)]
struct SweepMeta<'a> {
    tool: &'static str,
    version: &'static str,
    kind: &'static str,
    columns: [&'static str; 5],
    axis: &'static str,
    values: &'a [f64],
    base: &'a ScenarioConfig,
    final_window: &'static str,
}

/// Writes `<dir>/<stem>.csv` and its `.meta.json` sidecar.
pub fn write_sweep(dir: &Path, stem: &str, spec: &SweepSpec, rows: &[SweepRow]) -> CliResult<PathBuf> {
    let csv = dir.join(format!("{stem}.csv"));
    sweep_table(rows).write(&csv)?;
    let meta = SweepMeta {
        tool: TOOL,
        version: VERSION,
        kind: "sweep",
        columns: SWEEP_HEADER,
        axis: spec.axis.name(),
        values: &spec.values,
        base: &spec.base,
        final_window: "mean over the last 10% of samples",
    };
    write_json(&dir.join(format!("{stem}.meta.json")), &meta)?;
    Ok(csv)
}
