//! Single time-resolved runs.

use std::path::{Path, PathBuf};

use lzcat::analytics::{
    joint_up_prob, p_up_n, plz_cat_norwa, plz_cat_rwa, plz_thermal_norwa, plz_thermal_rwa,
    ClosedFormInputs,
};
use lzcat::propagator::StepStats;
use lzcat::{
    evolve_observables, evolve_thermal, joint_up, make_cat, make_fock, Model, ObservableSeries,
    ThermalEnsemble,
};
use serde::Serialize;

use crate::config::{InitialSection, Observable, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::output::{write_json, CsvTable};

pub const TOOL: &str = "lzcat";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: ObservableSeries,
    pub outputs: Vec<Observable>,
    pub n_max: usize,
    /// Step counts; `None` for ensembles, which run one integration per
    /// Fock level.
    pub stats: Option<StepStats>,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> CliResult<RunOutput> {
    let r = cfg.resolve()?;
    let (series, stats) = match cfg.initial {
        InitialSection::Cat { alpha2, theta } => {
            let ph = make_cat(alpha2.sqrt(), theta, &r.truncation).map_err(CliError::setup)?;
            let (s, st) = evolve_observables(&joint_up(&ph), &r.params, &r.integrator)
                .map_err(CliError::Numerical)?;
            (s, Some(st))
        }
        InitialSection::Fock { n } => {
            let ph = make_fock(n, &r.truncation).map_err(CliError::setup)?;
            let (s, st) = evolve_observables(&joint_up(&ph), &r.params, &r.integrator)
                .map_err(CliError::Numerical)?;
            (s, Some(st))
        }
        InitialSection::Thermal { temperature } => {
            let ens = ThermalEnsemble::thermal(cfg.params.omega, temperature, &r.truncation)
                .map_err(CliError::setup)?;
            let s = evolve_thermal(&ens, &r.params, &r.integrator).map_err(CliError::Numerical)?;
            (s, None)
        }
    };
    Ok(RunOutput {
        series,
        outputs: r.outputs,
        n_max: r.truncation.n_max(),
        stats,
    })
}

/// Long-time transition probability predicted by the closed form that
/// matches the model and initial state.
pub fn analytic_p_lz(cfg: &ScenarioConfig) -> CliResult<f64> {
    let p = &cfg.params;
    let model = cfg.model();
    let base = ClosedFormInputs {
        alpha2: 0.0,
        theta: 0.0,
        delta: p.delta,
        v: p.v,
        omega: p.omega,
        temperature: 0.0,
    };
    let value = match (&cfg.initial, model) {
        (InitialSection::Cat { alpha2, theta }, Model::Rwa) => plz_cat_rwa(&ClosedFormInputs {
            alpha2: *alpha2,
            theta: *theta,
            ..base
        }),
        (InitialSection::Cat { alpha2, theta }, Model::Full) => plz_cat_norwa(&ClosedFormInputs {
            alpha2: *alpha2,
            theta: *theta,
            ..base
        })
        .map(|e| e.p_lz),
        (InitialSection::Fock { n }, Model::Rwa) => p_up_n(*n as i64, p.delta, p.v).map(|s| 1.0 - s),
        (InitialSection::Fock { n }, Model::Full) => Ok(1.0 - joint_up_prob(*n, p.delta, p.v)),
        (InitialSection::Thermal { temperature }, Model::Rwa) => plz_thermal_rwa(&ClosedFormInputs {
            temperature: *temperature,
            ..base
        }),
        (InitialSection::Thermal { temperature }, Model::Full) => {
            plz_thermal_norwa(&ClosedFormInputs {
                temperature: *temperature,
                ..base
            })
        }
    };
    value.map_err(CliError::setup)
}

/// `t` followed by the requested observables.
pub fn series_table(series: &ObservableSeries, outputs: &[Observable]) -> CsvTable {
    let mut header = vec!["t"];
    header.extend(outputs.iter().map(|o| o.name()));
    let mut table = CsvTable::new(&header);
    let cols: Vec<&[f64]> = outputs
        .iter()
        .map(|o| match o {
            Observable::PLz => series.p_lz.as_slice(),
            Observable::El => &series.e_l,
            Observable::Q => &series.q,
            Observable::Nbar => &series.nbar,
            Observable::N2 => &series.n2,
            Observable::Norm => &series.norm,
        })
        .collect();
    let mut row = Vec::with_capacity(cols.len() + 1);
    for i in 0..series.len() {
        row.clear();
        row.push(series.t[i]);
        row.extend(cols.iter().map(|c| c[i]));
        table.push_row(&row);
    }
    table
}

/// Sidecar written next to every run CSV.
#[derive(Debug, Serialize)]
pub struct RunMeta<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: &'static str,
    pub columns: Vec<&'static str>,
    pub config: &'a ScenarioConfig,
    pub n_max: usize,
    pub steps_accepted: Option<usize>,
    pub steps_rejected: Option<usize>,
    pub norm_drift: f64,
    pub final_p_lz: f64,
    pub analytic_p_lz: f64,
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.meta.json`; returns the CSV
/// path.
pub fn write_run(dir: &Path, stem: &str, cfg: &ScenarioConfig, out: &RunOutput) -> CliResult<PathBuf> {
    let csv = dir.join(format!("{stem}.csv"));
    series_table(&out.series, &out.outputs).write(&csv)?;
    let mut columns = vec!["t"];
    columns.extend(out.outputs.iter().map(|o| o.name()));
    let meta = RunMeta {
        tool: TOOL,
        version: VERSION,
        kind: "run",
        columns,
        config: cfg,
        n_max: out.n_max,
        steps_accepted: out.stats.map(|s| s.accepted),
        steps_rejected: out.stats.map(|s| s.rejected),
        norm_drift: out.series.norm_drift(),
        final_p_lz: out.series.final_p_lz(),
        analytic_p_lz: analytic_p_lz(cfg)?,
    };
    write_json(&dir.join(format!("{stem}.meta.json")), &meta)?;
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::IntegratorSection;

    fn short(initial: InitialSection) -> ScenarioConfig {
        ScenarioConfig {
            initial,
            integrator: IntegratorSection {
                t0: -20.0,
                t1: 20.0,
                samples: 41,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn zero_coupling_never_flips() {
        let mut cfg = short(InitialSection::Cat {
            alpha2: 1.0,
            theta: 0.3,
        });
        cfg.params.delta = 0.0;
        let out = run_scenario(&cfg).unwrap();
        assert!(out.series.p_lz.iter().all(|&p| p == 0.0));
        assert_eq!(analytic_p_lz(&cfg).unwrap(), 0.0);
    }

    #[test]
    fn table_prunes_columns() {
        let mut cfg = short(InitialSection::Fock { n: 2 });
        cfg.outputs = Some(vec![Observable::Norm, Observable::PLz]);
        let out = run_scenario(&cfg).unwrap();
        let t = series_table(&out.series, &out.outputs);
        let first = t.as_str().lines().next().unwrap();
        assert_eq!(first, "t,p_lz,norm");
        assert_eq!(t.as_str().lines().count(), 42);
    }

    #[test]
    fn thermal_run_has_no_entropy() {
        let cfg = short(InitialSection::Thermal { temperature: 1.0 });
        let out = run_scenario(&cfg).unwrap();
        assert!(!out.outputs.contains(&Observable::El));
        assert!(out.stats.is_none());
        assert!(out.series.q.iter().all(|q| q.is_finite()));
    }

    #[test]
    fn reference_matches_closed_forms() {
        let cat = short(InitialSection::Cat {
            alpha2: 1.0,
            theta: std::f64::consts::FRAC_PI_2,
        });
        assert!((analytic_p_lz(&cat).unwrap() - 0.512_013_323_152_136).abs() < 1e-12);
        let mut vac = short(InitialSection::Fock { n: 0 });
        vac.params.model = crate::config::ModelName::Full;
        let p = lzcat::analytics::p_up0(0.5, 1.0);
        assert!((analytic_p_lz(&vac).unwrap() - (1.0 - p)).abs() < 1e-15);
    }
}
