//! Figure data: one CSV per curve plus a `manifest.json` listing curves,
//! labels and the reference lines drawn over them.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;

use lzcat::analytics::{
    plz_cat_rwa, plz_thermal_norwa, plz_thermal_norwa_reduced, plz_thermal_rwa, ClosedFormInputs,
};
use lzcat::hamiltonians::adiabatic_spectrum;
use lzcat::{LZParams, Model, TruncationSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{
    linspace, Axis, InitialSection, IntegratorSection, ModelName, ParamsSection, ScenarioConfig,
};
use crate::error::{CliError, CliResult};
use crate::output::{write_json, CsvTable};
use crate::scenario::{run_scenario, write_run, TOOL, VERSION};
use crate::sweep::{run_sweep, write_sweep, SweepSpec};

pub const FIGURE_IDS: [&str; 16] = [
    "1a", "1b", "1c", "1d", "2a", "2b", "2c", "3a", "3b", "3c", "4a", "4b", "5", "6a", "6b", "7",
];

/// Photon-number sets for panels whose captions do not list them.
const ALPHA2_SERIES: [f64; 4] = [0.0, 1.0, 2.0, 4.0];
const ALPHA2_THETA: [f64; 3] = [0.3, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLine {
    pub orientation: Orientation,
    pub value: f64,
    pub label: String,
    /// Closed form the value comes from, by `analytic` formula name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    pub style: String,
    /// File of the curve the line belongs to; absent for panel-wide lines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEntry {
    pub file: String,
    pub label: String,
    /// `series`, `sweep` or `spectrum`.
    pub kind: String,
    pub x: String,
    pub y: Vec<String>,
    /// Column holding a closed-form curve to draw dashed alongside.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_column: Option<String>,
    pub params: Value,
    pub assumed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub figure: String,
    pub tool: String,
    pub version: String,
    pub description: String,
    /// True when any curve parameter was not given by the caption.
    pub assumed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumed_note: Vec<String>,
    pub curves: Vec<CurveEntry>,
    pub reference_lines: Vec<ReferenceLine>,
}

/// Integrator settings applied to every time-resolved curve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureOptions {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

enum Job {
    Series(ScenarioConfig),
    Sweep(SweepSpec),
    Spectrum {
        params: LZParams,
        n_max: usize,
        times: Vec<f64>,
    },
}

struct Planned {
    job: Job,
    entry: CurveEntry,
}

struct Plan {
    description: String,
    assumed_note: Vec<String>,
    curves: Vec<Planned>,
    lines: Vec<ReferenceLine>,
}

fn stem(entry: &CurveEntry) -> &str {
    entry.file.trim_end_matches(".csv")
}

fn cat(model: ModelName, delta: f64, omega: f64, alpha2: f64, theta: f64, opts: &FigureOptions) -> ScenarioConfig {
    let mut integrator = IntegratorSection::default();
    if let Some(r) = opts.rel_tol {
        integrator.rel_tol = r;
    }
    if let Some(a) = opts.abs_tol {
        integrator.abs_tol = a;
    }
    ScenarioConfig {
        params: ParamsSection {
            model,
            v: 1.0,
            delta,
            omega,
            omega0: None,
        },
        initial: InitialSection::Cat { alpha2, theta },
        integrator,
        ..Default::default()
    }
}

fn yurke_stoler(alpha2: f64, delta: f64) -> f64 {
    plz_cat_rwa(&ClosedFormInputs::cat(alpha2, FRAC_PI_2, delta)).expect("valid inputs")
}

fn hline(value: f64, label: String, formula: Option<&str>, style: &str, curve: Option<&str>) -> ReferenceLine {
    ReferenceLine {
        orientation: Orientation::Horizontal,
        value,
        label,
        formula: formula.map(str::to_string),
        style: style.to_string(),
        curve: curve.map(str::to_string),
    }
}

fn vline(value: f64, label: String, curve: Option<&str>) -> ReferenceLine {
    ReferenceLine {
        orientation: Orientation::Vertical,
        value,
        label,
        formula: None,
        style: "dashed".into(),
        curve: curve.map(str::to_string),
    }
}

fn poissonian() -> ReferenceLine {
    hline(0.0, "Q = 0 (Poissonian)".into(), None, "dashed", None)
}

fn series_curve(file: String, label: String, cfg: ScenarioConfig, y: &[&str], assumed: bool) -> Planned {
    let mut params = json!({
        "model": cfg.params.model,
        "delta": cfg.params.delta,
        "omega": cfg.params.omega,
        "v": cfg.params.v,
    });
    match cfg.initial {
        InitialSection::Thermal { temperature } => params["T"] = json!(temperature),
        InitialSection::Fock { n } => params["n"] = json!(n),
        InitialSection::Cat { alpha2, theta } => {
            params["alpha2"] = json!(alpha2);
            params["theta"] = json!(theta);
        }
    }
    Planned {
        entry: CurveEntry {
            file,
            label,
            kind: "series".into(),
            x: "t".into(),
            y: y.iter().map(|s| s.to_string()).collect(),
            reference_column: None,
            params,
            assumed,
        },
        job: Job::Series(cfg),
    }
}

fn sweep_curve(
    file: String,
    label: String,
    spec: SweepSpec,
    y: &str,
    reference_column: Option<&str>,
    assumed: bool,
) -> Planned {
    let b = &spec.base;
    let mut params = json!({
        "model": b.params.model,
        "delta": b.params.delta,
        "omega": b.params.omega,
        "v": b.params.v,
        "axis": spec.axis.name(),
    });
    if let InitialSection::Cat { alpha2, theta } = b.initial {
        if spec.axis != Axis::Alpha2 {
            params["alpha2"] = json!(alpha2);
        }
        if spec.axis != Axis::Theta {
            params["theta"] = json!(theta);
        }
    }
    Planned {
        entry: CurveEntry {
            file,
            label,
            kind: "sweep".into(),
            x: "axis_value".into(),
            y: vec![y.to_string()],
            reference_column: reference_column.map(str::to_string),
            params,
            assumed,
        },
        job: Job::Sweep(spec),
    }
}

fn spectrum_curve(model: Model, n_max: usize, t0: f64, t1: f64) -> CliResult<Planned> {
    let params = LZParams::new(1.0, 0.5, 10.0, model).map_err(CliError::setup)?;
    let levels = 2 * (n_max + 1);
    Ok(Planned {
        entry: CurveEntry {
            file: "spectrum.csv".into(),
            label: "adiabatic levels".into(),
            kind: "spectrum".into(),
            x: "t".into(),
            y: (0..levels).map(|k| format!("e{k}")).collect(),
            reference_column: None,
            params: json!({
                "model": model.to_string(),
                "delta": 0.5,
                "omega": 10.0,
                "v": 1.0,
                "n_max": n_max,
            }),
            assumed: false,
        },
        job: Job::Spectrum {
            params,
            n_max,
            times: linspace(t0, t1, 601),
        },
    })
}

fn alpha2_grid() -> Vec<f64> {
    linspace(0.0, 8.0, 33)
}

fn theta_grid() -> Vec<f64> {
    linspace(0.0, TAU, 25)
}

fn delta_grid() -> Vec<f64> {
    linspace(0.05, 2.0, 40)
}

fn plan(id: &str, opts: &FigureOptions) -> CliResult<Plan> {
    use ModelName::{Full, Rwa};
    let ys = FRAC_PI_2;
    let mut curves = Vec::new();
    let mut lines = Vec::new();
    let mut note = Vec::new();
    let assumed_series = "photon numbers |α|² ∈ {0, 1, 2, 4} are not listed in the caption";
    let assumed_theta = "photon numbers |α|² ∈ {0.3, 1, 2} are not listed in the caption";
    let grid_note = |what: &str| format!("{what} grid spacing is not given in the caption");

    let description = match id {
        "1a" => {
            curves.push(spectrum_curve(Model::Rwa, 4, -10.0, 10.0)?);
            lines.push(vline(0.0, "avoided crossings".into(), None));
            note.push("time window and number of photon levels are not given".into());
            "Adiabatic levels, rotating-wave model, Δ = 0.5, ω = 10"
        }
        "1b" | "2a" | "3a" | "4b" => {
            let (model, y) = match id {
                "1b" => (Rwa, "p_lz"),
                "2a" => (Rwa, "e_l"),
                "3a" => (Rwa, "q"),
                _ => (Full, "p_lz"),
            };
            note.push(assumed_series.into());
            note.push("θ = π/2 (Yurke-Stoler state) is assumed".into());
            for a2 in ALPHA2_SERIES {
                let file = format!("alpha2_{a2}.csv");
                if y == "p_lz" {
                    lines.push(hline(
                        yurke_stoler(a2, 0.5),
                        format!("closed form, |α|²={a2}"),
                        Some("yurke-stoler"),
                        "dashed",
                        Some(&file),
                    ));
                }
                let cfg = cat(model, 0.5, 10.0, a2, ys, opts);
                curves.push(series_curve(file, format!("|α|²={a2}"), cfg, &[y], true));
            }
            if id == "3a" {
                lines.push(poissonian());
            }
            match id {
                "1b" => "P_LZ(t), rotating-wave model, Δ = 0.5",
                "2a" => "Linear entropy E_l(t), rotating-wave model, Δ = 0.5",
                "3a" => "Mandel Q(t), rotating-wave model, Δ = 0.5",
                _ => "P_LZ(t), full model, Δ = 0.5, ω = 10",
            }
        }
        "1c" | "2b" | "3b" => {
            let (deltas, y): (&[f64], &str) = match id {
                "1c" => (&[0.1, 0.2, 0.5], "final_p_lz"),
                "2b" => (&[0.2, 0.5, 1.0], "final_e_l"),
                _ => (&[0.2, 0.5, 1.0], "final_q"),
            };
            note.push("θ = π/2 (Yurke-Stoler state) is assumed".into());
            note.push(grid_note("|α|²"));
            for &d in deltas {
                let spec = SweepSpec::new(Axis::Alpha2, alpha2_grid(), cat(Rwa, d, 10.0, 1.0, ys, opts))?;
                curves.push(sweep_curve(format!("delta_{d}.csv"), format!("Δ={d}"), spec, y, None, false));
            }
            if id == "3b" {
                lines.push(poissonian());
            }
            match id {
                "1c" => "Final P_LZ versus |α|², rotating-wave model",
                "2b" => "Final E_l versus |α|², rotating-wave model",
                _ => "Final Q versus |α|², rotating-wave model",
            }
        }
        "1d" | "2c" => {
            let y = if id == "1d" { "final_p_lz" } else { "final_e_l" };
            note.push(assumed_theta.into());
            note.push(grid_note("θ"));
            for a2 in ALPHA2_THETA {
                let spec = SweepSpec::new(Axis::Theta, theta_grid(), cat(Rwa, 0.5, 10.0, a2, ys, opts))?;
                curves.push(sweep_curve(format!("alpha2_{a2}.csv"), format!("|α|²={a2}"), spec, y, None, true));
            }
            if id == "1d" {
                "Final P_LZ versus θ, rotating-wave model, Δ = 0.5"
            } else {
                "Final E_l versus θ, rotating-wave model, Δ = 0.5"
            }
        }
        "3c" => {
            note.push(assumed_series.into());
            note.push("θ = π/2 (Yurke-Stoler state) is assumed".into());
            note.push(grid_note("Δ"));
            for a2 in ALPHA2_SERIES {
                let spec = SweepSpec::new(Axis::Delta, delta_grid(), cat(Rwa, 0.5, 10.0, a2, ys, opts))?;
                curves.push(sweep_curve(format!("alpha2_{a2}.csv"), format!("|α|²={a2}"), spec, "final_q", None, true));
            }
            lines.push(poissonian());
            "Final Q versus Δ, rotating-wave model"
        }
        "4a" => {
            curves.push(spectrum_curve(Model::Full, 4, -5.0, 25.0)?);
            lines.push(vline(0.0, "first crossing group".into(), None));
            lines.push(vline(20.0, "second crossing group, t = 2ω/v".into(), None));
            note.push("number of photon levels is not given".into());
            "Adiabatic levels, full model, Δ = 0.5, ω = 10"
        }
        "5" => {
            note.push("the (Δ, ω) pairs are not listed in the caption".into());
            note.push("θ = π/2 (Yurke-Stoler state) is assumed".into());
            for d in [0.2, 0.5] {
                for w in [1.0, 5.0, 10.0] {
                    let file = format!("delta_{d}_omega_{w}.csv");
                    lines.push(hline(
                        yurke_stoler(1.0, d),
                        format!("rotating-wave closed form, Δ={d}"),
                        Some("yurke-stoler"),
                        "dashdot",
                        Some(&file),
                    ));
                    lines.push(vline(2.0 * w, format!("t = 2ω/v = {}", 2.0 * w), Some(&file)));
                    let cfg = cat(Full, d, w, 1.0, ys, opts);
                    curves.push(series_curve(file, format!("Δ={d}, ω={w}"), cfg, &["p_lz"], true));
                }
            }
            "P_LZ(t), full model, |α|² = 1"
        }
        "6a" => {
            note.push("θ = π/2 (Yurke-Stoler state) is assumed".into());
            note.push("the legend values 0.1, 0.2, 0.5 are read as couplings Δ at ω = 10".into());
            note.push(grid_note("|α|²"));
            for d in [0.1, 0.2, 0.5] {
                let spec = SweepSpec::new(Axis::Alpha2, alpha2_grid(), cat(Full, d, 10.0, 1.0, ys, opts))?;
                curves.push(sweep_curve(
                    format!("delta_{d}.csv"),
                    format!("Δ={d}"),
                    spec,
                    "final_p_lz",
                    Some("analytic_p_lz"),
                    false,
                ));
            }
            "Long-time P_LZ versus |α|², full model, ω = 10"
        }
        "6b" => {
            note.push("θ = π/2 (Yurke-Stoler state) is assumed".into());
            let cfg = cat(Full, 0.1, 10.0, 1.0, ys, opts);
            curves.push(series_curve("alpha2_1.csv".into(), "|α|²=1".into(), cfg, &["e_l", "q"], false));
            "E_l(t) and Q(t), full model, |α|² = 1, Δ = 0.1, ω = 10"
        }
        "7" => {
            note.push("integration window [-50, 80] so that the ω = 20 curve settles after t = 40".into());
            let d = 0.1;
            for w in [1.0, 10.0, 20.0] {
                let file = format!("omega_{w}.csv");
                let mut cfg = cat(Full, d, w, 0.0, 0.0, opts);
                cfg.initial = InitialSection::Thermal { temperature: w };
                cfg.integrator.t1 = 80.0;
                cfg.integrator.samples = 2601;
                lines.push(vline(2.0 * w, format!("t = 2ω/v = {}", 2.0 * w), Some(&file)));
                curves.push(series_curve(file, format!("ω={w}"), cfg, &["p_lz"], false));
            }
            // T/ω = 1 fixes the Boltzmann factor, so every ω shares these values
            let inp = ClosedFormInputs::thermal(d, 1.0, 1.0);
            let v = |r: lzcat::Result<f64>| r.map_err(CliError::setup);
            lines.push(hline(v(plz_thermal_rwa(&inp))?, "rotating-wave closed form".into(), Some("thermal-rwa"), "dashdot", None));
            lines.push(hline(v(plz_thermal_norwa(&inp))?, "full-model closed form".into(), Some("thermal-full"), "dashed", None));
            lines.push(hline(
                v(plz_thermal_norwa_reduced(&inp))?,
                "full-model closed form without the (1 + x) factor".into(),
                Some("thermal-full-reduced"),
                "dotted",
                None,
            ));
            "P_LZ(t), thermal photon field, full model, Δ = 0.1, T/ω = 1"
        }
        other => return Err(CliError::UnknownFigure(other.to_string())),
    };
    Ok(Plan {
        description: description.to_string(),
        assumed_note: note,
        curves,
        lines,
    })
}

fn execute(planned: &Planned, dir: &Path) -> CliResult<()> {
    let stem = stem(&planned.entry);
    match &planned.job {
        Job::Series(cfg) => {
            let out = run_scenario(cfg)?;
            write_run(dir, stem, cfg, &out)?;
        }
        Job::Sweep(spec) => {
            let rows = run_sweep(spec)?;
            write_sweep(dir, stem, spec, &rows)?;
        }
        Job::Spectrum { params, n_max, times } => {
            let trunc = TruncationSpec::new(*n_max, 0.5).map_err(CliError::setup)?;
            let slices = adiabatic_spectrum(params, times, &trunc).map_err(CliError::Numerical)?;
            let mut header = vec!["t".to_string()];
            header.extend(planned.entry.y.iter().cloned());
            let mut table = CsvTable::new(&header);
            let mut row = Vec::new();
            for s in &slices {
                row.clear();
                row.push(s.t);
                row.extend(&s.eigenvalues);
                table.push_row(&row);
            }
            table.write(&dir.join(&planned.entry.file))?;
            let meta = json!({
                "tool": TOOL,
                "version": VERSION,
                "kind": "spectrum",
                "columns": header,
                "params": planned.entry.params,
                "t0": times[0],
                "t1": times[times.len() - 1],
                "samples": times.len(),
            });
            write_json(&dir.join(format!("{stem}.meta.json")), &meta)?;
        }
    }
    Ok(())
}

/// Computes every curve of `id` in parallel and writes the CSVs and
/// `manifest.json` into `dir`.
pub fn generate(id: &str, dir: &Path, opts: &FigureOptions) -> CliResult<Manifest> {
    let plan = plan(id, opts)?;
    plan.curves
        .par_iter()
        .map(|c| execute(c, dir))
        .collect::<CliResult<Vec<()>>>()?;
    let manifest = Manifest {
        figure: id.to_string(),
        tool: TOOL.into(),
        version: VERSION.into(),
        description: plan.description,
        assumed: plan.curves.iter().any(|c| c.entry.assumed) || !plan.assumed_note.is_empty(),
        assumed_note: plan.assumed_note,
        curves: plan.curves.into_iter().map(|c| c.entry).collect(),
        reference_lines: plan.lines,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// Manifest of `id` without running anything.
pub fn manifest_only(id: &str) -> CliResult<Manifest> {
    let plan = plan(id, &FigureOptions::default())?;
    Ok(Manifest {
        figure: id.to_string(),
        tool: TOOL.into(),
        version: VERSION.into(),
        description: plan.description,
        assumed: plan.curves.iter().any(|c| c.entry.assumed) || !plan.assumed_note.is_empty(),
        assumed_note: plan.assumed_note,
        curves: plan.curves.into_iter().map(|c| c.entry).collect(),
        reference_lines: plan.lines,
    })
}

pub fn read_manifest(dir: &Path) -> CliResult<Manifest> {
    let path = dir.join("manifest.json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
