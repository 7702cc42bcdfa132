//! Scenario files.
//!
//! A scenario is a TOML document with `[params]`, `[initial]`,
//! `[integrator]`, `[truncation]` and optional `[sweep]` sections plus a
//! top-level `outputs` list. Every key can be overridden from the command
//! line as `--section.key=value`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use lzcat::fockspace::{choose_truncation_geometric, thermal_mean_photon};
use lzcat::{
    cat_truncation, IntegratorConfig, LZParams, Model, TruncationSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Rwa,
    Full,
}

impl From<ModelName> for Model {
    fn from(m: ModelName) -> Model {
        match m {
            ModelName::Rwa => Model::Rwa,
            ModelName::Full => Model::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default = "default_model")]
    pub model: ModelName,
    #[serde(default = "one")]
    pub v: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_omega")]
    pub omega: f64,
    /// Two-level splitting; defaults to `omega` (resonant).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection {
            model: default_model(),
            v: 1.0,
            delta: default_delta(),
            omega: default_omega(),
            omega0: None,
        }
    }
}

/// Initial photon state; the two-level system always starts spin-up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialSection {
    Cat {
        alpha2: f64,
        #[serde(default = "default_theta")]
        theta: f64,
    },
    Fock {
        n: usize,
    },
    Thermal {
        temperature: f64,
    },
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection::Cat {
            alpha2: 1.0,
            theta: FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_t1")]
    pub t1: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        IntegratorSection {
            t0: d.t0,
            t1: d.t1,
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            samples: d.sample_count,
            max_step: None,
        }
    }
}

impl IntegratorSection {
    pub fn to_core(&self) -> IntegratorConfig {
        IntegratorConfig {
            t0: self.t0,
            t1: self.t1,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            sample_count: self.samples,
            max_step: self.max_step.unwrap_or(f64::INFINITY),
        }
    }
}

/// Photon cutoff: `"auto"` or an explicit `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NMaxRepr", into = "NMaxRepr")]
pub enum NMax {
    Auto,
    Fixed(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NMaxRepr {
    Fixed(usize),
    Word(String),
}

impl TryFrom<NMaxRepr> for NMax {
    type Error = String;

    fn try_from(r: NMaxRepr) -> Result<Self, String> {
        match r {
            NMaxRepr::Fixed(n) => Ok(NMax::Fixed(n)),
            NMaxRepr::Word(w) => w.parse(),
        }
    }
}

impl From<NMax> for NMaxRepr {
    fn from(n: NMax) -> Self {
        match n {
            NMax::Auto => NMaxRepr::Word("auto".into()),
            NMax::Fixed(n) => NMaxRepr::Fixed(n),
        }
    }
}

impl FromStr for NMax {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(NMax::Auto);
        }
        s.parse()
            .map(NMax::Fixed)
            .map_err(|_| format!("n_max must be \"auto\" or a non-negative integer, got '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSection {
    #[serde(default = "default_nmax")]
    pub n_max: NMax,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

impl Default for TruncationSection {
    fn default() -> Self {
        TruncationSection {
            n_max: NMax::Auto,
            tail_tol: default_tail_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    #[serde(rename = "p_lz")]
    PLz,
    #[serde(rename = "e_l")]
    El,
    Q,
    Nbar,
    N2,
    Norm,
}

impl Observable {
    /// Columns written when `outputs` is not given.
    pub const DEFAULT: [Observable; 5] = [
        Observable::PLz,
        Observable::El,
        Observable::Q,
        Observable::Nbar,
        Observable::Norm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::PLz => "p_lz",
            Observable::El => "e_l",
            Observable::Q => "q",
            Observable::Nbar => "nbar",
            Observable::N2 => "n2",
            Observable::Norm => "norm",
        }
    }
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "alpha2")]
    Alpha2,
    #[serde(rename = "theta")]
    Theta,
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "omega")]
    Omega,
    #[serde(rename = "T")]
    Temperature,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Alpha2 => "alpha2",
            Axis::Theta => "theta",
            Axis::Delta => "delta",
            Axis::Omega => "omega",
            Axis::Temperature => "T",
        }
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alpha2" => Ok(Axis::Alpha2),
            "theta" => Ok(Axis::Theta),
            "delta" => Ok(Axis::Delta),
            "omega" => Ok(Axis::Omega),
            "T" | "temperature" => Ok(Axis::Temperature),
            other => Err(format!(
                "unknown sweep axis '{other}', expected alpha2, theta, delta, omega or T"
            )),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    /// `[start, stop, count]`, endpoints included.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linspace: Option<(f64, f64, usize)>,
}

impl SweepSection {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        let pts = match (&self.values, self.linspace) {
            (Some(v), None) => v.clone(),
            (None, Some((a, b, n))) => linspace(a, b, n),
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "sweep: give either `values` or `linspace`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config("sweep: missing `values` or `linspace`".into()))
            }
        };
        if pts.is_empty() {
            return Err(CliError::Config("sweep: no axis values".into()));
        }
        if let Some(x) = pts.iter().find(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("sweep: non-finite axis value {x}")));
        }
        Ok(pts)
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    b
                } else {
                    a + (b - a) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub truncation: TruncationSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<Observable>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

/// Everything a run needs, checked and converted to core types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: LZParams,
    pub integrator: IntegratorConfig,
    pub truncation: TruncationSpec,
    pub outputs: Vec<Observable>,
}

impl ScenarioConfig {
    /// Parses a scenario and applies `key=value` overrides. Parse errors
    /// carry the line and column of the offending key.
    pub fn from_toml(text: &str, overrides: &[(String, String)]) -> CliResult<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if overrides.is_empty() {
            return Ok(cfg);
        }
        cfg.with_overrides(overrides)
    }

    /// Applies dotted `section.key = value` overrides. Values are read as
    /// TOML literals, falling back to bare strings.
    pub fn with_overrides(&self, overrides: &[(String, String)]) -> CliResult<Self> {
        let mut root = toml::Table::try_from(self)
            .map_err(|e| CliError::Config(format!("cannot re-encode config: {e}")))?;
        // a new initial kind starts from an empty section
        let kind_first = overrides
            .iter()
            .filter(|(k, _)| k == "initial.kind")
            .chain(overrides.iter().filter(|(k, _)| k != "initial.kind"));
        for (key, raw) in kind_first {
            let value = parse_value(raw);
            if key == "initial.kind" {
                let same = root
                    .get("initial")
                    .and_then(|t| t.get("kind"))
                    .is_some_and(|k| *k == value);
                if !same {
                    root.insert("initial".into(), toml::Value::Table(toml::Table::new()));
                }
            }
            set_dotted(&mut root, key, value)?;
        }
        let text = toml::to_string(&root).expect("a table always serializes");
        toml::from_str(&text).map_err(|e| {
            let keys: Vec<&str> = overrides.iter().map(|(k, _)| k.as_str()).collect();
            CliError::Config(format!("after overrides {}: {}", keys.join(", "), e.message()))
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn model(&self) -> Model {
        self.params.model.into()
    }

    pub fn is_thermal(&self) -> bool {
        matches!(self.initial, InitialSection::Thermal { .. })
    }

    /// Validates the scenario and picks a truncation.
    pub fn resolve(&self) -> CliResult<Resolved> {
        let p = &self.params;
        let model = self.model();
        let params = match p.omega0 {
            Some(w0) => LZParams::with_bias(p.v, p.delta, p.omega, w0, model),
            None => LZParams::new(p.v, p.delta, p.omega, model),
        }
        .map_err(CliError::setup)?;
        let integrator = self.integrator.to_core();
        integrator.validate().map_err(CliError::setup)?;
        let outputs = self.outputs()?;
        let truncation = self.truncation_spec()?;
        Ok(Resolved {
            params,
            integrator,
            truncation,
            outputs,
        })
    }

    /// Requested observables in canonical column order.
    pub fn outputs(&self) -> CliResult<Vec<Observable>> {
        let thermal = self.is_thermal();
        let mut out = match &self.outputs {
            Some(list) => {
                if list.is_empty() {
                    return Err(CliError::Config("outputs: empty list".into()));
                }
                if thermal && list.contains(&Observable::El) {
                    return Err(CliError::Config(
                        "outputs: e_l is undefined for a thermal ensemble".into(),
                    ));
                }
                list.clone()
            }
            None => Observable::DEFAULT
                .into_iter()
                .filter(|o| !(thermal && *o == Observable::El))
                .collect(),
        };
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn truncation_spec(&self) -> CliResult<TruncationSpec> {
        let tol = self.truncation.tail_tol;
        let spec = match (self.truncation.n_max, &self.initial) {
            (NMax::Fixed(n), _) => TruncationSpec::new(n, tol),
            (NMax::Auto, InitialSection::Cat { alpha2, theta }) => {
                if !(*alpha2 >= 0.0 && alpha2.is_finite()) {
                    return Err(CliError::Config(format!(
                        "initial.alpha2 must be finite and >= 0, got {alpha2}"
                    )));
                }
                cat_truncation(alpha2.sqrt(), *theta, tol)
            }
            (NMax::Auto, InitialSection::Fock { n }) => {
                TruncationSpec::new(n + lzcat::fockspace::TRUNCATION_PAD, tol)
            }
            (NMax::Auto, InitialSection::Thermal { temperature }) => {
                if !(*temperature >= 0.0 && temperature.is_finite()) {
                    return Err(CliError::Config(format!(
                        "initial.temperature must be finite and >= 0, got {temperature}"
                    )));
                }
                choose_truncation_geometric(thermal_mean_photon(self.params.omega, *temperature), tol)
            }
        };
        spec.map_err(CliError::setup)
    }
}

fn set_dotted(root: &mut toml::Table, key: &str, value: toml::Value) -> CliResult<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("malformed override key '{key}'")));
    }
    let (last, path) = parts.split_last().expect("split yields one part");
    let mut table = root;
    for part in path {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override '{key}': '{part}' is not a section")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("x = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("x"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn default_model() -> ModelName {
    ModelName::Rwa
}
fn one() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    0.5
}
fn default_omega() -> f64 {
    10.0
}
fn default_theta() -> f64 {
    FRAC_PI_2
}
fn default_t0() -> f64 {
    IntegratorConfig::default().t0
}
fn default_t1() -> f64 {
    IntegratorConfig::default().t1
}
fn default_rel_tol() -> f64 {
    IntegratorConfig::default().rel_tol
}
fn default_abs_tol() -> f64 {
    IntegratorConfig::default().abs_tol
}
fn default_samples() -> usize {
    IntegratorConfig::default().sample_count
}
fn default_nmax() -> NMax {
    NMax::Auto
}
fn default_tail_tol() -> f64 {
    1e-12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_takes_defaults() {
        let cfg = ScenarioConfig::from_toml("", &[]).unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        let r = cfg.resolve().unwrap();
        assert_eq!(r.params.model(), Model::Rwa);
        assert_eq!(r.integrator, IntegratorConfig::default());
        assert_eq!(r.outputs, Observable::DEFAULT.to_vec());
    }

    #[test]
    fn full_document_round_trips() {
        let text = r#"
outputs = ["nbar", "p_lz"]

[params]
model = "full"
delta = 0.1
omega = 20.0

[initial]
kind = "thermal"
temperature = 20.0

[integrator]
t0 = -30.0
samples = 11

[truncation]
n_max = 40
"#;
        let cfg = ScenarioConfig::from_toml(text, &[]).unwrap();
        assert_eq!(cfg.initial, InitialSection::Thermal { temperature: 20.0 });
        assert_eq!(cfg.truncation.n_max, NMax::Fixed(40));
        let r = cfg.resolve().unwrap();
        assert_eq!(r.outputs, vec![Observable::PLz, Observable::Nbar]);
        assert_eq!(r.truncation.n_max(), 40);
        let back = ScenarioConfig::from_toml(&cfg.to_toml(), &[]).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = ScenarioConfig::from_toml("[params]\ndelta = \"x\"\n", &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert_eq!(err.exit_code(), 2);
        let err = ScenarioConfig::from_toml("[params]\ndleta = 1.0\n", &[]).unwrap_err();
        assert!(err.to_string().contains("dleta"));
    }

    #[test]
    fn overrides_replace_nested_keys() {
        let o = |k: &str, v: &str| (k.to_string(), v.to_string());
        let cfg = ScenarioConfig::from_toml(
            "",
            &[
                o("params.model", "full"),
                o("initial.kind", "fock"),
                o("initial.n", "3"),
                o("truncation.n_max", "auto"),
                o("integrator.t1", "12.5"),
            ],
        )
        .unwrap();
        assert_eq!(cfg.model(), Model::Full);
        assert_eq!(cfg.initial, InitialSection::Fock { n: 3 });
        assert_eq!(cfg.integrator.t1, 12.5);
        let missing = ScenarioConfig::from_toml("", &[o("initial.kind", "fock")]);
        assert!(missing.is_err());
        let stale = ScenarioConfig::from_toml("", &[o("initial.n", "1")]);
        assert!(stale.is_err());
        assert!(ScenarioConfig::from_toml("", &[o("params.nope", "1")]).is_err());
    }

    #[test]
    fn thermal_rejects_entropy_output() {
        let text = "outputs = [\"e_l\"]\n[initial]\nkind = \"thermal\"\ntemperature = 1.0\n";
        let err = ScenarioConfig::from_toml(text, &[]).unwrap().resolve().unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        let cfg = ScenarioConfig::from_toml("[initial]\nkind = \"thermal\"\ntemperature = 1.0\n", &[]).unwrap();
        assert!(!cfg.resolve().unwrap().outputs.contains(&Observable::El));
    }

    #[test]
    fn invalid_physics_is_a_config_error() {
        let err = ScenarioConfig::from_toml("[params]\nv = -1.0\n", &[]).unwrap().resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = ScenarioConfig::from_toml("[integrator]\nt0 = 5.0\nt1 = 1.0\n", &[])
            .unwrap()
            .resolve()
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn sweep_points() {
        let s = SweepSection {
            axis: Axis::Theta,
            values: None,
            linspace: Some((0.0, 1.0, 5)),
        };
        assert_eq!(s.points().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let both = SweepSection {
            values: Some(vec![1.0]),
            ..s.clone()
        };
        assert!(both.points().is_err());
        assert_eq!("T".parse::<Axis>().unwrap(), Axis::Temperature);
        assert!("beta".parse::<Axis>().is_err());
    }
}
