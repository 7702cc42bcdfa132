//! Batch evaluation of the closed forms, optionally against brute-force
//! sums over Fock sectors.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::str::FromStr;

use lzcat::analytics::{
    plz_cat_norwa, plz_cat_norwa_sum, plz_cat_rwa, plz_even_cat, plz_fock_avg, plz_odd_cat,
    plz_thermal_norwa, plz_thermal_norwa_reduced, plz_thermal_norwa_sum, plz_thermal_rwa,
    plz_yurke_stoler, ClosedFormInputs,
};
use lzcat::fockspace::{choose_truncation_geometric, thermal_mean_photon};
use lzcat::{cat_truncation, make_cat, thermal_weights, TruncationSpec};

use crate::error::{CliError, CliResult};
use crate::output::fmt_f64;

/// Tail weight left out of the oracle sums.
const ORACLE_TAIL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// Cat state, rotating wave, any θ.
    CatRwa,
    /// `θ = π/2`.
    YurkeStoler,
    /// `θ = 0`.
    EvenCat,
    /// `θ = π`.
    OddCat,
    /// Cat state, both crossing groups.
    CatFull,
    ThermalRwa,
    ThermalFull,
    /// Thermal full-model expression without the `(1 + x)` factor.
    ThermalFullReduced,
}

impl Formula {
    pub const ALL: [Formula; 8] = [
        Formula::CatRwa,
        Formula::YurkeStoler,
        Formula::EvenCat,
        Formula::OddCat,
        Formula::CatFull,
        Formula::ThermalRwa,
        Formula::ThermalFull,
        Formula::ThermalFullReduced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formula::CatRwa => "cat-rwa",
            Formula::YurkeStoler => "yurke-stoler",
            Formula::EvenCat => "even-cat",
            Formula::OddCat => "odd-cat",
            Formula::CatFull => "cat-full",
            Formula::ThermalRwa => "thermal-rwa",
            Formula::ThermalFull => "thermal-full",
            Formula::ThermalFullReduced => "thermal-full-reduced",
        }
    }

    pub fn is_thermal(self) -> bool {
        matches!(
            self,
            Formula::ThermalRwa | Formula::ThermalFull | Formula::ThermalFullReduced
        )
    }

    /// θ the formula is pinned to, if any.
    pub fn fixed_theta(self) -> Option<f64> {
        match self {
            Formula::YurkeStoler => Some(FRAC_PI_2),
            Formula::EvenCat => Some(0.0),
            Formula::OddCat => Some(PI),
            _ => None,
        }
    }

    pub fn evaluate(self, inp: &ClosedFormInputs) -> CliResult<f64> {
        let (a, d, v) = (inp.alpha2, inp.delta, inp.v);
        let r = match self {
            Formula::CatRwa => plz_cat_rwa(inp),
            Formula::YurkeStoler => Ok(plz_yurke_stoler(a, d, v)),
            Formula::EvenCat => Ok(plz_even_cat(a, d, v)),
            Formula::OddCat => Ok(plz_odd_cat(a, d, v)),
            Formula::CatFull => plz_cat_norwa(inp).map(|e| e.p_lz),
            Formula::ThermalRwa => plz_thermal_rwa(inp),
            Formula::ThermalFull => plz_thermal_norwa(inp),
            Formula::ThermalFullReduced => plz_thermal_norwa_reduced(inp),
        };
        r.map_err(CliError::setup)
    }

    /// Brute-force sum over Fock sectors; `None` when the formula has no
    /// sector-sum counterpart.
    pub fn oracle(self, inp: &ClosedFormInputs) -> CliResult<Option<f64>> {
        let value = match self {
            Formula::CatRwa | Formula::YurkeStoler | Formula::EvenCat | Formula::OddCat => {
                let trunc = cat_oracle_truncation(inp)?;
                let cat = make_cat(inp.alpha2.sqrt(), inp.theta, &trunc).map_err(CliError::setup)?;
                Some(plz_fock_avg(&cat.probabilities(), inp.delta, inp.v))
            }
            Formula::CatFull => {
                let trunc = cat_oracle_truncation(inp)?;
                Some(plz_cat_norwa_sum(inp, &trunc).map_err(CliError::setup)?)
            }
            Formula::ThermalRwa => Some(plz_fock_avg(&thermal_oracle_weights(inp)?, inp.delta, inp.v)),
            Formula::ThermalFull => Some(plz_thermal_norwa_sum(
                &thermal_oracle_weights(inp)?,
                inp.delta,
                inp.v,
            )),
            Formula::ThermalFullReduced => None,
        };
        Ok(value)
    }
}

impl FromStr for Formula {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Formula::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Formula::ALL.iter().map(|f| f.name()).collect();
                format!("unknown formula '{s}', expected one of {}", names.join(", "))
            })
    }
}

fn cat_oracle_truncation(inp: &ClosedFormInputs) -> CliResult<TruncationSpec> {
    let t = cat_truncation(inp.alpha2.sqrt(), inp.theta, ORACLE_TAIL).map_err(CliError::setup)?;
    TruncationSpec::new(2 * t.n_max() + 20, ORACLE_TAIL).map_err(CliError::setup)
}

fn thermal_oracle_weights(inp: &ClosedFormInputs) -> CliResult<Vec<f64>> {
    let nbar = thermal_mean_photon(inp.omega, inp.temperature);
    let trunc = choose_truncation_geometric(nbar, ORACLE_TAIL).map_err(CliError::setup)?;
    thermal_weights(inp.omega, inp.temperature, &trunc).map_err(CliError::setup)
}

/// Grid of inputs; the table is the Cartesian product of all lists.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticQuery {
    pub formula: Formula,
    pub alpha2: Vec<f64>,
    pub theta: Vec<f64>,
    pub delta: Vec<f64>,
    pub v: Vec<f64>,
    pub omega: Vec<f64>,
    pub temperature: Vec<f64>,
    pub oracle: bool,
}

impl AnalyticQuery {
    pub fn new(formula: Formula) -> Self {
        AnalyticQuery {
            formula,
            alpha2: vec![1.0],
            theta: vec![formula.fixed_theta().unwrap_or(FRAC_PI_2)],
            delta: vec![0.5],
            v: vec![1.0],
            omega: vec![10.0],
            temperature: vec![if formula.is_thermal() { 10.0 } else { 0.0 }],
            oracle: false,
        }
    }

    fn inputs(&self) -> Vec<ClosedFormInputs> {
        let mut out = Vec::new();
        for &alpha2 in &self.alpha2 {
            for &theta in &self.theta {
                for &delta in &self.delta {
                    for &v in &self.v {
                        for &omega in &self.omega {
                            for &temperature in &self.temperature {
                                out.push(ClosedFormInputs {
                                    alpha2,
                                    theta: self.formula.fixed_theta().unwrap_or(theta),
                                    delta,
                                    v,
                                    omega,
                                    temperature,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRow {
    pub inputs: ClosedFormInputs,
    pub value: f64,
    pub oracle: Option<f64>,
}

impl AnalyticRow {
    pub fn abs_diff(&self) -> Option<f64> {
        self.oracle.map(|o| (o - self.value).abs())
    }
}

pub fn evaluate(q: &AnalyticQuery) -> CliResult<Vec<AnalyticRow>> {
    q.inputs()
        .into_iter()
        .map(|inputs| {
            let value = q.formula.evaluate(&inputs)?;
            let oracle = if q.oracle {
                q.formula.oracle(&inputs)?
            } else {
                None
            };
            Ok(AnalyticRow {
                inputs,
                value,
                oracle,
            })
        })
        .collect()
}

/// Tab-separated table with a header row.
pub fn format_tsv(formula: Formula, rows: &[AnalyticRow], oracle: bool) -> String {
    let mut s = String::from("formula\talpha2\ttheta\tdelta\tv\tomega\tT\tvalue");
    if oracle {
        s.push_str("\toracle\tabs_diff");
    }
    s.push('\n');
    for r in rows {
        let i = &r.inputs;
        let _ = write!(s, "{}", formula.name());
        for x in [i.alpha2, i.theta, i.delta, i.v, i.omega, i.temperature, r.value] {
            let _ = write!(s, "\t{}", fmt_f64(x));
        }
        if oracle {
            let o = r.oracle.unwrap_or(f64::NAN);
            let d = r.abs_diff().unwrap_or(f64::NAN);
            let _ = write!(s, "\t{}\t{}", fmt_f64(o), fmt_f64(d));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Formula::ALL {
            assert_eq!(f.name().parse::<Formula>().unwrap(), f);
        }
        assert!("no-such-formula".parse::<Formula>().is_err());
    }

    #[test]
    fn general_cat_at_right_angle_equals_specialisation() {
        let mut q = AnalyticQuery::new(Formula::CatRwa);
        q.alpha2 = vec![0.0, 0.5, 1.0, 2.0, 4.0];
        let general = evaluate(&q).unwrap();
        q.formula = Formula::YurkeStoler;
        let special = evaluate(&q).unwrap();
        for (g, s) in general.iter().zip(&special) {
            assert!((g.value - s.value).abs() <= 1e-15);
        }
        assert!((general[2].value - 0.512_013_323_152_136).abs() < 1e-12);
    }

    #[test]
    fn oracles_agree() {
        for f in Formula::ALL {
            let mut q = AnalyticQuery::new(f);
            q.alpha2 = vec![0.0, 1.0, 3.0];
            q.theta = vec![0.4, 2.0];
            q.temperature = if f.is_thermal() { vec![0.0, 1.0, 10.0] } else { vec![0.0] };
            q.oracle = true;
            for r in evaluate(&q).unwrap() {
                match r.abs_diff() {
                    Some(d) => assert!(d <= 1e-12, "{}: {d}", f.name()),
                    None => assert_eq!(f, Formula::ThermalFullReduced),
                }
            }
        }
    }

    #[test]
    fn tsv_layout() {
        let mut q = AnalyticQuery::new(Formula::ThermalFullReduced);
        q.oracle = true;
        let text = format_tsv(q.formula, &evaluate(&q).unwrap(), true);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split('\t').count(), 10);
        assert!(lines[1].ends_with("NaN\tNaN"));
    }
}
