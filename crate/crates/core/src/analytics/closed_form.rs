//! Closed-form transition probabilities and asymptotic photon statistics.
//!
//! `P = exp(−πΔ²/(2v))` is the survival probability of `|↑,0⟩`; sector `n`
//! survives with `P^{n+1}`. For cat states `a = |α|²` and `c = cos θ`.

use std::f64::consts::PI;

use crate::error::{LzError, Result};
use crate::fockspace::{make_cat, thermal_mean_photon, TruncationSpec};
use crate::hamiltonians::{independence_check, LZParams, Model};
use crate::observables::mandel_q;

/// Parameters shared by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormInputs {
    pub alpha2: f64,
    pub theta: f64,
    pub delta: f64,
    pub v: f64,
    pub omega: f64,
    pub temperature: f64,
}

impl ClosedFormInputs {
    /// Cat-state inputs with `v = 1`, `ω = 10`, `T = 0`.
    pub fn cat(alpha2: f64, theta: f64, delta: f64) -> Self {
        ClosedFormInputs {
            alpha2,
            theta,
            delta,
            v: 1.0,
            omega: 10.0,
            temperature: 0.0,
        }
    }

    /// Thermal inputs with `v = 1`.
    pub fn thermal(delta: f64, omega: f64, temperature: f64) -> Self {
        ClosedFormInputs {
            alpha2: 0.0,
            theta: 0.0,
            delta,
            v: 1.0,
            omega,
            temperature,
        }
    }

    pub fn with_v(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(LzError::InvalidArgument(what.to_string()));
        if !(self.alpha2.is_finite() && self.alpha2 >= 0.0) {
            return bad("alpha2 must be finite and non-negative");
        }
        if !self.theta.is_finite() {
            return bad("theta must be finite");
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return bad("delta must be finite and non-negative");
        }
        if !(self.v.is_finite() && self.v > 0.0) {
            return bad("v must be positive");
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return bad("temperature must be non-negative");
        }
        if self.temperature > 0.0 && !(self.omega.is_finite() && self.omega > 0.0) {
            return bad("omega must be positive for a thermal mode");
        }
        Ok(())
    }

    fn p(&self) -> f64 {
        p_up0(self.delta, self.v)
    }
}

/// Survival probability of `|↑,0⟩`, `exp(−πΔ²/(2v))`.
pub fn p_up0(delta: f64, v: f64) -> f64 {
    (-PI * delta * delta / (2.0 * v)).exp()
}

/// Survival probability of `|↑,n⟩` in the rotating-wave model, `P^{n+1}`.
/// Defined for `n ≥ −1`.
pub fn p_up_n(n: i64, delta: f64, v: f64) -> Result<f64> {
    if n < -1 {
        return Err(LzError::InvalidArgument(format!(
            "sector index {n} below -1"
        )));
    }
    Ok(p_up0(delta, v).powi((n + 1) as i32))
}

/// Probability that `|↑,n⟩` ends spin-up after both crossing groups of the
/// full model: `P_{n−1}P_n + (1 − P_{n−1})(1 − P_{n−2})`.
pub fn joint_up_prob(n: usize, delta: f64, v: f64) -> f64 {
    let p = p_up0(delta, v);
    let n = n as i32;
    let first = p.powi(n) * p.powi(n + 1);
    // 1 − P_{−1} = 0 removes the second path for the vacuum.
    let second = if n == 0 {
        0.0
    } else {
        (1.0 - p.powi(n)) * (1.0 - p.powi(n - 1))
    };
    first + second
}

/// Transition probability for an arbitrary photon distribution,
/// `1 − P Σ w_n P^n`.
pub fn plz_fock_avg(weights: &[f64], delta: f64, v: f64) -> f64 {
    let p = p_up0(delta, v);
    let mut pn = p;
    let mut s = 0.0;
    for &w in weights {
        s += w * pn;
        pn *= p;
    }
    1.0 - s
}

/// `(e^{ax} + c e^{−ax}) / (e^a + c e^{−a})`, evaluated without the
/// cancellation at `c → −1`, `a → 0` (limit `x`).
fn cat_ratio(a: f64, one_plus_c: f64, x: f64) -> f64 {
    if a == 0.0 {
        return if one_plus_c < 1e-24 { x } else { 1.0 };
    }
    if a > 30.0 {
        let c = one_plus_c - 1.0;
        return (-a * (1.0 - x)).exp() * (1.0 + c * (-2.0 * a * x).exp())
            / (1.0 + c * (-2.0 * a).exp());
    }
    let num = 2.0 * (a * x).sinh() + one_plus_c * (-a * x).exp();
    let den = 2.0 * a.sinh() + one_plus_c * (-a).exp();
    num / den
}

/// `(e^{ax} − c e^{−ax}) / (e^a + c e^{−a})`.
fn cat_ratio_minus(a: f64, one_plus_c: f64, x: f64) -> f64 {
    let c = one_plus_c - 1.0;
    if a > 30.0 {
        return (-a * (1.0 - x)).exp() * (1.0 - c * (-2.0 * a * x).exp())
            / (1.0 + c * (-2.0 * a).exp());
    }
    let num = 2.0 * (a * x).cosh() - one_plus_c * (-a * x).exp();
    let den = 2.0 * a.sinh() + one_plus_c * (-a).exp();
    num / den
}

/// `1 + cos θ` computed as `2cos²(θ/2)`.
fn one_plus_cos(theta: f64) -> f64 {
    2.0 * (theta / 2.0).cos().powi(2)
}

/// Rotating-wave transition probability of a cat state,
/// `1 − 2P/(N²e^a)(e^{aP} + cos θ e^{−aP})`.
///
/// `cos θ = 0, 1, −1` dispatch to [`plz_yurke_stoler`], [`plz_even_cat`] and
/// [`plz_odd_cat`].
pub fn plz_cat_rwa(inputs: &ClosedFormInputs) -> Result<f64> {
    inputs.validate()?;
    let (a, d) = (inputs.alpha2, inputs.delta);
    let c = inputs.theta.cos();
    if c.abs() < 1e-12 {
        return Ok(plz_yurke_stoler(a, d, inputs.v));
    }
    if (c - 1.0).abs() < 1e-15 {
        return Ok(plz_even_cat(a, d, inputs.v));
    }
    if (c + 1.0).abs() < 1e-15 {
        return Ok(plz_odd_cat(a, d, inputs.v));
    }
    Ok(plz_cat_rwa_general(a, inputs.theta, d, inputs.v))
}

fn plz_cat_rwa_general(a: f64, theta: f64, delta: f64, v: f64) -> f64 {
    let p = p_up0(delta, v);
    1.0 - p * cat_ratio(a, one_plus_cos(theta), p)
}

/// `θ = π/2`: `1 − P e^{−a(1−P)}`.
pub fn plz_yurke_stoler(alpha2: f64, delta: f64, v: f64) -> f64 {
    let p = p_up0(delta, v);
    1.0 - p * (-alpha2 * (1.0 - p)).exp()
}

/// `θ = 0`: `1 − P cosh(aP)/cosh(a)`.
pub fn plz_even_cat(alpha2: f64, delta: f64, v: f64) -> f64 {
    let p = p_up0(delta, v);
    let a = alpha2;
    let ratio = (-a * (1.0 - p)).exp() * (1.0 + (-2.0 * a * p).exp()) / (1.0 + (-2.0 * a).exp());
    1.0 - p * ratio
}

/// `θ = π`: `1 − P sinh(aP)/sinh(a)`, tending to `1 − P²` as `a → 0`.
pub fn plz_odd_cat(alpha2: f64, delta: f64, v: f64) -> f64 {
    let p = p_up0(delta, v);
    let a = alpha2;
    let ratio = if a == 0.0 {
        p
    } else {
        (-a * (1.0 - p)).exp() * (-(-2.0 * a * p).exp_m1()) / (-(-2.0 * a).exp_m1())
    };
    1.0 - p * ratio
}

/// Full-model estimate with its independence diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoRwaEstimate {
    pub p_lz: f64,
    /// Whether `ω > max(√v/4, |α|Δ)`; the estimate assumes it.
    pub independent_crossings: bool,
}

/// Full-model transition probability of a cat state treating the two
/// crossing groups as independent:
/// `(K/P)[f(P) − f(P²)]`, `f(x) = (1 + x)(e^{ax} + c e^{−ax})`,
/// `K = e^{−a}/(1 + c e^{−2a})`.
pub fn plz_cat_norwa(inputs: &ClosedFormInputs) -> Result<NoRwaEstimate> {
    inputs.validate()?;
    let a = inputs.alpha2;
    let opc = one_plus_cos(inputs.theta);
    let p = inputs.p();
    let kf = |x: f64| (1.0 + x) * cat_ratio(a, opc, x);
    let p_lz = if p > 0.0 {
        (kf(p) - kf(p * p)) / p
    } else {
        // P → 0 limit: r(0) + r'(0)
        let c = opc - 1.0;
        let den = 1.0 + c * (-2.0 * a).exp();
        ((1.0 + c) * (-a).exp() + a * (1.0 - c) * (-a).exp()) / den
    };
    let params = LZParams::new(inputs.v, inputs.delta.max(0.0), inputs.omega, Model::Full)?;
    Ok(NoRwaEstimate {
        p_lz,
        independent_crossings: independence_check(&params, a.sqrt()),
    })
}

/// Sector-by-sector oracle for [`plz_cat_norwa`]:
/// `Σ_n |C_n|² (1 − joint_up_prob(n))` over a truncated cat state.
pub fn plz_cat_norwa_sum(inputs: &ClosedFormInputs, trunc: &TruncationSpec) -> Result<f64> {
    inputs.validate()?;
    let cat = make_cat(inputs.alpha2.sqrt(), inputs.theta, trunc)?;
    Ok(cat
        .probabilities()
        .iter()
        .enumerate()
        .map(|(n, w)| w * (1.0 - joint_up_prob(n, inputs.delta, inputs.v)))
        .sum())
}

/// Rotating-wave transition probability from a thermal mode,
/// `1 − (1 − P₀)/(1 + n̄P₀)` with `P₀ = 1 − P` the bare transition
/// probability.
pub fn plz_thermal_rwa(inputs: &ClosedFormInputs) -> Result<f64> {
    inputs.validate()?;
    let p0 = 1.0 - inputs.p();
    let nbar = thermal_mean_photon(inputs.omega, inputs.temperature);
    Ok(1.0 - (1.0 - p0) / (1.0 + nbar * p0))
}

/// The survival-probability orientation `(1 − P₀)/(1 + n̄P₀)`, the
/// complement of [`plz_thermal_rwa`].
pub fn plz_thermal_rwa_survival(inputs: &ClosedFormInputs) -> Result<f64> {
    Ok(1.0 - plz_thermal_rwa(inputs)?)
}

/// Full-model transition probability from a thermal mode assuming
/// independent crossings: `(G/P)[f(P) − f(P²)]`, `f(x) = (1+x)/(1 − x e^{−ω/T})`,
/// `G = 1 − e^{−ω/T}`. Equal to the thermal average of
/// `1 − joint_up_prob(n)`; tends to `1 − P` as `T → 0`.
pub fn plz_thermal_norwa(inputs: &ClosedFormInputs) -> Result<f64> {
    inputs.validate()?;
    let p = inputs.p();
    let q = boltzmann_ratio(inputs);
    let g = 1.0 - q;
    let f = |x: f64| (1.0 + x) / (1.0 - x * q);
    if p == 0.0 {
        return Ok(g * (1.0 + q));
    }
    Ok(g / p * (f(p) - f(p * p)))
}

/// The variant without the `(1 + x)` factor, `(G/P)[1/(1 − qP) − 1/(1 − qP²)]`.
/// It vanishes at `T = 0` and does not equal the thermal average of the
/// sector probabilities; kept for comparison.
pub fn plz_thermal_norwa_reduced(inputs: &ClosedFormInputs) -> Result<f64> {
    inputs.validate()?;
    let p = inputs.p();
    let q = boltzmann_ratio(inputs);
    let g = 1.0 - q;
    if p == 0.0 {
        return Ok(g * q);
    }
    Ok(g / p * (1.0 / (1.0 - q * p) - 1.0 / (1.0 - q * p * p)))
}

/// Thermal oracle: `Σ_n w_n (1 − joint_up_prob(n))` with the given weights.
pub fn plz_thermal_norwa_sum(weights: &[f64], delta: f64, v: f64) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(n, w)| w * (1.0 - joint_up_prob(n, delta, v)))
        .sum()
}

fn boltzmann_ratio(inputs: &ClosedFormInputs) -> f64 {
    if inputs.temperature == 0.0 {
        0.0
    } else {
        (-inputs.omega / inputs.temperature).exp()
    }
}

/// Photon statistics of a cat state after a completed rotating-wave sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStatsInfinity {
    pub nbar: f64,
    pub n2: f64,
    /// Mandel Q; `None` when `n̄ = 0`.
    pub q: Option<f64>,
}

/// Initial mean photon number of a cat state, `a(1 − c e^{−2a})/(1 + c e^{−2a})`.
pub fn cat_mean_photon(alpha2: f64, theta: f64) -> f64 {
    let a = alpha2;
    let opc = one_plus_cos(theta);
    if a == 0.0 {
        return if opc < 1e-24 { 1.0 } else { 0.0 };
    }
    let e = (-2.0 * a).exp();
    let em1 = -(-2.0 * a).exp_m1();
    let num = em1 + (2.0 - opc) * e;
    let den = em1 + opc * e;
    a * num / den
}

/// `n̄∞ = n̄₀ + P_LZ` and
/// `⟨n²⟩∞ = −4aP²/(N²e^a)(e^{aP} − c e^{−aP}) + a² + 3n̄₀ + P_LZ`.
pub fn photon_stats_infty(inputs: &ClosedFormInputs) -> Result<PhotonStatsInfinity> {
    let p_lz = plz_cat_rwa(inputs)?;
    let a = inputs.alpha2;
    let opc = one_plus_cos(inputs.theta);
    let p = inputs.p();
    let n0 = cat_mean_photon(a, inputs.theta);
    let cross = if a == 0.0 {
        if opc < 1e-24 {
            2.0 * p * p
        } else {
            0.0
        }
    } else {
        2.0 * a * p * p * cat_ratio_minus(a, opc, p)
    };
    let nbar = n0 + p_lz;
    let n2 = -cross + a * a + 3.0 * n0 + p_lz;
    Ok(PhotonStatsInfinity {
        nbar,
        n2,
        q: mandel_q(nbar, n2),
    })
}
