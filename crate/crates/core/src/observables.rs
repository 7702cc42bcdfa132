//! Physical quantities extracted from joint states: transition probability,
//! the reduced two-level density matrix, linear entropy and photon
//! statistics.

use num_complex::Complex64;

use crate::error::{LzError, Result};
use crate::fockspace::JointState;

/// Reduced density matrix of the two-level system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedTLS {
    pub rho_uu: f64,
    pub rho_dd: f64,
    pub rho_ud: Complex64,
}

/// Population of the initially empty level, `Σ_n |down_n|²`.
pub fn p_lz(state: &JointState) -> f64 {
    sum_sqr(state.down())
}

/// Partial trace over the photon mode.
pub fn reduce_tls(state: &JointState) -> ReducedTLS {
    reduce_slices(state.up(), state.down())
}

/// `1 − Tr ρ²`.
pub fn linear_entropy(rho: &ReducedTLS) -> f64 {
    let tr = rho.rho_uu * rho.rho_uu + rho.rho_dd * rho.rho_dd + 2.0 * rho.rho_ud.norm_sqr();
    (1.0 - tr).max(0.0)
}

/// `(⟨n̂⟩, ⟨n̂²⟩)`.
pub fn photon_moments(state: &JointState) -> (f64, f64) {
    moments_slices(state.up(), state.down())
}

/// Weighted moments of a statistical mixture.
pub fn ensemble_photon_moments(weights: &[f64], states: &[JointState]) -> Result<(f64, f64)> {
    if weights.len() != states.len() {
        return Err(LzError::DimensionMismatch {
            expected: weights.len(),
            found: states.len(),
        });
    }
    Ok(weights
        .iter()
        .zip(states)
        .fold((0.0, 0.0), |(a, b), (w, s)| {
            let (n1, n2) = photon_moments(s);
            (a + w * n1, b + w * n2)
        }))
}

/// `Q = (⟨n²⟩ − n̄²)/n̄ − 1`; `None` when `n̄ = 0`.
pub fn mandel_q(nbar: f64, n2: f64) -> Option<f64> {
    (nbar > 0.0).then(|| (n2 - nbar * nbar) / nbar - 1.0)
}

/// `⟨a†a + σz/2⟩`, conserved by the rotating-wave Hamiltonian.
pub fn total_number(state: &JointState) -> f64 {
    let up: f64 = state
        .up()
        .iter()
        .enumerate()
        .map(|(n, c)| (n as f64 + 0.5) * c.norm_sqr())
        .sum();
    let down: f64 = state
        .down()
        .iter()
        .enumerate()
        .map(|(n, c)| (n as f64 - 0.5) * c.norm_sqr())
        .sum();
    up + down
}

/// Applies `exp(iωt N̂)`, the change between lab and rotating frames.
pub fn frame_rotate(state: &JointState, omega: f64, t: f64) -> JointState {
    let phase = |x: f64| Complex64::from_polar(1.0, omega * t * x);
    let up: Vec<Complex64> = state
        .up()
        .iter()
        .enumerate()
        .map(|(n, c)| c * phase(n as f64 + 0.5))
        .collect();
    let down: Vec<Complex64> = state
        .down()
        .iter()
        .enumerate()
        .map(|(n, c)| c * phase(n as f64 - 0.5))
        .collect();
    JointState::new(&up, &down, state.t()).expect("same shape as the input state")
}

fn sum_sqr(c: &[Complex64]) -> f64 {
    c.iter().map(|x| x.norm_sqr()).sum()
}

fn reduce_slices(up: &[Complex64], down: &[Complex64]) -> ReducedTLS {
    ReducedTLS {
        rho_uu: sum_sqr(up),
        rho_dd: sum_sqr(down),
        rho_ud: up.iter().zip(down).map(|(u, d)| u * d.conj()).sum(),
    }
}

fn moments_slices(up: &[Complex64], down: &[Complex64]) -> (f64, f64) {
    let mut n1 = 0.0;
    let mut n2 = 0.0;
    for (n, (u, d)) in up.iter().zip(down).enumerate() {
        let w = u.norm_sqr() + d.norm_sqr();
        let n = n as f64;
        n1 += n * w;
        n2 += n * n * w;
    }
    (n1, n2)
}

/// Observables of one sampled state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRow {
    pub t: f64,
    pub p_lz: f64,
    pub e_l: f64,
    pub q: Option<f64>,
    pub nbar: f64,
    pub n2: f64,
    pub norm: f64,
    pub rho_ud_abs: f64,
}

impl ObservableRow {
    /// From a packed `[up…, down…]` amplitude vector.
    pub fn from_packed(t: f64, packed: &[Complex64]) -> Self {
        let (up, down) = packed.split_at(packed.len() / 2);
        let rho = reduce_slices(up, down);
        let (nbar, n2) = moments_slices(up, down);
        ObservableRow {
            t,
            p_lz: rho.rho_dd,
            e_l: linear_entropy(&rho),
            q: mandel_q(nbar, n2),
            nbar,
            n2,
            norm: rho.rho_uu + rho.rho_dd,
            rho_ud_abs: rho.rho_ud.norm(),
        }
    }

    pub fn from_state(state: &JointState) -> Self {
        Self::from_packed(state.t(), state.packed())
    }
}

/// Aligned time series of observables. Undefined entries are `NaN`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableSeries {
    pub t: Vec<f64>,
    pub p_lz: Vec<f64>,
    pub e_l: Vec<f64>,
    pub q: Vec<f64>,
    pub nbar: Vec<f64>,
    pub n2: Vec<f64>,
    pub norm: Vec<f64>,
    /// `|ρ_ud|`, kept for the parity diagnostics.
    pub rho_ud_abs: Vec<f64>,
}

impl ObservableSeries {
    pub fn with_capacity(n: usize) -> Self {
        ObservableSeries {
            t: Vec::with_capacity(n),
            p_lz: Vec::with_capacity(n),
            e_l: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            nbar: Vec::with_capacity(n),
            n2: Vec::with_capacity(n),
            norm: Vec::with_capacity(n),
            rho_ud_abs: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, row: ObservableRow) {
        self.t.push(row.t);
        self.p_lz.push(row.p_lz);
        self.e_l.push(row.e_l);
        self.q.push(row.q.unwrap_or(f64::NAN));
        self.nbar.push(row.nbar);
        self.n2.push(row.n2);
        self.norm.push(row.norm);
        self.rho_ud_abs.push(row.rho_ud_abs);
    }

    pub fn from_states(states: &[JointState]) -> Self {
        let mut s = Self::with_capacity(states.len());
        for st in states {
            s.push(ObservableRow::from_state(st));
        }
        s
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Weighted average of member series on a common grid. Linear entropy
    /// and `|ρ_ud|` are undefined for a mixture; Q follows from the
    /// averaged moments.
    pub fn mixture(members: &[(f64, &ObservableSeries)]) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(LzError::InvalidArgument("empty ensemble".into()));
        };
        let len = first.len();
        for (_, m) in members {
            if m.len() != len || m.t != first.t {
                return Err(LzError::DimensionMismatch {
                    expected: len,
                    found: m.len(),
                });
            }
        }
        let wsum = |f: fn(&ObservableSeries) -> &Vec<f64>| -> Vec<f64> {
            (0..len)
                .map(|i| members.iter().map(|(w, m)| w * f(m)[i]).sum())
                .collect()
        };
        let nbar = wsum(|m| &m.nbar);
        let n2 = wsum(|m| &m.n2);
        let q = nbar
            .iter()
            .zip(&n2)
            .map(|(&a, &b)| mandel_q(a, b).unwrap_or(f64::NAN))
            .collect();
        Ok(ObservableSeries {
            t: first.t.clone(),
            p_lz: wsum(|m| &m.p_lz),
            e_l: vec![f64::NAN; len],
            q,
            nbar,
            n2,
            norm: wsum(|m| &m.norm),
            rho_ud_abs: vec![f64::NAN; len],
        })
    }

    /// Largest `|norm(t) − norm(t0)|`.
    pub fn norm_drift(&self) -> f64 {
        let Some(&n0) = self.norm.first() else {
            return 0.0;
        };
        self.norm.iter().map(|n| (n - n0).abs()).fold(0.0, f64::max)
    }

    pub fn final_p_lz(&self) -> f64 {
        final_mean(&self.p_lz)
    }

    pub fn final_e_l(&self) -> f64 {
        final_mean(&self.e_l)
    }

    pub fn final_q(&self) -> f64 {
        final_mean(&self.q)
    }

    pub fn final_nbar(&self) -> f64 {
        final_mean(&self.nbar)
    }

    pub fn final_n2(&self) -> f64 {
        final_mean(&self.n2)
    }
}

/// Mean over the last 10% of samples (at least one).
pub fn final_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let k = (values.len() / 10).max(1);
    let tail = &values[values.len() - k..];
    tail.iter().sum::<f64>() / k as f64
}

/// Mean of `values` over samples with `t_lo ≤ t ≤ t_hi`.
pub fn window_mean(t: &[f64], values: &[f64], t_lo: f64, t_hi: f64) -> f64 {
    let (s, k) = t
        .iter()
        .zip(values)
        .filter(|(&ti, _)| ti >= t_lo && ti <= t_hi)
        .fold((0.0, 0usize), |(s, k), (_, &v)| (s + v, k + 1));
    if k == 0 {
        f64::NAN
    } else {
        s / k as f64
    }
}

/// Centred moving average over `window` samples; entries without a full
/// window are `NaN`.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    let half = w / 2;
    let mut out = vec![f64::NAN; values.len()];
    if values.len() < w {
        return out;
    }
    let mut acc: f64 = values[..w].iter().sum();
    for start in 0..=values.len() - w {
        if start > 0 {
            acc += values[start + w - 1] - values[start - 1];
        }
        out[start + half] = acc / w as f64;
    }
    out
}
