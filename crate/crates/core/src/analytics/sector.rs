//! Exact solution of one rotating-wave sector `{|↑,n⟩, |↓,n+1⟩}` in terms of
//! parabolic cylinder functions.
//!
//! With `Z_t = −e^{iπ/4}√v (t − t_b)` and `δ_n = Δ²(n+1)/(4v)`,
//! `A_n(t) = μ₊ D_{−1−iδ}(Z_t) + μ₋ D_{−1−iδ}(−Z_t)` and
//! `B_n(t) = ν₊ D_{−iδ}(Z_t) + ν₋ D_{−iδ}(−Z_t)`, `ν± = ±μ± e^{−iπ/4}/√δ`.
//! `t_b = δω/v` is the resonance time for a detuned mode.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use super::pcf::pcf_d;
use crate::error::{LzError, Result};
use crate::hamiltonians::{LZParams, Model};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorCoefficients {
    pub n: usize,
    pub delta_n: f64,
    pub mu_plus: Complex64,
    pub mu_minus: Complex64,
    pub nu_plus: Complex64,
    pub nu_minus: Complex64,
    sqrt_v: f64,
    t_bias: f64,
}

impl SectorCoefficients {
    /// Coefficients for amplitudes `(a0, b0)` on `(|↑,n⟩, |↓,n+1⟩)` at `t0`.
    pub fn new(
        n: usize,
        params: &LZParams,
        t0: f64,
        a0: Complex64,
        b0: Complex64,
    ) -> Result<Self> {
        if params.model() != Model::Rwa {
            return Err(LzError::Unsupported(
                "the sector solution exists only in the rotating-wave model".into(),
            ));
        }
        let v = params.v();
        let delta_n = params.delta().powi(2) * (n as f64 + 1.0) / (4.0 * v);
        if delta_n <= 0.0 {
            return Err(LzError::InvalidArgument(
                "the sector solution needs a non-zero coupling".into(),
            ));
        }
        let sqrt_v = v.sqrt();
        let t_bias = params.detuning() / v;
        let (da, db) = orders(delta_n);
        let z0 = zeta(sqrt_v, t0 - t_bias);
        let k = kappa(delta_n);

        // [ D_a(z0)      D_a(−z0)     ] [μ₊]   [a0]
        // [ k D_b(z0)    −k D_b(−z0)  ] [μ₋] = [b0]
        let m11 = pcf_d(da, z0)?;
        let m12 = pcf_d(da, -z0)?;
        let m21 = k * pcf_d(db, z0)?;
        let m22 = -k * pcf_d(db, -z0)?;
        let det = m11 * m22 - m12 * m21;
        if det.norm() == 0.0 {
            return Err(LzError::InvalidArgument(
                "singular Wronskian for the sector basis".into(),
            ));
        }
        let mu_plus = (a0 * m22 - m12 * b0) / det;
        let mu_minus = (m11 * b0 - m21 * a0) / det;
        Ok(SectorCoefficients {
            n,
            delta_n,
            mu_plus,
            mu_minus,
            nu_plus: mu_plus * k,
            nu_minus: -mu_minus * k,
            sqrt_v,
            t_bias,
        })
    }

    /// `(A_n(t), B_n(t))`.
    pub fn amplitudes(&self, t: f64) -> Result<(Complex64, Complex64)> {
        let (da, db) = orders(self.delta_n);
        let z = zeta(self.sqrt_v, t - self.t_bias);
        let a = self.mu_plus * pcf_d(da, z)? + self.mu_minus * pcf_d(da, -z)?;
        let b = self.nu_plus * pcf_d(db, z)? + self.nu_minus * pcf_d(db, -z)?;
        Ok((a, b))
    }
}

/// Amplitudes at `t` of sector `n` prepared in `|↑,n⟩` at `t0`.
pub fn sector_coeffs_analytic(
    n: usize,
    params: &LZParams,
    t: f64,
    t0: f64,
) -> Result<(Complex64, Complex64)> {
    SectorCoefficients::new(n, params, t0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))?
        .amplitudes(t)
}

fn orders(delta_n: f64) -> (Complex64, Complex64) {
    (Complex64::new(-1.0, -delta_n), Complex64::new(0.0, -delta_n))
}

fn zeta(sqrt_v: f64, t: f64) -> Complex64 {
    -Complex64::from_polar(sqrt_v * t, FRAC_PI_4)
}

fn kappa(delta_n: f64) -> Complex64 {
    Complex64::from_polar(1.0 / delta_n.sqrt(), -FRAC_PI_4)
}
