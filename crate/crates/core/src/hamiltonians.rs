//! Time-dependent Hamiltonians of the swept two-level system coupled to one
//! photon mode, their instantaneous spectra and crossing-time diagnostics.
//!
//! All energies are in units of `√v`, times in `1/√v`, `ħ = 1`.
//!
//! * [`Model::Rwa`] is the Jaynes-Cummings form in the frame rotating at `ω`:
//!   `H = −(vt − δω)/2 σz − Δ/2 (a σ+ + a† σ−)`.
//! * [`Model::Full`] is the lab-frame Hamiltonian with counter-rotating terms:
//!   `H = (ω0 − vt)/2 σz + ω a†a − Δ/2 σx (a + a†)`.
//!
//! Both are real symmetric in the `{|↑,n⟩, |↓,n⟩}` basis and banded, so
//! evolution applies them matrix-free.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{LzError, Result};
use crate::fockspace::{JointState, TruncationSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Rotating-wave (Jaynes-Cummings) coupling only.
    Rwa,
    /// Full dipole coupling including counter-rotating terms.
    Full,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Rwa => "rwa",
            Model::Full => "full",
        })
    }
}

impl std::str::FromStr for Model {
    type Err = LzError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rwa" => Ok(Model::Rwa),
            "full" => Ok(Model::Full),
            other => Err(LzError::InvalidArgument(format!(
                "unknown model '{other}', expected 'rwa' or 'full'"
            ))),
        }
    }
}

/// Sweep and coupling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LZParams {
    v: f64,
    delta: f64,
    omega: f64,
    omega0: f64,
    model: Model,
}

impl LZParams {
    /// Resonant parameters, `ω0 = ω`.
    pub fn new(v: f64, delta: f64, omega: f64, model: Model) -> Result<Self> {
        Self::with_bias(v, delta, omega, omega, model)
    }

    /// Explicit two-level bias `ω0`. A detuning is only accepted for the
    /// rotating-wave model, where it shifts the crossing to `t = δω/v`.
    pub fn with_bias(v: f64, delta: f64, omega: f64, omega0: f64, model: Model) -> Result<Self> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(LzError::InvalidArgument(format!("sweep velocity must be > 0, got {v}")));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(LzError::InvalidArgument(format!("coupling must be >= 0, got {delta}")));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(LzError::InvalidArgument(format!("frequency must be > 0, got {omega}")));
        }
        if !omega0.is_finite() {
            return Err(LzError::InvalidArgument(format!("non-finite bias {omega0}")));
        }
        if model == Model::Full && omega0 != omega {
            return Err(LzError::Unsupported(
                "detuned sweeps are only supported in the rotating-wave model".into(),
            ));
        }
        Ok(Self {
            v,
            delta,
            omega,
            omega0,
            model,
        })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// `δω = ω0 − ω`.
    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega
    }

    pub fn with_model(self, model: Model) -> Result<Self> {
        Self::with_bias(self.v, self.delta, self.omega, self.omega0, model)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::with_bias(self.v, delta, self.omega, self.omega0, self.model)
    }

    /// Changes `ω`, keeping the system resonant.
    pub fn with_omega(self, omega: f64) -> Result<Self> {
        let omega0 = omega + self.detuning();
        Self::with_bias(self.v, self.delta, omega, omega0, self.model)
    }

    /// Diagonal energies of `|↑,n⟩` and `|↓,n⟩`.
    #[inline]
    fn diagonal(&self, t: f64, n: usize) -> (f64, f64) {
        match self.model {
            Model::Rwa => {
                let bias = 0.5 * (self.v * t - self.detuning());
                (-bias, bias)
            }
            Model::Full => {
                let bias = 0.5 * (self.omega0 - self.v * t);
                let photons = self.omega * n as f64;
                (bias + photons, -bias + photons)
            }
        }
    }

    /// Writes `−i H(t) ψ` for the packed amplitudes `psi` into `out`.
    ///
    /// `psi` and `out` use the [`JointState`] layout and must have equal,
    /// even length.
    pub fn apply_packed(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(psi.len(), out.len());
        let levels = psi.len() / 2;
        let (up, down) = psi.split_at(levels);
        let (out_up, out_down) = out.split_at_mut(levels);
        let g = 0.5 * self.delta;
        let full = self.model == Model::Full;
        let minus_i = Complex64::new(0.0, -1.0);

        for n in 0..levels {
            let (e_up, e_down) = self.diagonal(t, n);
            let sqrt_n = (n as f64).sqrt();
            let sqrt_n1 = ((n + 1) as f64).sqrt();

            // ⟨↑,n|H|ψ⟩: a σ+ takes |↓,n+1⟩ → |↑,n⟩; a† σ+ takes |↓,n−1⟩ → |↑,n⟩
            let mut h_up = up[n] * e_up;
            if n + 1 < levels {
                h_up -= down[n + 1] * (g * sqrt_n1);
            }
            if full && n >= 1 {
                h_up -= down[n - 1] * (g * sqrt_n);
            }

            // ⟨↓,n|H|ψ⟩
            let mut h_down = down[n] * e_down;
            if n >= 1 {
                h_down -= up[n - 1] * (g * sqrt_n);
            }
            if full && n + 1 < levels {
                h_down -= up[n + 1] * (g * sqrt_n1);
            }

            out_up[n] = minus_i * h_up;
            out_down[n] = minus_i * h_down;
        }
    }

    /// Writes `−i H_I(t) ψ` in the frame rotating with `ω(a†a + σz/2)`.
    ///
    /// The rotating-wave Hamiltonian commutes with that generator and is
    /// returned unchanged. In the full model the counter-rotating pairs pick
    /// up `e^{±2iωt}` and the `ωn` growth of the diagonal disappears.
    /// Lab amplitudes map to this frame through
    /// [`frame_rotate`](crate::observables::frame_rotate).
    pub fn apply_packed_rotating(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        if self.model == Model::Rwa {
            return self.apply_packed(t, psi, out);
        }
        debug_assert_eq!(psi.len(), out.len());
        let levels = psi.len() / 2;
        let (up, down) = psi.split_at(levels);
        let (out_up, out_down) = out.split_at_mut(levels);
        let g = 0.5 * self.delta;
        let bias = 0.5 * (self.v * t - self.detuning());
        let spin = Complex64::from_polar(1.0, 2.0 * self.omega * t);
        let minus_i = Complex64::new(0.0, -1.0);

        for n in 0..levels {
            let sqrt_n = (n as f64).sqrt();
            let sqrt_n1 = ((n + 1) as f64).sqrt();

            let mut h_up = up[n] * -bias;
            if n + 1 < levels {
                h_up -= down[n + 1] * (g * sqrt_n1);
            }
            if n >= 1 {
                h_up -= down[n - 1] * spin * (g * sqrt_n);
            }

            let mut h_down = down[n] * bias;
            if n >= 1 {
                h_down -= up[n - 1] * (g * sqrt_n);
            }
            if n + 1 < levels {
                h_down -= up[n + 1] * spin.conj() * (g * sqrt_n1);
            }

            out_up[n] = minus_i * h_up;
            out_down[n] = minus_i * h_down;
        }
    }

    /// Dense real-symmetric matrix of `H(t)` over `n_max + 1` photon levels,
    /// ordered like [`JointState`].
    pub fn dense(&self, t: f64, levels: usize) -> DMatrix<f64> {
        let dim = 2 * levels;
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        let g = 0.5 * self.delta;
        for n in 0..levels {
            let (e_up, e_down) = self.diagonal(t, n);
            h[(n, n)] = e_up;
            h[(levels + n, levels + n)] = e_down;
            if n + 1 < levels {
                let c = -g * ((n + 1) as f64).sqrt();
                // |↑,n⟩ ↔ |↓,n+1⟩
                h[(n, levels + n + 1)] = c;
                h[(levels + n + 1, n)] = c;
                if self.model == Model::Full {
                    // |↑,n+1⟩ ↔ |↓,n⟩
                    h[(n + 1, levels + n)] = c;
                    h[(levels + n, n + 1)] = c;
                }
            }
        }
        h
    }
}

/// `−i H(t) |ψ⟩` as a state-shaped derivative.
pub fn apply_h(params: &LZParams, t: f64, state: &JointState) -> Result<JointState> {
    if !t.is_finite() {
        return Err(LzError::InvalidArgument(format!("non-finite time {t}")));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); state.packed().len()];
    params.apply_packed(t, state.packed(), &mut out);
    JointState::from_packed(out, state.t())
}

/// Checked variant of [`apply_h`] for callers that carry an expected size.
pub fn apply_h_checked(
    params: &LZParams,
    t: f64,
    state: &JointState,
    trunc: &TruncationSpec,
) -> Result<JointState> {
    if state.levels() != trunc.levels() {
        return Err(LzError::DimensionMismatch {
            expected: trunc.levels(),
            found: state.levels(),
        });
    }
    apply_h(params, t, state)
}

/// Instantaneous eigenvalues at one sweep time, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSlice {
    pub t: f64,
    pub eigenvalues: Vec<f64>,
}

/// Diagonalizes `H(t)` on every grid point.
pub fn adiabatic_spectrum(
    params: &LZParams,
    t_grid: &[f64],
    trunc: &TruncationSpec,
) -> Result<Vec<SpectrumSlice>> {
    t_grid
        .iter()
        .map(|&t| {
            if !t.is_finite() {
                return Err(LzError::InvalidArgument(format!("non-finite time {t}")));
            }
            let eig = SymmetricEigen::new(params.dense(t, trunc.levels()));
            let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            eigenvalues.sort_by(f64::total_cmp);
            Ok(SpectrumSlice { t, eigenvalues })
        })
        .collect()
}

/// Separation of successive crossing groups and the duration of one
/// transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingTimes {
    /// `2ω/v`
    pub t_cross: f64,
    /// `max(1/√v, Δ/v)`
    pub tau_lz: f64,
}

pub fn crossing_times(params: &LZParams) -> CrossingTimes {
    CrossingTimes {
        t_cross: 2.0 * params.omega / params.v,
        tau_lz: (1.0 / params.v.sqrt()).max(params.delta / params.v),
    }
}

/// True when the two crossing groups can be treated as independent events
/// for a cat state of amplitude `alpha`: `ω > max(√v/4, |α|Δ)`.
pub fn independence_check(params: &LZParams, alpha: f64) -> bool {
    params.omega > (0.25 * params.v.sqrt()).max(alpha.abs() * params.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn trunc(n_max: usize) -> TruncationSpec {
        TruncationSpec::new(n_max, 1e-12).unwrap()
    }

    #[test]
    fn decoupled_rwa_is_diagonal_phase() {
        let p = LZParams::new(1.0, 0.0, 10.0, Model::Rwa).unwrap();
        let up = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let down = [c(0.0, 0.0); 3];
        let psi = JointState::new(&up, &down, 0.0).unwrap();
        let t = 3.0;
        let d = apply_h(&p, t, &psi).unwrap();
        for (n, &u) in up.iter().enumerate() {
            let expected = c(0.0, -1.0) * (-0.5 * t) * u;
            assert_relative_eq!((d.up()[n] - expected).norm(), 0.0, epsilon = 1e-15);
            assert_eq!(d.down()[n], c(0.0, 0.0));
        }
    }

    #[test]
    fn rotating_frame_generator_matches_lab() {
        use crate::observables::frame_rotate;
        let (w, t) = (3.0, 1.7);
        let p = LZParams::new(1.0, 0.8, w, Model::Full).unwrap();
        let up: Vec<Complex64> = (0..6).map(|n| c(0.1 * n as f64, 0.3 - 0.05 * n as f64)).collect();
        let down: Vec<Complex64> = (0..6).map(|n| c(0.2, 0.04 * n as f64)).collect();
        let psi_i = JointState::new(&up, &down, t).unwrap();
        let mut got = vec![c(0.0, 0.0); 12];
        p.apply_packed_rotating(t, psi_i.packed(), &mut got);
        // d/dt e^{iωtN}ψ = e^{iωtN}(−iHψ) + iωN e^{iωtN}ψ
        let lab = frame_rotate(&psi_i, w, -t);
        let d_lab = frame_rotate(&apply_h(&p, t, &lab).unwrap(), w, t);
        for n in 0..6 {
            let nu = c(0.0, w * (n as f64 + 0.5));
            let nd = c(0.0, w * (n as f64 - 0.5));
            assert_relative_eq!((got[n] - d_lab.up()[n] - nu * up[n]).norm(), 0.0, epsilon = 1e-13);
            assert_relative_eq!((got[6 + n] - d_lab.down()[n] - nd * down[n]).norm(), 0.0, epsilon = 1e-13);
        }
        let r = LZParams::new(1.0, 0.8, w, Model::Rwa).unwrap();
        let mut a = vec![c(0.0, 0.0); 12];
        let mut b = vec![c(0.0, 0.0); 12];
        r.apply_packed(t, psi_i.packed(), &mut a);
        r.apply_packed_rotating(t, psi_i.packed(), &mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn rwa_vacuum_couples_to_single_photon_only() {
        let p = LZParams::new(1.0, 0.5, 10.0, Model::Rwa).unwrap();
        let psi = JointState::basis(true, 0, &trunc(3), 0.0).unwrap();
        let d = apply_h(&p, 0.0, &psi).unwrap();
        // −i · (−Δ/2) · √1
        assert_relative_eq!((d.down()[1] - c(0.0, 0.25)).norm(), 0.0, epsilon = 1e-15);
        let others: f64 = d.packed().iter().map(|a| a.norm_sqr()).sum::<f64>() - d.down()[1].norm_sqr();
        assert_eq!(others, 0.0);
    }

    #[test]
    fn full_model_counter_rotating_matrix_elements() {
        let p = LZParams::new(1.0, 0.5, 10.0, Model::Full).unwrap();
        let psi = JointState::basis(true, 1, &trunc(4), 0.0).unwrap();
        let d = apply_h(&p, 0.0, &psi).unwrap();
        assert_relative_eq!(d.down()[2].norm(), 2f64.sqrt() * 0.25, epsilon = 1e-15);
        assert_relative_eq!(d.down()[0].norm(), 0.25, epsilon = 1e-15);
        assert_eq!(d.down()[1].norm(), 0.0);
        assert_eq!(d.down()[3].norm(), 0.0);
    }

    #[test]
    fn detuning_rejected_for_full_model() {
        assert!(matches!(
            LZParams::with_bias(1.0, 0.5, 10.0, 11.0, Model::Full),
            Err(LzError::Unsupported(_))
        ));
        let p = LZParams::with_bias(1.0, 0.5, 10.0, 12.0, Model::Rwa).unwrap();
        assert_eq!(p.detuning(), 2.0);
        // crossing moved to t = δω/v
        let h = p.dense(2.0, 2);
        assert_eq!(h[(0, 0)], 0.0);
        assert_eq!(h[(2, 2)], 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = LZParams::new(1.0, 0.5, 10.0, Model::Rwa).unwrap();
        let psi = JointState::basis(true, 0, &trunc(3), 0.0).unwrap();
        assert!(matches!(
            apply_h_checked(&p, 0.0, &psi, &trunc(4)),
            Err(LzError::DimensionMismatch { expected: 5, found: 4 })
        ));
    }

    #[test]
    fn rwa_spectrum_uncoupled_and_sector_gaps() {
        let p0 = LZParams::new(1.0, 0.0, 10.0, Model::Rwa).unwrap();
        let s = adiabatic_spectrum(&p0, &[-4.0, 0.0, 3.0], &trunc(3)).unwrap();
        for slice in &s {
            assert_eq!(slice.eigenvalues.len(), 8);
            for e in &slice.eigenvalues {
                assert_relative_eq!(e.abs(), 0.5 * slice.t.abs(), epsilon = 1e-12);
            }
        }

        let p = LZParams::new(1.0, 0.5, 10.0, Model::Rwa).unwrap();
        let s = adiabatic_spectrum(&p, &[0.0], &trunc(4)).unwrap();
        let ev = &s[0].eigenvalues;
        // sectors n = 0..3 are complete inside the cutoff
        for n in 0..4 {
            let half_gap = 0.25 * ((n + 1) as f64).sqrt();
            assert!(ev.iter().any(|e| (e - half_gap).abs() < 1e-12));
            assert!(ev.iter().any(|e| (e + half_gap).abs() < 1e-12));
        }
    }

    #[test]
    fn full_spectrum_has_two_crossing_groups() {
        let p = LZParams::new(1.0, 0.5, 10.0, Model::Full).unwrap();
        let grid: Vec<f64> = (0..=3000).map(|i| -5.0 + 0.01 * i as f64).collect();
        let s = adiabatic_spectrum(&p, &grid, &trunc(3)).unwrap();
        let mut minima = Vec::new();
        for level in 0..s[0].eigenvalues.len() - 1 {
            let gap: Vec<f64> = s
                .iter()
                .map(|sl| sl.eigenvalues[level + 1] - sl.eigenvalues[level])
                .collect();
            for i in 1..gap.len() - 1 {
                if gap[i] < gap[i - 1] && gap[i] <= gap[i + 1] && gap[i] > 0.1 {
                    minima.push(grid[i]);
                }
            }
        }
        let t_cross = crossing_times(&p).t_cross;
        assert!(minima.iter().any(|t| t.abs() < 0.5));
        assert!(minima.iter().any(|t| (t - t_cross).abs() < 0.5));
        assert!(minima
            .iter()
            .all(|t| t.abs() < 0.5 || (t - t_cross).abs() < 0.5));
    }

    #[test]
    fn crossing_time_scales() {
        let p = LZParams::new(1.0, 0.5, 10.0, Model::Full).unwrap();
        let ct = crossing_times(&p);
        assert_eq!(ct.t_cross, 20.0);
        assert_eq!(ct.tau_lz, 1.0);
        let strong = LZParams::new(1.0, 2.0, 10.0, Model::Full).unwrap();
        assert_eq!(crossing_times(&strong).tau_lz, 2.0);
    }

    #[test]
    fn independence_condition() {
        let p = LZParams::new(1.0, 0.5, 10.0, Model::Full).unwrap();
        assert!(independence_check(&p, 1.0));
        let slow = LZParams::new(1.0, 0.5, 1.0, Model::Full).unwrap();
        assert!(!independence_check(&slow, 4.0));
        let free = LZParams::new(1.0, 0.0, 0.3, Model::Full).unwrap();
        assert!(independence_check(&free, 100.0));
    }

    fn random_state(levels: usize, seed: &[f64]) -> JointState {
        let amps: Vec<Complex64> = seed
            .chunks(2)
            .take(2 * levels)
            .map(|p| c(p[0], p[1]))
            .collect();
        JointState::from_packed(amps, 0.0).unwrap()
    }

    /// Basis vectors of the RWA sector `span{|↑,n⟩, |↓,n+1⟩}` stay inside it.
    #[test]
    fn rwa_preserves_excitation_sectors() {
        let p = LZParams::new(1.0, 0.7, 10.0, Model::Rwa).unwrap();
        let tr = trunc(6);
        for n in 0..6 {
            for (spin_up, level) in [(true, n), (false, n + 1)] {
                let psi = JointState::basis(spin_up, level, &tr, 0.0).unwrap();
                let d = apply_h(&p, 1.3, &psi).unwrap();
                for m in 0..tr.levels() {
                    if m != n {
                        assert_eq!(d.up()[m].norm(), 0.0);
                    }
                    if m != n + 1 {
                        assert_eq!(d.down()[m].norm(), 0.0);
                    }
                }
            }
        }
        let full = p.with_model(Model::Full).unwrap();
        let psi = JointState::basis(true, 2, &tr, 0.0).unwrap();
        let d = apply_h(&full, 1.3, &psi).unwrap();
        assert!(d.down()[1].norm() > 0.0, "counter-rotating leakage expected");
    }

    proptest! {
        #[test]
        fn hamiltonian_is_hermitian(
            seed_a in proptest::collection::vec(-1.0f64..1.0, 24),
            seed_b in proptest::collection::vec(-1.0f64..1.0, 24),
            t in -50.0f64..50.0,
            delta in 0.0f64..2.0,
            full in any::<bool>(),
        ) {
            let model = if full { Model::Full } else { Model::Rwa };
            let p = LZParams::new(1.0, delta, 10.0, model).unwrap();
            let phi = random_state(6, &seed_a);
            let psi = random_state(6, &seed_b);
            // −iH applied, so ⟨φ|Hψ⟩ = i ⟨φ|(−iHψ)⟩
            let i = c(0.0, 1.0);
            let h_psi = apply_h(&p, t, &psi).unwrap();
            let h_phi = apply_h(&p, t, &phi).unwrap();
            let lhs = i * phi.inner(&h_psi);
            let rhs = (i * psi.inner(&h_phi)).conj();
            prop_assert!((lhs - rhs).norm() <= 1e-12);
        }
    }
}
