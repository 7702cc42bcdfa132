//! Truncated Fock-space states: photon amplitudes, cat and thermal initial
//! conditions, and joint two-level ⊗ field wavefunctions.

use num_complex::Complex64;

use crate::error::{LzError, Result};

/// Levels added on top of the tail bound. Counter-rotating dynamics moves
/// population into neighbouring photon numbers.
pub const TRUNCATION_PAD: usize = 5;

/// Highest retained Fock level together with the probability weight we are
/// willing to drop above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    n_max: usize,
    tail_tolerance: f64,
}

impl TruncationSpec {
    pub fn new(n_max: usize, tail_tolerance: f64) -> Result<Self> {
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(LzError::InvalidArgument(format!(
                "tail tolerance must lie in (0, 1), got {tail_tolerance}"
            )));
        }
        Ok(Self {
            n_max,
            tail_tolerance,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Number of retained Fock levels, `n_max + 1`.
    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    /// Same tolerance, twice the cutoff. Used for convergence checks.
    pub fn doubled(&self) -> Self {
        Self {
            n_max: 2 * self.n_max.max(1),
            tail_tolerance: self.tail_tolerance,
        }
    }
}

/// Amplitudes `c_n` of a pure photon state over `|0⟩ … |n_max⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonAmplitudes {
    c: Vec<Complex64>,
}

impl PhotonAmplitudes {
    /// Wraps raw amplitudes after checking normalization to 1e-12.
    pub fn from_amplitudes(c: Vec<Complex64>) -> Result<Self> {
        if c.is_empty() {
            return Err(LzError::InvalidArgument("empty amplitude vector".into()));
        }
        let norm: f64 = c.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(LzError::InvalidArgument(format!(
                "photon amplitudes not normalized: sum |c_n|^2 = {norm}"
            )));
        }
        Ok(Self { c })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.c
    }

    pub fn n_max(&self) -> usize {
        self.c.len() - 1
    }

    /// Photon-number distribution `|c_n|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.c.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn mean_photon(&self) -> f64 {
        self.c
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.c
            .iter()
            .enumerate()
            .map(|(n, a)| (n * n) as f64 * a.norm_sqr())
            .sum()
    }
}

/// Unnormalized cat coefficients `e^{-α²/2} α^n (1 + e^{iθ}(-1)^n) / √n!`
/// for `n = 0..=upto`.
fn raw_cat(alpha: f64, theta: f64, upto: usize) -> Vec<Complex64> {
    let phase = Complex64::from_polar(1.0, theta);
    let mut poisson_amp = (-0.5 * alpha * alpha).exp();
    let mut out = Vec::with_capacity(upto + 1);
    for n in 0..=upto {
        if n > 0 {
            poisson_amp *= alpha / (n as f64).sqrt();
        }
        let parity = if n % 2 == 0 { phase } else { -phase };
        out.push((Complex64::new(1.0, 0.0) + parity) * poisson_amp);
    }
    out
}

/// Index past which the Poisson amplitudes for `alpha` are negligible.
fn poisson_horizon(mean: f64) -> usize {
    (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize
}

/// Probability weight of the cat state above `n_max` (exact series tail).
pub fn cat_tail_weight(alpha: f64, theta: f64, n_max: usize) -> f64 {
    let horizon = poisson_horizon(alpha * alpha).max(n_max + 1);
    let raw = raw_cat(alpha, theta, horizon);
    let total: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
    if total == 0.0 {
        // α = 0, θ = π: the limiting state |1⟩ has no tail above n_max ≥ 1
        return if n_max >= 1 { 0.0 } else { 1.0 };
    }
    let tail: f64 = raw[n_max + 1..].iter().map(|a| a.norm_sqr()).sum();
    tail / total
}

/// Superposition of coherent states `(|α⟩ + e^{iθ}|−α⟩)/N_θ` with real `α ≥ 0`.
///
/// The relative phase enters as `1 + e^{iθ}(−1)^n`, so `θ = 0` keeps even
/// photon numbers and `θ = π` keeps odd ones. At `α = 0, θ = π` the state is
/// taken as its limit, the one-photon Fock state.
pub fn make_cat(alpha: f64, theta: f64, trunc: &TruncationSpec) -> Result<PhotonAmplitudes> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(LzError::InvalidArgument(format!(
            "cat amplitude must be real and non-negative, got {alpha}"
        )));
    }
    if !theta.is_finite() {
        return Err(LzError::InvalidArgument(format!("non-finite phase {theta}")));
    }
    if alpha == 0.0 && (1.0 + Complex64::from_polar(1.0, theta)).norm() < 1e-8 {
        return make_fock(1, trunc);
    }
    let tail = cat_tail_weight(alpha, theta, trunc.n_max);
    if tail > trunc.tail_tolerance {
        return Err(LzError::TruncationTooSmall {
            n_max: trunc.n_max,
            tail,
            tolerance: trunc.tail_tolerance,
        });
    }
    let mut c = raw_cat(alpha, theta, trunc.n_max);
    let kept: f64 = c.iter().map(|a| a.norm_sqr()).sum();
    if kept < 1e-280 {
        return make_fock(1, trunc);
    }
    let scale = kept.sqrt().recip();
    c.iter_mut().for_each(|a| *a *= scale);
    Ok(PhotonAmplitudes { c })
}

pub fn make_fock(n: usize, trunc: &TruncationSpec) -> Result<PhotonAmplitudes> {
    if n > trunc.n_max {
        return Err(LzError::IndexOutOfRange {
            index: n,
            n_max: trunc.n_max,
        });
    }
    let mut c = vec![Complex64::new(0.0, 0.0); trunc.levels()];
    c[n] = Complex64::new(1.0, 0.0);
    Ok(PhotonAmplitudes { c })
}

/// Boltzmann weights `p(n) ∝ exp(−nω/T)` over the retained levels,
/// renormalized to sum to one. `T = 0` is the vacuum.
pub fn thermal_weights(omega: f64, temperature: f64, trunc: &TruncationSpec) -> Result<Vec<f64>> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(LzError::InvalidArgument(format!(
            "photon frequency must be positive, got {omega}"
        )));
    }
    if !(temperature >= 0.0) {
        return Err(LzError::InvalidArgument(format!(
            "temperature must be non-negative, got {temperature}"
        )));
    }
    let mut p = vec![0.0; trunc.levels()];
    if temperature == 0.0 {
        p[0] = 1.0;
        return Ok(p);
    }
    let ratio = (-omega / temperature).exp();
    // fraction of the infinite geometric series above n_max
    let tail = ratio.powi(trunc.levels() as i32);
    if tail > trunc.tail_tolerance {
        return Err(LzError::TruncationTooSmall {
            n_max: trunc.n_max,
            tail,
            tolerance: trunc.tail_tolerance,
        });
    }
    let mut w = 1.0;
    for pn in p.iter_mut() {
        *pn = w;
        w *= ratio;
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok(p)
}

/// Mean occupation of a thermal mode, `1/(e^{ω/T} − 1)`.
pub fn thermal_mean_photon(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

/// Cutoff whose Poisson(mean) tail is at most `eps`, plus [`TRUNCATION_PAD`].
pub fn choose_truncation(mean_photon: f64, eps: f64) -> Result<TruncationSpec> {
    check_tail_args(mean_photon, eps)?;
    let n = if mean_photon == 0.0 {
        0
    } else {
        let horizon = poisson_horizon(mean_photon);
        let ln_mean = mean_photon.ln();
        let mut ln_fact = 0.0;
        let pmf: Vec<f64> = (0..=horizon)
            .map(|k| {
                if k > 0 {
                    ln_fact += (k as f64).ln();
                }
                (-mean_photon + k as f64 * ln_mean - ln_fact).exp()
            })
            .collect();
        first_index_with_tail_below(&pmf, eps)
    };
    TruncationSpec::new(n + TRUNCATION_PAD, eps)
}

/// Cutoff whose geometric (thermal) tail with the given mean is at most
/// `eps`, plus [`TRUNCATION_PAD`].
pub fn choose_truncation_geometric(mean_photon: f64, eps: f64) -> Result<TruncationSpec> {
    check_tail_args(mean_photon, eps)?;
    let n = if mean_photon == 0.0 {
        0
    } else {
        let ratio = mean_photon / (1.0 + mean_photon);
        // tail above n is ratio^(n+1)
        let n_plus_one = (eps.ln() / ratio.ln()).ceil().max(1.0);
        n_plus_one as usize - 1
    };
    TruncationSpec::new(n + TRUNCATION_PAD, eps)
}

/// Smallest cutoff that leaves at most `eps` of a cat state outside, plus
/// [`TRUNCATION_PAD`].
pub fn cat_truncation(alpha: f64, theta: f64, eps: f64) -> Result<TruncationSpec> {
    check_tail_args(alpha * alpha, eps)?;
    let horizon = poisson_horizon(alpha * alpha);
    let raw = raw_cat(alpha, theta, horizon);
    let weights: Vec<f64> = raw.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    let n = if total == 0.0 {
        1
    } else {
        let normalized: Vec<f64> = weights.iter().map(|w| w / total).collect();
        first_index_with_tail_below(&normalized, eps)
    };
    TruncationSpec::new(n + TRUNCATION_PAD, eps)
}

fn check_tail_args(mean_photon: f64, eps: f64) -> Result<()> {
    if !(mean_photon >= 0.0) || !mean_photon.is_finite() {
        return Err(LzError::InvalidArgument(format!(
            "mean photon number must be finite and non-negative, got {mean_photon}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LzError::InvalidArgument(format!(
            "tail tolerance must lie in (0, 1), got {eps}"
        )));
    }
    Ok(())
}

/// First `n` with `sum(p[n+1..]) <= eps`, summing from the top to keep the
/// small tails accurate.
fn first_index_with_tail_below(p: &[f64], eps: f64) -> usize {
    let mut tail = 0.0;
    let mut n = p.len() - 1;
    while n > 0 {
        let with_n = tail + p[n];
        if with_n > eps {
            break;
        }
        tail = with_n;
        n -= 1;
    }
    n
}

/// Wavefunction over the product basis `{|↑,n⟩, |↓,n⟩}`.
///
/// Stored as one contiguous vector: the first `n_max + 1` entries are the
/// `|↑,n⟩` amplitudes, the rest the `|↓,n⟩` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    amps: Vec<Complex64>,
    t: f64,
}

impl JointState {
    pub fn new(up: &[Complex64], down: &[Complex64], t: f64) -> Result<Self> {
        if up.len() != down.len() {
            return Err(LzError::DimensionMismatch {
                expected: up.len(),
                found: down.len(),
            });
        }
        if up.is_empty() {
            return Err(LzError::InvalidArgument("empty joint state".into()));
        }
        let mut amps = Vec::with_capacity(2 * up.len());
        amps.extend_from_slice(up);
        amps.extend_from_slice(down);
        Ok(Self { amps, t })
    }

    /// Builds a state from the packed `[up..., down...]` layout.
    pub fn from_packed(amps: Vec<Complex64>, t: f64) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_multiple_of(2) {
            return Err(LzError::InvalidArgument(format!(
                "packed joint state needs an even, non-zero length, got {}",
                amps.len()
            )));
        }
        Ok(Self { amps, t })
    }

    /// Basis vector `|↑,n⟩` (`spin_up = true`) or `|↓,n⟩`.
    pub fn basis(spin_up: bool, n: usize, trunc: &TruncationSpec, t: f64) -> Result<Self> {
        if n > trunc.n_max {
            return Err(LzError::IndexOutOfRange {
                index: n,
                n_max: trunc.n_max,
            });
        }
        let levels = trunc.levels();
        let mut amps = vec![Complex64::new(0.0, 0.0); 2 * levels];
        amps[if spin_up { n } else { levels + n }] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, t })
    }

    pub fn levels(&self) -> usize {
        self.amps.len() / 2
    }

    pub fn n_max(&self) -> usize {
        self.levels() - 1
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn up(&self) -> &[Complex64] {
        &self.amps[..self.levels()]
    }

    pub fn down(&self) -> &[Complex64] {
        &self.amps[self.levels()..]
    }

    pub fn packed(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_packed(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &JointState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// `|↑⟩ ⊗ Σ c_n |n⟩`. The time stamp is left at zero for the propagator to set.
pub fn joint_up(ph: &PhotonAmplitudes) -> JointState {
    let zeros = vec![Complex64::new(0.0, 0.0); ph.c.len()];
    let mut amps = ph.c.clone();
    amps.extend(zeros);
    JointState { amps, t: 0.0 }
}

/// Diagonal photon ensemble `Σ p(n) |↑,n⟩⟨↑,n|`, kept as one pure state per
/// occupied Fock level.
#[derive(Debug, Clone)]
pub struct ThermalEnsemble {
    weights: Vec<f64>,
    sector_states: Vec<JointState>,
}

impl ThermalEnsemble {
    /// Thermal photon field at temperature `T` (units of `√v`, `k_B = 1`).
    pub fn thermal(omega: f64, temperature: f64, trunc: &TruncationSpec) -> Result<Self> {
        let weights = thermal_weights(omega, temperature, trunc)?;
        Self::from_weights(weights)
    }

    /// Arbitrary Fock-diagonal ensemble; weights are renormalized.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(LzError::InvalidArgument(
                "ensemble weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(LzError::InvalidArgument("ensemble weights sum to zero".into()));
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let trunc = TruncationSpec {
            n_max: weights.len() - 1,
            tail_tolerance: 0.5,
        };
        let sector_states = (0..weights.len())
            .map(|n| JointState::basis(true, n, &trunc, 0.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            weights,
            sector_states,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sector_states(&self) -> &[JointState] {
        &self.sector_states
    }

    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn mean_photon(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn trunc(n_max: usize) -> TruncationSpec {
        TruncationSpec::new(n_max, 1e-12).unwrap()
    }

    #[test]
    fn vacuum_cat_is_vacuum() {
        let c = make_cat(0.0, 0.0, &trunc(6)).unwrap();
        assert_relative_eq!(c.amplitudes()[0].re, 1.0, epsilon = 1e-15);
        assert!(c.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn odd_cat_has_only_odd_photons() {
        let c = make_cat(1.0, PI, &trunc(30)).unwrap();
        for (n, a) in c.amplitudes().iter().enumerate() {
            if n % 2 == 0 {
                assert!(a.norm() < 1e-15, "n = {n}: {a}");
            }
        }
    }

    #[test]
    fn even_cat_mean_photon_is_tanh() {
        // 2|α|²(1 − e^{−2|α|²})/N_0² at α = 1
        let c = make_cat(1.0, 0.0, &trunc(30)).unwrap();
        assert_relative_eq!(c.mean_photon(), 0.761_594_155_955_764_9, epsilon = 1e-12);
    }

    #[test]
    fn odd_cat_at_zero_amplitude_is_one_photon() {
        let c = make_cat(0.0, PI, &trunc(6)).unwrap();
        assert_relative_eq!(c.amplitudes()[1].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cat_rejects_negative_alpha_and_small_cutoff() {
        assert!(matches!(
            make_cat(-0.5, 0.0, &trunc(30)),
            Err(LzError::InvalidArgument(_))
        ));
        assert!(matches!(
            make_cat(2.0, FRAC_PI_2, &trunc(5)),
            Err(LzError::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn fock_states() {
        assert_eq!(make_fock(0, &trunc(4)).unwrap().amplitudes()[0].re, 1.0);
        let f3 = make_fock(3, &trunc(4)).unwrap();
        assert_eq!(f3.amplitudes()[3].re, 1.0);
        assert_relative_eq!(f3.probabilities().iter().sum::<f64>(), 1.0);
        assert!(matches!(
            make_fock(5, &trunc(4)),
            Err(LzError::IndexOutOfRange { index: 5, n_max: 4 })
        ));
    }

    #[test]
    fn thermal_weights_limits() {
        let p0 = thermal_weights(10.0, 0.0, &trunc(8)).unwrap();
        assert_eq!(p0[0], 1.0);
        assert!(p0[1..].iter().all(|&p| p == 0.0));

        let t = choose_truncation_geometric(thermal_mean_photon(1.0, 1.0), 1e-14).unwrap();
        let p = thermal_weights(1.0, 1.0, &t).unwrap();
        assert_relative_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        let mean: f64 = p.iter().enumerate().map(|(n, w)| n as f64 * w).sum();
        // 1/(e − 1)
        assert_relative_eq!(mean, 0.581_976_706_869_326_4, epsilon = 1e-10);
        for w in p.windows(2) {
            assert_relative_eq!(w[1] / w[0], (-1.0f64).exp(), max_relative = 1e-14);
        }

        assert!(thermal_weights(1.0, -1.0, &t).is_err());
        assert!(matches!(
            thermal_weights(1.0, 10.0, &trunc(3)),
            Err(LzError::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn truncation_choice() {
        assert_eq!(choose_truncation(0.0, 1e-12).unwrap().n_max(), TRUNCATION_PAD);
        // brute-force Poisson(4) tail: first n with tail <= 1e-12 is 25
        assert_eq!(choose_truncation(4.0, 1e-12).unwrap().n_max(), 25 + TRUNCATION_PAD);
        let mut last = 0;
        for i in 0..80 {
            let n = choose_truncation(i as f64 * 0.25, 1e-12).unwrap().n_max();
            assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn joint_up_embeds_photon_state() {
        let ph = make_cat(1.0, FRAC_PI_2, &trunc(30)).unwrap();
        let psi = joint_up(&ph);
        assert_eq!(psi.up(), ph.amplitudes());
        assert!(psi.down().iter().all(|a| a.norm() == 0.0));
        assert_eq!(psi.norm_sqr(), ph.probabilities().iter().sum::<f64>());
    }

    #[test]
    fn ensemble_from_weights_renormalizes() {
        let ens = ThermalEnsemble::from_weights(vec![1.0, 1.0]).unwrap();
        assert_eq!(ens.weights(), &[0.5, 0.5]);
        assert_eq!(ens.sector_states()[1].up()[1].re, 1.0);
    }
}
