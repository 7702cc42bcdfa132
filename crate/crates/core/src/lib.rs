//! Landau-Zener transitions of a two-level system swept through resonance
//! with a single quantized photon mode.
//!
//! The mode starts in a Schrödinger cat, Fock or thermal state. Dynamics are
//! available with and without the rotating-wave approximation, alongside the
//! closed-form transition probabilities and photon statistics they are
//! compared against.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod fockspace;
pub mod hamiltonians;
pub mod observables;
pub mod propagator;

pub use num_complex::Complex64;

pub use error::{LzError, Result};
pub use fockspace::{
    cat_truncation, choose_truncation, joint_up, make_cat, make_fock, thermal_weights, JointState,
    PhotonAmplitudes, ThermalEnsemble, TruncationSpec,
};
pub use hamiltonians::{crossing_times, independence_check, CrossingTimes, LZParams, Model};
pub use observables::{ObservableRow, ObservableSeries, ReducedTLS};
pub use propagator::{evolve, evolve_observables, evolve_thermal, IntegratorConfig, Trajectory};
