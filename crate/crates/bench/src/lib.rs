//! Shared fixtures for the benchmarks in `benches/`.

use lzcat::{cat_truncation, joint_up, make_cat, IntegratorConfig, JointState, LZParams, Model};

/// Cat state `|α|² = 1`, `θ = π/2`, truncated at `1e-12`.
pub fn cat_state() -> JointState {
    let alpha = 1.0;
    let theta = std::f64::consts::FRAC_PI_2;
    let trunc = cat_truncation(alpha, theta, 1e-12).expect("valid cat");
    joint_up(&make_cat(alpha, theta, &trunc).expect("valid cat"))
}

pub fn params(model: Model) -> LZParams {
    LZParams::new(1.0, 0.5, 10.0, model).expect("valid parameters")
}

/// Default window and tolerances with a coarse sample grid.
pub fn config() -> IntegratorConfig {
    IntegratorConfig::default().with_samples(201)
}
