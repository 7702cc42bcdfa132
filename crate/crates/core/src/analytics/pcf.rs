//! Parabolic cylinder function `D_ν(z)` for complex order and argument.
//!
//! Three evaluation routes, each with its own error estimate:
//! a double-double Kummer series (small and moderate `|z|`), the large-`|z|`
//! asymptotic expansion with the Stokes-switched recessive term, and a
//! Runge-Kutta integration of Weber's equation inward along the ray from a
//! radius where the asymptotic expansion is accurate.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use thiserror::Error;

use super::special::{rgamma, CDd, Dd};

/// Largest `|z|` accepted.
pub const Z_CAP: f64 = 50.0;

/// Relative accuracy required from a returned value.
pub const PCF_TARGET: f64 = 1e-8;

const GOOD_ENOUGH: f64 = 1e-12;
const SERIES_MAX_Z: f64 = 12.0;
const ASYMPTOTIC_MIN_Z: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcfError {
    #[error("|z| = {modulus} exceeds the supported radius {cap}")]
    OutOfDomain { modulus: f64, cap: f64 },

    #[error("non-finite order or argument")]
    NonFinite,

    #[error("D_nu(z) did not converge for nu = {nu}, z = {z} (best estimate {estimate:.1e})")]
    NoConvergence { nu: Complex64, z: Complex64, estimate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcfMethod {
    Series,
    Asymptotic,
    Ode,
}

/// A value together with its estimated relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcfValue {
    pub value: Complex64,
    pub rel_error: f64,
    pub method: PcfMethod,
}

/// `D_ν(z)`.
pub fn pcf_d(nu: Complex64, z: Complex64) -> Result<Complex64, PcfError> {
    pcf_d_estimate(nu, z).map(|v| v.value)
}

/// `D_ν(z)` with the estimate of the route that produced it.
pub fn pcf_d_estimate(nu: Complex64, z: Complex64) -> Result<PcfValue, PcfError> {
    if !(nu.re.is_finite() && nu.im.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(PcfError::NonFinite);
    }
    let r = z.norm();
    if r > Z_CAP {
        return Err(PcfError::OutOfDomain {
            modulus: r,
            cap: Z_CAP,
        });
    }

    let mut best: Option<PcfValue> = None;
    let consider = |cand: Option<PcfValue>, best: &mut Option<PcfValue>| {
        if let Some(c) = cand {
            if best.is_none_or(|b| c.rel_error < b.rel_error) {
                *best = Some(c);
            }
        }
    };

    if r >= ASYMPTOTIC_MIN_Z {
        consider(asymptotic(nu, z), &mut best);
        if let Some(b) = best.filter(|b| b.rel_error <= GOOD_ENOUGH) {
            return Ok(b);
        }
    }
    if r <= SERIES_MAX_Z {
        consider(series(nu, z), &mut best);
        if let Some(b) = best.filter(|b| b.rel_error <= GOOD_ENOUGH) {
            return Ok(b);
        }
    }
    if let Some(b) = best.filter(|b| b.rel_error <= PCF_TARGET * 0.1) {
        return Ok(b);
    }
    consider(ode_inward(nu, z), &mut best);
    match best {
        Some(b) if b.rel_error <= PCF_TARGET => Ok(b),
        _ => Err(PcfError::NoConvergence {
            nu,
            z,
            estimate: best.map_or(f64::INFINITY, |b| b.rel_error),
        }),
    }
}

/// Kummer `M(a, b, x)` summed in double-double; returns the sum and an
/// absolute error bound.
fn kummer(a: Complex64, b: f64, x: CDd) -> Option<(Complex64, f64)> {
    let a = CDd::from(a);
    let one = CDd {
        re: Dd::new(1.0),
        im: Dd::ZERO,
    };
    let mut term = one;
    let mut sum = one;
    let mut abs_sum = 1.0;
    let xr = x.norm();
    for k in 0..20_000usize {
        let kf = k as f64;
        let ak = a + CDd {
            re: Dd::new(kf),
            im: Dd::ZERO,
        };
        term = (term * ak * x).div_f64((b + kf) * (kf + 1.0));
        let tn = term.norm();
        if tn == 0.0 {
            break;
        }
        sum = sum + term;
        abs_sum += tn;
        if kf > xr && tn <= 1e-34 * sum.norm().max(1e-300) {
            return Some((sum.to_c64(), abs_sum * 1e-30 + tn));
        }
    }
    if term.norm() == 0.0 {
        return Some((sum.to_c64(), abs_sum * 1e-30));
    }
    None
}

fn series(nu: Complex64, z: Complex64) -> Option<PcfValue> {
    let zd = CDd::from(z);
    let x = (zd * zd).div_f64(2.0);
    let a1 = -nu / 2.0;
    let a2 = (1.0 - nu) / 2.0;
    let (m1, e1) = kummer(a1, 0.5, x)?;
    let (m2, e2) = kummer(a2, 1.5, x)?;
    let p1 = PI.sqrt() * rgamma(a2);
    let p2 = (2.0 * PI).sqrt() * rgamma(a1) * z;
    let t1 = p1 * m1;
    let t2 = p2 * m2;
    let bracket = t1 - t2;
    let abs_err = p1.norm() * e1 + p2.norm() * e2 + 1e-15 * (t1.norm() + t2.norm());
    let scale = (nu * (2f64.ln() / 2.0) - x.to_c64() / 2.0).exp();
    let value = scale * bracket;
    let bn = bracket.norm();
    let rel_error = if bn > 0.0 {
        abs_err / bn + 1e-15
    } else {
        f64::INFINITY
    };
    finite(value).then_some(PcfValue {
        value,
        rel_error,
        method: PcfMethod::Series,
    })
}

/// Sums an asymptotic series given the ratio of successive terms, stopping at
/// the smallest term. Returns the sum and the first omitted term's modulus.
fn asymptotic_sum(ratio: impl Fn(usize) -> Complex64) -> (Complex64, f64) {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for s in 0..400usize {
        let next = term * ratio(s);
        let nn = next.norm();
        if nn == 0.0 {
            return (sum, 0.0);
        }
        if nn >= term.norm() {
            return (sum, nn);
        }
        if nn <= 1e-18 * sum.norm() {
            return (sum + next, nn);
        }
        sum += next;
        term = next;
    }
    (sum, term.norm())
}

fn asymptotic(nu: Complex64, z: Complex64) -> Option<PcfValue> {
    let z2 = z * z;
    let x2 = 2.0 * z2;
    let (s1, e1) = asymptotic_sum(|s| {
        let s = s as f64;
        -(-nu + 2.0 * s) * (-nu + 2.0 * s + 1.0) / ((s + 1.0) * x2)
    });
    let lead = (nu * z.ln() - z2 / 4.0).exp();
    let t1 = lead * s1;
    let mut abs_err = lead.norm() * e1 + 1e-15 * (1.0 + z2.norm() * 1e-2) * t1.norm();
    let mut value = t1;

    let phase = z.arg();
    if phase.abs() > FRAC_PI_2 {
        let (s2, e2) = asymptotic_sum(|s| {
            let s = s as f64;
            (nu + 1.0 + 2.0 * s) * (nu + 2.0 + 2.0 * s) / ((s + 1.0) * x2)
        });
        let sign = if phase > 0.0 { 1.0 } else { -1.0 };
        let i = Complex64::i();
        let rec = -(2.0 * PI).sqrt()
            * rgamma(-nu)
            * (sign * i * PI * nu + (-nu - 1.0) * z.ln() + z2 / 4.0).exp();
        let t2 = rec * s2;
        abs_err += rec.norm() * e2 + 1e-15 * t2.norm();
        value += t2;
    }
    let vn = value.norm();
    if !finite(value) || vn == 0.0 {
        return None;
    }
    Some(PcfValue {
        value,
        rel_error: abs_err / vn,
        method: PcfMethod::Asymptotic,
    })
}

/// Integrates `w'' = (z²/4 − ν − 1/2) w` from a large radius down to `|z|`
/// along the ray through `z`, starting from asymptotic values of `D_ν` and
/// its derivative.
fn ode_inward(nu: Complex64, z: Complex64) -> Option<PcfValue> {
    let r_end = z.norm();
    let dir = if r_end > 0.0 {
        z / r_end
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut start = None;
    let mut r0 = (r_end + 2.0).max(8.0);
    while r0 <= Z_CAP {
        let zs = dir * r0;
        if let (Some(d0), Some(d1)) = (asymptotic(nu, zs), asymptotic(nu + 1.0, zs)) {
            if d0.rel_error <= 1e-13 && d1.rel_error <= 1e-13 {
                // D'_ν(z) = z/2 D_ν(z) − D_{ν+1}(z)
                let dw = zs / 2.0 * d0.value - d1.value;
                start = Some((r0, d0.value, dw * dir));
                break;
            }
        }
        r0 += 2.0;
    }
    let (r0, w0, dw0) = start?;
    let k_max = (r0 * r0 / 4.0 + nu.norm() + 1.0).sqrt();
    let base_steps = (((r0 - r_end) * k_max / 0.02).ceil() as usize).max(16);
    let coarse = rk4_ray(nu, dir, r0, r_end, w0, dw0, base_steps);
    let fine = rk4_ray(nu, dir, r0, r_end, w0, dw0, 2 * base_steps);
    let fn_ = fine.norm();
    if !finite(fine) || fn_ == 0.0 {
        return None;
    }
    Some(PcfValue {
        value: fine,
        rel_error: (fine - coarse).norm() / 15.0 / fn_ + 1e-14,
        method: PcfMethod::Ode,
    })
}

fn rk4_ray(
    nu: Complex64,
    dir: Complex64,
    r0: f64,
    r1: f64,
    w0: Complex64,
    dw0: Complex64,
    steps: usize,
) -> Complex64 {
    let h = (r1 - r0) / steps as f64;
    let dir2 = dir * dir;
    let q = |r: f64| {
        let zz = dir * r;
        dir2 * (zz * zz / 4.0 - nu - 0.5)
    };
    let (mut w, mut dw) = (w0, dw0);
    for k in 0..steps {
        let r = r0 + h * k as f64;
        let (qa, qm, qb) = (q(r), q(r + h / 2.0), q(r + h));
        let k1w = dw;
        let k1d = qa * w;
        let k2w = dw + h / 2.0 * k1d;
        let k2d = qm * (w + h / 2.0 * k1w);
        let k3w = dw + h / 2.0 * k2d;
        let k3d = qm * (w + h / 2.0 * k2w);
        let k4w = dw + h * k3d;
        let k4d = qb * (w + h * k3w);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        dw += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    w
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn eighth(r: f64) -> Complex64 {
        Complex64::from_polar(r, FRAC_PI_4)
    }

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm()
    }

    // Reference values from an arbitrary-precision evaluation.
    fn reference() -> Vec<(Complex64, Complex64, Complex64)> {
        vec![
            (c(0.0, -0.5), c(1.0, 1.0), c(1.016_827_140_728_233_7, -0.936_432_646_169_707_4)),
            (c(-1.0, -0.0625), eighth(3.0), c(-0.335_770_046_719_881_6, -0.045_607_482_862_720_1)),
            (c(0.0, -0.25), -eighth(6.0), c(-0.606_765_304_377_845_1, -0.057_645_899_291_088_33)),
            (c(-1.0, -0.25), eighth(8.0), c(0.001_766_662_993_106_164_4, 0.151_138_542_942_925_06)),
            (c(0.3, 0.2), c(5.5, 0.0), c(0.000_819_473_417_071_481_6, 0.000_291_951_863_712_008_1)),
            (c(0.0, -0.0625), -eighth(10.0), c(0.872_912_597_963_989_3, 0.001_295_999_867_493_984_6)),
            (c(1.5, 0.0), c(2.0, -3.0), c(1.728_230_060_687_96, 24.099_866_157_691_57)),
            (c(-2.5, 1.0), c(0.0, 4.0), c(-0.518_268_614_036_940_9, -0.141_076_556_872_965_55)),
            (c(0.0, -0.0625), eighth(10.0), c(1.049_918_841_207_937, -0.011_753_825_659_821_292)),
            (c(0.0, -0.1), c(6.0, 0.0), c(0.000_121_420_440_653_354_63, -2.215_905_082_913_380_2e-5)),
        ]
    }

    #[test]
    fn matches_reference_values() {
        for (nu, z, want) in reference() {
            let got = pcf_d_estimate(nu, z).unwrap();
            assert!(
                close(got.value, want, 1e-9),
                "D_{nu}({z}) = {} via {:?}, want {want}",
                got.value,
                got.method
            );
            assert!(got.rel_error <= PCF_TARGET);
        }
    }

    #[test]
    fn integer_orders_reduce_to_hermite_functions() {
        for &z in &[c(0.3, -0.2), c(2.0, 1.0), c(-7.0, 0.5), eighth(-20.0)] {
            let g = (-z * z / 4.0).exp();
            assert!(close(pcf_d(c(0.0, 0.0), z).unwrap(), g, 1e-10));
            assert!(close(pcf_d(c(1.0, 0.0), z).unwrap(), z * g, 1e-10));
            assert!(close(pcf_d(c(2.0, 0.0), z).unwrap(), (z * z - 1.0) * g, 1e-10));
        }
    }

    #[test]
    fn series_and_asymptotic_agree_in_overlap() {
        for &(nu, z) in &[
            (c(0.0, -0.3), eighth(7.0)),
            (c(-1.0, -0.3), eighth(-7.0)),
            (c(0.5, 0.5), c(0.0, 7.0)),
        ] {
            let s = series(nu, z).unwrap();
            let a = asymptotic(nu, z).unwrap();
            assert!(close(s.value, a.value, 1e-10), "{nu} {z}: {} vs {}", s.value, a.value);
        }
    }

    #[test]
    fn ode_route_agrees_with_series() {
        let nu = c(0.3, 0.2);
        let z = c(5.5, 0.0);
        let o = ode_inward(nu, z).unwrap();
        let s = series(nu, z).unwrap();
        assert!(close(o.value, s.value, 1e-8));
    }

    #[test]
    fn recurrence_holds() {
        // D_{ν+1}(z) − z D_ν(z) + ν D_{ν−1}(z) = 0
        for &(nu, z) in &[
            (c(0.0, -0.4), eighth(3.5)),
            (c(-1.0, -0.4), eighth(-12.0)),
            (c(0.2, 1.0), c(-2.0, 9.0)),
        ] {
            let up = pcf_d(nu + 1.0, z).unwrap();
            let mid = pcf_d(nu, z).unwrap();
            let dn = pcf_d(nu - 1.0, z).unwrap();
            let scale = up.norm().max((z * mid).norm());
            assert!((up - z * mid + nu * dn).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            pcf_d(c(0.0, 0.0), c(51.0, 0.0)),
            Err(PcfError::OutOfDomain { .. })
        ));
        assert!(matches!(
            pcf_d(c(f64::NAN, 0.0), c(1.0, 0.0)),
            Err(PcfError::NonFinite)
        ));
        assert!(pcf_d(c(0.0, -0.1), eighth(-50.0)).is_ok());
    }
}
