//! Weber's second exponential integral for `J_{k−1}`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::bessel::{bessel_j, bessel_j_real, WeightK, MAX_COMPLEX_ARG};
use super::quad::{integrate_panels_complex, panel_breaks, QuadratureConfig};
use crate::error::SpecialError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeberCheck {
    pub integral: Complex64,
    pub closed_form: Complex64,
    pub residual: f64,
    pub cutoff: f64,
}

fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `(i^{1−k}/(2πα)) J_{k−1}(4πiβγ/α) exp(−2π(β²+γ²)/α)`.
pub fn weber_closed_form(k: WeightK, alpha: Complex64, beta: f64, gamma: f64) -> Result<Complex64, SpecialError> {
    let z = Complex64::new(0.0, 4.0 * PI * beta * gamma) / alpha;
    if z.norm() > MAX_COMPLEX_ARG {
        return Err(SpecialError::OutOfDomain(z.norm()));
    }
    let j = bessel_j(k, z)?;
    let e = (-(2.0 * PI * (beta * beta + gamma * gamma)) / alpha).exp();
    Ok(i_pow(1 - k.k() as i64) / (alpha * 2.0 * PI) * j * e)
}

/// `∫_0^∞ e^{−2παy} J_{k−1}(4πβ√y) J_{k−1}(4πγ√y) dy`, integrated in `t = √y`.
pub fn weber_integral(
    k: WeightK,
    alpha: Complex64,
    beta: f64,
    gamma: f64,
    cfg: &QuadratureConfig,
) -> Result<(Complex64, f64), SpecialError> {
    if !(alpha.re > 0.0) {
        return Err(SpecialError::InvalidParams(format!("Re α must be positive, got {alpha}")));
    }
    cfg.validate()?;
    let cutoff = ((1.0 / cfg.abs_tol).ln() + 5.0) / (2.0 * PI * alpha.re);
    let t_max = cutoff.sqrt();
    let wb = 2.0 * (beta + gamma);
    let wi = 2.0 * alpha.im.abs();
    let breaks = panel_breaks(
        0.0,
        t_max,
        16,
        cfg.oscillation_safety,
        |t| 1.0 / (wb + wi * t + 1e-300),
        cfg.max_panels,
    )?;
    let val = integrate_panels_complex(&breaks, cfg.nodes_per_panel, |t| {
        let j = bessel_j_real(k, 4.0 * PI * beta * t) * bessel_j_real(k, 4.0 * PI * gamma * t);
        (-alpha * (2.0 * PI * t * t)).exp() * (2.0 * t * j)
    });
    Ok((val, cutoff))
}

pub fn weber_check(
    k: WeightK,
    alpha: Complex64,
    beta: f64,
    gamma: f64,
    cfg: &QuadratureConfig,
) -> Result<WeberCheck, SpecialError> {
    let closed_form = weber_closed_form(k, alpha, beta, gamma)?;
    let (integral, cutoff) = weber_integral(k, alpha, beta, gamma, cfg)?;
    Ok(WeberCheck {
        integral,
        closed_form,
        residual: (integral - closed_form).norm(),
        cutoff,
    })
}

/// `i^k/(2πα₀) J_{k−1}(4πβγ/α₀) e(−(β²+γ²)/α₀)`, the real-frequency limit for `α₀ > 0`.
pub fn weber_real_frequency(k: WeightK, alpha0: f64, beta: f64, gamma: f64) -> Result<Complex64, SpecialError> {
    if !(alpha0 > 0.0) {
        return Err(SpecialError::InvalidParams(format!("α₀ must be positive, got {alpha0}")));
    }
    let j = bessel_j_real(k, 4.0 * PI * beta * gamma / alpha0);
    let ph = -2.0 * PI * (beta * beta + gamma * gamma) / alpha0;
    Ok(i_pow(k.k() as i64) * Complex64::from_polar(j / (2.0 * PI * alpha0), ph))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedWeber {
    pub epsilons: Vec<f64>,
    pub integrals: Vec<Complex64>,
    /// Distance from each regularized integral to the closed form at the same `α`.
    pub residuals: Vec<f64>,
    pub extrapolated: Complex64,
    pub limit: Complex64,
    pub distance: f64,
}

pub const REGULARIZATION_EPS: [f64; 3] = [0.1, 0.05, 0.025];

/// Evaluates the integral at `α = ε − iα₀` and Richardson-extrapolates to `ε = 0`.
pub fn weber_regularized(
    k: WeightK,
    alpha0: f64,
    beta: f64,
    gamma: f64,
    cfg: &QuadratureConfig,
) -> Result<RegularizedWeber, SpecialError> {
    let limit = weber_real_frequency(k, alpha0, beta, gamma)?;
    let mut integrals = Vec::new();
    let mut residuals = Vec::new();
    for &eps in &REGULARIZATION_EPS {
        let alpha = Complex64::new(eps, -alpha0);
        let (v, _) = weber_integral(k, alpha, beta, gamma, cfg)?;
        residuals.push((v - weber_closed_form(k, alpha, beta, gamma)?).norm());
        integrals.push(v);
    }
    let r1 = integrals[1] * 2.0 - integrals[0];
    let r2 = integrals[2] * 2.0 - integrals[1];
    let extrapolated = (r2 * 4.0 - r1) / 3.0;
    Ok(RegularizedWeber {
        epsilons: REGULARIZATION_EPS.to_vec(),
        integrals,
        residuals,
        extrapolated,
        limit,
        distance: (extrapolated - limit).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(k: u32) -> WeightK {
        WeightK::new(k).unwrap()
    }

    #[test]
    fn listed_points() {
        let cfg = QuadratureConfig::default();
        let r = weber_check(w(12), Complex64::new(1.0, 0.0), 1.0, 1.0, &cfg).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        let r = weber_check(w(12), Complex64::new(1.0, 0.0), 1e-3, 1.0, &cfg).unwrap();
        assert!(r.residual < 1e-10 && r.closed_form.norm() < 1e-10);
        let r = weber_check(w(12), Complex64::new(1.0, -0.5), 1.0, 0.7, &cfg).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
    }

    #[test]
    fn out_of_domain() {
        let cfg = QuadratureConfig::default();
        let r = weber_check(w(12), Complex64::new(0.01, 0.0), 1.0, 1.0, &cfg);
        assert!(matches!(r, Err(SpecialError::OutOfDomain(_))));
    }

    #[test]
    fn regularized_limit() {
        let cfg = QuadratureConfig::default();
        let r = weber_regularized(w(12), 1.0, 1.0, 0.7, &cfg).unwrap();
        assert!(r.residuals.iter().all(|&x| x < 1e-8), "{r:?}");
        let raw = (r.integrals[2] - r.limit).norm();
        assert!(r.distance < 0.2 * raw, "{r:?}");
    }
}
