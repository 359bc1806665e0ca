//! Mellin–Barnes representation of `J_{k−1}(4πx)` through `γ_k(1−s)/γ_k(s)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::bessel::{bessel_j_real, WeightK};
use super::gamma::gamma_ratio;
use super::quad::{integrate_panels_complex, panel_breaks, QuadratureConfig};
use crate::error::SpecialError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinBarnesCheck {
    pub contour_value: f64,
    pub bessel_value: f64,
    pub residual: f64,
    pub truncation: f64,
    pub tail_bound: f64,
}

/// `(1/4π²) ∫_{−T}^{T} R(a+iτ) x^{2(a−1+iτ)} dτ` and a bound on the discarded tails.
pub fn mellin_barnes_integral(
    k: WeightK,
    x: f64,
    a: f64,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64, f64), SpecialError> {
    let kf = k.k() as f64;
    if !(a > 1.0 && a < 0.5 * (kf + 1.0)) {
        return Err(SpecialError::InvalidParams(format!("contour Re s = {a} outside (1, {})", 0.5 * (kf + 1.0))));
    }
    if !(x > 0.0 && x <= 5.0) {
        return Err(SpecialError::InvalidParams(format!("x = {x} outside (0, 5]")));
    }
    let scale = x.powf(2.0 * (a - 1.0)) / (4.0 * PI * PI);
    let lnx = x.ln();
    let integrand = |tau: f64| -> Complex64 {
        let s = Complex64::new(a, tau);
        let r = gamma_ratio(k, s).unwrap_or(Complex64::new(f64::NAN, 0.0));
        r * Complex64::from_polar(1.0, 2.0 * tau * lnx)
    };
    // |R(a+iτ)| ≤ C (1+τ)^{1−2a}; C is read off on [T/2, T].
    let tail = |t: f64| -> f64 {
        let c = (0..=16)
            .map(|i| {
                let tau = 0.5 * t + 0.5 * t * i as f64 / 16.0;
                integrand(tau).norm() * (1.0 + tau).powf(2.0 * a - 1.0)
            })
            .fold(0.0, f64::max);
        2.0 * scale * c * (1.0 + t).powf(2.0 - 2.0 * a) / (2.0 * a - 2.0)
    };
    let mut t = 64.0;
    while tail(t) > tol {
        t *= 1.5;
        if t > 1e6 {
            return Err(SpecialError::ToleranceNotMet(format!("contour tail above {tol:e} at T = {t}")));
        }
    }
    let period = |tau: f64| 2.0 * PI / (1.0 + 2.0 * ((1.0 + tau) / (2.0 * PI * x)).ln().abs());
    let breaks = panel_breaks(0.0, t, 16, cfg.oscillation_safety, period, cfg.max_panels)?;
    let half = integrate_panels_complex(&breaks, cfg.nodes_per_panel, integrand);
    if !half.re.is_finite() {
        return Err(SpecialError::PoleError("gamma ratio on the contour".into()));
    }
    // R(a−iτ) x^{−2iτ} is the conjugate of the integrand at τ.
    Ok((2.0 * scale * half.re, t, tail(t)))
}

pub fn mellin_barnes_check(k: WeightK, x: f64, a: f64, cfg: &QuadratureConfig) -> Result<MellinBarnesCheck, SpecialError> {
    let tol = cfg.abs_tol.min(1e-12 * x.powf(2.0 * (a - 1.0)));
    let (contour_value, truncation, tail_bound) = mellin_barnes_integral(k, x, a, tol, cfg)?;
    let bessel_value = bessel_j_real(k, 4.0 * PI * x);
    Ok(MellinBarnesCheck {
        contour_value,
        bessel_value,
        residual: (contour_value - bessel_value).abs(),
        truncation,
        tail_bound,
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
        let r = mellin_barnes_check(w(12), 0.5, 3.0, &cfg).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        let r = mellin_barnes_check(w(16), 1.0, 3.0, &cfg).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
        let r = mellin_barnes_check(w(12), 0.01, 6.0, &cfg).unwrap();
        let lead = (2.0 * PI * 0.01f64).powi(11) / (1..=11).map(|i| i as f64).product::<f64>();
        assert!((r.bessel_value / lead - 1.0).abs() < 1e-2);
        assert!(r.residual < 1e-12 * lead, "{r:?} {lead}");
    }

    #[test]
    fn contour_outside_strip_is_rejected() {
        let cfg = QuadratureConfig::default();
        assert!(mellin_barnes_check(w(12), 0.5, 1.0, &cfg).is_err());
        assert!(mellin_barnes_check(w(12), 0.5, 6.5, &cfg).is_err());
    }
}
