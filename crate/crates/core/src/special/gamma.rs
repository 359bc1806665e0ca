//! Complex log-gamma and the weight-`k` gamma factor.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::bessel::WeightK;
use crate::error::SpecialError;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Bernoulli coefficients `B_{2j} / (2j (2j − 1))`.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

fn near_pole(z: Complex64) -> bool {
    z.re <= 0.0 && z.im.abs() < 1e-13 && (z.re - z.re.round()).abs() < 1e-13
}

/// Principal branch of `ln Γ(z)`, continuous off the negative real axis.
pub fn ln_gamma(z: Complex64) -> Result<Complex64, SpecialError> {
    if near_pole(z) {
        return Err(SpecialError::PoleError(format!("Γ has a pole at {z}")));
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let s = (z * PI).sin();
        let rest = ln_gamma(Complex64::new(1.0, 0.0) - z)?;
        return Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - rest);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < 15.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift)
}

pub fn gamma(z: Complex64) -> Result<Complex64, SpecialError> {
    Ok(ln_gamma(z)?.exp())
}

/// `γ_k(s) = 2^{(3−k)/2} √π (2π)^{−s} Γ(s + (k−1)/2)`.
pub fn gamma_factor(k: WeightK, s: Complex64) -> Result<Complex64, SpecialError> {
    Ok(ln_gamma_factor(k, s)?.exp())
}

pub fn ln_gamma_factor(k: WeightK, s: Complex64) -> Result<Complex64, SpecialError> {
    let kf = k.k() as f64;
    let lg = ln_gamma(s + (kf - 1.0) / 2.0)?;
    Ok(Complex64::new((3.0 - kf) / 2.0 * 2f64.ln() + 0.5 * PI.ln(), 0.0) - s * (2.0 * PI).ln() + lg)
}

/// The product form `π^{−s} Γ((s + (k−1)/2)/2) Γ((s + (k+1)/2)/2)`.
pub fn gamma_factor_duplicated(k: WeightK, s: Complex64) -> Result<Complex64, SpecialError> {
    let kf = k.k() as f64;
    let a = ln_gamma((s + (kf - 1.0) / 2.0) / 2.0)?;
    let b = ln_gamma((s + (kf + 1.0) / 2.0) / 2.0)?;
    Ok((a + b - s * PI.ln()).exp())
}

/// `γ_k(1 − s) / γ_k(s)`.
pub fn gamma_ratio(k: WeightK, s: Complex64) -> Result<Complex64, SpecialError> {
    let one = Complex64::new(1.0, 0.0);
    Ok((ln_gamma_factor(k, one - s)? - ln_gamma_factor(k, s)?).exp())
}
