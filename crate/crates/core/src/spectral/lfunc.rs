//! Completed twisted L-functions from the Mellin integral of `f_χ(iy)`.
//!
//! `Λ(s) = Γ(s + (k−1)/2) (2π)^{−s−(k−1)/2} L(s, f×χ) = ∫_0^∞ f_χ(iy) y^{s+(k−1)/2} dy/y`
//! with `f_χ(iy) = Σ a(n) χ(n) e^{−2πny}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{gauss_sum, DirichletCharacter};
use crate::error::SpectralError;
use crate::modforms::Eigenform;
use crate::special::gamma::{gamma_ratio, ln_gamma};
use crate::special::quad::gauss_legendre;
use crate::special::WeightK;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LConfig {
    /// Absolute accuracy asked of `Λ(s)`.
    pub target: f64,
    /// Gauss–Legendre panels in `log y`.
    pub panels: usize,
    pub nodes_per_panel: usize,
}

impl Default for LConfig {
    fn default() -> Self {
        Self {
            target: 1e-6,
            panels: 256,
            nodes_per_panel: 20,
        }
    }
}

impl LConfig {
    pub fn validate(&self) -> Result<(), SpectralError> {
        if !(self.target > 0.0 && self.panels > 0 && self.nodes_per_panel > 0) {
            return Err(SpectralError::InvalidParams(format!("bad L config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletedL {
    pub value: Complex64,
    pub y_min: f64,
    pub y_max: f64,
    /// Sum of the dropped-range, truncation, rounding and quadrature bounds.
    pub error_bound: f64,
    /// Largest number of coefficients used at a node.
    pub terms: usize,
}

const MAX_Q: u64 = 7;

fn check_window(f: &Eigenform, chi: &DirichletCharacter, s: Complex64) -> Result<(), SpectralError> {
    if !chi.is_primitive() {
        return Err(SpectralError::InvalidParams(format!(
            "character mod {} must be primitive",
            chi.modulus()
        )));
    }
    let ok = chi.modulus() <= MAX_Q
        && (12..=26).contains(&f.weight)
        && (-2.0..=4.0).contains(&s.re)
        && s.im.abs() <= 5.0;
    if ok {
        Ok(())
    } else {
        Err(SpectralError::AccuracyNotCertified(format!(
            "q = {}, k = {}, s = {s} lies outside q ≤ {MAX_Q}, 12 ≤ k ≤ 26, −2 ≤ Re s ≤ 4, |Im s| ≤ 5",
            chi.modulus(),
            f.weight
        )))
    }
}

/// Coefficient envelope `|a(n)| ≤ n^{(k+1)/2}` past the stored precision.
struct Coeffs {
    a: Vec<Complex64>,
    abs: Vec<f64>,
    p: f64,
}

impl Coeffs {
    fn new(f: &Eigenform, chi: &DirichletCharacter) -> Self {
        let n = f.precision();
        let mut a = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut abs = vec![0.0; n + 1];
        for i in 1..=n {
            let c = f.coeff_f64(i);
            a[i] = chi.value(i as i64) * c;
            abs[i] = a[i].norm();
        }
        Self {
            a,
            abs,
            p: (f.weight as f64 + 1.0) / 2.0,
        }
    }

    fn len(&self) -> usize {
        self.a.len() - 1
    }

    /// Bound on `Σ_{n > m} n^p e^{−2πny}`, infinite when the terms are still growing.
    fn envelope_tail(&self, m: usize, y: f64) -> f64 {
        let n = (m + 1) as f64;
        let rho = ((n + 1.0) / n).powf(self.p) * (-2.0 * PI * y).exp();
        if rho >= 1.0 {
            return f64::INFINITY;
        }
        (self.p * n.ln() - 2.0 * PI * n * y).exp() / (1.0 - rho)
    }

    /// `f_χ(iy)` with a bound on its truncation and rounding error.
    fn eval(&self, y: f64) -> (Complex64, f64, usize) {
        let r = (-2.0 * PI * y).exp();
        let peak = (self.p / (2.0 * PI * y)).ceil() as usize;
        let mut rn = 1.0;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        let mut used = self.len();
        for n in 1..=self.len() {
            rn *= r;
            sum += self.a[n] * rn;
            mass += self.abs[n] * rn;
            if n > peak && n % 16 == 0 && self.envelope_tail(n, y) < 1e-18 * mass.max(1e-300) {
                used = n;
                break;
            }
        }
        let trunc = self.envelope_tail(used, y);
        let round = 8.0 * f64::EPSILON * used as f64 * mass;
        (sum, trunc + round, used)
    }

    /// Bound on `|f_χ(iY)| e^{2πY}` from the stored coefficients and the envelope.
    fn first_coefficient_envelope(&self, y: f64) -> f64 {
        let r = (-2.0 * PI * y).exp();
        let mut rn = 1.0;
        let mut s = 0.0;
        for n in 1..=self.len() {
            s += self.abs[n] * rn;
            rn *= r;
        }
        s + self.envelope_tail(self.len(), y) * (2.0 * PI * y).exp()
    }
}

/// `∫_0^{y0} |f_χ(iy)| y^{a} dy` bounded through `|f_χ(iy)| = (qy)^{−k} |f_χ̄(i/(q²y))|`.
fn small_y_bound(c: &Coeffs, k: f64, q: f64, a: f64, y0: f64) -> f64 {
    // the bound is increasing on (0, y0] when 2π/(q²y0) > k − a
    if 2.0 * PI / (q * q * y0) <= k - a {
        return f64::INFINITY;
    }
    let big = 1.0 / (q * q * y0);
    let ln_m = -k * (q * y0).ln() - 2.0 * PI * big + a * y0.ln();
    y0 * ln_m.exp() * c.first_coefficient_envelope(big)
}

/// `∫_{Y}^∞ |f_χ(iy)| y^{a} dy`.
fn large_y_bound(c: &Coeffs, a: f64, y1: f64) -> f64 {
    let rate = 2.0 * PI - a / y1;
    if rate <= 0.0 {
        return f64::INFINITY;
    }
    c.first_coefficient_envelope(y1) * (a * y1.ln() - 2.0 * PI * y1).exp() / rate
}

fn mellin(c: &Coeffs, s1: Complex64, lo: f64, hi: f64, panels: usize, nodes: usize) -> (Complex64, f64, usize) {
    let gl = gauss_legendre(nodes);
    let (tl, th) = (lo.ln(), hi.ln());
    let h = (th - tl) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut terms = 0;
    for p in 0..panels {
        let mid = tl + (p as f64 + 0.5) * h;
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            let t = mid + 0.5 * h * x;
            let y = t.exp();
            let (fv, fe, used) = c.eval(y);
            let ys = (s1 * t).exp();
            total += fv * ys * (0.5 * h * w);
            err += fe * ys.norm() * 0.5 * h * w;
            terms = terms.max(used);
        }
    }
    (total, err, terms)
}

/// `Λ(s, f×χ)` with certified cutoffs.
pub fn completed_l(f: &Eigenform, chi: &DirichletCharacter, s: Complex64, cfg: &LConfig) -> Result<CompletedL, SpectralError> {
    cfg.validate()?;
    check_window(f, chi, s)?;
    let k = f.weight as f64;
    let q = chi.modulus() as f64;
    let c = Coeffs::new(f, chi);
    let s1 = s + (k - 1.0) / 2.0;
    let a = s1.re - 1.0;
    let budget = cfg.target * 1e-3;

    let mut y_min = 1.0 / (q * q);
    let mut lower = small_y_bound(&c, k, q, a, y_min);
    while lower > budget {
        y_min *= 0.95;
        if y_min < 1e-4 {
            return Err(SpectralError::AccuracyNotCertified(format!(
                "small-y mass {lower:e} above {budget:e} at y = {y_min:e}"
            )));
        }
        lower = small_y_bound(&c, k, q, a, y_min);
    }
    let mut y_max = 1.0;
    let mut upper = large_y_bound(&c, a, y_max);
    while upper > budget {
        y_max += 0.25;
        upper = large_y_bound(&c, a, y_max);
    }

    let (coarse, _, _) = mellin(&c, s1, y_min, y_max, cfg.panels, cfg.nodes_per_panel);
    let (value, eval_err, terms) = mellin(&c, s1, y_min, y_max, 2 * cfg.panels, cfg.nodes_per_panel);
    let error_bound = lower + upper + eval_err + (value - coarse).norm();
    if !(error_bound <= cfg.target) {
        return Err(SpectralError::AccuracyNotCertified(format!(
            "error bound {error_bound:e} above target {:e} (y in [{y_min:e}, {y_max}], {terms} terms of {})",
            cfg.target,
            c.len()
        )));
    }
    Ok(CompletedL {
        value,
        y_min,
        y_max,
        error_bound,
        terms,
    })
}

/// `Γ(s + (k−1)/2) (2π)^{−s−(k−1)/2}`.
pub fn mellin_gamma(k: WeightK, s: Complex64) -> Result<Complex64, SpectralError> {
    let s1 = s + (k.k() as f64 - 1.0) / 2.0;
    Ok((ln_gamma(s1)? - s1 * (2.0 * PI).ln()).exp())
}

/// `L(s, f×χ)` recovered from `Λ`.
pub fn l_value(f: &Eigenform, chi: &DirichletCharacter, s: Complex64, cfg: &LConfig) -> Result<(Complex64, f64), SpectralError> {
    let k = WeightK::new(f.weight)?;
    let lam = completed_l(f, chi, s, cfg)?;
    let g = mellin_gamma(k, s)?;
    Ok((lam.value / g, lam.error_bound / g.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalEquation {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Propagated evaluator bound on the residual.
    pub error_bound: f64,
}

/// `|L(s, f×χ) − i^k ε² q^{1−2s} γ_k(1−s)/γ_k(s) L(1−s, f×χ̄)|`.
pub fn functional_equation_check(
    f: &Eigenform,
    chi: &DirichletCharacter,
    s: Complex64,
    cfg: &LConfig,
) -> Result<FunctionalEquation, SpectralError> {
    let k = WeightK::new(f.weight)?;
    let one = Complex64::new(1.0, 0.0);
    check_window(f, chi, s)?;
    check_window(f, chi, one - s)?;
    let q = chi.modulus() as f64;
    let eps = gauss_sum(chi).epsilon;
    let (lhs, e1) = l_value(f, chi, s, cfg)?;
    let (dual, e2) = l_value(f, &chi.conj(), one - s, cfg)?;
    let factor = eps * eps * k.i_pow_k() * (one - 2.0 * s).expf(q) * gamma_ratio(k, s)?;
    let rhs = factor * dual;
    Ok(FunctionalEquation {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        error_bound: e1 + factor.norm() * e2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::quadratic_character;
    use crate::modforms::delta::delta_lambda;
    use crate::modforms::eigenforms;

    fn delta() -> Eigenform {
        eigenforms(12, 2000).unwrap().remove(0)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matches_dirichlet_series_at_two() {
        let f = delta();
        let lam = delta_lambda(200_000).unwrap();
        for q in [3u64, 5] {
            let chi = quadratic_character(q).unwrap().unwrap();
            for s in [c(2.0, 0.0), c(2.0, 1.5)] {
                let series: Complex64 = (1..lam.len())
                    .map(|n| chi.value(n as i64) * lam[n] * c(n as f64, 0.0).powc(-s))
                    .sum();
                let (l, _) = l_value(&f, &chi, s, &LConfig::default()).unwrap();
                assert!((l - series).norm() < 1e-6, "q={q} s={s}: {l} vs {series}");
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let f = delta();
        let cfg = LConfig::default();
        for q in [3u64, 5, 7] {
            let chi = quadratic_character(q).unwrap().unwrap();
            let s = c(0.3, 2.0);
            let a = completed_l(&f, &chi, s, &cfg).unwrap().value;
            let b = completed_l(&f, &chi.conj(), s.conj(), &cfg).unwrap().value;
            assert!((a - b.conj()).norm() < 1e-8);
        }
    }

    #[test]
    fn stable_under_halved_grid() {
        let f = delta();
        let chi = quadratic_character(3).unwrap().unwrap();
        let s = c(0.5, 0.0);
        let a = completed_l(&f, &chi, s, &LConfig::default()).unwrap();
        let b = completed_l(&f, &chi, s, &LConfig { panels: 512, ..Default::default() }).unwrap();
        assert!(a.value.is_finite());
        assert!((a.value - b.value).norm() < 1e-6);
    }

    #[test]
    fn functional_equation_holds() {
        let f = delta();
        let cfg = LConfig::default();
        for (q, s) in [(3u64, c(0.5, 0.0)), (5, c(0.5, 1.0)), (3, c(-1.0, 2.0)), (7, c(0.2, -1.0))] {
            let chi = quadratic_character(q).unwrap().unwrap();
            let r = functional_equation_check(&f, &chi, s, &cfg).unwrap();
            assert!(r.residual < 1e-4, "q={q} s={s}: {r:?}");
            let one = c(1.0, 0.0);
            let back = functional_equation_check(&f, &chi, one - s, &cfg).unwrap();
            assert!(back.residual < 1e-4);
        }
    }

    #[test]
    fn refuses_outside_window() {
        let f = delta();
        let chi = quadratic_character(3).unwrap().unwrap();
        let cfg = LConfig::default();
        for s in [c(5.0, 0.0), c(0.5, 6.0), c(-3.0, 0.0)] {
            assert!(matches!(completed_l(&f, &chi, s, &cfg), Err(SpectralError::AccuracyNotCertified(_))));
        }
        let chi11 = quadratic_character(11).unwrap().unwrap();
        assert!(matches!(
            completed_l(&f, &chi11, c(0.5, 0.0), &cfg),
            Err(SpectralError::AccuracyNotCertified(_))
        ));
    }
}
