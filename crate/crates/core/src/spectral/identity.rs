//! The twisted global identity for the harmonic average and the twisted Voronoi formula.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::petersson::shared_table;
use crate::characters::{gauss_sum, DirichletCharacter};
use crate::error::SpectralError;
use crate::modforms::Eigenform;
use crate::residue::{gcd, mod_inverse, rem};
use crate::special::hankel::HankelInterpolant;
use crate::special::{CompactFn, QuadratureConfig, TestFunction, WeightK};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub quad: QuadratureConfig,
    /// Target accuracy of each side.
    pub abs_tol: f64,
    /// Dual sums stop once `|H_k g(n/q²)| < abs_tol/(safety·n)` for `window` consecutive `n`.
    pub safety: f64,
    pub window: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            abs_tol: 1e-7,
            safety: 10.0,
            window: 20,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<(), SpectralError> {
        self.quad.validate()?;
        if !(self.abs_tol > 0.0 && self.safety >= 1.0 && self.window >= 1) {
            return Err(SpectralError::InvalidParams(format!("bad spectral config {self:?}")));
        }
        Ok(())
    }
}

pub(crate) fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// `e_q(a)` with `a` reduced exactly first.
pub(crate) fn e_q(a: i64, q: u64) -> Complex64 {
    e(rem(a, q as i64) as f64 / q as f64)
}

fn table_key(g: &TestFunction, k: WeightK, cfg: &QuadratureConfig) -> [u64; 6] {
    [
        k.k() as u64,
        g.center.to_bits(),
        g.half_width.to_bits(),
        g.amplitude.to_bits(),
        cfg.nodes_per_panel as u64,
        cfg.oscillation_safety.to_bits(),
    ]
}

/// Shared interpolant of `H_k g` covering at least `[0, a_max]`.
pub fn hankel_table(
    g: &TestFunction,
    k: WeightK,
    a_max: f64,
    cfg: &QuadratureConfig,
) -> Result<Arc<HankelInterpolant>, SpectralError> {
    static TABLES: OnceLock<Mutex<HashMap<[u64; 6], Arc<HankelInterpolant>>>> = OnceLock::new();
    let reg = TABLES.get_or_init(Default::default);
    let key = table_key(g, k, cfg);
    if let Some(t) = reg.lock().expect("registry poisoned").get(&key) {
        if t.a_max() >= a_max {
            return Ok(t.clone());
        }
    }
    let mut size = 256.0f64;
    while size < a_max {
        size *= 2.0;
    }
    let t = Arc::new(HankelInterpolant::new(g, k, size, cfg)?);
    reg.lock().expect("registry poisoned").insert(key, t.clone());
    Ok(t)
}

/// `(H_k g)(n/q²)` for `n = 1, 2, …` up to the windowed cutoff; index 0 is unused.
#[derive(Debug, Clone)]
pub struct DualWeights {
    pub values: Vec<f64>,
    /// Largest `|H_k g|` inside the closing window.
    pub window_max: f64,
}

pub fn dual_weights(g: &TestFunction, k: WeightK, q: u64, cfg: &SpectralConfig) -> Result<DualWeights, SpectralError> {
    let q2 = (q * q) as f64;
    let (lo, _) = g.support();
    // below the turning point J_{k−1}(4π√(ax)) is small for every x in the support
    let a_turn = (k.order() as f64 / (4.0 * PI)).powi(2) / lo;
    let mut a_max = 1024.0f64.max(2.0 * a_turn);
    loop {
        let h = hankel_table(g, k, a_max, &cfg.quad)?;
        let mut values = vec![0.0];
        let mut quiet = 0usize;
        let mut window_max = 0.0f64;
        let mut n = 1usize;
        while (n as f64) / q2 <= h.a_max() {
            let a = n as f64 / q2;
            let v = h.eval(a);
            values.push(v);
            if a > a_turn && v.abs() < cfg.abs_tol / (cfg.safety * n as f64) {
                quiet += 1;
                window_max = window_max.max(v.abs());
                if quiet >= cfg.window {
                    return Ok(DualWeights { values, window_max });
                }
            } else {
                quiet = 0;
                window_max = 0.0;
            }
            n += 1;
        }
        a_max = 2.0 * h.a_max();
        if a_max > 1e6 {
            return Err(SpectralError::ToleranceNotMet(format!(
                "H_k g has not decayed below the window threshold by a = {a_max:e}"
            )));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResult {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Number of dual terms kept.
    pub terms: usize,
    /// Certified bound on the error from truncating the Petersson sums.
    pub petersson_error: f64,
}

fn require_primitive(chi: &DirichletCharacter) -> Result<(), SpectralError> {
    if !chi.is_primitive() {
        return Err(SpectralError::InvalidParams(format!(
            "character mod {} must be primitive",
            chi.modulus()
        )));
    }
    Ok(())
}

/// `|LHS − RHS|` with `LHS = Σ χ(n)g(n)G(ℓ,n)` and `RHS = i^k(ε²/q)Σ χ̄(n)G(ℓ,n)(H_k g)(n/q²)`.
pub fn main_identity_check(
    k: WeightK,
    chi: &DirichletCharacter,
    l: u64,
    g: &TestFunction,
    cfg: &SpectralConfig,
) -> Result<IdentityResult, SpectralError> {
    cfg.validate()?;
    require_primitive(chi)?;
    if l == 0 {
        return Err(SpectralError::InvalidParams("ℓ must be positive".into()));
    }
    let q = chi.modulus();
    let eps = gauss_sum(chi).epsilon;
    let dual = dual_weights(g, k, q, cfg)?;
    let n_dual = dual.values.len() - 1;
    let support: Vec<usize> = g.integer_support().map(|n| n as usize).collect();
    let n_max = n_dual.max(support.last().copied().unwrap_or(0));
    // the Petersson errors of the two sides together stay below abs_tol/10
    let budget = cfg.abs_tol / 20.0;
    let w_dual = |n: usize| dual.values.get(n).map_or(0.0, |v| v.abs()) / q as f64;
    let w_lhs = |n: usize| if support.contains(&n) { g.eval(n as f64).abs() } else { 0.0 };
    let tol = |n: usize| {
        let a = budget / (n_dual.max(1) as f64 * w_dual(n)).max(1e-300);
        let b = budget / (support.len().max(1) as f64 * w_lhs(n)).max(1e-300);
        a.min(b).min(1e6)
    };
    let table = shared_table(k, l);
    let mut t = table.lock().expect("Petersson table poisoned");
    t.ensure(n_max, tol)?;
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for &n in &support {
        let gv = g.eval(n as f64);
        lhs += chi.value(n as i64) * gv * t.value(n);
        err += gv.abs() * t.tail_bound(n);
    }
    let mut dual_sum = Complex64::new(0.0, 0.0);
    for n in 1..=n_dual {
        let h = dual.values[n];
        if h != 0.0 {
            dual_sum += chi.value(n as i64).conj() * t.value(n) * h;
            err += w_dual(n) * t.tail_bound(n);
        }
    }
    let rhs = dual_sum * eps * eps * (k.i_pow_k() / q as f64);
    Ok(IdentityResult {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        terms: n_dual,
        petersson_error: err,
    })
}

/// Voronoi check from a table of normalized eigenvalues `λ(0..)` of a weight-`k` form.
pub fn voronoi_check_lambda(
    k: WeightK,
    lambda: &[f64],
    q: u64,
    a: i64,
    g: &TestFunction,
    cfg: &SpectralConfig,
) -> Result<IdentityResult, SpectralError> {
    cfg.validate()?;
    if q == 0 || gcd(a, q as i64) != 1 {
        return Err(SpectralError::InvalidParams(format!("need gcd(a, q) = 1, got a={a}, q={q}")));
    }
    let abar = mod_inverse(a, q as i64).map_err(|e| SpectralError::InvalidParams(e.to_string()))?;
    let dual = dual_weights(g, k, q, cfg)?;
    let n_dual = dual.values.len() - 1;
    let hi = g.integer_support().end().to_owned() as usize;
    let need = n_dual.max(hi);
    if lambda.len() <= need {
        return Err(SpectralError::Modform(crate::error::ModformError::PrecisionExhausted {
            need,
            have: lambda.len().saturating_sub(1),
        }));
    }
    let mut lhs = Complex64::new(0.0, 0.0);
    for n in g.integer_support() {
        lhs += e_q(a * n as i64, q) * (lambda[n as usize] * g.eval(n as f64));
    }
    let mut s = Complex64::new(0.0, 0.0);
    for n in 1..=n_dual {
        s += e_q(-abar * n as i64, q) * (lambda[n] * dual.values[n]);
    }
    let rhs = s * (k.i_pow_k() / q as f64);
    Ok(IdentityResult {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        terms: n_dual,
        petersson_error: 0.0,
    })
}

/// `|Σ λ(n)e_q(an)g(n) − (i^k/q) Σ λ(n)e_q(−ān)(H_k g)(n/q²)|`.
pub fn voronoi_check(
    f: &Eigenform,
    q: u64,
    a: i64,
    g: &TestFunction,
    cfg: &SpectralConfig,
) -> Result<IdentityResult, SpectralError> {
    let k = WeightK::new(f.weight)?;
    voronoi_check_lambda(k, &f.lambda, q, a, g, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{quadratic_character, DirichletCharacter};
    use crate::modforms::delta::delta_lambda;

    fn w(k: u32) -> WeightK {
        WeightK::new(k).unwrap()
    }

    #[test]
    fn untwisted_identity() {
        let chi = DirichletCharacter::principal(1).unwrap();
        let g = TestFunction::new(10.0, 5.0).unwrap();
        let r = main_identity_check(w(12), &chi, 1, &g, &SpectralConfig::default()).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
        assert!(r.lhs.norm() > 1e-2);
    }

    #[test]
    fn quadratic_mod_5() {
        let chi = quadratic_character(5).unwrap().unwrap();
        let g = TestFunction::new(20.0, 10.0).unwrap();
        let r = main_identity_check(w(12), &chi, 2, &g, &SpectralConfig::default()).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
    }

    #[test]
    fn no_integer_points() {
        let chi = DirichletCharacter::principal(1).unwrap();
        let g = TestFunction::new(0.5, 0.4).unwrap();
        let r = main_identity_check(w(12), &chi, 1, &g, &SpectralConfig::default()).unwrap();
        assert_eq!(r.lhs, Complex64::new(0.0, 0.0));
        assert!(r.rhs.norm() < 1e-6, "{r:?}");
    }

    #[test]
    fn voronoi_delta() {
        let g = TestFunction::new(10.0, 5.0).unwrap();
        let cfg = SpectralConfig::default();
        let lam = delta_lambda(200_000).unwrap();
        let r = voronoi_check_lambda(w(12), &lam, 1, 0, &g, &cfg).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
        let r = voronoi_check_lambda(w(12), &lam, 5, 2, &g, &cfg).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
        let r2 = voronoi_check_lambda(w(12), &lam, 5, 2, &g.scaled(2.0), &cfg).unwrap();
        assert!((r2.lhs - 2.0 * r.lhs).norm() < 1e-12);
        assert!(r2.residual < 2e-6);
        let mut bad = lam.to_vec();
        bad[12] += 1e-3;
        assert!(voronoi_check_lambda(w(12), &bad, 5, 2, &g, &cfg).unwrap().residual >= 1e-4);
    }
}
