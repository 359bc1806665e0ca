//! Composite Gauss–Legendre quadrature with oscillation-sized panels.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SpecialError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    pub nodes_per_panel: usize,
    /// Panel length in units of the local period of the fastest phase.
    pub oscillation_safety: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_panels: 200_000,
            nodes_per_panel: 20,
            oscillation_safety: 2.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), SpecialError> {
        let ok = self.abs_tol > 0.0
            && self.abs_tol < 1.0
            && self.rel_tol > 0.0
            && self.rel_tol < 1.0
            && self.max_panels > 0
            && self.nodes_per_panel > 0
            && self.oscillation_safety > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SpecialError::InvalidParams(format!("bad quadrature config {self:?}")))
        }
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.nodes_per_panel = n;
        self
    }

    pub fn with_abs_tol(mut self, t: f64) -> Self {
        self.abs_tol = t;
        self
    }
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn build_gl(n: usize) -> GaussLegendre {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussLegendre { nodes, weights }
}

pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut g = cache.lock().expect("quadrature cache poisoned");
    g.entry(n).or_insert_with(|| Arc::new(build_gl(n.max(1)))).clone()
}

/// Splits `[a, b]` into panels no longer than `safety × period(x)` at their left end,
/// with at least `min_panels` panels.
pub fn panel_breaks(
    a: f64,
    b: f64,
    min_panels: usize,
    safety: f64,
    period: impl Fn(f64) -> f64,
    max_panels: usize,
) -> Result<Vec<f64>, SpecialError> {
    let base = (b - a) / min_panels.max(1) as f64;
    let mut out = vec![a];
    let mut x = a;
    while x < b {
        let p = period(x);
        let h = if p.is_finite() && p > 0.0 { base.min(safety * p) } else { base };
        x = (x + h).min(b);
        if b - x < 1e-12 * (b - a) {
            x = b;
        }
        out.push(x);
        if out.len() > max_panels + 1 {
            return Err(SpecialError::ToleranceNotMet(format!(
                "more than {max_panels} panels needed on [{a}, {b}]"
            )));
        }
    }
    Ok(out)
}

/// `Σ_panels Σ_nodes w f(x)` for real integrands.
pub fn integrate_panels(breaks: &[f64], n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let gl = gauss_legendre(n);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut s = 0.0;
        for (t, wt) in gl.nodes.iter().zip(&gl.weights) {
            s += wt * f(c + h * t);
        }
        total += h * s;
    }
    total
}

pub fn integrate_panels_complex(breaks: &[f64], n: usize, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
    let gl = gauss_legendre(n);
    let mut total = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut s = Complex64::new(0.0, 0.0);
        for (t, wt) in gl.nodes.iter().zip(&gl.weights) {
            s += f(c + h * t) * *wt;
        }
        total += s * h;
    }
    total
}

/// Panel rule with a bisection refinement check; errors when the tolerance cannot be met.
pub fn integrate_adaptive(
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
    period: impl Fn(f64) -> f64,
    min_panels: usize,
    f: impl Fn(f64) -> f64,
) -> Result<f64, SpecialError> {
    cfg.validate()?;
    let breaks = panel_breaks(a, b, min_panels, cfg.oscillation_safety, &period, cfg.max_panels)?;
    let coarse = integrate_panels(&breaks, cfg.nodes_per_panel, &f);
    let mut fine_breaks = Vec::with_capacity(2 * breaks.len());
    for w in breaks.windows(2) {
        fine_breaks.push(w[0]);
        fine_breaks.push(0.5 * (w[0] + w[1]));
    }
    fine_breaks.push(b);
    if fine_breaks.len() > cfg.max_panels + 1 {
        return Err(SpecialError::ToleranceNotMet(format!("panel budget {} exhausted", cfg.max_panels)));
    }
    let fine = integrate_panels(&fine_breaks, cfg.nodes_per_panel, &f);
    let err = (fine - coarse).abs();
    if err <= cfg.abs_tol.max(cfg.rel_tol * fine.abs()) {
        return Ok(fine);
    }
    let doubled = QuadratureConfig {
        oscillation_safety: cfg.oscillation_safety * 0.5,
        ..*cfg
    };
    if fine_breaks.len() * 2 > cfg.max_panels {
        return Err(SpecialError::ToleranceNotMet(format!(
            "estimated error {err:e} above tolerance after {} panels",
            fine_breaks.len() - 1
        )));
    }
    integrate_adaptive(a, b, &doubled, period, min_panels * 2, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials() {
        for n in [1usize, 2, 5, 10, 20, 33] {
            let gl = gauss_legendre(n);
            let wsum: f64 = gl.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13);
            for d in 0..(2 * n) {
                let s: f64 = gl.nodes.iter().zip(&gl.weights).map(|(x, w)| w * x.powi(d as i32)).sum();
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((s - exact).abs() < 1e-13, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn oscillatory_integral() {
        let cfg = QuadratureConfig::default();
        let w = 200.0;
        let v = integrate_adaptive(0.0, 3.0, &cfg, |_| 2.0 * PI / w, 4, |x| (w * x).cos()).unwrap();
        assert!((v - (3.0 * w).sin() / w).abs() < 1e-13);
    }

    #[test]
    fn panel_budget_is_enforced() {
        let cfg = QuadratureConfig {
            max_panels: 10,
            ..Default::default()
        };
        let r = integrate_adaptive(0.0, 10.0, &cfg, |_| 0.01, 4, |x| x.sin());
        assert!(matches!(r, Err(SpecialError::ToleranceNotMet(_))));
    }
}
