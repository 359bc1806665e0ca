//! The Hankel transform `(H_k F)(a) = 2π ∫ F(x) J_{k−1}(4π√(ax)) dx`.

use std::f64::consts::PI;

use super::bessel::{bessel_j_real, jn_bound, WeightK};
use super::bump::CompactFn;
use super::quad::{gauss_legendre, integrate_adaptive, integrate_panels, panel_breaks, QuadratureConfig};
use crate::error::SpecialError;

const MIN_PANELS: usize = 16;

/// Local period in `x` of `x ↦ 4π√(ax)`.
fn x_period(a: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| (x / a).sqrt()
}

pub fn hankel_transform(f: &dyn CompactFn, k: WeightK, a: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    if !(a > 0.0) {
        return Err(SpecialError::InvalidParams(format!("Hankel transform needs a > 0, got {a}")));
    }
    let (lo, hi) = f.support();
    let v = integrate_adaptive(lo, hi, cfg, x_period(a), MIN_PANELS, |x| {
        f.eval(x) * bessel_j_real(k, 4.0 * PI * (a * x).sqrt())
    })?;
    Ok(2.0 * PI * v)
}

/// Fixed-node evaluator of `H_k F` on `0 < a ≤ a_max`, reusing the weighted samples of `F`.
#[derive(Debug, Clone)]
pub struct HankelEvaluator {
    k: WeightK,
    a_max: f64,
    sqrt_x: Vec<f64>,
    wf: Vec<f64>,
}

impl HankelEvaluator {
    pub fn new(f: &dyn CompactFn, k: WeightK, a_max: f64, cfg: &QuadratureConfig) -> Result<Self, SpecialError> {
        cfg.validate()?;
        let (lo, hi) = f.support();
        let a_ref = a_max.max(1.0);
        let breaks = panel_breaks(lo, hi, MIN_PANELS, cfg.oscillation_safety, x_period(a_ref), cfg.max_panels)?;
        let gl = gauss_legendre(cfg.nodes_per_panel);
        let mut sqrt_x = Vec::new();
        let mut wf = Vec::new();
        for w in breaks.windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            let h = 0.5 * (w[1] - w[0]);
            for (t, wt) in gl.nodes.iter().zip(&gl.weights) {
                let x = c + h * t;
                let fx = f.eval(x);
                if fx != 0.0 {
                    sqrt_x.push(x.sqrt());
                    wf.push(2.0 * PI * h * wt * fx);
                }
            }
        }
        Ok(Self { k, a_max, sqrt_x, wf })
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    pub fn nodes(&self) -> usize {
        self.wf.len()
    }

    pub fn eval(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        let c = 4.0 * PI * a.sqrt();
        self.sqrt_x
            .iter()
            .zip(&self.wf)
            .map(|(s, w)| w * bessel_j_real(self.k, c * s))
            .sum()
    }
}

/// Piecewise Chebyshev interpolant of `s ↦ H_k F(s²)` on `0 ≤ s ≤ √a_max`.
///
/// `H_k F(s²)` is a superposition of `J_{k−1}(4πs√x)` with `√x ≤ √x_max`, so one
/// panel per local period `1/(2√x_max)` with 31 Chebyshev points resolves it to
/// rounding level.
#[derive(Debug, Clone)]
pub struct HankelInterpolant {
    s_max: f64,
    width: f64,
    values: Vec<f64>,
    a_max: f64,
}

pub const INTERP_POINTS: usize = 31;

fn cheb_points() -> [f64; INTERP_POINTS] {
    let mut t = [0.0; INTERP_POINTS];
    let d = (INTERP_POINTS - 1) as f64;
    for (j, v) in t.iter_mut().enumerate() {
        *v = -(PI * j as f64 / d).cos();
    }
    t
}

impl HankelInterpolant {
    pub fn new(f: &dyn CompactFn, k: WeightK, a_max: f64, cfg: &QuadratureConfig) -> Result<Self, SpecialError> {
        let (_, hi) = f.support();
        let s_max = a_max.sqrt();
        let width = 1.0 / (2.0 * hi.sqrt());
        let panels = (s_max / width).ceil().max(1.0) as usize;
        let width = s_max / panels as f64;
        let ev = HankelEvaluator::new(f, k, a_max * 1.01, cfg)?;
        let t = cheb_points();
        let pts: Vec<f64> = (0..panels)
            .flat_map(|p| {
                let lo = p as f64 * width;
                t.iter().map(move |x| lo + 0.5 * width * (x + 1.0))
            })
            .collect();
        let values = crate::exec::par_map(&pts, |s| ev.eval(s * s));
        Ok(Self {
            s_max,
            width,
            values,
            a_max,
        })
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    /// `H_k F(a)`; zero beyond the table.
    pub fn eval(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        let s = a.sqrt();
        if s > self.s_max {
            return 0.0;
        }
        let panels = self.values.len() / INTERP_POINTS;
        let p = ((s / self.width) as usize).min(panels - 1);
        let x = 2.0 * (s - p as f64 * self.width) / self.width - 1.0;
        let v = &self.values[p * INTERP_POINTS..(p + 1) * INTERP_POINTS];
        let d = (INTERP_POINTS - 1) as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for (j, vj) in v.iter().enumerate() {
            let tj = -(PI * j as f64 / d).cos();
            let diff = x - tj;
            if diff == 0.0 {
                return *vj;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == INTERP_POINTS - 1 {
                w *= 0.5;
            }
            let c = w / diff;
            num += c * vj;
            den += c;
        }
        num / den
    }
}

/// `H_k F(a) / (leading small-a term)`; tends to 1 as `a → 0+`.
pub fn small_a_ratio(f: &dyn CompactFn, k: WeightK, a: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    let n = k.order() as i32;
    let (lo, hi) = f.support();
    let moment = integrate_panels(
        &panel_breaks(lo, hi, MIN_PANELS, 1.0, |_| f64::INFINITY, cfg.max_panels)?,
        cfg.nodes_per_panel,
        |x| f.eval(x) * x.powf(n as f64 / 2.0),
    );
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    let lead = 2.0 * PI * (2.0 * PI).powi(n) * a.powf(n as f64 / 2.0) / fact * moment;
    Ok(hankel_transform(f, k, a, cfg)? / lead)
}

/// Uniform bound on `|H_k F(a)|` from `|J_n(y)| ≤ (y/2)^n/n!`, useful for small `a`.
pub fn small_a_bound(f: &dyn CompactFn, k: WeightK, a: f64) -> f64 {
    let (lo, hi) = f.support();
    let sup = f.eval(0.5 * (lo + hi)).abs().max(f.eval(lo + 0.25 * (hi - lo)).abs());
    2.0 * PI * (hi - lo) * sup * jn_bound(k.order(), 4.0 * PI * (a * hi).sqrt())
}

/// Smallest scanned `A₀` with `|H_k F(a)| < tol` for every scanned `a ≥ A₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayScan {
    pub threshold: f64,
    pub scanned_to: f64,
    pub max_beyond: f64,
}

pub fn decay_scan(f: &dyn CompactFn, k: WeightK, tol: f64, cfg: &QuadratureConfig) -> Result<DecayScan, SpecialError> {
    let (_, hi) = f.support();
    let mut start = 1.0f64;
    let mut last_big = 0.0f64;
    let mut quiet_blocks = 0;
    let mut max_beyond = 0.0f64;
    while quiet_blocks < 2 {
        let end = 2.0 * start;
        if end > 1e9 {
            return Err(SpecialError::ToleranceNotMet(format!("no decay below {tol:e} up to a = {end:e}")));
        }
        let ev = HankelEvaluator::new(f, k, end, cfg)?;
        let cycles = 2.0 * hi.sqrt() * (end.sqrt() - start.sqrt());
        let samples = (8.0 * cycles).ceil().max(64.0) as usize;
        let mut block_max = 0.0f64;
        for i in 0..=samples {
            let s = start.sqrt() + (end.sqrt() - start.sqrt()) * i as f64 / samples as f64;
            let a = s * s;
            let v = ev.eval(a).abs();
            if v >= tol {
                last_big = a;
                max_beyond = 0.0;
            } else {
                max_beyond = max_beyond.max(v);
            }
            block_max = block_max.max(v);
        }
        if block_max < tol {
            quiet_blocks += 1;
        } else {
            quiet_blocks = 0;
        }
        start = end;
    }
    Ok(DecayScan {
        threshold: last_big,
        scanned_to: start,
        max_beyond,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionCheck {
    pub value: f64,
    pub target: f64,
    pub residual: f64,
    pub cutoff: f64,
}

/// Level below which the inner transform is dropped from the outer integral.
pub const INVERSION_TAIL_TOL: f64 = 1e-10;

/// `|(H_k H_k g)(b) − g(b)|` with the outer integral computed in `s = √a`.
pub fn hankel_inversion_check(
    g: &dyn CompactFn,
    k: WeightK,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<InversionCheck, SpecialError> {
    if !(b > 0.0) {
        return Err(SpecialError::InvalidParams(format!("inversion point must be positive, got {b}")));
    }
    let scan = decay_scan(g, k, INVERSION_TAIL_TOL, cfg)?;
    let cutoff = scan.threshold.max(1.0);
    let inner = HankelEvaluator::new(g, k, cutoff, cfg)?;
    let (_, hi) = g.support();
    let s_max = cutoff.sqrt();
    let period = 1.0 / (2.0 * (b.sqrt() + hi.sqrt()));
    let breaks = panel_breaks(0.0, s_max, MIN_PANELS, cfg.oscillation_safety, |_| period, cfg.max_panels)?;
    let value = 2.0
        * PI
        * integrate_panels(&breaks, cfg.nodes_per_panel, |s| {
            let a = s * s;
            2.0 * s * inner.eval(a) * bessel_j_real(k, 4.0 * PI * s * b.sqrt())
        });
    let target = g.eval(b);
    Ok(InversionCheck {
        value,
        target,
        residual: (value - target).abs(),
        cutoff,
    })
}
