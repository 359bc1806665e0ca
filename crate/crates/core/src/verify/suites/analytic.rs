//! Bessel, Hankel and Weber suites.

use num_complex::Complex64;

use super::{Case, Outcome};
use crate::special::bessel::{bessel_j, jn_real};
use crate::special::hankel::{hankel_inversion_check, hankel_transform, small_a_ratio};
use crate::special::mellin::mellin_barnes_check;
use crate::special::weber::{weber_check, weber_regularized};
use crate::special::{CompactFn, QuadratureConfig, TestFunction, WeightK};
use crate::verify::params::{ConfigError, Params};
use crate::verify::report::{complex, num};

fn weight(k: u32) -> Result<WeightK, ConfigError> {
    WeightK::new(k).map_err(|e| ConfigError::Invalid(e.to_string()))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn real(lhs: f64, rhs: f64, tol: f64) -> Outcome {
    Outcome::numeric(num(lhs), num(rhs), (lhs - rhs).abs(), tol)
}

/// `Σ_{r<40} (−1)^r (x/2)^{2r+n} / (r!(r+n)!)`.
fn series_oracle(n: u32, x: f64) -> f64 {
    let mut term = (0.5 * x).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut s = 0.0;
    for r in 0..40u32 {
        s += term;
        term *= -(0.25 * x * x) / ((r + 1) as f64 * (r + 1 + n) as f64);
    }
    s
}

pub fn bessel(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let ks: Vec<u32> = p.list("k", &[12, 16])?;
    let mut cases = Vec::new();
    for &k in &ks {
        let w = weight(k)?;
        cases.push(Case::new(&[("check", "zero".into()), ("k", k.to_string())], move || {
            let v = bessel_j(w, Complex64::new(0.0, 0.0)).map_err(err)?;
            Ok(vec![Outcome::numeric(complex(v), num(0.0), v.norm(), 0.0)])
        }));
        for x in [1.0, 5.0, 20.0] {
            cases.push(Case::new(&[("check", "parity".into()), ("k", k.to_string()), ("x", num(x))], move || {
                let a = bessel_j(w, Complex64::new(-x, 0.0)).map_err(err)?;
                let b = bessel_j(w, Complex64::new(x, 0.0)).map_err(err)?;
                Ok(vec![Outcome::numeric(complex(a), complex(-b), (a + b).norm(), 1e-12 * b.norm().max(1e-300))])
            }));
        }
        cases.push(Case::new(&[("check", "series".into()), ("k", k.to_string()), ("x", "1".into())], move || {
            let v = bessel_j(w, Complex64::new(1.0, 0.0)).map_err(err)?;
            let o = series_oracle(w.order(), 1.0);
            Ok(vec![Outcome::numeric(complex(v), num(o), (v.re - o).abs() + v.im.abs(), 1e-10 * o.abs())])
        }));
        for z in [0.5, 2.0, 10.0] {
            cases.push(Case::new(&[("check", "recurrence".into()), ("k", k.to_string()), ("z", num(z))], move || {
                let n = w.order();
                let h = 1e-4;
                let d = (jn_real(n, z + h) - jn_real(n, z - h)) / (2.0 * h);
                Ok(vec![real(2.0 * d, jn_real(n - 1, z) - jn_real(n + 1, z), 1e-9)])
            }));
        }
        cases.push(Case::new(&[("check", "small-argument".into()), ("k", k.to_string())], move || {
            let n = w.order();
            let mut worst = f64::NEG_INFINITY;
            let ok = (1..=100).all(|i| {
                let y = i as f64 / 100.0;
                let excess = jn_real(n, y).abs() - y.powi(n as i32);
                worst = worst.max(excess);
                excess <= 0.0
            });
            Ok(vec![Outcome::exact(String::new(), String::new(), ok, worst.max(0.0)).evaluations(100)])
        }));
        for x in [0.01, 0.5, 1.0] {
            cases.push(Case::new(
                &[("check", "mellin-barnes".into()), ("k", k.to_string()), ("x", num(x)), ("a", "3".into())],
                move || {
                    let r = mellin_barnes_check(w, x, 3.0, &QuadratureConfig::default()).map_err(err)?;
                    Ok(vec![real(r.contour_value, r.bessel_value, 1e-8).with("contour_height", num(r.truncation))])
                },
            ));
        }
    }
    Ok(cases)
}

pub fn hankel(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let k: u32 = p.get("k", 12)?;
    let w = weight(k)?;
    let g = TestFunction::new(3.0, 1.0).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let mut cases = Vec::new();
    let base = |check: &str| vec![("check", check.to_string()), ("k", k.to_string()), ("bump", "3:1".to_string())];
    for b in [3.0, 3.5, 10.0] {
        let mut label = base("inversion");
        label.push(("b", num(b)));
        cases.push(Case::new(&label, move || {
            let r = hankel_inversion_check(&g, w, b, &QuadratureConfig::default()).map_err(err)?;
            Ok(vec![real(r.value, r.target, 1e-6).with("cutoff", num(r.cutoff))])
        }));
    }
    cases.push(Case::new(&base("self-convergence"), move || {
        let cfg = QuadratureConfig::default();
        let finer = QuadratureConfig {
            oscillation_safety: cfg.oscillation_safety / 2.0,
            ..cfg
        };
        let a = hankel_transform(&g, w, 1.0, &cfg).map_err(err)?;
        let b = hankel_transform(&g, w, 1.0, &finer).map_err(err)?;
        Ok(vec![real(a, b, 1e-9)])
    }));
    cases.push(Case::new(&base("linearity"), move || {
        let cfg = QuadratureConfig::default();
        let a = hankel_transform(&g.scaled(2.0), w, 1.0, &cfg).map_err(err)?;
        let b = 2.0 * hankel_transform(&g, w, 1.0, &cfg).map_err(err)?;
        Ok(vec![real(a, b, 1e-12 * b.abs().max(1.0))])
    }));
    for a in [1e-4, 1e-6] {
        let mut label = base("small-a");
        label.push(("a", num(a)));
        cases.push(Case::new(&label, move || {
            let r = small_a_ratio(&g, w, a, &QuadratureConfig::default()).map_err(err)?;
            // next term of the series is O(a) relative to the leading one
            Ok(vec![real(r, 1.0, 50.0 * a * g.support().1)])
        }));
    }
    Ok(cases)
}

pub fn weber(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let k: u32 = p.get("k", 12)?;
    let w = weight(k)?;
    let points = [
        (Complex64::new(1.0, 0.0), 1.0, 1.0, 1e-8),
        (Complex64::new(1.0, 0.0), 1e-3, 1.0, 1e-10),
        (Complex64::new(1.0, -0.5), 1.0, 0.7, 1e-8),
    ];
    let mut cases = Vec::new();
    for (alpha, beta, gamma, tol) in points {
        let label = [
            ("check", "closed-form".to_string()),
            ("k", k.to_string()),
            ("alpha", complex(alpha)),
            ("beta", num(beta)),
            ("gamma", num(gamma)),
        ];
        cases.push(Case::new(&label, move || {
            let r = weber_check(w, alpha, beta, gamma, &QuadratureConfig::default()).map_err(err)?;
            Ok(vec![Outcome::numeric(complex(r.integral), complex(r.closed_form), r.residual, tol)])
        }));
    }
    let label = [
        ("check", "regularized".to_string()),
        ("k", k.to_string()),
        ("alpha0", "1".to_string()),
        ("beta", "1".to_string()),
        ("gamma", "0.7".to_string()),
    ];
    cases.push(Case::new(&label, move || {
        let r = weber_regularized(w, 1.0, 1.0, 0.7, &QuadratureConfig::default()).map_err(err)?;
        let raw = (r.integrals[r.integrals.len() - 1] - r.limit).norm();
        let worst = r.residuals.iter().copied().fold(0.0, f64::max);
        // the extrapolated value must sit closer to the real-frequency limit than the last regularized one
        Ok(vec![
            Outcome::numeric(complex(r.extrapolated), complex(r.limit), r.distance, raw).with("path", "extrapolated"),
            Outcome::numeric(String::new(), String::new(), worst, 1e-8).with("path", "regularized-closed-form"),
        ])
    }));
    Ok(cases)
}
