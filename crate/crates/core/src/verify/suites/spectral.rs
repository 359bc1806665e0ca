//! Petersson, global identity, Voronoi, pipeline and L-function suites.

use std::sync::Arc;

use num_complex::Complex64;

use super::{chi_label, Case, Outcome};
use crate::characters::{primitive_characters, quadratic_character, DirichletCharacter};
use crate::modforms::delta::delta_lambda;
use crate::modforms::eigenforms;
use crate::residue::gcd;
use crate::special::bump::CompactFn;
use crate::special::{TestFunction, WeightK};
use crate::spectral::identity::{dual_weights, voronoi_check_lambda};
use crate::spectral::lfunc::{l_value, LConfig};
use crate::spectral::pipeline::{t2_check, zero_frequency_check};
use crate::spectral::{
    functional_equation_check, main_identity_check, petersson_dim1_factorization, petersson_geometric, pipeline_trace,
    SpectralConfig, Stages,
};
use crate::verify::params::{ConfigError, Params};
use crate::verify::report::{complex, num};

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn invalid(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

fn weight(k: u32) -> Result<WeightK, ConfigError> {
    WeightK::new(k).map_err(invalid)
}

fn bump(mu: f64, rho: f64) -> Result<TestFunction, ConfigError> {
    TestFunction::new(mu, rho).map_err(invalid)
}

fn spectral_cfg(p: &Params) -> Result<SpectralConfig, ConfigError> {
    let cfg = SpectralConfig {
        abs_tol: p.get("abs_tol", SpectralConfig::default().abs_tol)?,
        ..Default::default()
    };
    cfg.validate().map_err(invalid)?;
    Ok(cfg)
}

/// The trivial character mod 1 and every primitive character mod `q > 1`.
fn identity_characters(q: u64) -> Result<Vec<DirichletCharacter>, ConfigError> {
    primitive_characters(q).map_err(invalid)
}

fn quadratic(q: u64) -> Result<DirichletCharacter, ConfigError> {
    quadratic_character(q)
        .map_err(invalid)?
        .ok_or_else(|| ConfigError::Invalid(format!("no primitive quadratic character mod {q}")))
}

/// `dim S_k(SL₂(ℤ))` for even `k`.
fn cusp_dimension(k: u32) -> u32 {
    if k < 12 || k == 14 {
        0
    } else if k % 12 == 2 {
        k / 12 - 1
    } else {
        k / 12
    }
}

pub fn petersson(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let tol: f64 = p.get("tol", 1e-9)?;
    let ks: Vec<u32> = match p.get_opt::<u32>("k")? {
        Some(k) => vec![k],
        None => vec![14, 12, 16, 18, 20, 22, 26],
    };
    let mut cases = Vec::new();
    for k in ks {
        let w = weight(k)?;
        match cusp_dimension(k) {
            0 => {
                for l in 1..=3u64 {
                    for n in 1..=3u64 {
                        let label = [("check", "vanishing".into()), ("k", k.to_string()), ("l", l.to_string()), ("n", n.to_string())];
                        cases.push(Case::new(&label, move || {
                            let v = petersson_geometric(w, l, n, tol).map_err(err)?;
                            Ok(vec![Outcome::numeric(num(v.value), num(0.0), v.value.abs(), 1e-6)
                                .with("truncation", v.truncation_c)])
                        }));
                    }
                }
            }
            1 => {
                for m in 1..=12u64 {
                    for n in 1..=12u64 {
                        let label = [("check", "rank-one".into()), ("k", k.to_string()), ("m", m.to_string()), ("n", n.to_string())];
                        cases.push(Case::new(&label, move || {
                            let r = petersson_dim1_factorization(w, m, n, tol).map_err(err)?;
                            Ok(vec![Outcome::numeric(String::new(), String::new(), r, 1e-6)])
                        }));
                    }
                }
                if k == 12 {
                    let lam = delta_lambda(20).map_err(invalid)?;
                    for n in 1..=20u64 {
                        let target = lam[n as usize];
                        let label = [("check", "eigenvalue-ratio".into()), ("k", k.to_string()), ("n", n.to_string())];
                        cases.push(Case::new(&label, move || {
                            let a = petersson_geometric(w, n, 1, tol).map_err(err)?.value;
                            let b = petersson_geometric(w, 1, 1, tol).map_err(err)?.value;
                            Ok(vec![Outcome::numeric(num(a / b), num(target), (a / b - target).abs(), 1e-6)])
                        }));
                    }
                }
            }
            d => {
                return Err(ConfigError::Invalid(format!(
                    "weight {k} has a {d}-dimensional cusp space; the suite covers dimensions 0 and 1"
                )))
            }
        }
    }
    Ok(cases)
}

pub fn main_identity(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let qs: Vec<u64> = p.list("q", &[1, 3, 4, 5, 7])?;
    let ks: Vec<u32> = p.list("k", &[12, 16])?;
    let ls: Vec<u64> = p.list("l", &[1, 2, 3])?;
    let g = bump(p.get("mu", 20.0)?, p.get("rho", 10.0)?)?;
    let cfg = spectral_cfg(p)?;
    let mut cases = Vec::new();
    for &q in &qs {
        for chi in identity_characters(q)? {
            for &k in &ks {
                let w = weight(k)?;
                for &l in &ls {
                    let chi = chi.clone();
                    let label = [("q", q.to_string()), ("chi", chi_label(&chi)), ("k", k.to_string()), ("l", l.to_string())];
                    cases.push(Case::new(&label, move || {
                        let r = main_identity_check(w, &chi, l, &g, &cfg).map_err(err)?;
                        Ok(vec![Outcome::numeric(complex(r.lhs), complex(r.rhs), r.residual, 1e-6)
                            .with("terms", r.terms)
                            .with("petersson_error", num(r.petersson_error))])
                    }));
                }
            }
        }
    }
    Ok(cases)
}

pub fn voronoi(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let qs: Vec<u64> = p.list("q", &[1, 3, 5, 7, 10])?;
    let bumps: Vec<String> = p.list("bumps", &["20:10".to_string(), "10:5".to_string()])?;
    let cfg = spectral_cfg(p)?;
    let perturb = match p.raw("mutation").unwrap_or("none") {
        "none" => None,
        "perturb-lambda" => Some((p.get::<usize>("perturb_n", 12)?, p.get::<f64>("perturb", 1e-3)?)),
        m => return Err(ConfigError::BadValue { key: "mutation".into(), value: m.into() }),
    };
    let k = weight(12)?;
    let mut plan = Vec::new();
    let mut need = 0usize;
    for b in &bumps {
        let (mu, rho) = b
            .split_once(':')
            .and_then(|(a, b)| Some((a.parse::<f64>().ok()?, b.parse::<f64>().ok()?)))
            .ok_or_else(|| ConfigError::BadValue { key: "bumps".into(), value: b.clone() })?;
        let g = bump(mu, rho)?;
        for &q in &qs {
            let dual = dual_weights(&g, k, q, &cfg).map_err(invalid)?;
            need = need.max(dual.values.len()).max(*g.integer_support().end() as usize + 1);
            plan.push((b.clone(), g, q));
        }
    }
    let mut lam = (*delta_lambda(need).map_err(invalid)?).clone();
    if let Some((n, d)) = perturb {
        if n == 0 || n >= lam.len() {
            return Err(ConfigError::Invalid(format!("perturb_n = {n} outside the table")));
        }
        lam[n] += d;
    }
    let lam = Arc::new(lam);
    let mut cases = Vec::new();
    for (b, g, q) in plan {
        for a in 0..q.max(1) as i64 {
            if gcd(a, q as i64) != 1 {
                continue;
            }
            let lam = lam.clone();
            let label = [("bump", b.clone()), ("q", q.to_string()), ("a", a.to_string())];
            cases.push(Case::new(&label, move || {
                let r = voronoi_check_lambda(k, &lam, q, a, &g, &cfg).map_err(err)?;
                Ok(vec![Outcome::numeric(complex(r.lhs), complex(r.rhs), r.residual, 1e-6).with("terms", r.terms)])
            }));
        }
    }
    Ok(cases)
}

fn triple(s: &str) -> Option<(u64, u32, u64)> {
    let v: Vec<&str> = s.split(':').collect();
    if v.len() != 3 {
        return None;
    }
    Some((v[0].parse().ok()?, v[1].parse().ok()?, v[2].parse().ok()?))
}

pub fn pipeline(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let configs: Vec<String> = p.list("configs", &["3:12:1".to_string(), "5:12:2".to_string()])?;
    let g = bump(p.get("mu", 8.0)?, p.get("rho", 4.0)?)?;
    let stage_d = p.flag("stage_d", true)?;
    let cfg = spectral_cfg(p)?;
    let mut cases = Vec::new();
    for c in &configs {
        let (q, k, l) = triple(c).ok_or_else(|| ConfigError::BadValue { key: "configs".into(), value: c.clone() })?;
        let w = weight(k)?;
        let chi = quadratic(q)?;
        let label = [("check", "stages".to_string()), ("q", q.to_string()), ("k", k.to_string()), ("l", l.to_string())];
        let chi2 = chi.clone();
        cases.push(Case::new(&label, move || {
            let t = pipeline_trace(w, &chi2, l, &g, &cfg, Stages { stage_d }).map_err(err)?;
            let mut out = vec![Outcome::numeric(complex(t.stage_a), complex(t.stage_b), t.max_pairwise_residual, 1e-5)
                .with("stage", "abc")
                .with("stage_c", complex(t.stage_c))
                .with("c_cutoff_b", t.cert_b.outer)
                .with("m_cutoff_c", t.cert_c.outer)];
            if let (Some(d), Some(r)) = (t.stage_d, t.max_residual_d) {
                out.push(Outcome::numeric(complex(d), complex(t.stage_a), r, 1e-4).with("stage", "d"));
            }
            Ok(out)
        }));
        let label = [("check", "zero-frequency".to_string()), ("q", q.to_string()), ("k", k.to_string()), ("l", l.to_string())];
        let chi2 = chi.clone();
        cases.push(Case::new(&label, move || {
            let z = zero_frequency_check(w, &chi2, l, &g, &cfg).map_err(err)?;
            Ok(vec![Outcome::numeric(complex(z.from_sum), complex(z.closed_form), z.residual, 1e-10)])
        }));
        // the T2 branch vanishes unless χ(ℓ)g(ℓ) ≠ 0
        let l2 = (l..)
            .take(1000)
            .find(|&x| gcd(x as i64, q as i64) == 1 && g.eval(x as f64).abs() > 1e-3)
            .unwrap_or(l);
        let label = [("check", "t2".to_string()), ("q", q.to_string()), ("k", k.to_string()), ("l", l2.to_string())];
        cases.push(Case::new(&label, move || {
            let t = t2_check(w, &chi, l2, &g, &cfg).map_err(err)?;
            Ok(vec![Outcome::numeric(complex(t.branch), complex(t.target), t.residual, 1e-8)])
        }));
    }
    Ok(cases)
}

pub fn functional_equation(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let qs: Vec<u64> = p.list("q", &[3, 5])?;
    let ims: Vec<f64> = p.list("im", &[0.0, 1.0])?;
    let k: u32 = p.get("k", 12)?;
    let f = Arc::new(
        eigenforms(k, 2000)
            .map_err(invalid)?
            .into_iter()
            .next()
            .ok_or_else(|| ConfigError::Invalid(format!("no eigenform of weight {k}")))?,
    );
    let cfg = LConfig::default();
    let mut cases = Vec::new();
    for &q in &qs {
        let chi = quadratic(q)?;
        for &t in &ims {
            let s = Complex64::new(0.5, t);
            let (f2, chi2) = (f.clone(), chi.clone());
            let label = [("check", "functional-equation".into()), ("q", q.to_string()), ("k", k.to_string()), ("s", complex(s))];
            cases.push(Case::new(&label, move || {
                let r = functional_equation_check(&f2, &chi2, s, &cfg).map_err(err)?;
                Ok(vec![Outcome::numeric(complex(r.lhs), complex(r.rhs), r.residual, 1e-4)
                    .with("error_bound", num(r.error_bound))])
            }));
        }
        if k == 12 {
            for t in [0.0, 1.0] {
                let s = Complex64::new(2.0, t);
                let (f2, chi2) = (f.clone(), chi.clone());
                let label = [("check", "dirichlet-series".into()), ("q", q.to_string()), ("k", k.to_string()), ("s", complex(s))];
                cases.push(Case::new(&label, move || {
                    let lam = delta_lambda(200_000).map_err(err)?;
                    let series: Complex64 = (1..lam.len())
                        .map(|n| chi2.value(n as i64) * lam[n] * Complex64::new(n as f64, 0.0).powc(-s))
                        .sum();
                    let (v, _) = l_value(&f2, &chi2, s, &cfg).map_err(err)?;
                    Ok(vec![Outcome::numeric(complex(v), complex(series), (v - series).norm(), 1e-6)])
                }));
            }
        }
    }
    Ok(cases)
}
