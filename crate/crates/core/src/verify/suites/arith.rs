//! Exact-sum suites.

use std::sync::Arc;

use super::{chi_label, Case, Outcome};
use crate::characters::{character_group, gauss_sum, primitive_characters, primitive_twist_relation, DirichletCharacter};
use crate::expsums::{
    selberg_factorization_check, verify_dft_duality, verify_multiplicativity, verify_reciprocity, verify_support_claim,
    CharSumParams, DftContext, DualityVariant, PhaseSign,
};
use crate::residue::{gcd, smooth_over};
use crate::verify::params::{ConfigError, Params};
use crate::verify::report::{complex, num};
use crate::verify::rng::SweepRng;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn characters(q: u64) -> Result<Vec<DirichletCharacter>, ConfigError> {
    character_group(q).map_err(|e| ConfigError::Invalid(e.to_string()))
}

fn primitives(q: u64) -> Result<Vec<DirichletCharacter>, ConfigError> {
    primitive_characters(q).map_err(|e| ConfigError::Invalid(e.to_string()))
}

/// Nonzero `x` with `|x| ≤ bound` and `gcd(x, r) = 1`.
fn draw_unit(rng: &mut SweepRng, r: u64, bound: i64) -> i64 {
    loop {
        let x = rng.range(-bound, bound);
        if x != 0 && gcd(x, r as i64) == 1 {
            return x;
        }
    }
}

pub fn reciprocity(p: &Params, seed: u64) -> Result<Vec<Case>, ConfigError> {
    let r_max: u64 = p.get("r_max", 30)?;
    let ab_max: u64 = p.get("ab_max", 200)?;
    let samples: usize = p.get("samples", 8)?;
    let sign = match p.raw("mutation").unwrap_or("none") {
        "none" => PhaseSign::Standard,
        "flip-sign" => PhaseSign::Flipped,
        m => return Err(ConfigError::BadValue { key: "mutation".into(), value: m.into() }),
    };
    let mut rng = SweepRng::new(seed);
    let mut cases = Vec::new();
    for r in 1..=r_max {
        let smooth = smooth_over(r, ab_max);
        for chi in characters(r)? {
            for &a in &smooth {
                for &b in &smooth {
                    if a * b > ab_max {
                        continue;
                    }
                    let draws: Vec<(i64, i64, i64)> = (0..samples)
                        .map(|_| (rng.range(-50, 50), draw_unit(&mut rng, r, 60), draw_unit(&mut rng, r, 60)))
                        .collect();
                    let chi = chi.clone();
                    let label = [("r", r.to_string()), ("chi", chi_label(&chi)), ("a", a.to_string()), ("b", b.to_string())];
                    cases.push(Case::new(&label, move || {
                        let mut all = true;
                        let mut worst = 0.0f64;
                        let mut last = None;
                        for &(h, u, v) in &draws {
                            let prm = CharSumParams::new(chi.clone(), h, a, u, b, v).map_err(err)?;
                            let c = verify_reciprocity(&prm, sign).map_err(err)?;
                            all &= c.exact;
                            worst = worst.max(c.residual);
                            last = Some(c);
                        }
                        let c = last.ok_or("no samples")?;
                        Ok(vec![Outcome::exact(complex(c.lhs), complex(c.rhs), all, worst)
                            .with("samples", draws.len())
                            .evaluations(draws.len() as u64)])
                    }));
                }
            }
        }
    }
    Ok(cases)
}

pub fn multiplicativity(p: &Params, seed: u64) -> Result<Vec<Case>, ConfigError> {
    let bound: u64 = p.get("r1r2_max", 105)?;
    let samples: usize = p.get("samples", 2)?;
    let mut rng = SweepRng::new(seed);
    let mut cases = Vec::new();
    for r1 in 1..=bound {
        for r2 in r1 + 1..=bound / r1 {
            if gcd(r1 as i64, r2 as i64) != 1 {
                continue;
            }
            let (s1, s2) = (smooth_over(r1, (r1 * r1).min(1000)), smooth_over(r2, (r2 * r2).min(1000)));
            let c1 = Arc::new(characters(r1)?);
            let c2 = Arc::new(characters(r2)?);
            for i in 0..c1.len() {
                for j in 0..c2.len() {
                    let pick = |rng: &mut SweepRng, s: &[u64]| s[rng.below(s.len() as u64) as usize];
                    let draws: Vec<[i64; 7]> = (0..samples)
                        .map(|_| {
                            [
                                pick(&mut rng, &s1) as i64,
                                pick(&mut rng, &s1) as i64,
                                pick(&mut rng, &s2) as i64,
                                pick(&mut rng, &s2) as i64,
                                rng.range(-30, 30),
                                draw_unit(&mut rng, r1 * r2, 40),
                                draw_unit(&mut rng, r1 * r2, 40),
                            ]
                        })
                        .collect();
                    let (c1, c2) = (c1.clone(), c2.clone());
                    let label = [
                        ("r1", r1.to_string()),
                        ("r2", r2.to_string()),
                        ("chi1", chi_label(&c1[i])),
                        ("chi2", chi_label(&c2[j])),
                    ];
                    cases.push(Case::new(&label, move || {
                        let (mut first, mut second, mut worst) = (true, true, 0.0f64);
                        for d in &draws {
                            let m = verify_multiplicativity(
                                &c1[i], &c2[j], d[0] as u64, d[1] as u64, d[2] as u64, d[3] as u64, d[4], d[5], d[6],
                            )
                            .map_err(err)?;
                            first &= m.first;
                            second &= m.second;
                            worst = worst.max(m.residual);
                        }
                        let n = draws.len() as u64;
                        Ok(vec![
                            Outcome::exact(String::new(), String::new(), first, worst)
                                .with("variant", "first")
                                .evaluations(n),
                            Outcome::exact(String::new(), String::new(), second, worst)
                                .with("variant", "second")
                                .evaluations(n),
                        ])
                    }));
                }
            }
        }
    }
    Ok(cases)
}

pub fn support(p: &Params, seed: u64) -> Result<Vec<Case>, ConfigError> {
    let primes: Vec<u64> = p.list("primes", &[2, 3, 5])?;
    let k_max: u32 = p.get("k_max", 3)?;
    let st_max: u32 = p.get("st_max", 4)?;
    let samples: usize = p.get("samples", 4)?;
    let mut rng = SweepRng::new(seed);
    let mut cases = Vec::new();
    for &pr in &primes {
        if !crate::residue::is_prime(pr) {
            return Err(ConfigError::Invalid(format!("{pr} is not prime")));
        }
        for k in 1..=k_max {
            for psi in primitives(pr.pow(k))? {
                for s in 0..=st_max {
                    for t in 0..=st_max {
                        for _ in 0..samples {
                            let h = rng.range(-40, 40);
                            let u = draw_unit(&mut rng, pr, 50);
                            let v = draw_unit(&mut rng, pr, 50);
                            let psi = psi.clone();
                            let label = [
                                ("p", pr.to_string()),
                                ("k", k.to_string()),
                                ("chi", chi_label(&psi)),
                                ("s", s.to_string()),
                                ("t", t.to_string()),
                                ("h", h.to_string()),
                                ("u", u.to_string()),
                                ("v", v.to_string()),
                            ];
                            cases.push(Case::new(&label, move || {
                                let o = verify_support_claim(&psi, pr, k, h, u, v, s, t).map_err(err)?;
                                let holds = o.iter().all(|x| x.implication_holds());
                                let iff = o.iter().all(|x| x.iff_holds());
                                let show = |b: bool| if b { "0" } else { "nonzero" }.to_string();
                                Ok(vec![Outcome::exact(
                                    show(o[0].vanishes),
                                    show(!o[0].allowed),
                                    holds,
                                    if holds { 0.0 } else { 1.0 },
                                )
                                .with("allowed", o[0].allowed)
                                .with("iff", iff)])
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(cases)
}

pub fn kloosterman_factorization(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let mn_max: i64 = p.get("mn_max", 30)?;
    let c_max: u64 = p.get("c_max", 60)?;
    let mut cases = Vec::new();
    for m in 1..=mn_max {
        for n in 1..=mn_max {
            cases.push(Case::new(&[("m", m.to_string()), ("n", n.to_string())], move || {
                let (mut all, mut worst) = (true, 0.0f64);
                let mut last = None;
                for c in 1..=c_max {
                    let r = selberg_factorization_check(m, n, c);
                    all &= r.exact;
                    worst = worst.max(r.residual);
                    last = Some(r);
                }
                let r = last.ok_or("empty c range")?;
                Ok(vec![Outcome::exact(complex(r.lhs), complex(r.rhs), all, worst)
                    .with("c_max", c_max)
                    .evaluations(c_max)])
            }));
        }
    }
    Ok(cases)
}

pub fn gauss(p: &Params, seed: u64) -> Result<Vec<Case>, ConfigError> {
    let q_max: u64 = p.get("q_max", 200)?;
    let samples: usize = p.get("samples", 3)?;
    let mut rng = SweepRng::new(seed);
    let mut cases = Vec::new();
    for q in 1..=q_max {
        for chi in primitives(q)? {
            let mut ms: Vec<i64> = vec![0, 1, -1];
            for _ in 0..samples {
                ms.push(rng.range(-(3 * q as i64), 3 * q as i64));
            }
            let label = [("q", q.to_string()), ("chi", chi_label(&chi))];
            cases.push(Case::new(&label, move || {
                let eps = gauss_sum(&chi).epsilon;
                let mut out = vec![Outcome::numeric(num(eps.norm()), num(1.0), (eps.norm() - 1.0).abs(), 1e-10)
                    .with("check", "modulus")];
                let (mut all, mut worst) = (true, 0.0f64);
                for &m in &ms {
                    let t = primitive_twist_relation(&chi, m).map_err(err)?;
                    all &= t.exact;
                    worst = worst.max(t.residual);
                }
                out.push(
                    Outcome::exact(complex(eps), String::new(), all, worst)
                        .with("check", "twist")
                        .evaluations(ms.len() as u64),
                );
                Ok(out)
            }));
        }
    }
    Ok(cases)
}

pub fn dft_duality(p: &Params) -> Result<Vec<Case>, ConfigError> {
    let qs: Vec<u64> = p.list("q", &[3, 4, 5, 7, 8, 9, 11, 12, 13])?;
    let mc_max: u64 = p.get("mc_max", 40)?;
    let l_max: i64 = p.get("l_max", 6)?;
    let variant = match p.raw("mutation").unwrap_or("none") {
        "none" => DualityVariant::Standard,
        "abs-epsilon" => DualityVariant::AbsEpsilon,
        "unit-phase" => DualityVariant::UnitPhase,
        m => return Err(ConfigError::BadValue { key: "mutation".into(), value: m.into() }),
    };
    let mut cases = Vec::new();
    for q in qs {
        for chi in primitives(q)? {
            let ctx = Arc::new(DftContext::new(&chi));
            for l in 0..=l_max {
                for m in 1..=mc_max {
                    let ctx = ctx.clone();
                    let label = [("q", q.to_string()), ("chi", chi_label(&chi)), ("l", l.to_string()), ("m", m.to_string())];
                    cases.push(Case::new(&label, move || {
                        let (mut all, mut worst, mut fails) = (true, 0.0f64, 0u64);
                        let mut at = None;
                        for c in 1..=mc_max {
                            let r = verify_dft_duality(&ctx, l, m, c, variant).map_err(err)?;
                            if !r.exact {
                                fails += 1;
                            }
                            all &= r.exact;
                            if at.is_none() || r.residual > worst {
                                worst = r.residual;
                                at = Some((c, r));
                            }
                        }
                        let (c, r) = at.ok_or("empty c range")?;
                        Ok(vec![
                            Outcome::exact(String::new(), String::new(), all, fails as f64)
                                .with("path", "exact")
                                .evaluations(mc_max),
                            Outcome::numeric(complex(r.lhs), complex(r.rhs), worst, 1e-10)
                                .with("path", "numeric")
                                .with("worst_c", c),
                        ])
                    }));
                }
            }
        }
    }
    Ok(cases)
}
