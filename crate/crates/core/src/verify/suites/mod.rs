//! Suite registry and the case runner.

mod analytic;
mod arith;
mod spectral;

use std::collections::BTreeMap;
use std::time::Instant;

use super::params::{ConfigError, Params};
use super::report::VerificationReport;

/// One evaluated identity, or a group of them sharing a record.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub extra: Vec<(String, String)>,
    pub lhs: String,
    pub rhs: String,
    pub residual: f64,
    pub tolerance: f64,
    pub exact: Option<bool>,
    /// Identity evaluations folded into this record.
    pub evaluations: u64,
}

impl Outcome {
    pub fn numeric(lhs: String, rhs: String, residual: f64, tolerance: f64) -> Self {
        Self {
            extra: Vec::new(),
            lhs,
            rhs,
            residual,
            tolerance,
            exact: None,
            evaluations: 1,
        }
    }

    /// Exact records carry tolerance 0, so they pass exactly when `exact` holds.
    pub fn exact(lhs: String, rhs: String, exact: bool, residual: f64) -> Self {
        Self {
            exact: Some(exact),
            ..Self::numeric(lhs, rhs, residual, 0.0)
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.into(), value.to_string()));
        self
    }

    pub fn evaluations(mut self, n: u64) -> Self {
        self.evaluations = n;
        self
    }
}

type Runner = Box<dyn Fn() -> Result<Vec<Outcome>, String> + Send + Sync>;

pub struct Case {
    pub params: BTreeMap<String, String>,
    pub run: Runner,
}

impl Case {
    pub fn new(params: &[(&str, String)], run: impl Fn() -> Result<Vec<Outcome>, String> + Send + Sync + 'static) -> Self {
        Self {
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            run: Box::new(run),
        }
    }
}

pub const SUITES: [&str; 15] = [
    "charsum-reciprocity",
    "charsum-mult",
    "charsum-support",
    "kloosterman-factorization",
    "gauss",
    "dft-duality",
    "bessel",
    "hankel",
    "weber",
    "petersson",
    "main-identity",
    "voronoi",
    "pipeline",
    "functional-equation",
    "all",
];

/// Parameters each suite accepts.
pub fn suite_keys(name: &str) -> Result<&'static [&'static str], ConfigError> {
    Ok(match name {
        "charsum-reciprocity" => &["r_max", "ab_max", "samples", "mutation"],
        "charsum-mult" => &["r1r2_max", "samples"],
        "charsum-support" => &["primes", "k_max", "st_max", "samples"],
        "kloosterman-factorization" => &["mn_max", "c_max"],
        "gauss" => &["q_max", "samples"],
        "dft-duality" => &["q", "mc_max", "l_max", "mutation"],
        "bessel" => &["k"],
        "hankel" => &["k"],
        "weber" => &["k"],
        "petersson" => &["k", "tol"],
        "main-identity" => &["q", "k", "l", "mu", "rho", "abs_tol"],
        "voronoi" => &["q", "bumps", "abs_tol", "mutation", "perturb_n", "perturb"],
        "pipeline" => &["configs", "mu", "rho", "stage_d", "abs_tol"],
        "functional-equation" => &["q", "im", "k"],
        "all" => &[],
        _ => return Err(ConfigError::UnknownSuite(name.into())),
    })
}

fn build(name: &str, p: &Params, seed: u64) -> Result<Vec<Case>, ConfigError> {
    match name {
        "charsum-reciprocity" => arith::reciprocity(p, seed),
        "charsum-mult" => arith::multiplicativity(p, seed),
        "charsum-support" => arith::support(p, seed),
        "kloosterman-factorization" => arith::kloosterman_factorization(p),
        "gauss" => arith::gauss(p, seed),
        "dft-duality" => arith::dft_duality(p),
        "bessel" => analytic::bessel(p),
        "hankel" => analytic::hankel(p),
        "weber" => analytic::weber(p),
        "petersson" => spectral::petersson(p),
        "main-identity" => spectral::main_identity(p),
        "voronoi" => spectral::voronoi(p),
        "pipeline" => spectral::pipeline(p),
        "functional-equation" => spectral::functional_equation(p),
        _ => Err(ConfigError::UnknownSuite(name.into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    /// When false every `runtimeMs` is written as 0 so reports are byte-stable.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: 0, timing: true }
    }
}

/// Checks names and keys, then builds every case without running any.
pub fn plan(name: &str, p: &Params, seed: u64) -> Result<Vec<(String, Case)>, ConfigError> {
    let names: Vec<&str> = if name == "all" {
        SUITES[..SUITES.len() - 1].to_vec()
    } else {
        vec![name]
    };
    if name == "all" {
        for k in p.keys() {
            let mut known = false;
            for n in &names {
                known |= suite_keys(n)?.contains(&k);
            }
            if !known {
                return Err(ConfigError::Unknown(k.into(), name.into()));
            }
        }
    } else {
        p.check_keys(name, suite_keys(name)?)?;
    }
    let mut out = Vec::new();
    for n in names {
        let mut sub = Params::new();
        for k in p.keys() {
            if suite_keys(n)?.contains(&k) {
                sub.set(k, p.raw(k).unwrap_or_default());
            }
        }
        for c in build(n, &sub, seed)? {
            out.push((n.to_string(), c));
        }
    }
    Ok(out)
}

fn run_case(suite: &str, case: &Case, opts: &RunOptions) -> Vec<(VerificationReport, u64)> {
    let t = Instant::now();
    let res = (case.run)();
    let ms = if opts.timing { t.elapsed().as_millis() as u64 } else { 0 };
    let outcomes = match res {
        Ok(v) => v,
        Err(e) => vec![Outcome::numeric(String::new(), String::new(), f64::INFINITY, 0.0).with("error", e)],
    };
    outcomes
        .into_iter()
        .map(|o| {
            let mut params = case.params.clone();
            for (k, v) in o.extra {
                params.insert(k, v);
            }
            let pass = VerificationReport::pass_rule(o.exact, o.residual, o.tolerance);
            (
                VerificationReport {
                    suite: suite.to_string(),
                    params,
                    lhs: o.lhs,
                    rhs: o.rhs,
                    residual: o.residual,
                    tolerance: o.tolerance,
                    exact: o.exact,
                    pass,
                    runtime_ms: ms,
                    seed: opts.seed,
                },
                o.evaluations,
            )
        })
        .collect()
}

/// Records of a suite run, in case order.
#[derive(Debug, Clone, Default)]
pub struct SuiteRun {
    pub records: Vec<VerificationReport>,
    pub evaluations: u64,
}

impl SuiteRun {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, f64::max)
    }
}

pub fn run_suite(name: &str, p: &Params, opts: &RunOptions) -> Result<SuiteRun, ConfigError> {
    let cases = plan(name, p, opts.seed)?;
    let rows = crate::exec::par_map(&cases, |(s, c)| run_case(s, c, opts));
    let mut out = SuiteRun::default();
    for (r, n) in rows.into_iter().flatten() {
        out.records.push(r);
        out.evaluations += n;
    }
    Ok(out)
}

pub(crate) fn chi_label(chi: &crate::characters::DirichletCharacter) -> String {
    let e: Vec<String> = chi.exponents().iter().map(u64::to_string).collect();
    if e.is_empty() {
        "trivial".into()
    } else {
        e.join(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_names_and_keys_are_config_errors() {
        assert!(matches!(plan("nope", &Params::new(), 0), Err(ConfigError::UnknownSuite(_))));
        let p = Params::parse("zzz=1").unwrap();
        assert!(matches!(plan("gauss", &p, 0), Err(ConfigError::Unknown(..))));
        assert!(matches!(plan("all", &p, 0), Err(ConfigError::Unknown(..))));
        for s in SUITES {
            assert!(suite_keys(s).is_ok());
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let p = Params::parse("r_max=6\nab_max=20\nsamples=2").unwrap();
        let opts = RunOptions { seed: 5, timing: false };
        let a = run_suite("charsum-reciprocity", &p, &opts).unwrap();
        crate::exec::set_mode(crate::exec::ExecMode::Sequential);
        let b = run_suite("charsum-reciprocity", &p, &opts).unwrap();
        crate::exec::set_mode(crate::exec::ExecMode::Parallel);
        assert_eq!(a.records, b.records);
        assert!(a.all_pass());
        assert!(a.evaluations > a.records.len() as u64);
    }
}
