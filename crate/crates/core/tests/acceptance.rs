//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use vforge::verify::{run_suite, Params, RunOptions, SuiteRun};

fn params(pairs: &[(&str, &str)]) -> Params {
    let mut p = Params::new();
    for (k, v) in pairs {
        p.set(k, v);
    }
    p
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn run(suite: &str, p: &[(&str, &str)]) -> SuiteRun {
    let opts = RunOptions { seed: 20240601, timing: true };
    match run_suite(suite, &params(p), &opts) {
        Ok(r) => r,
        Err(e) => panic!("{suite}: {e}"),
    }
}

fn summary(runs: &[&SuiteRun]) -> Verdict {
    let records: usize = runs.iter().map(|r| r.records.len()).sum();
    let failures: usize = runs.iter().map(|r| r.failures()).sum();
    let worst = runs.iter().map(|r| r.max_residual()).fold(0.0, f64::max);
    Verdict {
        pass: failures == 0 && records > 0,
        detail: format!("{records} records, {failures} failed, max residual {worst:.2e}"),
    }
}

fn first_failure(r: &SuiteRun) -> String {
    r.records
        .iter()
        .find(|x| !x.pass)
        .map(|x| format!("{:?}", x.params))
        .unwrap_or_default()
}

fn exact_sweep(r: &SuiteRun, min_cases: u64) -> Verdict {
    let mut v = summary(&[r]);
    let all_exact = r.records.iter().all(|x| x.exact == Some(true));
    v.pass &= all_exact && r.evaluations >= min_cases;
    v.detail = format!("{} identity evaluations, {}", r.evaluations, v.detail);
    if !v.pass {
        v.detail += &format!("; first failure {}", first_failure(r));
    }
    v
}

fn numeric(r: &SuiteRun) -> Verdict {
    let mut v = summary(&[r]);
    if !v.pass {
        v.detail += &format!("; first failure {}", first_failure(r));
    }
    v
}

fn mutations() -> Verdict {
    let flip = run("charsum-reciprocity", &[("r_max", "12"), ("ab_max", "50"), ("mutation", "flip-sign")]);
    let eps = run("dft-duality", &[("q", "5,7"), ("mc_max", "12"), ("l_max", "2"), ("mutation", "abs-epsilon")]);
    let lam = run("voronoi", &[("q", "1,3"), ("mutation", "perturb-lambda")]);
    let counts = [flip.failures(), eps.failures(), lam.failures()];
    Verdict {
        pass: counts.iter().all(|&c| c > 0),
        detail: format!(
            "failing cases: sign flip {}/{}, |eps|^2 {}/{}, perturbed lambda {}/{}",
            counts[0],
            flip.records.len(),
            counts[1],
            eps.records.len(),
            counts[2],
            lam.records.len()
        ),
    }
}

type Check = Box<dyn Fn() -> Verdict>;

fn main() -> ExitCode {
    let criteria: Vec<(&str, u64, Check)> = vec![
        (
            "reciprocity exact sweep",
            120,
            Box::new(|| exact_sweep(&run("charsum-reciprocity", &[("r_max", "30"), ("ab_max", "200"), ("samples", "8")]), 5000)),
        ),
        (
            "twisted multiplicativity",
            60,
            Box::new(|| exact_sweep(&run("charsum-mult", &[("r1r2_max", "105")]), 1)),
        ),
        (
            "prime-power support",
            30,
            Box::new(|| {
                numeric(&run(
                    "charsum-support",
                    &[("primes", "2,3,5"), ("k_max", "3"), ("st_max", "4"), ("samples", "4")],
                ))
            }),
        ),
        (
            "Kloosterman factorization",
            60,
            Box::new(|| exact_sweep(&run("kloosterman-factorization", &[("mn_max", "30"), ("c_max", "60")]), 1)),
        ),
        (
            "additive twist duality",
            180,
            Box::new(|| {
                numeric(&run(
                    "dft-duality",
                    &[("q", "3,4,5,7,8,9,11,12,13"), ("mc_max", "40"), ("l_max", "6")],
                ))
            }),
        ),
        ("Gauss sums", 60, Box::new(|| numeric(&run("gauss", &[("q_max", "200")])))),
        (
            "Bessel, Hankel and Weber integrals",
            120,
            Box::new(|| {
                let b = run("bessel", &[("k", "12,16")]);
                let h = run("hankel", &[]);
                let w = run("weber", &[]);
                let mut v = summary(&[&b, &h, &w]);
                for r in [&b, &h, &w] {
                    if r.failures() > 0 {
                        v.detail += &format!("; first failure {}", first_failure(r));
                    }
                }
                v
            }),
        ),
        ("Petersson geometric side", 180, Box::new(|| numeric(&run("petersson", &[])))),
        (
            "global twisted identity",
            600,
            Box::new(|| {
                numeric(&run(
                    "main-identity",
                    &[("q", "1,3,4,5,7"), ("k", "12,16"), ("l", "1,2,3"), ("mu", "20"), ("rho", "10")],
                ))
            }),
        ),
        (
            "twisted Voronoi for Delta",
            300,
            Box::new(|| numeric(&run("voronoi", &[("q", "1,3,5,7,10"), ("bumps", "20:10,10:5")]))),
        ),
        (
            "pipeline stage agreement",
            600,
            Box::new(|| numeric(&run("pipeline", &[("configs", "3:12:1,5:12:2"), ("stage_d", "true")]))),
        ),
        (
            "functional equation",
            300,
            Box::new(|| numeric(&run("functional-equation", &[("q", "3,5"), ("im", "0,1"), ("k", "12")]))),
        ),
        ("mutation sensitivity", 600, Box::new(mutations)),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = check();
        let dt = t.elapsed();
        let in_time = dt <= Duration::from_secs(*limit);
        let ok = v.pass && in_time;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<36} {}  ({}; {:.1} s of {} s)",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            v.detail,
            dt.as_secs_f64(),
            limit
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
