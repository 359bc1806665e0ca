use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use num_complex::Complex64;

use vforge::characters::{gauss_sum, parse_character, primitive_characters, quadratic_character, DirichletCharacter};
use vforge::exec;
use vforge::expsums::{char_sum_c, dft_d, kloosterman, CharSumParams, SumValue};
use vforge::modforms::delta::delta_lambda;
use vforge::modforms::eigenforms;
use vforge::special::{bessel_j, hankel_transform, QuadratureConfig, TestFunction, WeightK};
use vforge::spectral::lfunc::{completed_l, LConfig};
use vforge::spectral::petersson_geometric;
use vforge::verify::report::write;
use vforge::verify::{run_suite, ConfigError, Format, Params, RunOptions, SUITES};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

const KINDS: [&str; 9] = [
    "kloosterman",
    "gauss-sum",
    "char-sum-C",
    "dft-d",
    "bessel-j",
    "hankel",
    "petersson-g",
    "lambda",
    "completed-L",
];

#[derive(Parser)]
#[command(name = "voronoi-forge", version, about = "Exact and numeric checks of twisted Voronoi identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and emit one report record per case.
    Verify {
        /// Suite name, or `all`.
        suite: String,
        /// key=value configuration file; command-line keys override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; 1 runs sequentially.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "jsonl")]
        format: String,
        /// Write runtimeMs = 0 so that reports are byte-stable.
        #[arg(long)]
        no_timing: bool,
        /// Suite parameters as `--key value` pairs.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
        rest: Vec<String>,
    },
    /// Print a single value.
    Compute {
        kind: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
        rest: Vec<String>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn config(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

/// `--key value` pairs; a key followed by another key or by nothing is `true`.
fn pairs(rest: &[String]) -> Result<Vec<(String, String)>, Failure> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < rest.len() {
        let key = rest[i]
            .strip_prefix("--")
            .ok_or_else(|| Failure::Config(format!("expected --key, got {:?}", rest[i])))?;
        if let Some((k, v)) = key.split_once('=') {
            out.push((k.to_string(), v.to_string()));
            i += 1;
        } else if i + 1 < rest.len() && !is_key(&rest[i + 1]) {
            out.push((key.to_string(), rest[i + 1].clone()));
            i += 2;
        } else {
            out.push((key.to_string(), "true".into()));
            i += 1;
        }
    }
    Ok(out)
}

fn is_key(s: &str) -> bool {
    s.starts_with("--") && !s[2..].starts_with(|c: char| c.is_ascii_digit() || c == '.')
}

struct VerifyArgs {
    suite: String,
    config: Option<PathBuf>,
    seed: u64,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    format: String,
    no_timing: bool,
    params: Params,
}

fn verify(mut a: VerifyArgs, rest: &[String]) -> Result<bool, Failure> {
    for (k, v) in pairs(rest)? {
        let bad = || Failure::Config(format!("cannot parse --{k} {v:?}"));
        match k.as_str() {
            "config" => a.config = Some(v.into()),
            "seed" => a.seed = v.parse().map_err(|_| bad())?,
            "jobs" => a.jobs = Some(v.parse().map_err(|_| bad())?),
            "out" => a.out = Some(v.into()),
            "format" => a.format = v,
            "no-timing" | "no_timing" => a.no_timing = v.parse().map_err(|_| bad())?,
            _ => a.params.set(&k, &v),
        }
    }
    if !SUITES.contains(&a.suite.as_str()) {
        return Err(Failure::Config(format!(
            "unknown suite {:?}\n\n{}\nsuites: {}",
            a.suite,
            Cli::command().render_usage(),
            SUITES.join(", ")
        )));
    }
    let format: Format = a.format.parse().map_err(config)?;
    let file = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            Params::parse(&text)?
        }
        None => Params::new(),
    };
    let params = file.merged(&a.params);
    if let Some(j) = a.jobs {
        if j == 0 {
            return Err(Failure::Config("--jobs must be positive".into()));
        }
        exec::set_threads(j);
    }
    let opts = RunOptions {
        seed: a.seed,
        timing: !a.no_timing,
    };
    let run = run_suite(&a.suite, &params, &opts)?;
    let io = |e: io::Error| Failure::Io(e.to_string());
    let mut sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    write(&mut sink, &run.records, format).map_err(io)?;
    sink.flush().map_err(io)?;
    eprintln!(
        "{}: {} records, {} failed, max residual {:e}",
        a.suite,
        run.records.len(),
        run.failures(),
        run.max_residual()
    );
    Ok(run.all_pass())
}

/// Fifteen digits after the point in the usual range, fifteen significant digits otherwise.
fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if (1e-3..1e6).contains(&x.abs()) {
        format!("{x:.15}")
    } else {
        format!("{x:.14e}")
    }
}

fn fmt_complex(z: Complex64) -> String {
    if z.im.abs() <= 1e-13 * z.re.abs() {
        return fmt_real(z.re);
    }
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{} {sign} {}i", fmt_real(z.re), fmt_real(z.im.abs()))
}

fn fmt_exact(v: &SumValue) -> String {
    let terms: Vec<String> = v.exact.terms().map(|(j, c)| format!("{c}*z^{j}")).collect();
    let body = if terms.is_empty() { "0".into() } else { terms.join(" + ") };
    format!("{body}  (z = exp(2 pi i/{}))", v.exact.order())
}

struct Args(Params);

impl Args {
    fn req<T: std::str::FromStr>(&self, key: &str) -> Result<T, Failure> {
        self.0
            .get_opt(key)?
            .ok_or_else(|| Failure::Config(format!("missing --{}", key.replace('_', "-"))))
    }

    fn opt<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, Failure> {
        Ok(self.0.get(key, default)?)
    }

    fn weight(&self) -> Result<WeightK, Failure> {
        WeightK::new(self.req("k")?).map_err(config)
    }

    /// `--chi` as an exponent vector, or `quadratic`, or the first primitive character.
    fn character(&self, q: u64) -> Result<DirichletCharacter, Failure> {
        match self.0.raw("chi") {
            Some("quadratic") => quadratic_character(q)
                .map_err(config)?
                .ok_or_else(|| Failure::Config(format!("no primitive quadratic character mod {q}"))),
            Some(s) => parse_character(q, s).map_err(config),
            None => primitive_characters(q)
                .map_err(config)?
                .into_iter()
                .next()
                .ok_or_else(|| Failure::Config(format!("no primitive character mod {q}"))),
        }
    }

    fn bump(&self) -> Result<TestFunction, Failure> {
        TestFunction::new(self.req("mu")?, self.req("rho")?).map_err(config)
    }
}

fn compute(kind: &str, rest: &[String]) -> Result<Vec<String>, Failure> {
    let mut p = Params::new();
    for (k, v) in pairs(rest)? {
        p.set(&k, &v);
    }
    let show_exact = p.flag("exact", false)?;
    let a = Args(p);
    let with_exact = |v: SumValue| {
        let mut out = vec![fmt_complex(v.numeric)];
        if show_exact {
            out.push(fmt_exact(&v));
        }
        out
    };
    let lines = match kind {
        "kloosterman" => {
            let c: u64 = a.req("c")?;
            if c == 0 {
                return Err(Failure::Config("--c must be positive".into()));
            }
            with_exact(kloosterman(a.req("m")?, a.req("n")?, c))
        }
        "gauss-sum" => {
            let chi = a.character(a.req("q")?)?;
            let g = gauss_sum(&chi);
            let q = chi.modulus() as f64;
            let mut out = vec![fmt_complex(g.epsilon * q.sqrt())];
            if show_exact {
                out.push(fmt_exact(&SumValue {
                    exact: g.exact,
                    numeric: g.epsilon,
                }));
            }
            out
        }
        "char-sum-C" => {
            let psi = a.character(a.req("r")?)?;
            let cp = CharSumParams::new(psi, a.opt("h", 1)?, a.req("a")?, a.opt("u", 1)?, a.req("b")?, a.opt("v", 1)?)
                .map_err(config)?;
            with_exact(char_sum_c(&cp).map_err(config)?)
        }
        "dft-d" => {
            let chi = a.character(a.req("q")?)?;
            let c: u64 = a.req("c")?;
            if c == 0 {
                return Err(Failure::Config("--c must be positive".into()));
            }
            with_exact(dft_d(&chi, a.req("l")?, a.req("m")?, c))
        }
        "bessel-j" => {
            let z = Complex64::new(a.req("x")?, a.opt("y", 0.0)?);
            vec![fmt_complex(bessel_j(a.weight()?, z).map_err(config)?)]
        }
        "hankel" => {
            let v = hankel_transform(&a.bump()?, a.weight()?, a.req("a")?, &QuadratureConfig::default()).map_err(config)?;
            vec![fmt_real(v)]
        }
        "petersson-g" => {
            let v = petersson_geometric(a.weight()?, a.req("l")?, a.req("n")?, a.opt("tol", 1e-12)?).map_err(config)?;
            vec![fmt_real(v.value)]
        }
        "lambda" => {
            let k: u32 = a.req("k")?;
            let n: usize = a.req("n")?;
            if n == 0 {
                return Err(Failure::Config("--n must be positive".into()));
            }
            if k == 12 {
                vec![fmt_real(delta_lambda(n).map_err(config)?[n])]
            } else {
                let forms = eigenforms(k, n.max(2)).map_err(config)?;
                let idx: usize = a.opt("form", 0)?;
                let f = forms
                    .get(idx)
                    .ok_or_else(|| Failure::Config(format!("weight {k} has {} eigenforms", forms.len())))?;
                vec![fmt_real(f.lambda(n).map_err(config)?)]
            }
        }
        "completed-L" => {
            let k: u32 = a.req("k")?;
            let chi = a.character(a.req("q")?)?;
            let forms = eigenforms(k, 2000).map_err(config)?;
            let f = forms.first().ok_or_else(|| Failure::Config(format!("no eigenform of weight {k}")))?;
            let s = Complex64::new(a.req("re")?, a.opt("im", 0.0)?);
            let cfg = LConfig {
                target: a.opt("target", LConfig::default().target)?,
                ..Default::default()
            };
            let v = completed_l(f, &chi, s, &cfg).map_err(config)?;
            vec![fmt_complex(v.value)]
        }
        _ => {
            return Err(Failure::Config(format!(
                "unknown kind {kind:?}\n\n{}\nkinds: {}",
                Cli::command().render_usage(),
                KINDS.join(", ")
            )))
        }
    };
    Ok(lines)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Verify {
            suite,
            config,
            seed,
            jobs,
            out,
            format,
            no_timing,
            rest,
        } => verify(
            VerifyArgs {
                suite,
                config,
                seed,
                jobs,
                out,
                format,
                no_timing,
                params: Params::new(),
            },
            &rest,
        ),
        Command::Compute { kind, rest } => compute(&kind, &rest).map(|lines| {
            for l in lines {
                println!("{l}");
            }
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_IO)
        }
    }
}
