//! The chain of rewritings that turns the twisted Petersson average into its dual:
//! stage A is the Petersson side, stage B the sum after the first Poisson step,
//! stage C the sum after the second Poisson step, and stage D the intermediate
//! form in which the `c′`-sum runs over all non-zero integers.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::identity::{dual_weights, e, e_q, hankel_table, SpectralConfig};
use super::petersson::{kloosterman_row, petersson_geometric, truncation_for};
use crate::characters::{gauss_sum, DirichletCharacter};
use crate::error::SpectralError;
use crate::residue::{gcd, mod_inverse, q_part, rem};
use crate::special::bessel::bessel_j_real;
use crate::special::hankel::{hankel_transform, HankelEvaluator};
use crate::special::quad::{gauss_legendre, integrate_adaptive, integrate_panels, panel_breaks};
use crate::special::{CompactFn, TestFunction, WeightK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Stages {
    pub stage_d: bool,
}

/// How a stage was truncated.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StageCert {
    /// Number of outer terms kept.
    pub outer: usize,
    /// Largest inner cutoff used.
    pub inner: usize,
    /// Estimate of the dropped mass.
    pub tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineTrace {
    pub stage_a: Complex64,
    pub stage_b: Complex64,
    pub stage_c: Complex64,
    pub stage_d: Option<Complex64>,
    pub cert_a: StageCert,
    pub cert_b: StageCert,
    pub cert_c: StageCert,
    pub cert_d: Option<StageCert>,
    pub max_pairwise_residual: f64,
    /// `|A − D|, |B − D|, |C − D|` maximum when stage D ran.
    pub max_residual_d: Option<f64>,
}

struct Setup<'a> {
    k: WeightK,
    chi: &'a DirichletCharacter,
    l: u64,
    g: &'a TestFunction,
    cfg: &'a SpectralConfig,
    q: u64,
    eps: Complex64,
}

impl Setup<'_> {
    fn chi(&self, n: i64) -> Complex64 {
        self.chi.value(n)
    }

    /// `g(ℓ)χ(ℓ) + i^{−k}(ε²/q)χ̄(ℓ)(H_k g)(ℓ/q²)`.
    fn head(&self) -> Result<Complex64, SpectralError> {
        let l = self.l as f64;
        let q = self.q as f64;
        let h = hankel_transform(self.g, self.k, l / (q * q), &self.cfg.quad)?;
        let chi_l = self.chi(self.l as i64);
        Ok(chi_l * self.g.eval(l) + self.eps * self.eps * chi_l.conj() * (self.k.i_pow_k() * h / q))
    }
}

fn stage_a(s: &Setup) -> Result<(Complex64, StageCert), SpectralError> {
    let support: Vec<u64> = s.g.integer_support().collect();
    let tol = s.cfg.abs_tol / (20.0 * support.len().max(1) as f64);
    let mut v = Complex64::new(0.0, 0.0);
    let mut cert = StageCert::default();
    for &n in &support {
        let gn = s.g.eval(n as f64);
        let p = petersson_geometric(s.k, s.l, n, tol / gn.abs().max(1e-300))?;
        v += s.chi(n as i64) * gn * p.value;
        cert.outer += 1;
        cert.inner = cert.inner.max(p.truncation_c as usize);
        cert.tail += gn.abs() * p.tail_bound;
    }
    Ok((v, cert))
}

/// `Σ*_{α mod c0, αq ≡ −m (c0)} e_{c0}(ℓ · inverse(α c′)) χ̄((αq + m)/c0)` for every `m mod c0·q`.
fn alpha_table(s: &Setup, c0: u64, cp: i64) -> Vec<Complex64> {
    let (q, c0i) = (s.q as i64, c0 as i64);
    let period = c0i * q;
    (0..period)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for alpha in 0..c0i {
                if c0i > 1 && gcd(alpha, c0i) != 1 {
                    continue;
                }
                let num = alpha * q + m;
                if rem(num, c0i) != 0 {
                    continue;
                }
                let inv = if c0i == 1 {
                    0
                } else {
                    mod_inverse(rem(alpha * cp, c0i), c0i).expect("unit")
                };
                acc += e_q(s.l as i64 * inv, c0) * s.chi(num / c0i).conj();
            }
            acc
        })
        .collect()
}

/// Nodes and weights on the support of `g` resolving `e(ξy)` for `|ξ| ≤ f_max`.
fn support_nodes(g: &TestFunction, f_max: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>), SpectralError> {
    let (lo, hi) = g.support();
    let breaks = panel_breaks(lo, hi, 16, 2.0, |_| 1.0 / f_max, 1_000_000)?;
    let gl = gauss_legendre(n);
    let (mut ys, mut ws) = (Vec::new(), Vec::new());
    for w in breaks.windows(2) {
        let c = 0.5 * (w[0] + w[1]);
        let h = 0.5 * (w[1] - w[0]);
        for (t, wt) in gl.nodes.iter().zip(&gl.weights) {
            let y = c + h * t;
            let gy = g.eval(y);
            if gy != 0.0 {
                ys.push(y);
                ws.push(h * wt * gy);
            }
        }
    }
    Ok((ys, ws))
}

const STAGE_B_FREQ: f64 = 64.0;
const STAGE_B_FREQ_MAX: f64 = 4096.0;

/// The `c0, c′, m` triple sum after the first Poisson step.
fn stage_b(s: &Setup) -> Result<(Complex64, StageCert), SpectralError> {
    let mut freq = STAGE_B_FREQ;
    loop {
        if let Some(r) = stage_b_at(s, freq)? {
            return Ok(r);
        }
        freq *= 2.0;
        if freq > STAGE_B_FREQ_MAX {
            return Err(SpectralError::ToleranceNotMet(format!(
                "m-sums have not decayed below frequency {STAGE_B_FREQ_MAX}"
            )));
        }
    }
}

/// `None` when some `m`-sum outruns the frequencies resolved by the nodes.
fn stage_b_at(s: &Setup, freq: f64) -> Result<Option<(Complex64, StageCert)>, SpectralError> {
    let (q, l) = (s.q, s.l);
    let (ys, ws) = support_nodes(s.g, freq, s.cfg.quad.nodes_per_panel)?;
    let thr = s.cfg.abs_tol / s.cfg.safety;
    let mut total = Complex64::new(0.0, 0.0);
    let mut cert = StageCert::default();
    let mut quiet_c = 0usize;
    let mut c = 0u64;
    while quiet_c < s.cfg.window {
        c += 1;
        let split = q_part(c, q);
        let (c0, cp) = (split.c0, split.c_prime);
        let cf = c as f64;
        let h: Vec<f64> = ys
            .iter()
            .zip(&ws)
            .map(|(y, w)| w * bessel_j_real(s.k, 4.0 * PI * (y * l as f64).sqrt() / cf))
            .collect();
        let step: Vec<Complex64> = ys.iter().map(|y| e(-y / (cf * q as f64))).collect();
        let mut ph = vec![Complex64::new(1.0, 0.0); ys.len()];
        let a_tab = alpha_table(s, c0, cp as i64);
        let period = (c0 * q) as i64;
        let chi_cp = s.chi(cp as i64);
        let units = crate::residue::factorize(c0).map(|f| f.phi()).unwrap_or(c0) as f64;
        let mut c_sum = Complex64::new(0.0, 0.0);
        let mut c_mass = 0.0;
        let mut quiet = 0usize;
        let mut m = 0i64;
        while quiet < s.cfg.window {
            m += 1;
            if m as f64 > 0.5 * freq * cf * q as f64 {
                return Ok(None);
            }
            let mut integral = Complex64::new(0.0, 0.0);
            for (p, (st, hv)) in ph.iter_mut().zip(step.iter().zip(&h)) {
                *p *= st;
                integral += *p * hv;
            }
            let bound = units * integral.norm() / cf;
            c_mass += 2.0 * bound;
            if bound < thr / (cf * cf) {
                quiet += 1;
            } else {
                quiet = 0;
            }
            for (mm, int) in [(m, integral), (-m, integral.conj())] {
                if gcd(mm, cp as i64) != 1 {
                    continue;
                }
                let a = a_tab[rem(mm, period) as usize];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let inv = if cp == 1 {
                    0
                } else {
                    mod_inverse(rem(c0 as i64 * mm, cp as i64), cp as i64).expect("unit")
                };
                let ph_c = e_q(-(l as i64) * rem(q as i64 * inv, cp as i64), cp);
                c_sum += chi_cp * ph_c * a * int / cf;
            }
        }
        cert.inner = cert.inner.max(m as usize);
        total += c_sum;
        if c_mass < thr / cf {
            quiet_c += 1;
            cert.tail = cert.tail.max(c_mass);
        } else {
            quiet_c = 0;
        }
    }
    cert.outer = c as usize;
    let pref = s.eps * (2.0 * PI * s.k.i_pow_k() / (q as f64).sqrt());
    Ok(Some((pref * total, cert)))
}

/// The double sum after the second Poisson step, taken `m`-outer.
fn stage_c_sk(s: &Setup) -> Result<(Complex64, StageCert), SpectralError> {
    let dual = dual_weights(s.g, s.k, s.q, s.cfg)?;
    let n = dual.values.len() - 1;
    let budget = s.cfg.abs_tol / 20.0;
    let mut cut = vec![0u64; n + 1];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for c in 1..=n {
        let w = dual.values[c].abs();
        if w == 0.0 || s.chi(c as i64) == Complex64::new(0.0, 0.0) {
            continue;
        }
        cut[c] = truncation_for(s.k, s.l, c as u64, (budget / (n as f64 * w)).min(1e6))?;
        order.push(c);
    }
    order.sort_by(|a, b| cut[*b].cmp(&cut[*a]).then(a.cmp(b)));
    let m_max = order.first().map_or(0, |&c| cut[c]);
    let mut planner = rustfft::FftPlanner::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut active = order.len();
    let lf = s.l as f64;
    for m in 1..=m_max {
        while active > 0 && cut[order[active - 1]] < m {
            active -= 1;
        }
        let row = kloosterman_row(s.l, m, &mut planner);
        let mf = m as f64;
        let terms = crate::exec::par_map(&order[..active], |&c| {
            s.chi(c as i64).conj()
                * (row[c % m as usize] * bessel_j_real(s.k, 4.0 * PI * (lf * c as f64).sqrt() / mf) * dual.values[c])
        });
        let inner: Complex64 = terms.into_iter().sum();
        total += inner / mf;
    }
    let q = s.q as f64;
    let sk = total * s.eps * s.eps * (2.0 * PI / q) - s.chi(s.l as i64) * s.g.eval(s.l as f64);
    Ok((
        sk,
        StageCert {
            outer: m_max as usize,
            inner: n,
            tail: dual.window_max,
        },
    ))
}

/// The form with `c′` over all non-zero integers and the `x`-integral against `H_k g`,
/// for `|c0 c′| ≤ c_max`.
fn stage_d_sk(s: &Setup, c_max: u64) -> Result<(Complex64, StageCert), SpectralError> {
    let (q, l) = (s.q, s.l);
    let (qf, lf) = (q as f64, l as f64);
    let (lo, hi) = s.g.support();
    // x-integral cut where H_k g(x/q²) stays below abs_tol
    let a_turn = (s.k.order() as f64 / (4.0 * PI)).powi(2) / lo;
    let mut a_max = 1024.0f64;
    let (table, x_max) = 'scan: loop {
        let t = hankel_table(s.g, s.k, a_max, &s.cfg.quad)?;
        let mut quiet = 0usize;
        let mut x = 0.0f64;
        while x / (qf * qf) < t.a_max() {
            x += 0.25;
            let a = x / (qf * qf);
            if a > a_turn && t.eval(a).abs() < s.cfg.abs_tol {
                quiet += 1;
                if quiet >= 4 * s.cfg.window {
                    break 'scan (t, x);
                }
            } else {
                quiet = 0;
            }
        }
        a_max = 2.0 * t.a_max();
    };
    let entries: Vec<(u64, i64, Vec<Complex64>)> = (1..=c_max)
        .flat_map(|c| {
            let sp = q_part(c, q);
            [1i64, -1].map(|sign| (c, sign * sp.c_prime as i64))
        })
        .map(|(c, cp)| (c, cp, alpha_table(s, q_part(c, q).c0, cp)))
        .collect();
    let gl = gauss_legendre(s.cfg.quad.nodes_per_panel);
    let thr = s.cfg.abs_tol / s.cfg.safety;
    let m_cap = (0.5 * STAGE_B_FREQ * c_max as f64 * qf) as i64;
    let sig_max = x_max.sqrt();
    let mut total = Complex64::new(0.0, 0.0);
    let mut quiet = 0usize;
    let mut m = 0i64;
    let mut tail = 0.0f64;
    while quiet < s.cfg.window {
        m += 1;
        if m > m_cap {
            return Err(SpectralError::ToleranceNotMet(format!("stage D m-sum has not decayed by m = {m}")));
        }
        let mf = m as f64;
        // x = σ²; phases in σ from H_k g, the Bessel factor and e(c x/(q m))
        let f = 2.0 * hi.sqrt() / qf + 2.0 * lf.sqrt() / mf + 2.0 * sig_max * c_max as f64 / (qf * mf);
        let breaks = panel_breaks(0.0, sig_max, 16, 2.0, |_| 1.0 / f, 50_000_000)?;
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * gl.nodes.len());
        for w in breaks.windows(2) {
            let c = 0.5 * (w[0] + w[1]);
            let h = 0.5 * (w[1] - w[0]);
            for (t, wt) in gl.nodes.iter().zip(&gl.weights) {
                let sg = c + h * t;
                nodes.push((sg, h * wt));
            }
        }
        let samples: Vec<(Complex64, f64)> = crate::exec::par_map(&nodes, |&(sg, w)| {
            let x = sg * sg;
            let fx = 2.0 * sg * w * table.eval(x / (qf * qf)) * bessel_j_real(s.k, 4.0 * PI * (lf * x).sqrt() / mf);
            (e(x / (qf * mf)), fx)
        });
        // K(c, m) for c = 1..c_max by phasor recurrence
        let mut ph: Vec<Complex64> = samples.iter().map(|(z, _)| *z).collect();
        let mut ints = Vec::with_capacity(c_max as usize);
        for _ in 0..c_max {
            let v: Complex64 = ph.iter().zip(&samples).map(|(p, (_, fx))| p * fx).sum();
            ints.push(v);
            for (p, (z, _)) in ph.iter_mut().zip(&samples) {
                *p *= z;
            }
        }
        let mut m_sum = Complex64::new(0.0, 0.0);
        let mut m_mass = 0.0f64;
        for (c, cp, a_tab) in &entries {
            let c0 = c / cp.unsigned_abs();
            m_mass += c0 as f64 * ints[(c - 1) as usize].norm() / mf;
            if gcd(m, *cp) != 1 {
                continue;
            }
            let a = a_tab[rem(m, (c0 * q) as i64) as usize];
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let modulus = c0 as i64 * m;
            let inv = if modulus == 1 { 0 } else { mod_inverse(rem(*cp, modulus), modulus).expect("unit") };
            let phase = e_q(rem(l as i64 * q as i64 % modulus * inv, modulus), modulus as u64);
            let int = if *cp > 0 { ints[(c - 1) as usize] } else { ints[(c - 1) as usize].conj() };
            m_sum += s.chi(*cp) * phase * a * int / mf;
        }
        total += m_sum;
        if 2.0 * m_mass < thr / mf {
            quiet += 1;
            tail = tail.max(m_mass);
        } else {
            quiet = 0;
        }
    }
    let pref = s.eps * (2.0 * PI / (qf * qf.sqrt()));
    Ok((
        pref * total,
        StageCert {
            outer: m as usize,
            inner: c_max as usize,
            tail,
        },
    ))
}

/// The `m = 0` term of the first Poisson step computed from its character sum over all
/// `c ≤ c_max`, against `i^{−k}(ε²/q)χ̄(ℓ)(H_k g)(ℓ/q²)` from direct quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFrequency {
    pub from_sum: Complex64,
    pub closed_form: Complex64,
    pub residual: f64,
}

pub fn zero_frequency_check(
    k: WeightK,
    chi: &DirichletCharacter,
    l: u64,
    g: &TestFunction,
    cfg: &SpectralConfig,
) -> Result<ZeroFrequency, SpectralError> {
    cfg.validate()?;
    let q = chi.modulus();
    let eps = gauss_sum(chi).epsilon;
    let qi = q as i64;
    let mut total = Complex64::new(0.0, 0.0);
    let (lo, hi) = g.support();
    for c in 1..=(q * q * q) {
        let ci = c as i64;
        let mut arith = Complex64::new(0.0, 0.0);
        for x in 0..ci {
            if ci > 1 && gcd(x, ci) != 1 {
                continue;
            }
            if rem(x * qi, ci) != 0 {
                continue;
            }
            let inv = if ci == 1 { 0 } else { mod_inverse(x, ci).expect("unit") };
            arith += e_q(l as i64 * inv, c) * chi.value(qi * x / ci).conj();
        }
        if arith.norm() < 1e-12 {
            continue;
        }
        let cf = c as f64;
        let lf = l as f64;
        let integral = integrate_adaptive(
            lo,
            hi,
            &cfg.quad,
            |y: f64| 2.0 * cf * (y / lf).sqrt(),
            16,
            |y| g.eval(y) * bessel_j_real(k, 4.0 * PI * (y * lf).sqrt() / cf),
        )?;
        total += arith * integral / cf;
    }
    let from_sum = total * eps * (2.0 * PI * k.i_pow_k() / (q as f64).sqrt());
    let a = l as f64 / (q * q) as f64;
    let h = HankelEvaluator::new(g, k, a, &cfg.quad)?.eval(a);
    let closed_form = eps * eps * chi.value(l as i64).conj() * (k.i_pow_k() * h / q as f64);
    Ok(ZeroFrequency {
        from_sum,
        closed_form,
        residual: (from_sum - closed_form).norm(),
    })
}

/// The `T_2` branch of the second Poisson step: `−(2π/q)(ε/√q) Σ_{m0 | q^∞} D(0; m0, 1)/m0 ·
/// ∫ (H_k g)(x/q²) J_{k−1}(4π√(ℓx)/m0) dx`, which should equal `−g(ℓ)χ(ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T2Check {
    pub branch: Complex64,
    pub target: Complex64,
    pub residual: f64,
}

pub fn t2_check(
    k: WeightK,
    chi: &DirichletCharacter,
    l: u64,
    g: &TestFunction,
    cfg: &SpectralConfig,
) -> Result<T2Check, SpectralError> {
    cfg.validate()?;
    let q = chi.modulus();
    let qi = q as i64;
    let qf = q as f64;
    let eps = gauss_sum(chi).epsilon;
    let (lo, hi) = g.support();
    let a_turn = (k.order() as f64 / (4.0 * PI)).powi(2) / lo;
    let tail_cfg = SpectralConfig {
        abs_tol: cfg.abs_tol * 1e-1,
        ..*cfg
    };
    let a_cut = (dual_weights(g, k, 1, &tail_cfg)?.values.len() as f64).max(a_turn);
    let table = hankel_table(g, k, a_cut, &cfg.quad)?;
    let mut branch = Complex64::new(0.0, 0.0);
    for m0 in crate::residue::smooth_over(q, q * q * q) {
        let m0i = m0 as i64;
        let mut d = Complex64::new(0.0, 0.0);
        for alpha in 0..m0i {
            if m0i > 1 && gcd(alpha, m0i) != 1 {
                continue;
            }
            if rem(alpha * qi, m0i) != 0 {
                continue;
            }
            let inv = if m0i == 1 { 0 } else { mod_inverse(alpha, m0i).expect("unit") };
            d += e_q(-(l as i64) * inv, m0) * chi.value(alpha * qi / m0i);
        }
        if d.norm() < 1e-12 {
            continue;
        }
        // x = q²σ²; J_{k−1}(4π√(ℓx)/m0) = J_{k−1}(4πqσ√ℓ/m0)
        let s_max = a_cut.sqrt();
        let freq = 2.0 * hi.sqrt() + 2.0 * qf * (l as f64).sqrt() / m0 as f64;
        let breaks = panel_breaks(0.0, s_max, 16, cfg.quad.oscillation_safety, |_| 1.0 / freq, cfg.quad.max_panels)?;
        let integral = qf * qf
            * integrate_panels(&breaks, cfg.quad.nodes_per_panel, |sg| {
                2.0 * sg * table.eval(sg * sg) * bessel_j_real(k, 4.0 * PI * qf * sg * (l as f64).sqrt() / m0 as f64)
            });
        branch -= d * integral / m0 as f64;
    }
    branch *= eps * (2.0 * PI / (qf * qf.sqrt()));
    let target = -chi.value(l as i64) * g.eval(l as f64);
    Ok(T2Check {
        branch,
        target,
        residual: (branch - target).norm(),
    })
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

pub fn pipeline_trace(
    k: WeightK,
    chi: &DirichletCharacter,
    l: u64,
    g: &TestFunction,
    cfg: &SpectralConfig,
    stages: Stages,
) -> Result<PipelineTrace, SpectralError> {
    cfg.validate()?;
    require_primitive(chi)?;
    if l == 0 {
        return Err(SpectralError::InvalidParams("ℓ must be positive".into()));
    }
    let setup = Setup {
        k,
        chi,
        l,
        g,
        cfg,
        q: chi.modulus(),
        eps: gauss_sum(chi).epsilon,
    };
    let head = setup.head()?;
    let (stage_a, cert_a) = stage_a(&setup)?;
    let (sk_b, cert_b) = stage_b(&setup)?;
    let (sk_c, cert_c) = stage_c_sk(&setup)?;
    let (stage_b, stage_c) = (head + sk_b, head + sk_c);
    let abc = [stage_a, stage_b, stage_c];
    let mut max_pairwise_residual = 0.0f64;
    for i in 0..3 {
        for j in 0..i {
            max_pairwise_residual = max_pairwise_residual.max((abc[i] - abc[j]).norm());
        }
    }
    let (stage_d, cert_d, max_residual_d) = if stages.stage_d {
        let (sk_d, cert) = stage_d_sk(&setup, cert_b.outer as u64)?;
        let d = head + sk_d;
        let r = abc.iter().map(|v| (v - d).norm()).fold(0.0, f64::max);
        (Some(d), Some(cert), Some(r))
    } else {
        (None, None, None)
    };
    Ok(PipelineTrace {
        stage_a,
        stage_b,
        stage_c,
        stage_d,
        cert_a,
        cert_b,
        cert_c,
        cert_d,
        max_pairwise_residual,
        max_residual_d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::quadratic_character;

    fn setup() -> (WeightK, DirichletCharacter, TestFunction, SpectralConfig) {
        (
            WeightK::new(12).unwrap(),
            quadratic_character(3).unwrap().unwrap(),
            TestFunction::new(8.0, 4.0).unwrap(),
            SpectralConfig::default(),
        )
    }

    #[test]
    fn zero_frequency_matches_closed_form() {
        let (k, chi, g, cfg) = setup();
        for l in [1u64, 2, 4] {
            let z = zero_frequency_check(k, &chi, l, &g, &cfg).unwrap();
            assert!(z.residual < 1e-10, "l={l} {z:?}");
            assert!(z.closed_form.norm() > 1e-3);
        }
    }

    #[test]
    fn t2_branch_cancels_head() {
        let (k, chi, g, cfg) = setup();
        let t = t2_check(k, &chi, 5, &g, &cfg).unwrap();
        assert!(t.target.norm() > 0.1);
        assert!(t.residual < 1e-8, "{t:?}");
    }

    #[test]
    fn stages_agree_for_trivial_modulus() {
        let k = WeightK::new(12).unwrap();
        let chi = DirichletCharacter::principal(1).unwrap();
        let g = TestFunction::new(3.0, 1.5).unwrap();
        let cfg = SpectralConfig::default();
        let t = pipeline_trace(k, &chi, 2, &g, &cfg, Stages { stage_d: true }).unwrap();
        assert!(t.max_pairwise_residual < 1e-6, "{t:?}");
        assert!(t.max_residual_d.unwrap() < 1e-4, "{t:?}");
        assert!(t.stage_a.norm() > 1e-3);
    }

    #[test]
    fn imprimitive_character_is_rejected() {
        let k = WeightK::new(12).unwrap();
        let chi = DirichletCharacter::principal(3).unwrap();
        let g = TestFunction::new(3.0, 1.5).unwrap();
        let r = pipeline_trace(k, &chi, 1, &g, &SpectralConfig::default(), Stages::default());
        assert!(matches!(r, Err(SpectralError::InvalidParams(_))));
    }
}
