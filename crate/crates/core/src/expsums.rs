//! Finite exponential sums and exact verifiers for the identities they satisfy.

use num_complex::Complex64;

use crate::characters::{gauss_sum, root_of_unity, DirichletCharacter};
use crate::cyclotomic::{CycAccumulator, CyclotomicElement};
use crate::error::{CyclotomicError, SumError};
use crate::residue::{divides_power_of, gcd, lcm, mod_inverse, rem};

/// An exact cyclotomic value carried alongside an independent double evaluation.
#[derive(Debug, Clone)]
pub struct SumValue {
    pub exact: CyclotomicElement,
    pub numeric: Complex64,
}

/// Outcome of an identity check that has both an exact and a numeric side.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub exact: bool,
    pub residual: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
}

fn inverse_table(c: i64) -> Vec<i64> {
    (0..c)
        .map(|x| if gcd(x, c) == 1 { mod_inverse(x, c).unwrap() } else { -1 })
        .collect()
}

/// `S(m, n; c) = Σ*_{x mod c} e_c(mx + n x̄)`.
pub fn kloosterman(m: i64, n: i64, c: u64) -> SumValue {
    assert!(c >= 1);
    let ci = c as i64;
    let inv = inverse_table(ci);
    let mut acc = CycAccumulator::new(c);
    let mut num = 0.0f64;
    for x in 0..ci {
        if inv[x as usize] < 0 && ci > 1 {
            continue;
        }
        let ix = if ci == 1 { 0 } else { inv[x as usize] };
        let k = rem(rem(m, ci) * x + rem(n, ci) * ix, ci);
        acc.add_root(k, 1).expect("bounded");
        num += (std::f64::consts::TAU * k as f64 / c as f64).cos();
    }
    SumValue {
        exact: acc.finish(),
        numeric: Complex64::new(num, 0.0),
    }
}

/// Real value of `S(m, n; c)` in double precision.
pub fn kloosterman_f64(m: i64, n: i64, c: u64) -> f64 {
    if c == 1 {
        return 1.0;
    }
    let ci = c as i64;
    let (mm, nn) = (rem(m, ci), rem(n, ci));
    let mut s = 0.0;
    for x in 1..ci {
        if gcd(x, ci) != 1 {
            continue;
        }
        let ix = mod_inverse(x, ci).unwrap();
        let k = (mm * x + nn * ix) % ci;
        s += (std::f64::consts::TAU * k as f64 / c as f64).cos();
    }
    s
}

/// `S(m,n;c) = Σ_{d | (m,n,c)} d · S(1, mn/d²; c/d)`, exactly and numerically.
pub fn selberg_factorization_check(m: i64, n: i64, c: u64) -> IdentityCheck {
    let lhs = kloosterman(m, n, c);
    let g = gcd(gcd(m, n), c as i64) as u64;
    let mut acc = CycAccumulator::new(c);
    acc.add_shifted(&lhs.exact, 0, 1).unwrap();
    let mut rhs = Complex64::new(0.0, 0.0);
    for d in 1..=g {
        if g % d != 0 {
            continue;
        }
        let di = d as i64;
        let t = kloosterman(1, m / di * (n / di), c / d);
        acc.add_shifted(&t.exact, 0, -di).unwrap();
        rhs += t.numeric * d as f64;
    }
    IdentityCheck {
        exact: acc.finish().is_zero(),
        residual: (lhs.numeric - rhs).norm(),
        lhs: lhs.numeric,
        rhs,
    }
}

/// The data `(ψ mod r, h, a, u, b, v)` of `C_ψ^h(a, u, b, v)`.
#[derive(Debug, Clone)]
pub struct CharSumParams {
    pub psi: DirichletCharacter,
    pub h: i64,
    pub a: u64,
    pub u: i64,
    pub b: u64,
    pub v: i64,
}

impl CharSumParams {
    pub fn new(psi: DirichletCharacter, h: i64, a: u64, u: i64, b: u64, v: i64) -> Result<Self, SumError> {
        let p = Self { psi, h, a, u, b, v };
        p.validate()?;
        Ok(p)
    }

    pub fn r(&self) -> u64 {
        self.psi.modulus()
    }

    pub fn validate(&self) -> Result<(), SumError> {
        let r = self.r();
        if self.a == 0 || self.b == 0 {
            return Err(SumError::InvalidParams("a and b must be positive".into()));
        }
        if !divides_power_of(self.a * self.b, r) {
            return Err(SumError::InvalidParams(format!(
                "ab = {} does not divide a power of r = {r}",
                self.a * self.b
            )));
        }
        if gcd(self.u * self.v, r as i64) != 1 {
            return Err(SumError::InvalidParams(format!("gcd(uv, r) != 1 for r = {r}")));
        }
        Ok(())
    }

    /// The same sum with `(a, u)` and `(b, v)` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            psi: self.psi.clone(),
            h: self.h,
            a: self.b,
            u: self.v,
            b: self.a,
            v: self.u,
        }
    }
}

/// Adds `mult · ζ_L^shift · C_ψ^h(a,u,b,v)` to an accumulator whose order is a
/// multiple of `a` and of the character order. Returns the double value of `C`.
fn accumulate_char_sum(
    p: &CharSumParams,
    acc: Option<&mut CycAccumulator>,
    shift: i64,
    conj: bool,
    mult: i64,
) -> Result<Complex64, CyclotomicError> {
    let r = p.r() as i64;
    let a = p.a as i64;
    let b = p.b as i64;
    let ord = p.psi.order();
    let pu = match p.psi.value_exponent(p.u) {
        Some(k) => k as i64,
        None => return Ok(Complex64::new(0.0, 0.0)),
    };
    let mut numeric = Complex64::new(0.0, 0.0);
    let mut acc = acc;
    let (sa, so) = match &acc {
        Some(ac) => ((ac.order() / p.a) as i64, (ac.order() / ord) as i64),
        None => (0, 0),
    };
    let sgn = if conj { -1 } else { 1 };
    for alpha in 0..a {
        if a > 1 && gcd(alpha, a) != 1 {
            continue;
        }
        let top = alpha as i128 * r as i128 + b as i128 * p.v as i128;
        if top.rem_euclid(a as i128) != 0 {
            continue;
        }
        let arg = rem((top / a as i128).rem_euclid(r as i128) as i64, r);
        let k = match p.psi.value_exponent(arg) {
            Some(k) => k as i64,
            None => continue,
        };
        let add = if a == 1 { 0 } else { rem(p.h * mod_inverse(alpha * rem(p.u, a), a).unwrap(), a) };
        let chi_exp = rem(pu - k, ord as i64);
        numeric += root_of_unity(sgn * (add * ord as i64 + chi_exp * a), p.a * ord);
        if let Some(ac) = acc.as_deref_mut() {
            ac.add_root(shift + sgn * (add * sa + chi_exp * so), mult)?;
        }
    }
    Ok(numeric)
}

/// `C_ψ^h(a, u, b, v) = ψ(u) Σ*_{α mod a, bv ≡ −αr (a)} e_a(h·(αu)^{-1}) ψ̄((αr + bv)/a)`.
pub fn char_sum_c(p: &CharSumParams) -> Result<SumValue, SumError> {
    p.validate()?;
    let l = lcm(p.a as i64, p.psi.order() as i64) as u64;
    let mut acc = CycAccumulator::new(l);
    let numeric = accumulate_char_sum(p, Some(&mut acc), 0, false, 1)?;
    Ok(SumValue {
        exact: acc.finish(),
        numeric,
    })
}

/// Sign of the phase in the reciprocity law; the flipped version is a mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSign {
    Standard,
    Flipped,
}

/// `C(a,u,b,v) = e_{ab}(−h r (uv)^{-1}) · conj C(b,v,a,u)`.
pub fn verify_reciprocity(p: &CharSumParams, sign: PhaseSign) -> Result<IdentityCheck, SumError> {
    p.validate()?;
    let ab = p.a * p.b;
    let l = lcm(ab as i64, p.psi.order() as i64) as u64;
    let r = p.r() as i64;
    let inv = mod_inverse(rem(p.u * p.v, ab as i64), ab as i64).unwrap();
    let s = match sign {
        PhaseSign::Standard => -1,
        PhaseSign::Flipped => 1,
    };
    let phase = rem(s * rem(p.h, ab as i64) * rem(r, ab as i64) % ab as i64 * inv, ab as i64);
    let mut acc = CycAccumulator::new(l);
    let lhs = accumulate_char_sum(p, Some(&mut acc), 0, false, 1)?;
    let q = p.swapped();
    let shift = phase * (l / ab) as i64;
    let rc = accumulate_char_sum(&q, Some(&mut acc), shift, true, -1)?;
    let rhs = root_of_unity(phase, ab) * rc;
    Ok(IdentityCheck {
        exact: acc.finish().is_zero(),
        residual: (lhs - rhs).norm(),
        lhs,
        rhs,
    })
}

/// Result of the two factorizations of `C_{ψ1ψ2}^h(a1a2, u, b1b2, v)`.
#[derive(Debug, Clone)]
pub struct MultiplicativityCheck {
    pub first: bool,
    pub second: bool,
    pub residual: f64,
}

/// Twisted multiplicativity over coprime moduli. The first variant scales `u`
/// by `a_j b_j`; the second scales `v` and carries the factor `ψ1(a2²)ψ2(a1²)`.
#[allow(clippy::too_many_arguments)]
pub fn verify_multiplicativity(
    psi1: &DirichletCharacter,
    psi2: &DirichletCharacter,
    a1: u64,
    b1: u64,
    a2: u64,
    b2: u64,
    h: i64,
    u: i64,
    v: i64,
) -> Result<MultiplicativityCheck, SumError> {
    let (r1, r2) = (psi1.modulus(), psi2.modulus());
    if gcd(r1 as i64, r2 as i64) != 1 {
        return Err(SumError::InvalidParams("moduli not coprime".into()));
    }
    let psi = psi1.product_coprime(psi2)?;
    let whole = CharSumParams::new(psi, h, a1 * a2, u, b1 * b2, v)?;
    let (a1i, a2i, b1i, b2i) = (a1 as i64, a2 as i64, b1 as i64, b2 as i64);
    let f1 = CharSumParams::new(psi1.clone(), h * r2 as i64, a1, a2i * b2i * u, b1, v)?;
    let f2 = CharSumParams::new(psi2.clone(), h * r1 as i64, a2, a1i * b1i * u, b2, v)?;
    let g1 = CharSumParams::new(psi1.clone(), h * r2 as i64, a1, u, b1, a2i * b2i * v)?;
    let g2 = CharSumParams::new(psi2.clone(), h * r1 as i64, a2, u, b2, a1i * b1i * v)?;
    let c = char_sum_c(&whole)?;
    let (cf1, cf2, cg1, cg2) = (char_sum_c(&f1)?, char_sum_c(&f2)?, char_sum_c(&g1)?, char_sum_c(&g2)?);
    let mut l = c.exact.order();
    for x in [&cf1, &cf2, &cg1, &cg2] {
        l = lcm(l as i64, x.exact.order() as i64) as u64;
    }
    l = lcm(l as i64, lcm(psi1.order() as i64, psi2.order() as i64)).max(1) as u64;
    let twist1 = psi1
        .value_exact(b2i * b2i, l)
        .mul(&psi2.value_exact(b1i * b1i, l))?
        .conj();
    let twist2 = psi1.value_exact(a2i * a2i, l).mul(&psi2.value_exact(a1i * a1i, l))?;
    let rhs1 = twist1.mul(&cf1.exact)?.mul(&cf2.exact)?;
    let rhs2 = twist2.mul(&cg1.exact)?.mul(&cg2.exact)?;
    let lhs = c.exact.lift(l);
    let n1 = (psi1.value(b2i * b2i) * psi2.value(b1i * b1i)).conj() * cf1.numeric * cf2.numeric;
    let n2 = psi1.value(a2i * a2i) * psi2.value(a1i * a1i) * cg1.numeric * cg2.numeric;
    Ok(MultiplicativityCheck {
        first: lhs.eq_exact(&rhs1)?,
        second: lhs.eq_exact(&rhs2)?,
        residual: (c.numeric - n1).norm().max((c.numeric - n2).norm()),
    })
}

/// Outcome of the local vanishing test for `C_ψ^h(p^s, u, p^t, v)`.
#[derive(Debug, Clone, Copy)]
pub struct SupportOutcome {
    /// Whether `s = t ≤ k`, `t = k < s` or `s = k < t`.
    pub allowed: bool,
    pub vanishes: bool,
}

impl SupportOutcome {
    /// Outside the three allowed configurations the sum must vanish.
    pub fn implication_holds(&self) -> bool {
        self.allowed || self.vanishes
    }

    /// The stronger reading where vanishing happens exactly off the allowed set.
    pub fn iff_holds(&self) -> bool {
        self.allowed != self.vanishes
    }
}

pub fn support_allowed(k: u32, s: u32, t: u32) -> bool {
    (s == t && s <= k) || (t == k && k < s) || (s == k && k < t)
}

/// Checks the vanishing pattern of both `C(p^s,u,p^t,v)` and `C(p^t,v,p^s,u)`.
pub fn verify_support_claim(
    psi: &DirichletCharacter,
    p: u64,
    k: u32,
    h: i64,
    u: i64,
    v: i64,
    s: u32,
    t: u32,
) -> Result<[SupportOutcome; 2], SumError> {
    if psi.modulus() != p.pow(k) {
        return Err(SumError::InvalidParams("ψ must have modulus p^k".into()));
    }
    let one = CharSumParams::new(psi.clone(), h, p.pow(s), u, p.pow(t), v)?;
    let two = one.swapped();
    let mut out = [SupportOutcome { allowed: false, vanishes: false }; 2];
    for (i, (prm, ss, tt)) in [(one, s, t), (two, t, s)].into_iter().enumerate() {
        let val = char_sum_c(&prm)?;
        out[i] = SupportOutcome {
            allowed: support_allowed(k, ss, tt),
            vanishes: val.exact.is_zero(),
        };
    }
    Ok(out)
}

/// `D̂_χ^ℓ(m, c) = Σ_{γ mod cq} χ(γ) S(γ, ℓ; c) e_{cq}(mγ)` by direct enumeration.
pub fn dft_d_naive(chi: &DirichletCharacter, l: i64, m: i64, c: u64) -> SumValue {
    let q = chi.modulus();
    let cq = c * q;
    let big = lcm(cq as i64, chi.order() as i64) as u64;
    let mut acc = CycAccumulator::new(big);
    let mut num = Complex64::new(0.0, 0.0);
    let ci = c as i64;
    let so = (big / chi.order()) as i64;
    let sc = (big / c) as i64;
    let scq = (big / cq) as i64;
    for g in 0..cq as i64 {
        let Some(k) = chi.value_exponent(g) else { continue };
        for x in 0..ci {
            if ci > 1 && gcd(x, ci) != 1 {
                continue;
            }
            let ix = if ci == 1 { 0 } else { mod_inverse(x, ci).unwrap() };
            let e_kl = rem(g * x + l * ix, ci);
            let e = k as i64 * so + e_kl * sc + rem(m * g, cq as i64) * scq;
            acc.add_root(e, 1).unwrap();
            num += root_of_unity(e, big);
        }
    }
    SumValue {
        exact: acc.finish(),
        numeric: num,
    }
}

/// Per-character data reused across many `D̂` evaluations.
#[derive(Debug, Clone)]
pub struct DftContext {
    pub chi: DirichletCharacter,
    /// Order of the ring holding `Σ_α χ(α) e_q(αt)`.
    pub base: u64,
    /// `A(t) = Σ_{α mod q} χ(α) ζ_q^{αt}` for `t mod q`.
    twists: Vec<CyclotomicElement>,
    twists_f64: Vec<Complex64>,
    gauss: CyclotomicElement,
    epsilon: Complex64,
}

impl DftContext {
    pub fn new(chi: &DirichletCharacter) -> Self {
        let q = chi.modulus();
        let base = lcm(q as i64, chi.order() as i64) as u64;
        let twists: Vec<_> = (0..q as i64)
            .map(|t| crate::characters::additive_twist_exact(chi, t, base))
            .collect();
        let twists_f64 = (0..q as i64)
            .map(|t| {
                (0..q as i64)
                    .map(|a| chi.value(a) * root_of_unity(a * t, q))
                    .sum::<Complex64>()
            })
            .collect();
        let g = gauss_sum(chi);
        Self {
            chi: chi.clone(),
            base,
            twists,
            twists_f64,
            gauss: g.exact,
            epsilon: g.epsilon,
        }
    }

    pub fn epsilon(&self) -> Complex64 {
        self.epsilon
    }

    /// Terms `(x̄, t)` of `D̂(m,c) = c Σ_{x mod c, c | qx+m} e_c(ℓx̄) A((qx+m)/c)`.
    fn terms(&self, m: i64, c: u64) -> Vec<(i64, usize)> {
        let q = self.chi.modulus() as i64;
        let ci = c as i64;
        let mut out = Vec::new();
        for x in 0..ci {
            if ci > 1 && gcd(x, ci) != 1 {
                continue;
            }
            let top = q * x + m;
            if rem(top, ci) != 0 {
                continue;
            }
            let t = rem(top.div_euclid(ci), q) as usize;
            let ix = if ci == 1 { 0 } else { mod_inverse(x, ci).unwrap() };
            out.push((ix, t));
        }
        out
    }

    /// `D̂(m,c)` via the split `γ = α + βq`, which carries out the `β`-sum.
    pub fn dft(&self, l: i64, m: i64, c: u64) -> SumValue {
        let ord = lcm(c as i64, self.base as i64) as u64;
        let mut acc = CycAccumulator::new(ord);
        let sc = (ord / c) as i64;
        let mut num = Complex64::new(0.0, 0.0);
        for (ix, t) in self.terms(m, c) {
            let ph = rem(l * ix, c as i64);
            acc.add_shifted(&self.twists[t], ph * sc, c as i64).unwrap();
            num += root_of_unity(ph, c) * self.twists_f64[t] * c as f64;
        }
        SumValue {
            exact: acc.finish(),
            numeric: num,
        }
    }

    pub fn dft_f64(&self, l: i64, m: i64, c: u64) -> Complex64 {
        let mut num = Complex64::new(0.0, 0.0);
        for (ix, t) in self.terms(m, c) {
            num += root_of_unity(l * ix, c) * self.twists_f64[t];
        }
        num * c as f64
    }
}

pub fn dft_d(chi: &DirichletCharacter, l: i64, m: i64, c: u64) -> SumValue {
    DftContext::new(chi).dft(l, m, c)
}

/// Which right-hand side of the DFT duality to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualityVariant {
    /// `ε² (c/m) conj D̂(c,m) e(−ℓq/(mc))`.
    Standard,
    /// The same with the phase `e(−1/(mc))` in place of `e(−ℓq/(mc))`.
    UnitPhase,
    /// `|ε|²` in place of `ε²`; a mutation.
    AbsEpsilon,
}

/// `D̂(m,c) = ε_χ² (c/m) conj(D̂(c,m)) e(−ℓq/(mc))`, cleared of denominators as
/// `m q D̂(m,c) = c G² conj(D̂(c,m)) ζ_{mc}^{−ℓq}` with `G` the Gauss sum.
pub fn verify_dft_duality(
    ctx: &DftContext,
    l: i64,
    m: u64,
    c: u64,
    variant: DualityVariant,
) -> Result<IdentityCheck, SumError> {
    if !ctx.chi.is_primitive() {
        return Err(SumError::Character(crate::error::CharacterError::NotPrimitive(
            ctx.chi.modulus(),
        )));
    }
    if m == 0 || c == 0 {
        return Err(SumError::InvalidParams("m, c must be positive".into()));
    }
    let q = ctx.chi.modulus() as i64;
    let mc = (m * c) as i64;
    let big = lcm(lcm(mc, q), ctx.base as i64) as u64;
    let phase = match variant {
        DualityVariant::UnitPhase => -1,
        _ => rem(-l * q, mc),
    };
    let left = ctx.dft(l, m as i64, c);
    let right = ctx.dft(l, c as i64, m);
    let gg = match variant {
        DualityVariant::AbsEpsilon => ctx.gauss.mul(&ctx.gauss.conj())?,
        _ => ctx.gauss.mul(&ctx.gauss)?,
    };
    let prod = gg.mul(&right.exact.conj())?;
    let mut acc = CycAccumulator::new(big);
    acc.add_shifted(&left.exact, 0, m as i64 * q)?;
    acc.add_shifted(&prod, phase * (big as i64 / mc), -(c as i64))?;
    let eps2 = match variant {
        DualityVariant::AbsEpsilon => Complex64::new(ctx.epsilon.norm_sqr(), 0.0),
        _ => ctx.epsilon * ctx.epsilon,
    };
    let lhs = left.numeric;
    let rhs = eps2 * (c as f64 / m as f64) * right.numeric.conj() * root_of_unity(phase, mc as u64);
    Ok(IdentityCheck {
        exact: acc.finish().is_zero(),
        residual: (lhs - rhs).norm(),
        lhs,
        rhs,
    })
}
