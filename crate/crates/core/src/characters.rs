//! Dirichlet characters mod `q`, built from the CRT decomposition of
//! `(Z/qZ)^×`.
//!
//! Generators are ordered by ascending prime. An odd prime power contributes
//! one primitive root; `4` contributes `-1`; `2^e` with `e ≥ 3` contributes the
//! pair `(-1, 5)` in that order; `2` contributes nothing. A character is the
//! exponent vector on this list: its value at the `i`-th generator `g_i` of
//! order `n_i` is `e(x_i / n_i)`.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::cyclotomic::{CycAccumulator, CyclotomicElement};
use crate::error::CharacterError;
use crate::residue::{factorize, gcd, lcm, rem};

pub const MAX_MODULUS: u64 = 10_000;

#[derive(Debug)]
struct Component {
    p: u64,
    pe: u64,
    /// Generator residues mod `p^e` and their orders.
    gens: Vec<(u64, u64)>,
    /// Discrete logs per residue mod `p^e`; `None` off the units.
    dlog: Vec<Option<[u32; 2]>>,
}

impl Component {
    fn new(p: u64, e: u32) -> Self {
        let pe = p.pow(e);
        let mut dlog = vec![None; pe as usize];
        let gens;
        if p == 2 {
            match e {
                1 => {
                    gens = vec![];
                    dlog[1] = Some([0, 0]);
                }
                2 => {
                    gens = vec![(3, 2)];
                    dlog[1] = Some([0, 0]);
                    dlog[3] = Some([1, 0]);
                }
                _ => {
                    let half = pe / 4;
                    gens = vec![(pe - 1, 2), (5, half)];
                    let mut x = 1u64;
                    for b in 0..half {
                        dlog[x as usize] = Some([0, b as u32]);
                        dlog[(pe - x) as usize] = Some([1, b as u32]);
                        x = x * 5 % pe;
                    }
                }
            }
        } else {
            let g = primitive_root_prime_power(p, e);
            let n = (p - 1) * pe / p;
            gens = vec![(g, n)];
            let mut x = 1u64;
            for k in 0..n {
                dlog[x as usize] = Some([k as u32, 0]);
                x = x * g % pe;
            }
        }
        Self { p, pe, gens, dlog }
    }
}

fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let f = factorize(p - 1).unwrap();
    let is_root = |g: u64| {
        f.primes()
            .all(|r| pow_mod(g, (p - 1) / r, p) != 1)
    };
    let g = (2..p).find(|&g| is_root(g)).unwrap_or(1);
    if e == 1 || p == 2 {
        return if p == 2 { 1 } else { g };
    }
    if pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// The unit group mod `q` with its generator data and discrete-log tables.
#[derive(Debug)]
pub struct CharacterGroup {
    q: u64,
    comps: Vec<Component>,
    /// Orders of the flattened generator list.
    gen_orders: Vec<u64>,
    /// Exponent of the group, `λ(q)`.
    exponent: u64,
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Arc<Self>, CharacterError> {
        if q == 0 || q > MAX_MODULUS {
            return Err(CharacterError::OutOfRange(q));
        }
        let f = factorize(q).map_err(|_| CharacterError::OutOfRange(q))?;
        let comps: Vec<Component> = f.factors.iter().map(|&(p, e)| Component::new(p, e)).collect();
        let gen_orders: Vec<u64> = comps.iter().flat_map(|c| c.gens.iter().map(|g| g.1)).collect();
        let exponent = gen_orders.iter().fold(1i64, |a, &b| lcm(a, b as i64)) as u64;
        Ok(Arc::new(Self {
            q,
            comps,
            gen_orders,
            exponent,
        }))
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn generator_orders(&self) -> &[u64] {
        &self.gen_orders
    }

    /// Generator residues mod `q`, each trivial on all other components.
    pub fn generators(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for (ci, c) in self.comps.iter().enumerate() {
            for &(g, _) in &c.gens {
                let mut x = 0u64;
                let mut ok = false;
                for t in 0..self.q {
                    if t % c.pe == g && self.comps.iter().enumerate().all(|(j, d)| j == ci || t % d.pe == 1 % d.pe) {
                        x = t;
                        ok = true;
                        break;
                    }
                }
                debug_assert!(ok);
                out.push(x);
            }
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.gen_orders.iter().product()
    }

    /// Discrete logs of `n` on the flattened generator list, or `None` for non-units.
    pub fn dlog(&self, n: i64) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(self.gen_orders.len());
        for c in &self.comps {
            let r = rem(n, c.pe as i64) as usize;
            let d = c.dlog[r]?;
            for (i, _) in c.gens.iter().enumerate() {
                out.push(d[i] as u64);
            }
        }
        Some(out)
    }

    /// All characters in lexicographic order of exponent vectors.
    pub fn characters(self: &Arc<Self>) -> Vec<DirichletCharacter> {
        let n = self.gen_orders.len();
        let mut idx = vec![0u64; n];
        let mut out = Vec::with_capacity(self.order() as usize);
        loop {
            out.push(DirichletCharacter::from_exponents_unchecked(self.clone(), idx.clone()));
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < self.gen_orders[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
    }
}

/// Every character mod `q`.
pub fn character_group(q: u64) -> Result<Vec<DirichletCharacter>, CharacterError> {
    Ok(CharacterGroup::new(q)?.characters())
}

/// Primitive characters mod `q`.
pub fn primitive_characters(q: u64) -> Result<Vec<DirichletCharacter>, CharacterError> {
    Ok(character_group(q)?.into_iter().filter(|c| c.is_primitive()).collect())
}

#[derive(Clone)]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exps: Vec<u64>,
    order: u64,
    table: Arc<OnceLock<Vec<u32>>>,
}

impl std::fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "χ[{}; {:?}]", self.group.q, self.exps)
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.q == other.group.q && self.exps == other.exps
    }
}

impl Eq for DirichletCharacter {}

pub const NON_UNIT: u32 = u32::MAX;

impl DirichletCharacter {
    fn from_exponents_unchecked(group: Arc<CharacterGroup>, exps: Vec<u64>) -> Self {
        let order = exps
            .iter()
            .zip(&group.gen_orders)
            .map(|(&x, &n)| n / crate::residue::gcd_u(x, n))
            .fold(1i64, |a, b| lcm(a, b as i64)) as u64;
        Self {
            group,
            exps,
            order,
            table: Arc::new(OnceLock::new()),
        }
    }

    pub fn new(q: u64, exps: &[i64]) -> Result<Self, CharacterError> {
        let group = CharacterGroup::new(q)?;
        if exps.len() != group.gen_orders.len() {
            return Err(CharacterError::BadIndex(format!(
                "modulus {q} needs {} exponents, got {}",
                group.gen_orders.len(),
                exps.len()
            )));
        }
        let e = exps
            .iter()
            .zip(&group.gen_orders)
            .map(|(&x, &n)| rem(x, n as i64) as u64)
            .collect();
        Ok(Self::from_exponents_unchecked(group, e))
    }

    pub fn principal(q: u64) -> Result<Self, CharacterError> {
        let group = CharacterGroup::new(q)?;
        let n = group.gen_orders.len();
        Ok(Self::from_exponents_unchecked(group, vec![0; n]))
    }

    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    /// Value exponent in units of `1/order`, computed without the table.
    pub fn value_exponent_direct(&self, n: i64) -> Option<u64> {
        let d = self.group.dlog(n)?;
        let lam = self.group.exponent;
        let mut acc = 0u64;
        for ((x, dl), &ord) in self.exps.iter().zip(d).zip(&self.group.gen_orders) {
            acc = (acc + (x * dl % ord) * (lam / ord)) % lam;
        }
        Some(acc / (lam / self.order))
    }

    fn table(&self) -> &[u32] {
        self.table.get_or_init(|| {
            (0..self.group.q as i64)
                .map(|n| self.value_exponent_direct(n).map(|v| v as u32).unwrap_or(NON_UNIT))
                .collect()
        })
    }

    /// `χ(n) = e(k/order)` returns `Some(k)`; `None` when `gcd(n, q) > 1`.
    #[inline]
    pub fn value_exponent(&self, n: i64) -> Option<u64> {
        let v = self.table()[rem(n, self.group.q as i64) as usize];
        (v != NON_UNIT).then_some(v as u64)
    }

    pub fn value(&self, n: i64) -> Complex64 {
        match self.value_exponent(n) {
            None => Complex64::new(0.0, 0.0),
            Some(k) => root_of_unity(k as i64, self.order),
        }
    }

    /// `χ(n)` as an element of `Z[ζ_L]`, where `order | L`.
    pub fn value_exact(&self, n: i64, l: u64) -> CyclotomicElement {
        assert!(l % self.order == 0);
        match self.value_exponent(n) {
            None => CyclotomicElement::zero(l),
            Some(k) => CyclotomicElement::root(l, (k * (l / self.order)) as i64),
        }
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(&self.group.gen_orders)
            .map(|(&x, &n)| (n - x) % n)
            .collect();
        Self::from_exponents_unchecked(self.group.clone(), exps)
    }

    pub fn is_principal(&self) -> bool {
        self.exps.iter().all(|&x| x == 0)
    }

    pub fn is_even(&self) -> bool {
        self.value_exponent(-1) == Some(0)
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// Smallest `f | q` through which the character factors.
    pub fn conductor(&self) -> u64 {
        let q = self.group.q;
        let mut f = 1u64;
        let mut offset = 0;
        for c in &self.group.comps {
            let k = c.gens.len();
            let exps = &self.exps[offset..offset + k];
            offset += k;
            let mut best = c.pe;
            let mut d = c.pe;
            while d > 1 {
                let sub = d / c.p;
                let trivial = (0..c.pe / sub).all(|t| {
                    let n = (1 + t * sub) % c.pe;
                    match c.dlog[n as usize] {
                        None => true,
                        Some(dl) => component_value_trivial(exps, &c.gens, &dl),
                    }
                });
                if trivial {
                    best = sub;
                    d = sub;
                } else {
                    break;
                }
            }
            f *= best;
        }
        debug_assert!(q % f == 0);
        f
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.group.q
    }

    /// Product with a character of coprime modulus, living mod `q1·q2`.
    pub fn product_coprime(&self, other: &Self) -> Result<Self, CharacterError> {
        let (q1, q2) = (self.modulus(), other.modulus());
        if gcd(q1 as i64, q2 as i64) != 1 {
            return Err(CharacterError::BadIndex(format!("moduli {q1}, {q2} not coprime")));
        }
        let group = CharacterGroup::new(q1 * q2)?;
        let mut exps = Vec::new();
        let (mut o1, mut o2) = (0usize, 0usize);
        let (mut i1, mut i2) = (0usize, 0usize);
        for c in &group.comps {
            let k = c.gens.len();
            if i1 < self.group.comps.len() && self.group.comps[i1].p == c.p {
                exps.extend_from_slice(&self.exps[o1..o1 + k]);
                o1 += k;
                i1 += 1;
            } else {
                exps.extend_from_slice(&other.exps[o2..o2 + k]);
                o2 += k;
                i2 += 1;
            }
        }
        debug_assert_eq!(i1 + i2, group.comps.len());
        Ok(Self::from_exponents_unchecked(group, exps))
    }
}

fn component_value_trivial(exps: &[u64], gens: &[(u64, u64)], dl: &[u32; 2]) -> bool {
    let lam = gens.iter().fold(1i64, |a, g| lcm(a, g.1 as i64)) as u64;
    let mut acc = 0u64;
    for (i, (&x, &(_, ord))) in exps.iter().zip(gens).enumerate() {
        acc = (acc + (x * dl[i] as u64 % ord) * (lam / ord)) % lam;
    }
    acc == 0
}

/// `e(k/n)` with exact handling of the quarter turns.
pub fn root_of_unity(k: i64, n: u64) -> Complex64 {
    let k = rem(k, n as i64);
    let n = n as i64;
    if 4 * k % n == 0 {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (s, c) = (std::f64::consts::TAU * k as f64 / n as f64).sin_cos();
    Complex64::new(c, s)
}

/// Gauss sum `Σ_α χ(α) ζ_q^α` exactly, together with `ε_χ` in double precision.
#[derive(Debug, Clone)]
pub struct GaussSum {
    pub exact: CyclotomicElement,
    pub epsilon: Complex64,
}

pub fn gauss_sum(chi: &DirichletCharacter) -> GaussSum {
    let q = chi.modulus();
    let l = lcm(q as i64, chi.order() as i64) as u64;
    let exact = additive_twist_exact(chi, 1, l);
    let mut num = Complex64::new(0.0, 0.0);
    for a in 0..q as i64 {
        num += chi.value(a) * root_of_unity(a, q);
    }
    GaussSum {
        exact,
        epsilon: num / (q as f64).sqrt(),
    }
}

/// `Σ_{α mod q} χ(α) ζ_q^{α m}` in `Z[ζ_L]`.
pub fn additive_twist_exact(chi: &DirichletCharacter, m: i64, l: u64) -> CyclotomicElement {
    let q = chi.modulus();
    assert!(l % q == 0 && l % chi.order() == 0);
    let (sq, so) = ((l / q) as i64, (l / chi.order()) as i64);
    let mut acc = CycAccumulator::new(l);
    for a in 0..q as i64 {
        if let Some(k) = chi.value_exponent(a) {
            acc.add_root(k as i64 * so + rem(a * m, q as i64) * sq, 1)
                .expect("bounded coefficients");
        }
    }
    acc.finish()
}

/// Exact and numeric defect of `Σ_α χ(α)e_q(αm) = √q ε_χ χ̄(m)`.
#[derive(Debug, Clone)]
pub struct TwistCheck {
    pub exact: bool,
    pub residual: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
}

pub fn primitive_twist_relation(chi: &DirichletCharacter, m: i64) -> Result<TwistCheck, CharacterError> {
    if !chi.is_primitive() {
        return Err(CharacterError::NotPrimitive(chi.modulus()));
    }
    let q = chi.modulus();
    let l = lcm(q as i64, chi.order() as i64) as u64;
    let g = gauss_sum(chi);
    let lhs_exact = additive_twist_exact(chi, m, l);
    let rhs_exact = g.exact.mul(&chi.conj().value_exact(m, l)).expect("small order");
    let exact = lhs_exact.eq_exact(&rhs_exact).expect("small order");
    let mut lhs = Complex64::new(0.0, 0.0);
    for a in 0..q as i64 {
        lhs += chi.value(a) * root_of_unity(a * m, q);
    }
    let rhs = (q as f64).sqrt() * g.epsilon * chi.value(m).conj();
    Ok(TwistCheck {
        exact,
        residual: (lhs - rhs).norm(),
        lhs,
        rhs,
    })
}

/// Parses `"1,0"` style exponent vectors.
pub fn parse_character(q: u64, spec: &str) -> Result<DirichletCharacter, CharacterError> {
    let spec = spec.trim();
    let exps: Result<Vec<i64>, _> = if spec.is_empty() {
        Ok(vec![])
    } else {
        spec.split(',').map(|s| s.trim().parse::<i64>()).collect()
    };
    let exps = exps.map_err(|e| CharacterError::BadIndex(e.to_string()))?;
    DirichletCharacter::new(q, &exps)
}

/// First real non-principal primitive character mod `q`, if one exists.
pub fn quadratic_character(q: u64) -> Result<Option<DirichletCharacter>, CharacterError> {
    Ok(primitive_characters(q)?.into_iter().find(|c| c.order() == 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn group_sizes() {
        assert_eq!(character_group(1).unwrap().len(), 1);
        let g5 = character_group(5).unwrap();
        assert_eq!(g5.len(), 4);
        assert_eq!(g5.iter().filter(|c| c.order() == 2).count(), 1);
        let g8 = character_group(8).unwrap();
        assert_eq!(g8.len(), 4);
        assert!(g8.iter().all(|c| c.is_real()));
        for q in 1..=200u64 {
            let phi = factorize(q).unwrap().phi();
            let g = character_group(q).unwrap();
            assert_eq!(g.len() as u64, phi);
        }
        assert!(character_group(0).is_err());
        assert!(character_group(MAX_MODULUS + 1).is_err());
    }

    #[test]
    fn conductors() {
        assert_eq!(DirichletCharacter::principal(6).unwrap().conductor(), 1);
        let q5 = quadratic_character(5).unwrap().unwrap();
        assert!(q5.is_primitive());
        let chi3 = quadratic_character(3).unwrap().unwrap();
        let lift = character_group(9)
            .unwrap()
            .into_iter()
            .find(|c| (1..9).all(|n| c.value_exponent(n).map(|k| (k * 2 / c.order()) as i64) == chi3.value_exponent(n).map(|k| k as i64)))
            .unwrap();
        assert_eq!(lift.conductor(), 3);
        assert!(primitive_characters(2).unwrap().is_empty());
        assert_eq!(primitive_characters(1).unwrap().len(), 1);
    }

    /// Count of primitive characters is the Dirichlet convolution of φ with μ.
    #[test]
    fn primitive_counts() {
        for q in 1..=300u64 {
            let f = factorize(q).unwrap();
            let want: u64 = f
                .factors
                .iter()
                .map(|&(p, e)| match e {
                    1 => p - 2,
                    _ => (p - 1).pow(2) * p.pow(e - 2),
                })
                .product();
            assert_eq!(primitive_characters(q).unwrap().len() as u64, want, "q={q}");
        }
    }

    #[test]
    fn gauss_examples() {
        let q5 = quadratic_character(5).unwrap().unwrap();
        assert!((gauss_sum(&q5).epsilon - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let q3 = quadratic_character(3).unwrap().unwrap();
        assert!((gauss_sum(&q3).epsilon - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let one = DirichletCharacter::principal(1).unwrap();
        assert_eq!(gauss_sum(&one).epsilon, Complex64::new(1.0, 0.0));
        let embedded = gauss_sum(&q5).exact.embed() / 5f64.sqrt();
        assert!((embedded - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn twist_examples() {
        let q5 = quadratic_character(5).unwrap().unwrap();
        let t = primitive_twist_relation(&q5, 2).unwrap();
        assert!(t.exact && t.residual < 1e-12);
        let t = primitive_twist_relation(&q5, 10).unwrap();
        assert!(t.exact && t.lhs.norm() < 1e-12);
        let q3 = quadratic_character(3).unwrap().unwrap();
        assert!(primitive_twist_relation(&q3, 1).unwrap().residual < 1e-14);
        assert!(primitive_twist_relation(&DirichletCharacter::principal(6).unwrap(), 1).is_err());
    }

    #[test]
    fn orthogonality_exact() {
        for q in 1..=60u64 {
            let chars = character_group(q).unwrap();
            let phi = chars.len() as i64;
            for a in &chars {
                for b in &chars {
                    let l = lcm(a.order() as i64, b.order() as i64) as u64;
                    let mut acc = CycAccumulator::new(l);
                    let bc = b.conj();
                    for n in 0..q as i64 {
                        if let (Some(x), Some(y)) = (a.value_exponent(n), bc.value_exponent(n)) {
                            acc.add_root((x * (l / a.order()) + y * (l / b.order())) as i64, 1).unwrap();
                        }
                    }
                    let want = if a == b { phi } else { 0 };
                    let diff = acc.finish().sub(&CyclotomicElement::from_int(l, want)).unwrap();
                    assert!(diff.is_zero(), "q={q}");
                }
            }
        }
    }

    #[test]
    fn product_of_coprime_characters() {
        let a = quadratic_character(3).unwrap().unwrap();
        let b = primitive_characters(5).unwrap()[0].clone();
        let ab = a.product_coprime(&b).unwrap();
        for n in 0..15i64 {
            assert!((ab.value(n) - a.value(n) * b.value(n)).norm() < 1e-12);
        }
        assert!(ab.is_primitive());
    }

    #[test]
    fn generators_have_stated_orders() {
        for q in [8u64, 9, 12, 16, 20, 45, 64, 100] {
            let g = CharacterGroup::new(q).unwrap();
            for (x, &n) in g.generators().iter().zip(g.generator_orders()) {
                assert_eq!(pow_mod(*x, n, q), 1);
                for d in 1..n {
                    if n % d == 0 {
                        assert_ne!(pow_mod(*x, d, q), 1 % q);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn multiplicative(q in 1u64..400, i in 0usize..1000, m in -5000i64..5000, n in -5000i64..5000) {
            let chars = character_group(q).unwrap();
            let chi = &chars[i % chars.len()];
            let v = chi.value(m * n);
            prop_assert!((v - chi.value(m) * chi.value(n)).norm() < 1e-10);
            prop_assert_eq!(chi.value_exponent(m).is_none(), gcd(m, q as i64) != 1);
            if let Some(k) = chi.value_exponent(m) {
                prop_assert_eq!(Some(k), chi.value_exponent_direct(m));
            }
        }

        #[test]
        fn unit_modulus_gauss(q in 3u64..=500, i in 0usize..1000) {
            let prims = primitive_characters(q).unwrap();
            if !prims.is_empty() {
                let chi = &prims[i % prims.len()];
                prop_assert!((gauss_sum(chi).epsilon.norm() - 1.0).abs() < 1e-10);
            }
        }
    }
}
