//! Truncated q-expansions with exact rational coefficients.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ModformError;

pub const MAX_PRECISION: usize = 10_000;

/// `Σ_{n ≤ N} a(n) qⁿ` of weight `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    weight: u32,
    coeffs: Vec<BigRational>,
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a q-expansion needs a(0)");
        Self { weight, coeffs }
    }

    pub fn from_integers(weight: u32, coeffs: impl IntoIterator<Item = BigInt>) -> Self {
        Self::new(weight, coeffs.into_iter().map(BigRational::from_integer).collect())
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Largest `n` with a known coefficient.
    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_cusp(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.weight, self.coeffs[..=n.min(self.precision())].to_vec())
    }

    fn check_weight(&self, o: &Self) {
        assert_eq!(self.weight, o.weight, "adding forms of different weights");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_weight(o);
        let n = self.precision().min(o.precision());
        Self::new(self.weight, (0..=n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check_weight(o);
        let n = self.precision().min(o.precision());
        Self::new(self.weight, (0..=n).map(|i| &self.coeffs[i] - &o.coeffs[i]).collect())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.weight, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Numerators over a common denominator.
    fn integer_parts(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (nums, den)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.precision().min(o.precision());
        let (a, da) = self.integer_parts();
        let (b, db) = o.integer_parts();
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, ai) in a.iter().enumerate().take(n + 1) {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
                if !bj.is_zero() {
                    out[i + j] += ai * bj;
                }
            }
        }
        let den = da * db;
        Self::new(
            self.weight + o.weight,
            out.into_iter().map(|x| BigRational::new(x, den.clone())).collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::new(0, {
            let mut v = vec![BigRational::zero(); self.precision() + 1];
            v[0] = BigRational::one();
            v
        });
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }
}

/// `σ_s(n)` for `n ≤ N` by a divisor sieve.
pub fn divisor_sigma_table(s: u32, n: usize) -> Vec<BigInt> {
    let mut t = vec![BigInt::zero(); n + 1];
    for d in 1..=n {
        let p = BigInt::from(d).pow(s);
        let mut m = d;
        while m <= n {
            t[m] += &p;
            m += d;
        }
    }
    t
}

fn check_precision(n: usize) -> Result<(), ModformError> {
    if n == 0 || n > MAX_PRECISION {
        return Err(ModformError::OutOfRange(format!("precision {n} outside 1..={MAX_PRECISION}")));
    }
    Ok(())
}

pub fn eisenstein(k: u32, n: usize) -> Result<QExpansion, ModformError> {
    check_precision(n)?;
    let (c, s) = match k {
        4 => (240i64, 3u32),
        6 => (-504, 5),
        _ => return Err(ModformError::OutOfRange(format!("Eisenstein series of weight {k}"))),
    };
    let sig = divisor_sigma_table(s, n);
    let mut coeffs = vec![rat(1)];
    coeffs.extend(sig.into_iter().skip(1).map(|x| rat(x * c)));
    Ok(QExpansion::new(k, coeffs))
}

#[derive(Debug, Clone)]
pub struct Generators {
    pub e4: QExpansion,
    pub e6: QExpansion,
    pub delta: QExpansion,
}

/// `E4`, `E6` and `Δ = (E4³ − E6²)/1728` to precision `N`, memoized.
pub fn eisenstein_and_delta(n: usize) -> Result<Arc<Generators>, ModformError> {
    check_precision(n)?;
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Generators>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().expect("generator cache poisoned").get(&n) {
        return Ok(g.clone());
    }
    let e4 = eisenstein(4, n)?;
    let e6 = eisenstein(6, n)?;
    let delta = e4
        .pow(3)
        .sub(&e6.pow(2))
        .scale(&BigRational::new(BigInt::one(), BigInt::from(1728)));
    let g = Arc::new(Generators { e4, e6, delta });
    cache.lock().expect("generator cache poisoned").insert(n, g.clone());
    Ok(g)
}

/// Exponents `(j, a, b)` of the basis `Δ^j E4^a E6^b` of `S_k`, one per `j ≥ 1`.
pub fn cusp_monomials(k: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    let mut j = 1;
    while 12 * j <= k {
        let m = k - 12 * j;
        if m != 2 {
            let b = if m % 4 == 0 { 0 } else { 1 };
            out.push((j, (m - 6 * b) / 4, b));
        }
        j += 1;
    }
    out
}

pub fn cusp_basis(k: u32, n: usize) -> Result<Vec<QExpansion>, ModformError> {
    if !(12..=26).contains(&k) || k % 2 == 1 {
        return Err(ModformError::OutOfRange(format!("cusp basis for weight {k}")));
    }
    let g = eisenstein_and_delta(n)?;
    Ok(cusp_monomials(k)
        .into_iter()
        .map(|(j, a, b)| g.delta.pow(j).mul(&g.e4.pow(a)).mul(&g.e6.pow(b)))
        .collect())
}

/// `(T_m f)(n) = Σ_{d | (m,n)} d^{k−1} a(mn/d²)` for `n ≤ ⌊N/m⌋`.
pub fn hecke_apply(m: u64, f: &QExpansion) -> Result<QExpansion, ModformError> {
    if m == 0 {
        return Err(ModformError::OutOfRange("T_0".into()));
    }
    let n_out = f.precision() / m as usize;
    if n_out == 0 {
        return Err(ModformError::PrecisionExhausted {
            need: m as usize,
            have: f.precision(),
        });
    }
    let km1 = f.weight().saturating_sub(1);
    let mut out = Vec::with_capacity(n_out + 1);
    for n in 0..=n_out as u64 {
        let g = m.gcd(&n);
        let mut s = BigRational::zero();
        for d in (1..=g).filter(|d| g % d == 0) {
            let idx = (m * n / (d * d)) as usize;
            s += f.coeff(idx) * rat(BigInt::from(d).pow(km1));
        }
        out.push(s);
    }
    Ok(QExpansion::new(f.weight(), out))
}

/// Integer coefficients, when every coefficient is integral.
pub fn as_integers(f: &QExpansion) -> Option<Vec<BigInt>> {
    f.coeffs().iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
}

pub fn max_abs(f: &QExpansion) -> BigRational {
    f.coeffs().iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product_oracle(n: usize) -> Vec<BigInt> {
        // q ∏ (1 − qⁿ)^24 by repeated multiplication by (1 − q^m)
        let mut p = vec![BigInt::zero(); n + 1];
        p[0] = BigInt::one();
        for m in 1..=n {
            for _ in 0..24 {
                for i in (m..=n).rev() {
                    let t = p[i - m].clone();
                    p[i] -= t;
                }
            }
        }
        let mut out = vec![BigInt::zero(); n + 1];
        out[1..].clone_from_slice(&p[..n]);
        out
    }

    #[test]
    fn delta_expansion() {
        let g = eisenstein_and_delta(100).unwrap();
        let d = as_integers(&g.delta).unwrap();
        assert_eq!(d[0], BigInt::zero());
        assert_eq!(d[1], BigInt::one());
        assert_eq!(d[2], BigInt::from(-24));
        assert_eq!(d, product_oracle(100));
    }

    #[test]
    fn bases() {
        assert_eq!(cusp_basis(12, 20).unwrap().len(), 1);
        assert!(cusp_basis(14, 20).unwrap().is_empty());
        assert_eq!(cusp_basis(24, 20).unwrap().len(), 2);
        for k in (12..=26).step_by(2) {
            let b = cusp_basis(k, 30).unwrap();
            let distinct_j = (1..=k / 12).filter(|j| (0..=k / 4).any(|a| (0..=k / 6).any(|b| 12 * j + 4 * a + 6 * b == k))).count();
            assert_eq!(b.len(), distinct_j, "k={k}");
            assert!(b.iter().all(|f| f.is_cusp() && f.weight() == k));
        }
        assert!(cusp_basis(28, 10).is_err());
    }

    #[test]
    fn hecke_on_delta() {
        let d = eisenstein_and_delta(200).unwrap().delta.clone();
        assert_eq!(hecke_apply(1, &d).unwrap(), d);
        let t2 = hecke_apply(2, &d).unwrap();
        assert_eq!(t2, d.truncate(100).scale(&rat(-24)));
        let t6 = hecke_apply(6, &d).unwrap();
        let t23 = hecke_apply(2, &hecke_apply(3, &d).unwrap()).unwrap();
        assert_eq!(t6, t23.truncate(t6.precision()));
        assert!(matches!(hecke_apply(300, &d), Err(ModformError::PrecisionExhausted { .. })));
    }

    #[test]
    fn mul_truncates_and_adds_weight() {
        let g = eisenstein_and_delta(10).unwrap();
        let p = g.e4.truncate(5).mul(&g.e6);
        assert_eq!(p.precision(), 5);
        assert_eq!(p.weight(), 10);
        let e10 = eisenstein(4, 10).unwrap().mul(&eisenstein(6, 10).unwrap());
        assert_eq!(e10.coeff(1), &rat(-264));
    }
}
