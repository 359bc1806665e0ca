//! Exact arithmetic in `Z[ζ_L]`.
//!
//! Elements are stored on the redundant spanning set `ζ_L^j, 0 ≤ j < L`.
//! Equality is decided only when asked, either by a CRT tensor reduction onto
//! the basis `⊗_p {ζ_{p^e}^t : t < φ(p^e)}` or by division by `Φ_L`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::error::CyclotomicError;
use crate::residue::{factorize, lcm, mod_inverse, rem};

pub const DEFAULT_MAX_ORDER: u64 = 1_000_000;

#[derive(Clone, PartialEq, Eq)]
pub struct CyclotomicElement {
    order: u64,
    coeffs: Vec<i64>,
}

impl std::fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cyc[{}](", self.order)?;
        let mut first = true;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "{c}·ζ^{j}")?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

fn add_checked(a: i64, b: i64) -> Result<i64, CyclotomicError> {
    a.checked_add(b).ok_or(CyclotomicError::Overflow)
}

fn mul_checked(a: i64, b: i64) -> Result<i64, CyclotomicError> {
    a.checked_mul(b).ok_or(CyclotomicError::Overflow)
}

/// Common order of two orders, refusing anything beyond the bound.
pub fn common_order(a: u64, b: u64) -> Result<u64, CyclotomicError> {
    let l = lcm(a as i64, b as i64) as u64;
    if l > DEFAULT_MAX_ORDER {
        return Err(CyclotomicError::OrderTooLarge(l, DEFAULT_MAX_ORDER));
    }
    Ok(l)
}

impl CyclotomicElement {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1);
        Self {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn from_int(order: u64, n: i64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = n;
        z
    }

    pub fn one(order: u64) -> Self {
        Self::from_int(order, 1)
    }

    /// `ζ_L^j`.
    pub fn root(order: u64, j: i64) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[rem(j, order as i64) as usize] = 1;
        z
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        assert!(!coeffs.is_empty());
        Self {
            order: coeffs.len() as u64,
            coeffs,
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j, c))
    }

    /// Reinterpret in `Z[ζ_M]` for a multiple `M` of the order.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.order == 0, "lift target must be a multiple");
        if m == self.order {
            return self.clone();
        }
        let s = (m / self.order) as usize;
        let mut z = Self::zero(m);
        for (j, c) in self.terms() {
            z.coeffs[j * s] = c;
        }
        z
    }

    fn lifted_pair(&self, other: &Self) -> Result<(Self, Self), CyclotomicError> {
        let l = common_order(self.order, other.order)?;
        Ok((self.lift(l), other.lift(l)))
    }

    pub fn add(&self, other: &Self) -> Result<Self, CyclotomicError> {
        let (mut a, b) = self.lifted_pair(other)?;
        for (x, &y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = add_checked(*x, y)?;
        }
        Ok(a)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CyclotomicError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Result<Self, CyclotomicError> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            coeffs.push(mul_checked(c, k)?);
        }
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CyclotomicError> {
        let l = common_order(self.order, other.order)?;
        let sa = (l / self.order) as usize;
        let sb = (l / other.order) as usize;
        let lu = l as usize;
        let mut z = Self::zero(l);
        let tb: Vec<(usize, i64)> = other.terms().collect();
        for (i, ca) in self.terms() {
            for &(j, cb) in &tb {
                let k = (i * sa + j * sb) % lu;
                z.coeffs[k] = add_checked(z.coeffs[k], mul_checked(ca, cb)?)?;
            }
        }
        Ok(z)
    }

    /// Multiply by `ζ_L^j` in place of the current order.
    pub fn mul_root(&self, j: i64) -> Self {
        let l = self.order as i64;
        let mut z = Self::zero(self.order);
        for (i, c) in self.terms() {
            z.coeffs[rem(i as i64 + j, l) as usize] = c;
        }
        z
    }

    /// Complex conjugation `ζ^j ↦ ζ^{-j}`.
    pub fn conj(&self) -> Self {
        let l = self.order as usize;
        let mut z = Self::zero(self.order);
        for (j, c) in self.terms() {
            z.coeffs[(l - j) % l] = c;
        }
        z
    }

    /// Double-precision image under `ζ_L ↦ e^{2πi/L}`.
    pub fn embed(&self) -> Complex64 {
        let l = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.terms() {
            let (s, co) = (TAU * j as f64 / l).sin_cos();
            re += c as f64 * co;
            im += c as f64 * s;
        }
        Complex64::new(re, im)
    }

    /// Exact zero test by tensor reduction onto the CRT basis.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|&c| c == 0) {
            return true;
        }
        match tensor_reduce(self) {
            Ok(zero) => zero,
            Err(_) => self.is_zero_by_phi(),
        }
    }

    /// Exact zero test by reducing the coefficient polynomial modulo `Φ_L`.
    pub fn is_zero_by_phi(&self) -> bool {
        let phi = cyclotomic_polynomial(self.order);
        let d = phi.len() - 1;
        let mut r: Vec<BigInt> = self.coeffs.iter().map(|&c| BigInt::from(c)).collect();
        for top in (d..r.len()).rev() {
            if r[top].is_zero() {
                continue;
            }
            let t = r[top].clone();
            for (i, p) in phi.iter().enumerate() {
                if !p.is_zero() {
                    r[top - d + i] -= &t * p;
                }
            }
        }
        r.iter().take(d).all(|c| c.is_zero())
    }

    pub fn eq_exact(&self, other: &Self) -> Result<bool, CyclotomicError> {
        Ok(self.sub(other)?.is_zero())
    }
}

/// Accumulates integer multiples of roots of unity and shifted elements in one order.
#[derive(Clone, Debug)]
pub struct CycAccumulator {
    order: u64,
    coeffs: Vec<i64>,
}

impl CycAccumulator {
    pub fn new(order: u64) -> Self {
        Self {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    #[inline]
    pub fn add_root(&mut self, j: i64, mult: i64) -> Result<(), CyclotomicError> {
        let k = rem(j, self.order as i64) as usize;
        self.coeffs[k] = add_checked(self.coeffs[k], mult)?;
        Ok(())
    }

    /// Add `mult · x · ζ_L^shift`, where the order of `x` divides `L`.
    pub fn add_shifted(
        &mut self,
        x: &CyclotomicElement,
        shift: i64,
        mult: i64,
    ) -> Result<(), CyclotomicError> {
        assert!(self.order % x.order == 0);
        let s = (self.order / x.order) as i64;
        let l = self.order as i64;
        for (j, c) in x.terms() {
            let k = rem(j as i64 * s + shift, l) as usize;
            self.coeffs[k] = add_checked(self.coeffs[k], mul_checked(c, mult)?)?;
        }
        Ok(())
    }

    pub fn finish(self) -> CyclotomicElement {
        CyclotomicElement {
            order: self.order,
            coeffs: self.coeffs,
        }
    }
}

struct CrtLayout {
    /// `(p, p^e)` per prime factor, ascending.
    parts: Vec<(usize, usize)>,
    /// Multiplier sending `j` to its coordinate on each factor.
    weights: Vec<i64>,
    strides: Vec<usize>,
}

fn crt_layout(l: u64) -> Arc<CrtLayout> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CrtLayout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&l) {
        return v.clone();
    }
    let f = factorize(l).expect("order within factorization range");
    let mut parts = Vec::new();
    let mut weights = Vec::new();
    for &(p, e) in &f.factors {
        let pe = p.pow(e);
        let cof = (l / pe) as i64;
        weights.push(mod_inverse(cof, pe as i64).expect("coprime cofactor"));
        parts.push((p as usize, pe as usize));
    }
    let mut strides = vec![0; parts.len()];
    let mut s = 1;
    for i in (0..parts.len()).rev() {
        strides[i] = s;
        s *= parts[i].1;
    }
    let layout = Arc::new(CrtLayout {
        parts,
        weights,
        strides,
    });
    cache.lock().unwrap().insert(l, layout.clone());
    layout
}

thread_local! {
    static SCRATCH: RefCell<Vec<i64>> = const { RefCell::new(Vec::new()) };
}

/// Writes `x` in tensor coordinates, then eliminates every coordinate whose top
/// digit is `p − 1` via `Σ_{i<p} ζ_{p^e}^{t + i p^{e−1}} = 0`. What remains is a
/// basis expansion, so the element vanishes iff every entry does.
fn tensor_reduce(x: &CyclotomicElement) -> Result<bool, CyclotomicError> {
    let l = x.order;
    if l == 1 {
        return Ok(x.coeffs[0] == 0);
    }
    let lay = crt_layout(l);
    SCRATCH.with(|cell| {
        let mut buf = cell.borrow_mut();
        buf.clear();
        buf.resize(l as usize, 0);
        for (j, c) in x.terms() {
            let mut pos = 0usize;
            for (i, &(_, pe)) in lay.parts.iter().enumerate() {
                let t = ((j as i64 % pe as i64) * lay.weights[i]) % pe as i64;
                pos += t as usize * lay.strides[i];
            }
            buf[pos] = c;
        }
        for (i, &(p, pe)) in lay.parts.iter().enumerate() {
            let pe1 = pe / p;
            let stride = lay.strides[i];
            let outer = l as usize / (pe * stride);
            let top = (p - 1) * pe1;
            for o in 0..outer {
                let base_o = o * pe * stride;
                for t0 in 0..pe1 {
                    let src_t = top + t0;
                    for inner in 0..stride {
                        let src = base_o + src_t * stride + inner;
                        let v = buf[src];
                        if v == 0 {
                            continue;
                        }
                        buf[src] = 0;
                        for d in 0..(p - 1) {
                            let dst = base_o + (t0 + d * pe1) * stride + inner;
                            buf[dst] = buf[dst].checked_sub(v).ok_or(CyclotomicError::Overflow)?;
                        }
                    }
                }
            }
        }
        Ok(buf.iter().all(|&c| c == 0))
    })
}

/// Coefficients of `Φ_L` in increasing degree, memoized.
pub fn cyclotomic_polynomial(l: u64) -> Arc<Vec<BigInt>> {
    static MEMO: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = memo.lock().unwrap().get(&l) {
        return v.clone();
    }
    let mut num: Vec<BigInt> = vec![BigInt::zero(); l as usize + 1];
    num[0] = BigInt::from(-1);
    num[l as usize] = BigInt::from(1);
    let divs = factorize(l).expect("order in range").divisors();
    for d in divs.into_iter().filter(|&d| d < l) {
        let den = cyclotomic_polynomial(d);
        num = exact_div(&num, &den);
    }
    let out = Arc::new(num);
    memo.lock().unwrap().insert(l, out.clone());
    out
}

fn exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let nq = r.len() - dd;
    let mut quo = vec![BigInt::zero(); nq];
    for k in (0..nq).rev() {
        let c = r[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (i, d) in den.iter().enumerate() {
            r[k + i] -= &c * d;
        }
        quo[k] = c;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()));
    while quo.len() > 1 && quo.last().map(|c| c.is_zero()).unwrap_or(false) {
        quo.pop();
    }
    quo
}

/// Largest absolute coefficient, used for the embedding error bound.
pub fn max_abs_coeff(x: &CyclotomicElement) -> i64 {
    x.coeffs.iter().map(|c| c.abs()).max().unwrap_or(0)
}

pub fn embed_error_bound(x: &CyclotomicElement) -> f64 {
    x.order as f64 * max_abs_coeff(x) as f64 * 2f64.powi(-50)
}

#[allow(dead_code)]
fn phi_degree_check(l: u64) -> usize {
    cyclotomic_polynomial(l).len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(l: u64, v: &[(i64, i64)]) -> CyclotomicElement {
        let mut a = CycAccumulator::new(l);
        for &(j, m) in v {
            a.add_root(j, m).unwrap();
        }
        a.finish()
    }

    #[test]
    fn roots() {
        let i = CyclotomicElement::root(4, 1);
        assert!((i.embed() - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!(CyclotomicElement::root(3, 3)
            .eq_exact(&CyclotomicElement::one(3))
            .unwrap());
        assert!(CyclotomicElement::root(1, 5)
            .eq_exact(&CyclotomicElement::one(1))
            .unwrap());
    }

    #[test]
    fn arithmetic_examples() {
        let s = c(3, &[(0, 1), (1, 1), (2, 1)]);
        assert!(s.is_zero());
        let z8 = CyclotomicElement::root(8, 1);
        assert!(z8.mul(&z8).unwrap().eq_exact(&CyclotomicElement::root(4, 1)).unwrap());
        let a = c(5, &[(0, 1), (1, 1)]);
        let b = c(5, &[(0, 1), (4, 1)]);
        let want = c(5, &[(0, 2), (1, 1), (4, 1)]);
        assert!(a.mul(&b).unwrap().eq_exact(&want).unwrap());
    }

    #[test]
    fn conj_examples() {
        assert_eq!(CyclotomicElement::root(5, 1).conj(), CyclotomicElement::root(5, 4));
        let r = c(5, &[(0, 1), (1, 1), (4, 1)]);
        assert_eq!(r.conj(), r);
    }

    #[test]
    fn zero_examples() {
        assert!(c(6, &[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1)]).is_zero());
        assert!(c(4, &[(0, 1), (2, 1)]).is_zero());
        assert!(!c(5, &[(1, 1), (2, -1)]).is_zero());
        assert!(!c(5, &[(1, 1), (2, -1)]).is_zero_by_phi());
        assert!(CyclotomicElement::zero(7).embed() == Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phi_small() {
        let p12: Vec<i64> = cyclotomic_polynomial(12)
            .iter()
            .map(|c| i64::try_from(c.clone()).unwrap())
            .collect();
        assert_eq!(p12, vec![1, 0, -1, 0, 1]);
        assert_eq!(phi_degree_check(105), 48);
        let p105 = cyclotomic_polynomial(105);
        assert!(p105.iter().any(|c| c.abs() == BigInt::from(2)));
    }

    #[test]
    fn tensor_matches_phi_on_primitive_sums() {
        for l in 1..=60u64 {
            let mut a = CycAccumulator::new(l);
            for j in 0..l as i64 {
                if crate::residue::gcd(j, l as i64) == 1 {
                    a.add_root(j, 1).unwrap();
                }
            }
            let x = a.finish();
            let mu = moebius(l);
            let y = x.sub(&CyclotomicElement::from_int(l, mu)).unwrap();
            assert!(y.is_zero(), "Ramanujan sum at {l}");
            assert!(y.is_zero_by_phi());
        }
    }

    fn moebius(n: u64) -> i64 {
        let f = factorize(n).unwrap();
        if f.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn elem(l: u64) -> impl Strategy<Value = CyclotomicElement> {
        proptest::collection::vec(-100i64..=100, l as usize).prop_map(CyclotomicElement::from_coeffs)
    }

    fn elem_any() -> impl Strategy<Value = (CyclotomicElement, CyclotomicElement, CyclotomicElement)> {
        prop_oneof![Just(12u64), Just(30), Just(36), Just(45), Just(60), Just(72), Just(360), Just(7), Just(8)]
            .prop_flat_map(|l| (elem(l), elem(l), elem(l)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ring_axioms((x, y, z) in elem_any()) {
            let l = x.mul(&y).unwrap().mul(&z).unwrap();
            let r = x.mul(&y.mul(&z).unwrap()).unwrap();
            prop_assert!(l.eq_exact(&r).unwrap());
            let l = x.mul(&y.add(&z).unwrap()).unwrap();
            let r = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
            prop_assert!(l.eq_exact(&r).unwrap());
            prop_assert!(x.sub(&x).unwrap().is_zero());
            prop_assert_eq!(x.conj().conj(), x.clone());
        }

        #[test]
        fn embedding_homomorphism((x, y, _z) in elem_any()) {
            let p = x.mul(&y).unwrap().embed();
            let q = x.embed() * y.embed();
            prop_assert!((p - q).norm() <= 1e-10 * (1.0 + q.norm()));
        }

        #[test]
        fn zero_tests_agree(v in proptest::collection::vec(-3i64..=3, 1..=90)) {
            let x = CyclotomicElement::from_coeffs(v);
            prop_assert_eq!(x.is_zero(), x.is_zero_by_phi());
        }

        #[test]
        fn zero_tests_agree_on_zero_sums(l in 1u64..120, shifts in proptest::collection::vec(0i64..200, 1..6)) {
            let mut a = CycAccumulator::new(l);
            let f = factorize(l).unwrap();
            for &s in &shifts {
                for &(p, _) in &f.factors {
                    let step = (l / p) as i64;
                    for i in 0..p as i64 {
                        a.add_root(s + i * step, 1).unwrap();
                    }
                }
            }
            let x = a.finish();
            prop_assert!(x.is_zero());
            prop_assert!(x.is_zero_by_phi());
            let y = x.add(&CyclotomicElement::root(l, shifts[0])).unwrap();
            prop_assert!(!y.is_zero());
            prop_assert!(!y.is_zero_by_phi());
        }
    }
}
