//! Modular arithmetic primitives: inverses, factorization, valuations and
//! the split of an integer into a part supported on the primes of `q` and a
//! part coprime to `q`.

use crate::error::ResidueError;

pub const FACTORIZE_BOUND: u64 = 1_000_000_000_000;

/// Greatest common divisor on signed inputs, always non-negative.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// Least non-negative residue of `a` mod `m`.
#[inline]
pub fn rem(a: i64, m: i64) -> i64 {
    let r = a % m;
    if r < 0 {
        r + m
    } else {
        r
    }
}

/// Least non-negative residue of `a·b` mod `m` without overflow.
#[inline]
pub fn mul_mod(a: i64, b: i64, m: i64) -> i64 {
    rem(((a as i128 * b as i128) % m as i128) as i64, m)
}

/// Inverse of `a` mod `m`; residues mod 1 collapse to 0.
pub fn mod_inverse(a: i64, m: i64) -> Result<i64, ResidueError> {
    if m < 1 {
        return Err(ResidueError::InvalidModulus(m));
    }
    if m == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (m as i128, rem(a, m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
    }
    if r0 != 1 {
        return Err(ResidueError::NotInvertible { a, m });
    }
    Ok(rem((s0 % m as i128) as i64, m))
}

/// Prime factorization of `n` as increasing `(p, e)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn recompose(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// Euler's totient.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Trial division with a 2,3,5 wheel.
pub fn factorize(n: u64) -> Result<Factorization, ResidueError> {
    if n == 0 || n > FACTORIZE_BOUND {
        return Err(ResidueError::OutOfRange(n));
    }
    let mut m = n;
    let mut factors = Vec::new();
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    }
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut i = 0;
    while d * d <= m {
        let mut e = 0;
        while m % d == 0 {
            m /= d;
            e += 1;
        }
        if e > 0 {
            factors.push((d, e));
        }
        d += STEPS[i];
        i = (i + 1) % 8;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { n, factors })
}

/// Exponent of the prime `p` in `n` (n ≠ 0).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// `c = c0 · c_prime` with every prime of `c0` dividing `q` and `gcd(c_prime, q) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QSplit {
    pub c0: u64,
    pub c_prime: u64,
}

pub fn q_part(c: u64, q: u64) -> QSplit {
    let mut c0 = 1;
    let mut rest = c;
    loop {
        let g = gcd_u(rest, q);
        if g == 1 {
            break;
        }
        rest /= g;
        c0 *= g;
    }
    QSplit { c0, c_prime: rest }
}

/// True when every prime factor of `n` divides `r`, i.e. `n | r^∞`.
pub fn divides_power_of(n: u64, r: u64) -> bool {
    q_part(n, r).c_prime == 1
}

pub fn gcd_u(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Numbers in `1..=limit` all of whose primes divide `r`, ascending.
pub fn smooth_over(r: u64, limit: u64) -> Vec<u64> {
    if r == 1 {
        return vec![1];
    }
    let primes: Vec<u64> = match factorize(r) {
        Ok(f) => f.primes().collect(),
        Err(_) => return vec![],
    };
    let mut out = vec![1u64];
    for p in primes {
        let len = out.len();
        for i in 0..len {
            let mut x = out[i] * p;
            while x <= limit {
                out.push(x);
                x *= p;
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).map(|f| f.factors == [(n, 1)]).unwrap_or(false)
}

/// Number of positive divisors.
pub fn num_divisors(n: u64) -> u64 {
    factorize(n)
        .map(|f| f.factors.iter().map(|&(_, e)| e as u64 + 1).product())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(1, 9).unwrap(), 1);
        assert_eq!(mod_inverse(5, 1).unwrap(), 0);
        assert_eq!(mod_inverse(-3, 7).unwrap(), 2);
        assert!(matches!(
            mod_inverse(4, 6),
            Err(ResidueError::NotInvertible { .. })
        ));
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(factorize(97).unwrap().factors, vec![(97, 1)]);
        assert!(factorize(0).is_err());
        assert!(factorize(FACTORIZE_BOUND + 1).is_err());
        assert_eq!(
            factorize(999_999_000_001).unwrap().recompose(),
            999_999_000_001
        );
    }

    #[test]
    fn factorize_round_trip_exhaustive() {
        for n in 1..=100_000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.recompose(), n);
            assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.factors.iter().all(|&(p, e)| e >= 1 && is_prime_naive(p)));
        }
    }

    fn is_prime_naive(p: u64) -> bool {
        p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
    }

    #[test]
    fn q_part_examples() {
        assert_eq!(q_part(12, 6), QSplit { c0: 12, c_prime: 1 });
        assert_eq!(q_part(5, 6), QSplit { c0: 1, c_prime: 5 });
        assert_eq!(q_part(1, 9), QSplit { c0: 1, c_prime: 1 });
        assert_eq!(q_part(360, 10), QSplit { c0: 40, c_prime: 9 });
    }

    #[test]
    fn smooth_lists() {
        assert_eq!(smooth_over(6, 20), vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18]);
        assert_eq!(smooth_over(1, 50), vec![1]);
    }

    proptest! {
        #[test]
        fn inverse_property(a in -10_000i64..10_000, m in 1i64..5_000) {
            if gcd(a, m) == 1 {
                let x = mod_inverse(a, m).unwrap();
                prop_assert!(x >= 0 && x < m);
                prop_assert_eq!(rem(a * x, m), rem(1, m));
            }
        }

        #[test]
        fn q_part_multiplicative(c1 in 1u64..2000, c2 in 1u64..2000, q in 1u64..200) {
            if gcd_u(c1, c2) == 1 {
                let (a, b, ab) = (q_part(c1, q), q_part(c2, q), q_part(c1 * c2, q));
                prop_assert_eq!(ab.c0, a.c0 * b.c0);
                prop_assert_eq!(ab.c_prime, a.c_prime * b.c_prime);
            }
        }

        #[test]
        fn q_part_invariants(c in 1u64..100_000, q in 1u64..500) {
            let s = q_part(c, q);
            prop_assert_eq!(s.c0 * s.c_prime, c);
            prop_assert_eq!(gcd_u(s.c_prime, q), 1);
            prop_assert!(divides_power_of(s.c0, q));
        }
    }
}
