//! Ramanujan's `τ(n)` to large `n` through `Δ = q (η³/q^{1/8})⁸`, with
//! `η³/q^{1/8} = Σ_m (−1)^m (2m+1) q^{m(m+1)/2}`.

use std::sync::{Arc, Mutex, OnceLock};

use crate::error::ModformError;

pub const MAX_TAU_INDEX: usize = 1_000_000;

fn eta_cubed(n: usize) -> Vec<(usize, i128)> {
    let mut out = Vec::new();
    let mut m = 0usize;
    while m * (m + 1) / 2 <= n {
        let s = if m % 2 == 0 { 1 } else { -1 };
        out.push((m * (m + 1) / 2, s * (2 * m as i128 + 1)));
        m += 1;
    }
    out
}

fn mul_sparse(dense: &[i128], sparse: &[(usize, i128)]) -> Result<Vec<i128>, ModformError> {
    let n = dense.len();
    let mut out = vec![0i128; n];
    for &(e, c) in sparse {
        for i in 0..n - e.min(n) {
            let t = dense[i].checked_mul(c).ok_or(ModformError::PrecisionExhausted { need: i + e, have: n })?;
            out[i + e] = out[i + e]
                .checked_add(t)
                .ok_or(ModformError::PrecisionExhausted { need: i + e, have: n })?;
        }
    }
    Ok(out)
}

/// `τ(0..=n)` with `τ(0) = 0`.
pub fn tau_table(n: usize) -> Result<Arc<Vec<i128>>, ModformError> {
    if n > MAX_TAU_INDEX {
        return Err(ModformError::OutOfRange(format!("τ(n) requested to n = {n}")));
    }
    static CACHE: OnceLock<Mutex<Option<Arc<Vec<i128>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("tau cache poisoned").as_ref() {
        if t.len() > n {
            return Ok(t.clone());
        }
    }
    let len = n.max(1);
    let e = eta_cubed(len);
    let mut p = vec![0i128; len];
    p[0] = 1;
    for _ in 0..8 {
        p = mul_sparse(&p, &e)?;
    }
    let mut t = vec![0i128; len + 1];
    t[1..].copy_from_slice(&p);
    let t = Arc::new(t);
    *cache.lock().expect("tau cache poisoned") = Some(t.clone());
    Ok(t)
}

/// `λ_Δ(n) = τ(n)/n^{11/2}` for `n ≤ N`, with `λ(0) = 0`.
pub fn delta_lambda(n: usize) -> Result<Arc<Vec<f64>>, ModformError> {
    static CACHE: OnceLock<Mutex<Option<Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("lambda cache poisoned").as_ref() {
        if t.len() > n {
            return Ok(t.clone());
        }
    }
    let tau = tau_table(n)?;
    let l: Vec<f64> = tau
        .iter()
        .enumerate()
        .map(|(i, &t)| if i == 0 { 0.0 } else { t as f64 / (i as f64).powf(5.5) })
        .collect();
    let l = Arc::new(l);
    *cache.lock().expect("lambda cache poisoned") = Some(l.clone());
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::super::qexp::{as_integers, eisenstein_and_delta};
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn agrees_with_eisenstein_construction() {
        let t = tau_table(600).unwrap();
        let d = as_integers(&eisenstein_and_delta(600).unwrap().delta).unwrap();
        for n in 0..=600 {
            assert_eq!(BigInt::from(t[n]), d[n], "n={n}");
        }
        assert_eq!(t[2], -24);
        assert_eq!(t[3], 252);
        assert_eq!(t[11], 534612);
    }

    #[test]
    fn multiplicative_and_hecke() {
        let t = tau_table(5000).unwrap();
        for (m, n) in [(2usize, 3usize), (7, 11), (13, 97), (4, 1225)] {
            assert_eq!(t[m] * t[n], t[m * n]);
        }
        for p in [2usize, 3, 5, 7, 31, 67] {
            let p11 = (p as i128).pow(11);
            assert_eq!(t[p * p], t[p] * t[p] - p11);
        }
    }

    #[test]
    fn lambda_values_respect_divisor_bound() {
        let l = delta_lambda(2000).unwrap();
        assert!((l[2] + 24.0 / 2f64.powf(5.5)).abs() < 1e-15);
        for n in 1..=2000usize {
            assert!(l[n].abs() <= crate::residue::num_divisors(n as u64) as f64 + 1e-12);
        }
    }
}
