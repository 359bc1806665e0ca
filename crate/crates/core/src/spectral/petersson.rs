//! Geometric side of the Petersson formula,
//! `G_k(ℓ, n) = δ(n=ℓ) + 2π i^{−k} Σ_c S(n, ℓ; c)/c · J_{k−1}(4π√(nℓ)/c)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::SpectralError;
use crate::expsums::kloosterman_f64;
use crate::residue::{gcd, mod_inverse};
use crate::special::{bessel_j_real, WeightK};

pub const MAX_TRUNCATION: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeterssonValue {
    pub k: u32,
    pub l: u64,
    pub n: u64,
    pub value: f64,
    pub truncation_c: u64,
    pub tail_bound: f64,
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Bound on the dropped `c > C` part of the sum including the `2π` prefactor, from
/// `|S(n,ℓ;c)| ≤ c` and `|J_ν(y)| ≤ (y/2)^ν/ν!`.
pub fn tail_bound(k: WeightK, l: u64, n: u64, c: u64) -> f64 {
    let nu = k.order();
    let y = 2.0 * PI * ((n as f64) * (l as f64)).sqrt();
    let ln = (2.0 * PI).ln() + nu as f64 * y.ln()
        - ln_factorial(nu)
        - ((nu - 1) as f64).ln()
        - (nu - 1) as f64 * (c as f64).ln();
    ln.exp()
}

/// Smallest `C` whose tail bound is below `tol`.
pub fn truncation_for(k: WeightK, l: u64, n: u64, tol: f64) -> Result<u64, SpectralError> {
    if !(tol > 0.0) {
        return Err(SpectralError::InvalidParams(format!("tolerance {tol}")));
    }
    let m = (k.order() - 1) as f64;
    let at_one = tail_bound(k, l, n, 1);
    let guess = ((at_one / tol).ln() / m).exp();
    if !guess.is_finite() || guess > MAX_TRUNCATION as f64 {
        return Err(SpectralError::ToleranceNotMet(format!(
            "Petersson sum for (ℓ={l}, n={n}) needs more than {MAX_TRUNCATION} moduli at tol {tol:e}"
        )));
    }
    let mut c = (guess.floor() as u64).max(1);
    while c > 1 && tail_bound(k, l, n, c - 1) < tol {
        c -= 1;
    }
    while tail_bound(k, l, n, c) >= tol {
        c += 1;
    }
    Ok(c)
}

pub fn petersson_geometric(k: WeightK, l: u64, n: u64, tol: f64) -> Result<PeterssonValue, SpectralError> {
    if l == 0 || n == 0 {
        return Err(SpectralError::InvalidParams("ℓ and n must be positive".into()));
    }
    let c_max = truncation_for(k, l, n, tol)?;
    let y = 4.0 * PI * ((n as f64) * (l as f64)).sqrt();
    let mut s = 0.0;
    for c in 1..=c_max {
        s += kloosterman_f64(n as i64, l as i64, c) / c as f64 * bessel_j_real(k, y / c as f64);
    }
    let diag = if n == l { 1.0 } else { 0.0 };
    Ok(PeterssonValue {
        k: k.k(),
        l,
        n,
        value: diag + 2.0 * PI * k.i_pow_k() * s,
        truncation_c: c_max,
        tail_bound: tail_bound(k, l, n, c_max),
    })
}

/// `|G(m,n)G(1,1) − G(m,1)G(n,1)|`, which vanishes when the cusp space is one-dimensional.
pub fn petersson_dim1_factorization(k: WeightK, m: u64, n: u64, tol: f64) -> Result<f64, SpectralError> {
    let g = |a, b| petersson_geometric(k, a, b, tol).map(|v| v.value);
    Ok((g(m, n)? * g(1, 1)? - g(m, 1)? * g(n, 1)?).abs())
}

/// `S(r, ℓ; c)` for every residue `r mod c`.
pub fn kloosterman_row(l: u64, c: u64, planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let ci = c as i64;
    if c == 1 {
        return vec![1.0];
    }
    let li = (l % c) as i64;
    if c <= 48 {
        return (0..ci).map(|r| kloosterman_f64(r, li, c)).collect();
    }
    let mut buf: Vec<Complex64> = (0..ci)
        .map(|x| {
            if gcd(x, ci) == 1 {
                let t = (li * mod_inverse(x, ci).expect("unit")) % ci;
                Complex64::from_polar(1.0, 2.0 * PI * t as f64 / c as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    planner.plan_fft_inverse(c as usize).process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// `G_k(ℓ, n)` for `1 ≤ n ≤ N`, each with its own truncation, extended in place as
/// tighter tolerances or larger `N` are requested.
#[derive(Debug, Clone)]
pub struct PeterssonTable {
    k: WeightK,
    l: u64,
    raw: Vec<f64>,
    done: Vec<u64>,
}

impl PeterssonTable {
    pub fn new(k: WeightK, l: u64) -> Self {
        Self {
            k,
            l,
            raw: vec![0.0],
            done: vec![0],
        }
    }

    pub fn len(&self) -> usize {
        self.raw.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Makes every `n ≤ n_max` accurate to `tol(n)`.
    pub fn ensure(&mut self, n_max: usize, tol: impl Fn(usize) -> f64) -> Result<(), SpectralError> {
        if self.raw.len() <= n_max {
            self.raw.resize(n_max + 1, 0.0);
            self.done.resize(n_max + 1, 0);
        }
        let mut target = vec![0u64; n_max + 1];
        let mut starts: HashMap<u64, Vec<usize>> = HashMap::new();
        let mut c_top = 0;
        for n in 1..=n_max {
            let c = truncation_for(self.k, self.l, n as u64, tol(n))?;
            if c > self.done[n] {
                target[n] = c;
                starts.entry(self.done[n] + 1).or_default().push(n);
                c_top = c_top.max(c);
            }
        }
        let mut planner = FftPlanner::new();
        let mut active: Vec<usize> = Vec::new();
        let lf = self.l as f64;
        for c in 1..=c_top {
            if let Some(mut v) = starts.remove(&c) {
                active.append(&mut v);
            }
            active.retain(|&n| target[n] >= c);
            if active.is_empty() {
                continue;
            }
            let row = kloosterman_row(self.l, c, &mut planner);
            let cf = c as f64;
            let k = self.k;
            let add = |&n: &usize| row[n % c as usize] / cf * bessel_j_real(k, 4.0 * PI * (n as f64 * lf).sqrt() / cf);
            let terms: Vec<f64> = if active.len() > 4096 {
                crate::exec::par_map(&active, add)
            } else {
                active.iter().map(add).collect()
            };
            for (&n, t) in active.iter().zip(terms) {
                self.raw[n] += t;
            }
        }
        for n in 1..=n_max {
            if target[n] > 0 {
                self.done[n] = target[n];
            }
        }
        Ok(())
    }

    pub fn value(&self, n: usize) -> f64 {
        let diag = if n as u64 == self.l { 1.0 } else { 0.0 };
        diag + 2.0 * PI * self.k.i_pow_k() * self.raw[n]
    }

    pub fn truncation(&self, n: usize) -> u64 {
        self.done[n]
    }

    pub fn tail_bound(&self, n: usize) -> f64 {
        tail_bound(self.k, self.l, n as u64, self.done[n])
    }

    pub fn get(&self, n: usize) -> PeterssonValue {
        PeterssonValue {
            k: self.k.k(),
            l: self.l,
            n: n as u64,
            value: self.value(n),
            truncation_c: self.done[n],
            tail_bound: self.tail_bound(n),
        }
    }
}

type Shared = Arc<Mutex<PeterssonTable>>;

/// Process-wide table for `(k, ℓ)`, shared by all checks.
pub fn shared_table(k: WeightK, l: u64) -> Shared {
    static TABLES: OnceLock<Mutex<HashMap<(u32, u64), Shared>>> = OnceLock::new();
    let t = TABLES.get_or_init(Default::default);
    t.lock()
        .expect("table registry poisoned")
        .entry((k.k(), l))
        .or_insert_with(|| Arc::new(Mutex::new(PeterssonTable::new(k, l))))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::{cusp_basis, delta::delta_lambda};

    fn w(k: u32) -> WeightK {
        WeightK::new(k).unwrap()
    }

    #[test]
    fn weight_14_vanishes() {
        assert!(cusp_basis(14, 10).unwrap().is_empty());
        for l in 1..=3 {
            for n in 1..=3 {
                let v = petersson_geometric(w(14), l, n, 1e-9).unwrap();
                assert!(v.value.abs() < 1e-8, "{l} {n} {}", v.value);
                assert!(v.tail_bound < 1e-9);
            }
        }
    }

    #[test]
    fn delta_eigenvalue_ratios() {
        let lam = delta_lambda(30).unwrap();
        let g11 = petersson_geometric(w(12), 1, 1, 1e-10).unwrap().value;
        assert!(g11 > 0.0);
        for n in 1..=20u64 {
            let g = petersson_geometric(w(12), n, 1, 1e-10).unwrap().value;
            assert!((g / g11 - lam[n as usize]).abs() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn tail_bound_at_large_weight() {
        assert!(tail_bound(w(26), 1, 1, 50) < 1e-12);
        let c = truncation_for(w(12), 3, 7, 1e-9).unwrap();
        assert!(tail_bound(w(12), 3, 7, c) < 1e-9 && tail_bound(w(12), 3, 7, c - 1) >= 1e-9);
    }

    #[test]
    fn diagonal_stable_under_doubling() {
        let v = petersson_geometric(w(12), 1, 1, 1e-10).unwrap();
        let mut s = 0.0;
        for c in 1..=2 * v.truncation_c {
            s += kloosterman_f64(1, 1, c) / c as f64 * bessel_j_real(w(12), 4.0 * PI / c as f64);
        }
        assert!((1.0 + 2.0 * PI * s - v.value).abs() < 1e-10);
    }

    #[test]
    fn rank_one_and_positive_control() {
        for k in [12, 16, 18, 20, 22, 26] {
            for (m, n) in [(2, 3), (5, 7), (12, 11), (4, 4)] {
                assert!(petersson_dim1_factorization(w(k), m, n, 1e-10).unwrap() < 1e-8, "k={k}");
            }
            assert_eq!(petersson_dim1_factorization(w(k), 1, 1, 1e-10).unwrap(), 0.0);
        }
        let r = (2..=4).map(|m| petersson_dim1_factorization(w(24), m, m + 1, 1e-10).unwrap());
        assert!(r.fold(0.0, f64::max) > 1e-3);
    }

    #[test]
    fn fft_rows_match_direct() {
        let mut p = FftPlanner::new();
        for c in [49u64, 60, 97, 128, 210] {
            let row = kloosterman_row(5, c, &mut p);
            for r in [0u64, 1, 7, 48] {
                assert!((row[r as usize] - kloosterman_f64(r as i64, 5, c)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn table_matches_single_values() {
        let mut t = PeterssonTable::new(w(12), 2);
        t.ensure(40, |_| 1e-6).unwrap();
        t.ensure(60, |n| if n % 2 == 0 { 1e-11 } else { 1e-6 }).unwrap();
        for n in [1usize, 2, 9, 30, 44, 59, 60] {
            let want = petersson_geometric(w(12), 2, n as u64, 1e-11).unwrap().value;
            assert!((t.value(n) - want).abs() < 2e-6, "n={n}");
            if n % 2 == 0 {
                assert!((t.value(n) - want).abs() < 1e-10, "n={n}");
            }
        }
    }
}
