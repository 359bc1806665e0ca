//! Bessel functions `J_n` of integer order.
//!
//! Real arguments: power series for small `|x|`, Miller backward recurrence
//! for moderate `|x|`, and Hankel's asymptotic expansion for `J_0, J_1`
//! followed by upward recurrence once `|x|` exceeds both 25 and the order.
//! Complex arguments: the power series carried in double-double while the
//! expected cancellation stays inside its headroom, otherwise a backward
//! recurrence normalized by `Σ_k t^k J_k(z) = e^{z(t − 1/t)/2}` at `t = ±i`.

use num_complex::Complex64;

use super::dd::DdComplex;
use crate::error::SpecialError;

pub const MAX_ABS_ARG: f64 = 1.0e4;
pub const MAX_COMPLEX_ARG: f64 = 120.0;

/// Even weight `k ≥ 6`; Bessel order `k − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightK(u32);

impl WeightK {
    pub fn new(k: u32) -> Result<Self, SpecialError> {
        if k < 6 || k % 2 != 0 {
            return Err(SpecialError::InvalidParams(format!("weight {k} must be even and at least 6")));
        }
        Ok(Self(k))
    }

    pub fn k(self) -> u32 {
        self.0
    }

    pub fn order(self) -> u32 {
        self.0 - 1
    }

    /// `i^k` for even `k`.
    pub fn i_pow_k(self) -> f64 {
        if self.0 % 4 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `J_n(x)` by its power series; accurate when `|x|` is small against `n`.
pub fn jn_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powi(n as i32) / factorial(n);
    let mut sum = term;
    let h2 = -h * h;
    let mut r = 0u32;
    loop {
        r += 1;
        term *= h2 / (r as f64 * (r + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence normalized by `J_0 + 2 Σ J_{2k} = 1`.
fn jn_miller(n: u32, x: f64) -> f64 {
    let ax = x.abs();
    let start = {
        let m = (n.max(ax as u32) as f64 + 30.0 + 3.0 * ax.sqrt()) as u32;
        m + (m & 1)
    };
    let (mut jp, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    let mut want = 0.0;
    let two_over_x = 2.0 / ax;
    for m in (1..=start).rev() {
        let jm = m as f64 * two_over_x * j - jp;
        jp = j;
        j = jm;
        if m - 1 == n {
            want = j;
        }
        if (m - 1) % 2 == 0 && m > 1 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            want *= 1e-250;
        }
    }
    norm += j;
    let v = want / norm;
    if x < 0.0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Hankel expansion of `J_0` and `J_1` for large positive `x`.
fn j01_asymptotic(x: f64) -> (f64, f64) {
    let mut out = [0.0; 2];
    for (idx, nu) in [0.0f64, 1.0].iter().enumerate() {
        let mu = 4.0 * nu * nu;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut term = 1.0;
        let eight_x = 8.0 * x;
        let mut k = 1u32;
        let mut last = f64::INFINITY;
        loop {
            let kk = k as f64;
            term *= (mu - (2.0 * kk - 1.0).powi(2)) / (kk * eight_x);
            if term.abs() > last {
                break;
            }
            last = term.abs();
            if k % 2 == 1 {
                let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                q += s * term;
            } else {
                let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                p += s * term;
            }
            if term.abs() < 1e-17 {
                break;
            }
            k += 1;
        }
        let chi = x - (0.5 * nu + 0.25) * std::f64::consts::PI;
        let (s, c) = chi.sin_cos();
        out[idx] = (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * c - q * s);
    }
    (out[0], out[1])
}

/// `J_n(x)` for real `x`.
pub fn jn_real(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ax = x.abs();
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    if ax <= 2.0 + 0.25 * n as f64 {
        return sign * jn_series(n, ax);
    }
    if ax <= 25.0 || ax <= n as f64 + 5.0 {
        return sign * jn_miller(n, ax);
    }
    let (j0, j1) = j01_asymptotic(ax);
    if n == 0 {
        return sign * j0;
    }
    let (mut a, mut b) = (j0, j1);
    for m in 1..n {
        let c = 2.0 * m as f64 / ax * b - a;
        a = b;
        b = c;
    }
    sign * b
}

/// `J_{k−1}(x)` on the real line.
#[inline]
pub fn bessel_j_real(k: WeightK, x: f64) -> f64 {
    jn_real(k.order(), x)
}

/// `((y/2)^n / n!)`, a bound on `|J_n(y)|` for every real `y`.
pub fn jn_bound(n: u32, y: f64) -> f64 {
    (n as f64 * (0.5 * y.abs()).ln() - ln_factorial(n)).exp()
}

/// Power series of `J_n(z)` in double-double, also returning `Σ |terms|`.
pub fn jn_series_dd(n: u32, z: Complex64) -> (Complex64, f64) {
    let h = z * 0.5;
    let mut t = Complex64::new(1.0, 0.0);
    for i in 1..=n {
        t = t * h / i as f64;
    }
    let mut term = DdComplex::from_c64(t);
    let mut sum = term;
    let h2 = DdComplex::from_c64(-(h * h));
    let mut mass = term.norm();
    let mut r = 0u32;
    loop {
        r += 1;
        term = (term * h2).div_f64(r as f64 * (r + n) as f64);
        sum = sum + term;
        let tn = term.norm();
        mass += tn;
        if (r as f64) > h.norm() && tn <= 1e-34 * mass {
            break;
        }
        if r > 2000 {
            break;
        }
    }
    (sum.to_c64(), mass)
}

/// Backward recurrence for complex `z`, normalized through `e^{±iz}`.
fn jn_miller_complex(n: u32, z: Complex64) -> Complex64 {
    let az = z.norm();
    let start = {
        let m = (n.max(az as u32) as f64 + 40.0 + 4.0 * az.sqrt()) as u32;
        m + (m & 1)
    };
    let t = if z.im <= 0.0 {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(0.0, -1.0)
    };
    let mut tpow = vec![Complex64::new(1.0, 0.0); start as usize + 2];
    for i in 1..tpow.len() {
        tpow[i] = tpow[i - 1] * t;
    }
    let two_over_z = Complex64::new(2.0, 0.0) / z;
    let (mut jp, mut j) = (Complex64::new(0.0, 0.0), Complex64::new(1e-300, 0.0));
    let mut norm = Complex64::new(0.0, 0.0);
    let mut want = Complex64::new(0.0, 0.0);
    for m in (1..=start).rev() {
        let jm = two_over_z * m as f64 * j - jp;
        jp = j;
        j = jm;
        let idx = m - 1;
        if idx == n {
            want = j;
        }
        if idx >= 1 {
            norm += tpow[idx as usize] * j * 2.0;
        }
        if j.norm() > 1e250 {
            let s = 1e-250;
            j *= s;
            jp *= s;
            norm *= s;
            want *= s;
        }
    }
    norm += j;
    let scale = norm.norm();
    let e = (t * z).exp();
    (want / scale) * e / (norm / scale)
}

/// `J_{k−1}(z)` for complex `z`, `|z| ≤ 10^4`; non-real `z` limited to `|z| ≤ 120`.
pub fn bessel_j(k: WeightK, z: Complex64) -> Result<Complex64, SpecialError> {
    jn_complex(k.order(), z)
}

pub fn jn_complex(n: u32, z: Complex64) -> Result<Complex64, SpecialError> {
    let az = z.norm();
    if !az.is_finite() || az > MAX_ABS_ARG {
        return Err(SpecialError::OutOfDomain(az));
    }
    if z.im == 0.0 {
        return Ok(Complex64::new(jn_real(n, z.re), 0.0));
    }
    if az > MAX_COMPLEX_ARG {
        return Err(SpecialError::OutOfDomain(az));
    }
    if az <= 30.0 || az - z.im.abs() <= 40.0 {
        let (s, _) = jn_series_dd(n, z);
        return Ok(s);
    }
    Ok(jn_miller_complex(n, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_oracle(n: u32, x: f64, terms: u32) -> f64 {
        let mut s = 0.0;
        for r in 0..terms {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * ((2 * r + n) as f64 * (0.5 * x).ln() - ln_factorial(r) - ln_factorial(r + n)).exp();
        }
        s
    }

    #[test]
    fn zero_and_parity() {
        for k in (6..=26).step_by(2) {
            let w = WeightK::new(k).unwrap();
            assert_eq!(bessel_j_real(w, 0.0), 0.0);
        }
        for x in [1.0, 5.0, 20.0, 33.0] {
            assert_eq!(jn_real(11, -x), -jn_real(11, x));
        }
        assert!(WeightK::new(7).is_err());
        assert!(WeightK::new(4).is_err());
    }

    #[test]
    fn small_argument_series_oracle() {
        let v = jn_real(11, 1.0);
        let o = series_oracle(11, 1.0, 40);
        assert!(((v - o) / o).abs() < 1e-13, "{v} {o}");
    }

    /// Reference values from the integral `J_n(x) = (1/π)∫_0^π cos(nθ − x sin θ) dθ`,
    /// evaluated with a high-order trapezoid rule, which is spectrally accurate here.
    fn integral_oracle(n: u32, x: f64) -> f64 {
        let m = 4000;
        let h = std::f64::consts::PI / m as f64;
        let mut s = 0.0;
        for i in 0..=m {
            let th = i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            s += w * (n as f64 * th - x * th.sin()).cos();
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn all_paths_match_integral_oracle() {
        for n in [0u32, 1, 5, 11, 15, 21, 25] {
            for &x in &[0.1, 0.7, 1.9, 3.0, 7.5, 12.0, 19.9, 24.9, 25.1, 31.0, 47.3, 88.0, 250.0, 999.0, 5000.0] {
                let v = jn_real(n, x);
                let o = integral_oracle(n, x);
                let scale = o.abs().max(1e-3 * (2.0 / (std::f64::consts::PI * x)).sqrt().min(1.0));
                assert!((v - o).abs() <= 1e-11 * scale.max(1e-300) + 1e-15, "n={n} x={x} {v} {o}");
            }
        }
    }

    #[test]
    fn recurrence_derivative() {
        for &z in &[0.5, 2.0, 10.0] {
            let k = 12u32;
            let h = 1e-5;
            let d = (jn_real(k, z + h) - jn_real(k, z - h)) / (2.0 * h);
            assert!((2.0 * d - (jn_real(k - 1, z) - jn_real(k + 1, z))).abs() < 1e-9);
        }
    }

    #[test]
    fn small_argument_bound() {
        for n in [11u32, 15] {
            for i in 1..=100 {
                let y = i as f64 / 100.0;
                assert!(jn_real(n, y).abs() <= y.powi(n as i32));
                assert!(jn_real(n, y).abs() <= jn_bound(n, y) * (1.0 + 1e-12));
            }
        }
        for &y in &[3.0, 11.0, 30.0, 200.0] {
            assert!(jn_real(11, y).abs() <= jn_bound(11, y));
        }
    }

    fn complex_integral_oracle(n: u32, z: Complex64) -> Complex64 {
        let m = 6000;
        let h = std::f64::consts::PI / m as f64;
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..=m {
            let th = i as f64 * h;
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            s += (Complex64::new(n as f64 * th, 0.0) - z * th.sin()).cos() * w;
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn complex_paths_agree() {
        for &(re, im) in &[(3.0, 4.0), (-10.0, 2.0), (0.0, 12.566), (25.0, -30.0), (70.0, 5.0), (100.0, 60.0), (-3.5, 7.04), (35.0, 1.0), (0.0, 110.0)] {
            let z = Complex64::new(re, im);
            let o = complex_integral_oracle(11, z);
            let m = jn_miller_complex(11, z);
            assert!((o - m).norm() <= 1e-10 * o.norm(), "{z} {o} {m}");
            if z.norm() - im.abs() <= 40.0 {
                let (s, _) = jn_series_dd(11, z);
                assert!((s - o).norm() <= 1e-10 * o.norm(), "{z} {s} {o}");
            }
            let v = jn_complex(11, z).unwrap();
            assert!((v - o).norm() <= 1e-10 * o.norm());
        }
        let x = 17.0;
        let c = jn_complex(11, Complex64::new(x, 1e-14)).unwrap();
        assert!((c.re - jn_real(11, x)).abs() < 1e-12);
        assert!(jn_complex(11, Complex64::new(100.0, 100.0)).is_err());
        assert!(jn_complex(11, Complex64::new(2e4, 0.0)).is_err());
    }

    #[test]
    fn imaginary_axis_is_modified_bessel() {
        let y = 4.0 * std::f64::consts::PI;
        let v = jn_complex(11, Complex64::new(0.0, y)).unwrap();
        let mut i11 = 0.0;
        for r in 0..80u32 {
            i11 += ((2 * r + 11) as f64 * (0.5 * y).ln() - ln_factorial(r) - ln_factorial(r + 11)).exp();
        }
        assert!((v - Complex64::new(0.0, -i11)).norm() < 1e-12 * i11);
    }
}
