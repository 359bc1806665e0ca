//! Normalized Hecke eigenforms of level one for weights up to 26.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::cache;
use super::qexp::{as_integers, cusp_basis, cusp_monomials, hecke_apply, QExpansion};
use crate::error::ModformError;
use crate::special::dd::Dd;

pub const EIGEN_WEIGHTS: [u32; 7] = [12, 16, 18, 20, 22, 24, 26];

/// `a(n) = x(n) + y(n)√D`; `D = 1` and `y = 0` for rational forms.
#[derive(Debug, Clone)]
pub struct Eigenform {
    pub weight: u32,
    pub field_degree: u8,
    pub discriminant: BigInt,
    pub x: QExpansion,
    pub y: QExpansion,
    pub lambda: Vec<f64>,
}

fn rat_to_dd(r: &BigRational) -> Dd {
    let hi = r.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() || hi == 0.0 {
        return Dd::new(hi);
    }
    let hi_r = BigRational::from_float(hi).expect("finite");
    let lo = (r - hi_r).to_f64().unwrap_or(0.0);
    Dd { hi, lo }
}

fn dd_sqrt(d: &BigInt) -> Dd {
    let x = d.to_f64().expect("small discriminant").sqrt();
    let xd = Dd::new(x);
    // one Newton step: (x + D/x)/2 in double-double
    let dd = rat_to_dd(&BigRational::from_integer(d.clone()));
    let err = dd - xd * xd;
    xd + err.div_f64(2.0 * x)
}

/// Squarefree part `D` and cofactor `s` with `n = s² D`.
fn squarefree_split(n: &BigInt) -> Result<(BigInt, BigInt), ModformError> {
    let v = n
        .to_u64()
        .ok_or_else(|| ModformError::OutOfRange(format!("discriminant {n} too large to factor")))?;
    let f = crate::residue::factorize(v).map_err(|e| ModformError::OutOfRange(e.to_string()))?;
    let (mut d, mut s) = (BigInt::one(), BigInt::one());
    for (p, e) in f.factors {
        s *= BigInt::from(p).pow(e / 2);
        if e % 2 == 1 {
            d *= BigInt::from(p);
        }
    }
    Ok((d, s))
}

impl Eigenform {
    pub fn precision(&self) -> usize {
        self.x.precision()
    }

    pub fn is_rational(&self) -> bool {
        self.field_degree == 1
    }

    /// `a(n)` in double-double.
    pub fn coeff_dd(&self, n: usize) -> Dd {
        let x = rat_to_dd(self.x.coeff(n));
        if self.is_rational() {
            return x;
        }
        x + rat_to_dd(self.y.coeff(n)) * dd_sqrt(&self.discriminant)
    }

    pub fn coeff_f64(&self, n: usize) -> f64 {
        self.coeff_dd(n).to_f64()
    }

    pub fn lambda(&self, n: usize) -> Result<f64, ModformError> {
        self.lambda.get(n).copied().ok_or(ModformError::PrecisionExhausted {
            need: n,
            have: self.precision(),
        })
    }

    /// Exact `a(n)·f == T_m f` check on the rational pair `(x, y)`.
    pub fn is_eigen_under(&self, m: u64) -> Result<bool, ModformError> {
        let tx = hecke_apply(m, &self.x)?;
        let ty = hecke_apply(m, &self.y)?;
        let n = tx.precision();
        let am_x = self.x.coeff(m as usize).clone();
        let am_y = self.y.coeff(m as usize).clone();
        let xs = self.x.truncate(n);
        let ys = self.y.truncate(n);
        let d = BigRational::from_integer(self.discriminant.clone());
        let want_x = xs.scale(&am_x).add(&ys.scale(&(&am_y * &d)));
        let want_y = ys.scale(&am_x).add(&xs.scale(&am_y));
        Ok(tx == want_x && ty == want_y)
    }
}

fn normalized_lambda(weight: u32, a: impl Fn(usize) -> f64, n: usize) -> Vec<f64> {
    let e = (weight as f64 - 1.0) / 2.0;
    (0..=n)
        .map(|i| if i == 0 { 0.0 } else { a(i) / (i as f64).powf(e) })
        .collect()
}

/// Reduces a basis to `f_i` with `a_{f_i}(j) = δ_ij` for `1 ≤ j ≤ dim`.
fn echelon(mut basis: Vec<QExpansion>) -> Vec<QExpansion> {
    let d = basis.len();
    for col in 0..d {
        let piv = (col..d)
            .find(|&r| !basis[r].coeff(col + 1).is_zero())
            .expect("cusp basis is triangular in the first coefficients");
        basis.swap(col, piv);
        let c = basis[col].coeff(col + 1).clone();
        basis[col] = basis[col].scale(&(BigRational::one() / c));
        for r in 0..d {
            if r != col {
                let f = basis[r].coeff(col + 1).clone();
                if !f.is_zero() {
                    basis[r] = basis[r].sub(&basis[col].scale(&f));
                }
            }
        }
    }
    basis
}

/// Eigenforms of weight `k` with coefficients up to `N`.
pub fn eigenforms(k: u32, n: usize) -> Result<Vec<Eigenform>, ModformError> {
    if !EIGEN_WEIGHTS.contains(&k) {
        return Err(ModformError::OutOfRange(format!("eigenforms of weight {k}")));
    }
    let zero = QExpansion::new(k, vec![BigRational::zero(); n + 1]);
    let dim = cusp_monomials(k).len();
    match dim {
        1 => {
            let x = match cache::load(k, n)? {
                Some(c) => QExpansion::from_integers(k, c),
                None => {
                    let x = cusp_basis(k, n)?.remove(0);
                    if let Some(ints) = as_integers(&x) {
                        cache::store(k, &ints)?;
                    }
                    x
                }
            };
            let mut f = Eigenform {
                weight: k,
                field_degree: 1,
                discriminant: BigInt::one(),
                x,
                y: zero,
                lambda: Vec::new(),
            };
            f.lambda = normalized_lambda(k, |i| f.coeff_f64(i), n);
            Ok(vec![f])
        }
        2 => {
            let basis = echelon(cusp_basis(k, n)?);
            let (f1, f2) = (&basis[0], &basis[1]);
            let t = |f: &QExpansion| -> Result<[BigRational; 2], ModformError> {
                let tf = hecke_apply(2, f)?;
                Ok([tf.coeff(1).clone(), tf.coeff(2).clone()])
            };
            // rows: T_2 f_i = m_i1 f_1 + m_i2 f_2
            let [m11, m12] = t(f1)?;
            let [m21, m22] = t(f2)?;
            let tr = &m11 + &m22;
            let det = &m11 * &m22 - &m12 * &m21;
            let disc = &tr * &tr - BigRational::from_integer(BigInt::from(4)) * det;
            if !disc.is_integer() || disc.is_negative() {
                return Err(ModformError::OutOfRange("T_2 discriminant not a positive integer".into()));
            }
            let (d, s) = squarefree_split(&disc.to_integer())?;
            if d.is_one() {
                return Err(ModformError::OutOfRange("T_2 splits over Q; rational dim-2 case".into()));
            }
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let x = f1.add(&f2.scale(&(&tr * &half)));
            let mut out = Vec::new();
            for sign in [Sign::Plus, Sign::Minus] {
                let ys = BigRational::from_integer(BigInt::from_biguint(sign, s.magnitude().clone())) * &half;
                let mut f = Eigenform {
                    weight: k,
                    field_degree: 2,
                    discriminant: d.clone(),
                    x: x.clone(),
                    y: f2.scale(&ys),
                    lambda: Vec::new(),
                };
                f.lambda = normalized_lambda(k, |i| f.coeff_f64(i), n);
                out.push(f);
            }
            Ok(out)
        }
        d => Err(ModformError::OutOfRange(format!("cusp space of dimension {d}"))),
    }
}

/// `|λ(m)λ(n) − Σ_{d|(m,n)} λ(mn/d²)|`.
pub fn hecke_relation_check(f: &Eigenform, m: usize, n: usize) -> Result<f64, ModformError> {
    let g = num_integer::gcd(m, n);
    let lhs = f.lambda(m)? * f.lambda(n)?;
    let mut rhs = 0.0;
    for d in (1..=g).filter(|d| g % d == 0) {
        rhs += f.lambda(m * n / (d * d))?;
    }
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_12_is_delta() {
        let f = &eigenforms(12, 50).unwrap()[0];
        assert!((f.lambda[2] + 0.530_330_09).abs() < 1e-8);
        assert!((f.lambda[2] - (-24.0 / 2f64.powf(5.5))).abs() < 1e-15);
        assert!(hecke_relation_check(f, 2, 2).unwrap() < 1e-10);
    }

    #[test]
    fn weight_16_matches_t2() {
        let fs = eigenforms(16, 40).unwrap();
        assert_eq!(fs.len(), 1);
        let f = &fs[0];
        let t2 = hecke_apply(2, &f.x).unwrap();
        assert_eq!(t2, f.x.truncate(20).scale(f.x.coeff(2)));
        assert_eq!(f.x.coeff(2), &BigRational::from_integer(BigInt::from(216)));
    }

    #[test]
    fn weight_24_quadratic_pair() {
        let fs = eigenforms(24, 120).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].discriminant, BigInt::from(144169));
        let a2: Vec<f64> = fs.iter().map(|f| f.coeff_f64(2)).collect();
        let r = 12.0 * 144169f64.sqrt();
        assert!((a2[0] - (540.0 + r)).abs() < 1e-9 && (a2[1] - (540.0 - r)).abs() < 1e-9);
        for f in &fs {
            assert!(f.is_eigen_under(3).unwrap() && f.is_eigen_under(5).unwrap());
            for m in 1..=10 {
                for n in 1..=10 {
                    assert!(hecke_relation_check(f, m, n).unwrap() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn embedding_error_against_integer_sqrt() {
        let fs = eigenforms(24, 200).unwrap();
        let scale = BigInt::from(10).pow(30);
        for f in &fs {
            for n in [1usize, 7, 50, 199] {
                let x = f.x.coeff(n);
                let y = f.y.coeff(n);
                // denominators divide 2 here
                let xs = (x * BigRational::from_integer(scale.clone())).to_integer();
                let y2d = (y * y * BigRational::from_integer(f.discriminant.clone() * &scale * &scale)).to_integer();
                let mut ys = y2d.sqrt();
                if y.is_negative() {
                    ys = -ys;
                }
                let exact = (xs + ys).to_f64().unwrap() / 1e30;
                let got = f.coeff_f64(n);
                assert!(((got - exact) / exact).abs() < 1e-12, "n={n} {got} {exact}");
            }
        }
    }

    #[test]
    fn all_weights_hecke_and_deligne() {
        for k in EIGEN_WEIGHTS {
            for f in eigenforms(k, 900).unwrap() {
                assert_eq!(f.coeff_f64(1), 1.0);
                for m in 1..=30 {
                    for n in 1..=30 {
                        assert!(hecke_relation_check(&f, m, n).unwrap() < 1e-9, "k={k} {m} {n}");
                    }
                }
                for n in 1..=200 {
                    assert!(f.lambda[n].abs() <= crate::residue::num_divisors(n as u64) as f64 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn rejects_unsupported_weights() {
        assert!(eigenforms(14, 10).is_err());
        assert!(eigenforms(28, 10).is_err());
    }
}
