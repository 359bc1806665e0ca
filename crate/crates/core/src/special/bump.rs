//! Smooth compactly supported test functions.

use serde::{Deserialize, Serialize};

use crate::error::SpecialError;

/// A real function with compact support inside `(0, ∞)`.
pub trait CompactFn: Sync {
    fn support(&self) -> (f64, f64);
    fn eval(&self, x: f64) -> f64;
}

/// `amplitude · exp(1 − 1/(1 − t²))` with `t = (x − μ)/ρ`, so `g(μ) = amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: f64,
    pub half_width: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl TestFunction {
    pub fn new(center: f64, half_width: f64) -> Result<Self, SpecialError> {
        if !(half_width > 0.0 && center - half_width > 0.0 && center.is_finite()) {
            return Err(SpecialError::InvalidParams(format!(
                "bump (μ={center}, ρ={half_width}) must have support inside (0, ∞)"
            )));
        }
        Ok(Self {
            center,
            half_width,
            amplitude: 1.0,
        })
    }

    pub fn scaled(self, c: f64) -> Self {
        Self {
            amplitude: self.amplitude * c,
            ..self
        }
    }

    /// Integer points strictly inside the support.
    pub fn integer_support(&self) -> std::ops::RangeInclusive<u64> {
        let lo = (self.center - self.half_width).floor() as u64 + 1;
        let hi = (self.center + self.half_width).ceil() as u64 - 1;
        lo..=hi
    }
}

impl CompactFn for TestFunction {
    fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }

    fn eval(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.half_width;
        let d = 1.0 - t * t;
        if d <= 0.0 {
            return 0.0;
        }
        self.amplitude * (1.0 - 1.0 / d).exp()
    }
}

/// A user supplied function together with its support.
pub struct Sampled<F: Fn(f64) -> f64 + Sync> {
    pub lo: f64,
    pub hi: f64,
    pub f: F,
}

impl<F: Fn(f64) -> f64 + Sync> CompactFn for Sampled<F> {
    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn eval(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            0.0
        } else {
            (self.f)(x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_values() {
        let g = TestFunction::new(3.0, 1.0).unwrap();
        assert_eq!(g.eval(3.0), 1.0);
        assert_eq!(g.eval(2.0), 0.0);
        assert_eq!(g.eval(4.5), 0.0);
        assert!((g.eval(3.5) - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!(TestFunction::new(1.0, 1.0).is_err());
        assert_eq!(g.integer_support(), 3..=3);
        let h = TestFunction::new(20.0, 10.0).unwrap();
        assert_eq!(h.integer_support(), 11..=29);
    }
}
