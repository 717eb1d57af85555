use serde::{Deserialize, Serialize};

use super::real::{format_real, powi, real, to_f64, Real, FULL_DIGITS, REAL_MANTISSA_BITS};
use crate::error::{Error, Result};
use crate::word::BinaryWord;

/// Smallest accepted working precision.
pub const MIN_PRECISION_BITS: u32 = 53;
/// Default working precision (the full double-double significand).
pub const DEFAULT_PRECISION_BITS: u32 = REAL_MANTISSA_BITS;
/// Default half-width used when classifying points against closed intervals.
pub const DEFAULT_TOLERANCE: f64 = 5.421010862427522e-20; // 2^-64

/// A validated base `beta` in (1, 2) with the constants every other module
/// needs: the right end `1/(beta-1)` of the admissible interval and the
/// two-cycle `core_lo = 1/(beta^2-1)`, `core_hi = beta/(beta^2-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaContext {
    beta: Real,
    precision_bits: u32,
    tolerance: Real,
    upper: Real,
    core_lo: Real,
    core_hi: Real,
}

/// Digit of a beta-expansion, equivalently the index of the map `T_d(x) = beta*x - d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Digit {
    Zero,
    One,
}

impl Digit {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Digit::One
        } else {
            Digit::Zero
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Digit::Zero => 0.0,
            Digit::One => 1.0,
        }
    }

    pub fn is_one(self) -> bool {
        self == Digit::One
    }
}

impl BetaContext {
    pub fn new(beta: Real) -> Result<Self> {
        Self::with_precision(beta, DEFAULT_PRECISION_BITS, real(DEFAULT_TOLERANCE))
    }

    pub fn from_f64(beta: f64) -> Result<Self> {
        Self::new(real(beta))
    }

    pub fn with_precision(beta: Real, precision_bits: u32, tolerance: Real) -> Result<Self> {
        if !(beta > 1.0 && beta < 2.0) {
            return Err(Error::InvalidBeta {
                beta: format_real(beta, FULL_DIGITS),
            });
        }
        if !(MIN_PRECISION_BITS..=REAL_MANTISSA_BITS).contains(&precision_bits) {
            return Err(Error::InvalidPrecision {
                bits: precision_bits,
                min: MIN_PRECISION_BITS,
                max: REAL_MANTISSA_BITS,
            });
        }
        if !(real(0.0)..real(1e-6)).contains(&tolerance) {
            return Err(Error::InvalidTolerance(format_real(tolerance, 6)));
        }
        let one = real(1.0);
        let beta_sq_minus_one = beta * beta - one;
        Ok(BetaContext {
            beta,
            precision_bits,
            tolerance,
            upper: one / (beta - one),
            core_lo: one / beta_sq_minus_one,
            core_hi: beta / beta_sq_minus_one,
        })
    }

    #[inline]
    pub fn beta(&self) -> Real {
        self.beta
    }

    pub fn beta_f64(&self) -> f64 {
        to_f64(self.beta)
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    #[inline]
    pub fn tolerance(&self) -> Real {
        self.tolerance
    }

    /// `1/(beta-1)`, the right end of the admissible interval `[0, 1/(beta-1)]`.
    #[inline]
    pub fn upper(&self) -> Real {
        self.upper
    }

    /// `1/(beta^2-1)`; `T_0` maps it to [`core_hi`](Self::core_hi).
    #[inline]
    pub fn core_lo(&self) -> Real {
        self.core_lo
    }

    /// `beta/(beta^2-1)`; `T_1` maps it to [`core_lo`](Self::core_lo).
    #[inline]
    pub fn core_hi(&self) -> Real {
        self.core_hi
    }

    pub fn pow(&self, n: u32) -> Real {
        powi(self.beta, n)
    }

    /// Membership in the tolerance-closed admissible interval.
    #[inline]
    pub fn in_admissible(&self, y: Real) -> bool {
        y >= -self.tolerance && y <= self.upper + self.tolerance
    }

    /// Membership in `[lo - tol, hi + tol]`.
    #[inline]
    pub fn in_closed(&self, y: Real, lo: Real, hi: Real) -> bool {
        y >= lo - self.tolerance && y <= hi + self.tolerance
    }

    /// `T_d(x) = beta*x - d`.
    #[inline]
    pub fn apply_map(&self, digit: Digit, x: Real) -> Real {
        match digit {
            Digit::Zero => self.beta * x,
            Digit::One => self.beta * x - 1.0,
        }
    }

    /// Applies the maps of `word` left to right, one step at a time.
    pub fn iterate_word(&self, word: &BinaryWord, x: Real) -> Real {
        word.digits().fold(x, |y, d| self.apply_map(d, y))
    }

    /// Closed form `beta^k x - sum eps_n beta^(k-n)` of the composition
    /// described by `word` (length `k`).
    pub fn apply_word(&self, word: &BinaryWord, x: Real) -> Real {
        let k = word.len();
        let mut power = real(1.0);
        let mut digit_sum = real(0.0);
        for n in (0..k).rev() {
            if word.get(n) {
                digit_sum += power;
            }
            power *= self.beta;
        }
        power * x - digit_sum
    }

    /// The reflection `x -> 1/(beta-1) - x`, which conjugates `T_0` and `T_1`.
    #[inline]
    pub fn reflect(&self, x: Real) -> Real {
        self.upper - x
    }

    /// Parses and validates a point of the admissible interval.
    pub fn check_point(&self, x: Real) -> Result<()> {
        if self.in_admissible(x) {
            Ok(())
        } else {
            Err(Error::InvalidPoint {
                x: format_real(x, FULL_DIGITS),
                upper: format_real(self.upper, FULL_DIGITS),
            })
        }
    }

    /// Decimal rendering of the base at full working precision.
    pub fn beta_string(&self) -> String {
        format_real(self.beta, FULL_DIGITS)
    }
}
