//! Working scalar and its decimal text form.
//!
//! All orbit, root and measure arithmetic runs in double-double precision:
//! an unevaluated sum of two `f64` values, giving a 106-bit significand.
//! Products use Dekker splitting, so no fused multiply-add is required.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Significand width of [`Real`], in bits.
pub const REAL_MANTISSA_BITS: u32 = 106;

/// Decimal digits emitted by [`format_real`] by default. Enough to
/// round-trip any `Real` to within a few units of its last bit.
pub const FULL_DIGITS: usize = 33;

// Integers below 10^31 are exact in double-double.
const EXACT_DIGITS: usize = 31;

// 2^27 + 1, splits a double into two 26-bit halves.
const SPLITTER: f64 = 134_217_729.0;

/// Working-precision real number: an unevaluated sum `hi + lo` with
/// `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Real {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Real {
    pub const ZERO: Real = Real { hi: 0.0, lo: 0.0 };
    pub const ONE: Real = Real { hi: 1.0, lo: 0.0 };

    /// Normalizes `hi + lo`.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Real {
        let (h, l) = two_sum(hi, lo);
        Real { hi: h, lo: l }
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_nan(&self) -> bool {
        self.hi.is_nan()
    }

    #[inline]
    pub fn abs(self) -> Real {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// -1, 0 or 1 (NaN for NaN).
    #[inline]
    pub fn signum(self) -> f64 {
        if self.hi > 0.0 {
            1.0
        } else if self.hi < 0.0 {
            -1.0
        } else if self.hi == 0.0 {
            0.0
        } else {
            f64::NAN
        }
    }

    pub fn floor(self) -> Real {
        let h = self.hi.floor();
        if h == self.hi {
            let (s, e) = quick_two_sum(h, self.lo.floor());
            Real { hi: s, lo: e }
        } else {
            Real { hi: h, lo: 0.0 }
        }
    }

    pub fn sqrt(self) -> Real {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Real::ZERO } else { real(f64::NAN) };
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = self - Real { hi: p, lo: e };
        let (s, t) = quick_two_sum(x, r.hi / (2.0 * x));
        Real { hi: s, lo: t }
    }

    #[inline]
    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    #[inline]
    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn recip(self) -> Real {
        Real::ONE / self
    }
}

impl From<f64> for Real {
    #[inline]
    fn from(x: f64) -> Real {
        Real { hi: x, lo: 0.0 }
    }
}

impl Neg for Real {
    type Output = Real;
    #[inline]
    fn neg(self) -> Real {
        Real {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Real {
    type Output = Real;
    #[inline]
    fn add(self, b: Real) -> Real {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Real { hi, lo }
    }
}

impl Add<f64> for Real {
    type Output = Real;
    #[inline]
    fn add(self, b: f64) -> Real {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Real { hi, lo }
    }
}

impl Sub for Real {
    type Output = Real;
    #[inline]
    fn sub(self, b: Real) -> Real {
        self + (-b)
    }
}

impl Sub<f64> for Real {
    type Output = Real;
    #[inline]
    fn sub(self, b: f64) -> Real {
        self + (-b)
    }
}

impl Mul for Real {
    type Output = Real;
    #[inline]
    fn mul(self, b: Real) -> Real {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Real { hi, lo }
    }
}

impl Mul<f64> for Real {
    type Output = Real;
    #[inline]
    fn mul(self, b: f64) -> Real {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Real { hi, lo }
    }
}

impl Div for Real {
    type Output = Real;
    /// Long division with three partial quotients.
    fn div(self, b: Real) -> Real {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Real { hi: h, lo: l } + q3
    }
}

impl Div<f64> for Real {
    type Output = Real;
    #[inline]
    fn div(self, b: f64) -> Real {
        self / Real::from(b)
    }
}

macro_rules! scalar_lhs {
    ($tr:ident, $f:ident) => {
        impl $tr<Real> for f64 {
            type Output = Real;
            #[inline]
            fn $f(self, b: Real) -> Real {
                Real::from(self).$f(b)
            }
        }
    };
}
scalar_lhs!(Add, add);
scalar_lhs!(Sub, sub);
scalar_lhs!(Mul, mul);
scalar_lhs!(Div, div);

macro_rules! assign_op {
    ($tr:ident, $f:ident, $op:ident) => {
        impl $tr<Real> for Real {
            #[inline]
            fn $f(&mut self, b: Real) {
                *self = (*self).$op(b);
            }
        }
        impl $tr<f64> for Real {
            #[inline]
            fn $f(&mut self, b: f64) {
                *self = (*self).$op(b);
            }
        }
    };
}
assign_op!(AddAssign, add_assign, add);
assign_op!(SubAssign, sub_assign, sub);
assign_op!(MulAssign, mul_assign, mul);
assign_op!(DivAssign, div_assign, div);

impl PartialEq for Real {
    #[inline]
    fn eq(&self, b: &Real) -> bool {
        self.hi == b.hi && self.lo == b.lo
    }
}

impl PartialEq<f64> for Real {
    #[inline]
    fn eq(&self, b: &f64) -> bool {
        self.hi == *b && self.lo == 0.0
    }
}

impl PartialOrd for Real {
    #[inline]
    fn partial_cmp(&self, b: &Real) -> Option<Ordering> {
        match self.hi.partial_cmp(&b.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&b.lo),
            ord => Some(ord),
        }
    }
}

impl PartialOrd<f64> for Real {
    #[inline]
    fn partial_cmp(&self, b: &f64) -> Option<Ordering> {
        self.partial_cmp(&Real::from(*b))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(FULL_DIGITS);
        f.write_str(&format_real(*self, digits))
    }
}

#[inline]
pub fn real(x: f64) -> Real {
    Real::from(x)
}

#[inline]
pub fn to_f64(x: Real) -> f64 {
    x.hi + x.lo
}

/// `base^n` by binary powering.
pub fn powi(base: Real, n: u32) -> Real {
    let mut result = real(1.0);
    let mut b = base;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result *= b;
        }
        e >>= 1;
        if e > 0 {
            b *= b;
        }
    }
    result
}

fn pow10(e: i32) -> Real {
    let p = powi(real(10.0), e.unsigned_abs());
    if e >= 0 {
        p
    } else {
        real(1.0) / p
    }
}

/// Total order on non-NaN reals (NaN sorts last).
pub fn cmp_real(a: &Real, b: &Real) -> Ordering {
    a.partial_cmp(b).unwrap_or_else(|| a.is_nan().cmp(&b.is_nan()))
}

/// Parses a decimal literal such as `1.07445`, `-3e-4` or `.5`.
pub fn parse_real(input: &str) -> Result<Real> {
    let err = |reason: &str| Error::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err("empty string"));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = body[pos + 1..].parse().map_err(|_| err("malformed exponent"))?;
            (&body[..pos], exp)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err("unexpected character"));
    }

    let mut value = real(0.0);
    let mut used = 0usize;
    let mut scale: i32 = exponent;
    let mut seen_nonzero = false;
    for b in int_part.bytes() {
        let d = (b - b'0') as f64;
        seen_nonzero |= d != 0.0;
        if used < EXACT_DIGITS + 3 {
            value = value * 10.0 + d;
            if seen_nonzero {
                used += 1;
            }
        } else {
            scale += 1;
        }
    }
    for b in frac_part.bytes() {
        let d = (b - b'0') as f64;
        seen_nonzero |= d != 0.0;
        if used < EXACT_DIGITS + 3 {
            value = value * 10.0 + d;
            scale -= 1;
            if seen_nonzero {
                used += 1;
            }
        }
    }
    if scale != 0 {
        value = if scale > 0 {
            value * pow10(scale)
        } else {
            value / powi(real(10.0), scale.unsigned_abs())
        };
    }
    if !value.is_finite() {
        return Err(err("out of range"));
    }
    Ok(if negative { -value } else { value })
}

/// Formats `x` with `digits` significant decimal digits.
///
/// Plain notation is used for moderate exponents, scientific otherwise.
/// Trailing zeros are trimmed.
pub fn format_real(x: Real, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "NaN".to_string();
    }
    let negative = x < 0.0;
    let a = if negative { -x } else { x };

    let mut exp = a.hi().log10().floor() as i32;
    let mut v = a / pow10(exp);
    while v >= 10.0 {
        v /= 10.0;
        exp += 1;
    }
    while v < 1.0 {
        v *= 10.0;
        exp -= 1;
    }

    let mut ds: Vec<u8> = Vec::with_capacity(digits + 2);
    for _ in 0..digits + 2 {
        let mut d = v.floor();
        if d < 0.0 {
            d = real(0.0);
        }
        let mut di = to_f64(d) as i64;
        if di > 9 {
            di = 9;
        }
        ds.push(di as u8);
        v = (v - real(di as f64)) * 10.0;
    }
    // round half up on the first dropped digit
    let round_up = ds[digits] >= 5;
    ds.truncate(digits);
    if round_up {
        let mut i = digits;
        loop {
            if i == 0 {
                ds.insert(0, 1);
                ds.pop();
                exp += 1;
                break;
            }
            i -= 1;
            if ds[i] == 9 {
                ds[i] = 0;
            } else {
                ds[i] += 1;
                break;
            }
        }
    }
    while ds.len() > 1 && *ds.last().unwrap() == 0 {
        ds.pop();
    }

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    let digit_char = |d: &u8| (b'0' + d) as char;
    if (-7..21).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.extend(ds.iter().map(digit_char));
        } else {
            let int_len = exp as usize + 1;
            for i in 0..int_len {
                out.push(ds.get(i).map(digit_char).unwrap_or('0'));
            }
            if ds.len() > int_len {
                out.push('.');
                out.extend(ds[int_len..].iter().map(digit_char));
            }
        }
    } else {
        out.push(digit_char(&ds[0]));
        if ds.len() > 1 {
            out.push('.');
            out.extend(ds[1..].iter().map(digit_char));
        }
        out.push_str(&format!("e{exp}"));
    }
    out
}

/// Rounds `x` to `places` decimal places and prints exactly that many.
pub fn format_fixed(x: Real, places: usize) -> String {
    let scale = powi(real(10.0), places as u32);
    let scaled = (x * scale + 0.5).floor();
    // both words of an integral value are integers
    let int = scaled.hi() as i128 + scaled.lo() as i128;
    let negative = int < 0;
    let int = int.unsigned_abs();
    let denom = 10u128.pow(places as u32);
    let whole = int / denom;
    let frac = int % denom;
    let sign = if negative { "-" } else { "" };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac:0places$}")
    }
}
