use std::sync::OnceLock;

use super::poly::{Family, PolynomialSpec};
use super::real::{real, Real};
use crate::error::{Error, Result};

/// Left end of the sign-change scan; skips the common root at 1.
pub const SCAN_OFFSET: f64 = 1e-9;
/// Width of each scan cell.
pub const SCAN_STEP: f64 = 1e-3;
/// Bisection width used for published tables.
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;
/// Bisection width used when a root is a hard validity threshold.
pub const TIGHT_ROOT_TOL: f64 = 1e-24;

/// Smallest root of `spec` in `(1 + SCAN_OFFSET, 2)`.
///
/// Scans for the first sign change on a grid of width [`SCAN_STEP`], then
/// bisects until the bracket is narrower than `abs_tol`. Returns the lower
/// end of the final bracket, so the result never exceeds the true root by
/// more than rounding.
pub fn smallest_root_above_one(spec: &PolynomialSpec, abs_tol: f64) -> Result<Real> {
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::InvalidTolerance(abs_tol.to_string()));
    }
    let one = real(1.0);
    let mut a = one + SCAN_OFFSET;
    let mut fa = spec.eval(a);
    let mut cell = 1u32;
    let bracket = loop {
        let b = (one + real(cell as f64) * SCAN_STEP).min(real(2.0));
        let fb = spec.eval(b);
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.signum() != fb.signum() || fb == 0.0 {
            break Some((a, fa, b));
        }
        if b >= 2.0 {
            break None;
        }
        a = b;
        fa = fb;
        cell += 1;
    };
    let (mut lo, flo, mut hi) = bracket.ok_or_else(|| Error::NoRootFound { poly: spec.to_string() })?;
    let lo_sign = flo.signum();
    while hi - lo > abs_tol {
        let mid = (lo + hi) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = spec.eval(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Root of the given family, checked to lie in (1, 2).
fn family_root(family: Family, m: u32, abs_tol: f64) -> Result<Real> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    smallest_root_above_one(&PolynomialSpec::new(family, m), abs_tol)
}

/// `omega_m`: the smallest of the three dense-family roots, together with
/// the family attaining it.
pub fn omega_with_family(m: u32, abs_tol: f64) -> Result<(Real, Family)> {
    let mut best: Option<(Real, Family)> = None;
    for fam in Family::DENSE {
        let r = family_root(fam, m, abs_tol)?;
        if best.is_none_or(|(b, _)| r < b) {
            best = Some((r, fam));
        }
    }
    Ok(best.expect("three families"))
}

pub fn omega(m: u32, abs_tol: f64) -> Result<Real> {
    omega_with_family(m, abs_tol).map(|(r, _)| r)
}

/// `lambda_m`: the smallest root above 1 of `x^(m+3) - x^(m+2) - x^(m+1) + 1`.
pub fn lambda(m: u32, abs_tol: f64) -> Result<Real> {
    family_root(Family::Lambda, m, abs_tol)
}

/// Cached `omega_m` and `lambda_m` for `m = 1..=m_max`.
#[derive(Debug, Clone)]
pub struct ThresholdTable {
    abs_tol: f64,
    omega: Vec<Real>,
    lambda: Vec<Real>,
}

impl ThresholdTable {
    pub fn new(m_max: u32, abs_tol: f64) -> Result<Self> {
        let mut omega_vals = Vec::with_capacity(m_max as usize);
        let mut lambda_vals = Vec::with_capacity(m_max as usize);
        for m in 1..=m_max {
            omega_vals.push(omega(m, abs_tol)?);
            lambda_vals.push(lambda(m, abs_tol)?);
        }
        Ok(ThresholdTable {
            abs_tol,
            omega: omega_vals,
            lambda: lambda_vals,
        })
    }

    pub fn m_max(&self) -> u32 {
        self.omega.len() as u32
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    /// `omega_m`; panics when `m` is outside `1..=m_max`.
    pub fn omega(&self, m: u32) -> Real {
        self.omega[m as usize - 1]
    }

    pub fn lambda(&self, m: u32) -> Real {
        self.lambda[m as usize - 1]
    }

    /// The first `m_max` rows.
    pub fn truncated(&self, m_max: u32) -> ThresholdTable {
        let n = (m_max as usize).min(self.omega.len());
        ThresholdTable {
            abs_tol: self.abs_tol,
            omega: self.omega[..n].to_vec(),
            lambda: self.lambda[..n].to_vec(),
        }
    }

    /// Largest `m` with `beta <= omega_m` (the sequence decreases in `m`).
    pub fn largest_omega_index(&self, beta: Real) -> Option<u32> {
        (1..=self.m_max()).rev().find(|&m| beta <= self.omega(m))
    }

    /// Smallest `m` with `beta <= lambda_m` (the sequence increases in `m`).
    pub fn smallest_lambda_index(&self, beta: Real) -> Option<u32> {
        (1..=self.m_max()).find(|&m| beta <= self.lambda(m))
    }
}

/// Threshold table for `m = 1..=64`, computed once per process at the same
/// tolerance as the symbolic `omega:m` / `lambda:m` forms, so a base given as
/// a root compares equal to its table entry.
pub fn default_thresholds() -> &'static ThresholdTable {
    static TABLE: OnceLock<ThresholdTable> = OnceLock::new();
    TABLE.get_or_init(|| ThresholdTable::new(64, TIGHT_ROOT_TOL).expect("threshold roots exist for m <= 64"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::real::to_f64;

    fn close(r: Real, expected: f64, tol: f64) -> bool {
        (to_f64(r) - expected).abs() <= tol
    }

    // Reference roots from an independent 50-digit solver.
    const OMEGA_REF: [(u32, f64); 8] = [
        (1, 1.07445460981),
        (2, 1.02837946454),
        (3, 1.01491653431),
        (4, 1.00918767302),
        (5, 1.00622499565),
        (6, 1.00449552283),
        (10, 1.00175547805),
        (100, 1.0000197),
    ];
    const LAMBDA_REF: [(u32, f64); 9] = [
        (1, 1.324717957),
        (2, 1.465571232),
        (3, 1.534157745),
        (8, 1.611930397),
        (9, 1.614306823),
        (10, 1.615749203),
        (11, 1.616629684),
        (100, 1.618033989),
        (4, 1.5701473121),
    ];

    #[test]
    fn omega_matches_reference_roots() {
        for (m, v) in OMEGA_REF {
            let tol = if m == 100 { 1e-7 } else { 1e-10 };
            assert!(close(omega(m, 1e-14).unwrap(), v, tol), "m = {m}");
        }
    }

    #[test]
    fn lambda_matches_reference_roots() {
        for (m, v) in LAMBDA_REF {
            assert!(close(lambda(m, 1e-14).unwrap(), v, 1e-9), "m = {m}");
        }
    }

    #[test]
    fn published_five_digit_values() {
        assert!(close(lambda(1, DEFAULT_ROOT_TOL).unwrap(), 1.32472, 5e-6));
        assert!(close(lambda(100, DEFAULT_ROOT_TOL).unwrap(), 1.61804, 1e-5));
        assert!(close(lambda(2, DEFAULT_ROOT_TOL).unwrap(), 1.46557, 5e-6));
        assert!(close(lambda(3, DEFAULT_ROOT_TOL).unwrap(), 1.53416, 5e-6));
        assert!(close(lambda(10, DEFAULT_ROOT_TOL).unwrap(), 1.61575, 5e-6));
        assert!(close(omega(1, DEFAULT_ROOT_TOL).unwrap(), 1.07445, 5e-6));
        assert!(close(omega(2, DEFAULT_ROOT_TOL).unwrap(), 1.02838, 5e-6));
    }

    #[test]
    fn third_family_root_for_m_one() {
        let r = smallest_root_above_one(&PolynomialSpec::new(Family::P3, 1), 1e-12).unwrap();
        assert!(close(r, 1.16730397826, 1e-10));
        let p = PolynomialSpec::new(Family::P3, 1);
        assert!(p.eval(r - 1e-9) < 0.0 && p.eval(r + 1e-9) > 0.0);
    }

    #[test]
    fn omega_is_attained_by_first_family() {
        for m in [1, 2, 3, 4, 5, 6, 10, 100] {
            assert_eq!(omega_with_family(m, DEFAULT_ROOT_TOL).unwrap().1, Family::P1, "m = {m}");
        }
    }

    #[test]
    fn sequences_are_monotone() {
        let t = ThresholdTable::new(31, DEFAULT_ROOT_TOL).unwrap();
        for m in 1..=30 {
            assert!(t.omega(m + 1) < t.omega(m), "omega m = {m}");
            assert!(t.lambda(m) < t.lambda(m + 1), "lambda m = {m}");
        }
    }

    #[test]
    fn limits_at_m_one_hundred() {
        assert!(omega(100, DEFAULT_ROOT_TOL).unwrap() < 1.0001);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(close(lambda(100, DEFAULT_ROOT_TOL).unwrap(), golden, 1e-4));
    }

    #[test]
    fn residual_is_small_relative_to_slope() {
        let abs_tol = 1e-12;
        for m in [1, 2, 3, 7, 20] {
            for fam in [Family::P1, Family::P2, Family::P3, Family::Lambda] {
                let spec = PolynomialSpec::new(fam, m);
                let r = smallest_root_above_one(&spec, abs_tol).unwrap();
                let h = real(1e-7);
                let slope = (spec.eval(r + h) - spec.eval(r - h)) / (h * 2.0);
                assert!(spec.eval(r).abs() < slope.abs() * 10.0 * abs_tol, "{fam:?} m={m}");
            }
        }
    }

    #[test]
    fn tight_root_is_a_lower_bracket_end() {
        let spec = PolynomialSpec::new(Family::P1, 1);
        let r = smallest_root_above_one(&spec, TIGHT_ROOT_TOL).unwrap();
        assert!(spec.eval(r) <= 0.0);
        assert!(spec.eval(r + 1e-22) > 0.0);
    }

    #[test]
    fn lookup_indices() {
        let t = default_thresholds();
        assert_eq!(t.largest_omega_index(real(1.07)), Some(1));
        assert_eq!(t.largest_omega_index(real(1.08)), None);
        assert_eq!(t.smallest_lambda_index(real(1.46)), Some(2));
        // lambda_7 = 1.6080.. < 1.61 <= lambda_8 = 1.6119..
        assert_eq!(t.smallest_lambda_index(real(1.61)), Some(8));
        assert_eq!(t.smallest_lambda_index(real(1.62)), None);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(omega(0, 1e-9).is_err());
        assert!(smallest_root_above_one(&PolynomialSpec::new(Family::P3, 1), 0.0).is_err());
    }
}
