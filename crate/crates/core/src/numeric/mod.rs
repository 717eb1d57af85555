//! Scalars, the two expanding maps, and the threshold polynomials.

pub mod context;
pub mod poly;
pub mod real;
pub mod roots;

pub use context::{BetaContext, Digit, DEFAULT_PRECISION_BITS, DEFAULT_TOLERANCE, MIN_PRECISION_BITS};
pub use poly::{Family, PolynomialSpec};
pub use real::{format_fixed, format_real, parse_real, powi, real, to_f64, Real, FULL_DIGITS};
pub use roots::{
    default_thresholds, lambda, omega, omega_with_family, smallest_root_above_one, ThresholdTable, DEFAULT_ROOT_TOL,
    SCAN_OFFSET, SCAN_STEP, TIGHT_ROOT_TOL,
};

/// `(1 + sqrt 5)/2`, the upper end of the range where the paired steering
/// interval and the `kappa` formula make sense.
pub fn golden_ratio() -> Real {
    (real(1.0) + real(5.0).sqrt()) / 2.0
}
