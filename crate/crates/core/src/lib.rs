//! Prefix enumeration, branching generators and growth bounds for
//! expansions `x = sum eps_n beta^(-n)` with digits in {0, 1} and a
//! non-integer base `1 < beta < 2`.
//!
//! A digit word is a prefix of some expansion of `x` exactly when the orbit
//! of `x` under the maps `T_0(y) = beta*y` and `T_1(y) = beta*y - 1` stays in
//! `[0, 1/(beta-1)]`. Everything here builds on that equivalence:
//!
//! * [`numeric`]: double-double scalars, the maps, and the threshold
//!   polynomials with their roots `omega_m` and `lambda_m`.
//! * [`prefix`]: counting and enumerating prefixes, two independent ways.
//! * [`generators`]: the dense and paired constructions that produce
//!   exponentially many prefixes inside a steering interval.
//! * [`bounds`]: closed-form growth and dimension bounds.
//! * [`bernoulli`]: the Bernoulli convolution and its local dimension.
//! * [`identities`]: closed forms behind the bounds, as runnable checks.

pub mod bernoulli;
pub mod bounds;
pub mod error;
pub mod generators;
pub mod identities;
pub mod numeric;
pub mod prefix;
pub mod word;

pub use error::{Error, Result};
pub use numeric::{BetaContext, Digit, Family, PolynomialSpec, Real};
pub use word::BinaryWord;
