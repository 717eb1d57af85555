use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_real, golden_ratio, lambda, omega, powi, BetaContext, Real, FULL_DIGITS, TIGHT_ROOT_TOL};
use crate::word::BinaryWord;

/// A closed interval inside the admissible interval, as strings for records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub lo: String,
    pub hi: String,
}

/// `I_m = [T_1^(2m+1)(p), T_0^(2m+1)(beta p)]` with `p = 1/(beta^2-1)`:
/// closed form `[(-beta^(2m+2)+beta+1)/(beta^2-1), beta^(2m+2)/(beta^2-1)]`,
/// split at the pivot `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseInterval {
    pub m: u32,
    pub lo: Real,
    pub hi: Real,
    pub pivot: Real,
}

impl DenseInterval {
    /// Refuses `beta > omega_m`.
    pub fn new(ctx: &BetaContext, m: u32) -> Result<Self> {
        let threshold = omega(m, TIGHT_ROOT_TOL)?;
        if ctx.beta() > threshold {
            return Err(Error::BaseAboveThreshold {
                beta: ctx.beta_string(),
                threshold: format_real(threshold, FULL_DIGITS),
                m,
            });
        }
        Ok(Self::new_unchecked(ctx, m))
    }

    /// The same interval without the threshold test; containment may fail.
    pub fn new_unchecked(ctx: &BetaContext, m: u32) -> Self {
        let b = ctx.beta();
        let d = b * b - 1.0;
        let top = powi(b, 2 * m + 2);
        DenseInterval {
            m,
            lo: (b + 1.0 - top) / d,
            hi: top / d,
            pivot: ctx.core_lo(),
        }
    }

    pub fn contains(&self, ctx: &BetaContext, y: Real) -> bool {
        ctx.in_closed(y, self.lo, self.hi)
    }

    pub fn record(&self) -> IntervalRecord {
        IntervalRecord {
            lo: format_real(self.lo, FULL_DIGITS),
            hi: format_real(self.hi, FULL_DIGITS),
        }
    }
}

/// `I = [T_1(p), T_0(beta p)] = [(1+beta-beta^2)/(beta^2-1), beta^2/(beta^2-1)]`
/// around the core `[p, beta p]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedInterval {
    pub m: u32,
    pub lo: Real,
    pub hi: Real,
    pub core_lo: Real,
    pub core_hi: Real,
}

impl PairedInterval {
    /// Refuses `beta > lambda_m`.
    pub fn new(ctx: &BetaContext, m: u32) -> Result<Self> {
        let threshold = lambda(m, TIGHT_ROOT_TOL)?;
        if ctx.beta() > threshold {
            return Err(Error::BaseAboveThreshold {
                beta: ctx.beta_string(),
                threshold: format_real(threshold, FULL_DIGITS),
                m,
            });
        }
        Ok(Self::new_unchecked(ctx, m))
    }

    /// Requires only `beta < (1+sqrt 5)/2`, where `I` lies inside the
    /// admissible interval; the forced-run bound may fail.
    pub fn new_unchecked(ctx: &BetaContext, m: u32) -> Self {
        debug_assert!(ctx.beta() < golden_ratio());
        let b = ctx.beta();
        let d = b * b - 1.0;
        PairedInterval {
            m,
            lo: (b + 1.0 - b * b) / d,
            hi: b * b / d,
            core_lo: ctx.core_lo(),
            core_hi: ctx.core_hi(),
        }
    }

    pub fn contains(&self, ctx: &BetaContext, y: Real) -> bool {
        ctx.in_closed(y, self.lo, self.hi)
    }

    pub fn in_core(&self, ctx: &BetaContext, y: Real) -> bool {
        ctx.in_closed(y, self.core_lo, self.core_hi)
    }

    pub fn record(&self) -> IntervalRecord {
        IntervalRecord {
            lo: format_real(self.lo, FULL_DIGITS),
            hi: format_real(self.hi, FULL_DIGITS),
        }
    }
}

/// Steps before `y` can first land in `[lo, hi]`: zero inside, otherwise the
/// length of the `T_0` run (below) or `T_1` run (above) that reaches it.
/// No word does better, since `T_0^n` and `T_1^n` bound every length-`n`
/// image from above and below. `None` past `cap`.
fn steps_to_reach(ctx: &BetaContext, y: Real, lo: Real, hi: Real, cap: usize) -> Option<usize> {
    let tol = ctx.tolerance();
    let mut z = y;
    let mut n = 0;
    if z < lo - tol {
        while z < lo - tol {
            if n >= cap || z <= 0.0 {
                return None;
            }
            z = ctx.beta() * z;
            n += 1;
        }
    } else if z > hi + tol {
        let c = ctx.upper();
        while z > hi + tol {
            if n >= cap || z >= c {
                return None;
            }
            z = ctx.beta() * z - 1.0;
            n += 1;
        }
    }
    Some(n)
}

/// Entry depth cap: room for `64 (2m+3)` doublings of the distance to the
/// steering interval, i.e. that many levels at `beta = 2` and proportionally
/// more as `beta` approaches 1, where honest entry words grow like
/// `1/log beta`.
pub fn entry_cap(ctx: &BetaContext, m: u32) -> usize {
    let doublings = 64.0 * (2 * m + 3) as f64;
    (doublings / ctx.beta_f64().log2()).ceil() as usize
}

/// The lexicographically smallest word of minimal length that maps `x` into
/// `[lo, hi]` while keeping every orbit value admissible, with its image.
pub fn entry_word(ctx: &BetaContext, x: Real, lo: Real, hi: Real, cap: usize) -> Result<(BinaryWord, Real)> {
    ctx.check_point(x)?;
    let unreachable = || Error::Unreachable {
        x: format_real(x, FULL_DIGITS),
        cap,
    };
    let j = steps_to_reach(ctx, x, lo, hi, cap).ok_or_else(unreachable)?;
    let mut word = BinaryWord::with_capacity(j);
    let mut y = x;
    // steps_to_reach is exact, so the first child that keeps the remaining
    // budget feasible always completes.
    for depth in 0..j {
        let mut chosen = None;
        for bit in [false, true] {
            let child = ctx.beta() * y - if bit { 1.0 } else { 0.0 };
            if !ctx.in_admissible(child) {
                continue;
            }
            if let Some(h) = steps_to_reach(ctx, child, lo, hi, cap) {
                if depth + 1 + h <= j {
                    chosen = Some((bit, child));
                    break;
                }
            }
        }
        let (bit, child) = chosen.ok_or_else(unreachable)?;
        word.push(bit);
        y = child;
    }
    Ok((word, y))
}
