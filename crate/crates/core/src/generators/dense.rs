//! Blocks of `2m+1` digits with `2^(2m)` choices each.
//!
//! From `y` in `[pivot, hi]` every block with at least `m+1` ones returns to
//! `I_m`; from `y` in `[lo, pivot)` every block with at least `m+1` zeros
//! does. The extremal cases are `0^m 1^(m+1)` from `hi` and `1^m 0^(m+1)`
//! from `lo`, whose images meet the endpoints exactly when
//! `P1_m(beta) = 0`.

use super::interval::{entry_cap, entry_word, DenseInterval};
use crate::error::{Error, Result};
use crate::numeric::{format_real, BetaContext, Real, FULL_DIGITS};
use crate::word::{words_with_min_ones, words_with_min_zeros, BinaryWord};

/// The two extension families for one `m`, each in lexicographic order.
#[derive(Debug, Clone)]
pub struct DenseBlocks {
    pub ones_heavy: Vec<BinaryWord>,
    pub zeros_heavy: Vec<BinaryWord>,
}

impl DenseBlocks {
    pub fn new(m: u32) -> Self {
        let len = 2 * m as usize + 1;
        let need = m as usize + 1;
        DenseBlocks {
            ones_heavy: words_with_min_ones(len, need),
            zeros_heavy: words_with_min_zeros(len, need),
        }
    }

    /// Extensions applicable at `orbit`; the pivot itself goes to the
    /// ones-heavy side.
    pub fn for_orbit(&self, interval: &DenseInterval, orbit: Real) -> &[BinaryWord] {
        if orbit >= interval.pivot {
            &self.ones_heavy
        } else {
            &self.zeros_heavy
        }
    }
}

/// Minimal entry word into `I_m` and the image of `x` under it.
pub fn dense_entry_word(ctx: &BetaContext, interval: &DenseInterval, x: Real) -> Result<(BinaryWord, Real)> {
    entry_word(ctx, x, interval.lo, interval.hi, entry_cap(ctx, interval.m))
}

/// All `2^(2m)` one-block extensions of `prefix` (whose image is `orbit`),
/// each with its image, which must lie in `I_m`.
pub fn extend_dense_block(
    ctx: &BetaContext,
    interval: &DenseInterval,
    blocks: &DenseBlocks,
    prefix: &BinaryWord,
    orbit: Real,
) -> Result<Vec<(BinaryWord, Real)>> {
    let exts = blocks.for_orbit(interval, orbit);
    let mut out = Vec::with_capacity(exts.len());
    for ext in exts {
        let value = ctx.apply_word(ext, orbit);
        let word = prefix.concat(ext);
        if !interval.contains(ctx, value) {
            return Err(Error::ContainmentViolation {
                word: word.to_string(),
                value: format_real(value, FULL_DIGITS),
                lo: format_real(interval.lo, FULL_DIGITS),
                hi: format_real(interval.hi, FULL_DIGITS),
            });
        }
        out.push((word, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{omega, powi, Family, PolynomialSpec, TIGHT_ROOT_TOL};

    #[test]
    fn block_families_have_the_right_size() {
        for m in 1..=4 {
            let b = DenseBlocks::new(m);
            assert_eq!(b.ones_heavy.len(), 1 << (2 * m));
            assert_eq!(b.zeros_heavy.len(), 1 << (2 * m));
        }
        let names: Vec<String> = DenseBlocks::new(1).ones_heavy.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["011", "101", "110", "111"]);
    }

    #[test]
    fn pivot_uses_ones_heavy_blocks() {
        let ctx = BetaContext::from_f64(1.05).unwrap();
        let iv = DenseInterval::new(&ctx, 1).unwrap();
        let b = DenseBlocks::new(1);
        assert_eq!(b.for_orbit(&iv, iv.pivot), &b.ones_heavy[..]);
    }

    #[test]
    fn extremal_block_meets_the_bound_at_the_threshold() {
        for m in 1..=3u32 {
            let w = omega(m, TIGHT_ROOT_TOL).unwrap();
            let ctx = BetaContext::new(w).unwrap();
            let iv = DenseInterval::new(&ctx, m).unwrap();
            let ext = BinaryWord::zeros(m as usize).concat(&BinaryWord::ones(m as usize + 1));
            let image = ctx.apply_word(&ext, iv.hi);
            let d = w * w - 1.0;
            let bound = (powi(w, 4 * m + 3) - powi(w, m + 2) - powi(w, m + 1) + w + 1.0) / d;
            assert!((image - bound).abs() < 1e-24, "m = {m}");
            // equality with hi is the first threshold polynomial vanishing
            let p1 = PolynomialSpec::new(Family::P1, m).eval(w);
            assert!(((bound - iv.hi) - p1 / d).abs() < 1e-24);
            assert!((image - iv.hi).abs() < 1e-20);
        }
    }

    #[test]
    fn every_block_returns_for_valid_bases() {
        for (b, m) in [(1.07, 1u32), (1.028, 2), (1.0149, 3), (1.0001, 2)] {
            let ctx = BetaContext::from_f64(b).unwrap();
            let iv = DenseInterval::new(&ctx, m).unwrap();
            let blocks = DenseBlocks::new(m);
            for i in 0..=50 {
                let y = iv.lo + (iv.hi - iv.lo) * (i as f64 / 50.0);
                let out = extend_dense_block(&ctx, &iv, &blocks, &BinaryWord::new(), y).unwrap();
                assert_eq!(out.len(), 1 << (2 * m));
            }
        }
    }

    #[test]
    fn violation_above_the_threshold() {
        let ctx = BetaContext::from_f64(1.2).unwrap();
        let iv = DenseInterval::new_unchecked(&ctx, 1);
        let blocks = DenseBlocks::new(1);
        let err = extend_dense_block(&ctx, &iv, &blocks, &BinaryWord::new(), iv.hi).unwrap_err();
        assert!(err.is_invariant_violation());
        assert!(matches!(err, Error::ContainmentViolation { .. }));
    }
}
