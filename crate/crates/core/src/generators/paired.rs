//! Blocks of `m+2` digits with two choices each.
//!
//! Outside the core `[p, beta p]` the orbit is pushed toward it by forced
//! `T_0` (left) or `T_1` (right) steps; from `lo` at most `m+1` are needed
//! when `beta <= lambda_m`. In the core the two maps give the two branches,
//! and a steering word fills the block back into `I`.

use super::interval::{entry_cap, entry_word, PairedInterval};
use crate::error::{Error, Result};
use crate::numeric::{format_real, BetaContext, Real, FULL_DIGITS};
use crate::word::BinaryWord;

/// Minimal entry word into `I` and the image of `x` under it.
pub fn paired_entry_word(ctx: &BetaContext, interval: &PairedInterval, x: Real) -> Result<(BinaryWord, Real)> {
    entry_word(ctx, x, interval.lo, interval.hi, entry_cap(ctx, interval.m))
}

/// Lexicographically smallest word of length `len` that keeps the orbit of
/// `y` admissible and ends in `I`.
fn steering_word(ctx: &BetaContext, interval: &PairedInterval, y: Real, len: usize) -> Option<(BinaryWord, Real)> {
    fn search(
        ctx: &BetaContext,
        interval: &PairedInterval,
        y: Real,
        left: usize,
        word: &mut BinaryWord,
    ) -> Option<Real> {
        if left == 0 {
            return interval.contains(ctx, y).then_some(y);
        }
        for bit in [false, true] {
            let child = ctx.beta() * y - if bit { 1.0 } else { 0.0 };
            if !ctx.in_admissible(child) {
                continue;
            }
            word.push(bit);
            if let Some(v) = search(ctx, interval, child, left - 1, word) {
                return Some(v);
            }
            word.pop();
        }
        None
    }
    let mut word = BinaryWord::with_capacity(len);
    search(ctx, interval, y, len, &mut word).map(|v| (word, v))
}

/// Result of one paired block: the forced run length and both extensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedBlock {
    /// Forced steps taken before branching.
    pub forced_steps: usize,
    /// `(word, image)` for the `T_0` branch, then the `T_1` branch.
    pub branches: [(BinaryWord, Real); 2],
}

/// The two one-block extensions of `prefix`, whose image is `orbit`.
pub fn extend_paired_block(
    ctx: &BetaContext,
    interval: &PairedInterval,
    prefix: &BinaryWord,
    orbit: Real,
) -> Result<PairedBlock> {
    let m = interval.m as usize;
    let limit = m + 1;
    let mut forced = BinaryWord::new();
    let mut y = orbit;
    let push_left = y < interval.core_lo;
    while !interval.in_core(ctx, y) {
        if forced.len() >= limit {
            return Err(Error::ForcedRunTooLong {
                steps: forced.len() + 1,
                limit,
            });
        }
        y = if push_left {
            ctx.beta() * y
        } else {
            ctx.beta() * y - 1.0
        };
        forced.push(!push_left);
    }
    let k = forced.len();
    let steer_len = m + 1 - k;
    let mut branches = Vec::with_capacity(2);
    for bit in [false, true] {
        let branched = ctx.beta() * y - if bit { 1.0 } else { 0.0 };
        let (steer, image) =
            steering_word(ctx, interval, branched, steer_len).ok_or_else(|| Error::NoSteeringWord {
                length: steer_len,
                value: format_real(branched, FULL_DIGITS),
            })?;
        let mut word = prefix.concat(&forced);
        word.push(bit);
        word.extend_from(&steer);
        branches.push((word, image));
    }
    let second = branches.pop().expect("two branches");
    let first = branches.pop().expect("two branches");
    Ok(PairedBlock {
        forced_steps: k,
        branches: [first, second],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{lambda, powi, TIGHT_ROOT_TOL};

    #[test]
    fn forced_run_from_lo_is_short() {
        // T_0^(m+1)(lo) >= p whenever beta <= lambda_m
        for m in 1..=6u32 {
            let l = lambda(m, TIGHT_ROOT_TOL).unwrap();
            let ctx = BetaContext::new(l).unwrap();
            let iv = PairedInterval::new(&ctx, m).unwrap();
            let pushed = powi(ctx.beta(), m + 1) * iv.lo;
            assert!(pushed >= iv.core_lo - ctx.tolerance(), "m = {m}");
            let block = extend_paired_block(&ctx, &iv, &BinaryWord::new(), iv.lo).unwrap();
            assert!(block.forced_steps <= m as usize + 1);
        }
    }

    #[test]
    fn blocks_have_length_m_plus_two_and_differ_at_the_branch() {
        for (b, m) in [(1.3, 1u32), (1.46, 2), (1.53, 3), (1.2, 2)] {
            let ctx = BetaContext::from_f64(b).unwrap();
            let iv = PairedInterval::new(&ctx, m).unwrap();
            for i in 0..=40 {
                let y = iv.lo + (iv.hi - iv.lo) * (i as f64 / 40.0);
                let block = extend_paired_block(&ctx, &iv, &BinaryWord::new(), y).unwrap();
                let [(w0, v0), (w1, v1)] = &block.branches;
                assert_eq!(w0.len(), m as usize + 2);
                assert_eq!(w1.len(), m as usize + 2);
                let k = block.forced_steps;
                assert_eq!(w0.prefix(k), w1.prefix(k));
                assert!(!w0.get(k) && w1.get(k));
                assert!(iv.contains(&ctx, *v0) && iv.contains(&ctx, *v1));
                assert!((ctx.apply_word(w0, y) - *v0).abs() < 1e-25);
            }
        }
    }

    #[test]
    fn core_points_branch_immediately() {
        let ctx = BetaContext::from_f64(1.4).unwrap();
        let iv = PairedInterval::new(&ctx, 2).unwrap();
        let block = extend_paired_block(&ctx, &iv, &BinaryWord::new(), ctx.core_lo()).unwrap();
        assert_eq!(block.forced_steps, 0);
        let mid = (ctx.core_lo() + ctx.core_hi()) / 2.0;
        assert_eq!(
            extend_paired_block(&ctx, &iv, &BinaryWord::new(), mid)
                .unwrap()
                .forced_steps,
            0
        );
    }

    #[test]
    fn forced_run_fails_above_the_threshold() {
        let ctx = BetaContext::from_f64(1.6).unwrap();
        let iv = PairedInterval::new_unchecked(&ctx, 1);
        let err = extend_paired_block(&ctx, &iv, &BinaryWord::new(), iv.lo).unwrap_err();
        assert!(matches!(err, Error::ForcedRunTooLong { limit: 2, .. }));
    }
}
