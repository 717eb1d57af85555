//! Closed forms for runs of a single map, and the extremal blocks among
//! words with a majority digit, each checked against direct iteration.
//!
//! Every checker returns `Err` with a description of the first disagreement.
//! Tolerances are relative to the largest intermediate value, in units of
//! the double-double working precision.

use crate::numeric::{powi, real, BetaContext, Real};
use crate::word::BinaryWord;

/// Relative tolerance for closed forms evaluated in double-double.
pub const CLOSED_FORM_TOL: f64 = 1e-26;

/// Relative tolerance for comparisons between two affine images.
pub const IMAGE_TOL: f64 = 1e-28;

pub type Check = std::result::Result<(), String>;

fn close(a: Real, b: Real, scale: Real) -> bool {
    (a - b).abs() <= scale.abs().max(real(1.0)) * CLOSED_FORM_TOL
}

/// `T_1^k(beta^n/(beta^2-1)) = (beta^(n+k) - beta^(k+1) - beta^k + beta + 1)/(beta^2-1)`.
pub fn ones_from_scaled_core(ctx: &BetaContext, n: u32, k: u32) -> Check {
    let beta = ctx.beta();
    let d = beta * beta - 1.0;
    let start = powi(beta, n) / d;
    let iterated = ctx.iterate_word(&BinaryWord::ones(k as usize), start);
    let closed = (powi(beta, n + k) - powi(beta, k + 1) - powi(beta, k) + beta + 1.0) / d;
    if close(iterated, closed, powi(beta, n + k) / d) {
        Ok(())
    } else {
        Err(format!("n = {n}, k = {k}: iterated {iterated}, closed form {closed}"))
    }
}

/// Among words of length `2k+1` with at least `k+1` zeros, `1^k 0^(k+1)`
/// maps `x` lowest; among those with at least `k+1` ones, `0^k 1^(k+1)` maps
/// it highest. Exhaustive over all `2^(2k+1)` words.
pub fn extremal_blocks(ctx: &BetaContext, x: Real, k: usize) -> Check {
    let len = 2 * k + 1;
    let low = BinaryWord::ones(k).concat(&BinaryWord::zeros(k + 1));
    let high = BinaryWord::zeros(k).concat(&BinaryWord::ones(k + 1));
    let low_value = ctx.apply_word(&low, x);
    let high_value = ctx.apply_word(&high, x);
    let slack = powi(ctx.beta(), len as u32) * ctx.upper() * IMAGE_TOL;
    for mask in 0..(1u64 << len) {
        let w = BinaryWord::from_u64(mask, len);
        let v = ctx.apply_word(&w, x);
        if w.count_zeros() > k && v < low_value - slack {
            return Err(format!("{w} maps {x} below {low}"));
        }
        if w.count_ones() > k && v > high_value + slack {
            return Err(format!("{w} maps {x} above {high}"));
        }
    }
    Ok(())
}

/// `T_1^m((beta^m - 1)/(beta^m (beta-1))) = 0` along an admissible orbit,
/// and `T_0^m(c/beta^m) = c`.
pub fn inverse_images_of_the_endpoints(ctx: &BetaContext, m: u32) -> Check {
    let beta = ctx.beta();
    let bm = powi(beta, m);
    let pre_zero = (bm - 1.0) / (bm * (beta - 1.0));
    let pre_top = (bm * (beta - 1.0)).recip();
    if !ctx.in_admissible(pre_zero) || !ctx.in_admissible(pre_top) {
        return Err(format!("m = {m}: preimages {pre_zero}, {pre_top} not admissible"));
    }
    let z = ctx.iterate_word(&BinaryWord::ones(m as usize), pre_zero);
    if z.abs() > bm * ctx.upper() * IMAGE_TOL {
        return Err(format!("m = {m}: T_1^m lands at {z}, not 0"));
    }
    let top = ctx.iterate_word(&BinaryWord::zeros(m as usize), pre_top);
    if !close(top, ctx.upper(), bm * ctx.upper()) {
        return Err(format!("m = {m}: T_0^m lands at {top}, not {}", ctx.upper()));
    }
    let mut y = pre_zero;
    for step in 0..m {
        if !ctx.in_admissible(y) {
            return Err(format!("m = {m}: orbit leaves the interval at step {step} ({y})"));
        }
        y = beta * y - 1.0;
    }
    Ok(())
}
