//! The Bernoulli convolution `mu_beta`: the law of `sum a_n beta^(-n)` with
//! independent fair digits, supported on `[0, c]`, `c = 1/(beta-1)`.
//!
//! Two estimators, each the other's oracle:
//!
//! * recursion on `mu(E) = (mu(beta E) + mu(beta E - 1)) / 2`, which returns a
//!   rigorous bracket once unresolved leaves are scored `[0, 1]`;
//! * Monte Carlo over digit strings, where the unsampled tail only moves the
//!   sum inside `[0, beta^(-K) c]`, giving inner and outer counts.

use std::collections::HashMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{to_f64, BetaContext, Real};

/// Deepest recursion accepted by [`measure_interval`].
pub const MAX_RECURSION_DEPTH: usize = 48;

/// Memo keys round endpoints to this many bits.
const MEMO_KEY_BITS: i32 = 48;

/// Subtrees shallower than this are cheaper to recompute than to memoize.
const MEMO_MIN_REMAINING: usize = 8;

/// Samples per Monte Carlo shard; shard `i` uses ChaCha stream `i`.
pub const SHARD_SIZE: u64 = 1 << 16;

/// Extra levels the local-dimension recursion resolves past `k`.
pub const LOCAL_DIM_EXTRA_DEPTH: usize = 14;

/// Relative half-width above which a local-dimension point is unresolved.
pub const UNSTABLE_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Recursion,
    MonteCarlo,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursion" => Ok(Method::Recursion),
            "montecarlo" | "monte-carlo" | "mc" => Ok(Method::MonteCarlo),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub half_width: f64,
    pub depth: usize,
    pub method: Method,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

impl MeasureEstimate {
    pub fn lower(&self) -> f64 {
        self.value - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.value + self.half_width
    }

    /// Whether `self` and `other` differ by at most `factor` times their
    /// summed half-widths.
    pub fn agrees_with(&self, other: &MeasureEstimate, factor: f64) -> bool {
        (self.value - other.value).abs() <= factor * (self.half_width + other.half_width)
    }
}

/// Exact answers that need no estimation: disjoint from the support, or
/// covering all of it.
fn trivial_measure(ctx: &BetaContext, lo: Real, hi: Real) -> Option<f64> {
    if hi < 0.0 || lo > ctx.upper() || lo > hi {
        Some(0.0)
    } else if lo <= 0.0 && hi >= ctx.upper() {
        Some(1.0)
    } else {
        None
    }
}

struct Recursion<'a> {
    ctx: &'a BetaContext,
    memo: HashMap<(i64, i64, usize), (f64, f64)>,
}

impl Recursion<'_> {
    fn key(x: Real) -> i64 {
        (to_f64(x) * 2f64.powi(MEMO_KEY_BITS)).round() as i64
    }

    /// Bracket `[L, U]` for `mu([lo, hi])` after `remaining` levels.
    fn bracket(&mut self, lo: Real, hi: Real, remaining: usize) -> (f64, f64) {
        if let Some(v) = trivial_measure(self.ctx, lo, hi) {
            return (v, v);
        }
        if remaining == 0 {
            return (0.0, 1.0);
        }
        let key = (Self::key(lo), Self::key(hi), remaining);
        if remaining >= MEMO_MIN_REMAINING {
            if let Some(&v) = self.memo.get(&key) {
                return v;
            }
        }
        let b = self.ctx.beta();
        let (lo0, hi0) = (b * lo, b * hi);
        let (l0, u0) = self.bracket(lo0, hi0, remaining - 1);
        let (l1, u1) = self.bracket(lo0 - 1.0, hi0 - 1.0, remaining - 1);
        let v = (0.5 * (l0 + l1), 0.5 * (u0 + u1));
        if remaining >= MEMO_MIN_REMAINING {
            self.memo.insert(key, v);
        }
        v
    }
}

/// `mu_beta([lo, hi])` by recursion to `depth` levels. The midpoint of the
/// bracket is reported with its half-width; both are exact up to rounding.
pub fn measure_interval(ctx: &BetaContext, lo: Real, hi: Real, depth: usize) -> Result<MeasureEstimate> {
    if depth > MAX_RECURSION_DEPTH {
        return Err(Error::DepthExceeded {
            depth,
            limit: MAX_RECURSION_DEPTH,
        });
    }
    let mut rec = Recursion {
        ctx,
        memo: HashMap::new(),
    };
    let (l, u) = rec.bracket(lo, hi, depth);
    Ok(MeasureEstimate {
        lo: to_f64(lo),
        hi: to_f64(hi),
        value: 0.5 * (l + u),
        half_width: 0.5 * (u - l),
        depth,
        method: Method::Recursion,
        seed: None,
        samples: None,
    })
}

/// Partial sums for each byte of digits, one table per 8 digits.
fn chunk_tables(beta: f64, depth: usize) -> Vec<[f64; 256]> {
    let chunks = depth.div_ceil(8);
    let mut tables = Vec::with_capacity(chunks);
    for c in 0..chunks {
        let mut weights = [0.0f64; 8];
        for (i, w) in weights.iter_mut().enumerate() {
            let n = c * 8 + i + 1;
            if n <= depth {
                *w = beta.powi(-(n as i32));
            }
        }
        let mut table = [0.0f64; 256];
        for (byte, slot) in table.iter_mut().enumerate() {
            // bit 7 is the first digit of the chunk
            *slot = (0..8).filter(|i| byte >> (7 - i) & 1 == 1).map(|i| weights[i]).sum();
        }
        tables.push(table);
    }
    tables
}

/// `mu_beta([lo, hi])` from `samples` digit strings of length `depth`.
///
/// The value is the midpoint of the inner and outer frequencies; the
/// half-width adds half their gap to two standard errors.
pub fn measure_monte_carlo(
    ctx: &BetaContext,
    lo: Real,
    hi: Real,
    samples: u64,
    depth: usize,
    seed: u64,
) -> Result<MeasureEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if depth == 0 || depth > 64 {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo depth must be in 1..=64, got {depth}"
        )));
    }
    let estimate = |value: f64, half_width: f64| MeasureEstimate {
        lo: to_f64(lo),
        hi: to_f64(hi),
        value,
        half_width,
        depth,
        method: Method::MonteCarlo,
        seed: Some(seed),
        samples: Some(samples),
    };
    if let Some(v) = trivial_measure(ctx, lo, hi) {
        return Ok(estimate(v, 0.0));
    }
    let beta = ctx.beta_f64();
    let tables = chunk_tables(beta, depth);
    let tail = beta.powi(-(depth as i32)) / (beta - 1.0);
    let (lo, hi) = (to_f64(lo), to_f64(hi));
    let (mut inner, mut outer) = (0u64, 0u64);
    let shards = samples.div_ceil(SHARD_SIZE);
    for shard in 0..shards {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard);
        let n = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
        for _ in 0..n {
            let bits = rng.next_u64();
            let mut s = 0.0;
            for (c, table) in tables.iter().enumerate() {
                s += table[(bits >> (56 - 8 * c)) as usize & 0xff];
            }
            if s + tail >= lo && s <= hi {
                outer += 1;
                if s >= lo && s + tail <= hi {
                    inner += 1;
                }
            }
        }
    }
    let nf = samples as f64;
    let (pi, po) = (inner as f64 / nf, outer as f64 / nf);
    let p = 0.5 * (pi + po);
    let stat = 2.0 * (p * (1.0 - p)).max(1.0 / nf).sqrt() / nf.sqrt();
    Ok(estimate(p, 0.5 * (po - pi) + stat))
}

/// Ball measures at radii `beta^(-k)` and the resulting dimension ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDimEstimate {
    pub x: f64,
    pub k_values: Vec<usize>,
    pub radii: Vec<f64>,
    pub measures: Vec<MeasureEstimate>,
    /// `ln mu(B(x, r))`.
    pub log_measures: Vec<f64>,
    /// `ln mu(B(x, r)) / ln r`.
    pub ratios: Vec<f64>,
    /// Index of the first `k` in the tail window.
    pub window_start: usize,
    pub slope_lower: f64,
    pub slope_upper: f64,
}

/// How the ball measures are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalDimMethod {
    /// Recursion to depth `min(k + 14, 48)`.
    Recursion,
    MonteCarlo {
        samples: u64,
        seed: u64,
    },
}

/// Estimates the local dimension of `mu_beta` at `x` from radii
/// `beta^(-k)`, `k_min <= k <= k_max`, reporting the extreme ratios over the
/// top third of the range.
pub fn local_dimension(
    ctx: &BetaContext,
    x: Real,
    k_min: usize,
    k_max: usize,
    method: LocalDimMethod,
) -> Result<LocalDimEstimate> {
    ctx.check_point(x)?;
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k_min <= k_max, got {k_min}..{k_max}"
        )));
    }
    if x <= 0.0 || x >= ctx.upper() {
        return Err(Error::InvalidArgument("local dimension needs an interior point".into()));
    }
    let mut k_values = Vec::new();
    let mut radii = Vec::new();
    let mut measures = Vec::new();
    let mut log_measures = Vec::new();
    let mut ratios = Vec::new();
    for k in k_min..=k_max {
        let r = ctx.pow(k as u32).recip();
        let est = match method {
            LocalDimMethod::Recursion => {
                measure_interval(ctx, x - r, x + r, (k + LOCAL_DIM_EXTRA_DEPTH).min(MAX_RECURSION_DEPTH))?
            }
            LocalDimMethod::MonteCarlo { samples, seed } => {
                measure_monte_carlo(ctx, x - r, x + r, samples, MAX_RECURSION_DEPTH, seed)?
            }
        };
        let rf = to_f64(r);
        let lm = est.value.ln();
        k_values.push(k);
        radii.push(rf);
        log_measures.push(lm);
        ratios.push(lm / rf.ln());
        measures.push(est);
    }
    let n = k_values.len();
    let window_start = n - n.div_ceil(3);
    for (i, est) in measures.iter().enumerate().skip(window_start) {
        if est.value.is_nan() || est.value <= 0.0 || est.half_width > UNSTABLE_FRACTION * est.value {
            return Err(Error::Unstable {
                radius: format!("{:e}", radii[i]),
                value: est.value,
                half_width: est.half_width,
            });
        }
    }
    let window = &ratios[window_start..];
    let slope_upper = window.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let slope_lower = window.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
    Ok(LocalDimEstimate {
        x: to_f64(x),
        k_values,
        radii,
        measures,
        log_measures,
        ratios,
        window_start,
        slope_lower,
        slope_upper,
    })
}
