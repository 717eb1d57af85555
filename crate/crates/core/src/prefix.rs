//! Prefixes of a point: enumeration, counting and growth rates.
//!
//! A word `a` of length `k` is a `k`-prefix of `x` iff every orbit value
//! `a_1(x), (a_1 a_2)(x), ..., a(x)` lies in `[0, 1/(beta-1)]`, and iff the
//! digit sum satisfies `x - beta^-k/(beta-1) <= sum eps_n beta^-n <= x`.
//! The first characterization drives the branching search, the second the
//! brute-force oracle; the two share no code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_real, parse_real, powi, real, BetaContext, Real, FULL_DIGITS};
use crate::word::BinaryWord;

/// Frontier size above which breadth-first enumeration aborts.
pub const DEFAULT_SURVIVOR_CAP: usize = 10_000_000;
/// Largest word length the exhaustive oracle accepts.
pub const DEFAULT_DIRECT_CAP: usize = 24;
/// Orbit nodes a single depth-first count may visit.
pub const DEFAULT_WORK_BUDGET: u64 = 1 << 34;
/// Longest word length whose count is tracked in a `u64`.
pub const MAX_COUNT_DEPTH: usize = 62;
/// Orbit values are recomputed from the closed form at multiples of this depth.
pub const REANCHOR_INTERVAL: usize = 16;

/// All `k`-prefixes of `x`, in lexicographic order, with their orbit values.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixSet {
    x: Real,
    k: usize,
    words: Vec<BinaryWord>,
    orbit_values: Vec<Real>,
}

/// One line of the records serialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixRecord {
    pub word: BinaryWord,
    pub orbit_value: String,
}

impl PrefixSet {
    fn from_sorted(x: Real, k: usize, pairs: Vec<(BinaryWord, Real)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        let (words, orbit_values) = pairs.into_iter().unzip();
        PrefixSet {
            x,
            k,
            words,
            orbit_values,
        }
    }

    pub fn x(&self) -> Real {
        self.x
    }

    /// Common length of the stored words.
    pub fn k(&self) -> usize {
        self.k
    }

    /// `N_k(x, beta)`.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[BinaryWord] {
        &self.words
    }

    pub fn orbit_values(&self) -> &[Real] {
        &self.orbit_values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BinaryWord, Real)> + '_ {
        self.words.iter().zip(self.orbit_values.iter().copied())
    }

    pub fn contains(&self, word: &BinaryWord) -> bool {
        self.words.binary_search(word).is_ok()
    }

    pub fn orbit_value(&self, word: &BinaryWord) -> Option<Real> {
        self.words.binary_search(word).ok().map(|i| self.orbit_values[i])
    }

    /// Words present in exactly one of the two sets.
    pub fn symmetric_difference(&self, other: &PrefixSet) -> Vec<BinaryWord> {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.words.len() || j < other.words.len() {
            match (self.words.get(i), other.words.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    out.push(a.clone());
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        out
    }

    /// One word per line, then `count=<N>`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.words.len() * (self.k + 1) + 16);
        for w in &self.words {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out.push_str(&format!("count={}\n", self.words.len()));
        out
    }

    pub fn records(&self) -> Vec<PrefixRecord> {
        self.iter()
            .map(|(w, v)| PrefixRecord {
                word: w.clone(),
                orbit_value: format_real(v, FULL_DIGITS),
            })
            .collect()
    }

    /// Line-delimited JSON, one [`PrefixRecord`] per line.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for r in self.records() {
            out.push_str(&serde_json::to_string(&r).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Parses the text form written by [`PrefixSet::to_text`], checking the trailer.
pub fn parse_prefix_text(text: &str) -> Result<Vec<BinaryWord>> {
    let bad = |reason: String| Error::Parse {
        input: text.lines().last().unwrap_or("").to_string(),
        reason,
    };
    let mut words = Vec::new();
    let mut trailer = None;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if trailer.is_some() {
            return Err(bad("content after count trailer".into()));
        }
        if let Some(n) = line.strip_prefix("count=") {
            trailer = Some(n.parse::<usize>().map_err(|e| bad(e.to_string()))?);
        } else {
            words.push(line.parse::<BinaryWord>()?);
        }
    }
    match trailer {
        Some(n) if n == words.len() => Ok(words),
        Some(n) => Err(bad(format!("trailer says {n} words, found {}", words.len()))),
        None => Err(bad("missing count trailer".into())),
    }
}

/// Parses line-delimited [`PrefixRecord`]s.
pub fn parse_prefix_records(text: &str) -> Result<Vec<(BinaryWord, Real)>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let r: PrefixRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
                input: line.to_string(),
                reason: e.to_string(),
            })?;
            Ok((r.word, parse_real(&r.orbit_value)?))
        })
        .collect()
}

fn check_k(k: usize, cap: usize, what: &'static str) -> Result<()> {
    if k > cap {
        return Err(Error::CapExceeded {
            what,
            value: k as u64,
            cap: cap as u64,
        });
    }
    Ok(())
}

/// Breadth-first expansion of the orbit tree with the default survivor cap.
pub fn enumerate_prefixes_branching(ctx: &BetaContext, x: Real, k: usize) -> Result<PrefixSet> {
    enumerate_prefixes_branching_with_cap(ctx, x, k, DEFAULT_SURVIVOR_CAP)
}

/// Breadth-first expansion: a child is kept iff its parent was kept and its
/// orbit value lies in the tolerance-closed admissible interval.
pub fn enumerate_prefixes_branching_with_cap(
    ctx: &BetaContext,
    x: Real,
    k: usize,
    survivor_cap: usize,
) -> Result<PrefixSet> {
    ctx.check_point(x)?;
    let mut frontier: Vec<(BinaryWord, Real)> = vec![(BinaryWord::new(), x)];
    for depth in 1..=k {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (word, y) in &frontier {
            for bit in [false, true] {
                let child = word.with_bit(bit);
                let mut value = ctx.beta() * *y - if bit { 1.0 } else { 0.0 };
                if depth % REANCHOR_INTERVAL == 0 {
                    value = ctx.apply_word(&child, x);
                }
                if ctx.in_admissible(value) {
                    next.push((child, value));
                }
            }
        }
        if next.len() > survivor_cap {
            return Err(Error::MemoryGuard {
                depth,
                survivors: next.len(),
                cap: survivor_cap,
            });
        }
        frontier = next;
    }
    Ok(PrefixSet::from_sorted(x, k, frontier))
}

/// Exhaustive oracle with the default length cap.
pub fn enumerate_prefixes_direct(ctx: &BetaContext, x: Real, k: usize) -> Result<PrefixSet> {
    enumerate_prefixes_direct_with_cap(ctx, x, k, DEFAULT_DIRECT_CAP)
}

/// Tests all `2^k` digit words against
/// `x - beta^-k (c + tol) <= sum eps_n beta^-n <= x + beta^-k tol`.
///
/// The sum is split into a high half and a low half, each tabulated once, so
/// every candidate costs one addition.
pub fn enumerate_prefixes_direct_with_cap(ctx: &BetaContext, x: Real, k: usize, cap: usize) -> Result<PrefixSet> {
    check_k(k, cap.min(32), "direct enumeration length")?;
    ctx.check_point(x)?;
    let inv = real(1.0) / ctx.beta();
    let mut weights = Vec::with_capacity(k);
    let mut w = real(1.0);
    for _ in 0..k {
        w *= inv;
        weights.push(w);
    }
    let scale = if k == 0 { real(1.0) } else { weights[k - 1] };
    let lo = x - scale * (ctx.upper() + ctx.tolerance());
    let hi = x + scale * ctx.tolerance();

    let high_len = k / 2;
    let low_len = k - high_len;
    let table = |offset: usize, len: usize| -> Vec<Real> {
        (0u64..1u64 << len)
            .map(|v| {
                let mut s = real(0.0);
                for i in 0..len {
                    if v >> (len - 1 - i) & 1 == 1 {
                        s += weights[offset + i];
                    }
                }
                s
            })
            .collect()
    };
    let high = table(0, high_len);
    let low = table(high_len, low_len);
    let low_max = *low.last().expect("nonempty table");

    let beta_k = powi(ctx.beta(), k as u32);
    let mut pairs = Vec::new();
    for (i, &a) in high.iter().enumerate() {
        if a > hi || a + low_max < lo {
            continue;
        }
        for (j, &b) in low.iter().enumerate() {
            let s = a + b;
            if s >= lo && s <= hi {
                let bits = ((i as u64) << low_len) | j as u64;
                pairs.push((BinaryWord::from_u64(bits, k), beta_k * (x - s)));
            }
        }
    }
    Ok(PrefixSet::from_sorted(x, k, pairs))
}

/// Whether every orbit value along `word` stays admissible.
pub fn is_prefix(ctx: &BetaContext, word: &BinaryWord, x: Real) -> bool {
    let mut y = x;
    let mut partial = BinaryWord::with_capacity(word.len());
    for (i, d) in word.digits().enumerate() {
        partial.push_digit(d);
        y = if (i + 1) % REANCHOR_INTERVAL == 0 {
            ctx.apply_word(&partial, x)
        } else {
            ctx.apply_map(d, y)
        };
        if !ctx.in_admissible(y) {
            return false;
        }
    }
    ctx.in_admissible(x)
}

struct LevelCounter<'a> {
    ctx: &'a BetaContext,
    x: Real,
    k_max: usize,
    beta_pows: Vec<Real>,
    counts: Vec<u64>,
    visits: u64,
    budget: u64,
}

impl LevelCounter<'_> {
    /// `beta^len x - sum eps_n beta^(len-n)` for the low `len` bits of `bits`.
    fn closed_form(&self, bits: u64, len: usize) -> Real {
        let mut s = real(0.0);
        for n in 0..len {
            if bits >> n & 1 == 1 {
                s += self.beta_pows[n];
            }
        }
        self.beta_pows[len] * self.x - s
    }

    fn visit(&mut self, depth: usize, bits: u64, y: Real) -> Result<()> {
        self.visits += 1;
        if self.visits > self.budget {
            return Err(Error::WorkBudget { budget: self.budget });
        }
        self.counts[depth] += 1;
        let rest = self.k_max - depth;
        if rest == 0 {
            return Ok(());
        }
        // Every word of length `rest` keeps the orbit admissible iff the
        // all-zeros and all-ones continuations do.
        let c = self.ctx.upper();
        let tol = self.ctx.tolerance();
        let br = self.beta_pows[rest];
        if br * y <= c + tol && c - br * (c - y) >= -tol {
            for i in 1..=rest {
                self.counts[depth + i] += 1u64 << i;
            }
            return Ok(());
        }
        let beta = self.ctx.beta();
        for bit in 0..2u64 {
            let child_bits = bits << 1 | bit;
            let child = if (depth + 1).is_multiple_of(REANCHOR_INTERVAL) {
                self.closed_form(child_bits, depth + 1)
            } else {
                beta * y - bit as f64
            };
            if self.ctx.in_admissible(child) {
                self.visit(depth + 1, child_bits, child)?;
            }
        }
        Ok(())
    }
}

/// `N_0, ..., N_{k_max}` from one depth-first traversal with the default budget.
pub fn count_levels(ctx: &BetaContext, x: Real, k_max: usize) -> Result<Vec<u64>> {
    count_levels_with_budget(ctx, x, k_max, DEFAULT_WORK_BUDGET)
}

/// Depth-first counting. Subtrees that survive in full are added in closed
/// form, so the cost tracks the number of orbit nodes near the boundary of
/// the admissible interval rather than `N_k` itself.
pub fn count_levels_with_budget(ctx: &BetaContext, x: Real, k_max: usize, budget: u64) -> Result<Vec<u64>> {
    check_k(k_max, MAX_COUNT_DEPTH, "prefix length")?;
    ctx.check_point(x)?;
    let mut beta_pows = Vec::with_capacity(k_max + 1);
    let mut p = real(1.0);
    for _ in 0..=k_max {
        beta_pows.push(p);
        p *= ctx.beta();
    }
    let mut counter = LevelCounter {
        ctx,
        x,
        k_max,
        beta_pows,
        counts: vec![0; k_max + 1],
        visits: 0,
        budget,
    };
    counter.visit(0, 0, x)?;
    Ok(counter.counts)
}

/// `N_k(x, beta)`.
pub fn count_prefixes(ctx: &BetaContext, x: Real, k: usize) -> Result<u64> {
    Ok(count_levels(ctx, x, k)?[k])
}

/// `log2 N_k / k` over a range of `k`, with the extremes over the tail window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub beta: String,
    pub x: String,
    pub k_values: Vec<usize>,
    pub counts: Vec<u64>,
    pub log2_counts: Vec<f64>,
    /// First `k` of the window `[ceil(k_max/2), k_max]`.
    pub window_start: usize,
    pub lower_slope: f64,
    pub upper_slope: f64,
}

impl GrowthEstimate {
    pub fn slopes(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.k_values
            .iter()
            .zip(&self.log2_counts)
            .map(|(&k, &l)| (k, l / k as f64))
    }
}

/// Smallest `k_min` accepted by [`growth_estimate`].
pub const MIN_GROWTH_K: usize = 8;

pub fn growth_estimate(ctx: &BetaContext, x: Real, k_min: usize, k_max: usize) -> Result<GrowthEstimate> {
    if k_min < MIN_GROWTH_K || k_max < k_min {
        return Err(Error::InvalidArgument(format!(
            "growth range needs {MIN_GROWTH_K} <= k_min <= k_max, got {k_min}..{k_max}"
        )));
    }
    let levels = count_levels(ctx, x, k_max)?;
    let k_values: Vec<usize> = (k_min..=k_max).collect();
    let counts: Vec<u64> = k_values.iter().map(|&k| levels[k]).collect();
    let log2_counts: Vec<f64> = counts.iter().map(|&n| (n as f64).log2()).collect();
    let window_start = k_max.div_ceil(2).max(k_min);
    let (mut lower, mut upper) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&k, &l) in k_values.iter().zip(&log2_counts) {
        if k >= window_start {
            let s = l / k as f64;
            lower = lower.min(s);
            upper = upper.max(s);
        }
    }
    Ok(GrowthEstimate {
        beta: ctx.beta_string(),
        x: format_real(x, FULL_DIGITS),
        k_values,
        counts,
        log2_counts,
        window_start,
        lower_slope: lower,
        upper_slope: upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(b: f64) -> BetaContext {
        BetaContext::from_f64(b).unwrap()
    }

    #[test]
    fn endpoints_have_a_single_prefix() {
        for b in [1.05, 1.5, 1.7, 1.95] {
            let c = ctx(b);
            let zero = enumerate_prefixes_branching(&c, real(0.0), 7).unwrap();
            assert_eq!(zero.words(), &[BinaryWord::zeros(7)]);
            let top = enumerate_prefixes_branching(&c, c.upper(), 7).unwrap();
            assert_eq!(top.words(), &[BinaryWord::ones(7)]);
            assert_eq!(count_prefixes(&c, real(0.0), 40).unwrap(), 1);
            assert_eq!(count_prefixes(&c, c.upper(), 40).unwrap(), 1);
        }
        let direct = enumerate_prefixes_direct(&ctx(1.7), real(0.0), 12).unwrap();
        assert_eq!(direct.words(), &[BinaryWord::zeros(12)]);
    }

    #[test]
    fn pinned_counts() {
        // Regression values from the exhaustive oracle.
        let c = ctx(1.5);
        let n = enumerate_prefixes_direct(&c, real(1.0), 10).unwrap().len();
        assert_eq!(n, PINNED_1_5_AT_1_K10);
        assert_eq!(count_prefixes(&c, real(1.0), 10).unwrap() as usize, n);
        let d = enumerate_prefixes_direct(&ctx(1.9), real(0.5), 12).unwrap().len();
        assert_eq!(d, PINNED_1_9_AT_HALF_K12);
    }

    // Both agree with an exact rational evaluation of the digit-sum inequality.
    const PINNED_1_5_AT_1_K10: usize = 28;
    const PINNED_1_9_AT_HALF_K12: usize = 3;

    #[test]
    fn oracle_rejects_long_words() {
        assert!(matches!(
            enumerate_prefixes_direct(&ctx(1.5), real(1.0), 25),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn point_outside_interval_is_rejected() {
        let c = ctx(1.5);
        assert!(matches!(
            enumerate_prefixes_branching(&c, real(2.5), 3),
            Err(Error::InvalidPoint { .. })
        ));
        assert!(count_prefixes(&c, real(-0.1), 3).is_err());
    }

    #[test]
    fn survivor_cap_aborts() {
        let c = ctx(1.01);
        let err = enumerate_prefixes_branching_with_cap(&c, real(50.0), 12, 100).unwrap_err();
        assert!(matches!(err, Error::MemoryGuard { cap: 100, .. }));
    }

    #[test]
    fn work_budget_aborts() {
        let c = ctx(1.6);
        let err = count_levels_with_budget(&c, real(0.8), 40, 1000).unwrap_err();
        assert_eq!(err, Error::WorkBudget { budget: 1000 });
    }

    #[test]
    fn text_and_records_round_trip() {
        let c = ctx(1.6);
        let set = enumerate_prefixes_branching(&c, real(0.9), 9).unwrap();
        let text = set.to_text();
        assert!(text.ends_with(&format!("count={}\n", set.len())));
        assert_eq!(parse_prefix_text(&text).unwrap(), set.words());
        let recs = parse_prefix_records(&set.to_records()).unwrap();
        assert_eq!(recs.len(), set.len());
        for ((w, v), (w2, v2)) in recs.iter().zip(set.iter()) {
            assert_eq!(w, w2);
            assert!((*v - v2).abs() < 1e-30);
        }
        assert!(parse_prefix_text("01\n10\ncount=3\n").is_err());
        assert!(parse_prefix_text("01\n").is_err());
    }

    #[test]
    fn growth_window_and_validation() {
        let c = ctx(1.3);
        let g = growth_estimate(&c, real(1.5), 8, 20).unwrap();
        assert_eq!(g.window_start, 10);
        assert_eq!(g.k_values.len(), 13);
        assert!(0.0 <= g.lower_slope && g.lower_slope <= g.upper_slope && g.upper_slope <= 1.0);
        assert!(growth_estimate(&c, real(1.5), 4, 20).is_err());
        let zero = growth_estimate(&c, real(0.0), 8, 20).unwrap();
        assert_eq!((zero.lower_slope, zero.upper_slope), (0.0, 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn branching_matches_oracle(b in 1.01f64..1.99, frac in 0.0f64..1.0, k in 0usize..=14) {
            let c = ctx(b);
            let x = c.upper() * frac;
            let branching = enumerate_prefixes_branching(&c, x, k).unwrap();
            let direct = enumerate_prefixes_direct(&c, x, k).unwrap();
            prop_assert!(branching.symmetric_difference(&direct).is_empty());
            prop_assert_eq!(count_prefixes(&c, x, k).unwrap() as usize, branching.len());
        }

        #[test]
        fn counts_at_most_double(b in 1.01f64..1.99, frac in 0.0f64..1.0) {
            let c = ctx(b);
            let levels = count_levels(&c, c.upper() * frac, 24).unwrap();
            prop_assert_eq!(levels[0], 1);
            for w in levels.windows(2) {
                prop_assert!(w[0] <= w[1] && w[1] <= 2 * w[0]);
            }
        }

        #[test]
        fn reflection_complements_words(b in 1.01f64..1.99, frac in 0.0f64..1.0, k in 1usize..=12) {
            let c = ctx(b);
            let x = c.upper() * frac;
            let a = enumerate_prefixes_branching(&c, x, k).unwrap();
            let r = enumerate_prefixes_branching(&c, c.reflect(x), k).unwrap();
            let mut mirrored: Vec<BinaryWord> = a.words().iter().map(BinaryWord::complement).collect();
            mirrored.sort();
            prop_assert_eq!(mirrored, r.words().to_vec());
        }

        #[test]
        fn stored_orbits_are_admissible(b in 1.01f64..1.99, frac in 0.0f64..1.0, k in 0usize..=12) {
            let c = ctx(b);
            let x = c.upper() * frac;
            let set = enumerate_prefixes_branching(&c, x, k).unwrap();
            for (w, v) in set.iter() {
                prop_assert!(c.in_admissible(v));
                prop_assert!(is_prefix(&c, w, x));
            }
        }
    }
}
