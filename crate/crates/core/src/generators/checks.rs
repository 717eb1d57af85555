//! Post-hoc verification of a generator run.
//!
//! All checks work on the sorted final stage. With `lcp[i]` the common
//! prefix length of neighbours `i-1` and `i`, the number of distinct
//! `k`-prefixes is `1 + #{i : lcp[i] < k}`, and the `l`-prefix classes are
//! the runs between indices with `lcp[i] < l`.

use serde::{Deserialize, Serialize};

use super::{GeneratorRun, Stage};
use crate::error::Result;
use crate::numeric::{real, BetaContext};
use crate::prefix::{enumerate_prefixes_branching, is_prefix};
use crate::word::BinaryWord;

/// Length after the entry word up to which soundness is also checked
/// against full enumeration.
pub const SUBSET_CHECK_MAX_LEN: usize = 20;

/// Relative slack for comparing integer counts with real powers.
const POWER_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunChecks {
    /// Stage `s` holds exactly `b^s` distinct words of length `j + sL`.
    pub count_law: bool,
    /// Every stage word maps `x` back into the steering interval.
    pub containment: bool,
    /// Every stage word has exactly `b^(s-s')` extensions at stage `s`.
    pub bridge: bool,
    /// Distinct-prefix counts never decrease with `k`.
    pub monotone: bool,
    /// `count(k) >= b^((k-j)/L - 1)` for `j <= k <= final`.
    pub lower_growth: bool,
    /// At most `b^((k-l)/L + 2)` distinct `k`-prefixes share an `l`-prefix.
    pub local_cap: bool,
    /// Every final word is a prefix of `x`.
    pub soundness: bool,
    /// Final words form a subset of the enumerated prefixes; `None` when the
    /// words extend the entry word by more than [`SUBSET_CHECK_MAX_LEN`].
    pub enumeration_subset: Option<bool>,
    /// Distinct `k`-prefix counts for `k = 0..=final`.
    pub prefix_counts: Vec<u64>,
}

impl RunChecks {
    pub fn all_pass(&self) -> bool {
        self.count_law
            && self.containment
            && self.bridge
            && self.monotone
            && self.lower_growth
            && self.local_cap
            && self.soundness
            && self.enumeration_subset.unwrap_or(true)
    }

    /// Names of failed checks, in declaration order.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (ok, name) in [
            (self.count_law, "count_law"),
            (self.containment, "containment"),
            (self.bridge, "bridge"),
            (self.monotone, "monotone"),
            (self.lower_growth, "lower_growth"),
            (self.local_cap, "local_cap"),
            (self.soundness, "soundness"),
            (self.enumeration_subset.unwrap_or(true), "enumeration_subset"),
        ] {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

/// `lcp[0] = 0`, `lcp[i]` = common prefix of `words[i-1]` and `words[i]`.
fn lcp_array(words: &[BinaryWord]) -> Vec<usize> {
    let mut out = Vec::with_capacity(words.len());
    if !words.is_empty() {
        out.push(0);
    }
    out.extend(words.windows(2).map(|w| w[0].lcp(&w[1])));
    out
}

fn distinct_prefix_counts(lcp: &[usize], len: usize) -> Vec<u64> {
    if lcp.is_empty() {
        return vec![0; len + 1];
    }
    // hist[v] = number of neighbour pairs with lcp exactly v
    let mut hist = vec![0u64; len + 1];
    for &v in &lcp[1..] {
        hist[v.min(len)] += 1;
    }
    let mut counts = Vec::with_capacity(len + 1);
    let mut below = 0u64;
    for &h in &hist[..=len] {
        counts.push(1 + below);
        below += h;
    }
    counts
}

/// Largest number of distinct `k`-prefixes inside one `l`-prefix class.
fn max_local_count(lcp: &[usize], l: usize, k: usize) -> u64 {
    let mut best = 0u64;
    let mut current = 0u64;
    for (i, &v) in lcp.iter().enumerate() {
        if i == 0 || v < l {
            best = best.max(current);
            current = 1;
        } else if v < k {
            current += 1;
        }
    }
    best.max(current)
}

fn stage_is_sorted_and_distinct(stage: &Stage) -> bool {
    stage.words.windows(2).all(|w| w[0] < w[1])
}

/// Runs every check on `run`.
pub fn check_run(ctx: &BetaContext, run: &GeneratorRun) -> Result<RunChecks> {
    let b = run.branching();
    let bf = b as f64;
    let block = run.block_length();
    let j = run.entry_steps();
    let last = run.final_stage();
    let final_len = last.word_length();

    let count_law = run.stages.iter().enumerate().all(|(s, st)| {
        st.len() as u64 == b.pow(s as u32)
            && st.words.iter().all(|w| w.len() == j + s * block)
            && stage_is_sorted_and_distinct(st)
    });

    let containment = run.stages.iter().all(|st| {
        st.words
            .iter()
            .all(|w| run.steering.contains(ctx, ctx.apply_word(w, run.x)))
    });

    let s_max = run.num_blocks();
    let bridge = (0..s_max).all(|sp| {
        let expect = b.pow((s_max - sp) as u32) as usize;
        run.stages[sp].words.iter().all(|w| {
            let start = last.words.partition_point(|u| u.prefix(w.len()) < *w);
            let end = last.words.partition_point(|u| u.prefix(w.len()) <= *w);
            end - start == expect
        })
    });

    let lcp = lcp_array(&last.words);
    let prefix_counts = distinct_prefix_counts(&lcp, final_len);
    let monotone = prefix_counts.windows(2).all(|w| w[0] <= w[1]);

    let lower_growth = (j..=final_len).all(|k| {
        let bound = bf.powf((k - j) as f64 / block as f64 - 1.0);
        prefix_counts[k] as f64 >= bound * (1.0 - POWER_SLACK)
    });

    let mut ks: Vec<usize> = run.stages.iter().map(Stage::word_length).collect();
    ks.push(final_len);
    ks.dedup();
    let local_cap = ks.iter().all(|&k| {
        (0..=k).all(|l| {
            let bound = bf.powf((k - l) as f64 / block as f64 + 2.0);
            max_local_count(&lcp, l, k) as f64 <= bound * (1.0 + POWER_SLACK)
        })
    });

    let soundness = last.words.iter().all(|w| is_prefix(ctx, w, run.x));

    // The prefixes of x that begin with the entry word are that word
    // followed by the prefixes of its image, so enumerating from the image
    // covers the whole cylinder the run lives in.
    let entry_len = run.entry_word.len();
    let tail_len = final_len - entry_len;
    let enumeration_subset = if tail_len <= SUBSET_CHECK_MAX_LEN {
        let entry_ok = is_prefix(ctx, &run.entry_word, run.x);
        let y = ctx.iterate_word(&run.entry_word, run.x).max(real(0.0)).min(ctx.upper());
        let all = enumerate_prefixes_branching(ctx, y, tail_len)?;
        Some(
            entry_ok
                && last.words.iter().all(|w| {
                    w.prefix(entry_len) == run.entry_word
                        && all.contains(&BinaryWord::from_bits(w.bits().skip(entry_len)))
                }),
        )
    } else {
        None
    };

    Ok(RunChecks {
        count_law,
        containment,
        bridge,
        monotone,
        lower_growth,
        local_cap,
        soundness,
        enumeration_subset,
        prefix_counts,
    })
}
