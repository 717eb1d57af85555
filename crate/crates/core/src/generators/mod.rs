//! Constructions that produce exponentially many prefixes of a point.
//!
//! Both follow the same plan: an entry word brings `x` into a steering
//! interval, then each block of digits branches while returning the orbit to
//! that interval, so stage `s` holds `b^s` words of length `j + s L`.
//!
//! | mode   | threshold         | block `L` | branches `b` |
//! |--------|-------------------|-----------|--------------|
//! | dense  | `beta <= omega_m` | `2m+1`    | `2^(2m)`     |
//! | paired | `beta <= lambda_m`| `m+2`     | `2`          |

pub mod checks;
pub mod dense;
pub mod interval;
pub mod paired;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use checks::{check_run, RunChecks};
pub use dense::{dense_entry_word, extend_dense_block, DenseBlocks};
pub use interval::{entry_cap, entry_word, DenseInterval, IntervalRecord, PairedInterval};
pub use paired::{extend_paired_block, paired_entry_word, PairedBlock};

use crate::error::{Error, Result};
use crate::numeric::{format_real, BetaContext, Real, FULL_DIGITS};
use crate::prefix::DEFAULT_SURVIVOR_CAP;
use crate::word::BinaryWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorMode {
    Dense,
    Paired,
}

impl GeneratorMode {
    pub fn block_length(self, m: u32) -> usize {
        match self {
            GeneratorMode::Dense => 2 * m as usize + 1,
            GeneratorMode::Paired => m as usize + 2,
        }
    }

    /// Words produced per word per block.
    pub fn branching(self, m: u32) -> u64 {
        match self {
            GeneratorMode::Dense => 1u64 << (2 * m),
            GeneratorMode::Paired => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorMode::Dense => "dense",
            GeneratorMode::Paired => "paired",
        }
    }
}

impl fmt::Display for GeneratorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" | "m" => Ok(GeneratorMode::Dense),
            "paired" | "s3" => Ok(GeneratorMode::Paired),
            _ => Err(Error::InvalidArgument(format!("unknown generator mode {s:?}"))),
        }
    }
}

/// Words of one stage, in lexicographic order, with their images.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub words: Vec<BinaryWord>,
    pub orbit_values: Vec<Real>,
}

impl Stage {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word_length(&self) -> usize {
        self.words.first().map_or(0, BinaryWord::len)
    }

    pub fn orbit_range(&self) -> (Real, Real) {
        let lo = self.orbit_values.iter().copied().fold(self.orbit_values[0], Real::min);
        let hi = self.orbit_values.iter().copied().fold(self.orbit_values[0], Real::max);
        (lo, hi)
    }
}

/// Interval a run steers into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Steering {
    Dense(DenseInterval),
    Paired(PairedInterval),
}

impl Steering {
    pub fn lo(&self) -> Real {
        match self {
            Steering::Dense(i) => i.lo,
            Steering::Paired(i) => i.lo,
        }
    }

    pub fn hi(&self) -> Real {
        match self {
            Steering::Dense(i) => i.hi,
            Steering::Paired(i) => i.hi,
        }
    }

    pub fn contains(&self, ctx: &BetaContext, y: Real) -> bool {
        ctx.in_closed(y, self.lo(), self.hi())
    }
}

/// A completed run: the entry word and every stage.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRun {
    pub mode: GeneratorMode,
    pub m: u32,
    pub x: Real,
    pub steering: Steering,
    pub entry_word: BinaryWord,
    /// Stage 0 is the entry word alone.
    pub stages: Vec<Stage>,
    /// Longest forced run seen in a paired run (0 for dense runs).
    pub max_forced_steps: usize,
}

impl GeneratorRun {
    /// `j(x)` (dense) or `g(x)` (paired).
    pub fn entry_steps(&self) -> usize {
        self.entry_word.len()
    }

    pub fn block_length(&self) -> usize {
        self.mode.block_length(self.m)
    }

    pub fn branching(&self) -> u64 {
        self.mode.branching(self.m)
    }

    pub fn num_blocks(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn final_stage(&self) -> &Stage {
        self.stages.last().expect("stage 0 always present")
    }

    pub fn transcript(&self, ctx: &BetaContext) -> RunTranscript {
        RunTranscript {
            mode: self.mode,
            m: self.m,
            beta: ctx.beta_string(),
            x: format_real(self.x, FULL_DIGITS),
            entry_word: self.entry_word.clone(),
            entry_steps: self.entry_steps(),
            block_length: self.block_length(),
            steering: IntervalRecord {
                lo: format_real(self.steering.lo(), FULL_DIGITS),
                hi: format_real(self.steering.hi(), FULL_DIGITS),
            },
            stages: self
                .stages
                .iter()
                .enumerate()
                .map(|(s, st)| {
                    let (lo, hi) = st.orbit_range();
                    StageRecord {
                        stage: s,
                        length: st.word_length(),
                        count: st.len(),
                        words: st.words.clone(),
                        orbit_min: format_real(lo, FULL_DIGITS),
                        orbit_max: format_real(hi, FULL_DIGITS),
                    }
                })
                .collect(),
        }
    }
}

/// Serializable summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTranscript {
    pub mode: GeneratorMode,
    pub m: u32,
    pub beta: String,
    pub x: String,
    pub entry_word: BinaryWord,
    pub entry_steps: usize,
    pub block_length: usize,
    pub steering: IntervalRecord,
    pub stages: Vec<StageRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub length: usize,
    pub count: usize,
    pub words: Vec<BinaryWord>,
    pub orbit_min: String,
    pub orbit_max: String,
}

/// Options shared by both modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorOptions {
    /// Refuse bases above the threshold (on by default).
    pub check_threshold: bool,
    pub survivor_cap: usize,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions {
            check_threshold: true,
            survivor_cap: DEFAULT_SURVIVOR_CAP,
        }
    }
}

fn check_size(mode: GeneratorMode, m: u32, num_blocks: usize, cap: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let per_block = mode.branching(m) as f64;
    let total = per_block.powi(num_blocks as i32);
    if total > cap as f64 {
        return Err(Error::CapExceeded {
            what: "generated words",
            value: total.min(u64::MAX as f64) as u64,
            cap: cap as u64,
        });
    }
    Ok(())
}

/// Runs the dense construction for `num_blocks` blocks.
pub fn run_dense(ctx: &BetaContext, m: u32, x: Real, num_blocks: usize) -> Result<GeneratorRun> {
    run_dense_with(ctx, m, x, num_blocks, GeneratorOptions::default())
}

pub fn run_dense_with(
    ctx: &BetaContext,
    m: u32,
    x: Real,
    num_blocks: usize,
    opts: GeneratorOptions,
) -> Result<GeneratorRun> {
    check_size(GeneratorMode::Dense, m, num_blocks, opts.survivor_cap)?;
    let interval = if opts.check_threshold {
        DenseInterval::new(ctx, m)?
    } else {
        DenseInterval::new_unchecked(ctx, m)
    };
    let (entry, y0) = dense_entry_word(ctx, &interval, x)?;
    let blocks = DenseBlocks::new(m);
    let mut stages = vec![Stage {
        words: vec![entry.clone()],
        orbit_values: vec![y0],
    }];
    for _ in 0..num_blocks {
        let prev = stages.last().expect("nonempty");
        let mut words = Vec::with_capacity(prev.len() << (2 * m));
        let mut values = Vec::with_capacity(words.capacity());
        for (w, &y) in prev.words.iter().zip(&prev.orbit_values) {
            for (nw, ny) in extend_dense_block(ctx, &interval, &blocks, w, y)? {
                words.push(nw);
                values.push(ny);
            }
        }
        stages.push(Stage {
            words,
            orbit_values: values,
        });
    }
    Ok(GeneratorRun {
        mode: GeneratorMode::Dense,
        m,
        x,
        steering: Steering::Dense(interval),
        entry_word: entry,
        stages,
        max_forced_steps: 0,
    })
}

/// Runs the paired construction for `num_blocks` blocks.
pub fn run_paired(ctx: &BetaContext, m: u32, x: Real, num_blocks: usize) -> Result<GeneratorRun> {
    run_paired_with(ctx, m, x, num_blocks, GeneratorOptions::default())
}

pub fn run_paired_with(
    ctx: &BetaContext,
    m: u32,
    x: Real,
    num_blocks: usize,
    opts: GeneratorOptions,
) -> Result<GeneratorRun> {
    check_size(GeneratorMode::Paired, m, num_blocks, opts.survivor_cap)?;
    let interval = if opts.check_threshold {
        PairedInterval::new(ctx, m)?
    } else {
        if ctx.beta() >= crate::numeric::golden_ratio() {
            return Err(Error::OutOfDomain {
                quantity: "paired steering interval",
                value: ctx.beta_string(),
            });
        }
        PairedInterval::new_unchecked(ctx, m)
    };
    let (entry, y0) = paired_entry_word(ctx, &interval, x)?;
    let mut stages = vec![Stage {
        words: vec![entry.clone()],
        orbit_values: vec![y0],
    }];
    let mut max_forced = 0;
    for _ in 0..num_blocks {
        let prev = stages.last().expect("nonempty");
        let mut words = Vec::with_capacity(prev.len() * 2);
        let mut values = Vec::with_capacity(prev.len() * 2);
        for (w, &y) in prev.words.iter().zip(&prev.orbit_values) {
            let block = extend_paired_block(ctx, &interval, w, y)?;
            max_forced = max_forced.max(block.forced_steps);
            for (nw, ny) in block.branches {
                words.push(nw);
                values.push(ny);
            }
        }
        stages.push(Stage {
            words,
            orbit_values: values,
        });
    }
    Ok(GeneratorRun {
        mode: GeneratorMode::Paired,
        m,
        x,
        steering: Steering::Paired(interval),
        entry_word: entry,
        stages,
        max_forced_steps: max_forced,
    })
}

/// Dispatches on `mode`.
pub fn run_generator(
    ctx: &BetaContext,
    mode: GeneratorMode,
    m: u32,
    x: Real,
    num_blocks: usize,
    opts: GeneratorOptions,
) -> Result<GeneratorRun> {
    match mode {
        GeneratorMode::Dense => run_dense_with(ctx, m, x, num_blocks, opts),
        GeneratorMode::Paired => run_paired_with(ctx, m, x, num_blocks, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::real;

    #[test]
    fn dense_stage_sizes() {
        let ctx = BetaContext::from_f64(1.06).unwrap();
        let run = run_dense(&ctx, 1, real(3.0), 2).unwrap();
        assert_eq!(run.final_stage().len(), 16);
        let ctx = BetaContext::from_f64(1.02).unwrap();
        let run = run_dense(&ctx, 2, real(20.0), 1).unwrap();
        assert_eq!(run.final_stage().len(), 16);
        assert_eq!(run.final_stage().word_length(), run.entry_steps() + 5);
        let run = run_dense(&ctx, 2, real(20.0), 0).unwrap();
        assert_eq!(run.final_stage().words, vec![run.entry_word.clone()]);
    }

    #[test]
    fn paired_stage_sizes() {
        let ctx = BetaContext::from_f64(1.3).unwrap();
        let run = run_paired(&ctx, 1, real(1.7), 3).unwrap();
        assert_eq!(run.final_stage().len(), 8);
        assert_eq!(run.num_blocks(), 3);
        let ctx = BetaContext::from_f64(1.46).unwrap();
        let run = run_paired(&ctx, 2, real(1.0), 2).unwrap();
        assert_eq!(run.final_stage().len(), 4);
        if let Steering::Paired(iv) = run.steering {
            for w in &run.final_stage().words {
                assert!(iv.contains(&ctx, ctx.apply_word(w, real(1.0))));
            }
        }
    }

    #[test]
    fn stages_are_sorted() {
        let ctx = BetaContext::from_f64(1.01).unwrap();
        let run = run_dense(&ctx, 2, real(37.0), 2).unwrap();
        for st in &run.stages {
            assert!(st.words.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn refuses_large_runs_and_bad_bases() {
        let ctx = BetaContext::from_f64(1.01).unwrap();
        assert!(matches!(
            run_dense(&ctx, 3, real(30.0), 5),
            Err(Error::CapExceeded { .. })
        ));
        let ctx = BetaContext::from_f64(1.5).unwrap();
        assert!(matches!(
            run_dense(&ctx, 1, real(1.0), 1),
            Err(Error::BaseAboveThreshold { .. })
        ));
        assert!(matches!(
            run_paired(&ctx, 2, real(1.0), 1),
            Err(Error::BaseAboveThreshold { .. })
        ));
    }

    #[test]
    fn unchecked_dense_run_reports_violation() {
        let ctx = BetaContext::from_f64(1.3).unwrap();
        let opts = GeneratorOptions {
            check_threshold: false,
            ..Default::default()
        };
        let err = run_dense_with(&ctx, 1, real(1.5), 2, opts).unwrap_err();
        assert!(err.is_invariant_violation(), "{err}");
    }

    #[test]
    fn transcript_round_trips() {
        let ctx = BetaContext::from_f64(1.3).unwrap();
        let run = run_paired(&ctx, 1, real(1.7), 2).unwrap();
        let t = run.transcript(&ctx);
        let json = serde_json::to_string(&t).unwrap();
        let back: RunTranscript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.stages[2].count, 4);
        assert_eq!(back.mode, GeneratorMode::Paired);
    }

    #[test]
    fn mode_names() {
        assert_eq!("m".parse::<GeneratorMode>().unwrap(), GeneratorMode::Dense);
        assert_eq!("s3".parse::<GeneratorMode>().unwrap(), GeneratorMode::Paired);
        assert_eq!("dense".parse::<GeneratorMode>().unwrap(), GeneratorMode::Dense);
        assert!("x".parse::<GeneratorMode>().is_err());
    }
}
