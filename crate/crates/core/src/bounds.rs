//! Closed-form growth and local-dimension bounds.
//!
//! Growth rates are measured in bits per digit (`log_2 N_k / k`), so every
//! lower bound here and every upper bound lie in `[0, 1]`. Local-dimension
//! bounds are in units of `log_beta 2`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    default_thresholds, format_real, golden_ratio, powi, real, to_f64, BetaContext, Real, ThresholdTable,
};

/// Default largest `m` scanned by [`bound_report`].
pub const DEFAULT_M_MAX: u32 = 64;

/// Grid step of [`delta_search`].
pub const DELTA_GRID_STEP: f64 = 1e-3;

/// Which logarithm the lower growth constant floors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaBranch {
    /// `beta <= sqrt 2`: `log_beta (1/(beta-1))`.
    Small,
    /// `beta > sqrt 2`: `log_beta ((beta^2-1)/(1+beta-beta^2))`.
    Large,
}

impl KappaBranch {
    pub fn for_beta(beta: Real) -> Self {
        if beta * beta > 2.0 {
            KappaBranch::Large
        } else {
            KappaBranch::Small
        }
    }
}

/// Largest `n` with `beta^n <= a`, for `a >= 1`.
///
/// The f64 logarithm only seeds the search; the answer is settled by
/// comparing exact powers, so arguments near an integer power floor
/// correctly.
fn floor_log(beta: Real, a: Real) -> u64 {
    let guess = (to_f64(a).ln() / to_f64(beta).ln()).floor().max(0.0);
    if guess > u32::MAX as f64 / 2.0 {
        return guess as u64;
    }
    let mut n = guess as u32;
    while n > 0 && powi(beta, n) > a {
        n -= 1;
    }
    while powi(beta, n + 1) <= a {
        n += 1;
    }
    n as u64
}

fn kappa_argument(beta: Real, branch: KappaBranch) -> Result<Real> {
    match branch {
        KappaBranch::Small => Ok((beta - 1.0).recip()),
        KappaBranch::Large => {
            let den = beta + 1.0 - beta * beta;
            if den <= 0.0 {
                return Err(Error::OutOfDomain {
                    quantity: "kappa",
                    value: format_real(beta, 20),
                });
            }
            Ok((beta * beta - 1.0) / den)
        }
    }
}

/// `1 / (2 (floor(log_beta A) + 1))` for the given branch.
pub fn kappa_with_branch(beta: Real, branch: KappaBranch) -> Result<f64> {
    if beta >= golden_ratio() {
        return Err(Error::OutOfDomain {
            quantity: "kappa",
            value: format_real(beta, 20),
        });
    }
    let a = kappa_argument(beta, branch)?;
    Ok(0.5 / (floor_log(beta, a) as f64 + 1.0))
}

/// The lower growth constant `kappa(beta)`, defined for
/// `1 < beta < (1+sqrt 5)/2`.
pub fn kappa(ctx: &BetaContext) -> Result<f64> {
    kappa_with_branch(ctx.beta(), KappaBranch::for_beta(ctx.beta()))
}

/// A bound attained through a threshold index `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexedBound {
    pub m: u32,
    pub value: f64,
}

/// Lower growth bounds that apply at one base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBounds {
    pub kappa: Option<f64>,
    /// `2m/(2m+1)` for the largest `m` with `beta <= omega_m`.
    pub omega: Option<IndexedBound>,
    /// `1/(m+2)` for the smallest `m` with `beta <= lambda_m`.
    pub lambda: Option<IndexedBound>,
    /// Largest applicable value, 0 if none applies.
    pub best: f64,
}

pub fn best_lower_bounds_with(beta: Real, table: &ThresholdTable) -> LowerBounds {
    let kappa = kappa_with_branch(beta, KappaBranch::for_beta(beta)).ok();
    let omega = table.largest_omega_index(beta).map(|m| IndexedBound {
        m,
        value: 2.0 * m as f64 / (2.0 * m as f64 + 1.0),
    });
    let lambda = table.smallest_lambda_index(beta).map(|m| IndexedBound {
        m,
        value: 1.0 / (m as f64 + 2.0),
    });
    let best = [kappa, omega.map(|b| b.value), lambda.map(|b| b.value)]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max);
    LowerBounds {
        kappa,
        omega,
        lambda,
        best,
    }
}

/// Lower bounds using the thresholds for `m = 1..=m_max`.
pub fn best_lower_bounds(beta: Real, m_max: u32) -> Result<LowerBounds> {
    Ok(best_lower_bounds_with(beta, &table_for(m_max)?))
}

/// Upper growth bound from `m`-blocks: `log_2(2^m - 1)/m`, valid for
/// `beta > 2^(1/m)`. Returns `(bound, threshold)`.
pub fn block_cap_bound(m: u32) -> Result<(f64, f64)> {
    if m < 2 {
        return Err(Error::OutOfDomain {
            quantity: "block cap bound",
            value: format!("m = {m}"),
        });
    }
    let mf = m as f64;
    let value = if m < 1000 {
        (2f64.powi(m as i32) - 1.0).log2() / mf
    } else {
        1.0
    };
    Ok((value, 2f64.powf(1.0 / mf)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub m: u32,
    pub value: f64,
    pub threshold: f64,
}

/// Every block cap bound with `2 <= m <= m_max` that applies at `beta`.
pub fn applicable_upper_bounds(beta: Real, m_max: u32) -> Vec<UpperBound> {
    (2..=m_max.max(1))
        .filter_map(|m| {
            let (value, threshold) = block_cap_bound(m).ok()?;
            (beta > threshold).then_some(UpperBound { m, value, threshold })
        })
        .collect()
}

/// The sums `sum_{n=1}^m eps_n beta^(-n)` for all `2^m` digit choices, sorted.
pub fn level_set(beta: Real, m: u32) -> Vec<Real> {
    let inv = beta.recip();
    let mut pts = vec![Real::ZERO];
    let mut scale = inv;
    for _ in 0..m {
        let extra: Vec<Real> = pts.iter().map(|&p| p + scale).collect();
        pts.extend(extra);
        scale *= inv;
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts
}

/// Whether consecutive points of the level set are farther apart than
/// `1/(2 beta^m (beta-1))`. Defined for `1 < beta <= 2`.
pub fn separation_holds_at(beta: Real, m: u32) -> bool {
    let pts = level_set(beta, m);
    let gap = (powi(beta, m) * (beta - 1.0) * 2.0).recip();
    pts.windows(2).all(|w| w[1] - w[0] > gap)
}

pub fn separation_holds(ctx: &BetaContext, m: u32) -> bool {
    separation_holds_at(ctx.beta(), m)
}

/// Largest `delta` such that separation holds on the grid
/// `beta = 2 - i * 1e-3` down to `2 - delta`, refined by bisection to
/// `abs_tol`. A numerical witness only; the gap function is sampled, not
/// bounded.
pub fn delta_search(m: u32, abs_tol: f64) -> Result<f64> {
    if m == 0 || m > 20 {
        return Err(Error::InvalidArgument(format!(
            "delta search needs 1 <= m <= 20, got {m}"
        )));
    }
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::InvalidArgument("abs_tol must be positive".into()));
    }
    let steps = (1.0 / DELTA_GRID_STEP).round() as u32;
    let mut holding = real(2.0);
    for i in 1..steps {
        let beta = real(2.0) - real(i as f64) * DELTA_GRID_STEP;
        if separation_holds_at(beta, m) {
            holding = beta;
            continue;
        }
        let (mut fail, mut hold) = (beta, holding);
        while to_f64(hold - fail) > abs_tol {
            let mid = (fail + hold) / 2.0;
            if separation_holds_at(mid, m) {
                hold = mid;
            } else {
                fail = mid;
            }
        }
        return Ok(to_f64(real(2.0) - hold));
    }
    Ok(to_f64(real(2.0) - holding))
}

/// Source of a local-dimension bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalDimSource {
    /// `(1 - kappa) log_beta 2`, for `beta < (1+sqrt 5)/2`.
    Kappa,
    /// `log_beta 2 / (2m+1)`, for `beta <= omega_m`.
    Omega,
    /// `(m+1)/(m+2) log_beta 2`, for `beta <= lambda_m`.
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalDimBound {
    pub source: LocalDimSource,
    pub m: Option<u32>,
    pub value: Option<f64>,
    pub applicable: bool,
}

/// The three candidate upper bounds on the upper local dimension of the
/// Bernoulli convolution, each with the sharpest applicable `m`.
pub fn local_dim_upper_with(beta: Real, table: &ThresholdTable) -> Vec<LocalDimBound> {
    let log_b2 = std::f64::consts::LN_2 / to_f64(beta).ln();
    let kappa = kappa_with_branch(beta, KappaBranch::for_beta(beta)).ok();
    let omega_m = table.largest_omega_index(beta);
    let lambda_m = table.smallest_lambda_index(beta);
    vec![
        LocalDimBound {
            source: LocalDimSource::Kappa,
            m: None,
            value: kappa.map(|k| (1.0 - k) * log_b2),
            applicable: kappa.is_some(),
        },
        LocalDimBound {
            source: LocalDimSource::Omega,
            m: omega_m,
            value: omega_m.map(|m| log_b2 / (2.0 * m as f64 + 1.0)),
            applicable: omega_m.is_some(),
        },
        LocalDimBound {
            source: LocalDimSource::Lambda,
            m: lambda_m,
            value: lambda_m.map(|m| (m as f64 + 1.0) / (m as f64 + 2.0) * log_b2),
            applicable: lambda_m.is_some(),
        },
    ]
}

pub fn local_dim_upper(ctx: &BetaContext, m_max: u32) -> Result<Vec<LocalDimBound>> {
    Ok(local_dim_upper_with(ctx.beta(), &table_for(m_max)?))
}

/// Smallest applicable local-dimension bound.
pub fn min_local_dim_upper(bounds: &[LocalDimBound]) -> Option<f64> {
    bounds
        .iter()
        .filter(|b| b.applicable)
        .filter_map(|b| b.value)
        .min_by(f64::total_cmp)
}

fn table_for(m_max: u32) -> Result<ThresholdTable> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be at least 1".into()));
    }
    let full = default_thresholds();
    if m_max <= full.m_max() {
        Ok(full.truncated(m_max))
    } else {
        ThresholdTable::new(m_max, full.abs_tol())
    }
}

/// Everything known at one base.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub beta: String,
    pub m_max: u32,
    pub kappa: Option<f64>,
    pub best_m_omega: Option<IndexedBound>,
    pub best_m_lambda: Option<IndexedBound>,
    pub best_lower: f64,
    pub upper_bounds: Vec<UpperBound>,
    /// Smallest applicable upper growth bound, 1 when none is sharper.
    pub min_upper: f64,
    pub local_dim_upper: Vec<LocalDimBound>,
    pub min_local_dim_upper: Option<f64>,
}

/// One flat row of a [`BoundReport`], for CSV and line records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub beta: String,
    pub quantity: String,
    pub m: Option<u32>,
    pub value: Option<f64>,
    pub applicable: bool,
}

pub fn bound_report(ctx: &BetaContext, m_max: u32) -> Result<BoundReport> {
    let table = table_for(m_max)?;
    let beta = ctx.beta();
    let lower = best_lower_bounds_with(beta, &table);
    let upper_bounds = applicable_upper_bounds(beta, m_max);
    let min_upper = upper_bounds.iter().map(|u| u.value).fold(1.0, f64::min);
    let local = local_dim_upper_with(beta, &table);
    let min_local = min_local_dim_upper(&local);
    Ok(BoundReport {
        beta: ctx.beta_string(),
        m_max,
        kappa: lower.kappa,
        best_m_omega: lower.omega,
        best_m_lambda: lower.lambda,
        best_lower: lower.best,
        upper_bounds,
        min_upper,
        local_dim_upper: local,
        min_local_dim_upper: min_local,
    })
}

impl BoundReport {
    pub fn records(&self) -> Vec<BoundRecord> {
        let row = |quantity: &str, m: Option<u32>, value: Option<f64>| BoundRecord {
            beta: self.beta.clone(),
            quantity: quantity.to_string(),
            m,
            value,
            applicable: value.is_some(),
        };
        let mut out = vec![
            row("kappa", None, self.kappa),
            row(
                "lower_omega",
                self.best_m_omega.map(|b| b.m),
                self.best_m_omega.map(|b| b.value),
            ),
            row(
                "lower_lambda",
                self.best_m_lambda.map(|b| b.m),
                self.best_m_lambda.map(|b| b.value),
            ),
            row("best_lower", None, Some(self.best_lower)),
        ];
        // Only the sharpest block cap is tabulated; the rest are implied.
        let sharpest = self.upper_bounds.iter().min_by(|a, b| a.value.total_cmp(&b.value));
        out.push(row("upper_block_cap", sharpest.map(|u| u.m), sharpest.map(|u| u.value)));
        out.push(row("min_upper", None, Some(self.min_upper)));
        for b in &self.local_dim_upper {
            let name = match b.source {
                LocalDimSource::Kappa => "local_dim_kappa",
                LocalDimSource::Omega => "local_dim_omega",
                LocalDimSource::Lambda => "local_dim_lambda",
            };
            out.push(row(name, b.m, b.value));
        }
        out.push(row("local_dim_min", None, self.min_local_dim_upper));
        out
    }

    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let records = self.records();
        let mut out = String::new();
        let _ = writeln!(out, "beta = {}", self.beta);
        let _ = writeln!(out, "{:<18} {:>4} {:>20}", "quantity", "m", "value");
        for r in &records {
            let m = r.m.map_or_else(|| "-".to_string(), |m| m.to_string());
            let v = r.value.map_or_else(|| "n/a".to_string(), |v| format!("{v:.15}"));
            let _ = writeln!(out, "{:<18} {:>4} {:>20}", r.quantity, m, v);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{lambda, omega, TIGHT_ROOT_TOL};

    fn ctx(b: f64) -> BetaContext {
        BetaContext::from_f64(b).unwrap()
    }

    #[test]
    fn kappa_values() {
        // log_1.5 5 = 3.969..., floor 3
        assert_eq!(kappa(&ctx(1.5)).unwrap(), 1.0 / 8.0);
        // log_1.3 (1/0.3) = 4.589..., floor 4
        assert_eq!(kappa(&ctx(1.3)).unwrap(), 1.0 / 10.0);
        assert!(kappa(&ctx(1.001)).unwrap() < 1e-3);
        assert!(kappa(&ctx(1.618)).unwrap() < 0.05);
        assert!(matches!(kappa(&ctx(1.62)), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn kappa_floors_exact_powers() {
        assert_eq!(floor_log(real(1.5), real(3.375)), 3);
        assert_eq!(floor_log(real(1.5), real(3.375) - 1e-25), 2);
        assert_eq!(floor_log(real(2.0), real(8.0)), 3);
        assert_eq!(floor_log(real(2.0), real(8.0) - 1e-30), 2);
    }

    #[test]
    fn kappa_branches_agree_at_sqrt_two() {
        let s = real(2.0).sqrt();
        for b in [s + 1e-9, s - 1e-9] {
            let small = kappa_with_branch(b, KappaBranch::Small).unwrap();
            let large = kappa_with_branch(b, KappaBranch::Large).unwrap();
            // both arguments equal 1/(beta-1) at sqrt 2
            assert_eq!(small, large);
        }
        assert_eq!(KappaBranch::for_beta(s + 1e-9), KappaBranch::Large);
        assert_eq!(KappaBranch::for_beta(s - 1e-9), KappaBranch::Small);
    }

    #[test]
    fn lower_bounds_from_thresholds() {
        let lb = best_lower_bounds(real(1.07), 64).unwrap();
        assert_eq!(lb.omega.unwrap().m, 1);
        assert!((lb.best - 2.0 / 3.0).abs() < 1e-15);
        let lb = best_lower_bounds(real(1.46), 64).unwrap();
        assert_eq!(lb.lambda.unwrap(), IndexedBound { m: 2, value: 0.25 });
        assert!(lb.omega.is_none());
        let lb = best_lower_bounds(real(1.61), 64).unwrap();
        assert_eq!(lb.lambda.unwrap().m, 8);
        assert!(best_lower_bounds(real(1.5), 0).is_err());
    }

    #[test]
    fn thresholds_switch_at_the_roots() {
        for m in 1..=4u32 {
            let w = omega(m, TIGHT_ROOT_TOL).unwrap();
            assert_eq!(best_lower_bounds(w - 1e-9, 64).unwrap().omega.map(|b| b.m), Some(m));
            assert_ne!(best_lower_bounds(w + 1e-9, 64).unwrap().omega.map(|b| b.m), Some(m));
            assert_eq!(best_lower_bounds(w, 64).unwrap().omega.map(|b| b.m), Some(m));
            let l = lambda(m, TIGHT_ROOT_TOL).unwrap();
            assert_eq!(best_lower_bounds(l - 1e-9, 64).unwrap().lambda.map(|b| b.m), Some(m));
            assert_eq!(
                best_lower_bounds(l + 1e-9, 64).unwrap().lambda.map(|b| b.m),
                Some(m + 1)
            );
        }
    }

    #[test]
    fn block_cap_values() {
        let (v, t) = block_cap_bound(2).unwrap();
        assert!((v - 3f64.log2() / 2.0).abs() < 1e-15);
        assert!((t - 2f64.sqrt()).abs() < 1e-15);
        assert!(block_cap_bound(1).is_err());
        assert!(block_cap_bound(60).unwrap().0 > 0.999_999);
        let ups = applicable_upper_bounds(real(1.5), 64);
        assert_eq!(ups.first().unwrap().m, 2);
        assert!(applicable_upper_bounds(real(1.01), 64).is_empty());
    }

    #[test]
    fn separation_for_one_digit() {
        // gap 1/beta against 1/(2 beta (beta-1)): holds iff beta > 3/2
        assert!(separation_holds_at(real(1.5) + 1e-9, 1));
        assert!(!separation_holds_at(real(1.5), 1));
        assert!(!separation_holds_at(real(1.5) - 1e-9, 1));
        assert!(separation_holds_at(real(1.99), 3));
        for m in 1..=8 {
            assert!(separation_holds_at(real(2.0), m));
        }
    }

    #[test]
    fn level_set_size_and_order() {
        let pts = level_set(real(1.7), 4);
        assert_eq!(pts.len(), 16);
        assert_eq!(pts[0], 0.0);
        assert!(pts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn delta_search_for_one_digit() {
        let d = delta_search(1, 1e-9).unwrap();
        assert!((d - 0.5).abs() < 1e-6, "{d}");
        assert!(separation_holds_at(real(2.0) - d + 1e-8, 1));
    }

    #[test]
    fn delta_decreases_on_small_m() {
        let ds: Vec<f64> = (1..=6).map(|m| delta_search(m, 1e-7).unwrap()).collect();
        assert!(ds.iter().all(|&d| d > 0.0));
        assert!(ds.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{ds:?}");
    }

    #[test]
    fn local_dimension_candidates() {
        let b = local_dim_upper(&ctx(1.5), 64).unwrap();
        let log_b2 = 2f64.ln() / 1.5f64.ln();
        assert!((b[0].value.unwrap() - 0.875 * log_b2).abs() < 1e-12);
        assert!(!b[1].applicable);
        assert_eq!(b[2].m, Some(3));
        let b = local_dim_upper(&ctx(1.07), 64).unwrap();
        assert_eq!(b[1].m, Some(1));
        assert!((b[1].value.unwrap() - 2f64.ln() / 1.07f64.ln() / 3.0).abs() < 1e-12);
        let b = local_dim_upper(&ctx(1.3), 64).unwrap();
        assert_eq!(b[2].m, Some(1));
        assert!((b[2].value.unwrap() - 2.0 / 3.0 * 2f64.ln() / 1.3f64.ln()).abs() < 1e-12);
        assert_eq!(min_local_dim_upper(&b), b[2].value);
    }

    #[test]
    fn lower_never_exceeds_upper_on_a_grid() {
        let phi = to_f64(golden_ratio());
        for i in 1..100 {
            let b = 1.0 + (phi - 1.0) * i as f64 / 100.0;
            let rep = bound_report(&ctx(b), 64).unwrap();
            assert!(rep.kappa.unwrap() > 0.0);
            assert!(rep.best_lower <= rep.min_upper, "beta = {b}");
        }
    }

    #[test]
    fn report_table_and_records() {
        let rep = bound_report(&ctx(1.5), 64).unwrap();
        let table = rep.to_table();
        assert!(table.lines().nth(2).unwrap().starts_with("kappa"));
        assert!(table.contains("0.125000000000000"));
        let json = serde_json::to_string(&rep).unwrap();
        assert_eq!(serde_json::from_str::<BoundReport>(&json).unwrap(), rep);
        assert_eq!(rep.records().len(), 10);
    }
}
