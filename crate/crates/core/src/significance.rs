//! Two-sample Mann-Whitney test on trial outcomes.
//!
//! Small tie-free samples get an exact two-tailed p-value from the null
//! distribution of U; anything else falls back to the normal
//! approximation with tie and continuity corrections.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::trial::{FunctionContext, TieClasses, TrialOutcome};

pub const DEFAULT_ENUMERATION_CAP: usize = 24;
const MAX_ENUMERATION_CAP: usize = 120;

/// Null distribution of U for sample sizes `n1`, `n2` without ties.
///
/// Entry `u` is the probability of `U = u`, for `u` in `0..=n1*n2`. The
/// number of arrangements with a given U is the coefficient of `q^u` in the
/// Gaussian binomial `[n1+n2 choose n1]_q`, built up one factor at a time.
pub fn exact_u_distribution(n1: usize, n2: usize, cap: usize) -> Result<Vec<f64>> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidInput("sample sizes must be >= 1".into()));
    }
    if n1 + n2 > cap.min(MAX_ENUMERATION_CAP) {
        return Err(Error::EnumerationCap { n1, n2, cap });
    }
    let counts = arrangement_counts(n1, n2);
    let total: i128 = counts.iter().sum();
    Ok(counts.iter().map(|&c| c as f64 / total as f64).collect())
}

fn arrangement_counts(n1: usize, n2: usize) -> Vec<i128> {
    let len = n1 * n2 + 1;
    let mut c = vec![0i128; len];
    c[0] = 1;
    for i in 1..=n1 {
        // times (1 - q^(n2+i))
        let shift = n2 + i;
        for k in (shift..len).rev() {
            c[k] -= c[k - shift];
        }
        // divided by (1 - q^i)
        for k in i..len {
            c[k] += c[k - i];
        }
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    ExactEnumeration,
    NormalApproximation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    /// Exact when tie-free and within the cap, normal otherwise.
    Auto,
    Normal,
}

#[derive(Clone, Copy, Debug)]
pub struct UTestConfig {
    pub enumeration_cap: usize,
    pub method: MethodChoice,
}

impl Default for UTestConfig {
    fn default() -> Self {
        UTestConfig { enumeration_cap: DEFAULT_ENUMERATION_CAP, method: MethodChoice::Auto }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignificanceLevel {
    pub alpha: f64,
    pub significant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UTestResult {
    /// The smaller of the two U values.
    pub u_statistic: HalfInt,
    /// U of sample `a` (its wins over `b`).
    pub u_a: HalfInt,
    pub u_b: HalfInt,
    pub n1: usize,
    pub n2: usize,
    /// Two-tailed.
    pub p_value: f64,
    pub significant_at: Vec<SignificanceLevel>,
    pub method: TestMethod,
}

impl UTestResult {
    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

pub fn u_test(a: &[TrialOutcome], b: &[TrialOutcome], ctx: &FunctionContext, alphas: &[f64]) -> Result<UTestResult> {
    u_test_with(a, b, ctx, alphas, UTestConfig::default())
}

pub fn u_test_with(
    a: &[TrialOutcome],
    b: &[TrialOutcome],
    ctx: &FunctionContext,
    alphas: &[f64],
    config: UTestConfig,
) -> Result<UTestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("both samples must be nonempty".into()));
    }
    for &alpha in alphas {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInput(format!("significance level {alpha} not in (0, 1)")));
        }
    }
    for t in a.iter().chain(b) {
        t.validate(ctx)?;
    }
    let (n1, n2) = (a.len(), b.len());
    let pool: Vec<TrialOutcome> = a.iter().chain(b).copied().collect();
    let classes = TieClasses::new(&pool, ctx.ev_tie_tolerance);
    let ranks = classes.ranks();
    let rank_sum_a: HalfInt = ranks[..n1].iter().sum();
    let u_a = rank_sum_a - HalfInt::from_halves((n1 * (n1 + 1)) as i64);
    let u_b = HalfInt::from_int((n1 * n2) as i64) - u_a;
    let u_statistic = u_a.min(u_b);

    let has_ties = classes.sizes.iter().any(|&s| s > 1);
    let exact = config.method == MethodChoice::Auto && !has_ties && n1 + n2 <= config.enumeration_cap;
    let (p_value, method) = if exact {
        (p_value_exact(u_statistic, n1, n2, config.enumeration_cap)?, TestMethod::ExactEnumeration)
    } else {
        let tie_term: f64 = classes.sizes.iter().map(|&t| (t * t * t - t) as f64).sum();
        (p_value_normal(u_a, n1, n2, tie_term), TestMethod::NormalApproximation)
    };

    Ok(UTestResult {
        u_statistic,
        u_a,
        u_b,
        n1,
        n2,
        p_value,
        significant_at: alphas
            .iter()
            .map(|&alpha| SignificanceLevel { alpha, significant: p_value <= alpha })
            .collect(),
        method,
    })
}

/// Exact two-tailed p-value `min(1, 2·P(U <= u_min))` for a tie-free sample.
pub fn p_value_exact(u_min: HalfInt, n1: usize, n2: usize, cap: usize) -> Result<f64> {
    if !u_min.is_integer() {
        return Err(Error::InvalidInput("exact test needs an integer U (no ties)".into()));
    }
    let mass = exact_u_distribution(n1, n2, cap)?;
    let upto = (u_min.halves() / 2).clamp(0, (n1 * n2) as i64) as usize;
    let tail: f64 = mass[..=upto].iter().sum();
    Ok((2.0 * tail).min(1.0))
}

/// Normal-approximation two-tailed p-value for `u` (either sample's U).
///
/// `tie_term` is `Σ(t³ − t)` over tie groups of the pooled sample.
pub fn p_value_normal(u: HalfInt, n1: usize, n2: usize, tie_term: f64) -> f64 {
    let (f1, f2) = (n1 as f64, n2 as f64);
    let total = f1 + f2;
    let mean = f1 * f2 / 2.0;
    let var = f1 * f2 / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u.to_f64() - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let sf = 1.0 - standard_normal().cdf(z);
    (2.0 * sf).clamp(0.0, 1.0)
}

fn standard_normal() -> Normal {
    Normal::standard()
}
