//! Older performance measures kept for side-by-side comparison: expected
//! run-time, success performance, per-function ECDF, and Formula-1 points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::trial::TrialOutcome;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErtResult {
    /// `None` when no trial succeeded.
    pub value: Option<f64>,
    pub n_success: usize,
    pub p_success: f64,
}

/// Expected run-time: total evaluations of all trials per success.
pub fn ert(trials: &[TrialOutcome]) -> Result<ErtResult> {
    if trials.is_empty() {
        return Err(Error::InvalidInput("ERT of an empty sample".into()));
    }
    let n_success = trials.iter().filter(|t| t.success).count();
    let total: f64 = trials.iter().map(|t| t.fe_used as f64).sum();
    Ok(ErtResult {
        value: (n_success > 0).then(|| total / n_success as f64),
        n_success,
        p_success: n_success as f64 / trials.len() as f64,
    })
}

/// Success performance: mean evaluations of successful trials over the
/// success rate. `None` when no trial succeeded.
pub fn sp(trials: &[TrialOutcome]) -> Result<Option<f64>> {
    if trials.is_empty() {
        return Err(Error::InvalidInput("SP of an empty sample".into()));
    }
    let succ: Vec<f64> = trials.iter().filter(|t| t.success).map(|t| t.fe_used as f64).collect();
    if succ.is_empty() {
        return Ok(None);
    }
    let mean = succ.iter().sum::<f64>() / succ.len() as f64;
    let p = succ.len() as f64 / trials.len() as f64;
    Ok(Some(mean / p))
}

/// One sample of a convergence history.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HistoryPoint {
    pub fe: u64,
    /// Best error found so far.
    pub ev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EcdfCurve {
    /// Descending.
    pub targets: Vec<f64>,
    /// `(budget, fraction of (trial, target) pairs reached)`, budgets ascending.
    pub points: Vec<(u64, f64)>,
}

/// Fraction of (trial, target) pairs whose target was reached within each budget.
pub fn ecdf(histories: &[Vec<HistoryPoint>], targets: &[f64], budgets: &[u64]) -> Result<EcdfCurve> {
    if targets.is_empty() {
        return Err(Error::InvalidInput("ECDF needs at least one target".into()));
    }
    if histories.is_empty() {
        return Err(Error::InvalidInput("ECDF needs at least one trial history".into()));
    }
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("ECDF targets must be finite".into()));
    }
    for (i, h) in histories.iter().enumerate() {
        for w in h.windows(2) {
            if w[1].fe < w[0].fe || w[1].ev > w[0].ev {
                return Err(Error::InvalidInput(format!(
                    "history {i} is not monotone: ({}, {}) then ({}, {})",
                    w[0].fe, w[0].ev, w[1].fe, w[1].ev
                )));
            }
        }
    }

    // evaluations at which each (trial, target) pair was first reached
    let mut hits: Vec<u64> = Vec::new();
    for h in histories {
        for &target in targets {
            if let Some(p) = h.iter().find(|p| p.ev <= target) {
                hits.push(p.fe);
            }
        }
    }
    hits.sort_unstable();
    let pairs = (histories.len() * targets.len()) as f64;

    let mut budgets = budgets.to_vec();
    budgets.sort_unstable();
    budgets.dedup();
    let points = budgets
        .into_iter()
        .map(|b| {
            let reached = hits.partition_point(|&fe| fe <= b);
            (b, reached as f64 / pairs)
        })
        .collect();

    let mut targets = targets.to_vec();
    targets.sort_by(|a, b| b.total_cmp(a));
    Ok(EcdfCurve { targets, points })
}

const F1_POINTS: [u32; 10] = [25, 18, 15, 12, 10, 8, 6, 4, 2, 1];

/// Formula-1 points for a 1-based rank; zero beyond tenth place.
pub fn f1_score(rank: u32) -> Result<u32> {
    match rank {
        0 => Err(Error::InvalidInput("ranks start at 1".into())),
        r => Ok(F1_POINTS.get(r as usize - 1).copied().unwrap_or(0)),
    }
}
