//! Trial records and the total order that makes them ordinal.
//!
//! A trial ends either by reaching the target error `ev_min` (a success,
//! judged by how few evaluations it took) or by exhausting the budget
//! `fe_max` (a failure, judged by its final error). Every success beats
//! every failure, so trials from any number of algorithms can be ranked
//! on one scale.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::HalfInt;

pub const DEFAULT_EV_TIE_TOLERANCE: f64 = 1.0e-8;

/// Termination contract for one function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionContext {
    pub function_id: String,
    pub dimension: u32,
    pub ev_min: f64,
    pub fe_max: u64,
    pub ev_tie_tolerance: f64,
}

impl FunctionContext {
    pub fn new(function_id: impl Into<String>, dimension: u32, ev_min: f64, fe_max: u64) -> Result<Self> {
        let ctx = FunctionContext {
            function_id: function_id.into(),
            dimension,
            ev_min,
            fe_max,
            ev_tie_tolerance: DEFAULT_EV_TIE_TOLERANCE,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_tie_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.ev_tie_tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidInput(format!("{}: dimension must be positive", self.function_id)));
        }
        if !(self.ev_min.is_finite() && self.ev_min >= 0.0) {
            return Err(Error::InvalidInput(format!("{}: ev_min must be finite and >= 0", self.function_id)));
        }
        if self.fe_max == 0 {
            return Err(Error::InvalidInput(format!("{}: fe_max must be >= 1", self.function_id)));
        }
        if !(self.ev_tie_tolerance.is_finite() && self.ev_tie_tolerance >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "{}: ev_tie_tolerance must be finite and >= 0",
                self.function_id
            )));
        }
        Ok(())
    }
}

/// Terminal state of one trial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub success: bool,
    pub fe_used: u64,
    pub ev_final: f64,
}

impl TrialOutcome {
    pub fn success(fe_used: u64, ev_final: f64) -> Self {
        TrialOutcome { success: true, fe_used, ev_final }
    }

    pub fn failure(fe_used: u64, ev_final: f64) -> Self {
        TrialOutcome { success: false, fe_used, ev_final }
    }

    pub fn validate(&self, ctx: &FunctionContext) -> Result<()> {
        if !(self.ev_final.is_finite() && self.ev_final >= 0.0) {
            return Err(Error::InvalidInput(format!("ev_final {} must be finite and >= 0", self.ev_final)));
        }
        if self.fe_used == 0 {
            return Err(Error::InvalidInput("fe_used must be >= 1".into()));
        }
        if self.success {
            if self.ev_final > ctx.ev_min {
                return Err(Error::InvalidInput(format!(
                    "successful trial has ev_final {} > ev_min {}",
                    self.ev_final, ctx.ev_min
                )));
            }
            if self.fe_used > ctx.fe_max {
                return Err(Error::InvalidInput(format!(
                    "successful trial used {} > fe_max {} evaluations",
                    self.fe_used, ctx.fe_max
                )));
            }
        } else {
            if self.fe_used != ctx.fe_max {
                return Err(Error::InvalidInput(format!(
                    "failed trial used {} evaluations, expected fe_max {}",
                    self.fe_used, ctx.fe_max
                )));
            }
            if self.ev_final <= ctx.ev_min {
                return Err(Error::InvalidInput(format!(
                    "failed trial has ev_final {} <= ev_min {}",
                    self.ev_final, ctx.ev_min
                )));
            }
        }
        Ok(())
    }
}

/// Result of comparing trial `a` with trial `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrialOrdering {
    ABetter,
    BBetter,
    Tied,
}

impl TrialOrdering {
    pub fn reverse(self) -> Self {
        match self {
            TrialOrdering::ABetter => TrialOrdering::BBetter,
            TrialOrdering::BBetter => TrialOrdering::ABetter,
            TrialOrdering::Tied => TrialOrdering::Tied,
        }
    }

    /// Points won by `a`: 1, ½ or 0.
    pub fn points_a(self) -> HalfInt {
        match self {
            TrialOrdering::ABetter => HalfInt::ONE,
            TrialOrdering::Tied => HalfInt::HALF,
            TrialOrdering::BBetter => HalfInt::ZERO,
        }
    }
}

/// Compares two trials under `ctx`; both must be valid against it.
pub fn compare_trials(a: &TrialOutcome, b: &TrialOutcome, ctx: &FunctionContext) -> Result<TrialOrdering> {
    a.validate(ctx)?;
    b.validate(ctx)?;
    Ok(compare_outcomes(a, b, ctx.ev_tie_tolerance))
}

/// Unchecked comparison. Successes by evaluations, failures by error.
pub(crate) fn compare_outcomes(a: &TrialOutcome, b: &TrialOutcome, tolerance: f64) -> TrialOrdering {
    match (a.success, b.success) {
        (true, true) => match a.fe_used.cmp(&b.fe_used) {
            Ordering::Less => TrialOrdering::ABetter,
            Ordering::Greater => TrialOrdering::BBetter,
            Ordering::Equal => TrialOrdering::Tied,
        },
        (true, false) => TrialOrdering::ABetter,
        (false, true) => TrialOrdering::BBetter,
        (false, false) => {
            if (a.ev_final - b.ev_final).abs() <= tolerance {
                TrialOrdering::Tied
            } else if a.ev_final < b.ev_final {
                TrialOrdering::ABetter
            } else {
                TrialOrdering::BBetter
            }
        }
    }
}

/// Orders worst-first, ignoring the tie tolerance.
fn worst_first(a: &TrialOutcome, b: &TrialOutcome) -> Ordering {
    match (a.success, b.success) {
        (true, true) => b.fe_used.cmp(&a.fe_used),
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => b.ev_final.total_cmp(&a.ev_final),
    }
}

/// Tie classes of a pool of trials.
///
/// `class[i]` is a dense index with higher meaning better. Successes with
/// equal `fe_used` share a class; failures are grouped by single linkage
/// over sorted `ev_final`, joining neighbours within `tolerance`. The
/// result is a total preorder even when near-ties chain.
#[derive(Clone, Debug)]
pub(crate) struct TieClasses {
    pub class: Vec<usize>,
    /// Size of each class, indexed by class.
    pub sizes: Vec<usize>,
}

impl TieClasses {
    pub fn new(trials: &[TrialOutcome], tolerance: f64) -> Self {
        let mut order: Vec<usize> = (0..trials.len()).collect();
        order.sort_by(|&i, &j| worst_first(&trials[i], &trials[j]));

        let mut class = vec![0; trials.len()];
        let mut sizes: Vec<usize> = Vec::new();
        for (pos, &idx) in order.iter().enumerate() {
            let joins = pos > 0 && {
                let prev = &trials[order[pos - 1]];
                let cur = &trials[idx];
                match (prev.success, cur.success) {
                    (true, true) => prev.fe_used == cur.fe_used,
                    (false, false) => prev.ev_final - cur.ev_final <= tolerance,
                    _ => false,
                }
            };
            if joins {
                *sizes.last_mut().unwrap() += 1;
            } else {
                sizes.push(1);
            }
            class[idx] = sizes.len() - 1;
        }
        TieClasses { class, sizes }
    }

    /// Average rank of each class, ranks running 1 (worst) ..= N (best).
    pub fn class_ranks(&self) -> Vec<HalfInt> {
        let mut start = 0i64;
        self.sizes
            .iter()
            .map(|&size| {
                let size = size as i64;
                // mean of start+1 ..= start+size
                let r = HalfInt::from_halves(2 * start + size + 1);
                start += size;
                r
            })
            .collect()
    }

    pub fn ranks(&self) -> Vec<HalfInt> {
        let per_class = self.class_ranks();
        self.class.iter().map(|&c| per_class[c]).collect()
    }

    /// Points trial `i` earns against trial `j`.
    pub fn points(&self, i: usize, j: usize) -> HalfInt {
        match self.class[i].cmp(&self.class[j]) {
            Ordering::Greater => HalfInt::ONE,
            Ordering::Equal => HalfInt::HALF,
            Ordering::Less => HalfInt::ZERO,
        }
    }
}

/// Per-trial ranks, index-aligned with the pool they were computed from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankAssignment {
    pub ranks: Vec<HalfInt>,
}

impl RankAssignment {
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn sum(&self) -> HalfInt {
        self.ranks.iter().sum()
    }
}

/// Ranks a pool of trials; the best trial gets rank N and ties share the
/// average of the ranks they span.
pub fn rank_trials(pool: &[TrialOutcome], ctx: &FunctionContext) -> Result<RankAssignment> {
    if pool.is_empty() {
        return Err(Error::InvalidInput("cannot rank an empty pool".into()));
    }
    for t in pool {
        t.validate(ctx)?;
    }
    let classes = TieClasses::new(pool, ctx.ev_tie_tolerance);
    Ok(RankAssignment { ranks: classes.ranks() })
}

/// All trials of `m >= 2` algorithms on one function, `n >= 1` each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialTable {
    pub context: FunctionContext,
    pub algorithms: Vec<String>,
    pub trials: Vec<Vec<TrialOutcome>>,
}

impl TrialTable {
    pub fn new(context: FunctionContext, algorithms: Vec<String>, trials: Vec<Vec<TrialOutcome>>) -> Result<Self> {
        let table = TrialTable { context, algorithms, trials };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        self.context.validate()?;
        if self.algorithms.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "{}: need at least 2 algorithms, got {}",
                self.context.function_id,
                self.algorithms.len()
            )));
        }
        if self.algorithms.len() != self.trials.len() {
            return Err(Error::InvalidInput("one trial list per algorithm required".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for a in &self.algorithms {
            if !seen.insert(a) {
                return Err(Error::InvalidInput(format!("duplicate algorithm {a}")));
            }
        }
        let n = self.trials[0].len();
        if n == 0 {
            return Err(Error::InvalidInput(format!("{}: no trials", self.algorithms[0])));
        }
        for (alg, trials) in self.algorithms.iter().zip(&self.trials) {
            if trials.len() != n {
                return Err(Error::InconsistentTrialCount(format!(
                    "{} on {}: {} trials, expected {}",
                    alg,
                    self.context.function_id,
                    trials.len(),
                    n
                )));
            }
            for t in trials {
                t.validate(&self.context)
                    .map_err(|e| Error::InvalidInput(format!("{alg} on {}: {e}", self.context.function_id)))?;
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.algorithms.len()
    }

    pub fn n(&self) -> usize {
        self.trials[0].len()
    }

    /// Trials flattened algorithm-major: algorithm `j`'s trials occupy
    /// `j*n .. (j+1)*n`.
    pub fn pool(&self) -> Vec<TrialOutcome> {
        self.trials.iter().flatten().copied().collect()
    }

    pub fn algorithm_index(&self, name: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a == name)
    }

    /// The two-algorithm table of algorithms `j` and `l`.
    pub fn restrict(&self, j: usize, l: usize) -> Result<TrialTable> {
        if j == l || j >= self.m() || l >= self.m() {
            return Err(Error::InvalidInput(format!("cannot restrict to algorithms {j} and {l}")));
        }
        Ok(TrialTable {
            context: self.context.clone(),
            algorithms: vec![self.algorithms[j].clone(), self.algorithms[l].clone()],
            trials: vec![self.trials[j].clone(), self.trials[l].clone()],
        })
    }

    pub(crate) fn tie_classes(&self) -> TieClasses {
        TieClasses::new(&self.pool(), self.context.ev_tie_tolerance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> FunctionContext {
        FunctionContext::new("f", 10, 1e-8, 1000).unwrap()
    }

    #[test]
    fn faster_success_wins() {
        let c = ctx();
        let a = TrialOutcome::success(100, 0.0);
        let b = TrialOutcome::success(500, 0.0);
        assert_eq!(compare_trials(&a, &b, &c).unwrap(), TrialOrdering::ABetter);
        assert_eq!(compare_trials(&b, &a, &c).unwrap(), TrialOrdering::BBetter);
    }

    #[test]
    fn success_at_budget_beats_failure() {
        let c = ctx();
        let a = TrialOutcome::success(c.fe_max, 1e-9);
        let b = TrialOutcome::failure(c.fe_max, 0.5);
        assert_eq!(compare_trials(&a, &b, &c).unwrap(), TrialOrdering::ABetter);
    }

    #[test]
    fn failures_within_tolerance_tie() {
        let c = ctx();
        let a = TrialOutcome::failure(1000, 0.3);
        let b = TrialOutcome::failure(1000, 0.3 + 1e-9);
        assert_eq!(compare_trials(&a, &b, &c).unwrap(), TrialOrdering::Tied);
        let d = TrialOutcome::failure(1000, 0.3 + 1e-7);
        assert_eq!(compare_trials(&a, &d, &c).unwrap(), TrialOrdering::ABetter);
    }

    #[test]
    fn identical_trials_tie() {
        let c = ctx();
        for t in [TrialOutcome::success(7, 0.0), TrialOutcome::failure(1000, 2.0)] {
            assert_eq!(compare_trials(&t, &t, &c).unwrap(), TrialOrdering::Tied);
        }
    }

    #[test]
    fn invalid_trials_are_rejected() {
        let c = ctx();
        let good = TrialOutcome::success(10, 0.0);
        let bad = [
            TrialOutcome::success(10, 0.5),     // success above target
            TrialOutcome::success(2000, 0.0),   // success past budget
            TrialOutcome::failure(999, 0.5),    // failure before budget
            TrialOutcome::failure(1000, 1e-9),  // failure at target
            TrialOutcome::failure(1000, -1.0),  // negative error
            TrialOutcome::success(0, 0.0),      // zero evaluations
            TrialOutcome::failure(1000, f64::NAN),
        ];
        for b in bad {
            assert!(compare_trials(&good, &b, &c).is_err(), "{b:?}");
            assert!(compare_trials(&b, &good, &c).is_err(), "{b:?}");
        }
    }

    #[test]
    fn context_invariants() {
        assert!(FunctionContext::new("f", 0, 0.0, 1).is_err());
        assert!(FunctionContext::new("f", 1, -1.0, 1).is_err());
        assert!(FunctionContext::new("f", 1, 0.0, 0).is_err());
        assert!(ctx().with_tie_tolerance(-1.0).is_err());
        assert_eq!(ctx().ev_tie_tolerance, 1e-8);
    }

    #[test]
    fn tied_pair_gets_average_rank() {
        let c = ctx();
        // four failures below the tied pair, the pair sits at positions 5 and 6
        let mut pool: Vec<TrialOutcome> = (0..4).map(|k| TrialOutcome::failure(1000, 10.0 + k as f64)).collect();
        pool.push(TrialOutcome::failure(1000, 5.0));
        pool.push(TrialOutcome::failure(1000, 5.0));
        pool.push(TrialOutcome::success(10, 0.0));
        let r = rank_trials(&pool, &c).unwrap();
        assert_eq!(r.ranks[4], HalfInt::from_halves(11));
        assert_eq!(r.ranks[5], HalfInt::from_halves(11));
        assert_eq!(r.ranks[6], HalfInt::from_int(7));
        assert_eq!(r.ranks[0], HalfInt::from_int(4));
        assert_eq!(r.ranks[3], HalfInt::from_int(1));
        assert_eq!(r.sum(), HalfInt::from_int(28));
    }

    #[test]
    fn single_trial_rank_one() {
        let r = rank_trials(&[TrialOutcome::success(3, 0.0)], &ctx()).unwrap();
        assert_eq!(r.ranks, vec![HalfInt::ONE]);
        assert!(rank_trials(&[], &ctx()).is_err());
    }

    #[test]
    fn three_way_tie_rank() {
        let c = ctx();
        let pool = vec![
            TrialOutcome::success(5, 0.0),
            TrialOutcome::success(5, 0.0),
            TrialOutcome::success(5, 0.0),
            TrialOutcome::success(9, 0.0),
        ];
        let r = rank_trials(&pool, &c).unwrap();
        assert_eq!(r.ranks[..3], [HalfInt::from_int(3); 3]);
        assert_eq!(r.ranks[3], HalfInt::ONE);
    }

    #[test]
    fn near_ties_chain_into_one_class() {
        let c = ctx();
        let pool = vec![
            TrialOutcome::failure(1000, 1.0),
            TrialOutcome::failure(1000, 1.0 + 0.6e-8),
            TrialOutcome::failure(1000, 1.0 + 1.2e-8),
        ];
        let r = rank_trials(&pool, &c).unwrap();
        assert!(r.ranks.iter().all(|&x| x == HalfInt::from_int(2)));
    }

    #[test]
    fn table_requires_equal_n() {
        let c = ctx();
        let err = TrialTable::new(
            c,
            vec!["a".into(), "b".into()],
            vec![vec![TrialOutcome::success(1, 0.0)], vec![]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InconsistentTrialCount(_)));
    }
}
