//! Multi-algorithm U-scores, their pairwise decomposition, and functional
//! (difficulty) scores.
//!
//! An algorithm's U-score on a function is the number of wins its trials
//! collect against every trial of every other algorithm, ties counting ½.
//! It equals the algorithm's rank sum in the pooled ranking minus
//! `n(n+1)/2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::trial::{compare_outcomes, TrialTable};

/// U-scores of all algorithms on one function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UScoreTable {
    pub function_id: String,
    pub dimension: u32,
    pub algorithms: Vec<String>,
    pub n: usize,
    pub u_scores: Vec<HalfInt>,
    pub rank_sums: Vec<HalfInt>,
}

impl UScoreTable {
    pub fn m(&self) -> usize {
        self.algorithms.len()
    }

    /// `n(n+1)/2`, the rank sum an algorithm gets from its own trials.
    pub fn correction(&self) -> HalfInt {
        correction(self.n)
    }

    /// Sum of all U-scores: `n²·m(m−1)/2`.
    pub fn total(&self) -> HalfInt {
        total_comparisons(self.n, self.m())
    }

    /// Highest possible single score: `n²(m−1)`.
    pub fn max_score(&self) -> HalfInt {
        HalfInt::from_int((self.n * self.n * (self.m() - 1)) as i64)
    }

    pub fn score_of(&self, algorithm: &str) -> Option<HalfInt> {
        self.algorithms.iter().position(|a| a == algorithm).map(|j| self.u_scores[j])
    }
}

fn correction(n: usize) -> HalfInt {
    let n = n as i64;
    HalfInt::from_halves(n * (n + 1))
}

pub(crate) fn total_comparisons(n: usize, m: usize) -> HalfInt {
    let (n, m) = (n as i64, m as i64);
    HalfInt::from_halves(n * n * m * (m - 1))
}

/// U-scores by ranking the pooled trials and subtracting the self-correction.
pub fn u_scores(table: &TrialTable) -> Result<UScoreTable> {
    table.validate()?;
    let n = table.n();
    let ranks = table.tie_classes().ranks();
    let rank_sums: Vec<HalfInt> = ranks.chunks(n).map(|c| c.iter().sum()).collect();
    let u = rank_sums.iter().map(|&r| r - correction(n)).collect();
    Ok(UScoreTable {
        function_id: table.context.function_id.clone(),
        dimension: table.context.dimension,
        algorithms: table.algorithms.clone(),
        n,
        u_scores: u,
        rank_sums,
    })
}

/// U-scores by counting wins over all cross-algorithm trial pairs.
pub fn u_scores_by_wins(table: &TrialTable) -> Result<Vec<HalfInt>> {
    Ok(pairwise_matrix(table)?.row_sums())
}

/// Mann-Whitney U for a two-algorithm table, computed on that pool alone.
pub fn pairwise_u(table: &TrialTable) -> Result<(HalfInt, HalfInt)> {
    if table.m() != 2 {
        return Err(Error::InvalidInput(format!(
            "pairwise_u needs exactly 2 algorithms, got {}",
            table.m()
        )));
    }
    let s = u_scores(table)?;
    Ok((s.u_scores[0], s.u_scores[1]))
}

/// Wins of each algorithm over each other; `entries[j][l]` is the number
/// of (j-trial, l-trial) pairs won by `j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairwiseMatrix {
    pub function_id: String,
    pub algorithms: Vec<String>,
    pub n: usize,
    pub entries: Vec<Vec<HalfInt>>,
}

impl PairwiseMatrix {
    pub fn row_sums(&self) -> Vec<HalfInt> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn get(&self, j: usize, l: usize) -> HalfInt {
        self.entries[j][l]
    }
}

/// Pairwise decomposition. Tie classes come from the full pool, so the row
/// sums reproduce [`u_scores`] exactly.
pub fn pairwise_matrix(table: &TrialTable) -> Result<PairwiseMatrix> {
    table.validate()?;
    let (m, n) = (table.m(), table.n());
    let classes = table.tie_classes();
    let mut entries = vec![vec![HalfInt::ZERO; m]; m];
    for j in 0..m {
        for l in 0..m {
            if j == l {
                continue;
            }
            let mut wins = HalfInt::ZERO;
            for a in j * n..(j + 1) * n {
                for b in l * n..(l + 1) * n {
                    wins += classes.points(a, b);
                }
            }
            entries[j][l] = wins;
        }
    }
    Ok(PairwiseMatrix {
        function_id: table.context.function_id.clone(),
        algorithms: table.algorithms.clone(),
        n,
        entries,
    })
}

/// Functional U-scores: each function's wins when all of its trials are
/// compared with all trials on every other function. Higher is easier.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionDifficulty {
    /// `(function_id, dimension)` per input table.
    pub functions: Vec<(String, u32)>,
    pub scores: Vec<HalfInt>,
    /// `wins[f][g]`: pairs won by function `f`'s trials over function `g`'s.
    pub wins: Vec<Vec<HalfInt>>,
}

impl FunctionDifficulty {
    /// Function indices from easiest to hardest.
    pub fn easiest_first(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        idx.sort_by(|&a, &b| self.scores[b].cmp(&self.scores[a]).then(a.cmp(&b)));
        idx
    }
}

/// Scores functions by difficulty with the roles of algorithm and function
/// exchanged. Each trial keeps its own context's success classification;
/// failures on different functions are compared by raw error, tied within
/// the larger of the two tolerances.
pub fn function_difficulty(tables: &[TrialTable]) -> Result<FunctionDifficulty> {
    if tables.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "function difficulty needs at least 2 functions, got {}",
            tables.len()
        )));
    }
    let mut reference: Vec<&String> = tables[0].algorithms.iter().collect();
    reference.sort();
    for t in tables {
        t.validate()?;
        let mut algs: Vec<&String> = t.algorithms.iter().collect();
        algs.sort();
        if algs != reference {
            return Err(Error::MismatchedAlgorithms(format!(
                "{} (dimension {}) has algorithms {:?}, expected {:?}",
                t.context.function_id, t.context.dimension, t.algorithms, tables[0].algorithms
            )));
        }
    }

    let pools: Vec<_> = tables.iter().map(|t| t.pool()).collect();
    let k = tables.len();
    let mut wins = vec![vec![HalfInt::ZERO; k]; k];
    for f in 0..k {
        for g in (f + 1)..k {
            let tol = tables[f].context.ev_tie_tolerance.max(tables[g].context.ev_tie_tolerance);
            let mut fg = HalfInt::ZERO;
            for a in &pools[f] {
                for b in &pools[g] {
                    fg += compare_outcomes(a, b, tol).points_a();
                }
            }
            let pairs = HalfInt::from_int((pools[f].len() * pools[g].len()) as i64);
            wins[f][g] = fg;
            wins[g][f] = pairs - fg;
        }
    }
    let scores = wins.iter().map(|r| r.iter().sum()).collect();
    Ok(FunctionDifficulty {
        functions: tables
            .iter()
            .map(|t| (t.context.function_id.clone(), t.context.dimension))
            .collect(),
        scores,
        wins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::three_algorithm_example;
    use crate::trial::{FunctionContext, TrialOutcome};

    fn ctx() -> FunctionContext {
        FunctionContext::new("f", 2, 1e-8, 1000).unwrap()
    }

    fn h(v: i64) -> HalfInt {
        HalfInt::from_int(v)
    }

    /// Builds a two-algorithm table from a best-first label string such as "pqqp".
    fn from_order(order: &str) -> TrialTable {
        let mut p = Vec::new();
        let mut q = Vec::new();
        for (i, ch) in order.chars().enumerate() {
            let t = TrialOutcome::success(10 * (i as u64 + 1), 0.0);
            match ch {
                'p' => p.push(t),
                _ => q.push(t),
            }
        }
        TrialTable::new(ctx(), vec!["P".into(), "Q".into()], vec![p, q]).unwrap()
    }

    #[test]
    fn worked_example_scores() {
        let t = three_algorithm_example();
        let s = u_scores(&t).unwrap();
        assert_eq!(s.rank_sums, vec![h(26), h(28), h(24)]);
        assert_eq!(s.u_scores, vec![h(16), h(18), h(14)]);
        assert_eq!(s.correction(), h(10));
    }

    #[test]
    fn interleaved_pair_ties() {
        let s = u_scores(&from_order("pqqp")).unwrap();
        assert_eq!(s.u_scores, vec![h(2), h(2)]);
    }

    #[test]
    fn complete_dominance() {
        let s = u_scores(&from_order("pppqqq")).unwrap();
        assert_eq!(s.u_scores, vec![h(9), h(0)]);
        assert_eq!(s.max_score(), h(9));
    }

    #[test]
    fn pairwise_requires_two() {
        assert!(pairwise_u(&three_algorithm_example()).is_err());
        assert_eq!(pairwise_u(&from_order("pqqp")).unwrap(), (h(2), h(2)));
    }

    #[test]
    fn pairwise_worked_example() {
        let t = three_algorithm_example();
        assert_eq!(pairwise_u(&t.restrict(0, 1).unwrap()).unwrap(), (h(7), h(9)));
        assert_eq!(pairwise_u(&t.restrict(0, 2).unwrap()).unwrap(), (h(9), h(7)));
        assert_eq!(pairwise_u(&t.restrict(1, 2).unwrap()).unwrap(), (h(9), h(7)));
        let m = pairwise_matrix(&t).unwrap();
        // rows here are the columns of the published decomposition table
        assert_eq!(m.entries[0], vec![h(0), h(7), h(9)]);
        assert_eq!(m.entries[1], vec![h(9), h(0), h(9)]);
        assert_eq!(m.entries[2], vec![h(7), h(7), h(0)]);
        assert_eq!(m.row_sums(), vec![h(16), h(18), h(14)]);
    }

    #[test]
    fn difficulty_success_beats_failure() {
        let c = ctx();
        let algs = vec!["a".to_string(), "b".to_string()];
        let easy = TrialTable::new(
            FunctionContext { function_id: "easy".into(), ..c.clone() },
            algs.clone(),
            vec![vec![TrialOutcome::success(500, 0.0); 3]; 2],
        )
        .unwrap();
        let hard = TrialTable::new(
            FunctionContext { function_id: "hard".into(), ..c },
            algs,
            vec![vec![TrialOutcome::failure(1000, 3.0); 3]; 2],
        )
        .unwrap();
        let d = function_difficulty(&[easy.clone(), hard]).unwrap();
        assert_eq!(d.scores, vec![h(36), h(0)]);
        assert_eq!(d.easiest_first(), vec![0, 1]);

        let same = function_difficulty(&[easy.clone(), easy]).unwrap();
        assert_eq!(same.scores[0], same.scores[1]);
        assert_eq!(same.scores[0], h(18));
    }

    #[test]
    fn difficulty_rejects_mismatched_algorithms() {
        let t = three_algorithm_example();
        let mut other = t.restrict(0, 1).unwrap();
        other.context.function_id = "g".into();
        assert!(matches!(
            function_difficulty(&[t.clone(), other]),
            Err(Error::MismatchedAlgorithms(_))
        ));
        assert!(function_difficulty(&[t]).is_err());
    }
}
