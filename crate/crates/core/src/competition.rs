//! Aggregating per-function U-scores into a competition ranking, and how
//! that ranking moves when one group of functions is reweighted.
//!
//! Every function hands out the same number of points, `n²·m(m−1)/2`, so
//! per-function scores can be summed without normalization.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::trial::TrialTable;
use crate::uscore::{u_scores, UScoreTable};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionScores {
    pub group: String,
    /// Scores reordered to the report's algorithm order.
    pub scores: UScoreTable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompetitionReport {
    pub algorithms: Vec<String>,
    /// Group labels in first-seen order.
    pub groups: Vec<String>,
    pub weights: Vec<f64>,
    pub functions: Vec<FunctionScores>,
    /// `subtotals[j][g]`: algorithm `j`'s summed U-score over group `g`.
    pub subtotals: Vec<Vec<HalfInt>>,
    pub totals: Vec<f64>,
    /// 1 = best; equal totals share the better rank.
    pub ranks: Vec<usize>,
    /// Algorithms whose total equals another algorithm's.
    pub tied: Vec<bool>,
}

impl CompetitionReport {
    /// Algorithm indices in rank order (ties keep input order).
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.algorithms.len()).collect();
        idx.sort_by_key(|&j| (self.ranks[j], j));
        idx
    }

    /// Builds a report from already aggregated group subtotals.
    pub fn from_subtotals(
        algorithms: Vec<String>,
        groups: Vec<String>,
        subtotals: Vec<Vec<HalfInt>>,
        weights: &[(String, f64)],
    ) -> Result<Self> {
        if algorithms.is_empty() {
            return Err(Error::Empty("no algorithms".into()));
        }
        if subtotals.len() != algorithms.len() || subtotals.iter().any(|r| r.len() != groups.len()) {
            return Err(Error::InvalidInput("subtotals must be algorithms x groups".into()));
        }
        let weights = resolve_weights(&groups, weights)?;
        let totals: Vec<f64> = subtotals
            .iter()
            .map(|row| row.iter().zip(&weights).map(|(s, w)| s.to_f64() * w).sum())
            .collect();
        let (ranks, tied) = rank_descending(&totals);
        Ok(CompetitionReport { algorithms, groups, weights, functions: Vec::new(), subtotals, totals, ranks, tied })
    }
}

fn resolve_weights(groups: &[String], weights: &[(String, f64)]) -> Result<Vec<f64>> {
    for (g, w) in weights {
        if !groups.contains(g) {
            return Err(Error::InvalidInput(format!("weight given for unknown group {g}")));
        }
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::InvalidInput(format!("weight {w} for group {g} must be finite and >= 0")));
        }
    }
    Ok(groups
        .iter()
        .map(|g| weights.iter().find(|(name, _)| name == g).map_or(1.0, |(_, w)| *w))
        .collect())
}

/// Competition ranks (1 = largest value), ties sharing the better rank.
pub fn rank_descending(values: &[f64]) -> (Vec<usize>, Vec<bool>) {
    let ranks = values
        .iter()
        .map(|v| 1 + values.iter().filter(|o| *o > v).count())
        .collect();
    let tied = values
        .iter()
        .enumerate()
        .map(|(i, v)| values.iter().enumerate().any(|(k, o)| k != i && o == v))
        .collect();
    (ranks, tied)
}

/// Scores every `(group, table)` and sums per group; groups missing from
/// `weights` get weight 1.
pub fn score_competition(tables: &[(String, TrialTable)], weights: &[(String, f64)]) -> Result<CompetitionReport> {
    let Some((_, first)) = tables.first() else {
        return Err(Error::Empty("no functions to score".into()));
    };
    let algorithms = first.algorithms.clone();
    let mut groups: Vec<String> = Vec::new();
    for (g, _) in tables {
        if !groups.contains(g) {
            groups.push(g.clone());
        }
    }

    let mut functions = Vec::with_capacity(tables.len());
    let mut subtotals = vec![vec![HalfInt::ZERO; groups.len()]; algorithms.len()];
    for (group, table) in tables {
        let position: HashMap<&str, usize> =
            table.algorithms.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
        if table.algorithms.len() != algorithms.len() || algorithms.iter().any(|a| !position.contains_key(a.as_str())) {
            return Err(Error::MismatchedAlgorithms(format!(
                "{} (dimension {}) has {:?}, expected {:?}",
                table.context.function_id, table.context.dimension, table.algorithms, algorithms
            )));
        }
        let raw = u_scores(table)?;
        let perm: Vec<usize> = algorithms.iter().map(|a| position[a.as_str()]).collect();
        let scores = UScoreTable {
            algorithms: algorithms.clone(),
            u_scores: perm.iter().map(|&i| raw.u_scores[i]).collect(),
            rank_sums: perm.iter().map(|&i| raw.rank_sums[i]).collect(),
            ..raw
        };
        let g = groups.iter().position(|x| x == group).expect("group collected above");
        for (j, &s) in scores.u_scores.iter().enumerate() {
            subtotals[j][g] += s;
        }
        functions.push(FunctionScores { group: group.clone(), scores });
    }

    let mut report = CompetitionReport::from_subtotals(algorithms, groups, subtotals, weights)?;
    report.functions = functions;
    Ok(report)
}

/// Weight at which two algorithms' weighted totals meet.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossover {
    pub weight: f64,
    /// Algorithm indices; `first` leads just below `weight`.
    pub first: usize,
    pub second: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightRegime {
    pub from: f64,
    pub to: f64,
    /// Per algorithm, its rank inside this regime.
    pub ranks: Vec<usize>,
    /// Unweighted (weight 1) rank of the algorithm at each new position.
    pub base_ranks_in_order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSensitivityReport {
    pub algorithms: Vec<String>,
    pub weight_min: f64,
    pub weight_max: f64,
    pub unweighted_ranks: Vec<usize>,
    /// Crossovers inside the weight range, ascending.
    pub crossovers: Vec<Crossover>,
    pub regimes: Vec<WeightRegime>,
    /// Largest positive crossover over all pairs: above it the ranking is
    /// fixed by the weighted group alone. `None` if no pair ever crosses.
    pub freeze_weight: Option<f64>,
}

/// Ranks when the second group's scores are multiplied by `weight`.
pub fn ranks_at_weight(base: &[HalfInt], weighted: &[HalfInt], weight: f64) -> Vec<usize> {
    let totals: Vec<f64> = base.iter().zip(weighted).map(|(b, g)| b.to_f64() + weight * g.to_f64()).collect();
    rank_descending(&totals).0
}

/// Crossovers of `total_j(w) = base_j + w·weighted_j` inside `[weight_min, weight_max]`.
pub fn weight_sensitivity(
    algorithms: &[String],
    base: &[HalfInt],
    weighted: &[HalfInt],
    weight_min: f64,
    weight_max: f64,
) -> Result<WeightSensitivityReport> {
    let m = algorithms.len();
    if m == 0 {
        return Err(Error::Empty("no algorithms".into()));
    }
    if base.len() != m || weighted.len() != m {
        return Err(Error::InvalidInput("one base and one weighted subtotal per algorithm".into()));
    }
    if !(weight_min > 0.0 && weight_min < weight_max) || weight_max.is_nan() {
        return Err(Error::InvalidInput(format!("weight range [{weight_min}, {weight_max}] must be positive and nonempty")));
    }

    let mut all = Vec::new();
    for j in 0..m {
        for l in (j + 1)..m {
            let dg = weighted[l].halves() - weighted[j].halves();
            if dg == 0 {
                continue;
            }
            let w = (base[j].halves() - base[l].halves()) as f64 / dg as f64;
            if w > 0.0 {
                // below w the one with the larger base leads
                let (first, second) = if base[j] > base[l] { (j, l) } else { (l, j) };
                all.push(Crossover { weight: w, first, second });
            }
        }
    }
    all.sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.first.cmp(&b.first)));
    let freeze_weight = all.last().map(|c| c.weight);
    let crossovers: Vec<Crossover> =
        all.into_iter().filter(|c| c.weight >= weight_min && c.weight <= weight_max).collect();

    let unweighted_ranks = ranks_at_weight(base, weighted, 1.0);
    let mut bounds = vec![weight_min];
    for c in &crossovers {
        if *bounds.last().unwrap() < c.weight {
            bounds.push(c.weight);
        }
    }
    if *bounds.last().unwrap() < weight_max {
        bounds.push(weight_max);
    }
    let regimes = bounds
        .windows(2)
        .map(|w| {
            let probe = if w[1].is_finite() { 0.5 * (w[0] + w[1]) } else { w[0] * 2.0 + 1.0 };
            let ranks = ranks_at_weight(base, weighted, probe);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by_key(|&j| (ranks[j], j));
            WeightRegime {
                from: w[0],
                to: w[1],
                base_ranks_in_order: order.iter().map(|&j| unweighted_ranks[j]).collect(),
                ranks,
            }
        })
        .collect();

    Ok(WeightSensitivityReport {
        algorithms: algorithms.to_vec(),
        weight_min,
        weight_max,
        unweighted_ranks,
        crossovers,
        regimes,
        freeze_weight,
    })
}
