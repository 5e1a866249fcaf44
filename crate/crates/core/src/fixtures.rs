//! Small reference datasets used by tests, the CLI demo and the web demo.

use crate::half::HalfInt;
use crate::trial::{FunctionContext, TrialOutcome, TrialTable};

/// Three algorithms P, Q, R with four trials each. Seven trials reach the
/// target and five exhaust the budget; best to worst the pooled order is
/// `p r q q r p q | p r q p r`.
pub fn three_algorithm_example() -> TrialTable {
    let ctx = FunctionContext::new("example", 10, 1e-8, 1000).expect("valid context");
    let order = "prqqrpqprqpr";
    let mut trials = vec![Vec::new(), Vec::new(), Vec::new()];
    for (i, label) in order.chars().enumerate() {
        let t = if i < 7 {
            TrialOutcome::success(100 * (i as u64 + 1), 0.0)
        } else {
            TrialOutcome::failure(ctx.fe_max, (i - 6) as f64)
        };
        let j = match label {
            'p' => 0,
            'q' => 1,
            _ => 2,
        };
        trials[j].push(t);
    }
    TrialTable::new(ctx, vec!["P".into(), "Q".into(), "R".into()], trials).expect("valid table")
}

/// One algorithm's U-score subtotals over two function groups.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSubtotals {
    pub algorithm: &'static str,
    pub base: HalfInt,
    pub weighted: HalfInt,
}

const fn sub(algorithm: &'static str, base_halves: i64, weighted_halves: i64) -> GroupSubtotals {
    GroupSubtotals {
        algorithm,
        base: HalfInt::from_halves(base_halves),
        weighted: HalfInt::from_halves(weighted_halves),
    }
}

/// Published 10-D and 20-D U-score subtotals of the 13 entrants of the 2022
/// bound-constrained single-objective competition, in final-rank order.
pub fn competition_2022_subtotals() -> Vec<GroupSubtotals> {
    vec![
        sub("EA4", 184478, 188279),
        sub("NL-LBC", 190461, 173370),
        sub("NL-MID", 160566, 150377),
        sub("S-DP", 131647, 156439),
        sub("jSObin", 130696, 154842),
        sub("MTT", 143721, 138517),
        sub("IUMO", 154171, 124888),
        sub("IMPML", 114920, 130914),
        sub("NLSOMA", 107854, 119393),
        sub("ZOCMAES", 100054, 115374),
        sub("OMCSO", 97143, 103754),
        sub("Co-PPSO", 76185, 68391),
        sub("SPHH", 80674, 29476),
    ]
}
