//! U-scores for stochastic optimizer benchmarks.
//!
//! Trials that stop at the target error are ranked by speed, trials that
//! exhaust the budget are ranked by accuracy, and every success beats every
//! failure. With that total order, the Mann-Whitney U-statistic scores any
//! number of algorithms on a function as a count of wins.

pub mod competition;
pub mod error;
pub mod fixtures;
pub mod half;
pub mod ingest;
pub mod legacy;
pub mod report;
pub mod significance;
pub mod simulation;
pub mod ties;
pub mod trial;
pub mod uscore;

pub use competition::{
    rank_descending, ranks_at_weight, score_competition, weight_sensitivity, CompetitionReport, Crossover,
    WeightRegime, WeightSensitivityReport,
};
pub use error::{Error, Result};
pub use half::HalfInt;
pub use ingest::{ingest, GroupedTables, ScoringConfig, TrialRecordRow, TrialStatus};
pub use legacy::{ecdf, ert, f1_score, sp, EcdfCurve, ErtResult, HistoryPoint};
pub use report::{render_competition, render_rows, render_weight_sensitivity, Format};
pub use significance::{exact_u_distribution, u_test, u_test_with, TestMethod, UTestConfig, UTestResult};
pub use simulation::{run_experiment, ExperimentCurve, Pick, SimConfig, SimRun};
pub use ties::{recommend_n, tie_possible, TieReport};
pub use trial::{compare_trials, rank_trials, FunctionContext, RankAssignment, TrialOrdering, TrialOutcome, TrialTable};
pub use uscore::{
    function_difficulty, pairwise_matrix, pairwise_u, u_scores, u_scores_by_wins, FunctionDifficulty, PairwiseMatrix,
    UScoreTable,
};
