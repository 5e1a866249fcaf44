//! Independent reference computations for tests. Nothing here goes through
//! the library's ranking or tie-class code.

#![allow(dead_code)]

use rand::Rng;
use ::uscore::{compare_trials, FunctionContext, HalfInt, TrialOrdering, TrialOutcome, TrialTable};

pub const FE_MAX: u64 = 20;

pub fn ctx() -> FunctionContext {
    FunctionContext::new("rand", 10, 1e-8, FE_MAX).unwrap()
}

/// Random trial from a small value set so exact ties are common. Failure
/// errors sit on a 0.25 grid, far apart relative to the tie tolerance.
pub fn random_trial<R: Rng>(rng: &mut R) -> TrialOutcome {
    if rng.random_bool(0.5) {
        TrialOutcome::success(rng.random_range(1..=FE_MAX), 0.0)
    } else {
        TrialOutcome::failure(FE_MAX, 0.25 * rng.random_range(1..=12) as f64)
    }
}

pub fn random_table<R: Rng>(rng: &mut R, m: usize, n: usize) -> TrialTable {
    let algorithms = (0..m).map(|j| format!("A{j}")).collect();
    let trials = (0..m).map(|_| (0..n).map(|_| random_trial(rng)).collect()).collect();
    TrialTable::new(ctx(), algorithms, trials).unwrap()
}

fn points(o: TrialOrdering) -> i64 {
    match o {
        TrialOrdering::ABetter => 2,
        TrialOrdering::Tied => 1,
        TrialOrdering::BBetter => 0,
    }
}

/// Wins of each algorithm over all other algorithms' trials, pair by pair.
pub fn brute_force_u(table: &TrialTable) -> Vec<HalfInt> {
    let m = table.m();
    (0..m)
        .map(|j| {
            let mut halves = 0;
            for l in (0..m).filter(|&l| l != j) {
                for a in &table.trials[j] {
                    for b in &table.trials[l] {
                        halves += points(compare_trials(a, b, &table.context).unwrap());
                    }
                }
            }
            HalfInt::from_halves(halves)
        })
        .collect()
}

pub fn brute_force_pair(a: &[TrialOutcome], b: &[TrialOutcome], ctx: &FunctionContext) -> HalfInt {
    let mut halves = 0;
    for x in a {
        for y in b {
            halves += points(compare_trials(x, y, ctx).unwrap());
        }
    }
    HalfInt::from_halves(halves)
}

/// Ranks by counting, for every trial, how many trials it beats and ties:
/// rank = 1 + #beaten + #tied_with_others / 2.
pub fn brute_force_ranks(pool: &[TrialOutcome], ctx: &FunctionContext) -> Vec<HalfInt> {
    pool.iter()
        .enumerate()
        .map(|(i, a)| {
            let mut halves = 2;
            for (k, b) in pool.iter().enumerate() {
                if k != i {
                    halves += points(compare_trials(a, b, ctx).unwrap());
                }
            }
            HalfInt::from_halves(halves)
        })
        .collect()
}

/// Null distribution of U by listing every arrangement of `n1` a's and
/// `n2` b's as a bitmask and counting (a before b) pairs directly.
pub fn enumerate_u_counts(n1: usize, n2: usize) -> Vec<u64> {
    let total = n1 + n2;
    let mut counts = vec![0u64; n1 * n2 + 1];
    for mask in 0u64..(1 << total) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        // bit set = sample a at that position; position order = worst to best
        let mut u = 0;
        let mut b_below = 0;
        for pos in 0..total {
            if mask >> pos & 1 == 1 {
                u += b_below;
            } else {
                b_below += 1;
            }
        }
        counts[u] += 1;
    }
    counts
}
