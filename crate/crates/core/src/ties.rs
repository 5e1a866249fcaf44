//! Which k-way ties among algorithm U-scores are arithmetically possible.
//!
//! `m` algorithms with `n` trials each share `n²·m(m−1)/2` points. A k-way
//! tie for every score needs that total to split into k equal integer
//! parts, so k-way ties can only happen when k divides the total. This
//! ignores exact trial-level ties, which introduce half points.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TieReport {
    pub m: u64,
    pub n: u64,
    pub total_comparisons: u128,
    pub possible_tie_sizes: Vec<u64>,
    pub tie_free: bool,
}

pub fn tie_possible(m: u64, n: u64) -> Result<TieReport> {
    if m < 2 || n < 1 {
        return Err(Error::InvalidInput(format!("need m >= 2 and n >= 1, got m={m}, n={n}")));
    }
    let (mm, nn) = (m as u128, n as u128);
    let total = nn * nn * mm * (mm - 1) / 2;
    let sizes: Vec<u64> = (2..=m).filter(|&k| total % k as u128 == 0).collect();
    Ok(TieReport { m, n, total_comparisons: total, tie_free: sizes.is_empty(), possible_tie_sizes: sizes })
}

/// Trial counts in `n_min..=n_max` with the fewest possible tie sizes, ascending.
///
/// Fewest distinct tie sizes is a heuristic stand-in for "least likely to
/// tie"; it does not weigh how probable each tie size is.
pub fn recommend_n(m: u64, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::InvalidInput(format!("empty trial-count range [{n_min}, {n_max}]")));
    }
    let counts: Vec<(u64, usize)> = (n_min..=n_max)
        .map(|n| tie_possible(m, n).map(|r| (n, r.possible_tie_sizes.len())))
        .collect::<Result<_>>()?;
    let best = counts.iter().map(|&(_, c)| c).min().unwrap_or(0);
    Ok(counts.into_iter().filter(|&(_, c)| c == best).map(|(n, _)| n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_algorithms_odd_n_tie_free() {
        assert!(tie_possible(2, 5).unwrap().tie_free);
        assert_eq!(tie_possible(2, 4).unwrap().possible_tie_sizes, vec![2]);
    }

    #[test]
    fn three_way_always_possible() {
        for n in 1..40 {
            assert!(tie_possible(3, n).unwrap().possible_tie_sizes.contains(&3));
        }
    }

    #[test]
    fn ten_algorithms() {
        let r = tie_possible(10, 9).unwrap();
        assert_eq!(r.total_comparisons, 45 * 81);
        assert_eq!(r.possible_tie_sizes, vec![3, 5, 9]);
        assert_eq!(tie_possible(10, 7).unwrap().possible_tie_sizes, vec![3, 5, 7, 9]);
    }

    #[test]
    fn recommendations() {
        assert_eq!(recommend_n(10, 25, 35).unwrap(), vec![25, 27, 29, 31, 33]);
        assert_eq!(recommend_n(2, 4, 5).unwrap(), vec![5]);
        assert_eq!(recommend_n(3, 2, 3).unwrap(), vec![3]);
        assert!(recommend_n(3, 5, 4).is_err());
        assert!(tie_possible(1, 5).is_err());
    }
}
