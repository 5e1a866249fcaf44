//! Monte-Carlo comparison of U-scores, sample averages and average-based
//! dominance on synthetic normal trials.
//!
//! Algorithm P draws from `N(-s/2, 1)` and Q from `N(s/2, 1)`, smaller is
//! better. The sample averages define the "true" winner of each run. For
//! the two-axis view, values `<= 0` become evaluation-like (a success) and
//! positive values become error-like (a failure).

use std::cmp::Ordering;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimConfig {
    /// Trials per algorithm.
    pub n: usize,
    /// Monte-Carlo repetitions per separation.
    pub runs: u64,
    pub seed: u64,
    pub s_grid: Vec<f64>,
}

impl SimConfig {
    pub const DEFAULT_RUNS: u64 = 100_000;

    pub fn new(n: usize, runs: u64, seed: u64) -> Self {
        SimConfig { n, runs, seed, s_grid: default_s_grid() }
    }

    pub fn with_s_grid(mut self, s_grid: Vec<f64>) -> Self {
        self.s_grid = s_grid;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("simulation needs n >= 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidInput("simulation needs runs >= 1".into()));
        }
        if self.s_grid.is_empty() {
            return Err(Error::InvalidInput("empty separation grid".into()));
        }
        if let Some(s) = self.s_grid.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::InvalidInput(format!("separation {s} must be finite and >= 0")));
        }
        Ok(())
    }
}

/// `0.0, 0.05, …, 1.0`.
pub fn default_s_grid() -> Vec<f64> {
    s_grid(0.0, 1.0, 0.05)
}

/// Evenly spaced separations from `start` to `stop` inclusive.
pub fn s_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return vec![start];
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|k| start + k as f64 * step).collect()
}

/// One trial value of each algorithm plus its two-axis split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimTrialPair {
    pub p: f64,
    pub q: f64,
    pub pe: f64,
    pub pf: f64,
    pub qe: f64,
    pub qf: f64,
}

/// Splits a value into `(error-like, evaluation-like)` parts.
pub fn rotate(v: f64) -> (f64, f64) {
    if v <= 0.0 {
        (0.0, v)
    } else {
        (v, 0.0)
    }
}

impl SimTrialPair {
    pub fn new(p: f64, q: f64) -> Self {
        let (pe, pf) = rotate(p);
        let (qe, qf) = rotate(q);
        SimTrialPair { p, q, pe, pf, qe, qf }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimRun {
    pub pairs: Vec<SimTrialPair>,
}

impl SimRun {
    pub fn from_values(p: &[f64], q: &[f64]) -> Result<Self> {
        if p.len() != q.len() || p.is_empty() {
            return Err(Error::InvalidInput("need equal, nonzero sample sizes".into()));
        }
        Ok(SimRun { pairs: p.iter().zip(q).map(|(&p, &q)| SimTrialPair::new(p, q)).collect() })
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn p(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|t| t.p)
    }

    pub fn q(&self) -> impl Iterator<Item = f64> + '_ {
        self.pairs.iter().map(|t| t.q)
    }
}

/// Draws run `run_index` at separation `s`. The stream depends only on
/// `(seed, run_index)`, so every separation sees the same standard normals.
pub fn generate_run(n: usize, s: f64, seed: u64, run_index: u64) -> SimRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    let half = s / 2.0;
    let pairs = (0..n)
        .map(|_| {
            let zp: f64 = StandardNormal.sample(&mut rng);
            let zq: f64 = StandardNormal.sample(&mut rng);
            SimTrialPair::new(zp - half, zq + half)
        })
        .collect();
    SimRun { pairs }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pick {
    P,
    Q,
    /// U-score tie, or neither algorithm dominates.
    Undecided,
}

/// The algorithm with the smaller sample mean; an exact tie goes to Q.
pub fn sample_average_winner(run: &SimRun) -> Pick {
    let n = run.n() as f64;
    let mp = run.p().sum::<f64>() / n;
    let mq = run.q().sum::<f64>() / n;
    if mp < mq {
        Pick::P
    } else {
        Pick::Q
    }
}

/// `P`'s Mann-Whitney U (its wins over Q, ties ½) for smaller-is-better keys.
fn u_of_first<K: PartialOrd + Copy>(mut a: Vec<K>, mut b: Vec<K>) -> HalfInt {
    let cmp = |x: &K, y: &K| x.partial_cmp(y).unwrap_or(Ordering::Equal);
    a.sort_by(cmp);
    b.sort_by(cmp);
    // For each a, count b strictly worse (greater) and equal.
    let mut halves = 0i64;
    let (mut lo, mut hi) = (0usize, 0usize);
    for x in &a {
        while lo < b.len() && cmp(&b[lo], x) == Ordering::Less {
            lo += 1;
        }
        if hi < lo {
            hi = lo;
        }
        while hi < b.len() && cmp(&b[hi], x) != Ordering::Greater {
            hi += 1;
        }
        let equal = hi - lo;
        let worse = b.len() - hi;
        halves += 2 * worse as i64 + equal as i64;
    }
    HalfInt::from_halves(halves)
}

/// Sort key of a rotated value: successes (zero error) first by
/// evaluations, then failures by error.
fn rotated_key(e: f64, f: f64) -> (u8, f64) {
    if e == 0.0 {
        (0, f)
    } else {
        (1, e)
    }
}

/// U of P computed on the two-axis (rotated) representation.
pub fn uscore_p(run: &SimRun) -> HalfInt {
    let p = run.pairs.iter().map(|t| rotated_key(t.pe, t.pf)).collect();
    let q = run.pairs.iter().map(|t| rotated_key(t.qe, t.qf)).collect();
    u_of_first(p, q)
}

/// U of P computed directly on the one-parameter values.
pub fn uscore_p_one_parameter(run: &SimRun) -> HalfInt {
    u_of_first(run.p().collect(), run.q().collect())
}

fn pick_from_u(u_p: HalfInt, n: usize) -> Pick {
    let half_total = HalfInt::from_halves((n * n) as i64);
    match u_p.cmp(&half_total) {
        Ordering::Greater => Pick::P,
        Ordering::Less => Pick::Q,
        Ordering::Equal => Pick::Undecided,
    }
}

/// Higher U wins; equal U is [`Pick::Undecided`].
pub fn uscore_winner(run: &SimRun) -> Pick {
    pick_from_u(uscore_p(run), run.n())
}

pub fn uscore_winner_one_parameter(run: &SimRun) -> Pick {
    pick_from_u(uscore_p_one_parameter(run), run.n())
}

/// Mean error-like and evaluation-like parts `(⟨e⟩, ⟨f⟩)` for P and Q.
pub fn dual_averages(run: &SimRun) -> ((f64, f64), (f64, f64)) {
    let n = run.n() as f64;
    let mut acc = [0.0f64; 4];
    for t in &run.pairs {
        acc[0] += t.pe;
        acc[1] += t.pf;
        acc[2] += t.qe;
        acc[3] += t.qf;
    }
    ((acc[0] / n, acc[1] / n), (acc[2] / n, acc[3] / n))
}

/// P wins if no worse on both averaged axes and strictly better on one;
/// symmetrically for Q.
pub fn dominance_winner(run: &SimRun) -> Pick {
    let ((pe, pf), (qe, qf)) = dual_averages(run);
    if pe <= qe && pf <= qf && (pe < qe || pf < qf) {
        Pick::P
    } else if qe <= pe && qf <= pf && (qe < pe || qf < pf) {
        Pick::Q
    } else {
        Pick::Undecided
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub s: f64,
    pub miss_uscore: f64,
    pub miss_dominance: f64,
    pub tie_rate: f64,
    /// Runs where dominance picked a winner the sample averages disagree with.
    pub dominance_conflicts: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentCurve {
    pub n: usize,
    pub runs: u64,
    pub seed: u64,
    pub points: Vec<CurvePoint>,
}

/// Miss and tie counts at one separation.
pub fn run_point(n: usize, s: f64, runs: u64, seed: u64) -> CurvePoint {
    let (mut miss_u, mut miss_d, mut ties, mut conflicts) = (0u64, 0u64, 0u64, 0u64);
    for r in 0..runs {
        let run = generate_run(n, s, seed, r);
        let truth = sample_average_winner(&run);
        let u = uscore_winner(&run);
        let d = dominance_winner(&run);
        if u == Pick::Undecided {
            ties += 1;
        }
        if u != truth {
            miss_u += 1;
        }
        if d != truth {
            miss_d += 1;
            if d != Pick::Undecided {
                conflicts += 1;
            }
        }
    }
    let runs_f = runs as f64;
    CurvePoint {
        s,
        miss_uscore: miss_u as f64 / runs_f,
        miss_dominance: miss_d as f64 / runs_f,
        tie_rate: ties as f64 / runs_f,
        dominance_conflicts: conflicts,
    }
}

pub fn run_experiment(cfg: &SimConfig) -> Result<ExperimentCurve> {
    cfg.validate()?;
    let points = cfg.s_grid.iter().map(|&s| run_point(cfg.n, s, cfg.runs, cfg.seed)).collect();
    Ok(ExperimentCurve { n: cfg.n, runs: cfg.runs, seed: cfg.seed, points })
}

impl ExperimentCurve {
    /// Plot-ready CSV: `s,miss_uscore,miss_dominance,tie_rate,runs,n,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "miss_uscore", "miss_dominance", "tie_rate", "runs", "n", "seed"])
            .map_err(csv_err)?;
        for p in &self.points {
            w.write_record([
                format!("{:.2}", p.s),
                p.miss_uscore.to_string(),
                p.miss_dominance.to_string(),
                p.tie_rate.to_string(),
                self.runs.to_string(),
                self.n.to_string(),
                self.seed.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
