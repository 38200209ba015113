//! Ground truth for tests and regret ledgers.
//!
//! - [`value_table`]: exact combination values ν = β·μ_m / M(b) and their
//!   argmax.
//! - [`tail_estimate`]: Monte Carlo deviation tails next to the matching
//!   concentration bounds.
//! - [`chi_square_homogeneity`] / [`chi_square_fit`]: stationarity checks on
//!   sampled marginals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Result};
use crate::mixing::{combinations, lambda_sum, m_sum, restless_m_sum, BlockGeometry, Combination};
use crate::processes::{marginal_counts, trajectory_seed, ArmProcess};
use crate::rewards::{exact_mu, BlockReward};

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// Tolerance used when comparing a deviation with ε.
pub const DEVIATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueEntry {
    pub arm: usize,
    pub m: u64,
    pub b: u64,
    pub beta: u64,
    pub mu: f64,
    pub normaliser: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueTable {
    pub entries: Vec<ValueEntry>,
    /// Overall best entry.
    pub best: ValueEntry,
    /// Best entry of each arm.
    pub per_arm: Vec<ValueEntry>,
    /// ν* − ν_k* for each arm.
    pub gaps: Vec<f64>,
}

/// Table of ν^k_{m,b} over every arm and every `(m, b)` with `(m+b) | s`
/// that the arm's reward accepts, using exact block means.
pub fn value_table(arms: &[ArmProcess], rewards: &[BlockReward], s: u64) -> Result<ValueTable> {
    value_table_with(arms, rewards, s, &mut |k, m| exact_mu(&rewards[k], &arms[k], m))
}

/// [`value_table`] with block means from `mu(arm, m)`.
pub fn value_table_with(
    arms: &[ArmProcess],
    rewards: &[BlockReward],
    s: u64,
    mu: &mut dyn FnMut(usize, usize) -> Result<f64>,
) -> Result<ValueTable> {
    if arms.is_empty() || arms.len() != rewards.len() {
        return Err(invalid("one reward per arm is required"));
    }
    if s == 0 {
        return Err(invalid("s must be >= 1"));
    }
    let combos = combinations(s);
    let mut entries = Vec::new();
    let mut per_arm = Vec::with_capacity(arms.len());
    for (k, arm) in arms.iter().enumerate() {
        let mut best: Option<ValueEntry> = None;
        let mut cache: Vec<Option<f64>> = vec![None; s as usize + 1];
        for &Combination { m, b, beta } in &combos {
            if !rewards[k].supports(m as usize) {
                continue;
            }
            let mu_m = match cache[m as usize] {
                Some(v) => v,
                None => {
                    let v = mu(k, m as usize)?;
                    cache[m as usize] = Some(v);
                    v
                }
            };
            let normaliser = m_sum(arm.profile(), b)?;
            let entry = ValueEntry {
                arm: k,
                m,
                b,
                beta,
                mu: mu_m,
                normaliser,
                value: beta as f64 * mu_m / normaliser,
            };
            if best.is_none_or(|e| entry.value > e.value) {
                best = Some(entry);
            }
            entries.push(entry);
        }
        per_arm.push(best.ok_or_else(|| invalid(format!("reward of arm {k} accepts no block length dividing {s}")))?);
    }
    let mut best = per_arm[0];
    for e in &per_arm[1..] {
        if e.value > best.value {
            best = *e;
        }
    }
    let gaps = per_arm.iter().map(|e| best.value - e.value).collect();
    Ok(ValueTable {
        entries,
        best,
        per_arm,
        gaps,
    })
}

/// Exact μ_{m_k} for every arm.
pub fn block_means(arms: &[ArmProcess], rewards: &[BlockReward], block_lens: &[u64]) -> Result<Vec<f64>> {
    arms.iter()
        .zip(rewards)
        .zip(block_lens)
        .map(|((arm, r), &m)| exact_mu(r, arm, m as usize))
        .collect()
}

/// Which sampling scheme and bound a tail experiment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    /// Blocks of `m` kept, `b` dropped; bound exp(−nε²/(2Λ²(n))).
    Block,
    /// Same sampling, deviation divided by M(b); bound 2·exp(−nε²/2).
    Rested,
    /// First block, a gap of `b`, then `n − 1` contiguous blocks; bound
    /// 2·exp(−nε²/(2𝓜²(b))).
    Restless,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    pub mode: TailMode,
    pub m: u64,
    pub b: u64,
    /// Number of blocks per trial.
    pub n: u64,
    pub eps: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// The standard grid {0.05·j : j = 1..10}.
pub fn standard_eps_grid() -> Vec<f64> {
    (1..=10).map(|j| 0.05 * j as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub epsilon: f64,
    pub empirical: f64,
    pub wilson_hi: f64,
    /// Bound as used for pass/fail, clipped to 1.
    pub bound: f64,
    pub pass: bool,
    /// Twice the unclipped one-sided form, clipped to 1 (block mode only;
    /// equal to `bound` otherwise).
    pub bound_two_sided: f64,
}

/// Wilson score interval `(lo, hi)` for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (((centre - half) / denom).max(0.0), ((centre + half) / denom).min(1.0))
}

/// Unclipped bound for one ε.
pub fn tail_bound(profile: &crate::mixing::MixingProfile, spec: &TailSpec, eps: f64) -> Result<f64> {
    let n = spec.n as f64;
    Ok(match spec.mode {
        TailMode::Block => {
            let lambda = lambda_sum(profile, BlockGeometry::new(spec.m, spec.b)?, spec.n);
            (-n * eps * eps / (2.0 * lambda * lambda)).exp()
        }
        TailMode::Rested => 2.0 * (-n * eps * eps / 2.0).exp(),
        TailMode::Restless => {
            let mm = restless_m_sum(profile, spec.b)?;
            2.0 * (-n * eps * eps / (2.0 * mm * mm)).exp()
        }
    })
}

/// Absolute deviation of one trial, after normalisation.
fn trial_deviation(arm: &mut ArmProcess, reward: &BlockReward, spec: &TailSpec, mu: f64, normaliser: f64) -> f64 {
    let m = spec.m as usize;
    let mut block = Vec::with_capacity(m);
    let mut total = 0.0;
    for i in 0..spec.n {
        block.clear();
        arm.emit_into(m, &mut block);
        total += reward.eval_unchecked(&block);
        let skip = match spec.mode {
            TailMode::Block | TailMode::Rested => spec.b,
            TailMode::Restless if i == 0 => spec.b,
            TailMode::Restless => 0,
        };
        arm.skip(skip);
    }
    (total / spec.n as f64 - mu).abs() / normaliser
}

/// Fraction of `trials` independent stationary trajectories whose
/// deviation is at least ε, with a 99% Wilson upper limit and the mode's
/// bound.
pub fn tail_estimate(arm: &ArmProcess, reward: &BlockReward, mu: f64, spec: &TailSpec) -> Result<Vec<TailRow>> {
    if spec.m == 0 || spec.n == 0 || spec.trials == 0 {
        return Err(invalid("m, n and trials must be >= 1"));
    }
    if !reward.supports(spec.m as usize) {
        return Err(invalid(format!("reward does not accept blocks of length {}", spec.m)));
    }
    let normaliser = match spec.mode {
        TailMode::Rested => m_sum(arm.profile(), spec.b)?,
        _ => 1.0,
    };
    let deviations: Vec<f64> = (0..spec.trials)
        .into_par_iter()
        .map(|i| {
            let mut traj = arm.with_seed(trajectory_seed(spec.seed, i));
            trial_deviation(&mut traj, reward, spec, mu, normaliser)
        })
        .collect();
    spec.eps
        .iter()
        .map(|&eps| {
            let hits = deviations.iter().filter(|&&d| d >= eps - DEVIATION_TOL).count() as u64;
            let (_, hi) = wilson_interval(hits, spec.trials, Z_99);
            let raw = tail_bound(arm.profile(), spec, eps)?;
            let bound = raw.min(1.0);
            let two_sided = match spec.mode {
                TailMode::Block => (2.0 * raw).min(1.0),
                _ => bound,
            };
            Ok(TailRow {
                epsilon: eps,
                empirical: hits as f64 / spec.trials as f64,
                wilson_hi: hi,
                bound,
                pass: hi <= bound,
                bound_two_sided: two_sided,
            })
        })
        .collect()
}

pub fn write_tail_csv<W: std::io::Write>(rows: &[TailRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}

fn chi_square_p(statistic: f64, dof: f64) -> Result<f64> {
    let dist = ChiSquared::new(dof).map_err(|e| invalid(format!("chi-square: {e}")))?;
    Ok(1.0 - dist.cdf(statistic))
}

/// Pearson homogeneity test on a `rows × symbols` count table. Columns with
/// no observations are dropped.
pub fn chi_square_table(table: &[Vec<u64>]) -> Result<ChiSquareResult> {
    if table.len() < 2 {
        return Err(invalid("homogeneity test needs at least two rows"));
    }
    let cols = table[0].len();
    let row_tot: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_tot: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let total: f64 = row_tot.iter().sum();
    let used: Vec<usize> = (0..cols).filter(|&j| col_tot[j] > 0.0).collect();
    if used.len() < 2 {
        return Ok(ChiSquareResult {
            statistic: 0.0,
            dof: 0.0,
            p_value: 1.0,
        });
    }
    let mut stat = 0.0;
    for (i, row) in table.iter().enumerate() {
        for &j in &used {
            let expected = row_tot[i] * col_tot[j] / total;
            let diff = row[j] as f64 - expected;
            stat += diff * diff / expected;
        }
    }
    let dof = ((table.len() - 1) * (used.len() - 1)) as f64;
    Ok(ChiSquareResult {
        statistic: stat,
        dof,
        p_value: chi_square_p(stat, dof)?,
    })
}

/// Homogeneity of the single-symbol law across `positions`, each sampled
/// from its own independent batch of trajectories.
pub fn chi_square_homogeneity(arm: &ArmProcess, positions: &[u64], trajectories: u64, seed: u64) -> Result<ChiSquareResult> {
    let table: Vec<Vec<u64>> = positions
        .iter()
        .enumerate()
        .map(|(i, &p)| marginal_counts(arm, p, trajectories, trajectory_seed(seed, (1 << 32) + i as u64)))
        .collect();
    chi_square_table(&table)
}

/// Goodness of fit of `counts` to `probs`; zero-probability cells must be
/// empty and are dropped.
pub fn chi_square_fit(counts: &[u64], probs: &[f64]) -> Result<ChiSquareResult> {
    if counts.len() != probs.len() {
        return Err(invalid("counts and probabilities differ in length"));
    }
    let total: f64 = counts.iter().sum::<u64>() as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&c, &p) in counts.iter().zip(probs) {
        if p == 0.0 {
            if c > 0 {
                return Ok(ChiSquareResult {
                    statistic: f64::INFINITY,
                    dof: 0.0,
                    p_value: 0.0,
                });
            }
            continue;
        }
        let expected = total * p;
        stat += (c as f64 - expected).powi(2) / expected;
        cells += 1;
    }
    let dof = cells.saturating_sub(1) as f64;
    if dof == 0.0 {
        return Ok(ChiSquareResult {
            statistic: 0.0,
            dof,
            p_value: 1.0,
        });
    }
    Ok(ChiSquareResult {
        statistic: stat,
        dof,
        p_value: chi_square_p(stat, dof)?,
    })
}
