//! Block reward functions ψ_m: 1-Lipschitz in the Hamming metric, range `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::processes::{ArmProcess, Kernel};

/// Largest number of blocks [`exact_mu`] will enumerate.
pub const MAX_ENUMERATION: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BlockReward {
    BlockMean,
    BlockMax,
    /// 1 when the block equals `target` exactly, 0 otherwise.
    PatternIndicator { target: Vec<f64> },
    /// Σ wᵢ xᵢ with nonnegative weights summing to 1.
    WeightedMean { weights: Vec<f64> },
}

impl BlockReward {
    pub fn validate(&self) -> Result<()> {
        match self {
            BlockReward::PatternIndicator { target } if target.is_empty() => {
                Err(invalid("pattern target must be nonempty"))
            }
            BlockReward::WeightedMean { weights } => {
                if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                    return Err(invalid("weights must be nonempty and nonnegative"));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid(format!("weights sum to {total}, not 1")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Block length this reward is pinned to, if any.
    pub fn fixed_length(&self) -> Option<usize> {
        match self {
            BlockReward::PatternIndicator { target } => Some(target.len()),
            BlockReward::WeightedMean { weights } => Some(weights.len()),
            _ => None,
        }
    }

    /// ψ_m(block). `block` must have exactly `m` entries, all in `[0, 1]`.
    pub fn evaluate(&self, m: usize, block: &[f64]) -> Result<f64> {
        if block.len() != m || m == 0 {
            return Err(Error::LengthMismatch {
                expected: m,
                got: block.len(),
            });
        }
        if let Some(len) = self.fixed_length() {
            if len != m {
                return Err(Error::LengthMismatch { expected: len, got: m });
            }
        }
        Ok(self.eval_unchecked(block))
    }

    pub(crate) fn eval_unchecked(&self, block: &[f64]) -> f64 {
        match self {
            BlockReward::BlockMean => block.iter().sum::<f64>() / block.len() as f64,
            BlockReward::BlockMax => block.iter().copied().fold(0.0, f64::max),
            BlockReward::PatternIndicator { target } => {
                if block == target.as_slice() {
                    1.0
                } else {
                    0.0
                }
            }
            BlockReward::WeightedMean { weights } => {
                weights.iter().zip(block).map(|(w, x)| w * x).sum::<f64>().clamp(0.0, 1.0)
            }
        }
    }

    /// Checks that ψ_m accepts blocks of length `m`.
    pub fn supports(&self, m: usize) -> bool {
        m >= 1 && self.fixed_length().is_none_or(|len| len == m)
    }
}

/// Exact 𝔼ψ_m(X_1, …, X_m) under the stationary law, by enumeration.
pub fn exact_mu(reward: &BlockReward, arm: &ArmProcess, m: usize) -> Result<f64> {
    if !reward.supports(m) {
        return Err(Error::LengthMismatch {
            expected: reward.fixed_length().unwrap_or(m),
            got: m,
        });
    }
    let d = arm.alphabet().len() as u64;
    let leaves = (d as f64).powi(m as i32);
    if leaves > MAX_ENUMERATION as f64 {
        return Err(Error::Infeasible(format!("{d}^{m} blocks exceed the enumeration limit")));
    }
    let values = arm.alphabet().values();
    let mut block = Vec::with_capacity(m);
    match arm.kernel() {
        Kernel::Iid { probs } => {
            let trans = |_prev: Option<usize>, next: usize| probs[next];
            Ok(enumerate(reward, values, m, &trans, &mut block, None, 1.0))
        }
        Kernel::Markov { matrix, stationary } => {
            let trans = |prev: Option<usize>, next: usize| match prev {
                None => stationary[next],
                Some(p) => matrix[p][next],
            };
            Ok(enumerate(reward, values, m, &trans, &mut block, None, 1.0))
        }
        Kernel::FiniteRange { .. } => Err(Error::Infeasible(
            "exact block means are only enumerated for iid and Markov arms".into(),
        )),
    }
}

fn enumerate(
    reward: &BlockReward,
    values: &[f64],
    m: usize,
    trans: &dyn Fn(Option<usize>, usize) -> f64,
    block: &mut Vec<f64>,
    prev: Option<usize>,
    weight: f64,
) -> f64 {
    if block.len() == m {
        return weight * reward.eval_unchecked(block);
    }
    let mut total = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let w = weight * trans(prev, i);
        if w == 0.0 {
            continue;
        }
        block.push(v);
        total += enumerate(reward, values, m, trans, block, Some(i), w);
        block.pop();
    }
    total
}

/// Monte Carlo estimate of 𝔼ψ_m with its standard error, from `blocks`
/// independent stationary blocks.
pub fn monte_carlo_mu(reward: &BlockReward, arm: &ArmProcess, m: usize, blocks: u64, seed: u64) -> Result<(f64, f64)> {
    if !reward.supports(m) {
        return Err(Error::LengthMismatch {
            expected: reward.fixed_length().unwrap_or(m),
            got: m,
        });
    }
    use rayon::prelude::*;
    let (sum, sum_sq) = (0..blocks)
        .into_par_iter()
        .map(|i| {
            let mut traj = arm.with_seed(crate::processes::trajectory_seed(seed, i));
            let v = reward.eval_unchecked(&traj.emit(m));
            (v, v * v)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = blocks as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{make_iid_arm, make_markov_arm, Alphabet};

    #[test]
    fn evaluate_examples() {
        let mean = BlockReward::BlockMean.evaluate(3, &[0.0, 1.0, 1.0]).unwrap();
        assert!((mean - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(BlockReward::BlockMax.evaluate(3, &[0.0; 3]).unwrap(), 0.0);
        assert_eq!(BlockReward::BlockMax.evaluate(3, &[0.0, 1.0, 0.0]).unwrap(), 1.0);
        let pat = BlockReward::PatternIndicator { target: vec![1.0, 0.0] };
        assert_eq!(pat.evaluate(2, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(pat.evaluate(2, &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            BlockReward::BlockMean.evaluate(3, &[0.0, 1.0]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
        let pat = BlockReward::PatternIndicator { target: vec![1.0, 0.0] };
        assert!(pat.evaluate(3, &[1.0, 0.0, 1.0]).is_err());
        let w = BlockReward::WeightedMean { weights: vec![0.5, 0.5] };
        assert!(w.evaluate(1, &[1.0]).is_err());
    }

    #[test]
    fn exact_mu_examples() {
        let fair = make_iid_arm(Alphabet::binary(), vec![0.5, 0.5], 0).unwrap();
        for m in 1..=6 {
            assert!((exact_mu(&BlockReward::BlockMean, &fair, m).unwrap() - 0.5).abs() < 1e-12);
        }
        assert!((exact_mu(&BlockReward::BlockMax, &fair, 2).unwrap() - 0.75).abs() < 1e-15);

        let chain = make_markov_arm(vec![vec![0.9, 0.1], vec![0.2, 0.8]], Alphabet::binary(), 0).unwrap();
        let mu = exact_mu(&BlockReward::BlockMean, &chain, 1).unwrap();
        assert!((mu - chain.marginal()[1]).abs() < 1e-12);
        assert!((mu - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn enumeration_limit() {
        let fair = make_iid_arm(Alphabet::binary(), vec![0.5, 0.5], 0).unwrap();
        assert!(matches!(
            exact_mu(&BlockReward::BlockMean, &fair, 30),
            Err(Error::Infeasible(_))
        ));
    }
}
