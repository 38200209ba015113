use crate::error::{invalid, Result};
use crate::mixing::{restless_m_sum, MixingProfile};
use crate::rewards::BlockReward;

use super::{argmax_first, check_alpha, first_unpulled, restless_bonus, Policy, Segment, Selection};

/// UCB for restless arms. Arm `k` is read in blocks of `m_k`; the bonus is
/// divided by 𝓜_k(η_k), where η_k counts raw steps since the arm was last
/// played.
#[derive(Debug, Clone)]
pub struct RestlessUcb {
    alpha: f64,
    block_lens: Vec<u64>,
    profiles: Vec<MixingProfile>,
    rewards: Vec<BlockReward>,
    pulls: Vec<u64>,
    sums: Vec<f64>,
    idle: Vec<u64>,
    completed: u64,
}

impl RestlessUcb {
    pub fn new(alpha: f64, block_lens: Vec<u64>, profiles: Vec<MixingProfile>, rewards: Vec<BlockReward>) -> Result<Self> {
        check_alpha(alpha)?;
        let k = rewards.len();
        if k == 0 || block_lens.len() != k || profiles.len() != k {
            return Err(invalid("one block length, one profile and one reward per arm are required"));
        }
        for (i, ((&m, p), r)) in block_lens.iter().zip(&profiles).zip(&rewards).enumerate() {
            p.validate()?;
            restless_m_sum(p, 1)?;
            r.validate()?;
            if !r.supports(m as usize) {
                return Err(invalid(format!("reward of arm {i} does not accept blocks of length {m}")));
            }
        }
        Ok(RestlessUcb {
            alpha,
            block_lens,
            profiles,
            rewards,
            pulls: vec![0; k],
            sums: vec![0.0; k],
            idle: vec![0; k],
            completed: 0,
        })
    }

    /// η_k: raw steps since each arm was last played.
    pub fn idle(&self) -> &[u64] {
        &self.idle
    }

    pub fn block_lens(&self) -> &[u64] {
        &self.block_lens
    }

    /// 𝓜_k(η_k) at the current idle time.
    pub fn normaliser(&self, arm: usize) -> f64 {
        restless_m_sum(&self.profiles[arm], self.idle[arm]).expect("summability checked at construction")
    }

    /// Index of `arm` if its idle timer were `idle`, all else unchanged.
    pub fn index_with_idle(&self, arm: usize, idle: u64) -> f64 {
        let tau = self.pulls[arm];
        let log_t = (self.step() as f64).ln();
        let mm = restless_m_sum(&self.profiles[arm], idle).expect("summability checked at construction");
        self.sums[arm] / tau as f64 + restless_bonus(mm, self.alpha, log_t, tau)
    }

    pub fn index(&self, arm: usize) -> f64 {
        self.index_with_idle(arm, self.idle[arm])
    }
}

impl Policy for RestlessUcb {
    fn name(&self) -> &'static str {
        "restless_ucb"
    }

    fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    fn step(&self) -> u64 {
        self.completed + 1
    }

    fn select(&self) -> Selection {
        let arm = first_unpulled(&self.pulls)
            .unwrap_or_else(|| argmax_first((0..self.num_arms()).map(|k| self.index(k))));
        Selection {
            arm,
            m: self.block_lens[arm],
            b: self.idle[arm],
        }
    }

    fn pull_plan(&self, selection: &Selection) -> Vec<Segment> {
        vec![Segment::Emit(self.block_lens[selection.arm])]
    }

    fn update(&mut self, selection: &Selection, observed: &[f64]) -> Result<f64> {
        let k = selection.arm;
        let m = self.block_lens[k];
        let reward = self.rewards[k].evaluate(m as usize, observed)?;
        self.sums[k] += reward;
        self.pulls[k] += 1;
        for (j, idle) in self.idle.iter_mut().enumerate() {
            if j == k {
                *idle = 0;
            } else {
                *idle += m;
            }
        }
        self.completed += 1;
        Ok(reward)
    }

    fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    fn empirical_means(&self) -> Vec<f64> {
        self.sums
            .iter()
            .zip(&self.pulls)
            .map(|(s, &n)| if n == 0 { 0.0 } else { s / n as f64 })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idle_timers() {
        let mut p = RestlessUcb::new(
            3.0,
            vec![3, 2],
            vec![MixingProfile::Zero; 2],
            vec![BlockReward::BlockMean; 2],
        )
        .unwrap();
        let sel = p.select();
        assert_eq!(sel.arm, 0);
        p.update(&sel, &[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.idle(), &[0, 3]);
        let sel = p.select();
        assert_eq!(sel.arm, 1);
        p.update(&sel, &[0.0, 1.0]).unwrap();
        assert_eq!(p.idle(), &[2, 0]);
    }

    #[test]
    fn longer_idle_never_lowers_index() {
        let prof = MixingProfile::geometric(1.0, 0.7).unwrap();
        let mut p = RestlessUcb::new(3.0, vec![1, 1], vec![prof.clone(), prof], vec![BlockReward::BlockMean; 2]).unwrap();
        for x in [1.0, 0.0, 1.0, 1.0] {
            let sel = p.select();
            p.update(&sel, &[x]).unwrap();
        }
        let mut prev = f64::NEG_INFINITY;
        for eta in 0..60 {
            let idx = p.index_with_idle(0, eta);
            assert!(idx >= prev);
            prev = idx;
        }
    }

    #[test]
    fn rejects_non_summable() {
        let prof = MixingProfile::algebraic(1.0, 1.0).unwrap();
        assert!(RestlessUcb::new(3.0, vec![1], vec![prof], vec![BlockReward::BlockMean]).is_err());
    }
}
