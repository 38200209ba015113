use crate::error::{invalid, Result};
use crate::mixing::{BlockGeometry, LambdaAccumulator, MixingProfile};
use crate::rewards::BlockReward;

use super::{argmax_first, block_index, check_alpha, first_unpulled, ucb_bonus, Policy, Segment, Selection};

fn check_rewards(rewards: &[BlockReward], m: u64) -> Result<()> {
    if rewards.is_empty() {
        return Err(invalid("at least one arm is required"));
    }
    for (k, r) in rewards.iter().enumerate() {
        r.validate()?;
        if !r.supports(m as usize) {
            return Err(invalid(format!("reward of arm {k} does not accept blocks of length {m}")));
        }
    }
    Ok(())
}

/// Fixed-block UCB: every pull keeps `m` symbols and discards the next `b`;
/// the bonus is inflated by Λ_k(τ_k).
#[derive(Debug, Clone)]
pub struct BlockUcb {
    alpha: f64,
    geometry: BlockGeometry,
    rewards: Vec<BlockReward>,
    lambdas: Vec<LambdaAccumulator>,
    pulls: Vec<u64>,
    sums: Vec<f64>,
    completed: u64,
}

impl BlockUcb {
    pub fn new(alpha: f64, geometry: BlockGeometry, profiles: Vec<MixingProfile>, rewards: Vec<BlockReward>) -> Result<Self> {
        check_alpha(alpha)?;
        check_rewards(&rewards, geometry.m)?;
        if profiles.len() != rewards.len() {
            return Err(invalid("one mixing profile per arm is required"));
        }
        for p in &profiles {
            p.validate()?;
        }
        let k = rewards.len();
        Ok(BlockUcb {
            alpha,
            geometry,
            rewards,
            lambdas: profiles.into_iter().map(|p| LambdaAccumulator::new(p, geometry)).collect(),
            pulls: vec![0; k],
            sums: vec![0.0; k],
            completed: 0,
        })
    }

    pub fn geometry(&self) -> BlockGeometry {
        self.geometry
    }

    /// Λ_k at the arm's current pull count.
    pub fn lambda(&self, arm: usize) -> f64 {
        self.lambdas[arm].value()
    }

    pub fn index(&self, arm: usize) -> f64 {
        let tau = self.pulls[arm];
        let log_t = (self.step() as f64).ln();
        block_index(self.sums[arm] / tau as f64, self.lambda(arm), self.alpha, log_t, tau)
    }
}

impl Policy for BlockUcb {
    fn name(&self) -> &'static str {
        "block_ucb"
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
            m: self.geometry.m,
            b: self.geometry.b,
        }
    }

    fn pull_plan(&self, _selection: &Selection) -> Vec<Segment> {
        let mut plan = vec![Segment::Emit(self.geometry.m)];
        if self.geometry.b > 0 {
            plan.push(Segment::Skip(self.geometry.b));
        }
        plan
    }

    fn update(&mut self, selection: &Selection, observed: &[f64]) -> Result<f64> {
        let k = selection.arm;
        let reward = self.rewards[k].evaluate(self.geometry.m as usize, observed)?;
        self.sums[k] += reward;
        self.pulls[k] += 1;
        self.lambdas[k].advance_to(self.pulls[k]);
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

/// Plain UCB with bonus √(2α·log t / τ), ignoring dependence.
#[derive(Debug, Clone)]
pub struct ClassicalUcb {
    alpha: f64,
    m: u64,
    b: u64,
    rewards: Vec<BlockReward>,
    pulls: Vec<u64>,
    sums: Vec<f64>,
    completed: u64,
}

impl ClassicalUcb {
    pub fn new(alpha: f64, m: u64, b: u64, rewards: Vec<BlockReward>) -> Result<Self> {
        check_alpha(alpha)?;
        if m == 0 {
            return Err(invalid("block length m must be >= 1"));
        }
        check_rewards(&rewards, m)?;
        let k = rewards.len();
        Ok(ClassicalUcb {
            alpha,
            m,
            b,
            rewards,
            pulls: vec![0; k],
            sums: vec![0.0; k],
            completed: 0,
        })
    }
}

impl Policy for ClassicalUcb {
    fn name(&self) -> &'static str {
        "classical_ucb"
    }

    fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    fn step(&self) -> u64 {
        self.completed + 1
    }

    fn select(&self) -> Selection {
        let arm = first_unpulled(&self.pulls).unwrap_or_else(|| {
            let log_t = (self.step() as f64).ln();
            argmax_first(
                self.sums
                    .iter()
                    .zip(&self.pulls)
                    .map(|(s, &n)| s / n as f64 + ucb_bonus(self.alpha, log_t, n)),
            )
        });
        Selection { arm, m: self.m, b: self.b }
    }

    fn pull_plan(&self, _selection: &Selection) -> Vec<Segment> {
        let mut plan = vec![Segment::Emit(self.m)];
        if self.b > 0 {
            plan.push(Segment::Skip(self.b));
        }
        plan
    }

    fn update(&mut self, selection: &Selection, observed: &[f64]) -> Result<f64> {
        let k = selection.arm;
        let reward = self.rewards[k].evaluate(self.m as usize, observed)?;
        self.sums[k] += reward;
        self.pulls[k] += 1;
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

    fn feed(policy: &mut dyn Policy, stream: &[Vec<f64>]) -> Vec<usize> {
        let mut cursor = vec![0usize; policy.num_arms()];
        let mut chosen = Vec::new();
        for _ in 0..60 {
            let sel = policy.select();
            let x = stream[sel.arm][cursor[sel.arm] % stream[sel.arm].len()];
            cursor[sel.arm] += 1;
            policy.update(&sel, &[x]).unwrap();
            chosen.push(sel.arm);
        }
        chosen
    }

    #[test]
    fn initialization_round_robin() {
        let mut p = ClassicalUcb::new(3.0, 1, 0, vec![BlockReward::BlockMean; 3]).unwrap();
        for k in 0..3 {
            let sel = p.select();
            assert_eq!(sel.arm, k);
            p.update(&sel, &[0.0]).unwrap();
        }
        assert_eq!(p.pulls().iter().sum::<u64>(), 3);
    }

    #[test]
    fn zero_profile_matches_classical() {
        let stream = vec![vec![1.0, 0.0, 1.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0]];
        let geometry = BlockGeometry::new(1, 0).unwrap();
        let mut a = BlockUcb::new(3.0, geometry, vec![MixingProfile::Zero; 2], vec![BlockReward::BlockMean; 2]).unwrap();
        let mut c = ClassicalUcb::new(3.0, 1, 0, vec![BlockReward::BlockMean; 2]).unwrap();
        assert_eq!(feed(&mut a, &stream), feed(&mut c, &stream));
    }

    #[test]
    fn plan_shape() {
        let geometry = BlockGeometry::new(3, 2).unwrap();
        let p = BlockUcb::new(3.0, geometry, vec![MixingProfile::Zero], vec![BlockReward::BlockMean]).unwrap();
        let sel = p.select();
        assert_eq!(p.pull_plan(&sel), vec![Segment::Emit(3), Segment::Skip(2)]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let geometry = BlockGeometry::new(2, 0).unwrap();
        assert!(BlockUcb::new(2.0, geometry, vec![MixingProfile::Zero], vec![BlockReward::BlockMean]).is_err());
        let pat = BlockReward::PatternIndicator { target: vec![1.0] };
        assert!(BlockUcb::new(3.0, geometry, vec![MixingProfile::Zero], vec![pat]).is_err());
    }
}
