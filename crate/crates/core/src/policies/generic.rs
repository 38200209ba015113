use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::mixing::MonotoneMap;
use crate::rewards::BlockReward;

use super::{argmax_first, check_alpha, first_unpulled, Policy, Segment, Selection};

/// Confidence width `γ⁻¹(α·log t / θ(τ))`.
pub fn generic_width(theta: &dyn MonotoneMap, gamma: &dyn MonotoneMap, alpha: f64, log_t: f64, pulls: u64) -> f64 {
    gamma.inverse(alpha * log_t / theta.eval(pulls as f64))
}

/// Arm maximizing `μ̂_k + γ_k⁻¹(α·log t / θ_k(τ_k))`; any unpulled arm wins
/// first.
pub fn generic_ucb_select(
    means: &[f64],
    pulls: &[u64],
    t: u64,
    alpha: f64,
    thetas: &[&dyn MonotoneMap],
    gammas: &[&dyn MonotoneMap],
) -> usize {
    if let Some(k) = first_unpulled(pulls) {
        return k;
    }
    let log_t = (t as f64).ln();
    argmax_first((0..means.len()).map(|k| means[k] + generic_width(thetas[k], gammas[k], alpha, log_t, pulls[k])))
}

/// (α, θ, γ)-UCB with one θ and one γ per arm.
#[derive(Clone)]
pub struct GenericUcb {
    alpha: f64,
    m: u64,
    b: u64,
    thetas: Vec<Arc<dyn MonotoneMap>>,
    gammas: Vec<Arc<dyn MonotoneMap>>,
    rewards: Vec<BlockReward>,
    pulls: Vec<u64>,
    sums: Vec<f64>,
    completed: u64,
}

impl GenericUcb {
    pub fn new(
        alpha: f64,
        m: u64,
        b: u64,
        thetas: Vec<Arc<dyn MonotoneMap>>,
        gammas: Vec<Arc<dyn MonotoneMap>>,
        rewards: Vec<BlockReward>,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let k = rewards.len();
        if k == 0 || thetas.len() != k || gammas.len() != k {
            return Err(invalid("one θ, one γ and one reward per arm are required"));
        }
        for r in &rewards {
            r.validate()?;
            if !r.supports(m as usize) {
                return Err(invalid(format!("reward does not accept blocks of length {m}")));
            }
        }
        Ok(GenericUcb {
            alpha,
            m,
            b,
            thetas,
            gammas,
            rewards,
            pulls: vec![0; k],
            sums: vec![0.0; k],
            completed: 0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn thetas(&self) -> Vec<&dyn MonotoneMap> {
        self.thetas.iter().map(|t| t.as_ref()).collect()
    }

    pub fn gammas(&self) -> Vec<&dyn MonotoneMap> {
        self.gammas.iter().map(|g| g.as_ref()).collect()
    }
}

impl Policy for GenericUcb {
    fn name(&self) -> &'static str {
        "generic_ucb"
    }

    fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    fn step(&self) -> u64 {
        self.completed + 1
    }

    fn select(&self) -> Selection {
        let arm = generic_ucb_select(
            &self.empirical_means(),
            &self.pulls,
            self.step(),
            self.alpha,
            &self.thetas(),
            &self.gammas(),
        );
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

/// Which of the three failure events hold on a suboptimal selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventFlags {
    /// The best arm is underestimated beyond its width.
    pub e1: bool,
    /// The chosen arm is overestimated beyond its width.
    pub e2: bool,
    /// The chosen arm is still under-sampled.
    pub e3: bool,
}

impl EventFlags {
    pub fn any(&self) -> bool {
        self.e1 || self.e2 || self.e3
    }
}

/// Evaluates the failure events for a selection of `chosen` at step `t`,
/// given the state before the selection and the true means. Returns `None`
/// when `chosen` is optimal or some arm is still unpulled.
#[allow(clippy::too_many_arguments)]
pub fn check_events(
    chosen: usize,
    means_hat: &[f64],
    pulls: &[u64],
    true_means: &[f64],
    t: u64,
    log_horizon: f64,
    alpha: f64,
    thetas: &[&dyn MonotoneMap],
    gammas: &[&dyn MonotoneMap],
) -> Option<EventFlags> {
    if first_unpulled(pulls).is_some() {
        return None;
    }
    let best = argmax_first(true_means.iter().copied());
    let gap = true_means[best] - true_means[chosen];
    if gap <= 0.0 {
        return None;
    }
    let log_t = (t as f64).ln();
    let w_best = generic_width(thetas[best], gammas[best], alpha, log_t, pulls[best]);
    let w_chosen = generic_width(thetas[chosen], gammas[chosen], alpha, log_t, pulls[chosen]);
    let limit = thetas[chosen].inverse(alpha * log_horizon / gammas[chosen].eval(gap / 2.0));
    Some(EventFlags {
        e1: means_hat[best] < true_means[best] - w_best,
        e2: true_means[chosen] <= means_hat[chosen] - w_chosen,
        e3: pulls[chosen] as f64 <= limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixing::{BlockGeometry, HalfSquare, Identity, LambdaScaled, MixingProfile};

    #[test]
    fn classical_instantiation() {
        let maps: [&dyn MonotoneMap; 2] = [&Identity, &Identity];
        let gammas: [&dyn MonotoneMap; 2] = [&HalfSquare, &HalfSquare];
        assert_eq!(generic_ucb_select(&[0.9, 0.1], &[10, 10], 100, 3.0, &maps, &gammas), 0);
        assert_eq!(generic_ucb_select(&[0.5, 0.5], &[10, 4], 100, 3.0, &maps, &gammas), 1);
        assert_eq!(generic_ucb_select(&[0.5, 0.5], &[10, 0], 100, 3.0, &maps, &gammas), 1);
        let w = generic_width(&Identity, &HalfSquare, 3.0, 1.0, 6);
        assert!((w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_lambda_map_matches_identity() {
        let scaled = LambdaScaled {
            profile: MixingProfile::Zero,
            geometry: BlockGeometry::new(1, 0).unwrap(),
        };
        for n in 1..100u64 {
            let a = generic_width(&scaled, &HalfSquare, 3.0, 4.2, n);
            let b = generic_width(&Identity, &HalfSquare, 3.0, 4.2, n);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn events_none_for_optimal() {
        let maps: [&dyn MonotoneMap; 2] = [&Identity, &Identity];
        let gammas: [&dyn MonotoneMap; 2] = [&HalfSquare, &HalfSquare];
        assert!(check_events(0, &[0.5, 0.5], &[3, 3], &[0.6, 0.4], 7, 5.0, 3.0, &maps, &gammas).is_none());
        let flags = check_events(1, &[0.5, 0.5], &[3, 3], &[0.6, 0.4], 7, 5.0, 3.0, &maps, &gammas).unwrap();
        assert!(flags.e3);
    }
}
