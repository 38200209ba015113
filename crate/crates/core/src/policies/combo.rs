use crate::error::{invalid, Error, Result};
use crate::mixing::{combinations, m_sum, Combination, MixingProfile};
use crate::rewards::BlockReward;

use super::{argmax_first, check_alpha, combo_index, first_unpulled, Policy, Segment, Selection};

/// Index of one `(arm, m, b)` triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComboIndex {
    pub arm: usize,
    pub combination: Combination,
    /// β·ψ̂
    pub exploitation: f64,
    pub bonus: f64,
}

impl ComboIndex {
    pub fn value(&self) -> f64 {
        self.exploitation + self.bonus
    }
}

#[derive(Debug, Clone)]
struct ArmBook {
    combos: Vec<Combination>,
    normalisers: Vec<f64>,
    sums: Vec<f64>,
}

/// Block-UCB over every `(m, b)` with `(m + b) | s`.
///
/// Each pull records `s` consecutive symbols once; every combination's
/// estimator reads its own keep/discard view of those symbols.
#[derive(Debug, Clone)]
pub struct ComboUcb {
    alpha: f64,
    s: u64,
    rewards: Vec<BlockReward>,
    books: Vec<ArmBook>,
    pulls: Vec<u64>,
    completed: u64,
}

impl ComboUcb {
    pub fn new(alpha: f64, s: u64, profiles: Vec<MixingProfile>, rewards: Vec<BlockReward>) -> Result<Self> {
        check_alpha(alpha)?;
        if s == 0 {
            return Err(invalid("s must be >= 1"));
        }
        if rewards.is_empty() || profiles.len() != rewards.len() {
            return Err(invalid("one mixing profile and one reward per arm are required"));
        }
        let all = combinations(s);
        let mut books = Vec::with_capacity(rewards.len());
        for (k, (profile, reward)) in profiles.iter().zip(&rewards).enumerate() {
            profile.validate()?;
            reward.validate()?;
            let combos: Vec<Combination> = all.iter().copied().filter(|c| reward.supports(c.m as usize)).collect();
            if combos.is_empty() {
                return Err(invalid(format!("reward of arm {k} accepts no block length dividing s = {s}")));
            }
            let normalisers = combos.iter().map(|c| m_sum(profile, c.b)).collect::<Result<Vec<_>>>()?;
            books.push(ArmBook {
                sums: vec![0.0; combos.len()],
                combos,
                normalisers,
            });
        }
        let k = rewards.len();
        Ok(ComboUcb {
            alpha,
            s,
            rewards,
            books,
            pulls: vec![0; k],
            completed: 0,
        })
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn combinations(&self, arm: usize) -> &[Combination] {
        &self.books[arm].combos
    }

    /// ψ̂ for one combination: the kept-block sum scaled by 1/(M(b)·β·τ).
    pub fn estimate(&self, arm: usize, combo: usize) -> f64 {
        let book = &self.books[arm];
        let c = book.combos[combo];
        let tau = self.pulls[arm];
        if tau == 0 {
            return 0.0;
        }
        book.sums[combo] / (book.normalisers[combo] * c.beta as f64 * tau as f64)
    }

    /// Indices of all combinations of `arm`. Requires the arm to be pulled.
    pub fn indices(&self, arm: usize) -> Vec<ComboIndex> {
        let log_t = (self.step() as f64).ln();
        let tau = self.pulls[arm];
        self.books[arm]
            .combos
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let est = self.estimate(arm, j);
                let full = combo_index(est, c.beta, c.period(), self.s, self.alpha, log_t, tau);
                let exploitation = c.beta as f64 * est;
                ComboIndex {
                    arm,
                    combination: c,
                    exploitation,
                    bonus: full - exploitation,
                }
            })
            .collect()
    }

    fn best_combo(&self, arm: usize) -> (usize, f64) {
        let log_t = (self.step() as f64).ln();
        let tau = self.pulls[arm];
        let book = &self.books[arm];
        let values: Vec<f64> = book
            .combos
            .iter()
            .enumerate()
            .map(|(j, c)| combo_index(self.estimate(arm, j), c.beta, c.period(), self.s, self.alpha, log_t, tau))
            .collect();
        let j = argmax_first(values.iter().copied());
        (j, values[j])
    }
}

impl Policy for ComboUcb {
    fn name(&self) -> &'static str {
        "combo_ucb"
    }

    fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    fn step(&self) -> u64 {
        self.completed + 1
    }

    fn select(&self) -> Selection {
        let (arm, combo) = match first_unpulled(&self.pulls) {
            Some(k) => (k, 0),
            None => {
                let best: Vec<(usize, f64)> = (0..self.num_arms()).map(|k| self.best_combo(k)).collect();
                let arm = argmax_first(best.iter().map(|b| b.1));
                (arm, best[arm].0)
            }
        };
        let c = self.books[arm].combos[combo];
        Selection { arm, m: c.m, b: c.b }
    }

    fn pull_plan(&self, _selection: &Selection) -> Vec<Segment> {
        vec![Segment::Emit(self.s)]
    }

    fn update(&mut self, selection: &Selection, observed: &[f64]) -> Result<f64> {
        if observed.len() as u64 != self.s {
            return Err(Error::LengthMismatch {
                expected: self.s as usize,
                got: observed.len(),
            });
        }
        let k = selection.arm;
        let reward = &self.rewards[k];
        let book = &mut self.books[k];
        let mut realized = None;
        for (j, c) in book.combos.iter().enumerate() {
            let (m, p) = (c.m as usize, c.period() as usize);
            let mut total = 0.0;
            for r in 0..c.beta as usize {
                total += reward.evaluate(m, &observed[r * p..r * p + m])?;
            }
            book.sums[j] += total;
            if c.m == selection.m && c.b == selection.b {
                realized = Some(total);
            }
        }
        self.pulls[k] += 1;
        self.completed += 1;
        realized.ok_or_else(|| invalid(format!("arm {k} has no combination ({}, {})", selection.m, selection.b)))
    }

    fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    fn empirical_means(&self) -> Vec<f64> {
        (0..self.num_arms())
            .map(|k| {
                let book = &self.books[k];
                (0..book.combos.len())
                    .map(|j| book.combos[j].beta as f64 * self.estimate(k, j))
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}
