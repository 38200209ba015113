//! Arm-selection policies.
//!
//! Every policy follows the same protocol: [`Policy::select`] picks an arm
//! (and, for the combination policy, an `(m, b)` split), [`Policy::pull_plan`]
//! says which raw symbols of that arm are kept or discarded, and
//! [`Policy::update`] consumes the kept symbols in order.
//!
//! Each arm receives one forced pull, in id order, before any index is
//! computed. Index ties go to the lowest arm id.

use crate::error::Result;

mod block;
mod combo;
mod generic;
mod restless;

pub use block::{BlockUcb, ClassicalUcb};
pub use combo::{ComboIndex, ComboUcb};
pub use generic::{check_events, generic_ucb_select, generic_width, EventFlags, GenericUcb};
pub use restless::RestlessUcb;

/// One piece of a pull: keep `Emit(n)` symbols, discard `Skip(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Emit(u64),
    Skip(u64),
}

impl Segment {
    pub fn len(&self) -> u64 {
        match *self {
            Segment::Emit(n) | Segment::Skip(n) => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Raw length of a pull plan.
pub fn plan_length(plan: &[Segment]) -> u64 {
    plan.iter().map(Segment::len).sum()
}

/// Number of symbols a plan keeps.
pub fn plan_emitted(plan: &[Segment]) -> u64 {
    plan.iter()
        .map(|s| match *s {
            Segment::Emit(n) => n,
            Segment::Skip(_) => 0,
        })
        .sum()
}

/// A decision: arm plus the block split used for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    pub arm: usize,
    pub m: u64,
    pub b: u64,
}

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    fn num_arms(&self) -> usize;

    /// Index of the step about to be played, starting at 1.
    fn step(&self) -> u64;

    fn select(&self) -> Selection;

    fn pull_plan(&self, selection: &Selection) -> Vec<Segment>;

    /// Feeds the kept symbols of the pull and returns the realized reward.
    fn update(&mut self, selection: &Selection, observed: &[f64]) -> Result<f64>;

    fn pulls(&self) -> &[u64];

    /// Per-arm empirical means (the per-arm best value estimate for the
    /// combination policy).
    fn empirical_means(&self) -> Vec<f64>;
}

/// First arm with no pulls, if any.
pub(crate) fn first_unpulled(pulls: &[u64]) -> Option<usize> {
    pulls.iter().position(|&p| p == 0)
}

/// Position of the largest value; ties go to the first.
pub(crate) fn argmax_first(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(crate::error::invalid(format!("alpha {alpha} must be > 2")))
    }
}

/// √(2α·log t / τ): the classical UCB bonus.
pub fn ucb_bonus(alpha: f64, log_t: f64, pulls: u64) -> f64 {
    (2.0 * alpha * log_t / pulls as f64).sqrt()
}

/// Fixed-block index `mean + Λ·√(2α·log t / τ)`.
pub fn block_index(mean: f64, lambda: f64, alpha: f64, log_t: f64, pulls: u64) -> f64 {
    mean + lambda * ucb_bonus(alpha, log_t, pulls)
}

/// Restless bonus `√(2α·log t / (τ·𝓜²))`.
pub fn restless_bonus(normaliser: f64, alpha: f64, log_t: f64, pulls: u64) -> f64 {
    (2.0 * alpha * log_t / (pulls as f64 * normaliser * normaliser)).sqrt()
}

/// Combination index `β·(ψ̂ + √(2α·(m+b)·log t / (s·τ)))`.
pub fn combo_index(estimate: f64, beta: u64, period: u64, s: u64, alpha: f64, log_t: f64, pulls: u64) -> f64 {
    let bonus = (2.0 * alpha * period as f64 * log_t / (s as f64 * pulls as f64)).sqrt();
    beta as f64 * (estimate + bonus)
}
