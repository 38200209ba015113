//! Rested and restless simulation loops.
//!
//! Regret is charged from exact per-arm gaps supplied by the caller, so the
//! cumulative regret after every step is `Σ_k pulls_k·Δ_k`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::policies::{plan_length, Policy, Segment, Selection};
use crate::processes::{trajectory_seed, ArmProcess, ArmSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretDefinition {
    /// Block-mean shortfall against the best arm.
    RestedBlock,
    /// Value shortfall of the pulled arm's best combination.
    Combination,
    /// Per-selection block-mean shortfall in a restless world.
    Restless,
}

/// Regret definition plus the per-arm gaps it charges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretLedger {
    pub definition: RegretDefinition,
    pub gaps: Vec<f64>,
}

impl RegretLedger {
    pub fn new(definition: RegretDefinition, gaps: Vec<f64>) -> Result<Self> {
        if gaps.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(invalid("gaps must be finite and nonnegative"));
        }
        Ok(RegretLedger { definition, gaps })
    }

    /// Gaps `max(values) − values[k]`.
    pub fn from_values(definition: RegretDefinition, values: &[f64]) -> Result<Self> {
        let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        RegretLedger::new(definition, values.iter().map(|v| best - v).collect())
    }

    pub fn cumulative(&self, pulls: &[u64]) -> f64 {
        pulls.iter().zip(&self.gaps).map(|(&n, g)| n as f64 * g).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub arm: usize,
    pub m: u64,
    pub b: u64,
    pub reward: f64,
    pub inst_regret: f64,
    pub cum_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub total_regret: f64,
    pub pulls: Vec<u64>,
    pub empirical_means: Vec<f64>,
    /// Raw symbols consumed from each arm.
    pub clocks: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: Option<String>,
    pub seed: u64,
    pub policy: String,
    pub definition: RegretDefinition,
    pub steps: Vec<StepRecord>,
    pub summary: RunSummary,
}

impl RunRecord {
    pub fn chosen_arms(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.arm).collect()
    }

    /// Writes one CSV row per step.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for s in &self.steps {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Summary object without the per-step rows.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "config_hash": self.config_hash,
            "seed": self.seed,
            "policy": self.policy,
            "definition": self.definition,
            "horizon": self.steps.len(),
            "total_regret": self.summary.total_regret,
            "pulls": self.summary.pulls,
            "empirical_means": self.summary.empirical_means,
            "clocks": self.summary.clocks,
        })
    }
}

/// Builds every arm for one run; arm `k` gets a stream derived from `seed`
/// and its own salt.
pub fn build_arms(specs: &[ArmSpec], seed: u64) -> Result<Vec<ArmProcess>> {
    specs
        .iter()
        .enumerate()
        .map(|(k, spec)| spec.build(trajectory_seed(seed, k as u64)))
        .collect()
}

/// Called before each pull with the policy state, the decision and the
/// arms as they are before any symbol of the pull is drawn.
pub type Observer<'a> = dyn FnMut(&dyn Policy, &Selection, &[ArmProcess]) + 'a;

fn pull(arm: &mut ArmProcess, plan: &[Segment], out: &mut Vec<f64>) {
    out.clear();
    for seg in plan {
        match *seg {
            Segment::Emit(n) => arm.emit_into(n as usize, out),
            Segment::Skip(n) => arm.skip(n),
        }
    }
}

fn check_inputs(policy: &dyn Policy, arms: &[ArmProcess], ledger: &RegretLedger) -> Result<()> {
    if arms.len() != policy.num_arms() || ledger.gaps.len() != arms.len() {
        return Err(invalid(format!(
            "policy has {} arms, environment {}, ledger {}",
            policy.num_arms(),
            arms.len(),
            ledger.gaps.len()
        )));
    }
    Ok(())
}

fn simulate(
    policy: &mut dyn Policy,
    arms: &mut [ArmProcess],
    ledger: &RegretLedger,
    horizon: u64,
    seed: u64,
    restless: bool,
    mut observer: Option<&mut Observer<'_>>,
) -> Result<RunRecord> {
    check_inputs(policy, arms, ledger)?;
    let mut steps = Vec::with_capacity(horizon as usize);
    let mut observed = Vec::new();
    for _ in 0..horizon {
        let step = policy.step();
        let sel = policy.select();
        if let Some(obs) = observer.as_mut() {
            obs(&*policy, &sel, arms);
        }
        let plan = policy.pull_plan(&sel);
        pull(&mut arms[sel.arm], &plan, &mut observed);
        if restless {
            let len = plan_length(&plan);
            for (k, arm) in arms.iter_mut().enumerate() {
                if k != sel.arm {
                    arm.skip(len);
                }
            }
        }
        let reward = policy.update(&sel, &observed)?;
        steps.push(StepRecord {
            step,
            arm: sel.arm,
            m: sel.m,
            b: sel.b,
            reward,
            inst_regret: ledger.gaps[sel.arm],
            cum_regret: ledger.cumulative(policy.pulls()),
        });
    }
    Ok(RunRecord {
        config_hash: None,
        seed,
        policy: policy.name().to_string(),
        definition: ledger.definition,
        summary: RunSummary {
            total_regret: ledger.cumulative(policy.pulls()),
            pulls: policy.pulls().to_vec(),
            empirical_means: policy.empirical_means(),
            clocks: arms.iter().map(|a| a.clock()).collect(),
        },
        steps,
    })
}

/// Rested world: only the pulled arm's clock moves.
pub fn run_rested(
    policy: &mut dyn Policy,
    arms: &mut [ArmProcess],
    ledger: &RegretLedger,
    horizon: u64,
    seed: u64,
) -> Result<RunRecord> {
    simulate(policy, arms, ledger, horizon, seed, false, None)
}

pub fn run_rested_observed(
    policy: &mut dyn Policy,
    arms: &mut [ArmProcess],
    ledger: &RegretLedger,
    horizon: u64,
    seed: u64,
    observer: &mut Observer<'_>,
) -> Result<RunRecord> {
    simulate(policy, arms, ledger, horizon, seed, false, Some(observer))
}

/// Restless world: every other arm discards as many symbols as the pulled
/// arm consumed.
pub fn run_restless(
    policy: &mut dyn Policy,
    arms: &mut [ArmProcess],
    ledger: &RegretLedger,
    horizon: u64,
    seed: u64,
) -> Result<RunRecord> {
    simulate(policy, arms, ledger, horizon, seed, true, None)
}

pub fn run_restless_observed(
    policy: &mut dyn Policy,
    arms: &mut [ArmProcess],
    ledger: &RegretLedger,
    horizon: u64,
    seed: u64,
    observer: &mut Observer<'_>,
) -> Result<RunRecord> {
    simulate(policy, arms, ledger, horizon, seed, true, Some(observer))
}
