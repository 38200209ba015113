use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::environments::{build_arms, run_rested, run_restless, RegretDefinition, RegretLedger, RunRecord};
use crate::error::{invalid, Error, Result};
use crate::mixing::{
    block_ucb_regret_bound, combo_regret_bound, generic_regret_bound, lambda_sum, m_sum, restless_m_sum,
    restless_regret_bound, solve_uk, BlockGeometry, HalfSquare, Identity, LambdaScaled, MixingProfile, MonotoneMap,
};
use crate::oracle::{standard_eps_grid, tail_estimate, value_table_with, write_tail_csv, TailRow, TailSpec};
use crate::policies::{BlockUcb, ClassicalUcb, ComboUcb, GenericUcb, Policy, RestlessUcb};
use crate::processes::{trajectory_seed, ArmProcess};
use crate::rewards::{exact_mu, monte_carlo_mu, BlockReward};

use super::config::{AssertionSpec, ExperimentConfig, GammaSpec, PolicySpec, Scenario, ThetaSpec};

/// Blocks used when an exact block mean is out of reach.
pub const FALLBACK_BLOCKS: u64 = 400_000;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; 0 uses the global pool.
    pub jobs: usize,
    /// Overrides the config's output directory.
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointStat {
    pub step: u64,
    pub mean_regret: f64,
    pub stderr: f64,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCaseReport {
    pub case: usize,
    pub arm: usize,
    pub spec: TailSpec,
    pub mu: f64,
    pub rows: Vec<TailRow>,
}

/// Ground truth used for a simulation matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    /// Per-arm μ (fixed-block and restless) or best combination value.
    pub values: Vec<f64>,
    pub gaps: Vec<f64>,
    pub best_arm: usize,
    /// Best `(m, b)` of the best arm, for the combination scenario.
    pub best_combination: Option<(u64, u64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config_hash: String,
    pub scenario: Scenario,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    pub oracle: Option<OracleSummary>,
    pub checkpoints: Vec<CheckpointStat>,
    pub runs: Vec<serde_json::Value>,
    pub tails: Vec<TailCaseReport>,
    pub assertions: Vec<AssertionReport>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub records: Vec<RunRecord>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn mean_final_regret(&self) -> Option<f64> {
        self.checkpoints.last().map(|c| c.mean_regret)
    }
}

/// Steps ⌈10^{j/8}⌉ up to `horizon`, plus the horizon itself.
pub fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for j in 0.. {
        let t = 10f64.powf(j as f64 / 8.0).ceil() as u64;
        if t > horizon {
            break;
        }
        if out.last() != Some(&t) {
            out.push(t);
        }
    }
    if out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

/// Builds a policy for arms with the given certified profiles.
pub fn make_policy(spec: &PolicySpec, profiles: &[MixingProfile], rewards: &[BlockReward]) -> Result<Box<dyn Policy>> {
    let rewards = rewards.to_vec();
    Ok(match spec {
        PolicySpec::BlockUcb { alpha, m, b } => {
            Box::new(BlockUcb::new(*alpha, BlockGeometry::new(*m, *b)?, profiles.to_vec(), rewards)?)
        }
        PolicySpec::ClassicalUcb { alpha, m, b } => Box::new(ClassicalUcb::new(*alpha, *m, *b, rewards)?),
        PolicySpec::ComboUcb { alpha, s } => Box::new(ComboUcb::new(*alpha, *s, profiles.to_vec(), rewards)?),
        PolicySpec::RestlessUcb { alpha, m_k } => {
            Box::new(RestlessUcb::new(*alpha, m_k.clone(), profiles.to_vec(), rewards)?)
        }
        PolicySpec::GenericUcb {
            alpha,
            m,
            b,
            theta,
            gamma,
        } => {
            let (thetas, gammas) = generic_maps(*theta, *gamma, profiles, BlockGeometry::new(*m, *b)?);
            Box::new(GenericUcb::new(*alpha, *m, *b, thetas, gammas, rewards)?)
        }
    })
}

type MapList = Vec<Arc<dyn MonotoneMap>>;

fn generic_maps(theta: ThetaSpec, gamma: GammaSpec, profiles: &[MixingProfile], geometry: BlockGeometry) -> (MapList, MapList) {
    let thetas = profiles
        .iter()
        .map(|p| -> Arc<dyn MonotoneMap> {
            match theta {
                ThetaSpec::Identity => Arc::new(Identity),
                ThetaSpec::LambdaScaled => Arc::new(LambdaScaled {
                    profile: p.clone(),
                    geometry,
                }),
            }
        })
        .collect();
    let gammas = profiles
        .iter()
        .map(|_| -> Arc<dyn MonotoneMap> {
            match gamma {
                GammaSpec::HalfSquare => Arc::new(HalfSquare),
            }
        })
        .collect();
    (thetas, gammas)
}

/// Regret bound at step `t` for the configured policy, or `None` when it is
/// undefined (t = 1) or unbounded.
pub fn regret_bound(
    scenario: Scenario,
    spec: &PolicySpec,
    profiles: &[MixingProfile],
    gaps: &[f64],
    t: u64,
) -> Result<Option<f64>> {
    if t < 2 {
        return Ok(None);
    }
    let log_t = (t as f64).ln();
    let alpha = spec.alpha();
    let result = match (scenario, spec) {
        (Scenario::ConcentrationLab, _) => return Ok(None),
        (Scenario::Restless, _) | (_, PolicySpec::RestlessUcb { .. }) => Ok(restless_regret_bound(gaps, alpha, log_t)),
        (_, PolicySpec::ComboUcb { s, .. }) => Ok(combo_regret_bound(*s, gaps, alpha, log_t)),
        (_, PolicySpec::BlockUcb { m, b, .. }) => {
            block_ucb_regret_bound(profiles, BlockGeometry::new(*m, *b)?, gaps, alpha, log_t)
        }
        (_, PolicySpec::ClassicalUcb { m, b, .. }) => {
            let zero = vec![MixingProfile::Zero; gaps.len()];
            block_ucb_regret_bound(&zero, BlockGeometry::new(*m, *b)?, gaps, alpha, log_t)
        }
        (
            _,
            PolicySpec::GenericUcb {
                m, b, theta, gamma, ..
            },
        ) => {
            let (thetas, gammas) = generic_maps(*theta, *gamma, profiles, BlockGeometry::new(*m, *b)?);
            let mut total = 0.0;
            let mut err = None;
            for (k, &gap) in gaps.iter().enumerate() {
                if gap > 0.0 {
                    match generic_regret_bound(thetas[k].as_ref(), gammas[k].as_ref(), &[gap], alpha, log_t) {
                        Ok(v) => total += v,
                        Err(e) => err = Some(e),
                    }
                }
            }
            match err {
                Some(e) => Err(e),
                None if total.is_finite() => Ok(total),
                None => Err(Error::UnboundedRegret {
                    u_max: crate::mixing::DEFAULT_U_MAX,
                }),
            }
        }
    };
    match result {
        Ok(v) => Ok(Some(v)),
        Err(Error::UnboundedRegret { .. }) | Err(Error::NonSummable) => Ok(None),
        Err(e) => Err(e),
    }
}

fn mu_or_fallback(
    reward: &BlockReward,
    arm: &ArmProcess,
    m: usize,
    seed: u64,
    label: &str,
    warnings: &mut Vec<String>,
) -> Result<f64> {
    match exact_mu(reward, arm, m) {
        Ok(v) => Ok(v),
        Err(Error::Infeasible(why)) => {
            let (mean, stderr) = monte_carlo_mu(reward, arm, m, FALLBACK_BLOCKS, seed)?;
            warnings.push(format!(
                "{label}: exact block mean unavailable ({why}); using Monte Carlo {mean:.6} ± {stderr:.1e}"
            ));
            Ok(mean)
        }
        Err(e) => Err(e),
    }
}

/// Oracle for a simulation scenario, computed on template arms.
pub fn scenario_oracle(config: &ExperimentConfig, warnings: &mut Vec<String>) -> Result<OracleSummary> {
    let policy = config.policy.as_ref().ok_or_else(|| invalid("scenario needs a policy"))?;
    let arms = build_arms(&config.arms, 0)?;
    let rewards = config.rewards_per_arm();
    match policy {
        PolicySpec::ComboUcb { s, .. } => {
            let mut mu = |k: usize, m: usize| {
                mu_or_fallback(&rewards[k], &arms[k], m, trajectory_seed(0xC0FFEE, k as u64), &format!("arm {k}, m = {m}"), warnings)
            };
            let table = value_table_with(&arms, &rewards, *s, &mut mu)?;
            Ok(OracleSummary {
                values: table.per_arm.iter().map(|e| e.value).collect(),
                gaps: table.gaps.clone(),
                best_arm: table.best.arm,
                best_combination: Some((table.best.m, table.best.b)),
            })
        }
        _ => {
            let lens = policy.block_lens(arms.len()).expect("fixed block lengths");
            let mut values = Vec::with_capacity(arms.len());
            for (k, arm) in arms.iter().enumerate() {
                values.push(mu_or_fallback(
                    &rewards[k],
                    arm,
                    lens[k] as usize,
                    trajectory_seed(0xC0FFEE, k as u64),
                    &format!("arm {k}"),
                    warnings,
                )?);
            }
            let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let best_arm = values.iter().position(|&v| v == best).unwrap_or(0);
            Ok(OracleSummary {
                gaps: values.iter().map(|v| best - v).collect(),
                values,
                best_arm,
                best_combination: None,
            })
        }
    }
}

fn definition(config: &ExperimentConfig) -> RegretDefinition {
    match config.scenario {
        Scenario::RestedCombo => RegretDefinition::Combination,
        Scenario::Restless => RegretDefinition::Restless,
        _ => RegretDefinition::RestedBlock,
    }
}

/// Simulates one seed with `spec`.
pub fn run_seed(config: &ExperimentConfig, spec: &PolicySpec, ledger: &RegretLedger, seed: u64) -> Result<RunRecord> {
    let mut arms = build_arms(&config.arms, seed)?;
    let profiles: Vec<MixingProfile> = arms.iter().map(|a| a.profile().clone()).collect();
    let mut policy = make_policy(spec, &profiles, &config.rewards_per_arm())?;
    let mut record = match config.scenario {
        Scenario::Restless => run_restless(policy.as_mut(), &mut arms, ledger, config.horizon, seed)?,
        _ => run_rested(policy.as_mut(), &mut arms, ledger, config.horizon, seed)?,
    };
    record.config_hash = Some(config.hash()?);
    Ok(record)
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs a config end to end. Artifacts are written when an output
/// directory is configured.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentReport> {
    config.validate()?;
    let seeds = config.seeds.seeds()?;
    let out_dir = options.output.clone().or_else(|| config.output.as_ref().map(PathBuf::from));
    let mut report = ExperimentReport {
        config_hash: config.hash()?,
        scenario: config.scenario,
        horizon: config.horizon,
        seeds: seeds.clone(),
        oracle: None,
        checkpoints: Vec::new(),
        runs: Vec::new(),
        tails: Vec::new(),
        assertions: Vec::new(),
        warnings: Vec::new(),
        records: Vec::new(),
    };
    if config.scenario == Scenario::ConcentrationLab {
        run_lab(config, &seeds, options, &mut report)?;
    } else {
        run_matrix(config, &seeds, options, &mut report)?;
    }
    if let Some(dir) = &out_dir {
        write_bundle(dir, &report)?;
    }
    Ok(report)
}

fn run_matrix(config: &ExperimentConfig, seeds: &[u64], options: &RunOptions, report: &mut ExperimentReport) -> Result<()> {
    let policy = config.policy.clone().expect("validated");
    let oracle = scenario_oracle(config, &mut report.warnings)?;
    let ledger = RegretLedger::new(definition(config), oracle.gaps.clone())?;
    let records: Vec<RunRecord> = with_pool(options.jobs, || {
        seeds
            .par_iter()
            .map(|&seed| run_seed(config, &policy, &ledger, seed))
            .collect::<Result<Vec<_>>>()
    })??;

    let profiles: Vec<MixingProfile> = build_arms(&config.arms, 0)?.iter().map(|a| a.profile().clone()).collect();
    for t in checkpoints(config.horizon) {
        let values: Vec<f64> = records.iter().map(|r| r.steps[(t - 1) as usize].cum_regret).collect();
        let (mean, stderr) = mean_stderr(&values);
        report.checkpoints.push(CheckpointStat {
            step: t,
            mean_regret: mean,
            stderr,
            bound: regret_bound(config.scenario, &policy, &profiles, &oracle.gaps, t)?,
        });
    }
    report.runs = records.iter().map(RunRecord::summary_json).collect();
    report.oracle = Some(oracle);
    report.records = records;

    for a in &config.assertions {
        let r = evaluate_assertion(config, a, &ledger, options, report)?;
        report.assertions.push(r);
    }
    Ok(())
}

fn evaluate_assertion(
    config: &ExperimentConfig,
    assertion: &AssertionSpec,
    ledger: &RegretLedger,
    options: &RunOptions,
    report: &ExperimentReport,
) -> Result<AssertionReport> {
    let last = report.checkpoints.last().expect("horizon >= 1");
    Ok(match assertion {
        AssertionSpec::IdenticalChoices { policy } => {
            let others: Vec<RunRecord> = with_pool(options.jobs, || {
                report
                    .records
                    .par_iter()
                    .map(|r| run_seed(config, policy, ledger, r.seed))
                    .collect::<Result<Vec<_>>>()
            })??;
            let mismatched: Vec<u64> = report
                .records
                .iter()
                .zip(&others)
                .filter(|(a, b)| a.chosen_arms() != b.chosen_arms())
                .map(|(a, _)| a.seed)
                .collect();
            AssertionReport {
                name: format!("identical_choices vs {}", policy.kind()),
                passed: mismatched.is_empty(),
                detail: if mismatched.is_empty() {
                    format!("{} seeds identical over {} steps", others.len(), config.horizon)
                } else {
                    format!("sequences differ for seeds {mismatched:?}")
                },
            }
        }
        AssertionSpec::RegretBelowBound { factor } => match last.bound {
            Some(bound) => AssertionReport {
                name: "regret_below_bound".into(),
                passed: last.mean_regret <= factor * bound,
                detail: format!("mean regret {:.3} vs {factor} x bound {bound:.3}", last.mean_regret),
            },
            None => AssertionReport {
                name: "regret_below_bound".into(),
                passed: false,
                detail: "bound undefined or unbounded at the horizon".into(),
            },
        },
        AssertionSpec::MaxRegret { value } => AssertionReport {
            name: "max_regret".into(),
            passed: last.mean_regret <= *value,
            detail: format!("mean regret {:.6} vs limit {value}", last.mean_regret),
        },
        AssertionSpec::LogGrowth { from, tolerance } => {
            let ratios: Vec<(u64, f64)> = report
                .checkpoints
                .iter()
                .filter(|c| c.step >= *from && c.step >= 2)
                .map(|c| (c.step, c.mean_regret / (c.step as f64).ln()))
                .collect();
            let worst = ratios
                .windows(2)
                .map(|w| (w[1].0, w[1].1 / w[0].1))
                .filter(|(_, q)| q.is_finite())
                .fold((0, 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
            AssertionReport {
                name: "log_growth".into(),
                passed: ratios.len() >= 2 && worst.1 <= 1.0 + tolerance,
                detail: format!(
                    "{} checkpoints from t = {from}; largest step-to-step ratio {:.4} at t = {}",
                    ratios.len(),
                    worst.1,
                    worst.0
                ),
            }
        }
        AssertionSpec::BestShare {
            min_share,
            final_fraction,
            combination,
        } => {
            let oracle = report.oracle.as_ref().expect("simulation oracle");
            let window = ((config.horizon as f64 * final_fraction).ceil() as usize).max(1);
            let target = if *combination { oracle.best_combination } else { None };
            let shares: Vec<f64> = report
                .records
                .iter()
                .map(|r| {
                    let tail = &r.steps[r.steps.len() - window..];
                    let hits = tail
                        .iter()
                        .filter(|s| s.arm == oracle.best_arm && target.is_none_or(|(m, b)| s.m == m && s.b == b))
                        .count();
                    hits as f64 / window as f64
                })
                .collect();
            let (mean, _) = mean_stderr(&shares);
            AssertionReport {
                name: if *combination { "best_combination_share" } else { "best_arm_share" }.into(),
                passed: mean >= *min_share,
                detail: format!("mean share {mean:.4} over final {window} steps vs {min_share}"),
            }
        }
        AssertionSpec::TailsDominated => unreachable!("rejected by validation"),
    })
}

fn run_lab(config: &ExperimentConfig, seeds: &[u64], options: &RunOptions, report: &mut ExperimentReport) -> Result<()> {
    let conc = config.concentration.as_ref().expect("validated");
    let arms = build_arms(&config.arms, seeds[0])?;
    let eps = conc.eps.clone().unwrap_or_else(standard_eps_grid);
    for (i, case) in conc.cases.iter().enumerate() {
        let reward = config.reward(case.arm);
        let arm = &arms[case.arm];
        let mu = mu_or_fallback(
            reward,
            arm,
            case.m as usize,
            trajectory_seed(seeds[0], 7919 + i as u64),
            &format!("case {i}"),
            &mut report.warnings,
        )?;
        let spec = TailSpec {
            mode: case.mode,
            m: case.m,
            b: case.b,
            n: case.n,
            eps: eps.clone(),
            trials: conc.trials,
            seed: trajectory_seed(seeds[0], i as u64),
        };
        let rows = with_pool(options.jobs, || tail_estimate(arm, reward, mu, &spec))??;
        report.tails.push(TailCaseReport {
            case: i,
            arm: case.arm,
            spec,
            mu,
            rows,
        });
    }
    for a in &config.assertions {
        if let AssertionSpec::TailsDominated = a {
            let failures: Vec<String> = report
                .tails
                .iter()
                .flat_map(|c| {
                    c.rows
                        .iter()
                        .filter(|r| !r.pass)
                        .map(move |r| format!("case {} at eps {:.2}", c.case, r.epsilon))
                })
                .collect();
            report.assertions.push(AssertionReport {
                name: "tails_dominated".into(),
                passed: failures.is_empty(),
                detail: if failures.is_empty() {
                    format!("{} cases, every row within its bound", report.tails.len())
                } else {
                    format!("exceeded: {}", failures.join(", "))
                },
            });
        }
    }
    Ok(())
}

fn write_bundle(dir: &Path, report: &ExperimentReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for record in &report.records {
        let mut buf = Vec::new();
        record.write_csv(&mut buf)?;
        write_atomic(&dir.join("runs").join(format!("seed_{}.csv", record.seed)), &buf)?;
    }
    if !report.checkpoints.is_empty() {
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &report.checkpoints {
            w.serialize(c)?;
        }
        let buf = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        write_atomic(&dir.join("bounds.csv"), &buf)?;
    }
    for case in &report.tails {
        let mut buf = Vec::new();
        write_tail_csv(&case.rows, &mut buf)?;
        write_atomic(&dir.join(format!("tails_case{}.csv", case.case)), &buf)?;
    }
    let json = serde_json::to_vec_pretty(report)?;
    write_atomic(&dir.join("aggregate.json"), &json)?;
    Ok(())
}

fn fmt_value(v: Result<f64>) -> String {
    match v {
        Ok(x) => format!("{x:.6}"),
        Err(Error::NonSummable) => "non-summable".into(),
        Err(Error::UnboundedRegret { .. }) => "unbounded".into(),
        Err(e) => format!("error: {e}"),
    }
}

/// Text tables of Λ, M, 𝓜, u_k and the regret bound, without simulating.
pub fn bounds_report(config: &ExperimentConfig) -> Result<String> {
    config.validate()?;
    let arms = build_arms(&config.arms, 0)?;
    let mut out = String::new();
    let mut warnings = Vec::new();
    let oracle = match &config.policy {
        Some(_) => Some(scenario_oracle(config, &mut warnings)?),
        None => None,
    };
    let horizon = config.horizon.max(2);
    let geometry = match &config.policy {
        Some(PolicySpec::BlockUcb { m, b, .. })
        | Some(PolicySpec::ClassicalUcb { m, b, .. })
        | Some(PolicySpec::GenericUcb { m, b, .. }) => Some(BlockGeometry::new(*m, *b)?),
        _ => None,
    };
    for (k, arm) in arms.iter().enumerate() {
        let p = arm.profile();
        writeln!(out, "arm {k}: {p:?}").ok();
        if let Some(o) = &oracle {
            writeln!(out, "  value {:.6}  gap {:.6}", o.values[k], o.gaps[k]).ok();
        }
        writeln!(out, "  {:>6} {:>14} {:>14}", "b", "M(b)", "𝓜(b)").ok();
        for b in 0..=8u64 {
            writeln!(out, "  {b:>6} {:>14} {:>14}", fmt_value(m_sum(p, b)), fmt_value(restless_m_sum(p, b))).ok();
        }
        if let Some(g) = geometry {
            writeln!(out, "  Λ(τ) for m = {}, b = {}:", g.m, g.b).ok();
            let mut taus = vec![1, 10, 100, 1000];
            taus.retain(|&t| t < horizon);
            taus.push(horizon);
            for t in taus {
                writeln!(out, "  {t:>10} {:>14.6}", lambda_sum(p, g, t)).ok();
            }
            if let (Some(o), Some(policy)) = (&oracle, &config.policy) {
                if o.gaps[k] > 0.0 {
                    let u = solve_uk(p, g, o.gaps[k], policy.alpha(), (horizon as f64).ln());
                    writeln!(out, "  u_k at τ = {horizon}: {}", fmt_value(u)).ok();
                }
            }
        }
    }
    if let (Some(o), Some(policy)) = (&oracle, &config.policy) {
        let profiles: Vec<MixingProfile> = arms.iter().map(|a| a.profile().clone()).collect();
        let bound = regret_bound(config.scenario, policy, &profiles, &o.gaps, horizon)?;
        match bound {
            Some(v) => writeln!(out, "regret bound at T = {horizon} ({}): {v:.3}", policy.kind()).ok(),
            None => writeln!(out, "regret bound at T = {horizon} ({}): unbounded", policy.kind()).ok(),
        };
    }
    for w in warnings {
        writeln!(out, "warning: {w}").ok();
    }
    Ok(out)
}
