use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{config_err, Error, Result};
use crate::oracle::TailMode;
use crate::processes::ArmSpec;
use crate::rewards::BlockReward;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    RestedFixed,
    RestedCombo,
    Restless,
    ConcentrationLab,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSpec {
    /// θ(n) = n
    Identity,
    /// θ(n) = n / Λ²(n) with the arm's certified profile
    LambdaScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSpec {
    /// γ(ε) = ε²/2
    HalfSquare,
}

fn default_m() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    BlockUcb {
        alpha: f64,
        m: u64,
        #[serde(default)]
        b: u64,
    },
    ClassicalUcb {
        alpha: f64,
        #[serde(default = "default_m")]
        m: u64,
        #[serde(default)]
        b: u64,
    },
    ComboUcb {
        alpha: f64,
        s: u64,
    },
    RestlessUcb {
        alpha: f64,
        m_k: Vec<u64>,
    },
    GenericUcb {
        alpha: f64,
        #[serde(default = "default_m")]
        m: u64,
        #[serde(default)]
        b: u64,
        theta: ThetaSpec,
        gamma: GammaSpec,
    },
}

impl PolicySpec {
    pub fn alpha(&self) -> f64 {
        match *self {
            PolicySpec::BlockUcb { alpha, .. }
            | PolicySpec::ClassicalUcb { alpha, .. }
            | PolicySpec::ComboUcb { alpha, .. }
            | PolicySpec::RestlessUcb { alpha, .. }
            | PolicySpec::GenericUcb { alpha, .. } => alpha,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PolicySpec::BlockUcb { .. } => "block_ucb",
            PolicySpec::ClassicalUcb { .. } => "classical_ucb",
            PolicySpec::ComboUcb { .. } => "combo_ucb",
            PolicySpec::RestlessUcb { .. } => "restless_ucb",
            PolicySpec::GenericUcb { .. } => "generic_ucb",
        }
    }

    /// Kept symbols per pull for each of `arms` arms, where that is fixed.
    pub fn block_lens(&self, arms: usize) -> Option<Vec<u64>> {
        match self {
            PolicySpec::BlockUcb { m, .. } | PolicySpec::ClassicalUcb { m, .. } | PolicySpec::GenericUcb { m, .. } => {
                Some(vec![*m; arms])
            }
            PolicySpec::RestlessUcb { m_k, .. } => Some(m_k.clone()),
            PolicySpec::ComboUcb { .. } => None,
        }
    }

    fn check(&self, field: &str, scenario: Scenario, arms: usize) -> Result<()> {
        let alpha = self.alpha();
        if !(alpha > 2.0 && alpha.is_finite()) {
            return Err(config_err(format!("{field}.alpha"), format!("must be > 2, got {alpha}")));
        }
        let allowed: &[&str] = match scenario {
            Scenario::RestedFixed => &["block_ucb", "classical_ucb", "generic_ucb"],
            Scenario::RestedCombo => &["combo_ucb"],
            Scenario::Restless => &["restless_ucb", "classical_ucb"],
            Scenario::ConcentrationLab => &[],
        };
        if !allowed.contains(&self.kind()) {
            return Err(config_err(
                format!("{field}.kind"),
                format!("`{}` is not allowed in scenario {scenario:?}; expected one of {allowed:?}", self.kind()),
            ));
        }
        match self {
            PolicySpec::BlockUcb { m, .. } | PolicySpec::ClassicalUcb { m, .. } | PolicySpec::GenericUcb { m, .. }
                if *m == 0 =>
            {
                Err(config_err(format!("{field}.m"), "must be >= 1"))
            }
            PolicySpec::ComboUcb { s: 0, .. } => Err(config_err(format!("{field}.s"), "must be >= 1")),
            PolicySpec::RestlessUcb { m_k, .. } => {
                if m_k.len() != arms {
                    Err(config_err(format!("{field}.m_k"), format!("needs {arms} entries, got {}", m_k.len())))
                } else if m_k.contains(&0) {
                    Err(config_err(format!("{field}.m_k"), "entries must be >= 1"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list: Option<Vec<u64>>,
}

impl SeedSpec {
    pub fn range(base: u64, count: u64) -> Self {
        SeedSpec {
            base: Some(base),
            count: Some(count),
            list: None,
        }
    }

    pub fn seeds(&self) -> Result<Vec<u64>> {
        match (self.base, self.count, &self.list) {
            (None, None, Some(list)) if !list.is_empty() => Ok(list.clone()),
            (Some(base), Some(count), None) if count > 0 => Ok((0..count).map(|i| base.wrapping_add(i)).collect()),
            _ => Err(config_err("seeds", "give either a nonempty `list` or both `base` and `count` >= 1")),
        }
    }
}

fn default_tolerance() -> f64 {
    0.1
}

fn default_from() -> u64 {
    1000
}

fn default_final_fraction() -> f64 {
    0.1
}

fn default_factor() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AssertionSpec {
    /// Every seed gives the same chosen-arm sequence under `policy`.
    IdenticalChoices { policy: PolicySpec },
    /// Mean cumulative regret at the horizon is at most `factor` × bound.
    RegretBelowBound {
        #[serde(default = "default_factor")]
        factor: f64,
    },
    /// Mean cumulative regret at the horizon is at most `value`.
    MaxRegret { value: f64 },
    /// regret/log t at consecutive checkpoints `t ≥ from` never grows by more
    /// than a factor `1 + tolerance`.
    LogGrowth {
        #[serde(default = "default_from")]
        from: u64,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
    },
    /// The oracle-best arm (and combination, when `combination` is set) gets
    /// at least `min_share` of the selections in the final
    /// `final_fraction` of the horizon, averaged over seeds.
    BestShare {
        min_share: f64,
        #[serde(default = "default_final_fraction")]
        final_fraction: f64,
        #[serde(default)]
        combination: bool,
    },
    /// Every concentration row passes.
    TailsDominated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailCase {
    pub arm: usize,
    pub mode: TailMode,
    pub m: u64,
    #[serde(default)]
    pub b: u64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationSpec {
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    pub cases: Vec<TailCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub horizon: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub seeds: SeedSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicySpec>,
    pub arms: Vec<ArmSpec>,
    pub rewards: Vec<BlockReward>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<AssertionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concentration: Option<ConcentrationSpec>,
}

fn field_from_message(message: &str) -> String {
    // toml names the offending key in backticks for unknown/missing fields.
    for marker in ["unknown field `", "missing field `", "unknown variant `"] {
        if let Some(start) = message.find(marker) {
            let rest = &message[start + marker.len()..];
            if let Some(end) = rest.find('`') {
                return rest[..end].to_string();
            }
        }
    }
    "<document>".to_string()
}

impl ExperimentConfig {
    /// Parses and validates a config.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let message = e.to_string();
            Error::Config {
                field: field_from_message(&message),
                message: message.trim().to_string(),
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Canonical text form.
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// SHA-256 of the canonical form, in hex.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Reward of arm `k`; a single reward applies to every arm.
    pub fn reward(&self, k: usize) -> &BlockReward {
        if self.rewards.len() == 1 {
            &self.rewards[0]
        } else {
            &self.rewards[k]
        }
    }

    pub fn rewards_per_arm(&self) -> Vec<BlockReward> {
        (0..self.arms.len()).map(|k| self.reward(k).clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms.is_empty() {
            return Err(config_err("arms", "at least one arm is required"));
        }
        for (k, arm) in self.arms.iter().enumerate() {
            arm.build(0).map_err(|e| config_err(format!("arms[{k}]"), e.to_string()))?;
        }
        if self.rewards.len() != 1 && self.rewards.len() != self.arms.len() {
            return Err(config_err(
                "rewards",
                format!("give one reward or one per arm ({}), got {}", self.arms.len(), self.rewards.len()),
            ));
        }
        for (k, r) in self.rewards.iter().enumerate() {
            r.validate().map_err(|e| config_err(format!("rewards[{k}]"), e.to_string()))?;
        }
        self.seeds.seeds()?;
        match self.scenario {
            Scenario::ConcentrationLab => {
                if self.policy.is_some() {
                    return Err(config_err("policy", "not used by the concentration lab"));
                }
                let conc = self
                    .concentration
                    .as_ref()
                    .ok_or_else(|| config_err("concentration", "required by the concentration lab"))?;
                self.check_concentration(conc)?;
            }
            _ => {
                let policy = self.policy.as_ref().ok_or_else(|| config_err("policy", "required"))?;
                policy.check("policy", self.scenario, self.arms.len())?;
                if self.horizon == 0 {
                    return Err(config_err("horizon", "must be >= 1"));
                }
                if self.concentration.is_some() {
                    return Err(config_err("concentration", "only valid in the concentration lab"));
                }
                if let Some(lens) = policy.block_lens(self.arms.len()) {
                    for (k, &m) in lens.iter().enumerate() {
                        if !self.reward(k).supports(m as usize) {
                            return Err(config_err(
                                format!("rewards[{k}]"),
                                format!("does not accept blocks of length {m}"),
                            ));
                        }
                    }
                }
            }
        }
        for (i, a) in self.assertions.iter().enumerate() {
            self.check_assertion(i, a)?;
        }
        Ok(())
    }

    fn check_concentration(&self, conc: &ConcentrationSpec) -> Result<()> {
        if conc.trials == 0 {
            return Err(config_err("concentration.trials", "must be >= 1"));
        }
        if let Some(eps) = &conc.eps {
            if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
                return Err(config_err("concentration.eps", "must be a nonempty list of nonnegative numbers"));
            }
        }
        if conc.cases.is_empty() {
            return Err(config_err("concentration.cases", "at least one case is required"));
        }
        for (i, c) in conc.cases.iter().enumerate() {
            let field = format!("concentration.cases[{i}]");
            if c.arm >= self.arms.len() {
                return Err(config_err(format!("{field}.arm"), format!("no arm {}", c.arm)));
            }
            if c.m == 0 || c.n == 0 {
                return Err(config_err(field, "m and n must be >= 1"));
            }
            if !self.reward(c.arm).supports(c.m as usize) {
                return Err(config_err(format!("{field}.m"), "reward does not accept this block length"));
            }
        }
        Ok(())
    }

    fn check_assertion(&self, i: usize, a: &AssertionSpec) -> Result<()> {
        let field = format!("assertions[{i}]");
        let lab = self.scenario == Scenario::ConcentrationLab;
        match a {
            AssertionSpec::TailsDominated if !lab => Err(config_err(field, "only valid in the concentration lab")),
            AssertionSpec::TailsDominated => Ok(()),
            _ if lab => Err(config_err(field, "only `tails_dominated` is valid in the concentration lab")),
            AssertionSpec::IdenticalChoices { policy } => policy.check(&format!("{field}.policy"), self.scenario, self.arms.len()),
            AssertionSpec::BestShare {
                min_share,
                final_fraction,
                ..
            } => {
                if !(0.0..=1.0).contains(min_share) || !(*final_fraction > 0.0 && *final_fraction <= 1.0) {
                    Err(config_err(field, "min_share must be in [0, 1] and final_fraction in (0, 1]"))
                } else {
                    Ok(())
                }
            }
            AssertionSpec::LogGrowth { tolerance, .. } if !(*tolerance >= 0.0) => {
                Err(config_err(format!("{field}.tolerance"), "must be >= 0"))
            }
            AssertionSpec::RegretBelowBound { factor } if !(*factor > 0.0) => {
                Err(config_err(format!("{field}.factor"), "must be > 0"))
            }
            _ => Ok(()),
        }
    }
}
