use crate::error::{config_err, Result};

use super::config::ExperimentConfig;

/// Shipped presets as `(name, text)`.
pub const PRESETS: &[(&str, &str)] = &[
    ("sec3_iid_reduction", include_str!("../../presets/sec3_iid_reduction.toml")),
    ("block_ucb_iid", include_str!("../../presets/block_ucb_iid.toml")),
    ("block_ucb_markov", include_str!("../../presets/block_ucb_markov.toml")),
    ("sec4_combo", include_str!("../../presets/sec4_combo.toml")),
    ("restless_markov", include_str!("../../presets/restless_markov.toml")),
    ("conc_lab_iid", include_str!("../../presets/conc_lab_iid.toml")),
    ("conc_lab_markov", include_str!("../../presets/conc_lab_markov.toml")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// First comment line of a preset.
pub fn preset_summary(name: &str) -> Option<String> {
    preset_text(name).map(|t| {
        t.lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| l.trim_start_matches('#').trim())
            .collect::<Vec<_>>()
            .join(" ")
    })
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = preset_text(name).ok_or_else(|| {
        config_err("preset", format!("unknown preset `{name}`; available: {}", preset_names().join(", ")))
    })?;
    ExperimentConfig::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_round_trips() {
        for name in preset_names() {
            let c = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            let again = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
            assert_eq!(c, again, "{name}");
            assert!(!preset_summary(name).unwrap().is_empty());
        }
        assert!(preset("nope").is_err());
    }
}
