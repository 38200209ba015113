use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mixbandit::experiments::{
    bounds_report, preset, preset_names, preset_summary, preset_text, run_experiment, ExperimentConfig,
    ExperimentReport, RunOptions, Scenario, SeedSpec,
};

#[derive(Parser)]
#[command(name = "mixbandit", version, about = "Bandits with φ-mixing arms: simulations, bounds and tail checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation matrix from a config file or preset name.
    Run {
        config: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the concentration lab of a config.
    ConcLab {
        config: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print Λ, M, 𝓜, u_k and regret-bound tables without simulating.
    Bounds { config: String },
    /// Inspect the shipped presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    Show { name: String },
}

#[derive(Args)]
struct Overrides {
    /// First seed of the run matrix.
    #[arg(long)]
    seed_base: Option<u64>,
    /// Number of consecutive seeds.
    #[arg(long)]
    seed_count: Option<u64>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn load(config: &str) -> Result<ExperimentConfig> {
    let path = Path::new(config);
    if path.exists() {
        return ExperimentConfig::from_path(path).with_context(|| format!("loading {config}"));
    }
    if preset_text(config).is_some() {
        return Ok(preset(config)?);
    }
    bail!("`{config}` is neither a file nor a preset (try `mixbandit presets list`)")
}

fn apply(mut config: ExperimentConfig, o: &Overrides) -> Result<(ExperimentConfig, RunOptions)> {
    if o.seed_base.is_some() || o.seed_count.is_some() {
        let current = config.seeds.seeds().unwrap_or_default();
        let base = o.seed_base.or(config.seeds.base).or(current.first().copied()).unwrap_or(0);
        let count = o.seed_count.unwrap_or(current.len().max(1) as u64);
        config.seeds = SeedSpec::range(base, count);
    }
    config.validate()?;
    let options = RunOptions {
        jobs: o.jobs,
        output: o.out.clone(),
    };
    Ok((config, options))
}

fn print_report(report: &ExperimentReport) {
    println!("config {}  scenario {:?}  seeds {}", &report.config_hash[..12], report.scenario, report.seeds.len());
    if let Some(o) = &report.oracle {
        println!("oracle values {:?}  gaps {:?}  best arm {}", o.values, o.gaps, o.best_arm);
        if let Some((m, b)) = o.best_combination {
            println!("best combination (m, b) = ({m}, {b})");
        }
    }
    if !report.checkpoints.is_empty() {
        println!("{:>8} {:>14} {:>12} {:>14}", "step", "mean_regret", "stderr", "bound");
        for c in &report.checkpoints {
            let bound = c.bound.map_or("-".to_string(), |b| format!("{b:.3}"));
            println!("{:>8} {:>14.4} {:>12.4} {:>14}", c.step, c.mean_regret, c.stderr, bound);
        }
    }
    for case in &report.tails {
        println!(
            "case {} arm {} mode {:?} m {} b {} n {} mu {:.6}",
            case.case, case.arm, case.spec.mode, case.spec.m, case.spec.b, case.spec.n, case.mu
        );
        println!("{:>8} {:>12} {:>12} {:>12} {:>12} {:>6}", "epsilon", "empirical", "wilson_hi", "bound", "two_sided", "pass");
        for r in &case.rows {
            println!(
                "{:>8.3} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>6}",
                r.epsilon, r.empirical, r.wilson_hi, r.bound, r.bound_two_sided, r.pass
            );
        }
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    for a in &report.assertions {
        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
}

fn execute(config: ExperimentConfig, options: RunOptions) -> Result<ExitCode> {
    let report = run_experiment(&config, &options)?;
    print_report(&report);
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, overrides } => load(&config).and_then(|c| apply(c, &overrides)).and_then(|(c, o)| execute(c, o)),
        Command::ConcLab { config, overrides } => load(&config).and_then(|c| apply(c, &overrides)).and_then(|(c, o)| {
            if c.scenario != Scenario::ConcentrationLab {
                bail!("config scenario is {:?}, not concentration_lab", c.scenario);
            }
            execute(c, o)
        }),
        Command::Bounds { config } => load(&config).and_then(|c| {
            print!("{}", bounds_report(&c)?);
            Ok(ExitCode::SUCCESS)
        }),
        Command::Presets { action } => match action {
            PresetAction::List => {
                for name in preset_names() {
                    println!("{name:<22} {}", preset_summary(name).unwrap_or_default());
                }
                Ok(ExitCode::SUCCESS)
            }
            PresetAction::Show { name } => match preset_text(&name) {
                Some(text) => {
                    print!("{text}");
                    Ok(ExitCode::SUCCESS)
                }
                None => Err(anyhow::anyhow!("unknown preset `{name}`")),
            },
        },
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
