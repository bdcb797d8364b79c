use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use onlinerank::prelude::{LearnerKind, SamplerKind};
use onlinerank_harness::config::{
    ExperimentConfig, FileConfig, Overrides, Rate, SettingKind, SweepConfig,
};
use onlinerank_harness::output::write_run;
use onlinerank_harness::run::{generate_traces, run_experiment, RunSummary};
use onlinerank_harness::sweep::{run_sweep, write_sweep};
use onlinerank_harness::verify::{Scale, Suite};
use onlinerank_harness::{HarnessError, Result};

#[derive(Debug, Parser)]
#[command(name = "onlinerank", version, about = "Online ranking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Play a learner against an adversary for every seed.
    Run(CommonArgs),
    /// Run the Cartesian product of the [sweep] axes in the config.
    Sweep(CommonArgs),
    /// Run verification suites and report pass/fail per check.
    Verify {
        /// Suites to run; all of them when omitted.
        #[arg(value_name = "SUITE")]
        suites: Vec<String>,
        /// Reduced sample sizes for a fast smoke test.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the adversary's feedback sequence for each seed as a trace file.
    GenTrace(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// May be repeated.
    #[arg(long = "seed", value_name = "S")]
    seeds: Vec<u64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_learner)]
    learner: Option<LearnerKind>,
    #[arg(long, value_parser = parse_sampler)]
    sampler: Option<SamplerKind>,
    #[arg(long, value_enum)]
    setting: Option<SettingKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "T", value_name = "T")]
    horizon: Option<usize>,
    /// `auto` or a value in (0, 1].
    #[arg(long)]
    eta: Option<Rate>,
    /// Number of prefix-regret checkpoints.
    #[arg(long)]
    checkpoints: Option<usize>,
}

fn parse_learner(s: &str) -> std::result::Result<LearnerKind, String> {
    s.parse().map_err(|e: onlinerank::Error| e.to_string())
}

fn parse_sampler(s: &str) -> std::result::Result<SamplerKind, String> {
    s.parse().map_err(|e: onlinerank::Error| e.to_string())
}

impl CommonArgs {
    fn layers(&self) -> Result<(FileConfig, Overrides)> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = Overrides {
            setting: self.setting,
            n: self.n,
            k: self.k,
            horizon: self.horizon,
            learner: self.learner,
            sampler: self.sampler,
            eta: self.eta,
            seeds: self.seeds.clone(),
            out: self.out.clone(),
            checkpoints: self.checkpoints,
        };
        Ok((file, flags))
    }
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run(args) => {
            let (file, flags) = args.layers()?;
            let cfg = ExperimentConfig::resolve(&file, &flags)?;
            let runs = run_experiment(&cfg)?;
            let summary = RunSummary::new(&cfg, &runs)?;
            for path in write_run(&cfg.out, &summary, &runs)? {
                log::info!("wrote {}", path.display());
            }
            println!(
                "{} {} n={} T={} {}={:.6}: mean regret {:.3} (SE {:.3}) over {} seeds, bound {:.3}",
                cfg.learner,
                cfg.setting,
                cfg.n,
                cfg.horizon,
                summary.rate.name,
                summary.rate.value,
                summary.mean_regret,
                summary.std_error,
                cfg.seeds.len(),
                summary.bounds.theorem1_bound
            );
            Ok(true)
        }
        Command::Sweep(args) => {
            let (file, flags) = args.layers()?;
            let sweep = SweepConfig::resolve(&file, &flags)?;
            let result = run_sweep(&sweep)?;
            for path in write_sweep(&sweep.base.out, &result)? {
                log::info!("wrote {}", path.display());
            }
            for row in &result.summary.rows {
                println!(
                    "n={} k={} T={} {} {}: mean regret {:.3} (SE {:.3}), bound {:.3}",
                    row.n,
                    row.k,
                    row.horizon,
                    row.learner,
                    row.sampler,
                    row.mean_regret,
                    row.std_error,
                    row.theorem1_bound
                );
            }
            Ok(true)
        }
        Command::Verify { suites, quick, seed } => {
            let suites = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites.iter().map(|s| s.parse()).collect::<Result<Vec<Suite>>>()?
            };
            let scale = if quick { Scale::Quick } else { Scale::Full };
            let mut all_passed = true;
            for suite in suites {
                let check = suite.run(scale, seed)?;
                println!("{check}");
                for line in &check.details {
                    println!("    {line}");
                }
                all_passed &= check.passed;
            }
            Ok(all_passed)
        }
        Command::GenTrace(args) => {
            let (file, flags) = args.layers()?;
            let cfg = ExperimentConfig::resolve(&file, &flags)?;
            for path in generate_traces(&cfg)? {
                println!("{}", path.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &HarnessError) -> u8 {
    e.exit_code() as u8
}
