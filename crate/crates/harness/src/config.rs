//! Experiment configuration.
//!
//! Values come from three layers, highest precedence first: command-line
//! flags ([`Overrides`]), a TOML file ([`FileConfig`]), and built-in
//! defaults. A complete file looks like this:
//!
//! ```toml
//! seeds = [1, 2, 3]        # or a count: seeds = 20 means 0..20
//! checkpoints = 100
//!
//! [setting]
//! kind = "k-choice"        # single | k-choice | general | spearman
//! n = 10
//! k = 3
//! horizon = 2000
//!
//! [learner]
//! kind = "online-rank"     # online-rank | fpl | mw-explicit
//! sampler = "pl-gumbel"    # quicksort | pl | pl-gumbel
//! eta = "auto"             # or a number in (0, 1]
//! beta = "auto"            # mw-explicit only; auto means the tuned eta
//! epsilon = "auto"         # fpl only
//!
//! [adversary]
//! kind = "uniform"         # uniform | trace
//! trace = "rounds.txt"     # required for kind = "trace"
//!
//! [output]
//! dir = "results"
//! keep_rankings = false
//!
//! [sweep]                  # used by `sweep`; each axis defaults to the value above
//! n = [10]
//! horizon = [500, 2000, 8000]
//! learner = ["online-rank", "fpl"]
//! ```

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use onlinerank::prelude::*;

use crate::error::{HarnessError, Result};

pub const DEFAULT_N: usize = 10;
pub const DEFAULT_K: usize = 2;
pub const DEFAULT_HORIZON: usize = 1000;
pub const DEFAULT_CHECKPOINTS: usize = 100;
pub const DEFAULT_OUT: &str = "results";

/// Setting names as accepted on the command line and in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SettingKind {
    Single,
    KChoice,
    General,
    Spearman,
}

impl SettingKind {
    pub fn with_k(self, k: usize) -> Setting {
        match self {
            SettingKind::Single => Setting::Single,
            SettingKind::KChoice => Setting::KChoice { k },
            SettingKind::General => Setting::General,
            SettingKind::Spearman => Setting::Spearman,
        }
    }
}

/// A rate parameter that is either tuned from the run's shape or given.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Rate {
    #[default]
    Auto,
    Value(f64),
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Auto => f.write_str("auto"),
            Rate::Value(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Rate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(Rate::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Rate::Value(v)),
            _ => Err(format!("expected \"auto\" or a positive number, got {s:?}")),
        }
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rate::Auto => s.serialize_str("auto"),
            Rate::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Rate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Rate::from_str(&v.to_string()),
            Raw::Str(s) => Rate::from_str(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Seeds as an explicit list or a count `N` meaning `0..N`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    Count(u64),
    List(Vec<u64>),
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedSpec::Count(n) => (0..*n).collect(),
            SeedSpec::List(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Adversary {
    /// Uniformly random feedback for the setting: one item, `k` items, a
    /// fair coin per item, or a uniform permutation.
    Uniform,
    Trace { trace: PathBuf },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingSection {
    pub kind: Option<SettingKind>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerSection {
    pub kind: Option<LearnerKind>,
    pub sampler: Option<SamplerKind>,
    pub eta: Option<Rate>,
    pub beta: Option<Rate>,
    pub epsilon: Option<Rate>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySection {
    pub kind: Option<String>,
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub keep_rankings: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub n: Option<Vec<usize>>,
    pub k: Option<Vec<usize>>,
    pub horizon: Option<Vec<usize>>,
    pub learner: Option<Vec<LearnerKind>>,
    pub sampler: Option<Vec<SamplerKind>>,
}

/// The TOML file layer. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seeds: Option<SeedSpec>,
    pub checkpoints: Option<usize>,
    #[serde(default)]
    pub setting: SettingSection,
    #[serde(default)]
    pub learner: LearnerSection,
    #[serde(default)]
    pub adversary: AdversarySection,
    #[serde(default)]
    pub output: OutputSection,
    pub sweep: Option<SweepSection>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

/// The command-line layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub setting: Option<SettingKind>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub horizon: Option<usize>,
    pub learner: Option<LearnerKind>,
    pub sampler: Option<SamplerKind>,
    pub eta: Option<Rate>,
    pub seeds: Vec<u64>,
    pub out: Option<PathBuf>,
    pub checkpoints: Option<usize>,
}

/// A fully resolved single-cell experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub setting: Setting,
    pub n: usize,
    pub horizon: usize,
    pub learner: LearnerKind,
    pub sampler: SamplerKind,
    pub eta: Rate,
    pub beta: Rate,
    pub epsilon: Rate,
    pub adversary: Adversary,
    pub seeds: Vec<u64>,
    pub checkpoints: usize,
    pub keep_rankings: Option<bool>,
    /// Output directory. Not part of the snapshot written to result files,
    /// so identical experiments written to different places match.
    #[serde(skip)]
    pub out: PathBuf,
}

impl ExperimentConfig {
    /// Merges flags over the file over defaults, then validates.
    pub fn resolve(file: &FileConfig, flags: &Overrides) -> Result<Self> {
        let kind = flags.setting.or(file.setting.kind).unwrap_or(SettingKind::Single);
        let k = flags.k.or(file.setting.k).unwrap_or(DEFAULT_K);
        let trace = file.adversary.trace.clone();
        let adversary = match (file.adversary.kind.as_deref(), trace) {
            (None | Some("trace"), Some(trace)) => Adversary::Trace { trace },
            (None | Some("uniform"), None) => Adversary::Uniform,
            (Some("trace"), None) => {
                return Err(HarnessError::Config("adversary \"trace\" needs a trace path".into()))
            }
            (Some("uniform"), Some(_)) => {
                return Err(HarnessError::Config("a trace path needs adversary \"trace\"".into()))
            }
            (Some(other), _) => {
                return Err(HarnessError::Config(format!("unknown adversary {other:?}")))
            }
        };
        let seeds = if !flags.seeds.is_empty() {
            flags.seeds.clone()
        } else {
            file.seeds.as_ref().map_or_else(|| vec![0], SeedSpec::seeds)
        };
        let config = Self {
            setting: kind.with_k(k),
            n: flags.n.or(file.setting.n).unwrap_or(DEFAULT_N),
            horizon: flags.horizon.or(file.setting.horizon).unwrap_or(DEFAULT_HORIZON),
            learner: flags.learner.or(file.learner.kind).unwrap_or_default(),
            sampler: flags.sampler.or(file.learner.sampler).unwrap_or_default(),
            eta: flags.eta.or(file.learner.eta).unwrap_or_default(),
            beta: file.learner.beta.unwrap_or_default(),
            epsilon: file.learner.epsilon.unwrap_or_default(),
            adversary,
            seeds,
            checkpoints: flags.checkpoints.or(file.checkpoints).unwrap_or(DEFAULT_CHECKPOINTS),
            keep_rankings: file.output.keep_rankings,
            out: flags
                .out
                .clone()
                .or_else(|| file.output.dir.clone())
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        if self.horizon == 0 {
            return fail("horizon T must be at least 1".into());
        }
        if self.seeds.is_empty() {
            return fail("at least one seed is required".into());
        }
        self.setting.complexity_bound(self.n).map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Rate::Value(eta) = self.eta {
            if eta > 1.0 {
                return fail(format!("eta must lie in (0, 1], got {eta}"));
            }
        }
        if self.learner == LearnerKind::MwExplicit
            && self.n > onlinerank::learners::MW_MAX_ITEMS
        {
            return fail(format!(
                "mw-explicit enumerates n! rankings and supports n <= {}, got n = {}",
                onlinerank::learners::MW_MAX_ITEMS,
                self.n
            ));
        }
        Ok(())
    }

    /// The tuned or given OnlineRank rate.
    pub fn resolved_eta(&self) -> Result<f64> {
        match self.eta {
            Rate::Value(v) => Ok(v),
            Rate::Auto => Ok(LearnerConfig::auto(self.n, self.horizon, self.setting, self.sampler)?.eta),
        }
    }
}

/// A grid of experiments: the Cartesian product of the axes, each cell run
/// with every seed of the base config.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub horizon: Vec<usize>,
    pub learner: Vec<LearnerKind>,
    pub sampler: Vec<SamplerKind>,
}

impl SweepConfig {
    /// A flag given on the command line pins its axis to that one value.
    pub fn resolve(file: &FileConfig, flags: &Overrides) -> Result<Self> {
        let base = ExperimentConfig::resolve(file, flags)?;
        let axes = file.sweep.clone().unwrap_or_default();
        let k_of = |s: Setting| match s {
            Setting::KChoice { k } => k,
            _ => 1,
        };
        let pick = |flag: bool, axis: Option<Vec<usize>>, base: usize| match (flag, axis) {
            (false, Some(v)) => v,
            _ => vec![base],
        };
        let sweep = Self {
            n: pick(flags.n.is_some(), axes.n, base.n),
            k: pick(flags.k.is_some(), axes.k, k_of(base.setting)),
            horizon: pick(flags.horizon.is_some(), axes.horizon, base.horizon),
            learner: match (flags.learner, axes.learner) {
                (None, Some(v)) => v,
                _ => vec![base.learner],
            },
            sampler: match (flags.sampler, axes.sampler) {
                (None, Some(v)) => v,
                _ => vec![base.sampler],
            },
            base,
        };
        if [sweep.n.len(), sweep.k.len(), sweep.horizon.len(), sweep.learner.len(), sweep.sampler.len()]
            .contains(&0)
        {
            return Err(HarnessError::Config("sweep axes must not be empty".into()));
        }
        for cell in sweep.cells() {
            cell.validate()?;
        }
        Ok(sweep)
    }

    /// Cells in row-major order: n, k, horizon, learner, sampler.
    pub fn cells(&self) -> Vec<ExperimentConfig> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &k in &self.k {
                for &horizon in &self.horizon {
                    for &learner in &self.learner {
                        for &sampler in &self.sampler {
                            let setting = match self.base.setting {
                                Setting::KChoice { .. } => Setting::KChoice { k },
                                s => s,
                            };
                            out.push(ExperimentConfig {
                                setting,
                                n,
                                horizon,
                                learner,
                                sampler,
                                ..self.base.clone()
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_apply_without_file_or_flags() {
        let c = ExperimentConfig::resolve(&FileConfig::default(), &Overrides::default()).unwrap();
        assert_eq!(c.n, DEFAULT_N);
        assert_eq!(c.horizon, DEFAULT_HORIZON);
        assert_eq!(c.setting, Setting::Single);
        assert_eq!(c.learner, LearnerKind::OnlineRank);
        assert_eq!(c.eta, Rate::Auto);
        assert_eq!(c.seeds, vec![0]);
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = FileConfig::parse(
            "seeds = 3\n[setting]\nkind = \"k-choice\"\nn = 12\nk = 3\nhorizon = 50\n[learner]\neta = 0.5\n",
        )
        .unwrap();
        let flags = Overrides { n: Some(20), eta: Some(Rate::Auto), ..Default::default() };
        let c = ExperimentConfig::resolve(&file, &flags).unwrap();
        assert_eq!(c.n, 20);
        assert_eq!(c.horizon, 50);
        assert_eq!(c.setting, Setting::KChoice { k: 3 });
        assert_eq!(c.eta, Rate::Auto);
        assert_eq!(c.seeds, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(FileConfig::parse("[setting]\nsize = 3\n").is_err());
        assert!(FileConfig::parse("[learner]\neta = \"fast\"\n").is_err());
        assert!(FileConfig::parse("[learner]\neta = -1.0\n").is_err());
        let zero_t = Overrides { horizon: Some(0), ..Default::default() };
        assert!(matches!(
            ExperimentConfig::resolve(&FileConfig::default(), &zero_t),
            Err(HarnessError::Config(_))
        ));
        let big_k = Overrides { setting: Some(SettingKind::KChoice), k: Some(6), ..Default::default() };
        assert!(ExperimentConfig::resolve(&FileConfig::default(), &big_k).is_err());
    }

    #[test]
    fn auto_eta_for_single_choice_n10_t2000() {
        let flags = Overrides { horizon: Some(2000), ..Default::default() };
        let c = ExperimentConfig::resolve(&FileConfig::default(), &flags).unwrap();
        // 10·√(ln 2) / √(2000·10)
        assert!((c.resolved_eta().unwrap() - 0.058_870_501).abs() < 1e-8);
    }

    #[test]
    fn sweep_cells_are_the_cartesian_product() {
        let file = FileConfig::parse(
            "seeds = 2\n[sweep]\nhorizon = [500, 2000, 8000]\nlearner = [\"online-rank\", \"fpl\"]\n",
        )
        .unwrap();
        let sweep = SweepConfig::resolve(&file, &Overrides::default()).unwrap();
        let cells = sweep.cells();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0].horizon, 500);
        assert_eq!(cells[1].learner, LearnerKind::Fpl);
        let pinned = Overrides { horizon: Some(100), ..Default::default() };
        assert_eq!(SweepConfig::resolve(&file, &pinned).unwrap().cells().len(), 2);
    }
}
