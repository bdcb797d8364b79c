//! Oblivious adversaries and trace files.
//!
//! A [`FeedbackSequence`] is fixed before play starts. Sequences come from
//! seeded generators or from plain-text trace files:
//!
//! ```text
//! # single / k-choice / general: chosen item indices, whitespace separated
//! 3
//! 0 4
//! # spearman: a full permutation of 0..n, first listed item ranked first
//! 2 0 1 3
//! ```
//!
//! Lines starting with `#` and blank lines are ignored.

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::feedback::{Feedback, Setting};
use crate::ranking::{Item, Ranking};
use crate::rng::RngStream;

/// Where a sequence came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum Provenance {
    Generator { id: String, seed: u64, stream: u64 },
    Trace { path: PathBuf },
    Manual,
}

/// The feedback revealed in rounds `1..=T`, all conforming to one setting.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackSequence {
    n: usize,
    setting: Setting,
    steps: Vec<Feedback>,
    provenance: Provenance,
}

impl FeedbackSequence {
    pub fn new(
        n: usize,
        setting: Setting,
        steps: Vec<Feedback>,
        provenance: Provenance,
    ) -> Result<Self> {
        for s in &steps {
            setting.validate(n, s)?;
        }
        Ok(Self { n, setting, steps, provenance })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Feedback] {
        &self.steps
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The first `rounds` steps.
    pub fn prefix(&self, rounds: usize) -> &[Feedback] {
        &self.steps[..rounds.min(self.steps.len())]
    }

    /// Per-item score sums `Σ_t s_t(u)`.
    pub fn cumulative_scores(&self) -> Vec<f64> {
        cumulative_scores(self.n, &self.steps)
    }
}

pub(crate) fn cumulative_scores(n: usize, steps: &[Feedback]) -> Vec<f64> {
    let mut totals = vec![0.0; n];
    for s in steps {
        for (t, &x) in totals.iter_mut().zip(s.scores()) {
            *t += x;
        }
    }
    totals
}

fn provenance(id: &str, rng: &RngStream) -> Provenance {
    Provenance::Generator { id: id.to_string(), seed: rng.seed(), stream: rng.stream() }
}

/// Each round one item chosen uniformly at random.
pub fn uniform_single_choice(
    n: usize,
    horizon: usize,
    rng: &mut RngStream,
) -> Result<FeedbackSequence> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 items, got {n}")));
    }
    let prov = provenance("uniform-single", rng);
    let steps = (0..horizon)
        .map(|_| Feedback::single(n, rng.below(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FeedbackSequence { n, setting: Setting::Single, steps, provenance: prov })
}

/// Each round a uniformly random subset of exactly `k` items.
pub fn uniform_k_choice(
    n: usize,
    k: usize,
    horizon: usize,
    rng: &mut RngStream,
) -> Result<FeedbackSequence> {
    let setting = Setting::KChoice { k };
    setting.complexity_bound(n)?;
    let prov = provenance("uniform-k", rng);
    let steps = (0..horizon)
        .map(|_| {
            let items: Vec<Item> = index::sample(rng, n, k).into_vec();
            Feedback::k_choice(n, k, &items)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeedbackSequence { n, setting, steps, provenance: prov })
}

/// Each round every item is chosen independently with probability 1/2.
pub fn uniform_general(n: usize, horizon: usize, rng: &mut RngStream) -> Result<FeedbackSequence> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 items, got {n}")));
    }
    let prov = provenance("uniform-general", rng);
    let steps = (0..horizon)
        .map(|_| {
            let items: Vec<Item> = (0..n).filter(|_| rng.unit() < 0.5).collect();
            Feedback::general(n, &items)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeedbackSequence { n, setting: Setting::General, steps, provenance: prov })
}

/// How a Spearman sequence of revealed rankings is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum SpearmanMode {
    /// Independent uniformly random permutations.
    UniformRandom,
    /// The same permutation every round.
    Fixed(Ranking),
    /// Read from a trace file; its length must equal the horizon.
    Trace(PathBuf),
}

/// Spearman feedback `s_t = −σ_t` for a sequence of revealed rankings.
pub fn spearman_sequence(
    n: usize,
    horizon: usize,
    mode: &SpearmanMode,
    rng: &mut RngStream,
) -> Result<FeedbackSequence> {
    match mode {
        SpearmanMode::UniformRandom => {
            let prov = provenance("spearman-uniform", rng);
            let mut order: Vec<Item> = (0..n).collect();
            let steps = (0..horizon)
                .map(|_| {
                    order.shuffle(rng);
                    Feedback::spearman(&Ranking::from_order_unchecked(&order))
                })
                .collect();
            Ok(FeedbackSequence { n, setting: Setting::Spearman, steps, provenance: prov })
        }
        SpearmanMode::Fixed(sigma) => {
            if sigma.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: sigma.len() });
            }
            let s = Feedback::spearman(sigma);
            Ok(FeedbackSequence {
                n,
                setting: Setting::Spearman,
                steps: vec![s; horizon],
                provenance: Provenance::Manual,
            })
        }
        SpearmanMode::Trace(path) => {
            let seq = load_trace(path, Setting::Spearman, n)?;
            if seq.len() != horizon {
                return Err(Error::InvalidParameter(format!(
                    "trace {} has {} rounds, expected {horizon}",
                    path.display(),
                    seq.len()
                )));
            }
            Ok(seq)
        }
    }
}

/// Reads and validates a trace file.
pub fn load_trace(path: impl AsRef<Path>, setting: Setting, n: usize) -> Result<FeedbackSequence> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut seq = parse_trace(&text, setting, n)?;
    seq.provenance = Provenance::Trace { path: path.to_path_buf() };
    Ok(seq)
}

/// Parses trace text; errors carry 1-based line numbers.
pub fn parse_trace(text: &str, setting: Setting, n: usize) -> Result<FeedbackSequence> {
    setting.complexity_bound(n)?;
    let mut steps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fail = |message: String| Error::Trace { line, message };
        let mut items = Vec::new();
        let mut seen = vec![false; n];
        for tok in content.split_whitespace() {
            let item: Item =
                tok.parse().map_err(|_| fail(format!("expected an item index, found {tok:?}")))?;
            if item >= n {
                return Err(fail(format!("item {item} out of range for n = {n}")));
            }
            if std::mem::replace(&mut seen[item], true) {
                return Err(fail(format!("item {item} listed twice")));
            }
            items.push(item);
        }
        let feedback = match setting {
            Setting::Spearman => {
                if items.len() != n {
                    return Err(fail(format!(
                        "expected a permutation of {n} items, got {}",
                        items.len()
                    )));
                }
                Feedback::spearman(&Ranking::from_order_unchecked(&items))
            }
            _ => {
                let max = setting.max_chosen(n);
                if items.len() > max {
                    return Err(fail(format!(
                        "{} items chosen, {setting} allows at most {max}",
                        items.len()
                    )));
                }
                let s = match (setting, items.as_slice()) {
                    (Setting::Single, &[item]) => Feedback::single(n, item),
                    (Setting::KChoice { k }, _) => Feedback::k_choice(n, k, &items),
                    _ => Feedback::general(n, &items),
                };
                let s = s.map_err(|e| fail(e.to_string()))?;
                setting.validate(n, &s).map_err(|e| fail(e.to_string()))?;
                s
            }
        };
        steps.push(feedback);
    }
    Ok(FeedbackSequence { n, setting, steps, provenance: Provenance::Manual })
}

/// Renders a sequence in the trace format understood by [`parse_trace`].
pub fn render_trace(seq: &FeedbackSequence) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n={} setting={}", seq.n, seq.setting);
    for s in &seq.steps {
        let items: Vec<Item> = match seq.setting {
            Setting::Spearman => {
                // s = −σ, so the item at position p has score −p.
                let mut order = vec![0; seq.n];
                for (u, &score) in s.scores().iter().enumerate() {
                    order[(-score) as usize - 1] = u;
                }
                order
            }
            _ => s.chosen(),
        };
        let line: Vec<String> = items.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn write_trace(seq: &FeedbackSequence, mut writer: impl Write) -> Result<()> {
    writer.write_all(render_trace(seq).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_choice_counts_sum_to_horizon() {
        let mut rng = RngStream::new(11, 0);
        let seq = uniform_single_choice(6, 500, &mut rng).unwrap();
        assert_eq!(seq.len(), 500);
        assert_eq!(seq.cumulative_scores().iter().sum::<f64>(), 500.0);
        assert!(uniform_single_choice(1, 5, &mut rng).is_err());
    }

    #[test]
    fn generators_are_reproducible() {
        let a = uniform_k_choice(8, 3, 200, &mut RngStream::new(4, 0)).unwrap();
        let b = uniform_k_choice(8, 3, 200, &mut RngStream::new(4, 0)).unwrap();
        assert_eq!(a, b);
        let c = uniform_k_choice(8, 3, 200, &mut RngStream::new(5, 0)).unwrap();
        assert_ne!(a.steps(), c.steps());
    }

    #[test]
    fn k_choice_has_exactly_k_items() {
        let seq = uniform_k_choice(10, 4, 300, &mut RngStream::new(1, 0)).unwrap();
        assert!(seq.steps().iter().all(|s| s.chosen().len() == 4));
        assert!(uniform_k_choice(10, 6, 3, &mut RngStream::new(1, 0)).is_err());
        assert!(uniform_k_choice(10, 0, 3, &mut RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn fixed_spearman_repeats_sigma() {
        let mode = SpearmanMode::Fixed(Ranking::identity(4));
        let seq = spearman_sequence(4, 3, &mode, &mut RngStream::new(0, 0)).unwrap();
        for s in seq.steps() {
            assert_eq!(s.scores(), &[-1.0, -2.0, -3.0, -4.0]);
        }
    }

    #[test]
    fn uniform_spearman_averages_to_centre() {
        let n = 6;
        let t = 20_000;
        let seq =
            spearman_sequence(n, t, &SpearmanMode::UniformRandom, &mut RngStream::new(2, 0))
                .unwrap();
        let centre = -((n + 1) as f64) / 2.0;
        for total in seq.cumulative_scores() {
            // per-coordinate sd of a uniform position is √((n²−1)/12)
            let se = (((n * n - 1) as f64 / 12.0) / t as f64).sqrt();
            assert!((total / t as f64 - centre).abs() < 4.0 * se);
        }
    }

    #[test]
    fn trace_examples() {
        let empty = parse_trace("", Setting::Single, 5).unwrap();
        assert!(empty.is_empty());

        let seq = parse_trace("# comment\n3\n", Setting::Single, 5).unwrap();
        assert_eq!(seq.steps(), &[Feedback::single(5, 3).unwrap()]);

        let err = parse_trace("0 2\n1 1 2\n", Setting::KChoice { k: 3 }, 8).unwrap_err();
        assert!(matches!(err, Error::Trace { line: 2, .. }), "{err}");
    }

    #[test]
    fn trace_validation_errors() {
        let cases = [
            ("7\n", Setting::Single, 5, 1),
            ("1\nx\n", Setting::Single, 5, 2),
            ("1\n\n1 2\n", Setting::Single, 5, 3),
            ("0 1 2\n", Setting::KChoice { k: 2 }, 6, 1),
            ("0 1 2\n", Setting::Spearman, 4, 1),
        ];
        for (text, setting, n, line) in cases {
            match parse_trace(text, setting, n) {
                Err(Error::Trace { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn trace_round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spearman.trace");
        let seq =
            spearman_sequence(5, 40, &SpearmanMode::UniformRandom, &mut RngStream::new(8, 0))
                .unwrap();
        write_trace(&seq, std::fs::File::create(&path).unwrap()).unwrap();
        let back = spearman_sequence(5, 40, &SpearmanMode::Trace(path.clone()), &mut RngStream::new(0, 0))
            .unwrap();
        assert_eq!(back.steps(), seq.steps());
        assert_eq!(back.provenance(), &Provenance::Trace { path });

        let seq = uniform_k_choice(9, 4, 60, &mut RngStream::new(8, 1)).unwrap();
        let back = parse_trace(&render_trace(&seq), seq.setting(), 9).unwrap();
        assert_eq!(back.steps(), seq.steps());
    }
}
