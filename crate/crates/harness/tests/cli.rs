use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use onlinerank::prelude::*;
use onlinerank_harness::output::read_summary;
use onlinerank_harness::sweep::read_sweep;

fn onlinerank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onlinerank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_curves_summary_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    let out = onlinerank(&[
        "run", "--n", "10", "--T", "2000", "--seed", "3", "--seed", "4", "--out", path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let curves = fs::read_to_string(dir.path().join("curves.csv")).unwrap();
    let mut lines = curves.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,t,step_pairwise_loss,cum_pairwise_loss,prefix_regret_at_checkpoint"
    );
    assert_eq!(lines.count(), 2 * 2000);

    let summary = read_summary(&dir.path().join("summary.json")).unwrap();
    assert_eq!(summary.schema_version, 1);
    assert_eq!(summary.rate.name, "eta");
    assert!((summary.rate.value - 0.058_870_5).abs() < 1e-6);
    assert_eq!(summary.runs.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![3, 4]);
    assert!((summary.bounds.theorem1_bound - 1177.41).abs() < 0.01);
    assert!(dir.path().join("timings.json").exists());
}

#[test]
fn checkpoints_fill_every_hundredth_round() {
    let dir = tempfile::tempdir().unwrap();
    let out = onlinerank(&["run", "--T", "500", "--checkpoints", "5", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_path(dir.path().join("curves.csv")).unwrap();
    let filled: Vec<u64> = reader
        .records()
        .map(|r| r.unwrap())
        .filter(|r| !r[4].is_empty())
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert_eq!(filled, vec![100, 200, 300, 400, 500]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = onlinerank(&[
            "run", "--learner", "fpl", "--setting", "general", "--n", "7", "--T", "300",
            "--seed", "1", "--seed", "2", "--seed", "9", "--out", path(dir.path()),
        ]);
        assert_eq!(code(&out), 0);
    }
    for name in ["curves.csv", "summary.json", "rankings.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    fs::write(
        &config,
        "seeds = [5]\n[setting]\nkind = \"k-choice\"\nn = 8\nk = 2\nhorizon = 100\n[learner]\nkind = \"mw-explicit\"\n",
    )
    .unwrap();
    let out = onlinerank(&[
        "run", "--config", path(&config), "--n", "6", "--out", path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_summary(&dir.path().join("summary.json")).unwrap();
    assert_eq!(summary.config.n, 6);
    assert_eq!(summary.config.horizon, 100);
    assert_eq!(summary.config.setting, Setting::KChoice { k: 2 });
    assert_eq!(summary.config.learner, LearnerKind::MwExplicit);
    assert_eq!(summary.rate.name, "beta");
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[setting]\nsize = 3\n").unwrap();
    let out_dir = path(dir.path());
    for args in [
        vec!["run", "--config", path(&bad), "--out", out_dir],
        vec!["run", "--T", "0", "--out", out_dir],
        vec!["run", "--eta", "2.5", "--out", out_dir],
        vec!["run", "--setting", "k-choice", "--n", "6", "--k", "4", "--out", out_dir],
        vec!["run", "--learner", "mw-explicit", "--n", "12", "--out", out_dir],
        vec!["run", "--learner", "nope"],
        vec!["verify", "no-such-suite"],
    ] {
        let out = onlinerank(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn trace_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("out_of_range.txt", "single", "0\n10\n1\n"),
        ("two_items.txt", "single", "0\n1 2\n1\n"),
        ("not_a_permutation.txt", "spearman", "0 1 2 3 4 5 6 7 8 9\n0 0 1 2 3 4 5 6 7 8\n"),
        ("too_short.txt", "single", "# only two rounds\n0\n1\n"),
    ];
    for (name, setting, text) in cases {
        let trace = dir.path().join(name);
        fs::write(&trace, text).unwrap();
        let config = dir.path().join(format!("{name}.toml"));
        fs::write(
            &config,
            format!(
                "[setting]\nkind = \"{setting}\"\nn = 10\nhorizon = 3\n[adversary]\nkind = \"trace\"\ntrace = {:?}\n",
                path(&trace)
            ),
        )
        .unwrap();
        let out = onlinerank(&["run", "--config", path(&config), "--out", path(dir.path())]);
        assert_eq!(code(&out), 3, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn generated_traces_replay_as_adversaries() {
    let dir = tempfile::tempdir().unwrap();
    for (setting, extra) in [("k-choice", vec!["--k", "3"]), ("spearman", vec![])] {
        let traces = dir.path().join(setting);
        let mut args = vec![
            "gen-trace", "--setting", setting, "--n", "7", "--T", "40", "--seed", "11",
            "--out", path(&traces),
        ];
        args.extend(extra.iter().copied());
        let out = onlinerank(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let trace = traces.join("trace-seed11.txt");
        let k = extra.get(1).map_or("2", |k| k);

        let config = dir.path().join(format!("{setting}.toml"));
        fs::write(
            &config,
            format!(
                "[setting]\nkind = \"{setting}\"\nn = 7\nk = {k}\nhorizon = 40\n[adversary]\ntrace = {:?}\n",
                path(&trace)
            ),
        )
        .unwrap();
        let replay = dir.path().join(format!("{setting}-replay"));
        let generated = dir.path().join(format!("{setting}-generated"));
        let out = onlinerank(&["run", "--config", path(&config), "--seed", "11", "--out", path(&replay)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        // The same seed without the trace regenerates the identical sequence.
        let mut args = vec![
            "run", "--setting", setting, "--n", "7", "--T", "40", "--seed", "11", "--out", path(&generated),
        ];
        args.extend(extra.iter().copied());
        assert_eq!(code(&onlinerank(&args)), 0);
        assert_eq!(
            fs::read(replay.join("curves.csv")).unwrap(),
            fs::read(generated.join("curves.csv")).unwrap()
        );
    }
}

#[test]
fn sweep_rows_follow_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("grid.toml");
    fs::write(&config, "seeds = 4\n[setting]\nn = 6\n[sweep]\nhorizon = [100, 400, 1600]\n").unwrap();
    let out = onlinerank(&["sweep", "--config", path(&config), "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let table = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(table.starts_with(
        "n,k,T,learner,sampler,seeds,rate_name,rate,mean_regret,std_error,theorem1_bound,lower_bound\n"
    ));
    let summary = read_sweep(&dir.path().join("sweep.json")).unwrap();
    assert_eq!(summary.rows.len(), 3);
    for row in &summary.rows {
        assert_eq!(row.seeds, 4);
        assert_eq!(row.theorem1_bound, regret_bound_theorem1(6, row.horizon, 6.0));
    }
    assert!(summary.rows[2].mean_regret > summary.rows[0].mean_regret);
    assert!(dir.path().join("sweep_timings.csv").exists());
}

#[test]
fn verify_reports_each_suite() {
    let out = onlinerank(&["verify", "--quick", "offsets", "hindsight"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS criterion  3 offsets"));
    assert!(stdout.contains("PASS criterion  4 hindsight"));
}
