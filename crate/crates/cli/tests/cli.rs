use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").canonicalize().unwrap()
}

fn foilbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foilbench"))
        .args(args)
        .env_remove("FOILBENCH_CLI_TEST_KEY")
        .output()
        .unwrap()
}

fn config() -> String {
    fixtures().join("pipeline.json").to_string_lossy().into_owned()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn run_into(dir: &Path) -> Output {
    foilbench(&["run", "--config", &config(), "--out", dir.to_str().unwrap()])
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("run_manifest.json")).unwrap()).unwrap()
}

#[test]
fn run_is_reproducible_across_job_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(&run_into(a.path()));
    ok(&foilbench(&["run", "--config", &config(), "--out", b.path().to_str().unwrap(), "--jobs", "1"]));
    for f in ["benchmark.jsonl", "records.jsonl", "benchmark.manifest.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
    assert_eq!(manifest(a.path())["digest"], manifest(b.path())["digest"]);
}

#[test]
fn existing_output_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    ok(&run_into(dir.path()));
    let again = run_into(dir.path());
    assert_eq!(again.status.code(), Some(10));
    assert!(String::from_utf8_lossy(&again.stderr).contains("--force"));
    ok(&foilbench(&["run", "--config", &config(), "--out", dir.path().to_str().unwrap(), "--force"]));
}

#[test]
fn missing_profile_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"global_seed": 1, "profile_path": "absent_profile.json", "input_glob": "*.json", "output_dir": "out"}"#,
    )
    .unwrap();
    let out = foilbench(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent_profile.json"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_config_exits_two() {
    assert_eq!(foilbench(&["run", "--config", "/nonexistent/run.json"]).status.code(), Some(2));
    assert_eq!(foilbench(&["ingest"]).status.code(), Some(2));
}

#[test]
fn enabled_decorator_without_key_exits_eight() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let doc = serde_json::json!({
        "global_seed": 42,
        "profile_path": fixtures().join("profile.json"),
        "input_glob": fixtures().join("corpus/*.json"),
        "decorator": {"enabled": true, "endpoint": "http://127.0.0.1:9/v1", "api_key_env": "FOILBENCH_CLI_TEST_KEY"},
        "output_dir": "out"
    });
    std::fs::write(&cfg, doc.to_string()).unwrap();
    let out = foilbench(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(8));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FOILBENCH_CLI_TEST_KEY"));
}

#[test]
fn seed_flag_overrides_config() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(&run_into(a.path()));
    ok(&foilbench(&["run", "--config", &config(), "--out", b.path().to_str().unwrap(), "--seed", "43"]));
    let (ma, mb) = (manifest(a.path()), manifest(b.path()));
    assert_eq!(mb["global_seed"], 43);
    assert_ne!(ma["config_digest"], mb["config_digest"]);
}

#[test]
fn staged_commands_match_run() {
    let whole = tempfile::tempdir().unwrap();
    ok(&run_into(whole.path()));

    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = d.to_str().unwrap();
    let cfg = config();
    ok(&foilbench(&["ingest", "--config", &cfg, "--out", out]));
    let graphs = d.join("graphs.jsonl");
    ok(&foilbench(&["probe", "--config", &cfg, "--out", out, "--graphs", graphs.to_str().unwrap()]));
    let records = d.join("records.jsonl");
    ok(&foilbench(&["render", "--config", &cfg, "--out", out, "--records", records.to_str().unwrap()]));
    let pairs = d.join("pairs.jsonl");
    ok(&foilbench(&["emit", "--config", &cfg, "--out", out, "--pairs", pairs.to_str().unwrap()]));

    for f in ["records.jsonl", "benchmark.jsonl", "benchmark.manifest.json"] {
        assert_eq!(std::fs::read(whole.path().join(f)).unwrap(), std::fs::read(d.join(f)).unwrap(), "{f}");
    }
}

/// One score matrix per pool: rows are videos in first-seen order, columns are captions.
fn write_scores(pool: &Path, out: &Path, hit: f64, miss: f64) {
    let captions: Vec<serde_json::Value> = std::fs::read_to_string(pool)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let mut videos: Vec<&str> = Vec::new();
    for c in &captions {
        let v = c["video_id"].as_str().unwrap();
        if !videos.contains(&v) {
            videos.push(v);
        }
    }
    let mut text = String::from("video_id");
    for c in &captions {
        text += &format!(",{}", c["caption_id"].as_str().unwrap());
    }
    for v in &videos {
        text += &format!("\n{v}");
        for c in &captions {
            text += &format!(",{}", if c["video_id"] == *v { hit } else { miss });
        }
    }
    std::fs::write(out, text + "\n").unwrap();
}

#[test]
fn eval_exports_pools_then_scores_them() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&run_into(d));
    let bench = d.join("benchmark.jsonl");
    let out = d.join("eval");
    let out_s = out.to_str().unwrap();
    ok(&foilbench(&["eval", "--benchmark", bench.to_str().unwrap(), "--out", out_s]));

    let pools = out.join("pools");
    let scores = d.join("scores");
    std::fs::create_dir(&scores).unwrap();
    let mut categories = 0;
    for entry in std::fs::read_dir(&pools).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        if let Some(cat) = name.strip_suffix(".positive.jsonl") {
            categories += 1;
            // positives always rank their video first; controls tie everywhere and so never hit
            // unless the pool has a single video
            write_scores(&path, &scores.join(format!("{cat}.positive.csv")), 1.0, 0.0);
            write_scores(&pools.join(format!("{cat}.control.jsonl")), &scores.join(format!("{cat}.control.csv")), 0.5, 0.5);
        }
    }
    assert_eq!(categories, 8);

    ok(&foilbench(&["eval", "--benchmark", bench.to_str().unwrap(), "--scores", scores.to_str().unwrap(), "--out", out_s, "--k", "1,5"]));
    let gaps: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(out.join("gaps.json")).unwrap()).unwrap();
    assert_eq!(gaps.len(), 8 * 2 * 2);
    assert!(gaps.iter().all(|g| g["p"] == 1.0));

    let gaps_file = out.join("gaps.json");
    ok(&foilbench(&["gap-report", "--gaps", gaps_file.to_str().unwrap(), "--model", "oracle", "--out", out_s]));
    let report = std::fs::read_to_string(out.join("gap_report.csv")).unwrap();
    assert_eq!(report.lines().next(), Some("category,direction,k,p,p_control,delta_p"));
    assert_eq!(report.lines().count(), 33);
    let scatter = std::fs::read_to_string(out.join("gap_report.scatter.csv")).unwrap();
    assert!(scatter.lines().skip(1).all(|l| l.split(',').nth(1) == Some("oracle")));
}

#[test]
fn loss_selftest_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("batch.json");
    std::fs::write(
        &input,
        r#"{"tau": 0.1, "beta": 0.5, "V": [[1, 0], [0, 1]], "T": [[0.9, 0.1], [0.2, 0.8]], "G": [[[0.8, 0.3]], []]}"#,
    )
    .unwrap();
    let out = foilbench(&["loss-selftest", "--input", input.to_str().unwrap()]);
    ok(&out);
    let v: BTreeMap<String, f64> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["loss"] > 0.0);
    assert!(v["fd_max_rel_err"] < 1e-6);

    std::fs::write(&input, r#"{"tau": 0.0, "V": [[1]], "T": [[1]]}"#).unwrap();
    assert_eq!(foilbench(&["loss-selftest", "--input", input.to_str().unwrap()]).status.code(), Some(12));
}
