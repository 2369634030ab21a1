use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn roadsafe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roadsafe"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn small_run(out: &Path, extra: &str) -> String {
    format!(
        r#"seed = 11
output_dir = "{}"
n_trees = 30
sensitivity_counts = [1, 10, 30]
{extra}
[generator]
n_sections = 150
years = 3
"#,
        out.display()
    )
}

#[test]
fn generate_then_run_on_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let gen_out = dir.path().join("gen");
    let config = write_config(dir.path(), "gen.toml", &small_run(&gen_out, ""));
    let out = roadsafe(&["generate", "--config", &config]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = gen_out.join("synthetic.csv");
    assert!(csv.exists() && gen_out.join("generator_truth.json").exists());

    let run_out = dir.path().join("run");
    let body = format!(
        r#"seed = 2
input = "{}"
output_dir = "{}"
n_trees = 30
sensitivity_counts = [1, 30]
counts_replication = true
save_models = true
"#,
        csv.display(),
        run_out.display()
    );
    let config = write_config(dir.path(), "run.toml", &body);
    let out = roadsafe(&["run", "--config", &config, "--threads", "2"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains("150 sections"), "{stdout}");
    for name in [
        "ingestion_report.json",
        "adequacy.csv",
        "importance.json",
        "sensitivity.csv",
        "effect_report.json",
        "effect_boxplot.svg",
        "table3_kruskal_wallis.csv",
        "table4_percent_change.csv",
        "table5_nemenyi.csv",
        "effect_report_counts.json",
        "model_rf.json",
        "model_lsboost.json",
        "run_manifest.json",
    ] {
        assert!(run_out.join(name).exists(), "missing {name}");
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = write_config(dir.path(), "run.toml", &small_run(&out, ""));
    let mut snapshots = Vec::new();
    for threads in ["1", "3"] {
        let status = roadsafe(&["run", "--config", &config, "--threads", threads]);
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        snapshots.push(files);
    }
    assert_eq!(snapshots[0], snapshots[1]);
}

#[test]
fn seed_flag_changes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "run.toml",
        &small_run(&dir.path().join("unused"), ""),
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (seed, out) in [("1", &a), ("2", &b)] {
        let status = roadsafe(&[
            "run",
            "--config",
            &config,
            "--seed",
            seed,
            "--out",
            &out.to_string_lossy(),
        ]);
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
    }
    assert!(!dir.path().join("unused").exists());
    assert_ne!(
        fs::read(a.join("effect_report.json")).unwrap(),
        fs::read(b.join("effect_report.json")).unwrap()
    );
}

#[test]
fn invalid_config_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = write_config(
        dir.path(),
        "bad.toml",
        &small_run(&out, "train_fraction = 1.0"),
    );
    let status = roadsafe(&["run", "--config", &config]);
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("train_fraction"));
    assert!(!out.exists() || fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "typo.toml",
        &small_run(&dir.path().join("o"), "n_tress = 5"),
    );
    let status = roadsafe(&["run", "--config", &config]);
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("n_tress"));
}
