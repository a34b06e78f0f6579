mod common;

use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use ffa::cli::{Cli, Command as Sub, RunManifest};

fn ffa(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffa"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn data(name: &str) -> String {
    common::data_file(name).display().to_string()
}

#[test]
fn malformed_architecture_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffa(
        dir.path(),
        &["train", "--data", &data("t10k-images-idx3-ubyte"), "--arch", "784,,16", "--out", "m.ffam"],
    );
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(!dir.path().join("m.ffam").exists());
}

#[test]
fn bce_on_raw_pixels_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffa(
        dir.path(),
        &[
            "train", "--data", &data("t10k-images-idx3-ubyte"), "--raw", "--limit-train", "20", "--out", "m.ffam",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("normalized"), "{}", stderr(&out));
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffa(dir.path(), &["train", "--data", "no-such-file", "--out", "m.ffam"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn truncated_idx_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short"), [0u8, 0, 8, 3, 0, 0]).unwrap();
    let out = ffa(dir.path(), &["train", "--data", "short", "--out", "m.ffam"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn invalid_parameters_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mnist = data("t10k-images-idx3-ubyte");
    let cases: [&[&str]; 4] = [
        &["curse", "--d", "0"],
        &["curse", "--m", "0"],
        &["pca-equiv", "--n", "3", "--q", "4"],
        &["anomaly", "--train-data", &mnist, "--eval-data", &mnist, "--top-k", "0"],
    ];
    for args in cases {
        assert_eq!(code(&ffa(dir.path(), args)), 2, "{args:?}");
    }
}

#[test]
fn curse_table_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffa(dir.path(), &["curse", "--m", "1000", "--d", "10,100,1000"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let l: Vec<&str> = text.lines().skip(1).map(|row| row.split('\t').nth(1).unwrap()).collect();
    assert_eq!(l, ["0.50", "0.93", "0.99"]);

    let out = ffa(dir.path(), &["curse", "--m", "1", "--d", "5"]);
    let row = stdout(&out).lines().nth(1).unwrap().to_string();
    assert_eq!(row.split('\t').nth(1), Some("1.00"));
}

#[test]
fn pca_equivalence_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffa(dir.path(), &["pca-equiv"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(dir.path().join("ffa-pca-equiv.manifest.json").exists());
}

#[test]
fn classify_defaults() {
    let cli = Cli::try_parse_from([
        "ffa", "classify", "--train-data", "a", "--train-labels", "b", "--test-data", "c", "--test-labels", "d",
    ])
    .unwrap();
    match cli.command {
        Sub::Classify(c) => assert_eq!(c.k, 7),
        _ => unreachable!(),
    }
}

#[test]
fn train_reconstruct_classify_round() {
    let dir = tempfile::tempdir().unwrap();
    let out = ffa(
        dir.path(),
        &[
            "train", "--data", &data("train-images-idx3-ubyte"), "--arch", "784,8,784", "--epochs", "1",
            "--limit-train", "200", "--quiet", "--out", "model.ffam",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = ffa(
        dir.path(),
        &[
            "reconstruct", "--model", "model.ffam", "--data", &data("t10k-images-idx3-ubyte"), "--indices", "4,0,9",
            "--grid-out", "rec.pgm",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = stdout(&out);
    let indices: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(indices, ["4", "0", "9"]);
    let pgm = std::fs::read(dir.path().join("rec.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n84 56\n255\n"));
    assert_eq!(pgm.len(), b"P5\n84 56\n255\n".len() + 84 * 56);

    let out = ffa(
        dir.path(),
        &["reconstruct", "--model", "model.ffam", "--data", &data("t10k-images-idx3-ubyte"), "--indices", "10000"],
    );
    assert_eq!(code(&out), 2);

    let out = ffa(
        dir.path(),
        &[
            "classify", "--model", "model.ffam", "--train-data", &data("train-images-idx3-ubyte"), "--train-labels",
            &data("train-labels-idx1-ubyte"), "--test-data", &data("t10k-images-idx3-ubyte"), "--test-labels",
            &data("t10k-labels-idx1-ubyte"), "--limit-train", "100", "--limit-test", "20",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("input,accuracy,seconds"));
    for (line, name) in lines.zip(["raw", "latent"]) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], name);
        let (_, decimals) = fields[1].split_once('.').expect("decimal accuracy");
        assert_eq!(decimals.len(), 1, "{line}");
    }

    let manifest = RunManifest::read(&dir.path().join("ffa-classify.manifest.json")).unwrap();
    assert_eq!(manifest.subcommand, "classify");
    assert_eq!(manifest.inputs.len(), 5);
}

#[test]
fn replay_detects_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(common::data_file("t10k-images-idx3-ubyte"), dir.path().join("images")).unwrap();
    let out = ffa(
        dir.path(),
        &[
            "train", "--data", "images", "--arch", "784,4,784", "--epochs", "1", "--limit-train", "50", "--quiet",
            "--out", "m.ffam", "--manifest", "run.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(code(&ffa(dir.path(), &["replay", "run.json", "--check"])), 0);

    let mut bytes = std::fs::read(dir.path().join("images")).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    std::fs::write(dir.path().join("images"), bytes).unwrap();
    assert_eq!(code(&ffa(dir.path(), &["replay", "run.json", "--check"])), 1);
}

#[test]
fn outputs_never_overwrite_inputs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(common::data_file("t10k-images-idx3-ubyte"), dir.path().join("images")).unwrap();
    let before = std::fs::read(dir.path().join("images")).unwrap();
    let out = ffa(
        dir.path(),
        &["train", "--data", "images", "--arch", "784,4,784", "--epochs", "1", "--limit-train", "20", "--out", "images"],
    );
    assert_eq!(code(&out), 2);
    assert_eq!(std::fs::read(dir.path().join("images")).unwrap(), before);
}
