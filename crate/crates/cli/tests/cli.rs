use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use skinseg::{decode_pgm, encode_ppm, Image};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skinseg"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn skinseg")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_uniform(dir: &Path, name: &str, w: usize, h: usize, color: [u8; 3]) -> PathBuf {
    let path = dir.join(name);
    let img = Image::new(w, h, vec![color; w * h]).unwrap();
    std::fs::write(&path, encode_ppm(&img)).unwrap();
    path
}

#[test]
fn uniform_training_image_detects_as_all_skin() {
    let dir = TempDir::new().unwrap();
    write_uniform(dir.path(), "skin.ppm", 32, 32, [200, 140, 110]);
    let out = run(dir.path(), &["train", "--class", "skin=skin.ppm", "--window", "8x8", "--out", "m.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("skin\t16\t0"), "{summary}");

    let out = run(dir.path(), &["detect", "skin.ppm", "--model", "m.json", "--out", "mask.pgm"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mask = decode_pgm(&std::fs::read(dir.path().join("mask.pgm")).unwrap()).unwrap();
    assert_eq!((mask.width, mask.height), (32, 32));
    assert!(mask.data.iter().all(|&v| v == 255));
}

#[test]
fn three_class_model_labels_each_region() {
    let dir = TempDir::new().unwrap();
    let colors = [("red", [255, 0, 0]), ("yellow", [255, 255, 0]), ("white", [255, 255, 255])];
    for (name, color) in colors {
        write_uniform(dir.path(), &format!("{name}.ppm"), 16, 16, color);
    }
    let out = run(
        dir.path(),
        &[
            "train", "--class", "red=red.ppm", "--class", "yellow=yellow.ppm", "--class", "white=white.ppm",
            "--window", "8x8", "--out", "m.json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));

    // 24x8 strip: red, yellow, white, one window each.
    let pixels = (0..8).flat_map(|_| (0..24).map(|x| colors[x / 8].1)).collect();
    std::fs::write(dir.path().join("strip.ppm"), encode_ppm(&Image::new(24, 8, pixels).unwrap())).unwrap();
    let out = run(dir.path(), &["detect", "strip.ppm", "--model", "m.json", "--out", "mask.pgm", "--decisions", "d.tsv"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let mask = decode_pgm(&std::fs::read(dir.path().join("mask.pgm")).unwrap()).unwrap();
    assert_eq!(&mask.data[..24].iter().step_by(8).copied().collect::<Vec<_>>(), &[85, 170, 255]);
    let decisions = std::fs::read_to_string(dir.path().join("d.tsv")).unwrap();
    let names: Vec<&str> = decisions.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(names, ["red", "yellow", "white"]);
}

#[test]
fn missing_input_exits_2_and_names_the_path() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["train", "--class", "skin=absent.ppm", "--out", "m.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("absent.ppm"));
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn malformed_image_exits_1() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("bad.ppm"), b"P3\n1 1\n255\n0 0 0\n").unwrap();
    let out = run(dir.path(), &["train", "--class", "skin=bad.ppm", "--out", "m.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bad.ppm"));
}

#[test]
fn window_larger_than_training_image_fails_without_output() {
    let dir = TempDir::new().unwrap();
    write_uniform(dir.path(), "small.ppm", 4, 4, [1, 2, 3]);
    let out = run(dir.path(), &["train", "--class", "skin=small.ppm", "--window", "8x8", "--out", "m.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn slack_below_one_warns() {
    let dir = TempDir::new().unwrap();
    write_uniform(dir.path(), "skin.ppm", 16, 16, [200, 140, 110]);
    let out = run(dir.path(), &["train", "--class", "skin=skin.ppm", "--slack", "0.9", "--out", "m.json"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn repeated_detection_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("scene.txt"),
        "canvas 48 40\nseed 11\n0 0 24 40 210 150 120 12 1\n24 0 24 40 40 90 30 12 0\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("train.txt"), "canvas 64 64\nseed 5\n0 0 64 64 210 150 120 12 1\n").unwrap();
    for spec in ["scene", "train"] {
        let out = run(
            dir.path(),
            &["synth", &format!("{spec}.txt"), "--out", &format!("{spec}.ppm"), "--truth", &format!("{spec}.pgm")],
        );
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let out = run(dir.path(), &["train", "--class", "skin=train.ppm", "--window", "8x8", "--metric", "bhattacharyya", "--out", "m.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    for target in ["a", "b"] {
        let out = run(
            dir.path(),
            &["detect", "scene.ppm", "--model", "m.json", "--out", &format!("{target}.pgm"), "--decisions", &format!("{target}.tsv")],
        );
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.pgm"), read("b.pgm"));
    assert_eq!(read("a.tsv"), read("b.tsv"));
}

#[test]
fn eval_of_perfect_detection_reports_rate_100() {
    let dir = TempDir::new().unwrap();
    write_uniform(dir.path(), "skin.ppm", 16, 16, [200, 140, 110]);
    let truth = format!("P5\n16 16\n255\n{}", "\u{1}".repeat(256));
    std::fs::write(dir.path().join("truth.pgm"), truth).unwrap();
    let out = run(dir.path(), &["train", "--class", "skin=skin.ppm", "--window", "8x8", "--out", "m.json"]);
    assert!(out.status.success());
    let out = run(dir.path(), &["eval", "--model", "m.json", "--pair", "skin.ppm=truth.pgm", "--out", "r.tsv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = std::fs::read_to_string(dir.path().join("r.tsv")).unwrap();
    let row: Vec<&str> = report.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row, ["skin.ppm", "4", "0", "0", "0", "100", "1", "undefined"]);
}

#[test]
fn eval_rejects_mismatched_truth_and_names_the_pair() {
    let dir = TempDir::new().unwrap();
    write_uniform(dir.path(), "skin.ppm", 16, 16, [200, 140, 110]);
    std::fs::write(dir.path().join("truth.pgm"), format!("P5\n8 8\n255\n{}", "\0".repeat(64))).unwrap();
    run(dir.path(), &["train", "--class", "skin=skin.ppm", "--window", "8x8", "--out", "m.json"]);
    let out = run(dir.path(), &["eval", "--model", "m.json", "--pair", "skin.ppm=truth.pgm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("skin.ppm=truth.pgm"), "{}", stderr(&out));
}

#[test]
fn eval_without_pairs_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["eval", "--model", "m.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_is_deterministic() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("s.txt"), "canvas 20 10\nseed 99\n2 1 10 6 180 120 90 20 1\n").unwrap();
    for n in ["1", "2"] {
        let out = run(dir.path(), &["synth", "s.txt", "--out", &format!("{n}.ppm"), "--truth", &format!("{n}.pgm")]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("1.ppm"), read("2.ppm"));
    assert_eq!(read("1.pgm"), read("2.pgm"));
    let truth = decode_pgm(&read("1.pgm")).unwrap();
    assert_eq!(truth.data.iter().filter(|&&v| v == 255).count(), 60);
}

#[test]
fn synth_spec_error_reports_line() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("s.txt"), "canvas 20 10\nseed 1\n0 0 5 5 red 1 1 0 1\n").unwrap();
    let out = run(dir.path(), &["synth", "s.txt", "--out", "o.ppm", "--truth", "o.pgm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn synth_patch_outside_canvas_writes_nothing() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("s.txt"), "canvas 20 10\nseed 1\n0 0 30 5 1 1 1 0 1\n").unwrap();
    let out = run(dir.path(), &["synth", "s.txt", "--out", "o.ppm", "--truth", "o.pgm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("o.ppm").exists());
    assert!(!dir.path().join("o.pgm").exists());
}
