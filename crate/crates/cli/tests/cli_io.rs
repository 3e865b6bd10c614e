//! IDX parsing against an independent decoder, config validation through
//! the binary, and artifact plumbing.

use std::process::Command;

use aircomp::config::ExperimentConfig;
use aircomp::idx::{load_idx, to_idx_bytes, IdxError, IMAGES_MAGIC, LABELS_MAGIC};
use aircomp_core::learning::make_synthetic;

fn write_fixture(dir: &std::path::Path, images: &[u8], labels: &[u8]) -> (String, String) {
    let img_path = dir.join("images.idx");
    let lab_path = dir.join("labels.idx");
    std::fs::write(&img_path, images).unwrap();
    std::fs::write(&lab_path, labels).unwrap();
    (
        img_path.to_str().unwrap().to_string(),
        lab_path.to_str().unwrap().to_string(),
    )
}

#[test]
fn idx_round_trip_matches_independent_decoder() {
    // 100-sample fixture; the oracle below re-reads the raw bytes with
    // plain indexing, sharing nothing with the parser.
    let ds = make_synthetic(4, 9, 25, 4.0, 77).unwrap();
    let (images, labels) = to_idx_bytes(&ds, 3, 3);
    let dir = tempfile::tempdir().unwrap();
    let (img_path, lab_path) = write_fixture(dir.path(), &images, &labels);
    let parsed = load_idx(&img_path, &lab_path).unwrap();

    assert_eq!(parsed.len(), 100);
    assert_eq!(parsed.dim(), 9);
    let be32 = |b: &[u8], off: usize| u32::from_be_bytes(b[off..off + 4].try_into().unwrap());
    assert_eq!(be32(&images, 0), IMAGES_MAGIC);
    assert_eq!(be32(&labels, 0), LABELS_MAGIC);
    let count = be32(&images, 4) as usize;
    let dim = (be32(&images, 8) * be32(&images, 12)) as usize;
    for i in 0..count {
        for d in 0..dim {
            let byte = images[16 + i * dim + d];
            assert_eq!(parsed.samples[i][d], byte as f64 / 255.0, "pixel ({i}, {d})");
        }
        assert_eq!(parsed.labels[i], labels[8 + i] as usize, "label {i}");
    }
}

#[test]
fn idx_rejects_wrong_magic() {
    let ds = make_synthetic(2, 4, 5, 4.0, 78).unwrap();
    let (mut images, labels) = to_idx_bytes(&ds, 2, 2);
    images[3] = 0x99;
    let dir = tempfile::tempdir().unwrap();
    let (img_path, lab_path) = write_fixture(dir.path(), &images, &labels);
    match load_idx(&img_path, &lab_path) {
        Err(IdxError::BadMagic { expected, got, .. }) => {
            assert_eq!(expected, IMAGES_MAGIC);
            assert_eq!(got, 0x0000_0899);
        }
        other => panic!("expected BadMagic, got {other:?}"),
    }
}

#[test]
fn idx_reports_truncation_with_byte_counts() {
    let ds = make_synthetic(2, 4, 5, 4.0, 79).unwrap();
    let (mut images, labels) = to_idx_bytes(&ds, 2, 2);
    images.truncate(images.len() - 7);
    let dir = tempfile::tempdir().unwrap();
    let (img_path, lab_path) = write_fixture(dir.path(), &images, &labels);
    match load_idx(&img_path, &lab_path) {
        Err(IdxError::Truncated { expected, actual, .. }) => {
            assert_eq!(expected, 40);
            assert_eq!(actual, 33);
        }
        other => panic!("expected Truncated, got {other:?}"),
    }
}

#[test]
fn idx_rejects_count_mismatch() {
    let ds = make_synthetic(2, 4, 5, 4.0, 80).unwrap();
    let (images, _) = to_idx_bytes(&ds, 2, 2);
    let short = ds.subset(&(0..9).collect::<Vec<_>>());
    let (_, labels) = to_idx_bytes(&short, 2, 2);
    let dir = tempfile::tempdir().unwrap();
    let (img_path, lab_path) = write_fixture(dir.path(), &images, &labels);
    match load_idx(&img_path, &lab_path) {
        Err(IdxError::CountMismatch { images: i, labels: l }) => {
            assert_eq!((i, l), (10, 9));
        }
        other => panic!("expected CountMismatch, got {other:?}"),
    }
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aircomp"))
}

fn write_example_config(dir: &std::path::Path) -> std::path::PathBuf {
    let mut cfg = ExperimentConfig::example();
    cfg.learning.samples_per_class = 40;
    cfg.learning.test_per_class = 20;
    cfg.learning.rounds = 3;
    let path = dir.join("cfg.toml");
    std::fs::write(&path, toml::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

#[test]
fn binary_rejects_invalid_config_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::example();
    cfg.learning.eta = -1.0;
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, toml::to_string_pretty(&cfg).unwrap()).unwrap();
    let out = binary()
        .args(["simulate", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("learning.eta"), "stderr: {stderr}");
}

#[test]
fn binary_topology_writes_parseable_deployment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_example_config(dir.path());
    let out_dir = dir.path().join("topo");
    let out = binary()
        .args(["topology", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(out_dir.join("deployment.tsv")).unwrap();
    let dep = aircomp::formats::parse_deployment(&table, 50.0).unwrap();
    assert_eq!(dep.es_positions.len(), 7);
    assert_eq!(dep.ed_positions.len(), 12);
    let summary = std::fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(summary.contains("\"typical_servers_per_device\""));
}

#[test]
fn seed_override_changes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_example_config(dir.path());
    let run = |seed: &str, out: &str| -> String {
        let out_dir = dir.path().join(out);
        let status = binary()
            .args(["simulate", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out_dir)
            .args(["--seed", seed])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap()
    };
    let a = run("1", "a");
    let b = run("1", "b");
    let c = run("2", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
}
