//! End-to-end pipeline over the CLI file surfaces: generate, augment,
//! train, evaluate, analyze, all against one temp workspace.

use std::path::Path;

use midas::cli::run;
use midas::synthdata::read_dataset;
use midas::trainer::{ModelDims, TinyClassifier};

fn cmd(args: &[&str]) -> i32 {
    let full: Vec<String> = std::iter::once("midas".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    run(full)
}

fn assert_run_json(dir: &Path, subcommand: &str, seed: u64) {
    let text = std::fs::read_to_string(dir.join("run.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["subcommand"], subcommand);
    assert_eq!(v["seed"], seed);
    assert!(v["args"].is_object());
}

#[test]
fn generate_augment_train_eval_analyze() {
    let tmp = tempfile::tempdir().unwrap();
    let base = tmp.path();
    let data = base.join("data");
    let data_s = data.to_str().unwrap();

    // Small but non-trivial dataset.
    assert_eq!(
        cmd(&[
            "gen-synth", "--out", data_s, "--classes", "4", "--annotators", "8", "--frames",
            "4", "--height", "8", "--width", "8", "--train", "48", "--test", "16",
            "--ambiguity", "0.3", "--seed", "5", "--quiet",
        ]),
        0
    );
    assert_run_json(&data, "gen-synth", 5);

    // Augment and read the result back through the same format layer.
    let aug = base.join("aug");
    assert_eq!(
        cmd(&[
            "augment", "--data", data_s, "--out", aug.to_str().unwrap(), "--count", "25",
            "--label-mode", "soft", "--seed", "6", "--quiet",
        ]),
        0
    );
    assert_run_json(&aug, "augment", 6);
    let augmented = read_dataset(&aug).unwrap();
    assert_eq!(augmented.len(), 25);
    for s in &augmented.samples {
        let p = s.provenance.as_ref().expect("provenance populated");
        assert_ne!(p.source_i, p.source_j);
        assert!((0.0..=1.0).contains(&p.lambda));
        assert!(s.item.votes.is_none());
    }

    // Train briefly and evaluate the saved model on both splits.
    let trained = base.join("trained");
    let trained_s = trained.to_str().unwrap();
    assert_eq!(
        cmd(&[
            "train", "--data", data_s, "--out", trained_s, "--mode", "midas-hard", "--epochs",
            "4", "--hidden", "8", "--pool", "4", "--segments", "4", "--seed", "7", "--quiet",
        ]),
        0
    );
    assert_run_json(&trained, "train", 7);
    let history = std::fs::read_to_string(trained.join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 5, "header plus one line per epoch");

    let model_path = trained.join("model.midm");
    for split in ["train", "test"] {
        let out = base.join(format!("eval-{split}"));
        assert_eq!(
            cmd(&[
                "eval", "--model", model_path.to_str().unwrap(), "--data", data_s, "--out",
                out.to_str().unwrap(), "--split", split, "--quiet",
            ]),
            0
        );
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap())
                .unwrap();
        let uar = report["uar"].as_f64().unwrap();
        let war = report["war"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&uar));
        assert!((0.0..=1.0).contains(&war));
        assert!(out.join("report.txt").exists());
    }

    // An untrained (freshly initialized) model file still evaluates.
    let untrained_path = base.join("untrained.midm");
    let mut rng = midas::RngStream::new(1);
    TinyClassifier::init(
        ModelDims {
            segments: 4,
            pool: 4,
            channels: 1,
            hidden: 8,
            classes: 4,
        },
        &mut rng,
    )
    .unwrap()
    .save(&untrained_path)
    .unwrap();
    let out = base.join("eval-untrained");
    assert_eq!(
        cmd(&[
            "eval", "--model", untrained_path.to_str().unwrap(), "--data", data_s, "--out",
            out.to_str().unwrap(), "--quiet",
        ]),
        0
    );

    // Analyses over the generated set.
    let coex = base.join("coex");
    assert_eq!(
        cmd(&[
            "analyze", "coexist", "--data", data_s, "--out", coex.to_str().unwrap(), "--quiet",
        ]),
        0
    );
    let matrix = std::fs::read_to_string(coex.join("coexistence.csv")).unwrap();
    assert_eq!(matrix.lines().count(), 5, "header plus one row per class");

    let split_dir = base.join("split");
    assert_eq!(
        cmd(&[
            "analyze", "split", "--data", data_s, "--out", split_dir.to_str().unwrap(),
            "--threshold", "0.5", "--match-size", "40", "--seed", "9", "--quiet",
        ]),
        0
    );
    assert_run_json(&split_dir, "analyze-split", 9);
    for file in ["clear.csv", "mixed.csv"] {
        let text = std::fs::read_to_string(split_dir.join(file)).unwrap();
        assert_eq!(text.lines().count(), 41, "{file}: header plus match-size rows");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(split_dir.join("split_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["emitted_clear"], 40);
    assert_eq!(summary["emitted_mixed"], 40);
    assert!(summary["clear"].as_u64().unwrap() <= summary["mixed"].as_u64().unwrap());
}

#[test]
fn augmented_dataset_feeds_back_into_training() {
    let tmp = tempfile::tempdir().unwrap();
    let base = tmp.path();
    let data = base.join("data");
    let data_s = data.to_str().unwrap();
    assert_eq!(
        cmd(&[
            "gen-synth", "--out", data_s, "--classes", "3", "--annotators", "5", "--frames",
            "4", "--height", "8", "--width", "8", "--train", "30", "--test", "10", "--seed",
            "1", "--quiet",
        ]),
        0
    );

    // Mix a pre-generated augmented set, then train on it directly (the
    // fixed-set alternative to on-the-fly mixing).
    let aug = base.join("aug");
    let aug_s = aug.to_str().unwrap();
    assert_eq!(
        cmd(&["augment", "--data", data_s, "--out", aug_s, "--seed", "2", "--quiet"]),
        0
    );

    // The augmented directory has no test split, so splice the original
    // test records in for evaluation purposes.
    let mut augmented = read_dataset(&aug).unwrap();
    let original = read_dataset(&data).unwrap();
    assert_eq!(augmented.len(), 30, "count defaults to the train split size");
    augmented.samples.extend(
        original
            .samples
            .iter()
            .filter(|s| s.split == midas::synthdata::Split::Test)
            .cloned(),
    );
    let config = midas::trainer::TrainConfig {
        epochs: 3,
        mode: midas::trainer::TrainMode::Soft,
        hidden_dim: 8,
        pool: 4,
        num_segments: 4,
        ..Default::default()
    };
    let (model, _) = midas::trainer::train(&augmented, &config).unwrap();
    let report = midas::trainer::evaluate(
        &model,
        &augmented.split_items(midas::synthdata::Split::Test),
    )
    .unwrap();
    assert!(report.war >= 0.0 && report.war <= 1.0);
}
