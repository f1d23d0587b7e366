//! Train the tiny classifier on mixed soft-labeled batches and score the
//! held-out split.
//!
//! ```bash
//! cargo run --release -p midas --example train_and_evaluate
//! ```

use midas::synthdata::{gen_dataset, Split, SynthConfig};
use midas::trainer::{evaluate, train, TrainConfig, TrainMode};

fn main() -> midas::Result<()> {
    let dataset = gen_dataset(&SynthConfig {
        n_train: 300,
        n_test: 100,
        ..SynthConfig::default()
    })?;

    let config = TrainConfig {
        mode: TrainMode::MidasSoft,
        epochs: 30,
        ..TrainConfig::default()
    };
    println!(
        "training mode {} for {} epochs on {} samples...",
        config.mode.as_str(),
        config.epochs,
        dataset.split_items(Split::Train).len()
    );
    let (model, history) = train(&dataset, &config)?;

    for e in history.epochs.iter().step_by(5) {
        println!(
            "epoch {:>2}  loss {:.4}  lr {:.5}  train UAR {:.3}",
            e.epoch, e.loss, e.lr, e.train_uar
        );
    }

    let report = evaluate(&model, &dataset.split_items(Split::Test))?;
    println!("\ntest split:");
    print!("{}", report.text_table());
    Ok(())
}
