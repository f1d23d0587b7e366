//! A reduced version of the four-mode ablation: hard vs soft labels, with
//! and without mixing, over two seeds.
//!
//! The full-scale version (600/200 samples, 50 epochs, five seeds) runs as
//! part of the acceptance tests and via `midas ablation`.
//!
//! ```bash
//! cargo run --release -p midas --example ablation_mini
//! ```

use midas::cli::ablation_suite;
use midas::synthdata::{gen_dataset, SynthConfig};
use midas::trainer::TrainConfig;

fn main() -> midas::Result<()> {
    let dataset = gen_dataset(&SynthConfig {
        n_train: 200,
        n_test: 80,
        ..SynthConfig::default()
    })?;
    let base = TrainConfig {
        epochs: 25,
        ..TrainConfig::default()
    };

    let summary = ablation_suite(&dataset, &[1, 2], &base)?;
    print!("{}", summary.to_csv());
    Ok(())
}
