//! Generate a small dataset and mix fresh samples from it, printing the
//! provenance of each mixed sample.
//!
//! ```bash
//! cargo run -p midas --example augment_dataset
//! ```

use midas::mixing::{midas_batch, LabelMode};
use midas::synthdata::{gen_dataset, Split, SynthConfig};
use midas::RngStream;

fn main() -> midas::Result<()> {
    let dataset = gen_dataset(&SynthConfig {
        classes: 4,
        n_train: 24,
        n_test: 0,
        ..SynthConfig::default()
    })?;
    let sources = dataset.split_items(Split::Train);

    let rng = RngStream::new(11).derive_named("augment");
    let batch = midas_batch(&sources, 8, 0.4, LabelMode::Soft, true, &rng)?;

    println!("{:<12} {:<12} {:>8}  label (softmax-normalized)", "source i", "source j", "lambda");
    for sample in &batch {
        let label: Vec<f64> = sample
            .label
            .probs()
            .iter()
            .map(|p| (p * 1000.0).round() / 1000.0)
            .collect();
        println!(
            "{:<12} {:<12} {:>8.4}  {label:?}",
            sample.source_i,
            sample.source_j,
            sample.lambda.lambda()
        );
    }

    // The same stream reproduces the same batch.
    let again = midas_batch(&sources, 8, 0.4, LabelMode::Soft, true, &rng)?;
    assert_eq!(batch[0].clip, again[0].clip);
    println!("re-running with the same stream reproduces the batch exactly");
    Ok(())
}
