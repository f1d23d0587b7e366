//! Dataset analyses: which classes the annotators vote for together, and
//! the clear/mixed ambiguity split with distribution-matched resampling.
//!
//! ```bash
//! cargo run -p midas --example analyze_dataset
//! ```

use midas::metrics::{coexistence_matrix, resample_to_distribution, split_by_ambiguity};
use midas::synthdata::{gen_dataset, SynthConfig};
use midas::{RngStream, SoftLabel};

fn main() -> midas::Result<()> {
    let dataset = gen_dataset(&SynthConfig {
        classes: 5,
        n_train: 400,
        n_test: 0,
        ambiguity: 0.6,
        ..SynthConfig::default()
    })?;
    let labels: Vec<&SoftLabel> = dataset.samples.iter().map(|s| &s.item.soft).collect();

    println!("coexistence matrix (rows = argmax class, columns = mean soft label):");
    for (c, row) in coexistence_matrix(&labels)?.iter().enumerate() {
        match row {
            Some(values) => {
                let cells: Vec<String> = values.iter().map(|v| format!("{v:.3}")).collect();
                println!("  class {c}: {}", cells.join(" "));
            }
            None => println!("  class {c}: (no samples)"),
        }
    }

    let (clear, mixed) = split_by_ambiguity(&labels, 0.9)?;
    println!(
        "\nambiguity split at 0.9: {} clear of {} total (mixed group keeps all)",
        clear.len(),
        mixed.len()
    );

    // Resample the mixed group to 100 samples matching the full dataset's
    // class distribution.
    let mut by_class = [0usize; 5];
    for l in &labels {
        by_class[l.argmax()] += 1;
    }
    let total: usize = by_class.iter().sum();
    let targets: Vec<usize> = by_class.iter().map(|&c| c * 100 / total).collect();
    let mut rng = RngStream::new(3).derive_named("resample");
    let picked = resample_to_distribution(&labels, &targets, &mut rng)?;
    println!(
        "resampled mixed group to {} samples with per-class targets {targets:?}",
        picked.len()
    );
    Ok(())
}
