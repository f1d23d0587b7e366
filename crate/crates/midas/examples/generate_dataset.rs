//! Generate a synthetic ambiguous-clip dataset, write it to disk, read it
//! back, and summarize what the annotators "saw".
//!
//! ```bash
//! cargo run -p midas --example generate_dataset
//! ```

use midas::synthdata::{gen_dataset, read_dataset, write_dataset, Split, SynthConfig};

fn main() -> midas::Result<()> {
    let config = SynthConfig {
        classes: 5,
        annotators: 10,
        n_train: 100,
        n_test: 40,
        ambiguity: 0.6,
        ..SynthConfig::default()
    };
    let dataset = gen_dataset(&config)?;

    let dir = std::env::temp_dir().join("midas-example-dataset");
    let _ = std::fs::remove_dir_all(&dir);
    write_dataset(&dataset, &dir)?;
    let reread = read_dataset(&dir)?;
    println!(
        "wrote and reread {} samples ({} train / {} test) at {}",
        reread.len(),
        reread.split_items(Split::Train).len(),
        reread.split_items(Split::Test).len(),
        dir.display()
    );

    // How ambiguous did the votes come out?
    let mut unanimous = 0usize;
    let mut max_sum = 0.0f64;
    for s in &reread.samples {
        if s.item.soft.max_prob() == 1.0 {
            unanimous += 1;
        }
        max_sum += s.item.soft.max_prob();
    }
    println!(
        "mean max soft probability {:.3}; {} of {} samples unanimous",
        max_sum / reread.len() as f64,
        unanimous,
        reread.len()
    );

    let sample = &reread.samples[0].item;
    println!(
        "first sample {}: true class {:?}, votes {:?}, soft {:?}",
        sample.id,
        sample.true_class,
        sample.votes.as_ref().map(|v| v.votes().to_vec()),
        sample
            .soft
            .probs()
            .iter()
            .map(|p| (p * 100.0).round() / 100.0)
            .collect::<Vec<_>>()
    );
    Ok(())
}
