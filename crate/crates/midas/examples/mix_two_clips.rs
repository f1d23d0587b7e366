//! Mix two labeled clips with a fixed coefficient and show the combined
//! clip statistics and label, with and without softmax normalization.
//!
//! ```bash
//! cargo run -p midas --example mix_two_clips
//! ```

use midas::sampling::MixCoefficient;
use midas::{mix_clips, mix_labels, ClipShape, SoftLabel, VideoClip};

fn main() -> midas::Result<()> {
    let shape = ClipShape::new(4, 8, 8, 1);
    let dark = VideoClip::filled(shape, 0.2)?;
    let bright = VideoClip::filled(shape, 0.9)?;

    // Annotators split 7/3 on the first clip, 1/9 on the second.
    let y_dark = SoftLabel::new(vec![0.7, 0.3])?;
    let y_bright = SoftLabel::new(vec![0.1, 0.9])?;

    let lambda = MixCoefficient::new(0.6, 0.4)?;
    let mixed_clip = mix_clips(&dark, &bright, &lambda)?;
    println!(
        "clip intensities: {:.2} and {:.2} mixed at lambda {} -> {:.2}",
        dark.data()[0],
        bright.data()[0],
        lambda.lambda(),
        mixed_clip.data()[0]
    );

    let raw = mix_labels(&y_dark, &y_bright, &lambda, false)?;
    let normalized = mix_labels(&y_dark, &y_bright, &lambda, true)?;
    println!("labels  {:?} and {:?}", y_dark.probs(), y_bright.probs());
    println!("convex combination : {:?}", raw.pre_norm);
    println!("softmax-normalized : {:?}", normalized.label.probs());

    // The flipped coefficient reproduces the same sample exactly.
    let flipped = mix_clips(&bright, &dark, &lambda.complement())?;
    assert_eq!(mixed_clip, flipped);
    println!("mix(a, b, lambda) == mix(b, a, 1 - lambda): exact");
    Ok(())
}
