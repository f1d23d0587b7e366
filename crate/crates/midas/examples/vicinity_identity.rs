//! Rewrite a mixed soft label around the (synthetic) true class and verify
//! the reconstruction identity on random draws.
//!
//! With `l` of `S` votes correct, `lambda * q_i + (1 - lambda) * q_j`
//! equals `lambda' * onehot(true) + (1 - lambda') * y'_j` for
//! `lambda' = lambda * l / S`; this is the algebra that justifies training
//! on mixed soft labels when the true label is unknown.
//!
//! ```bash
//! cargo run -p midas --example vicinity_identity
//! ```

use rand::Rng;

use midas::label::AnnotatorVotes;
use midas::mixing::decompose_vicinity;
use midas::{mix_labels, sample_lambda, RngStream, SoftLabel};

fn main() -> midas::Result<()> {
    let mut rng = RngStream::new(7);

    // One worked case, printed in full.
    let votes = AnnotatorVotes::new(vec![2, 2, 2, 2, 2, 2, 2, 2, 0, 5])?;
    let q_i = SoftLabel::from_votes(&votes, 7)?;
    let q_j = SoftLabel::new(vec![0.05, 0.05, 0.1, 0.3, 0.3, 0.1, 0.1])?;
    let lambda = sample_lambda(0.4, &mut rng)?;
    let decomp = decompose_vicinity(&lambda, 2, &votes, &q_j)?;
    println!("lambda  = {:.6}", lambda.lambda());
    println!(
        "l/S     = {}/{} correct votes -> lambda' = {:.6}",
        decomp.correct_votes, decomp.annotators, decomp.lambda_prime
    );
    println!("y'_j    = {:?}", decomp.y_prime_j.as_ref().unwrap());

    let direct = mix_labels(&q_i, &q_j, &lambda, false)?.pre_norm;
    let reconstructed = decomp.reconstruct(2, 7);
    let err = direct
        .iter()
        .zip(&reconstructed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("reconstruction error = {err:.2e}");

    // And a random sweep.
    let mut worst = 0.0f64;
    for _ in 0..20_000 {
        let classes = rng.random_range(2..=10);
        let annotators = rng.random_range(1..=20);
        let true_class = rng.random_range(0..classes);
        let v: Vec<usize> = (0..annotators).map(|_| rng.random_range(0..classes)).collect();
        let votes = AnnotatorVotes::new(v)?;
        let q_i = SoftLabel::from_votes(&votes, classes)?;
        let raw: Vec<f64> = (0..classes).map(|_| rng.random_range(0.01..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        let q_j = SoftLabel::new(raw.into_iter().map(|x| x / sum).collect())?;
        let lambda = sample_lambda(0.4, &mut rng)?;

        let decomp = decompose_vicinity(&lambda, true_class, &votes, &q_j)?;
        let direct = mix_labels(&q_i, &q_j, &lambda, false)?.pre_norm;
        for (a, b) in direct.iter().zip(decomp.reconstruct(true_class, classes)) {
            worst = worst.max((a - b).abs());
        }
    }
    println!("worst error over 20000 random draws = {worst:.2e}");
    Ok(())
}
