//! Draw mixing coefficients from Beta(alpha, alpha) and print a histogram
//! plus the sample moments.
//!
//! At the default alpha = 0.4 the distribution is U-shaped: most mixed
//! samples stay close to one of their two sources.
//!
//! ```bash
//! cargo run -p midas --example beta_lambda_sampling
//! ```

use midas::{sample_lambda, RngStream};

fn main() -> midas::Result<()> {
    let alpha = 0.4;
    let n = 200_000;
    let bins = 20;

    let mut rng = RngStream::new(42);
    let mut counts = vec![0usize; bins];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let x = sample_lambda(alpha, &mut rng)?.lambda();
        sum += x;
        sum_sq += x * x;
        counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let mean = sum / n as f64;
    let var = sum_sq / n as f64 - mean * mean;

    println!("lambda ~ Beta({alpha}, {alpha}), {n} draws");
    let peak = *counts.iter().max().unwrap();
    for (k, &c) in counts.iter().enumerate() {
        let bar = "#".repeat(c * 50 / peak);
        println!("[{:.2}, {:.2}) {bar}", k as f64 / bins as f64, (k + 1) as f64 / bins as f64);
    }
    println!("sample mean {mean:.4} (analytic 0.5)");
    println!(
        "sample var  {var:.4} (analytic {:.4})",
        1.0 / (4.0 * (2.0 * alpha + 1.0))
    );
    Ok(())
}
