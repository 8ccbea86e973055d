//! Fixtures shared by the benchmarks under `benches/`.

use blda_core::rng::stream_rng;
use blda_core::{LabeledMatrixDataset, Matrix};
use rand::Rng;

/// `classes × per_class` images of size `d1 × d2`: a random class pattern
/// plus uniform noise, pixels in `[0, 1]`.
pub fn synthetic(d1: usize, d2: usize, classes: usize, per_class: usize, seed: u64) -> LabeledMatrixDataset {
    let mut rng = stream_rng(seed, 0);
    let patterns: Vec<Vec<f64>> = (0..classes).map(|_| (0..d1 * d2).map(|_| rng.random::<f64>()).collect()).collect();
    let mut samples = Vec::with_capacity(classes * per_class);
    let mut labels = Vec::with_capacity(classes * per_class);
    for (c, pattern) in patterns.iter().enumerate() {
        for _ in 0..per_class {
            let x = pattern.iter().map(|p| (0.7 * p + 0.3 * rng.random::<f64>()).min(1.0)).collect();
            samples.push(Matrix::new(d1, d2, x).expect("finite pixels"));
            labels.push(c + 1);
        }
    }
    LabeledMatrixDataset::new(samples, labels).expect("non-empty classes")
}

/// Random symmetric `n × n` matrix with entries in `[-1, 1]`.
pub fn symmetric(n: usize, seed: u64) -> Matrix {
    let mut rng = stream_rng(seed, 1);
    let upper: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    Matrix::from_fn(n, n, |i, j| if i <= j { upper[i * n + j] } else { upper[j * n + i] })
}
