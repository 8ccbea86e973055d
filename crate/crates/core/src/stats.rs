//! Labeled matrix datasets, per-class statistics and the scatter matrices
//! built from them.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `N` samples of identical shape `d1 × d2`, each labeled with a class in
/// `1..=classes`. Every class has at least one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrixDataset {
    samples: Vec<Matrix>,
    labels: Vec<usize>,
    classes: usize,
}

impl LabeledMatrixDataset {
    /// The class count is taken as the largest label.
    pub fn new(samples: Vec<Matrix>, labels: Vec<usize>) -> Result<Self> {
        let classes = labels.iter().copied().max().unwrap_or(0);
        Self::with_classes(samples, labels, classes)
    }

    pub fn with_classes(samples: Vec<Matrix>, labels: Vec<usize>, classes: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if samples.len() != labels.len() {
            return Err(Error::LabelCount { samples: samples.len(), labels: labels.len() });
        }
        let shape = samples[0].shape();
        if let Some(bad) = samples.iter().find(|s| s.shape() != shape) {
            return Err(Error::ShapeMismatch { expected: shape, got: bad.shape() });
        }
        let mut seen = vec![false; classes];
        for &label in &labels {
            if label == 0 || label > classes {
                return Err(Error::InvalidLabel { label, classes });
            }
            seen[label - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyClass { class: missing + 1 });
        }
        Ok(Self { samples, labels, classes })
    }

    pub fn samples(&self) -> &[Matrix] {
        &self.samples
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(d1, d2)`.
    pub fn shape(&self) -> (usize, usize) {
        self.samples[0].shape()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Matrix, usize)> {
        self.samples.iter().zip(self.labels.iter().copied())
    }

    /// Views every sample as a row-major flattened `n × 1` column.
    pub fn vectorized(&self) -> LabeledMatrixDataset {
        let samples = self
            .samples
            .iter()
            .map(|s| Matrix::column_vector(s.as_slice()).expect("finite by construction"))
            .collect();
        LabeledMatrixDataset { samples, labels: self.labels.clone(), classes: self.classes }
    }

    pub fn into_parts(self) -> (Vec<Matrix>, Vec<usize>, usize) {
        (self.samples, self.labels, self.classes)
    }
}

/// Per-class counts, priors and means.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStatistics {
    pub counts: Vec<usize>,
    pub priors: Vec<f64>,
    pub class_means: Vec<Matrix>,
    pub overall_mean: Matrix,
}

impl ClassStatistics {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }
}

fn mean_of<'a>(items: impl Iterator<Item = &'a Matrix>, shape: (usize, usize)) -> (Matrix, usize) {
    let mut acc = Matrix::zeros(shape.0, shape.1);
    let mut n = 0;
    for m in items {
        for (a, v) in acc.data_mut().iter_mut().zip(m.as_slice()) {
            *a += v;
        }
        n += 1;
    }
    if n > 0 {
        let inv = 1.0 / n as f64;
        acc.data_mut().iter_mut().for_each(|a| *a *= inv);
    }
    (acc, n)
}

pub fn compute_stats(data: &LabeledMatrixDataset) -> Result<ClassStatistics> {
    let shape = data.shape();
    let n = data.len() as f64;
    let mut counts = Vec::with_capacity(data.classes());
    let mut class_means = Vec::with_capacity(data.classes());
    for class in 1..=data.classes() {
        let (mean, count) = mean_of(data.iter().filter(|(_, l)| *l == class).map(|(s, _)| s), shape);
        if count == 0 {
            return Err(Error::EmptyClass { class });
        }
        counts.push(count);
        class_means.push(mean);
    }
    let (overall_mean, _) = mean_of(data.samples().iter(), shape);
    let priors = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(ClassStatistics { counts, priors, class_means, overall_mean })
}

/// Adaptive weight `¼ Σ_{i<j} √(P_i P_j) ‖X̄_i − X̄_j‖_F²`.
pub fn delta(stats: &ClassStatistics) -> f64 {
    let c = stats.classes();
    let mut sum = 0.0;
    for i in 0..c {
        for j in (i + 1)..c {
            let gap = (&stats.class_means[i] - &stats.class_means[j]).frobenius_norm();
            sum += (stats.priors[i] * stats.priors[j]).sqrt() * gap * gap;
        }
    }
    0.25 * sum
}

/// The `d1 × d1` scatter matrices shared by all discriminant methods.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterMatrices {
    /// `(1/N) Σ N_i (X̄_i − X̄)(X̄_i − X̄)ᵀ`
    pub between: Matrix,
    /// `(1/N) Σ_i Σ_s (X_is − X̄_i)(X_is − X̄_i)ᵀ`
    pub within: Matrix,
    /// `(1/N) Σ_{i<j} √(N_i N_j)(X̄_i − X̄_j)(X̄_i − X̄_j)ᵀ`, the pairwise
    /// between term that enters `bound` with a negative sign.
    pub pairwise_between: Matrix,
    /// Unnormalized within-class sum `Σ_i Σ_s (X_is − X̄_i)(X_is − X̄_i)ᵀ`.
    pub within_sum: Matrix,
    pub delta: f64,
    /// `−pairwise_between + delta · within_sum`, the matrix whose smallest
    /// eigenvectors give the Bhattacharyya-bound projection.
    pub bound: Matrix,
}

pub fn build_scatters(data: &LabeledMatrixDataset, stats: &ClassStatistics) -> ScatterMatrices {
    let (d1, _) = data.shape();
    let n = data.len() as f64;
    let c = stats.classes();

    let mut between = Matrix::zeros(d1, d1);
    for (mean, &count) in stats.class_means.iter().zip(&stats.counts) {
        between.add_outer(&(mean - &stats.overall_mean), count as f64 / n);
    }

    let mut within_sum = Matrix::zeros(d1, d1);
    for (sample, label) in data.iter() {
        within_sum.add_outer(&(sample - &stats.class_means[label - 1]), 1.0);
    }

    let mut pairwise_between = Matrix::zeros(d1, d1);
    for i in 0..c {
        for j in (i + 1)..c {
            let weight = ((stats.counts[i] * stats.counts[j]) as f64).sqrt() / n;
            pairwise_between.add_outer(&(&stats.class_means[i] - &stats.class_means[j]), weight);
        }
    }

    let delta = delta(stats);
    let bound = &within_sum.scaled(delta) - &pairwise_between;

    ScatterMatrices {
        between: between.symmetrized(),
        within: within_sum.scaled(1.0 / n).symmetrized(),
        pairwise_between: pairwise_between.symmetrized(),
        within_sum: within_sum.symmetrized(),
        delta,
        bound: bound.symmetrized(),
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::e1;
    use super::*;

    fn m(rows: &[[f64; 2]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn e1_statistics() {
        let s = compute_stats(&e1()).unwrap();
        assert_eq!(s.counts, vec![2, 2]);
        assert_eq!(s.priors, vec![0.5, 0.5]);
        assert_eq!(s.class_means[0], m(&[[1.0, 0.0], [0.0, 1.0]]));
        assert_eq!(s.class_means[1], m(&[[-1.0, 0.0], [0.0, 1.0]]));
        assert_eq!(s.overall_mean, m(&[[0.0, 0.0], [0.0, 1.0]]));
        assert_eq!(delta(&s), 0.5);
    }

    #[test]
    fn e1_scatters() {
        let data = e1();
        let s = build_scatters(&data, &compute_stats(&data).unwrap());
        assert_eq!(s.pairwise_between, m(&[[2.0, 0.0], [0.0, 0.0]]));
        assert_eq!(s.within_sum, m(&[[0.0, 0.0], [0.0, 4.0]]));
        assert_eq!(s.bound, m(&[[-2.0, 0.0], [0.0, 2.0]]));
        assert_eq!(s.within, m(&[[0.0, 0.0], [0.0, 1.0]]));
        assert_eq!(s.between, m(&[[1.0, 0.0], [0.0, 0.0]]));
    }

    #[test]
    fn one_sample_per_class() {
        let a = m(&[[1.0, 2.0], [3.0, 4.0]]);
        let b = m(&[[0.0, 1.0], [1.0, 0.0]]);
        let data = LabeledMatrixDataset::new(vec![a.clone(), b.clone()], vec![1, 2]).unwrap();
        let stats = compute_stats(&data).unwrap();
        assert_eq!(stats.class_means, vec![a, b]);
        let s = build_scatters(&data, &stats);
        assert_eq!(s.within, Matrix::zeros(2, 2));
        assert_eq!(s.bound, s.pairwise_between.scaled(-1.0));
    }

    #[test]
    fn identical_samples() {
        let x = m(&[[0.5, 0.25], [1.0, 0.0]]);
        let data = LabeledMatrixDataset::new(vec![x.clone(); 4], vec![1, 2, 1, 2]).unwrap();
        let stats = compute_stats(&data).unwrap();
        assert!(stats.class_means.iter().all(|c| *c == x));
        assert_eq!(delta(&stats), 0.0);
        let s = build_scatters(&data, &stats);
        assert_eq!(s.within_sum, Matrix::zeros(2, 2));
        assert_eq!(s.bound, Matrix::zeros(2, 2));
    }

    #[test]
    fn single_class() {
        let data = LabeledMatrixDataset::new(vec![m(&[[1.0, 0.0], [0.0, 1.0]]); 3], vec![1; 3]).unwrap();
        let stats = compute_stats(&data).unwrap();
        assert_eq!(delta(&stats), 0.0);
        assert_eq!(build_scatters(&data, &stats).bound, Matrix::zeros(2, 2));
    }

    #[test]
    fn dataset_validation() {
        let x = m(&[[0.0, 0.0], [0.0, 0.0]]);
        assert_eq!(
            LabeledMatrixDataset::with_classes(vec![x.clone()], vec![1], 2),
            Err(Error::EmptyClass { class: 2 })
        );
        assert!(matches!(
            LabeledMatrixDataset::new(vec![x.clone()], vec![0]),
            Err(Error::InvalidLabel { .. })
        ));
        assert!(matches!(
            LabeledMatrixDataset::new(vec![x, Matrix::zeros(3, 2)], vec![1, 1]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert_eq!(LabeledMatrixDataset::new(vec![], vec![]), Err(Error::EmptyDataset));
    }
}
