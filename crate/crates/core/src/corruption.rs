//! Seeded noise injectors: rectangular block occlusion, rectangular Gaussian
//! patches and uniform dummy images.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::{stream_rng, RNG_ALGORITHM};
use crate::stats::LabeledMatrixDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    BlockOcclusion,
    GaussianPatch,
    DummyImages,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    pub area_ratio: f64,
    pub noise_mean: f64,
    pub noise_variance: f64,
    pub count: usize,
    pub seed: u64,
    pub rng_algorithm: String,
}

impl CorruptionSpec {
    pub fn block(area_ratio: f64, seed: u64) -> Self {
        Self::new(CorruptionKind::BlockOcclusion, area_ratio, 0.0, 0.0, 0, seed)
    }

    pub fn gaussian(area_ratio: f64, mean: f64, variance: f64, seed: u64) -> Self {
        Self::new(CorruptionKind::GaussianPatch, area_ratio, mean, variance, 0, seed)
    }

    pub fn dummies(count: usize, seed: u64) -> Self {
        Self::new(CorruptionKind::DummyImages, 0.0, 0.0, 0.0, count, seed)
    }

    fn new(kind: CorruptionKind, area_ratio: f64, noise_mean: f64, noise_variance: f64, count: usize, seed: u64) -> Self {
        Self {
            kind,
            area_ratio,
            noise_mean,
            noise_variance,
            count,
            seed,
            rng_algorithm: RNG_ALGORITHM.to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.area_ratio) {
            return Err(Error::InvalidCorruption(format!("area ratio {} outside [0, 1]", self.area_ratio)));
        }
        if !(self.noise_variance >= 0.0) || !self.noise_variance.is_finite() {
            return Err(Error::InvalidCorruption(format!("variance {} is negative", self.noise_variance)));
        }
        if !self.noise_mean.is_finite() {
            return Err(Error::InvalidCorruption("mean is not finite".into()));
        }
        Ok(())
    }

    /// Applies the corruption to every sample. Image `k` draws from stream
    /// `k`; dummy images draw from a single stream past the last image.
    pub fn apply(&self, data: &LabeledMatrixDataset) -> Result<LabeledMatrixDataset> {
        self.validate()?;
        match self.kind {
            CorruptionKind::DummyImages => {
                let mut rng = stream_rng(self.seed, data.len() as u64);
                inject_dummies(data, self.count, &mut rng)
            }
            CorruptionKind::BlockOcclusion | CorruptionKind::GaussianPatch => {
                let samples = data
                    .samples()
                    .iter()
                    .enumerate()
                    .map(|(k, x)| {
                        let mut rng = stream_rng(self.seed, k as u64);
                        match self.kind {
                            CorruptionKind::BlockOcclusion => block_occlusion(x, self.area_ratio, &mut rng),
                            _ => gaussian_patch(x, self.area_ratio, self.noise_mean, self.noise_variance, &mut rng),
                        }
                    })
                    .collect();
                LabeledMatrixDataset::with_classes(samples, data.labels().to_vec(), data.classes())
            }
        }
    }
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

impl Rect {
    pub fn area(&self) -> usize {
        self.height * self.width
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i >= self.top && i < self.top + self.height && j >= self.left && j < self.left + self.width
    }
}

/// Side lengths `round(d1·√ratio) × round(d2·√ratio)`.
pub fn rect_size(shape: (usize, usize), ratio: f64) -> (usize, usize) {
    let s = ratio.clamp(0.0, 1.0).sqrt();
    let h = ((shape.0 as f64) * s).round() as usize;
    let w = ((shape.1 as f64) * s).round() as usize;
    (h.min(shape.0), w.min(shape.1))
}

/// Draws a rectangle whose top-left corner is uniform over valid positions.
pub fn random_rect<R: Rng + ?Sized>(shape: (usize, usize), ratio: f64, rng: &mut R) -> Rect {
    let (height, width) = rect_size(shape, ratio);
    let top = rng.random_range(0..=shape.0 - height);
    let left = rng.random_range(0..=shape.1 - width);
    Rect { top, left, height, width }
}

/// Zeros a random rectangle covering about `ratio` of the image.
pub fn block_occlusion<R: Rng + ?Sized>(x: &Matrix, ratio: f64, rng: &mut R) -> Matrix {
    let rect = random_rect(x.shape(), ratio, rng);
    let mut out = x.clone();
    for i in rect.top..rect.top + rect.height {
        for j in rect.left..rect.left + rect.width {
            out.set(i, j, 0.0);
        }
    }
    out
}

/// Adds independent `Normal(mean, variance)` draws inside a random
/// rectangle, without clamping.
pub fn gaussian_patch_unclamped<R: Rng + ?Sized>(
    x: &Matrix,
    ratio: f64,
    mean: f64,
    variance: f64,
    rng: &mut R,
) -> Matrix {
    let rect = random_rect(x.shape(), ratio, rng);
    let normal = Normal::new(mean, variance.max(0.0).sqrt()).expect("finite parameters");
    let mut out = x.clone();
    for i in rect.top..rect.top + rect.height {
        for j in rect.left..rect.left + rect.width {
            out.set(i, j, x[(i, j)] + normal.sample(rng));
        }
    }
    out
}

/// [`gaussian_patch_unclamped`] followed by clamping every pixel to `[0, 1]`.
pub fn gaussian_patch<R: Rng + ?Sized>(x: &Matrix, ratio: f64, mean: f64, variance: f64, rng: &mut R) -> Matrix {
    let mut out = gaussian_patch_unclamped(x, ratio, mean, variance, rng);
    out.data_mut().iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
    out
}

/// Appends `count` images of i.i.d. `Uniform[0, 1)` pixels, each labeled
/// with a uniformly drawn existing class.
pub fn inject_dummies<R: Rng + ?Sized>(
    data: &LabeledMatrixDataset,
    count: usize,
    rng: &mut R,
) -> Result<LabeledMatrixDataset> {
    let (d1, d2) = data.shape();
    let (mut samples, mut labels, classes) = data.clone().into_parts();
    for _ in 0..count {
        let pixels: Vec<f64> = (0..d1 * d2).map(|_| rng.random::<f64>()).collect();
        samples.push(Matrix::new(d1, d2, pixels)?);
        labels.push(rng.random_range(1..=classes));
    }
    LabeledMatrixDataset::with_classes(samples, labels, classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn image(d1: usize, d2: usize) -> Matrix {
        Matrix::from_fn(d1, d2, |i, j| 0.1 + 0.8 * ((i * d2 + j) as f64 / (d1 * d2) as f64))
    }

    #[test]
    fn occlusion_extremes() {
        let x = image(4, 4);
        assert_eq!(block_occlusion(&x, 0.0, &mut stream_rng(1, 0)), x);
        assert_eq!(block_occlusion(&x, 1.0, &mut stream_rng(1, 0)), Matrix::zeros(4, 4));
    }

    #[test]
    fn quarter_occlusion_on_4x4() {
        let x = image(4, 4);
        let out = block_occlusion(&x, 0.25, &mut stream_rng(5, 0));
        let changed = (0..16).filter(|&k| out.as_slice()[k] != x.as_slice()[k]).count();
        assert_eq!(changed, 4);
        assert_eq!(out.as_slice().iter().filter(|v| **v == 0.0).count(), 4);
    }

    #[test]
    fn gaussian_no_op_cases() {
        let x = image(5, 3);
        assert_eq!(gaussian_patch(&x, 0.0, 0.0, 0.2, &mut stream_rng(2, 0)), x);
        assert_eq!(gaussian_patch(&x, 1.0, 0.0, 0.0, &mut stream_rng(2, 0)), x);
    }

    #[test]
    fn gaussian_clamps() {
        let x = image(8, 8);
        let out = gaussian_patch(&x, 1.0, 0.0, 4.0, &mut stream_rng(2, 0));
        assert!(out.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn dummies() {
        let x = image(3, 2);
        let data = LabeledMatrixDataset::new(vec![x.clone(), x.clone(), x], vec![1, 2, 3]).unwrap();
        let same = inject_dummies(&data, 0, &mut stream_rng(0, 0)).unwrap();
        assert_eq!(same, data);
        let more = inject_dummies(&data, 50, &mut stream_rng(0, 0)).unwrap();
        assert_eq!(more.len(), 53);
        assert_eq!(more.classes(), 3);
        assert_eq!(&more.samples()[..3], data.samples());
        assert!(more.samples()[3..]
            .iter()
            .all(|s| s.as_slice().iter().all(|v| (0.0..=1.0).contains(v))));
    }

    #[test]
    fn spec_validation() {
        assert!(CorruptionSpec::block(1.5, 0).validate().is_err());
        assert!(CorruptionSpec::gaussian(0.5, 0.0, -1.0, 0).validate().is_err());
        assert!(CorruptionSpec::dummies(3, 0).validate().is_ok());
    }
}
