//! Test-only oracles and random fixtures. Nothing here calls into the
//! library's numerical routines; every helper works on plain `Vec<f64>`s so
//! it can serve as an independent check.

#![allow(dead_code)]

use blda_core::{LabeledMatrixDataset, Matrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Random symmetric `n × n` matrix with standard normal entries.
pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = gauss(rng);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    Matrix::new(n, n, a).unwrap()
}

/// Eigenvalues of `[[a, b], [b, d]]`, ascending.
pub fn eig2_values(a: f64, b: f64, d: f64) -> [f64; 2] {
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mean - rad, mean + rad]
}

/// Roots of the characteristic cubic of a symmetric 3×3 matrix by the
/// trigonometric method, ascending.
pub fn eig3_values(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    if p1 == 0.0 {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return d;
    }
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (m[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let big = q + 2.0 * p * phi.cos();
    let small = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let mid = 3.0 * q - big - small;
    [small, mid, big]
}

/// Refines a root of `det(S − λI)` by Newton steps on the cubic.
pub fn refine_cubic_root(m: &[[f64; 3]; 3], mut lambda: f64) -> f64 {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0] + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    for _ in 0..3 {
        let f = -lambda.powi(3) + tr * lambda * lambda - minors * lambda + det;
        let df = -3.0 * lambda * lambda + 2.0 * tr * lambda - minors;
        if df.abs() < 1e-300 {
            break;
        }
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        lambda -= step;
    }
    lambda
}

/// Null vector of `S − λI` for a 3×3 symmetric matrix: the largest cross
/// product of two rows.
pub fn eig3_vector(m: &[[f64; 3]; 3], lambda: f64) -> [f64; 3] {
    let r: Vec<[f64; 3]> = (0..3)
        .map(|i| {
            let mut row = m[i];
            row[i] -= lambda;
            row
        })
        .collect();
    let cross = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let cands = [cross(r[0], r[1]), cross(r[0], r[2]), cross(r[1], r[2])];
    let best = cands
        .iter()
        .copied()
        .max_by(|a, b| norm(a).partial_cmp(&norm(b)).unwrap())
        .unwrap();
    let n = norm(&best);
    [best[0] / n, best[1] / n, best[2] / n]
}

/// Unit eigenvector of `[[a, b], [b, d]]` for eigenvalue `lambda`.
pub fn eig2_vector(a: f64, b: f64, d: f64, lambda: f64) -> [f64; 2] {
    let c1 = [b, lambda - a];
    let c2 = [lambda - d, b];
    let v = if norm(&c1) >= norm(&c2) { c1 } else { c2 };
    let n = norm(&v);
    if n == 0.0 {
        // scalar multiple of identity: any vector works
        return [1.0, 0.0];
    }
    [v[0] / n, v[1] / n]
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Columns of a matrix as vectors.
pub fn columns(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.cols()).map(|j| (0..m.rows()).map(|i| m[(i, j)]).collect()).collect()
}

/// Upper bound on the sine of the largest principal angle between the spans
/// of two orthonormal column sets of equal dimension:
/// `‖(I − A Aᵀ) B‖_F`.
pub fn subspace_gap(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for bv in b {
        let mut resid = bv.clone();
        for av in a {
            let c = dot(av, bv);
            for (r, x) in resid.iter_mut().zip(av) {
                *r -= c * x;
            }
        }
        total += dot(&resid, &resid);
    }
    total.sqrt()
}

/// Maximum principal angle (radians) from the gap bound.
pub fn principal_angle(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    subspace_gap(a, b).min(1.0).asin()
}

/// `Gram-Schmidt` orthonormalization.
pub fn orthonormalize(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let c = dot(u, &w);
            for (x, y) in w.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
        let n = norm(&w);
        out.push(w.into_iter().map(|x| x / n).collect());
    }
    out
}

/// Random orthogonal `n × n` matrix (rows orthonormal).
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    let vs: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| gauss(rng)).collect()).collect();
    orthonormalize(&vs)
}

/// Class-structured random data: class means drawn with spread
/// `mean_scale`, samples scattered around them with `noise`.
pub fn random_dataset<R: Rng>(
    rng: &mut R,
    d1: usize,
    d2: usize,
    class_sizes: &[usize],
    mean_scale: f64,
    noise: f64,
) -> LabeledMatrixDataset {
    let mut samples = Vec::new();
    let mut labels = Vec::new();
    for (c, &size) in class_sizes.iter().enumerate() {
        let mean: Vec<f64> = (0..d1 * d2).map(|_| mean_scale * gauss(rng)).collect();
        for _ in 0..size {
            let x: Vec<f64> = mean.iter().map(|m| m + noise * gauss(rng)).collect();
            samples.push(Matrix::new(d1, d2, x).unwrap());
            labels.push(c + 1);
        }
    }
    LabeledMatrixDataset::new(samples, labels).unwrap()
}

/// Random dataset with `d1, d2 ≤ 10`, `c ≤ 5`, `N ≤ 60`, sized so the
/// within-class term has full row rank.
pub fn random_small_dataset<R: Rng>(rng: &mut R) -> LabeledMatrixDataset {
    loop {
        let d1 = rng.random_range(1..=10);
        let d2 = rng.random_range(1..=10);
        let c = rng.random_range(2..=5);
        let sizes: Vec<usize> = (0..c).map(|_| rng.random_range(2..=12)).collect();
        let n: usize = sizes.iter().sum();
        if n > 60 || (n - c) * d2 < d1 + 1 {
            continue;
        }
        let mean_scale = rng.random_range(0.5..3.0);
        return random_dataset(rng, d1, d2, &sizes, mean_scale, 1.0);
    }
}

/// Per-class means as flat row-major vectors, computed independently.
pub fn naive_means(data: &LabeledMatrixDataset) -> (Vec<Vec<f64>>, Vec<usize>) {
    let len = data.samples()[0].as_slice().len();
    let mut sums = vec![vec![0.0; len]; data.classes()];
    let mut counts = vec![0usize; data.classes()];
    for (x, l) in data.iter() {
        counts[l - 1] += 1;
        for (s, v) in sums[l - 1].iter_mut().zip(x.as_slice()) {
            *s += v;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        s.iter_mut().for_each(|v| *v /= c as f64);
    }
    (sums, counts)
}

/// `¼ Σ_{i<j} √(P_i P_j) ‖X̄_i − X̄_j‖_F²` by a direct double loop.
pub fn naive_delta(data: &LabeledMatrixDataset) -> f64 {
    let (means, counts) = naive_means(data);
    let n = data.len() as f64;
    let mut total = 0.0;
    for i in 0..means.len() {
        for j in (i + 1)..means.len() {
            let gap: f64 = means[i].iter().zip(&means[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            total += ((counts[i] as f64 / n) * (counts[j] as f64 / n)).sqrt() * gap;
        }
    }
    total / 4.0
}

/// `Σ_{k} w_k x_k` over the rows of a flat `d1 × d2` matrix: `wᵀX`.
pub fn project_flat(w: &[f64], x: &[f64], d2: usize) -> Vec<f64> {
    (0..d2).map(|j| w.iter().enumerate().map(|(i, wi)| wi * x[i * d2 + j]).sum()).collect()
}

/// The bound objective at orthonormal columns `ws`, from the samples.
pub fn objective_oracle(data: &LabeledMatrixDataset, ws: &[Vec<f64>]) -> f64 {
    let (means, counts) = naive_means(data);
    let d2 = data.shape().1;
    let n = data.len() as f64;
    let delta = naive_delta(data);
    let sq_proj = |v: &[f64]| -> f64 {
        ws.iter().map(|w| project_flat(w, v, d2).iter().map(|x| x * x).sum::<f64>()).sum()
    };
    let mut between = 0.0;
    for i in 0..means.len() {
        for j in (i + 1)..means.len() {
            let diff: Vec<f64> = means[i].iter().zip(&means[j]).map(|(a, b)| a - b).collect();
            between += ((counts[i] * counts[j]) as f64).sqrt() / n * sq_proj(&diff);
        }
    }
    let mut within = 0.0;
    for (x, l) in data.iter() {
        let diff: Vec<f64> = x.as_slice().iter().zip(&means[l - 1]).map(|(a, b)| a - b).collect();
        within += sq_proj(&diff);
    }
    -between + delta * within
}

/// Brute-force 1-NN accuracy in the raw image space.
pub fn raw_nn_accuracy(train: &LabeledMatrixDataset, test: &LabeledMatrixDataset) -> f64 {
    let mut hits = 0;
    for (q, truth) in test.iter() {
        let mut best = (f64::INFINITY, 0);
        for (t, l) in train.iter() {
            let d: f64 = t.as_slice().iter().zip(q.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.0 {
                best = (d, l);
            }
        }
        if best.1 == truth {
            hits += 1;
        }
    }
    hits as f64 / test.len() as f64
}

/// Two classes of `d1 × d2` images with constant intensities 0.25 and 0.75
/// plus per-pixel noise, so the class-mean gap is ten times the
/// within-class Frobenius spread. Returns `(train, test)` with `per_split`
/// samples of each class in each.
pub fn separable_blobs(d1: usize, d2: usize, per_split: usize, seed: u64) -> (LabeledMatrixDataset, LabeledMatrixDataset) {
    let mut r = rng(seed);
    let pixels = (d1 * d2) as f64;
    let gap = 0.5 * pixels.sqrt();
    let sigma = gap / 10.0 / pixels.sqrt();
    let make = |r: &mut ChaCha8Rng| {
        let mut samples = Vec::new();
        let mut labels = Vec::new();
        for (class, level) in [(1usize, 0.25f64), (2, 0.75)] {
            for _ in 0..per_split {
                let x: Vec<f64> = (0..d1 * d2).map(|_| (level + sigma * gauss(r)).clamp(0.0, 1.0)).collect();
                samples.push(Matrix::new(d1, d2, x).unwrap());
                labels.push(class);
            }
        }
        LabeledMatrixDataset::new(samples, labels).unwrap()
    };
    let train = make(&mut r);
    let test = make(&mut r);
    (train, test)
}
