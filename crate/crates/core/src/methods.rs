//! Projector fitting for the four methods, plus projection, reconstruction
//! and the plain-text projector format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gen_sym_eig, sym_eig, EigenPairs, Matrix, DEFAULT_EIG_TOL};
use crate::stats::{build_scatters, compute_stats, LabeledMatrixDataset, ScatterMatrices};

/// Eigenvalues with `|λ| ≤ ZERO_EIG_REL · max|λ|` count as zero.
pub const ZERO_EIG_REL: f64 = 1e-10;

/// Orthonormality tolerance `‖WᵀW − I‖_F`.
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Relative ridge applied to a singular within-class scatter when the caller
/// gives none.
pub const AUTO_RIDGE_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "2dblda")]
    TwoDBLDA,
    #[serde(rename = "2dlda")]
    TwoDLDA,
    #[serde(rename = "2dpca")]
    TwoDPCA,
    #[serde(rename = "l2blda")]
    L2BLDA,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::TwoDBLDA, Method::TwoDLDA, Method::TwoDPCA, Method::L2BLDA];

    pub fn name(self) -> &'static str {
        match self {
            Method::TwoDBLDA => "2dblda",
            Method::TwoDLDA => "2dlda",
            Method::TwoDPCA => "2dpca",
            Method::L2BLDA => "l2blda",
        }
    }

    /// Whether fitted columns are mutually orthonormal.
    pub fn is_orthonormal(self) -> bool {
        self != Method::TwoDLDA
    }

    /// Whether samples are flattened to vectors before fitting.
    pub fn is_vector(self) -> bool {
        self == Method::L2BLDA
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method `{s}` (expected 2dblda, 2dlda, 2dpca or l2blda)"))
    }
}

/// Fitted `d1 × r` transformation.
///
/// `input_shape` is the sample shape the projector accepts. For L2BLDA it is
/// `(n, 1)`: samples are flattened row-major to length-`n` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub w: Matrix,
    /// Selected eigenvalues, in selection order. Empty for projectors read
    /// back from disk.
    pub eigenvalues: Vec<f64>,
    pub method: Method,
    pub input_shape: (usize, usize),
}

impl Projector {
    pub fn r(&self) -> usize {
        self.w.cols()
    }

    /// `‖WᵀW − I‖_F`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.w.tr_matmul(&self.w).expect("same matrix");
        (&gram - &Matrix::identity(self.r())).frobenius_norm()
    }

    /// Turns an image into the shape this projector consumes (flattening it
    /// for vector methods).
    pub fn prepare(&self, x: &Matrix) -> Result<Matrix> {
        if self.method.is_vector() && x.cols() != 1 {
            let flat = Matrix::column_vector(x.as_slice())?;
            return self.check_shape(flat);
        }
        self.check_shape(x.clone())
    }

    fn check_shape(&self, x: Matrix) -> Result<Matrix> {
        if x.shape() != self.input_shape {
            return Err(Error::ShapeMismatch { expected: self.input_shape, got: x.shape() });
        }
        Ok(x)
    }

    /// Writes `method,d1,d2,r` followed by `W` in row-major CSV.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{},{},{},{}\n",
            self.method,
            self.input_shape.0,
            self.input_shape.1,
            self.r()
        );
        for i in 0..self.w.rows() {
            let row: Vec<String> = self.w.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::ProjectorFormat(msg.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad("header must be `method,d1,d2,r`"));
        }
        let method: Method = fields[0].parse().map_err(|e: String| Error::ProjectorFormat(e))?;
        let parse_dim = |s: &str| s.parse::<usize>().map_err(|_| bad("dimension is not an integer"));
        let (d1, d2, r) = (parse_dim(fields[1])?, parse_dim(fields[2])?, parse_dim(fields[3])?);
        let mut data = Vec::with_capacity(d1 * r);
        for line in lines {
            for cell in line.split(',') {
                data.push(cell.trim().parse::<f64>().map_err(|_| bad("bad matrix entry"))?);
            }
        }
        let rows = if method.is_vector() { d1 * d2 } else { d1 };
        let w = Matrix::new(rows, r, data).map_err(|e| Error::ProjectorFormat(e.to_string()))?;
        let input_shape = if method.is_vector() { (d1 * d2, 1) } else { (d1, d2) };
        Ok(Projector { w, eigenvalues: Vec::new(), method, input_shape })
    }
}

fn check_r(r: usize, max: usize) -> Result<()> {
    if r == 0 || r > max {
        return Err(Error::InvalidDimension { r, max });
    }
    Ok(())
}

/// Indices of eigenvalues that survive the relative zero filter.
fn nonzero_indices(values: &[f64]) -> Vec<usize> {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = ZERO_EIG_REL * max;
    (0..values.len()).filter(|&k| values[k].abs() > floor).collect()
}

enum Order {
    Smallest,
    Largest,
}

/// Picks `r` nonzero pairs. Equal values keep the solver's index order.
fn select(eig: &EigenPairs, r: usize, order: Order) -> Result<(Matrix, Vec<f64>)> {
    let mut idx = nonzero_indices(&eig.values);
    if idx.len() < r {
        return Err(Error::RankDeficient { requested: r, available: idx.len() });
    }
    if let Order::Largest = order {
        idx.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]).then(a.cmp(&b)));
    }
    idx.truncate(r);
    let columns: Vec<Vec<f64>> = idx.iter().map(|&k| eig.vector(k)).collect();
    let values = idx.iter().map(|&k| eig.values[k]).collect();
    Ok((Matrix::from_columns(&columns)?, values))
}

fn fit_bound(data: &LabeledMatrixDataset, r: usize, method: Method) -> Result<Projector> {
    if data.classes() < 2 {
        return Err(Error::SingleClass);
    }
    let (d1, _) = data.shape();
    check_r(r, d1)?;
    let stats = compute_stats(data)?;
    let scatters = build_scatters(data, &stats);
    let eig = sym_eig(&scatters.bound, DEFAULT_EIG_TOL)?;
    let (w, eigenvalues) = select(&eig, r, Order::Smallest)?;
    Ok(Projector { w, eigenvalues, method, input_shape: data.shape() })
}

/// Two-dimensional Bhattacharyya-bound LDA: the `r` eigenvectors of the
/// bound matrix with the algebraically smallest nonzero eigenvalues.
pub fn fit_2dblda(data: &LabeledMatrixDataset, r: usize) -> Result<Projector> {
    fit_bound(data, r, Method::TwoDBLDA)
}

/// Vector-space Bhattacharyya-bound LDA on length-`n` samples.
pub fn fit_l2blda(vectors: &[Vec<f64>], labels: &[usize], r: usize) -> Result<Projector> {
    let samples = vectors.iter().map(|v| Matrix::column_vector(v)).collect::<Result<Vec<_>>>()?;
    let data = LabeledMatrixDataset::new(samples, labels.to_vec())?;
    fit_l2blda_dataset(&data, r)
}

/// L2BLDA on a matrix dataset whose samples are flattened row-major.
pub fn fit_l2blda_dataset(data: &LabeledMatrixDataset, r: usize) -> Result<Projector> {
    let vectors = if data.shape().1 == 1 { data.clone() } else { data.vectorized() };
    fit_bound(&vectors, r, Method::L2BLDA)
}

/// Outcome of a 2DLDA fit, including the ridge that was actually used.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaFit {
    pub projector: Projector,
    pub ridge: f64,
    /// True when the ridge was chosen automatically because the within-class
    /// scatter was singular.
    pub auto_ridge: bool,
}

/// Ridge used when none is supplied: zero for a positive definite `S_w`,
/// otherwise `1e-6 · tr(S_w) / d1`.
pub fn default_ridge(scatters: &ScatterMatrices) -> Result<f64> {
    let eig = sym_eig(&scatters.within, DEFAULT_EIG_TOL)?;
    let max = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let smallest = eig.values[0];
    if smallest <= 1e-12 * max {
        Ok(AUTO_RIDGE_REL * scatters.within.trace() / scatters.within.rows() as f64)
    } else {
        Ok(0.0)
    }
}

/// Classical 2DLDA through `S_b w = λ (S_w + ridge·I) w`.
pub fn fit_2dlda(data: &LabeledMatrixDataset, r: usize, ridge: Option<f64>) -> Result<LdaFit> {
    if data.classes() < 2 {
        return Err(Error::SingleClass);
    }
    let (d1, _) = data.shape();
    check_r(r, d1)?;
    let stats = compute_stats(data)?;
    let scatters = build_scatters(data, &stats);
    let (ridge, auto_ridge) = match ridge {
        Some(v) => (v, false),
        None => {
            let v = default_ridge(&scatters)?;
            (v, v > 0.0)
        }
    };
    let eig = gen_sym_eig(&scatters.between, &scatters.within, ridge, DEFAULT_EIG_TOL)?;
    let (w, eigenvalues) = select(&eig, r, Order::Largest)?;
    Ok(LdaFit {
        projector: Projector { w, eigenvalues, method: Method::TwoDLDA, input_shape: data.shape() },
        ridge,
        auto_ridge,
    })
}

/// Total scatter `(1/N) Σ (X_l − X̄)(X_l − X̄)ᵀ`.
pub fn total_scatter(data: &LabeledMatrixDataset) -> Matrix {
    let (d1, d2) = data.shape();
    let mut mean = Matrix::zeros(d1, d2);
    let inv = 1.0 / data.len() as f64;
    for s in data.samples() {
        mean = &mean + &s.scaled(inv);
    }
    let mut g = Matrix::zeros(d1, d1);
    for s in data.samples() {
        g.add_outer(&(s - &mean), inv);
    }
    g.symmetrized()
}

/// Unsupervised 2DPCA baseline, left-projection form.
pub fn fit_2dpca(data: &LabeledMatrixDataset, r: usize) -> Result<Projector> {
    if data.len() < 2 {
        return Err(Error::TooFewSamples);
    }
    let (d1, _) = data.shape();
    check_r(r, d1)?;
    let g = total_scatter(data);
    // identical samples leave only mean round-off in G
    let energy = data.samples().iter().map(|x| x.frobenius_norm().powi(2)).sum::<f64>() / data.len() as f64;
    if g.trace() <= 1e-20 * energy {
        return Err(Error::RankDeficient { requested: r, available: 0 });
    }
    let eig = sym_eig(&g, DEFAULT_EIG_TOL)?;
    let (w, eigenvalues) = select(&eig, r, Order::Largest)?;
    Ok(Projector { w, eigenvalues, method: Method::TwoDPCA, input_shape: data.shape() })
}

/// Fits any method. `ridge` only affects 2DLDA.
pub fn fit(method: Method, data: &LabeledMatrixDataset, r: usize, ridge: Option<f64>) -> Result<Projector> {
    match method {
        Method::TwoDBLDA => fit_2dblda(data, r),
        Method::TwoDLDA => fit_2dlda(data, r, ridge).map(|f| f.projector),
        Method::TwoDPCA => fit_2dpca(data, r),
        Method::L2BLDA => fit_l2blda_dataset(data, r),
    }
}

/// `WᵀX`, shape `r × d2`.
pub fn project(p: &Projector, x: &Matrix) -> Result<Matrix> {
    let x = p.prepare(x)?;
    p.w.tr_matmul(&x)
}

/// `W WᵀX`, same shape as the (prepared) input.
pub fn reconstruct(p: &Projector, x: &Matrix) -> Result<Matrix> {
    if !p.method.is_orthonormal() || p.orthonormality_error() > ORTHONORMAL_TOL {
        return Err(Error::NonOrthonormalProjector);
    }
    let projected = project(p, x)?;
    p.w.matmul(&projected)
}

/// Objective `−(1/N) Σ_{i<j} √(N_i N_j)‖Wᵀ(X̄_i − X̄_j)‖_F² + Δ Σ_i Σ_s ‖Wᵀ(X_is − X̄_i)‖_F²`
/// evaluated directly from the samples.
pub fn bound_objective(data: &LabeledMatrixDataset, w: &Matrix) -> Result<f64> {
    let stats = compute_stats(data)?;
    let n = data.len() as f64;
    let c = stats.classes();
    let mut between = 0.0;
    for i in 0..c {
        for j in (i + 1)..c {
            let diff = &stats.class_means[i] - &stats.class_means[j];
            let proj = w.tr_matmul(&diff)?.frobenius_norm();
            between += ((stats.counts[i] * stats.counts[j]) as f64).sqrt() / n * proj * proj;
        }
    }
    let mut within = 0.0;
    for (sample, label) in data.iter() {
        let proj = w.tr_matmul(&(sample - &stats.class_means[label - 1]))?.frobenius_norm();
        within += proj * proj;
    }
    Ok(-between + crate::stats::delta(&stats) * within)
}
