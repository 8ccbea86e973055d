//! Dense row-major matrices and the symmetric eigensolvers used by every
//! fitting method.
//!
//! The symmetric solver is a cyclic Jacobi iteration. It is slower than a
//! tridiagonal QR for large orders but is accurate to working precision on
//! every real symmetric input, which is what the image sizes handled here
//! (a few hundred rows at most) need. The generalized problem
//! `A w = λ (B + ridge·I) w` is reduced to the standard one by a Cholesky
//! factor of the regularized right-hand side.

use std::fmt;
use std::ops::{Add, Index, Sub};

use crate::error::{Error, Result};

/// Maximum number of full Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Relative asymmetry accepted by [`sym_eig`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default convergence tolerance used by the fitting methods.
pub const DEFAULT_EIG_TOL: f64 = 1e-13;

/// Dense real matrix stored in row-major order. All entries are finite.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::EntryCount { rows, cols, got: data.len() });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: k / cols, col: k % cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            let r = r.as_ref();
            if r.len() != m {
                return Err(Error::EntryCount { rows: n, cols: m, got: data.len() + r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(n, m, data)
    }

    /// Builds a column vector.
    pub fn column_vector(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    /// Builds a matrix whose columns are the given equal-length vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = vec![0.0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::EntryCount { rows, cols, got: col.len() * cols });
            }
            for (i, v) in col.iter().enumerate() {
                data[i * cols + j] = *v;
            }
        }
        Self::new(rows, cols, data)
    }

    /// Panics if `rows` or `cols` is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self::new(n, n, data)
    }

    /// Panics if `f` yields a non-finite value.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data).expect("from_fn produced an invalid matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, other.cols),
                got: other.shape(),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other`, without forming the transpose.
    pub fn tr_matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.rows, other.cols),
                got: other.shape(),
            });
        }
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let a_row = self.row(k);
            let b_row = other.row(k);
            for (i, a) in a_row.iter().enumerate() {
                if *a == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(b_row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self += alpha · D · Dᵀ` for a `rows × k` matrix `D`.
    ///
    /// Panics if `D` does not have `self.rows()` rows or `self` is not square.
    pub fn add_outer(&mut self, d: &Matrix, alpha: f64) {
        assert!(self.is_square() && d.rows == self.rows, "add_outer shape mismatch");
        let n = self.rows;
        for i in 0..n {
            let di = d.row(i);
            for j in 0..n {
                let dj = d.row(j);
                let dot: f64 = di.iter().zip(dj).map(|(a, b)| a * b).sum();
                self.data[i * n + j] += alpha * dot;
            }
        }
    }

    pub fn scaled(&self, alpha: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * alpha).collect(),
        }
    }

    /// `(M + Mᵀ) / 2`. Panics on a non-square matrix.
    pub fn symmetrized(&self) -> Matrix {
        assert!(self.is_square(), "symmetrize needs a square matrix");
        Matrix::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest relative asymmetry `max |m_ij - m_ji| / ‖M‖_F`.
    pub fn asymmetry(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / norm
    }

    /// Row-major flattening.
    pub fn flatten(&self) -> Vec<f64> {
        self.data.clone()
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix add shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sub shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// `sqrt(Σ a_ij²)`.
pub fn frobenius_norm(a: &Matrix) -> f64 {
    a.data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenvalues in ascending order with matching unit eigenvectors stored as
/// the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub residual_tol: f64,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }
}

/// Flips `v` so its largest-magnitude entry (first one on ties) is non-negative.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (k, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = k;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Sorts pairs ascending by value; equal values keep solver index order.
fn sorted_pairs(values: Vec<f64>, columns: Vec<Vec<f64>>, residual_tol: f64) -> Result<EigenPairs> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let values = order.iter().map(|&k| values[k]).collect();
    let columns: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| {
            let mut c = columns[k].clone();
            fix_sign(&mut c);
            c
        })
        .collect();
    Ok(EigenPairs { values, vectors: Matrix::from_columns(&columns)?, residual_tol })
}

/// Full eigendecomposition of a real symmetric matrix by cyclic Jacobi
/// rotations.
///
/// Iterates until the off-diagonal Frobenius mass drops below
/// `tol · ‖S‖_F`. Callers symmetrize accumulated matrices first; an input
/// whose asymmetry exceeds [`SYMMETRY_TOL`] is rejected.
pub fn sym_eig(s: &Matrix, tol: f64) -> Result<EigenPairs> {
    if !s.is_square() {
        return Err(Error::NotSquare { rows: s.rows, cols: s.cols });
    }
    let asymmetry = s.asymmetry();
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let n = s.rows;
    let mut a = s.symmetrized().data;
    let mut v = Matrix::identity(n).data;
    let threshold = tol * frobenius_norm(s);

    let off = |a: &[f64]| -> f64 {
        let mut sum = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                sum += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * sum).sqrt()
    };

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        if off(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Entries far below both diagonals would only rotate by an
                // angle lost to rounding; zero them once the sweep settles.
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = arp - sn * (arq + tau * arp);
                    let new_rq = arq + sn * (arp - tau * arq);
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp - sn * (vrq + tau * vrp);
                    v[r * n + q] = vrq + sn * (vrp - tau * vrq);
                }
            }
        }
    }
    if !converged && off(&a) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let columns: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| v[i * n + j]).collect()).collect();
    sorted_pairs(values, columns, tol)
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
///
/// A pivot that is not above `1e-14 · max diag` is reported as a failure,
/// so numerically singular inputs are caught along with exact ones.
pub fn cholesky(b: &Matrix) -> Result<Matrix> {
    if !b.is_square() {
        return Err(Error::NotSquare { rows: b.rows, cols: b.cols });
    }
    let n = b.rows;
    let scale = (0..n).fold(0.0f64, |m, i| m.max(b[(i, i)].abs()));
    let floor = 1e-14 * scale;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = b[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > floor) || d <= 0.0 {
            return Err(Error::FactorizationFailure { index: j, pivot: d });
        }
        let djj = d.sqrt();
        l.set(j, j, djj);
        for i in (j + 1)..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l.set(i, j, s / djj);
        }
    }
    Ok(l)
}

/// Solves `L X = M` for lower-triangular `L`.
fn forward_solve(l: &Matrix, m: &Matrix) -> Matrix {
    let n = l.rows;
    let mut x = m.clone();
    for c in 0..m.cols {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x.set(i, c, s / l[(i, i)]);
        }
    }
    x
}

/// Solves `Lᵀ x = y` for lower-triangular `L`.
fn back_solve_transposed(l: &Matrix, y: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut x = y.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `A w = λ (B + ridge·I) w` for symmetric `A` and positive
/// semidefinite `B`.
///
/// Returned vectors have unit Euclidean norm. They are orthogonal in the
/// `B + ridge·I` inner product, not in general in the Euclidean one.
pub fn gen_sym_eig(a: &Matrix, b: &Matrix, ridge: f64, tol: f64) -> Result<EigenPairs> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows, cols: a.cols });
    }
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch { expected: a.shape(), got: b.shape() });
    }
    let n = a.rows;
    let regularized = &b.symmetrized() + &Matrix::identity(n).scaled(ridge);
    let l = cholesky(&regularized)?;
    // C = L⁻¹ A L⁻ᵀ
    let y = forward_solve(&l, &a.symmetrized());
    let c = forward_solve(&l, &y.transpose()).symmetrized();
    let reduced = sym_eig(&c, tol)?;

    let columns: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut w = back_solve_transposed(&l, &reduced.vector(k));
            let norm = norm2(&w);
            w.iter_mut().for_each(|x| *x /= norm);
            w
        })
        .collect();
    sorted_pairs(reduced.values, columns, tol)
}
