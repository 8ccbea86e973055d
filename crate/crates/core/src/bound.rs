//! Bhattacharyya error of a one-direction projection and its linear upper
//! bound, with a numeric check of every step of the bounding chain.
//!
//! For a unit direction `w` the projected samples `wᵀX` are `1 × d2` rows.
//! Classes are modeled as Gaussians sharing the scatter `Σ̃` of the projected
//! within-class deviations, which gives the closed form
//! `ε_B = Σ_{i<j} √(P_i P_j) exp(−z_ij)` with
//! `z_ij = ⅛ (m_i − m_j) Σ̃⁻¹ (m_i − m_j)ᵀ`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, sym_eig, Matrix, DEFAULT_EIG_TOL};
use crate::rng::{random_unit_vector, stream_rng};
use crate::stats::{compute_stats, delta, ClassStatistics, LabeledMatrixDataset};

/// Accepted deviation of `‖w‖₂` from one.
pub const UNIT_TOL: f64 = 1e-10;

/// `Σ̃` counts as singular when its smallest eigenvalue is at or below this
/// fraction of its trace.
pub const SINGULAR_REL: f64 = 1e-12;

/// Margin below which a trial counts as a violation.
pub const MARGIN_TOL: f64 = -1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedGaussianModel {
    /// `wᵀX̄_i`, one length-`d2` row per class.
    pub projected_means: Vec<Vec<f64>>,
    /// `Σ̃ = (D − X̄_I)(D − X̄_I)ᵀ`, `d2 × d2`.
    pub covariance: Matrix,
    pub priors: Vec<f64>,
    pub direction: Vec<f64>,
}

impl ProjectedGaussianModel {
    /// `‖Σ̃^{1/2}‖_F² = tr Σ̃`.
    pub fn spread(&self) -> f64 {
        self.covariance.trace()
    }
}

fn project_row(w: &[f64], x: &Matrix) -> Vec<f64> {
    (0..x.cols()).map(|j| (0..x.rows()).map(|i| w[i] * x[(i, j)]).sum()).collect()
}

pub fn projected_model(
    data: &LabeledMatrixDataset,
    stats: &ClassStatistics,
    w: &[f64],
) -> Result<ProjectedGaussianModel> {
    let (d1, d2) = data.shape();
    if w.len() != d1 {
        return Err(Error::ShapeMismatch { expected: (d1, 1), got: (w.len(), 1) });
    }
    let norm = linalg::norm2(w);
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitDirection { norm });
    }
    let projected_means = stats.class_means.iter().map(|m| project_row(w, m)).collect();
    let mut covariance = Matrix::zeros(d2, d2);
    for (sample, label) in data.iter() {
        let z = project_row(w, &(sample - &stats.class_means[label - 1]));
        covariance.add_outer(&Matrix::column_vector(&z)?, 1.0);
    }
    Ok(ProjectedGaussianModel {
        projected_means,
        covariance: covariance.symmetrized(),
        priors: stats.priors.clone(),
        direction: w.to_vec(),
    })
}

/// Exponent `z_ij` for one class pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairExponent {
    pub i: usize,
    pub j: usize,
    pub z: f64,
}

/// All `z_ij` for `i < j`, using the spectral inverse of `Σ̃`.
pub fn pair_exponents(model: &ProjectedGaussianModel) -> Result<Vec<PairExponent>> {
    let trace = model.covariance.trace();
    if !(trace > 0.0) {
        return Err(Error::SingularCovariance);
    }
    let eig = sym_eig(&model.covariance, DEFAULT_EIG_TOL)?;
    if eig.values[0] <= SINGULAR_REL * trace {
        return Err(Error::SingularCovariance);
    }
    let c = model.projected_means.len();
    let mut out = Vec::with_capacity(c * c.saturating_sub(1) / 2);
    for i in 0..c {
        for j in (i + 1)..c {
            let d: Vec<f64> = model.projected_means[i]
                .iter()
                .zip(&model.projected_means[j])
                .map(|(a, b)| a - b)
                .collect();
            let quad: f64 = (0..eig.len())
                .map(|k| {
                    let proj = linalg::dot(&eig.vector(k), &d);
                    proj * proj / eig.values[k]
                })
                .sum();
            out.push(PairExponent { i, j, z: quad / 8.0 });
        }
    }
    Ok(out)
}

/// `ε_B = Σ_{i<j} √(P_i P_j) exp(−z_ij)`.
pub fn bhattacharyya_error(model: &ProjectedGaussianModel) -> Result<f64> {
    Ok(pair_exponents(model)?
        .iter()
        .map(|p| (model.priors[p.i] * model.priors[p.j]).sqrt() * (-p.z).exp())
        .sum())
}

/// Slope `a = (1 − e^{−b}) / b` of the chord of `e^{−z}` over `[0, b]`;
/// `1` in the `b → 0` limit.
pub fn chord_slope(b_cap: f64) -> f64 {
    if b_cap <= 0.0 {
        1.0
    } else {
        -(-b_cap).exp_m1() / b_cap
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub epsilon_b: f64,
    pub rhs: f64,
    pub a_constant: f64,
    pub b_cap: f64,
    pub margin: f64,
}

fn prior_pair_sum(priors: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..priors.len() {
        for j in (i + 1)..priors.len() {
            s += (priors[i] * priors[j]).sqrt();
        }
    }
    s
}

/// Both sides of the bound for direction `w` and chord cap `b_cap`.
pub fn bound_rhs(
    data: &LabeledMatrixDataset,
    stats: &ClassStatistics,
    w: &[f64],
    b_cap: f64,
) -> Result<BoundReport> {
    let model = projected_model(data, stats, w)?;
    let epsilon_b = bhattacharyya_error(&model)?;
    Ok(report_for(stats, &model, epsilon_b, b_cap))
}

fn report_for(stats: &ClassStatistics, model: &ProjectedGaussianModel, epsilon_b: f64, b_cap: f64) -> BoundReport {
    let a = chord_slope(b_cap);
    let c = stats.classes();
    let mut between = 0.0;
    for i in 0..c {
        for j in (i + 1)..c {
            let gap: f64 = model.projected_means[i]
                .iter()
                .zip(&model.projected_means[j])
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            between += (stats.priors[i] * stats.priors[j]).sqrt() * gap;
        }
    }
    let within = model.spread();
    let rhs = -a / 8.0 * between + a / 8.0 * delta(stats) * within + prior_pair_sum(&stats.priors);
    BoundReport { epsilon_b, rhs, a_constant: a, b_cap, margin: rhs - epsilon_b }
}

/// Per-pair intermediate inequalities of the bounding chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    /// `‖wᵀ(X̄_i − X̄_j)‖₂ ≤ ‖X̄_i − X̄_j‖_F`
    pub norm_chain: bool,
    /// `‖wᵀ(X̄_i − X̄_j)‖₂² (1/t)(1 − 1/t) ≤ ¼‖X̄_i − X̄_j‖_F²`
    pub scaled_gap: bool,
    /// `−m/t ≤ −m + ¼‖X̄_i − X̄_j‖_F² t`
    pub linearized_gap: bool,
}

impl PairCheck {
    pub fn holds(&self) -> bool {
        self.norm_chain && self.scaled_gap && self.linearized_gap
    }
}

/// Evaluates the per-pair inequalities for one projected model, with
/// `t = tr Σ̃`.
pub fn pair_checks(stats: &ClassStatistics, model: &ProjectedGaussianModel) -> Vec<PairCheck> {
    const REL: f64 = 1e-12;
    let t = model.spread();
    let c = stats.classes();
    let mut out = Vec::new();
    for i in 0..c {
        for j in (i + 1)..c {
            let full = (&stats.class_means[i] - &stats.class_means[j]).frobenius_norm();
            let full_sq = full * full;
            let m: f64 = model.projected_means[i]
                .iter()
                .zip(&model.projected_means[j])
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            let norm_chain = m.sqrt() <= full * (1.0 + REL);
            let lhs19 = m * (1.0 / t) * (1.0 - 1.0 / t);
            let scaled_gap = lhs19 <= 0.25 * full_sq + REL * (lhs19.abs() + full_sq);
            let lhs20 = -m / t;
            let rhs20 = -m + 0.25 * full_sq * t;
            let linearized_gap = lhs20 <= rhs20 + REL * (lhs20.abs() + m + 0.25 * full_sq * t);
            out.push(PairCheck { i, j, norm_chain, scaled_gap, linearized_gap });
        }
    }
    out
}

/// One sampled direction.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub report: BoundReport,
    pub pairs: Vec<PairCheck>,
}

impl TrialRecord {
    pub fn success(&self) -> bool {
        self.report.margin >= MARGIN_TOL && self.pairs.iter().all(PairCheck::holds)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundVerification {
    pub trials: usize,
    /// Evaluated trials in trial order. Directions with a singular `Σ̃` are
    /// skipped and have no record.
    pub records: Vec<TrialRecord>,
}

impl BoundVerification {
    /// Fraction of evaluated trials that satisfy the bound and every pair
    /// inequality; `1.0` when nothing was drawn.
    pub fn success_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 1.0;
        }
        let ok = self.records.iter().filter(|r| r.success()).count();
        ok as f64 / self.records.len() as f64
    }
}

/// Evaluates a single direction with `b_cap` set to the largest pair
/// exponent.
pub fn evaluate_direction(
    data: &LabeledMatrixDataset,
    stats: &ClassStatistics,
    w: &[f64],
) -> Result<(BoundReport, Vec<PairCheck>)> {
    let model = projected_model(data, stats, w)?;
    let exponents = pair_exponents(&model)?;
    let b_cap = exponents.iter().fold(0.0f64, |m, p| m.max(p.z));
    let epsilon_b = exponents
        .iter()
        .map(|p| (model.priors[p.i] * model.priors[p.j]).sqrt() * (-p.z).exp())
        .sum();
    let report = report_for(stats, &model, epsilon_b, b_cap);
    Ok((report, pair_checks(stats, &model)))
}

/// Draws `trials` seeded unit directions (stream `k` for trial `k`) and
/// checks the bound on each.
pub fn verify_bound(data: &LabeledMatrixDataset, trials: usize, seed: u64) -> Result<BoundVerification> {
    let stats = compute_stats(data)?;
    let (d1, _) = data.shape();
    let outcomes: Vec<Result<Option<TrialRecord>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial as u64);
            let w = random_unit_vector(&mut rng, d1);
            match evaluate_direction(data, &stats, &w) {
                Ok((report, pairs)) => Ok(Some(TrialRecord { trial, report, pairs })),
                Err(Error::SingularCovariance) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut records = Vec::new();
    for outcome in outcomes {
        if let Some(r) = outcome? {
            records.push(r);
        }
    }
    if trials > 0 && records.is_empty() {
        return Err(Error::DegenerateDataset);
    }
    Ok(BoundVerification { trials, records })
}
