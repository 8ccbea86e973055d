//! Recognition and reconstruction measurements over a range of reduced
//! dimensions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::methods::{self, Method, Projector};
use crate::stats::LabeledMatrixDataset;

/// Label of the training sample nearest to `query` in Frobenius distance.
/// Ties go to the lowest training index.
pub fn nn_classify(train: &[Matrix], labels: &[usize], query: &Matrix) -> Result<usize> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if train.len() != labels.len() {
        return Err(Error::LengthMismatch { left: train.len(), right: labels.len() });
    }
    let mut best = (f64::INFINITY, 0usize);
    for (k, t) in train.iter().enumerate() {
        if t.shape() != query.shape() {
            return Err(Error::ShapeMismatch { expected: t.shape(), got: query.shape() });
        }
        let d: f64 = t
            .as_slice()
            .iter()
            .zip(query.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if d < best.0 {
            best = (d, k);
        }
    }
    Ok(labels[best.1])
}

pub fn accuracy(predictions: &[usize], truth: &[usize]) -> Result<f64> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch { left: predictions.len(), right: truth.len() });
    }
    if predictions.is_empty() {
        return Err(Error::Empty);
    }
    let hits = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// `(1/N) Σ ‖X_i − W WᵀX_i‖_F`.
pub fn average_reconstruction_error(samples: &[Matrix], p: &Projector) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut total = 0.0;
    for x in samples {
        let target = p.prepare(x)?;
        let back = methods::reconstruct(p, x)?;
        total += (&target - &back).frobenius_norm();
    }
    Ok(total / samples.len() as f64)
}

/// Projects every sample, then classifies every query by 1-NN.
pub fn classify_all(p: &Projector, train: &LabeledMatrixDataset, queries: &[Matrix]) -> Result<Vec<usize>> {
    let projected: Vec<Matrix> = train
        .samples()
        .iter()
        .map(|x| methods::project(p, x))
        .collect::<Result<_>>()?;
    queries
        .par_iter()
        .map(|q| nn_classify(&projected, train.labels(), &methods::project(p, q)?))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Accuracy,
    Are,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Are => "are",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "accuracy" => Ok(Metric::Accuracy),
            "are" => Ok(Metric::Are),
            _ => Err(format!("unknown metric `{s}` (expected accuracy or are)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub r: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub method: Method,
    pub metric: Metric,
    pub seed: u64,
    pub dataset: String,
    /// Strictly increasing in `r`.
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str = "method,r,metric,value,seed";

    /// Rows without the header line.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.method,
                row.r,
                self.metric.name(),
                row.value,
                self.seed
            ));
        }
        out
    }
}

/// Inputs for [`metric_curve`].
#[derive(Debug, Clone)]
pub struct CurveSpec<'a> {
    pub method: Method,
    pub r_list: &'a [usize],
    pub ridge: Option<f64>,
    pub metric: Metric,
    pub seed: u64,
    pub dataset: &'a str,
}

/// Fits once per `r` on `train`, then measures either 1-NN accuracy on
/// `eval` or the average reconstruction error of `eval`'s samples.
pub fn metric_curve(
    train: &LabeledMatrixDataset,
    eval: &LabeledMatrixDataset,
    spec: &CurveSpec<'_>,
) -> Result<ExperimentReport> {
    let mut r_list = spec.r_list.to_vec();
    r_list.sort_unstable();
    r_list.dedup();
    let max = if spec.method.is_vector() {
        train.shape().0 * train.shape().1
    } else {
        train.shape().0
    };
    if let Some(&r) = r_list.iter().find(|&&r| r == 0 || r > max) {
        return Err(Error::InvalidDimension { r, max });
    }
    let rows = r_list
        .par_iter()
        .map(|&r| {
            let p = methods::fit(spec.method, train, r, spec.ridge)?;
            let value = match spec.metric {
                Metric::Accuracy => accuracy(&classify_all(&p, train, eval.samples())?, eval.labels())?,
                Metric::Are => average_reconstruction_error(eval.samples(), &p)?,
            };
            Ok(ReportRow { r, value })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        method: spec.method,
        metric: spec.metric,
        seed: spec.seed,
        dataset: spec.dataset.to_string(),
        rows,
    })
}
