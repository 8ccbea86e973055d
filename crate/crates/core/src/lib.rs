//! Two-dimensional Bhattacharyya-bound linear discriminant analysis
//! (2DBLDA) together with the 2DLDA, 2DPCA and vector L2BLDA baselines.
//!
//! 2DBLDA works directly on `d1 × d2` image matrices. It builds the
//! symmetric `d1 × d1` matrix
//!
//! ```text
//! S = −(1/N) Σ_{i<j} √(N_i N_j)(X̄_i − X̄_j)(X̄_i − X̄_j)ᵀ + Δ Σ_i Σ_s (X_is − X̄_i)(X_is − X̄_i)ᵀ
//! Δ = ¼ Σ_{i<j} √(P_i P_j) ‖X̄_i − X̄_j‖_F²
//! ```
//!
//! and projects with the eigenvectors of its smallest nonzero eigenvalues.
//! Minimizing `tr(WᵀSW)` minimizes an upper bound on the Bhattacharyya error
//! of the projected classes; [`bound`] evaluates both sides of that bound.
//!
//! ```
//! use blda_core::{fit_2dblda, project, LabeledMatrixDataset, Matrix};
//!
//! let m = |a: f64, d: f64| Matrix::from_rows(&[[a, 0.0], [0.0, d]]).unwrap();
//! let data = LabeledMatrixDataset::new(
//!     vec![m(1.0, 0.0), m(1.0, 2.0), m(-1.0, 0.0), m(-1.0, 2.0)],
//!     vec![1, 1, 2, 2],
//! )
//! .unwrap();
//! let p = fit_2dblda(&data, 1).unwrap();
//! assert_eq!(p.eigenvalues, vec![-2.0]);
//! assert_eq!(project(&p, &data.samples()[0]).unwrap().shape(), (1, 2));
//! ```

pub mod bound;
pub mod corruption;
pub mod error;
pub mod eval;
pub mod io;
pub mod linalg;
pub mod methods;
pub mod rng;
pub mod stats;

pub use bound::{bhattacharyya_error, bound_rhs, projected_model, verify_bound, BoundReport, ProjectedGaussianModel};
pub use corruption::{CorruptionKind, CorruptionSpec};
pub use error::{Error, Result};
pub use eval::{accuracy, average_reconstruction_error, metric_curve, nn_classify, CurveSpec, ExperimentReport, Metric};
pub use io::{load_dataset, save_dataset, split};
pub use linalg::{frobenius_norm, gen_sym_eig, sym_eig, EigenPairs, Matrix};
pub use methods::{fit, fit_2dblda, fit_2dlda, fit_2dpca, fit_l2blda, project, reconstruct, Method, Projector};
pub use stats::{build_scatters, compute_stats, delta, ClassStatistics, LabeledMatrixDataset, ScatterMatrices};
