//! # infomat
//!
//! Conditional mutual information matrices for paired sequences.
//!
//! For two interacting sequences `(X^m, Y^m)` the information matrix is
//! the `m x m` grid of conditional MI terms
//! `I(X_i; Y_j | X^{i-1}, Y^{j-1})`. Its entries sum to the block mutual
//! information `I(X^m; Y^m)`, and fixed index regions of the matrix
//! recover directed information, transfer entropy, and instantaneous
//! information, which turns the classical conservation laws into
//! verifiable region-sum identities.
//!
//! ## Modules
//!
//! | Module | Provides |
//! |--------|----------|
//! | [`datasets`] | windowing, centering, SPD1/CSV persistence |
//! | [`gauss`] | sample covariance, log-determinants, Gaussian CMI |
//! | [`infomat`] | the matrix type and its three constructors |
//! | [`measures`] | region masks, DI/TE sums, identity verification |
//! | [`generators`] | AR processes, nonlinear shifts, the Ising channel |
//! | [`oracle`] | brute-force quantities from explicit small joints |
//! | [`render`] | deterministic PGM/SVG heatmaps |
//!
//! ## Quick start
//!
//! ```
//! use infomat::generators::{ar_joint_covariance, GaussianARModel};
//! use infomat::infomat::infomat_from_gaussian_model;
//! use infomat::measures::directed_information;
//!
//! // i.i.d. pairs with per-step correlation 0.9: a diagonal matrix
//! let model = GaussianARModel::iid_correlated(8, 0.9);
//! let mat = infomat_from_gaussian_model(&ar_joint_covariance(&model).unwrap()).unwrap();
//! let per_step = -0.5 * (1.0 - 0.81f64).ln();
//! assert!((mat.entry(3, 3) - per_step).abs() < 1e-9);
//! assert!((directed_information(&mat) - 8.0 * per_step).abs() < 1e-8);
//! ```
//!
//! The `examples/` directory walks through each capability end to end; the
//! `infomat` binary exposes the same flows as subcommands.

pub mod datasets;
pub mod error;
pub mod gauss;
pub mod generators;
pub mod infomat;
pub mod measures;
pub mod oracle;
pub mod render;

pub use crate::datasets::{center, window, Kind, SequencePair, WindowedDataset};
pub use crate::error::{Error, Result};
pub use crate::gauss::{gaussian_cmi, log_det_psd, sample_covariance, CovarianceEstimate, JointGaussianModel};
pub use crate::infomat::{
    estimate_gaussian, estimate_plugin_discrete, infomat_from_gaussian_model, InfoMat,
    InfoMatMeta, Provenance, Truncation,
};
pub use crate::measures::{
    delayed_di, directed_information, instantaneous, region_sum, te_sum, verify_identities,
    IdentityReport, RegionKind, RegionMask,
};
pub use crate::oracle::{pmf_cmi, pmf_entropy, pmf_infomat, pmf_total_mi};
