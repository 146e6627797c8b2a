//! Quantitative (controlled) operator K-theory over finite coarse spaces.
//!
//! The crate models propagation-filtered matrix algebras over finite metric
//! spaces, almost projections and almost unitaries with their spectral
//! rounding, sampled homotopy certificates, and the explicit finite-propagation
//! projections attached to Rips complexes.
//!
//! Module map:
//!
//! * [`coarse_space`]: finite metric spaces, Rips complexes, groups and actions.
//! * [`filtered_matrix`]: block matrices with exact propagation, norms and
//!   Hermitian eigendecomposition.
//! * [`quant_k`]: quasi-projections, quasi-unitaries, `kappa0`, class
//!   representatives and control pairs.
//! * [`homotopy`]: homotopy certificates, the rotation homotopy, projection
//!   connection search and persistence profiles.
//! * [`assembly`]: the Rips-complex projections and the QI/QS probes.
//! * [`io`]: the JSON file formats.

pub mod assembly;
pub mod coarse_space;
pub mod filtered_matrix;
pub mod homotopy;
pub mod io;
pub mod quant_k;
pub mod rational;

pub use nalgebra::Complex;

/// Complex double.
pub type C64 = Complex<f64>;

/// Dense complex matrix used for all numerical work.
pub type CMat = nalgebra::DMatrix<C64>;

pub use rational::Rat;
