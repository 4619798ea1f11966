//! Asymptotic profiles `(V, U)` and the correction pair `(v_hat, u_hat)`.
//!
//! Equal end states use the explicit Gaussian diffusion wave of the
//! linearised Darcy equation; unequal end states use the self-similar
//! solution of the nonlinear Darcy equation, tabulated by shooting.

mod constant;
mod correction;
mod reference;
pub mod similarity;

pub use constant::{mu_const, select_delta0, DiffusionWave, WaveQuantity};
pub use correction::{CorrectionDerivs, CorrectionFunction, Mollifier};
pub use reference::{FieldDerivs, Profile, ReferenceSample, ReferenceSolution};
pub use similarity::{
    shift_select, similarity_solve, Diffusivity, GaussianBoundFit, SimilarityOptions, SimilarityProfile,
    SimilarityQuantity,
};
