//! Gaussian tensors, their injective norm, and the translation to a
//! multi-species spherical spin glass.

mod gaussian;
mod injective;
mod translate;

pub use gaussian::{GaussianTensor, GTEN_MAGIC, TENSOR_BUDGET};
pub use injective::{
    alternating_maximization, injective_norm_estimate, AlsRun, InjectiveEstimate, InjectiveOptions,
};
pub use translate::{asymptote, correspondence_check, translate_to_model, CorrespondenceReport};
