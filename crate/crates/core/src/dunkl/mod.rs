//! Dunkl analysis for the sign-flip groups `Z_2^d`.

pub mod kernel;
pub mod operator;
pub mod transform;

pub use kernel::{dunkl_kernel_product, dunkl_kernel_rank1, DunklKernel};
pub use operator::{dunkl_laplacian, dunkl_operator_apply, partial_derivative};
pub use transform::{
    dunkl_inverse_transform, dunkl_transform, dunkl_translate, DunklTransform, SpectralGrid, Transformed,
};
