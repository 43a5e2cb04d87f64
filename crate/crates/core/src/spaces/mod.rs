//! Concrete reproducing kernel Hilbert spaces.

pub mod paley_wiener;
pub mod sobolev;
pub mod tensor;

pub use paley_wiener::{pw_feature, pw_kernel, sinc_identity_check, PwFeatureMap, PwSpec, SincIdentityReport};
pub use sobolev::{
    indefinite_transform, sobolev_feature, sobolev_kernel, IndefiniteIntegral, SobolevFeatureMap, SobolevSpace,
    SobolevSpec,
};
pub use tensor::{tensor_feature, tensor_kernel, KernelFn, ProductMap};
