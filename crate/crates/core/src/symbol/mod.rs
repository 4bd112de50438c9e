//! Torus symbols of Laurent matrices: dimension, spectral density and
//! Novikov-Shubin exponents.

mod density;
mod exponent;
mod quadrature;
mod restriction;

pub use density::{
    default_grid, geometric_grid, hermitian_density, singular_values_at, spectral_density,
    symbol_eval, vn_dimension, SpectralDensitySamples, GAP_REFINE_ABOVE,
};
pub use exponent::{
    capacity_of_cokernel, cokernel_capacity_from_samples, ns_exponent, ns_exponent_fit,
    ExponentConfig, ExponentFit, WindowSlope, DIM_TOLERANCE,
};
pub use quadrature::{Quadrature, KERNEL_REL_TOL};
pub use restriction::finite_index_restriction;
