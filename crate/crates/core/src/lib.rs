//! Novikov-Shubin invariants and capacities, computed numerically.
//!
//! * [`capval`]: the extended value sets `[0,∞] ⨿ {∞⁺}` and `{0⁻} ∪ [0,∞]`.
//! * [`laurent`], [`symbol`]: Laurent matrices over `ℤⁿ`, their spectral
//!   density functions and exponents.
//! * [`walks`]: group models, growth, return probabilities and `c₀`.
//! * [`chaincx`]: Koszul complexes of `ℤⁿ` and the capacities `c_p(ℤⁿ)`.
//! * [`propcheck`]: numerical checks of the capacity calculus.

pub mod capval;
pub mod chaincx;
pub mod error;
pub mod fit;
pub mod laurent;
pub mod propcheck;
pub mod symbol;
pub mod walks;

pub use capval::{cap_add, cap_cmp, cap_sup, capacity_to_ns, ns_to_capacity, CapacityValue, NSValue};
pub use error::{Error, Result};
pub use laurent::{LaurentMatrix, LaurentPolynomial, OperatorSpec};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/values.md")]
    mod values {}
    #[doc = include_str!("../../../book/src/density.md")]
    mod density {}
    #[doc = include_str!("../../../book/src/koszul.md")]
    mod koszul {}
    #[doc = include_str!("../../../book/src/walks.md")]
    mod walks {}
    #[doc = include_str!("../../../book/src/checks.md")]
    mod checks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
