//! Numerical tools for degree-two members of the Selberg class: functional
//! equation data, Hardy's `Z` function and its zeros, the oscillatory
//! integrals behind the mean-value estimates, and twisted exponential sums.

pub mod afe;
pub mod arith;
pub mod coefficients;
pub mod definition;
pub mod error;
pub mod exp_sums;
pub mod gamma_delta;
pub mod hardy;
pub mod lfunction;
pub mod oscillatory;
pub mod quadrature;
pub mod selberg;
pub mod special;

pub use definition::Definition;
pub use error::{Error, Result};
pub use lfunction::LFunction;
pub use selberg::{compute_invariants, GammaFactor, GammaFactorSpec, PolarPart, SelbergInvariants};
