//! Laboratory for the linear dynamics of convolution operators on spaces of
//! entire functions of (finitely or countably many) complex variables.
//!
//! Functions are stored as sparse truncated power series that depend on
//! finitely many variables. Convolution operators are stored as finite
//! derivative-symbol series `L = Σ c_β ∂^β`. On top of those the
//! [`dynamics`] module builds orbit traces and checkable certificates:
//! orbit confinement to a cylinder (non-cyclicity), confinement of the
//! orbit of a finite-dimensional subspace (non-n-supercyclicity), and
//! semi-irregular vectors with the Li–Yorke pairs they generate.
//!
//! The `parallel` feature (on by default) runs batch work on rayon; every
//! batch entry point also accepts [`Execution::Sequential`].

pub mod convolution;
pub mod cylinder;
pub mod dynamics;
mod error;
pub mod exec;
pub mod numeric;
pub mod series;
pub mod suite;

pub use num_complex::Complex64;

pub use crate::convolution::{
    associated_operator, find_dichotomy_points, iterate_apply, translate, ConvolutionSymbol, DichotomyPoints,
    DichotomySearch, TranslationVector,
};
pub use crate::cylinder::{coefficient_functional, embed, essential_dimension, restrict, CylinderIndex};
pub use crate::error::{Error, Result};
pub use crate::exec::Execution;
pub use crate::series::{
    exp_function, gap_series, linear_combine, multiply, MultiIndex, Radius, TailDescriptor, TruncatedEntireFunction,
};
