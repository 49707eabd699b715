//! Convolution operators in derivative-symbol form `L = Σ_β c_β ∂^β`.

mod eigen;
mod symbol;
mod translate;

pub use eigen::{
    eigen_residual, find_dichotomy_points, DichotomyPoints, DichotomySearch, EigenResidual, RaySummary, SearchLog,
};
pub use symbol::{associated_operator, iterate_apply, ClosedForm, ConvolutionSymbol, SymbolValue};
pub use translate::{translate, translate_via_symbol, translation_symbol, TranslationVector};
