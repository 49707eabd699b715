//! Cylinder calculus: the subspaces of functions depending only on the
//! first `n` variables, the embedding `f_n ↦ f_n∘π_n` and the restriction
//! `f ↦ f∘J_n`.
//!
//! One data model serves every `H(C^n)` and `H(C^N)`, so embedding is the
//! identity on coefficient tables and only records the asserted cylinder.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{MultiIndex, TruncatedEntireFunction};

/// Number of retained variables, `n >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct CylinderIndex(usize);

impl CylinderIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("cylinder index must be at least 1".into()));
        }
        Ok(Self(n))
    }

    /// Smallest cylinder containing `f` (at least 1).
    pub fn of(f: &TruncatedEntireFunction) -> Self {
        Self(f.essential_dimension().max(1))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for CylinderIndex {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<CylinderIndex> for usize {
    fn from(n: CylinderIndex) -> usize {
        n.0
    }
}

/// A function together with the cylinder it was asserted to live in.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedded {
    pub cylinder: CylinderIndex,
    pub function: TruncatedEntireFunction,
}

impl Embedded {
    pub fn into_function(self) -> TruncatedEntireFunction {
        self.function
    }

    /// Re-embeds into a larger cylinder.
    pub fn widen(self, m: CylinderIndex) -> Result<Embedded> {
        embed(&self.function, m)
    }
}

/// Least `n` with `f` in the `n`-th cylinder; 0 for constants.
pub fn essential_dimension(f: &TruncatedEntireFunction) -> usize {
    f.essential_dimension()
}

/// `π_n^*`: regards `f` (which must only involve `z_1..z_n`) as a function
/// on the full space.
pub fn embed(f: &TruncatedEntireFunction, n: CylinderIndex) -> Result<Embedded> {
    let essential = f.essential_dimension();
    if essential > n.get() {
        return Err(Error::DimensionTooSmall {
            essential,
            cylinder: n.get(),
        });
    }
    Ok(Embedded {
        cylinder: n,
        function: f.clone(),
    })
}

/// `J_n^*`: substitutes `z_{n+1} = z_{n+2} = … = 0`.
pub fn restrict(f: &TruncatedEntireFunction, n: CylinderIndex) -> TruncatedEntireFunction {
    let terms = f
        .iter()
        .filter(|(k, _)| k.within(n.get()))
        .map(|(k, v)| (k.clone(), *v))
        .collect();
    TruncatedEntireFunction::from_map(terms, f.truncation_degree()).with_tail(f.tail().cloned())
}

/// The coefficient `a_α` of `z^α` in `f`, a continuous linear functional.
pub fn coefficient_functional(f: &TruncatedEntireFunction, index: &MultiIndex) -> Complex64 {
    f.coefficient(index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn mono(p: &[(usize, u32)], a: f64) -> TruncatedEntireFunction {
        TruncatedEntireFunction::monomial(MultiIndex::new(p.iter().copied()).unwrap(), c(a))
    }

    fn n(k: usize) -> CylinderIndex {
        CylinderIndex::new(k).unwrap()
    }

    #[test]
    fn essential_dimension_examples() {
        assert_eq!(essential_dimension(&(&mono(&[(3, 2)], 1.0) + &mono(&[(1, 1)], 1.0))), 3);
        assert_eq!(essential_dimension(&TruncatedEntireFunction::constant(c(5.0))), 0);
        let g = crate::series::gap_series(&[1, 2, 4], 2).unwrap();
        assert_eq!(essential_dimension(&g), 2);
    }

    #[test]
    fn embed_examples() {
        let f = &mono(&[(1, 1)], 1.0) + &mono(&[(2, 1)], 1.0);
        assert_eq!(embed(&f, n(2)).unwrap().function, f);
        let e = embed(&mono(&[(1, 1)], 1.0), n(5)).unwrap();
        assert_eq!(e.cylinder.get(), 5);
        assert!(matches!(
            embed(&mono(&[(3, 1)], 1.0), n(2)),
            Err(Error::DimensionTooSmall {
                essential: 3,
                cylinder: 2
            })
        ));
        assert!(CylinderIndex::new(0).is_err());
    }

    #[test]
    fn restrict_examples() {
        let f = &mono(&[(1, 1)], 1.0) + &mono(&[(3, 1)], 1.0);
        assert!(restrict(&f, n(2)).same_terms(&mono(&[(1, 1)], 1.0)));
        assert_eq!(restrict(&f, n(3)), f);
        let g = &mono(&[(1, 1), (3, 1)], 1.0) + &TruncatedEntireFunction::constant(c(7.0));
        assert!(restrict(&g, n(1)).same_terms(&TruncatedEntireFunction::constant(c(7.0))));
    }

    #[test]
    fn functional_examples() {
        let f = &mono(&[(2, 1)], 1.0) + &mono(&[(1, 2)], 3.0);
        assert_eq!(coefficient_functional(&f, &MultiIndex::unit(2)), c(1.0));
        assert_eq!(coefficient_functional(&f, &MultiIndex::unit(3)), c(0.0));
        let g = mono(&[(1, 2), (2, 1)], 5.0);
        assert_eq!(coefficient_functional(&g, &MultiIndex::from_dense(&[2, 1])), c(5.0));
    }

    #[test]
    fn inclusion_chain() {
        let f = &mono(&[(1, 2)], 1.0) + &mono(&[(2, 1)], -2.0);
        let via = embed(&f, n(2)).unwrap().widen(n(4)).unwrap();
        assert_eq!(via, embed(&f, n(4)).unwrap());
        assert_eq!(restrict(&via.function, n(2)), f);
    }
}
