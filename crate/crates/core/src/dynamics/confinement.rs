use serde::{Deserialize, Serialize};

use crate::convolution::ConvolutionSymbol;
use crate::series::{multiply, TruncatedEntireFunction};

/// A linear operator on truncated series, possibly not translation
/// invariant.
pub trait LinearOperator: Sync {
    fn label(&self) -> String;

    fn apply(&self, f: &TruncatedEntireFunction) -> TruncatedEntireFunction;

    /// The derivative symbol, when the operator is a convolution operator in
    /// symbol form.
    fn as_symbol(&self) -> Option<&ConvolutionSymbol> {
        None
    }
}

impl LinearOperator for ConvolutionSymbol {
    fn label(&self) -> String {
        ConvolutionSymbol::label(self).to_string()
    }

    fn apply(&self, f: &TruncatedEntireFunction) -> TruncatedEntireFunction {
        ConvolutionSymbol::apply(self, f)
    }

    fn as_symbol(&self) -> Option<&ConvolutionSymbol> {
        Some(self)
    }
}

/// `f ↦ z_{d+1} · f` with `d` the essential dimension of `f`. Linear on each
/// cylinder but not translation invariant: every application reaches a
/// new variable.
#[derive(Clone, Copy, Debug, Default)]
pub struct VariableRaising;

impl LinearOperator for VariableRaising {
    fn label(&self) -> String {
        "variable-raising".into()
    }

    fn apply(&self, f: &TruncatedEntireFunction) -> TruncatedEntireFunction {
        let next = TruncatedEntireFunction::variable(f.essential_dimension() + 1);
        multiply(&next, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConfinementBound {
    /// Convolution case: one cylinder holds every iterate, whatever the horizon.
    Uniform { n: usize },
    /// Generic case: a cylinder holding the iterates up to the checked horizon.
    Horizon { n: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfinementCertificate {
    pub operator: String,
    pub horizon: usize,
    /// Essential dimension of `T^k f`, `k = 0..=horizon`.
    pub dims: Vec<usize>,
    /// `N(k)`: largest essential dimension among the first `k + 1` iterates.
    pub running_max: Vec<usize>,
    pub bound: ConfinementBound,
    /// Every iterate lies in the cylinder named by `bound`.
    pub confined: bool,
}

/// For symbol operators the cylinder is `n = essential_dimension(f)`,
/// independent of the horizon, and every iterate is checked against it.
/// For other operators only the finite-horizon statement is available:
/// `N(K)` is the largest dimension seen.
pub fn confinement_certificate(
    op: &dyn LinearOperator,
    f: &TruncatedEntireFunction,
    horizon: usize,
) -> ConfinementCertificate {
    let mut dims = Vec::with_capacity(horizon + 1);
    let mut g = f.clone();
    dims.push(g.essential_dimension());
    for _ in 0..horizon {
        g = op.apply(&g);
        dims.push(g.essential_dimension());
    }
    let running_max: Vec<usize> = dims
        .iter()
        .scan(0usize, |m, &d| {
            *m = (*m).max(d);
            Some(*m)
        })
        .collect();
    let bound = if op.as_symbol().is_some() {
        ConfinementBound::Uniform {
            n: f.essential_dimension(),
        }
    } else {
        ConfinementBound::Horizon {
            n: *running_max.last().unwrap(),
        }
    };
    let n = match bound {
        ConfinementBound::Uniform { n } | ConfinementBound::Horizon { n } => n,
    };
    ConfinementCertificate {
        operator: op.label(),
        horizon,
        confined: dims.iter().all(|&d| d <= n),
        dims,
        running_max,
        bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::MultiIndex;
    use num_complex::Complex64;

    #[test]
    fn symbol_operator_is_confined() {
        let l = ConvolutionSymbol::derivative(1).plus(&ConvolutionSymbol::derivative(2));
        let f = TruncatedEntireFunction::monomial(MultiIndex::new([(1, 1), (2, 1)]).unwrap(), Complex64::new(1.0, 0.0));
        let cert = confinement_certificate(&l, &f, 10);
        assert_eq!(cert.bound, ConfinementBound::Uniform { n: 2 });
        assert!(cert.confined);
        assert!(cert.running_max.iter().all(|&n| n == 2));
    }

    #[test]
    fn variable_raising_escapes() {
        let cert = confinement_certificate(&VariableRaising, &TruncatedEntireFunction::variable(1), 3);
        assert_eq!(cert.dims, vec![1, 2, 3, 4]);
        assert_eq!(cert.running_max, vec![1, 2, 3, 4]);
        assert_eq!(cert.bound, ConfinementBound::Horizon { n: 4 });
    }

    #[test]
    fn trivial_operator_keeps_dimension() {
        let f = TruncatedEntireFunction::variable(3);
        let cert = confinement_certificate(&ConvolutionSymbol::scalar(Complex64::new(-2.0, 1.0)), &f, 7);
        assert_eq!(cert.bound, ConfinementBound::Uniform { n: 3 });
        assert!(cert.confined);
    }
}
