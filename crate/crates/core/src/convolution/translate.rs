use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symbol::{fmt_complex, ClosedForm, ConvolutionSymbol};
use crate::numeric::binomial;
use crate::series::json::complex_pairs;
use crate::series::{exp_function, MultiIndex, TruncatedEntireFunction};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Shift vector `ξ`; coordinates past the end are 0.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TranslationVector(#[serde(with = "complex_pairs")] pub Vec<Complex64>);

impl TranslationVector {
    pub fn new(xi: Vec<Complex64>) -> Self {
        Self(xi)
    }

    pub fn from_real(xi: &[f64]) -> Self {
        Self(xi.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn coord(&self, var: usize) -> Complex64 {
        self.0.get(var - 1).copied().unwrap_or(ZERO)
    }

    /// `π_n(ξ)`.
    pub fn projected(&self, n: usize) -> Self {
        Self(self.0.iter().take(n).copied().collect())
    }
}

/// `(τ_ξ f)(z) = f(z − ξ)` by binomial expansion of each monomial:
/// `(z_j − ξ_j)^e = Σ_g C(e, g) (−ξ_j)^{e−g} z_j^g`. Variables with
/// `ξ_j = 0` pass through untouched.
pub fn translate(f: &TruncatedEntireFunction, xi: &TranslationVector) -> TruncatedEntireFunction {
    let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    for (alpha, &a) in f.iter() {
        // per variable: list of (exponent kept, factor)
        let choices: Vec<(usize, Vec<(u32, Complex64)>)> = alpha
            .entries()
            .iter()
            .map(|&(v, e)| {
                let shift = -xi.coord(v);
                if shift == ZERO {
                    return (v, vec![(e, Complex64::new(1.0, 0.0))]);
                }
                let mut pow = Complex64::new(1.0, 0.0);
                let mut opts = Vec::with_capacity(e as usize + 1);
                for g in (0..=e).rev() {
                    opts.push((g, pow * binomial(e, g)));
                    pow *= shift;
                }
                (v, opts)
            })
            .collect();
        let mut pick = vec![0usize; choices.len()];
        loop {
            let mut coeff = a;
            let mut exps = Vec::with_capacity(choices.len());
            for (slot, (v, opts)) in choices.iter().enumerate() {
                let (g, factor) = opts[pick[slot]];
                if factor != Complex64::new(1.0, 0.0) {
                    coeff *= factor;
                }
                exps.push((*v, g));
            }
            let gamma = MultiIndex::new(exps).expect("variables are >= 1");
            *acc.entry(gamma).or_insert(ZERO) += coeff;

            // odometer over the choice lists
            let mut slot = 0;
            while slot < pick.len() {
                pick[slot] += 1;
                if pick[slot] < choices[slot].1.len() {
                    break;
                }
                pick[slot] = 0;
                slot += 1;
            }
            if slot == pick.len() {
                break;
            }
        }
    }
    TruncatedEntireFunction::from_map(acc, f.truncation_degree())
}

/// Finite symbol of `τ_ξ`: `Σ_{|β| <= cutoff} (−ξ)^β/β! ∂^β`, exact on
/// polynomials of degree at most `cutoff`.
pub fn translation_symbol(xi: &TranslationVector, cutoff: u32) -> ConvolutionSymbol {
    let neg: Vec<Complex64> = xi.0.iter().map(|x| -x).collect();
    let coeffs = exp_function(&neg, cutoff);
    let label = format!(
        "translation({})",
        xi.0.iter().map(|&x| fmt_complex(x)).collect::<Vec<_>>().join(",")
    );
    ConvolutionSymbol::new(coeffs.iter().map(|(k, v)| (k.clone(), *v)), label).with_closed_form(Some(
        ClosedForm::Translation {
            xi: xi.0.clone(),
            cutoff,
        },
    ))
}

/// `τ_ξ f` through the derivative expansion (Taylor's formula) instead of
/// binomial shifting.
pub fn translate_via_symbol(f: &TruncatedEntireFunction, xi: &TranslationVector) -> TruncatedEntireFunction {
    translation_symbol(xi, f.degree()).apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::CylinderIndex;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn mono(p: &[(usize, u32)], a: f64) -> TruncatedEntireFunction {
        TruncatedEntireFunction::monomial(MultiIndex::new(p.iter().copied()).unwrap(), c(a))
    }

    fn k(a: f64) -> TruncatedEntireFunction {
        TruncatedEntireFunction::constant(c(a))
    }

    #[test]
    fn square_shift() {
        let out = translate(&mono(&[(1, 2)], 1.0), &TranslationVector::from_real(&[1.0]));
        let expect = &(&mono(&[(1, 2)], 1.0) + &mono(&[(1, 1)], -2.0)) + &k(1.0);
        assert!(out.same_terms(&expect));
    }

    #[test]
    fn product_shift() {
        let out = translate(
            &mono(&[(1, 1), (2, 1)], 1.0),
            &TranslationVector::from_real(&[1.0, 1.0]),
        );
        let expect = &(&(&mono(&[(1, 1), (2, 1)], 1.0) - &mono(&[(1, 1)], 1.0)) - &mono(&[(2, 1)], 1.0)) + &k(1.0);
        assert!(out.same_terms(&expect));
    }

    #[test]
    fn shift_outside_cylinder_is_identity() {
        let f = &(&mono(&[(1, 3), (2, 1)], 2.5) + &mono(&[(2, 2)], -1.0)) + &k(0.5);
        let xi = TranslationVector::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(translate(&f, &xi), f);
        assert_eq!(translate_via_symbol(&f, &xi), f);
    }

    #[test]
    fn both_paths_agree() {
        let f = &(&mono(&[(1, 3), (2, 1)], 2.5) + &mono(&[(2, 2)], -1.0)) + &mono(&[(3, 2)], 0.75);
        let xi = TranslationVector::new(vec![Complex64::new(0.5, -0.25), c(2.0), Complex64::new(0.0, 1.0)]);
        let a = translate(&f, &xi);
        let b = translate_via_symbol(&f, &xi);
        let keys: std::collections::BTreeSet<_> = a.terms().keys().chain(b.terms().keys()).collect();
        for key in keys {
            assert!((a.coefficient(key) - b.coefficient(key)).norm() < 1e-12);
        }
    }

    #[test]
    fn translation_symbol_projection() {
        let xi = TranslationVector::from_real(&[0.5, -2.0, 3.0]);
        let full = translation_symbol(&xi, 5);
        let one = full.associated_operator(CylinderIndex::new(1).unwrap());
        assert_eq!(one, translation_symbol(&xi.projected(1), 5));
    }

    #[test]
    fn translation_symbol_value() {
        let sym = translation_symbol(&TranslationVector::from_real(&[1.0]), 60);
        let v = sym.symbol_value_bounded(&[c(1.0)]);
        let exact = (-1.0f64).exp();
        assert!((v.value.re - exact).abs() <= v.tail_bound.unwrap() + 1e-15);
        assert!((v.value.re - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!((v.closed_form_value.unwrap().re - exact).abs() < 1e-16);
    }
}
