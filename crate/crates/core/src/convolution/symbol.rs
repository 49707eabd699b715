use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cylinder::CylinderIndex;
use crate::error::Result;
use crate::numeric::{exp_tail, falling_factorial};
use crate::series::json::{complex_pairs, terms_from_json, terms_to_json, TermJson};
use crate::series::{MultiIndex, TruncatedEntireFunction};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Infinite symbol that a finite [`ConvolutionSymbol`] truncates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClosedForm {
    /// `τ_ξ = Σ_β (-ξ)^β/β! ∂^β`, kept up to total order `cutoff`.
    Translation {
        #[serde(with = "complex_pairs")]
        xi: Vec<Complex64>,
        cutoff: u32,
    },
}

/// Finite derivative series `L = Σ_β c_β ∂^β` with a free-form label.
///
/// No stored coefficient is exactly zero. Equality compares coefficients
/// only; labels and closed forms are descriptive.
#[derive(Clone, Debug)]
pub struct ConvolutionSymbol {
    coefficients: BTreeMap<MultiIndex, Complex64>,
    label: String,
    closed_form: Option<ClosedForm>,
}

impl PartialEq for ConvolutionSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.coefficients == other.coefficients
    }
}

/// Value of `φ(λ) = Σ c_β λ^β`, with a bound on `|φ_∞(λ) − φ(λ)|` when the
/// symbol truncates a known closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolValue {
    pub value: Complex64,
    pub tail_bound: Option<f64>,
    pub closed_form_value: Option<Complex64>,
}

impl ConvolutionSymbol {
    pub fn new(coefficients: impl IntoIterator<Item = (MultiIndex, Complex64)>, label: impl Into<String>) -> Self {
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (k, v) in coefficients {
            *map.entry(k).or_insert(ZERO) += v;
        }
        map.retain(|_, v| *v != ZERO);
        Self {
            coefficients: map,
            label: label.into(),
            closed_form: None,
        }
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    /// `c·Id`.
    pub fn scalar(c: Complex64) -> Self {
        Self::new([(MultiIndex::zero(), c)], format!("{}*id", fmt_complex(c)))
    }

    /// `∂/∂z_var`.
    pub fn derivative(var: usize) -> Self {
        Self::new([(MultiIndex::unit(var), Complex64::new(1.0, 0.0))], format!("d{var}"))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn with_closed_form(mut self, form: Option<ClosedForm>) -> Self {
        self.closed_form = form;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    pub fn coefficients(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.coefficients
    }

    pub fn coefficient(&self, index: &MultiIndex) -> Complex64 {
        self.coefficients.get(index).copied().unwrap_or(ZERO)
    }

    /// Largest total order of a derivative in the support.
    pub fn order(&self) -> u32 {
        self.coefficients.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Largest variable index in the support.
    pub fn variable_span(&self) -> usize {
        self.coefficients
            .keys()
            .map(MultiIndex::max_variable)
            .max()
            .unwrap_or(0)
    }

    /// Scalar multiple of the identity (including the zero operator). An
    /// exact support test: any stored non-constant coefficient, however
    /// small, makes the operator nontrivial.
    pub fn is_trivial(&self) -> bool {
        self.coefficients.keys().all(MultiIndex::is_zero)
    }

    /// Sum of two symbols; closed forms are dropped.
    pub fn plus(&self, other: &Self) -> Self {
        let terms = self
            .coefficients
            .iter()
            .chain(&other.coefficients)
            .map(|(k, v)| (k.clone(), *v));
        Self::new(terms, format!("{}+{}", self.label, other.label))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let terms = self.coefficients.iter().map(|(k, v)| (k.clone(), v * c));
        Self::new(terms, format!("{}*({})", fmt_complex(c), self.label))
    }

    /// `Lf = Σ_β c_β ∂^β f`, exact on the stored polynomial. A term `a_α z^α`
    /// receives contributions only from `β <= α`, with the falling-factorial
    /// weight `Π_j α_j!/(α_j-β_j)!` accumulated multiplicatively.
    pub fn apply(&self, f: &TruncatedEntireFunction) -> TruncatedEntireFunction {
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (alpha, &a) in f.iter() {
            for (beta, &c) in &self.coefficients {
                let Some(gamma) = alpha.checked_sub(beta) else {
                    continue;
                };
                let weight: f64 = beta
                    .entries()
                    .iter()
                    .map(|&(v, b)| falling_factorial(alpha.exponent(v), b))
                    .product();
                *acc.entry(gamma).or_insert(ZERO) += c * a * weight;
            }
        }
        TruncatedEntireFunction::from_map(acc, f.truncation_degree())
    }

    /// `L^k f`.
    pub fn iterate_apply(&self, f: &TruncatedEntireFunction, k: usize) -> TruncatedEntireFunction {
        let mut g = f.clone();
        for _ in 0..k {
            g = self.apply(&g);
        }
        g
    }

    /// `[f, Lf, …, L^horizon f]`.
    pub fn orbit(&self, f: &TruncatedEntireFunction, horizon: usize) -> Vec<TruncatedEntireFunction> {
        let mut out = Vec::with_capacity(horizon + 1);
        out.push(f.clone());
        for k in 0..horizon {
            let next = self.apply(&out[k]);
            out.push(next);
        }
        out
    }

    /// Symbol of `L_n = J_n^*∘L∘π_n^*`: the coefficients supported on the
    /// first `n` variables.
    pub fn associated_operator(&self, n: CylinderIndex) -> Self {
        let n = n.get();
        let terms = self
            .coefficients
            .iter()
            .filter(|(k, _)| k.within(n))
            .map(|(k, v)| (k.clone(), *v));
        let closed = self.closed_form.as_ref().map(|form| match form {
            ClosedForm::Translation { xi, cutoff } => ClosedForm::Translation {
                xi: xi.iter().take(n).copied().collect(),
                cutoff: *cutoff,
            },
        });
        Self::new(terms, format!("({})_{n}", self.label)).with_closed_form(closed)
    }

    /// `φ(λ) = Σ_β c_β λ^β`, the eigenvalue of `L` on `e_λ`. Coordinates past
    /// the end of `lambda` are 0.
    pub fn symbol_value(&self, lambda: &[Complex64]) -> Complex64 {
        let as_series = TruncatedEntireFunction::from_map(self.coefficients.clone(), 0);
        as_series.evaluate(lambda)
    }

    /// [`Self::symbol_value`] together with the truncation error against the
    /// closed form, when one is known.
    pub fn symbol_value_bounded(&self, lambda: &[Complex64]) -> SymbolValue {
        let value = self.symbol_value(lambda);
        match &self.closed_form {
            None => SymbolValue {
                value,
                tail_bound: None,
                closed_form_value: None,
            },
            Some(ClosedForm::Translation { xi, cutoff }) => {
                let dot: Complex64 = xi.iter().zip(lambda).map(|(x, l)| x * l).sum();
                let s: f64 = xi
                    .iter()
                    .zip(lambda)
                    .map(|(x, l)| x.norm() * l.norm())
                    .fold(0.0, |a, b| a + b);
                SymbolValue {
                    value,
                    tail_bound: Some(exp_tail(s, *cutoff)),
                    closed_form_value: Some((-dot).exp()),
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("symbol serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Free-function form of [`ConvolutionSymbol::associated_operator`].
pub fn associated_operator(l: &ConvolutionSymbol, n: CylinderIndex) -> ConvolutionSymbol {
    l.associated_operator(n)
}

/// Free-function form of [`ConvolutionSymbol::iterate_apply`].
pub fn iterate_apply(l: &ConvolutionSymbol, f: &TruncatedEntireFunction, k: usize) -> TruncatedEntireFunction {
    l.iterate_apply(f, k)
}

pub(crate) fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

impl fmt::Display for ConvolutionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ", self.label)?;
        if self.coefficients.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, v)) in self.coefficients.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let op = if k.is_zero() {
                "id".to_string()
            } else {
                k.entries()
                    .iter()
                    .map(|&(v, e)| if e == 1 { format!("d{v}") } else { format!("d{v}^{e}") })
                    .collect::<Vec<_>>()
                    .join("*")
            };
            write!(f, "({})*{op}", fmt_complex(*v))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    label: String,
    symbol: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    closed_form: Option<ClosedForm>,
}

impl Serialize for ConvolutionSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolJson {
            label: self.label.clone(),
            symbol: terms_to_json(&self.coefficients),
            closed_form: self.closed_form.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConvolutionSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SymbolJson::deserialize(deserializer)?;
        let terms = terms_from_json(&raw.symbol).map_err(serde::de::Error::custom)?;
        Ok(ConvolutionSymbol::new(terms, raw.label).with_closed_form(raw.closed_form))
    }
}
