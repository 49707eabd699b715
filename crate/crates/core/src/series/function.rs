use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::{MultiIndex, Radius, TailDescriptor};
use crate::error::{Error, Result};
use crate::exec::Execution;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Polynomial truncation of an entire function.
///
/// Invariants: no stored coefficient is exactly zero and every stored
/// term has degree at most `truncation_degree`. The represented function
/// depends only on `z_1, …, z_n` with `n = essential_dimension()`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedEntireFunction {
    terms: BTreeMap<MultiIndex, Complex64>,
    truncation_degree: u32,
    tail: Option<TailDescriptor>,
}

impl Default for TruncatedEntireFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl TruncatedEntireFunction {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
            truncation_degree: 0,
            tail: None,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(MultiIndex::zero(), c)
    }

    /// The coordinate function `z_var`.
    pub fn variable(var: usize) -> Self {
        Self::monomial(MultiIndex::unit(var), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(index: MultiIndex, c: Complex64) -> Self {
        let truncation_degree = index.degree();
        let mut terms = BTreeMap::new();
        if c != ZERO {
            terms.insert(index, c);
        }
        Self {
            terms,
            truncation_degree,
            tail: None,
        }
    }

    /// Sums duplicate indices and drops exact zeros. The truncation degree
    /// is the largest term degree.
    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Self {
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (index, c) in terms {
            *map.entry(index).or_insert(ZERO) += c;
        }
        Self::from_map(map, 0)
    }

    /// Builds from an accumulated table; `truncation_degree` is raised to
    /// cover every surviving term.
    pub(crate) fn from_map(mut terms: BTreeMap<MultiIndex, Complex64>, truncation_degree: u32) -> Self {
        terms.retain(|_, c| *c != ZERO);
        let top = terms.keys().next_back().map_or(0, MultiIndex::degree);
        Self {
            terms,
            truncation_degree: truncation_degree.max(top),
            tail: None,
        }
    }

    /// Same terms with a declared truncation degree.
    pub fn with_truncation_degree(mut self, degree: u32) -> Result<Self> {
        if degree < self.degree() {
            return Err(Error::InvalidInput(format!(
                "truncation degree {degree} below stored degree {}",
                self.degree()
            )));
        }
        self.truncation_degree = degree;
        Ok(self)
    }

    pub fn with_tail(mut self, tail: Option<TailDescriptor>) -> Self {
        self.tail = tail;
        self
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Complex64> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, index: &MultiIndex) -> Complex64 {
        self.terms.get(index).copied().unwrap_or(ZERO)
    }

    pub fn truncation_degree(&self) -> u32 {
        self.truncation_degree
    }

    pub fn tail(&self) -> Option<&TailDescriptor> {
        self.tail.as_ref()
    }

    /// Largest degree among stored terms (0 for the zero series).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Largest variable index occurring in any term, 0 for constants.
    pub fn essential_dimension(&self) -> usize {
        self.terms.keys().map(MultiIndex::max_variable).max().unwrap_or(0)
    }

    /// True when both coefficient tables agree exactly (tails and
    /// truncation degrees are ignored).
    pub fn same_terms(&self, other: &Self) -> bool {
        self.terms == other.terms
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops terms with `|a| <= tol`. A tolerance of 0 keeps everything.
    pub fn pruned(&self, tol: f64) -> Self {
        let mut out = self.clone();
        if tol > 0.0 {
            out.terms.retain(|_, c| c.norm() > tol);
            out.tail = None;
        }
        out
    }

    /// Drops every term of degree above `degree`.
    pub fn truncated(&self, degree: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.degree() <= degree)
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        Self {
            terms,
            truncation_degree: self.truncation_degree.min(degree),
            tail: self.tail.as_ref().map(|t| t.truncated(degree)),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        if c == ZERO {
            return Self::zero().with_truncation_degree(self.truncation_degree).unwrap();
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        Self::from_map(terms, self.truncation_degree).with_tail(self.tail.as_ref().map(|t| t.scaled(c.norm())))
    }

    /// `Σ_α a_α z^α`; coordinates past the end of `point` are taken as 0.
    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        // powers[j][e] = z_{j+1}^e, extended on demand
        let mut powers: Vec<Vec<Complex64>> = point.iter().map(|&z| vec![Complex64::new(1.0, 0.0), z]).collect();
        let mut sum = ZERO;
        'terms: for (index, &a) in &self.terms {
            let mut prod = a;
            for &(var, exp) in index.entries() {
                let Some(table) = powers.get_mut(var - 1) else {
                    continue 'terms;
                };
                let exp = exp as usize;
                while table.len() <= exp {
                    let next = table[table.len() - 1] * table[1];
                    table.push(next);
                }
                prod *= table[exp];
            }
            sum += prod;
        }
        sum
    }

    /// `∂f/∂z_var`, term by term: `a_α z^α ↦ α_var a_α z^{α - e_var}`.
    pub fn partial_derivative(&self, var: usize) -> Self {
        let mut out = BTreeMap::new();
        for (index, &a) in &self.terms {
            let e = index.exponent(var);
            if let Some(lower) = index.lowered(var) {
                out.insert(lower, a * f64::from(e));
            }
        }
        Self::from_map(out, self.truncation_degree.saturating_sub(1))
    }

    /// Polydisc majorant `p_r(f) = Σ |a_α| r^{|α|}`, plus the tail bound
    /// when `include_tail` is set.
    pub fn majorant_seminorm(&self, r: Radius, include_tail: bool) -> Result<f64> {
        let tail = if include_tail {
            self.tail.as_ref().ok_or(Error::TailUnavailable)?.bound(r)
        } else {
            0.0
        };
        Ok(self.majorant(r) + tail)
    }

    /// Polynomial part of [`Self::majorant_seminorm`].
    pub fn majorant(&self, r: Radius) -> f64 {
        let r = r.get();
        self.terms
            .iter()
            .map(|(k, v)| v.norm() * r.powi(k.degree() as i32))
            .fold(0.0, |a, b| a + b)
    }

    /// Max of `|f|` over the torus grid `r·(ω^{k_1}, …, ω^{k_n})`, `ω` a
    /// primitive root of unity of order `samples_per_axis`. A lower estimate
    /// for the sup norm over the polydisc; costs `samples_per_axis^n`
    /// evaluations. Values are capped at [`Self::majorant`], which bounds
    /// `|f|` on the whole polydisc, so rounding on the grid never pushes the
    /// estimate past it.
    pub fn grid_sup_estimate(&self, r: Radius, samples_per_axis: usize) -> f64 {
        self.grid_sup_estimate_with(r, samples_per_axis, Execution::default())
    }

    pub fn grid_sup_estimate_with(&self, r: Radius, samples_per_axis: usize, exec: Execution) -> f64 {
        let s = samples_per_axis.max(1);
        let n = self.essential_dimension();
        if n == 0 {
            return self.coefficient(&MultiIndex::zero()).norm();
        }
        let roots: Vec<Complex64> = (0..s)
            .map(|k| Complex64::from_polar(r.get(), std::f64::consts::TAU * k as f64 / s as f64))
            .collect();
        let total = (s as u128).pow(n as u32);
        assert!(total <= u64::MAX as u128, "grid of {s}^{n} points is too large");
        let total = total as u64;
        const CHUNK: u64 = 2048;
        let chunks = total.div_ceil(CHUNK) as usize;
        exec.map_range(chunks, |c| {
            let mut point = vec![ZERO; n];
            let start = c as u64 * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut best: f64 = 0.0;
            for mut idx in start..end {
                for z in point.iter_mut() {
                    *z = roots[(idx % s as u64) as usize];
                    idx /= s as u64;
                }
                best = best.max(self.evaluate(&point).norm());
            }
            best
        })
        .into_iter()
        .fold(0.0, f64::max)
        .min(self.majorant(r))
    }
}

/// `Σ c_i f_i`. The truncation degree is the maximum over the inputs; the
/// tail descriptor survives only when every input carries one of the same
/// kind.
pub fn linear_combine(pairs: &[(Complex64, &TruncatedEntireFunction)]) -> Result<TruncatedEntireFunction> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("linear_combine of an empty list".into()));
    }
    let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    for (c, f) in pairs {
        for (k, v) in &f.terms {
            *acc.entry(k.clone()).or_insert(ZERO) += c * v;
        }
    }
    let degree = pairs.iter().map(|(_, f)| f.truncation_degree).max().unwrap_or(0);
    let tail = TailDescriptor::combine(pairs.iter().map(|(c, f)| (c.norm(), f.tail.as_ref())));
    Ok(TruncatedEntireFunction::from_map(acc, degree).with_tail(tail))
}

/// Cauchy product of the coefficient tables.
pub fn multiply(f: &TruncatedEntireFunction, g: &TruncatedEntireFunction) -> TruncatedEntireFunction {
    let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    for (a, x) in &f.terms {
        for (b, y) in &g.terms {
            *acc.entry(a.sum(b)).or_insert(ZERO) += x * y;
        }
    }
    TruncatedEntireFunction::from_map(acc, f.truncation_degree + g.truncation_degree)
}

impl std::ops::Add for &TruncatedEntireFunction {
    type Output = TruncatedEntireFunction;

    fn add(self, rhs: Self) -> TruncatedEntireFunction {
        let one = Complex64::new(1.0, 0.0);
        linear_combine(&[(one, self), (one, rhs)]).expect("non-empty")
    }
}

impl std::ops::Sub for &TruncatedEntireFunction {
    type Output = TruncatedEntireFunction;

    fn sub(self, rhs: Self) -> TruncatedEntireFunction {
        let one = Complex64::new(1.0, 0.0);
        linear_combine(&[(one, self), (-one, rhs)]).expect("non-empty")
    }
}

impl std::ops::Mul for &TruncatedEntireFunction {
    type Output = TruncatedEntireFunction;

    fn mul(self, rhs: Self) -> TruncatedEntireFunction {
        multiply(self, rhs)
    }
}

impl fmt::Display for TruncatedEntireFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if v.im == 0.0 {
                write!(f, "{}", v.re)?;
            } else {
                write!(f, "({}{:+}i)", v.re, v.im)?;
            }
            if !k.is_zero() {
                write!(f, "*{k}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn z(var: usize) -> TruncatedEntireFunction {
        TruncatedEntireFunction::variable(var)
    }

    fn mono(p: &[(usize, u32)], a: f64) -> TruncatedEntireFunction {
        TruncatedEntireFunction::monomial(MultiIndex::new(p.iter().copied()).unwrap(), c(a))
    }

    fn one() -> TruncatedEntireFunction {
        TruncatedEntireFunction::constant(c(1.0))
    }

    fn r(x: f64) -> Radius {
        Radius::new(x).unwrap()
    }

    #[test]
    fn linear_combine_examples() {
        let z1 = z(1);
        let two_z1 = linear_combine(&[(c(1.0), &z1), (c(1.0), &z1)]).unwrap();
        assert!(two_z1.same_terms(&mono(&[(1, 1)], 2.0)));

        let f = &(&mono(&[(1, 2)], 1.0) + &z(2)) + &one();
        let zero = linear_combine(&[(c(1.0), &f), (c(-1.0), &f)]).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.truncation_degree(), 2);

        let g = &mono(&[(1, 2)], 1.0) + &z(2);
        let z2 = z(2);
        let h = linear_combine(&[(c(2.0), &g), (c(3.0), &z2)]).unwrap();
        let expect = &mono(&[(1, 2)], 2.0) + &mono(&[(2, 1)], 5.0);
        assert!(h.same_terms(&expect));
        assert!(linear_combine(&[]).is_err());
    }

    #[test]
    fn multiply_examples() {
        let p = &one() + &z(1);
        let q = &one() - &z(1);
        let pq = &p * &q;
        assert!(pq.same_terms(&(&one() - &mono(&[(1, 2)], 1.0))));
        assert_eq!(pq.truncation_degree(), 2);

        assert!((&z(1) * &z(2)).same_terms(&mono(&[(1, 1), (2, 1)], 1.0)));

        let s = &z(1) + &z(2);
        let sq = &s * &s;
        let expect = &(&mono(&[(1, 2)], 1.0) + &mono(&[(1, 1), (2, 1)], 2.0)) + &mono(&[(2, 2)], 1.0);
        assert!(sq.same_terms(&expect));
    }

    #[test]
    fn evaluate_examples() {
        let f = &one() + &mono(&[(1, 1), (2, 1)], 1.0);
        assert_eq!(f.evaluate(&[c(2.0), c(3.0)]), c(7.0));

        let g = &(&mono(&[(1, 3)], 4.0) + &z(2)) + &TruncatedEntireFunction::constant(Complex64::new(1.5, -2.0));
        assert_eq!(g.evaluate(&[]), Complex64::new(1.5, -2.0));
        assert_eq!(g.evaluate(&[c(0.0), c(0.0)]), Complex64::new(1.5, -2.0));

        let h = &mono(&[(1, 2)], 1.0) - &z(2);
        assert_eq!(h.evaluate(&[Complex64::i(), c(1.0)]), c(-2.0));
    }

    #[test]
    fn evaluate_short_point_pads_with_zero() {
        let f = &z(1) + &mono(&[(1, 1), (3, 2)], 5.0);
        assert_eq!(f.evaluate(&[c(2.0)]), c(2.0));
    }

    #[test]
    fn derivative_examples() {
        assert!(mono(&[(1, 3)], 1.0)
            .partial_derivative(1)
            .same_terms(&mono(&[(1, 2)], 3.0)));
        assert!(mono(&[(1, 2)], 1.0).partial_derivative(2).is_zero());
        let f = &mono(&[(1, 1), (2, 1)], 1.0) + &mono(&[(1, 2)], 1.0);
        assert!(f.partial_derivative(1).same_terms(&(&z(2) + &mono(&[(1, 1)], 2.0))));
        assert!(one().partial_derivative(1).is_zero());
    }

    #[test]
    fn majorant_examples() {
        let f = &mono(&[(1, 2)], 1.0) + &mono(&[(1, 1)], 2.0);
        assert_eq!(f.majorant_seminorm(r(1.0), false).unwrap(), 3.0);
        assert_eq!(
            mono(&[(1, 1), (2, 1)], 1.0).majorant_seminorm(r(2.0), false).unwrap(),
            4.0
        );
        assert!(matches!(f.majorant_seminorm(r(1.0), true), Err(Error::TailUnavailable)));
        assert_eq!(TruncatedEntireFunction::zero().majorant(r(3.0)), 0.0);
    }

    #[test]
    fn grid_sup_examples() {
        for s in 1..6 {
            assert!((z(1).grid_sup_estimate(r(1.0), s) - 1.0).abs() < 1e-15);
        }
        let k = TruncatedEntireFunction::constant(Complex64::new(3.0, 4.0));
        assert_eq!(k.grid_sup_estimate(r(2.0), 4), 5.0);
        assert_eq!((&one() + &z(1)).grid_sup_estimate(r(1.0), 2), 2.0);
    }

    #[test]
    fn grid_sup_modes_agree() {
        let f = &(&mono(&[(1, 2), (2, 1)], 1.0) - &z(3)) + &mono(&[(2, 3)], 0.5);
        let a = f.grid_sup_estimate_with(r(1.5), 9, Execution::Sequential);
        let b = f.grid_sup_estimate_with(r(1.5), 9, Execution::Parallel);
        assert_eq!(a, b);
        assert!(a <= f.majorant(r(1.5)));
    }

    #[test]
    fn truncation_and_pruning() {
        let f = &(&one() + &z(1)) + &mono(&[(1, 3)], 1e-20);
        assert_eq!(f.pruned(0.0), f);
        assert_eq!(f.pruned(1e-12).len(), 2);
        let t = f.truncated(1);
        assert_eq!(t.len(), 2);
        assert_eq!(t.truncation_degree(), 1);
        assert!(f.clone().with_truncation_degree(2).is_err());
        assert_eq!(f.clone().with_truncation_degree(9).unwrap().truncation_degree(), 9);
    }

    #[test]
    fn essential_dimension_and_display() {
        let f = &mono(&[(3, 2)], 1.0) + &z(1);
        assert_eq!(f.essential_dimension(), 3);
        assert_eq!(one().essential_dimension(), 0);
        assert_eq!(f.to_string(), "1*z1 + 1*z3^2");
    }
}
