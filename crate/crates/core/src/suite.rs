//! Seeded random property suites for the cylinder and convolution
//! identities.
//!
//! Case `i` of a run with seed `s` draws from `ChaCha8Rng` seeded with `s`
//! on stream `i`, so any single case can be regenerated in isolation and a
//! run is identical under sequential and parallel execution.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convolution::{translate, translate_via_symbol, ConvolutionSymbol, TranslationVector};
use crate::cylinder::{embed, restrict, CylinderIndex};
use crate::error::Result;
use crate::exec::Execution;
use crate::series::{MultiIndex, TruncatedEntireFunction};

/// Largest variable index used by random functions.
pub const FUNCTION_VARIABLES: usize = 4;
pub const FUNCTION_MAX_DEGREE: u32 = 6;
pub const FUNCTION_MAX_TERMS: usize = 12;
pub const SYMBOL_MAX_SPAN: usize = 3;
pub const SYMBOL_MAX_ORDER: u32 = 4;
pub const SYMBOL_MAX_TERMS: usize = 5;
/// Iterates compared in the k-fold factorization check.
pub const FACTORIZATION_DEPTH: usize = 5;
/// Relative tolerance of the convolution property.
pub const CONVOLUTION_RTOL: f64 = 1e-9;

/// Generator for case `index` of a run seeded with `seed`.
pub fn case_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Uniform on the unit square `[0, 1) × [0, 1)`.
pub fn random_coefficient<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random(), rng.random())
}

/// Multi-index over variables `1..=vars` with degree at most `max_degree`.
pub fn random_index<R: Rng>(rng: &mut R, vars: usize, max_degree: u32) -> MultiIndex {
    let degree = rng.random_range(0..=max_degree);
    let mut exps = vec![0u32; vars];
    for _ in 0..degree {
        exps[rng.random_range(0..vars)] += 1;
    }
    MultiIndex::from_dense(&exps)
}

/// Symbol with span at most 3 and order at most 4. One draw in four is a
/// scalar multiple of the identity.
pub fn random_symbol<R: Rng>(rng: &mut R) -> ConvolutionSymbol {
    if rng.random_range(0..4) == 0 {
        return ConvolutionSymbol::scalar(random_coefficient(rng));
    }
    let span = rng.random_range(1..=SYMBOL_MAX_SPAN);
    let count = rng.random_range(1..=SYMBOL_MAX_TERMS);
    let mut terms = BTreeMap::new();
    for _ in 0..count {
        terms.insert(random_index(rng, span, SYMBOL_MAX_ORDER), random_coefficient(rng));
    }
    ConvolutionSymbol::new(terms, "random")
}

/// Polynomial on variables `1..=4`, degree at most 6, at most 12 terms.
/// A repeated index keeps its last draw, so coefficients stay in the unit
/// square.
pub fn random_function<R: Rng>(rng: &mut R) -> TruncatedEntireFunction {
    let count = rng.random_range(1..=FUNCTION_MAX_TERMS);
    let mut terms = BTreeMap::new();
    for _ in 0..count {
        terms.insert(
            random_index(rng, FUNCTION_VARIABLES, FUNCTION_MAX_DEGREE),
            random_coefficient(rng),
        );
    }
    TruncatedEntireFunction::from_terms(terms)
}

/// Translation vector of length 1 to 3.
pub fn random_translation<R: Rng>(rng: &mut R) -> TranslationVector {
    let len = rng.random_range(1..=3);
    TranslationVector::new((0..len).map(|_| random_coefficient(rng)).collect())
}

#[derive(Clone, Debug)]
pub struct RandomCase {
    pub symbol: ConvolutionSymbol,
    pub function: TruncatedEntireFunction,
    pub translation: TranslationVector,
    /// Cylinder `n` in `1..=4`; `restrict(function, n)` is the cylinder part.
    pub cylinder: CylinderIndex,
}

impl RandomCase {
    pub fn generate(seed: u64, index: usize) -> Self {
        let mut rng = case_rng(seed, index);
        let symbol = random_symbol(&mut rng);
        let function = random_function(&mut rng);
        let translation = random_translation(&mut rng);
        let cylinder = CylinderIndex::new(rng.random_range(1..=FUNCTION_VARIABLES)).expect("n >= 1");
        Self {
            symbol,
            function,
            translation,
            cylinder,
        }
    }
}

/// `max |a_β − b_β| / max(|a_β|, |b_β|)` over both tables; 0 when both are
/// zero.
pub fn max_relative_difference(a: &TruncatedEntireFunction, b: &TruncatedEntireFunction) -> f64 {
    let scale = a.max_abs_coefficient().max(b.max_abs_coefficient());
    let diff = a
        .terms()
        .keys()
        .chain(b.terms().keys())
        .map(|k| (a.coefficient(k) - b.coefficient(k)).norm())
        .fold(0.0, f64::max);
    if diff == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Names of the checks run by [`lemma_suite`], in report order.
pub const LEMMA_CHECKS: [&str; 7] = [
    "restrict_embed_identity",
    "inclusion_chain",
    "associated_factorization",
    "iterated_factorization",
    "translation_outside_cylinder",
    "triviality_transfer",
    "orbit_dimension_bound",
];

/// Names of the checks run by [`convolution_suite`], in report order.
pub const CONVOLUTION_CHECKS: [&str; 2] = ["commutes_with_translation", "translation_paths_agree"];

/// Pass count of one named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub failing_cases: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub checks: Vec<CheckTally>,
    /// Largest relative coefficient error seen in tolerance-based checks.
    pub max_relative_error: f64,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed == c.total)
    }

    /// Cases for which every check passed.
    pub fn cases_passed(&self) -> usize {
        (0..self.cases)
            .filter(|i| self.checks.iter().all(|c| c.failing_cases.binary_search(i).is_err()))
            .count()
    }

    pub fn check(&self, name: &str) -> Option<&CheckTally> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Merges two reports over the same cases.
    pub fn merged(mut self, other: SuiteReport) -> SuiteReport {
        self.checks.extend(other.checks);
        self.max_relative_error = self.max_relative_error.max(other.max_relative_error);
        self
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "seed {} cases {}: {}/{} passed\n",
            self.seed,
            self.cases,
            self.cases_passed(),
            self.cases
        );
        for c in &self.checks {
            out.push_str(&format!("  {:<30} {}/{}\n", c.name, c.passed, c.total));
        }
        out
    }
}

struct CaseResult {
    passed: Vec<bool>,
    relative_error: f64,
}

fn tally(seed: u64, cases: usize, names: &[&str], results: Vec<CaseResult>) -> SuiteReport {
    let checks = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let failing_cases: Vec<usize> = results
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.passed[j])
                .map(|(i, _)| i)
                .collect();
            CheckTally {
                name: name.to_string(),
                passed: cases - failing_cases.len(),
                total: cases,
                failing_cases,
            }
        })
        .collect();
    SuiteReport {
        seed,
        cases,
        checks,
        max_relative_error: results.iter().map(|r| r.relative_error).fold(0.0, f64::max),
    }
}

fn lemma_case(case: &RandomCase) -> Result<CaseResult> {
    let l = &case.symbol;
    let n = case.cylinder;
    let f_n = restrict(&case.function, n);
    let lifted = embed(&f_n, n)?.function;
    let l_n = l.associated_operator(n);

    let restrict_embed = restrict(&lifted, n) == f_n;

    let wider = CylinderIndex::new(n.get() + 1)?;
    let inclusion = embed(&f_n, wider).is_ok_and(|e| e.function == f_n)
        && restrict(&restrict(&case.function, wider), n) == f_n
        && restrict(&f_n, wider) == f_n;

    let associated = l.apply(&lifted).same_terms(&l_n.apply(&f_n));

    let full_orbit = l.orbit(&lifted, FACTORIZATION_DEPTH);
    let reduced_orbit = l_n.orbit(&restrict(&lifted, n), FACTORIZATION_DEPTH);
    let iterated = full_orbit.iter().zip(&reduced_orbit).all(|(a, b)| a.same_terms(b));

    // shifting along variables the function does not depend on
    let mut xi = case.translation.0.clone();
    xi.resize(n.get().max(xi.len()), Complex64::new(0.0, 0.0));
    xi.iter_mut().take(n.get()).for_each(|x| *x = Complex64::new(0.0, 0.0));
    xi.push(Complex64::new(1.0, -1.0));
    let outside = translate(&f_n, &TranslationVector::new(xi)).same_terms(&f_n)
        && translate(&f_n, &case.translation).same_terms(&translate(&f_n, &case.translation.projected(n.get())));

    let span = l.variable_span();
    let triviality = l.is_trivial()
        == (1..=span + 1).all(|m| {
            l.associated_operator(CylinderIndex::new(m).expect("m >= 1"))
                .is_trivial()
        });

    let dim = case.function.essential_dimension();
    let bounded = l
        .orbit(&case.function, FACTORIZATION_DEPTH)
        .iter()
        .all(|g| g.essential_dimension() <= dim);

    Ok(CaseResult {
        passed: vec![
            restrict_embed,
            inclusion,
            associated,
            iterated,
            outside,
            triviality,
            bounded,
        ],
        relative_error: 0.0,
    })
}

fn convolution_case(case: &RandomCase) -> CaseResult {
    let l = &case.symbol;
    let f = &case.function;
    let xi = &case.translation;
    let lhs = l.apply(&translate(f, xi));
    let rhs = translate_via_symbol(&l.apply(f), xi);
    let commute = max_relative_difference(&lhs, &rhs);
    let paths = max_relative_difference(&translate(f, xi), &translate_via_symbol(f, xi));
    CaseResult {
        passed: vec![commute <= CONVOLUTION_RTOL, paths <= CONVOLUTION_RTOL],
        relative_error: commute.max(paths),
    }
}

/// Cylinder identities, associated-operator factorizations (single and
/// `k`-fold, `k <= 5`), translations along absent variables, triviality
/// transfer and the orbit dimension bound. Every comparison is exact.
pub fn lemma_suite(seed: u64, cases: usize, exec: Execution) -> Result<SuiteReport> {
    let results = exec
        .map_range(cases, |i| lemma_case(&RandomCase::generate(seed, i)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(tally(seed, cases, &LEMMA_CHECKS, results))
}

/// `L∘τ_ξ = τ_ξ∘L` with the left side through the binomial shift and the
/// right side through the derivative expansion, plus agreement of the two
/// translation paths; both to [`CONVOLUTION_RTOL`].
pub fn convolution_suite(seed: u64, cases: usize, exec: Execution) -> SuiteReport {
    let results = exec.map_range(cases, |i| convolution_case(&RandomCase::generate(seed, i)));
    tally(seed, cases, &CONVOLUTION_CHECKS, results)
}

/// Both suites over the same cases.
pub fn full_suite(seed: u64, cases: usize, exec: Execution) -> Result<SuiteReport> {
    Ok(lemma_suite(seed, cases, exec)?.merged(convolution_suite(seed, cases, exec)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cases_are_reproducible() {
        let a = RandomCase::generate(7, 3);
        let b = RandomCase::generate(7, 3);
        assert_eq!(a.symbol, b.symbol);
        assert_eq!(a.function, b.function);
        assert_ne!(RandomCase::generate(7, 4).function, a.function);
    }

    #[test]
    fn population_limits() {
        for i in 0..200 {
            let c = RandomCase::generate(1, i);
            assert!(c.symbol.variable_span() <= SYMBOL_MAX_SPAN);
            assert!(c.symbol.order() <= SYMBOL_MAX_ORDER);
            assert!(c.function.degree() <= FUNCTION_MAX_DEGREE);
            assert!(c.function.len() <= FUNCTION_MAX_TERMS);
            assert!(c.function.essential_dimension() <= FUNCTION_VARIABLES);
            for v in c.symbol.coefficients().values() {
                assert!((0.0..1.0).contains(&v.re) && (0.0..1.0).contains(&v.im));
            }
        }
    }

    #[test]
    fn small_run_passes() {
        let r = full_suite(42, 50, Execution::Sequential).unwrap();
        assert!(r.all_passed(), "{}", r.summary());
        assert_eq!(r.cases_passed(), 50);
        assert_eq!(r, full_suite(42, 50, Execution::Parallel).unwrap());
    }

    #[test]
    fn relative_difference() {
        let a = TruncatedEntireFunction::constant(Complex64::new(2.0, 0.0));
        let b = TruncatedEntireFunction::constant(Complex64::new(2.0, 1e-10));
        assert!((max_relative_difference(&a, &b) - 5e-11).abs() < 1e-20);
        assert_eq!(max_relative_difference(&a, &a), 0.0);
        let z = TruncatedEntireFunction::zero();
        assert_eq!(max_relative_difference(&z, &z), 0.0);
        assert_eq!(max_relative_difference(&a, &z), 1.0);
    }
}
