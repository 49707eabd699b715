//! Exponential eigenfunctions and the search for spectral dichotomy points.
//!
//! For `L = Σ c_β ∂^β` and `e_λ(z) = exp(λ·z)`, `L e_λ = φ(λ) e_λ` with
//! `φ(λ) = Σ c_β λ^β`. A pair of points with `|φ| < 1` and `|φ| > 1` is the
//! eigenvector input of the classical hypercyclicity criterion.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symbol::ConvolutionSymbol;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numeric::exp_partial_range;
use crate::series::json::{complex_pair, complex_pairs};
use crate::series::{exp_function, linear_combine, Radius};

/// Residual of the eigen relation on a truncated exponential.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EigenResidual {
    #[serde(with = "complex_pair")]
    pub eigenvalue: Complex64,
    /// `p_r(L e_λ^D − φ(λ) e_λ^D)`.
    pub residual: f64,
    /// `Σ_β |c_β λ^β| Σ_{m=D−|β|+1}^{D} s^m/m!` with `s = r Σ|λ_j|`.
    pub bound: f64,
}

/// Measures how far the degree-`degree` truncation of `e_λ` is from being an
/// eigenvector of `l`.
///
/// `∂^β e_λ^D = λ^β e_λ^{D−|β|}`, so the residual only involves the
/// homogeneous parts of degrees `D−|β|+1 ..= D`, each of which has majorant
/// `s^m/m!`.
pub fn eigen_residual(l: &ConvolutionSymbol, lambda: &[Complex64], degree: u32, r: Radius) -> EigenResidual {
    let e = exp_function(lambda, degree);
    let phi = l.symbol_value(lambda);
    let le = l.apply(&e);
    let diff = linear_combine(&[(Complex64::new(1.0, 0.0), &le), (-phi, &e)]).expect("non-empty");
    let residual = diff.majorant(r);

    let s = r.get() * lambda.iter().map(|x| x.norm()).fold(0.0, |a, b| a + b);
    let bound = l
        .coefficients()
        .iter()
        .map(|(beta, c)| {
            let weight = beta
                .entries()
                .iter()
                .map(|&(v, b)| lambda.get(v - 1).map_or(0.0, |x| x.norm().powi(b as i32)))
                .product::<f64>()
                * c.norm();
            let order = beta.degree();
            if order == 0 || weight == 0.0 {
                return 0.0;
            }
            let lo = (degree + 1).saturating_sub(order);
            weight * exp_partial_range(s, lo, degree)
        })
        .fold(0.0, |a, b| a + b);

    EigenResidual {
        eigenvalue: phi,
        residual,
        bound,
    }
}

/// Budget and geometry of the dichotomy search.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DichotomySearch {
    /// Number of ray directions on the unit polysphere.
    pub directions: usize,
    /// Rays are sampled on `t ∈ [0, t_max]`.
    pub t_max: f64,
    /// Coarse samples per ray (excluding `t = 0`).
    pub ray_samples: usize,
    pub bisection_steps: u32,
    /// Accept `|φ| < 1 − margin` and `|φ| > 1 + margin`.
    pub margin: f64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for DichotomySearch {
    fn default() -> Self {
        Self {
            directions: 64,
            t_max: 8.0,
            ray_samples: 32,
            bisection_steps: 40,
            margin: 0.01,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RaySummary {
    #[serde(with = "complex_pairs")]
    pub direction: Vec<Complex64>,
    pub min_modulus: f64,
    pub t_at_min: f64,
    pub max_modulus: f64,
    pub t_at_max: f64,
    /// First coarse sample index passing the small / big test.
    pub first_small: Option<usize>,
    pub first_big: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchLog {
    pub dimension: usize,
    pub search: DichotomySearch,
    pub rays: Vec<RaySummary>,
}

/// Two points with `|φ(small)| < 1 − margin < 1 + margin < |φ(big)|`, the
/// inequalities holding after accounting for the closed-form truncation
/// error when the symbol carries one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DichotomyPoints {
    #[serde(with = "complex_pairs")]
    pub small: Vec<Complex64>,
    pub small_modulus: f64,
    #[serde(with = "complex_pairs")]
    pub big: Vec<Complex64>,
    pub big_modulus: f64,
    /// Truncation error bound at each point (0 for finite symbols).
    pub small_tail: f64,
    pub big_tail: f64,
    pub log: SearchLog,
}

fn direction(k: usize, count: usize, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|j| {
            let step = (k * (2 * j + 1)) % count;
            Complex64::from_polar(1.0, std::f64::consts::TAU * step as f64 / count as f64)
        })
        .collect()
}

/// Certified modulus interval `(|φ| − tail, |φ| + tail)` at `λ`.
fn modulus_interval(l: &ConvolutionSymbol, lambda: &[Complex64]) -> (f64, f64, f64) {
    let v = l.symbol_value_bounded(lambda);
    let tail = v.tail_bound.unwrap_or(0.0);
    let m = v.value.norm();
    (m - tail, m + tail, tail)
}

fn scale(u: &[Complex64], t: f64) -> Vec<Complex64> {
    u.iter().map(|x| x * t).collect()
}

/// Searches rays `t·u` for points where `|φ|` sits strictly below and
/// above one. The coarse hit closest to the origin is refined by bisection between
/// it and the preceding (failing) sample; the passing end of the bracket is
/// returned, so the reported points always satisfy the strict test.
pub fn find_dichotomy_points(l: &ConvolutionSymbol, search: &DichotomySearch) -> Result<DichotomyPoints> {
    if l.is_trivial() {
        return Err(Error::TrivialOperator);
    }
    let dim = l.variable_span().max(1);
    let count = search.directions.max(1);
    let samples = search.ray_samples.max(1);
    let small_ok = |lo_hi: (f64, f64, f64)| lo_hi.1 < 1.0 - search.margin;
    let big_ok = |lo_hi: (f64, f64, f64)| lo_hi.0 > 1.0 + search.margin;
    let t_at = |i: usize| search.t_max * i as f64 / samples as f64;

    let rays: Vec<RaySummary> = search.exec.map_range(count, |k| {
        let u = direction(k, count, dim);
        let mut summary = RaySummary {
            direction: u.clone(),
            min_modulus: f64::INFINITY,
            t_at_min: 0.0,
            max_modulus: f64::NEG_INFINITY,
            t_at_max: 0.0,
            first_small: None,
            first_big: None,
        };
        for i in 0..=samples {
            let t = t_at(i);
            let iv = modulus_interval(l, &scale(&u, t));
            let m = 0.5 * (iv.0 + iv.1);
            if m < summary.min_modulus {
                summary.min_modulus = m;
                summary.t_at_min = t;
            }
            if m > summary.max_modulus {
                summary.max_modulus = m;
                summary.t_at_max = t;
            }
            if summary.first_small.is_none() && small_ok(iv) {
                summary.first_small = Some(i);
            }
            if summary.first_big.is_none() && big_ok(iv) {
                summary.first_big = Some(i);
            }
        }
        summary
    });

    let log = SearchLog {
        dimension: dim,
        search: *search,
        rays,
    };
    let closest = |pick: fn(&RaySummary) -> Option<usize>| {
        log.rays
            .iter()
            .enumerate()
            .filter_map(|(k, r)| pick(r).map(|i| (i, k)))
            .min()
    };
    let (Some(small_hit), Some(big_hit)) = (closest(|r| r.first_small), closest(|r| r.first_big)) else {
        return Err(Error::NotFound(Box::new(log)));
    };

    let refine = |(i, k): (usize, usize), ok: &dyn Fn((f64, f64, f64)) -> bool| -> (Vec<Complex64>, f64, f64) {
        let u = &log.rays[k].direction;
        let mut hi = t_at(i);
        if i > 0 {
            let mut lo = t_at(i - 1);
            for _ in 0..search.bisection_steps {
                let mid = 0.5 * (lo + hi);
                if ok(modulus_interval(l, &scale(u, mid))) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        let point = scale(u, hi);
        let (lo_m, hi_m, tail) = modulus_interval(l, &point);
        (point, 0.5 * (lo_m + hi_m), tail)
    };
    let (small, small_modulus, small_tail) = refine(small_hit, &small_ok);
    let (big, big_modulus, big_tail) = refine(big_hit, &big_ok);
    Ok(DichotomyPoints {
        small,
        small_modulus,
        big,
        big_modulus,
        small_tail,
        big_tail,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::{translation_symbol, TranslationVector};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn check(points: &DichotomyPoints, l: &ConvolutionSymbol) {
        assert!(l.symbol_value(&points.small).norm() + points.small_tail < 0.99);
        assert!(l.symbol_value(&points.big).norm() - points.big_tail > 1.01);
    }

    #[test]
    fn derivative_dichotomy() {
        let l = ConvolutionSymbol::derivative(1);
        let p = find_dichotomy_points(&l, &DichotomySearch::default()).unwrap();
        check(&p, &l);
        assert_eq!(p.small, vec![c(0.0)]);
    }

    #[test]
    fn shifted_derivative_dichotomy() {
        let l = ConvolutionSymbol::scalar(c(2.0)).plus(&ConvolutionSymbol::derivative(1));
        let p = find_dichotomy_points(&l, &DichotomySearch::default()).unwrap();
        check(&p, &l);
        assert_eq!(p.big, vec![c(0.0)]);
    }

    #[test]
    fn translation_dichotomy() {
        let l = translation_symbol(&TranslationVector::from_real(&[1.0]), 60);
        let p = find_dichotomy_points(&l, &DichotomySearch::default()).unwrap();
        check(&p, &l);
        // e^{-λ}: small on the positive axis, big on the negative one
        assert!(p.small[0].re > 0.0 && p.big[0].re < 0.0);
    }

    #[test]
    fn multi_variable_dichotomy() {
        let l = ConvolutionSymbol::derivative(1).plus(&ConvolutionSymbol::derivative(2).scaled(c(-1.0)));
        let p = find_dichotomy_points(&l, &DichotomySearch::default()).unwrap();
        check(&p, &l);
        assert_eq!(p.log.dimension, 2);
    }

    #[test]
    fn trivial_and_not_found() {
        let triv = ConvolutionSymbol::scalar(c(0.5));
        assert!(matches!(
            find_dichotomy_points(&triv, &DichotomySearch::default()),
            Err(Error::TrivialOperator)
        ));
        // φ(λ) = 1e-9 λ only exceeds 1 far outside the tiny search window
        let weak = ConvolutionSymbol::derivative(1).scaled(c(1e-9));
        let search = DichotomySearch {
            t_max: 1.0,
            directions: 4,
            ..Default::default()
        };
        match find_dichotomy_points(&weak, &search) {
            Err(Error::NotFound(log)) => assert_eq!(log.rays.len(), 4),
            other => panic!("expected NotFound, got {other:?}"),
        }
    }

    #[test]
    fn sequential_matches_parallel() {
        let l = translation_symbol(&TranslationVector::from_real(&[1.0, -0.5]), 30);
        let seq = DichotomySearch {
            exec: Execution::Sequential,
            ..Default::default()
        };
        let a = find_dichotomy_points(&l, &seq).unwrap();
        let b = find_dichotomy_points(&l, &DichotomySearch::default()).unwrap();
        assert_eq!(a.small, b.small);
        assert_eq!(a.big, b.big);
    }

    #[test]
    fn eigen_residual_within_bound_and_decaying() {
        let r1 = Radius::new(1.0).unwrap();
        let presets = [
            ConvolutionSymbol::derivative(1),
            ConvolutionSymbol::scalar(c(2.0)).plus(&ConvolutionSymbol::derivative(1)),
            translation_symbol(&TranslationVector::from_real(&[1.0]), 60),
        ];
        for l in &presets {
            let lo = eigen_residual(l, &[c(1.0)], 10, r1);
            let hi = eigen_residual(l, &[c(1.0)], 20, r1);
            assert!(lo.residual <= lo.bound * (1.0 + 1e-12), "{lo:?}");
            assert!(hi.residual <= hi.bound * (1.0 + 1e-12), "{hi:?}");
            assert!(hi.residual * 10.0 <= lo.residual, "{lo:?} {hi:?}");
        }
        // trivial operators are exact eigen-operators
        let triv = eigen_residual(&ConvolutionSymbol::scalar(c(3.0)), &[c(0.7)], 8, r1);
        assert_eq!(triv.residual, 0.0);
        assert_eq!(triv.bound, 0.0);
    }
}
