mod common;

use common::{factorial, gap_small_bound_exact, ratio_to_f64, rel_err};
use convdyn::dynamics::{gap_small_bound, orbit_trace, semi_irregular_gap_witness};
use convdyn::numeric::{inv_factorial, power_over_factorial};
use convdyn::series::default_gap_blocks;
use convdyn::{exp_function, gap_series, Complex64, ConvolutionSymbol, MultiIndex, Radius, TruncatedEntireFunction};
use num_bigint::BigUint;
use num_traits::One;

fn r(x: f64) -> Radius {
    Radius::new(x).unwrap()
}

#[test]
fn inverse_factorials_match_integer_oracle() {
    for n in 0..=170 {
        let exact = ratio_to_f64(&BigUint::one(), &factorial(n));
        assert!(rel_err(inv_factorial(n), exact) <= 1e-12, "n = {n}");
    }
}

#[test]
fn powers_over_factorials_match_integer_oracle() {
    for s in 1..=5u32 {
        for m in 0..=120 {
            let exact = ratio_to_f64(&BigUint::from(s).pow(m), &factorial(m));
            assert!(
                rel_err(power_over_factorial(f64::from(s), m), exact) <= 1e-12,
                "s = {s}, m = {m}"
            );
        }
    }
}

#[test]
fn gap_coefficients_match_integer_oracle() {
    let f = gap_series(&default_gap_blocks(), 2).unwrap();
    for m in default_gap_blocks() {
        let c = f.coefficient(&MultiIndex::new([(2, m)]).unwrap());
        assert_eq!(c.im, 0.0);
        assert!(rel_err(c.re, ratio_to_f64(&BigUint::one(), &factorial(m))) <= 1e-12);
    }
}

#[test]
fn exponential_coefficients_match_integer_oracle() {
    // λ = (2, 3): coefficient of z1^a z2^b is 2^a 3^b / (a! b!)
    let e = exp_function(&[Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)], 30);
    for (index, c) in e.iter() {
        let a = index.exponent(1);
        let b = index.exponent(2);
        let num = BigUint::from(2u32).pow(a) * BigUint::from(3u32).pow(b);
        let den = factorial(a) * factorial(b);
        assert!(rel_err(c.re, ratio_to_f64(&num, &den)) <= 1e-12, "{index}");
    }
}

#[test]
fn small_bounds_match_integer_oracle() {
    let blocks = default_gap_blocks();
    for k in 0..=200usize {
        for radius in [1u32, 2, 3] {
            let got = gap_small_bound(&blocks, k, r(f64::from(radius)));
            let exact = gap_small_bound_exact(&blocks, k as u32, radius);
            assert!(rel_err(got, exact) <= 1e-12, "k = {k}, r = {radius}");
        }
    }
    let b32 = [1, 2, 4, 8, 16, 32];
    assert!(
        rel_err(
            gap_small_bound(&b32, 24, r(1.0)),
            ratio_to_f64(&BigUint::one(), &factorial(8))
        ) <= 1e-12
    );
    let b64 = [1, 2, 4, 8, 16, 32, 64];
    assert!(
        rel_err(
            gap_small_bound(&b64, 48, r(1.0)),
            ratio_to_f64(&BigUint::one(), &factorial(16))
        ) <= 1e-12
    );
}

#[test]
fn witness_bounds_match_integer_oracle() {
    let radii = [r(1.0), r(2.0), r(3.0)];
    let w = semi_irregular_gap_witness(1, &default_gap_blocks(), &radii, 1e-6, 0.9).unwrap();
    for s in &w.small_checkpoints {
        for (i, radius) in [1u32, 2, 3].into_iter().enumerate() {
            assert!(
                rel_err(
                    s.upper_bounds[i],
                    gap_small_bound_exact(&default_gap_blocks(), s.k as u32, radius)
                ) <= 1e-12
            );
        }
    }
}

#[test]
fn constant_term_after_last_block() {
    // ∂^32 of Σ_{m <= 32} z^m/m! leaves exactly the constant 32!/32! = 1
    let f = gap_series(&[1, 2, 4, 8, 16, 32], 1).unwrap();
    let g = ConvolutionSymbol::derivative(1).iterate_apply(&f, 32);
    assert_eq!(g.len(), 1);
    assert!((g.evaluate(&[]).re - 1.0).abs() <= 1e-12);
}

#[test]
fn hand_orbit_of_square() {
    let f = TruncatedEntireFunction::monomial(MultiIndex::new([(1, 2)]).unwrap(), Complex64::new(1.0, 0.0));
    let trace = orbit_trace(&ConvolutionSymbol::derivative(1), &f, 3, &[r(1.0)]).unwrap();
    let majorants: Vec<f64> = trace.records.iter().map(|rec| rec.majorant[0]).collect();
    assert_eq!(majorants, vec![1.0, 2.0, 2.0, 0.0]);
    assert_eq!(trace.to_csv().lines().count(), 5);
}

#[test]
fn traces_are_byte_stable() {
    let f = gap_series(&default_gap_blocks(), 1).unwrap();
    let l = ConvolutionSymbol::derivative(1);
    let a = orbit_trace(&l, &f, 40, &[r(1.0), r(2.5)]).unwrap().to_csv();
    let b = orbit_trace(&l, &f, 40, &[r(1.0), r(2.5)]).unwrap().to_csv();
    assert_eq!(a, b);
    assert!(a.starts_with("k,essential_dim,eval0_re,eval0_im,majorant_r1,gridsup_r1,majorant_r2.5,gridsup_r2.5\n"));
    let empty = orbit_trace(&l, &f, 0, &[r(1.0)]).unwrap().to_csv();
    assert_eq!(empty.lines().count(), 2);
}
