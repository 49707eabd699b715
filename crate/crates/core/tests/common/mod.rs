//! Exact-arithmetic oracles shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Nearest `f64` to `num / den` (both non-zero), via a 128-bit quotient.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = 128 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    // two half-steps keep the scale factor out of the subnormal range
    let half = (shift / 2) as i32;
    q.to_f64().unwrap() * 2f64.powi(-half) * 2f64.powi(half - shift as i32)
}

/// `Σ_{m_i > k} r^{m_i − k} / (m_i − k)!` for integer `r`, exactly.
pub fn gap_small_bound_exact(blocks: &[u32], k: u32, r: u32) -> f64 {
    let gaps: Vec<u32> = blocks.iter().filter(|&&m| m > k).map(|&m| m - k).collect();
    let Some(&top) = gaps.iter().max() else {
        return 0.0;
    };
    let den = factorial(top);
    let num = gaps.iter().fold(BigUint::zero(), |acc, &a| {
        acc + BigUint::from(r).pow(a) * (&den / factorial(a))
    });
    ratio_to_f64(&num, &den)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
