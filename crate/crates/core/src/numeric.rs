//! Factorial-scale scalar helpers.
//!
//! Everything here works in log space or through multiplicative recurrences;
//! raw factorial quotients overflow long before the coefficients they
//! describe underflow.

/// Largest `m` with `1/m!` a normal double.
pub const MAX_FACTORIAL_ARG: u32 = 170;

/// `ln(n!)` by direct summation.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).fold(0.0, |a, b| a + b)
}

/// `1/n!` by repeated division, about `n/2` ulps at worst. Underflows to 0
/// past [`MAX_FACTORIAL_ARG`].
pub fn inv_factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc / f64::from(k))
}

/// `s^m / m!` for `s >= 0`, with `0^0 = 1`.
pub fn power_over_factorial(s: f64, m: u32) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if s == 0.0 {
        return 0.0;
    }
    // the running product peaks near e^s
    if s <= 500.0 {
        return (1..=m).fold(1.0, |acc, k| acc * (s / f64::from(k)));
    }
    (f64::from(m) * s.ln() - ln_factorial(m)).exp()
}

/// `Σ_{m=lo}^{hi} s^m/m!` for `s >= 0`.
pub fn exp_partial_range(s: f64, lo: u32, hi: u32) -> f64 {
    (lo..=hi).map(|m| power_over_factorial(s, m)).fold(0.0, |a, b| a + b)
}

/// Exponential tail `Σ_{m > degree} s^m/m!` for `s >= 0`.
///
/// Summed term by term from `m = degree + 1` (no cancellation against
/// `exp(s)`), stopping once the terms are decreasing and below the
/// running sum's resolution.
pub fn exp_tail(s: f64, degree: u32) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let ln_s = s.ln();
    let mut ln_fact = ln_factorial(degree);
    let mut sum = 0.0;
    let mut m = degree;
    loop {
        m += 1;
        ln_fact += f64::from(m).ln();
        let term = (f64::from(m) * ln_s - ln_fact).exp();
        sum += term;
        let decreasing = f64::from(m) > s;
        if decreasing && (term <= sum * 1e-17 || term == 0.0) {
            break;
        }
        if m == u32::MAX {
            break;
        }
    }
    sum
}

/// Multiplicative falling factorial `a (a-1) ... (a-b+1)` as a double.
pub fn falling_factorial(a: u32, b: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..b {
        acc *= f64::from(a - i);
    }
    acc
}

/// Binomial coefficient `C(n, k)` through the multiplicative recurrence.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc.round()
}

/// Relative comparison helper: `|a - b| <= tol * max(|a|, |b|)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
