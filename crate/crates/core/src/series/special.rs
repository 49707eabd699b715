use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{ExponentialTail, GapTail, MultiIndex, TailDescriptor, TruncatedEntireFunction};
use crate::error::{Error, Result};
use crate::numeric::{inv_factorial, MAX_FACTORIAL_ARG};

/// Truncation at degree `degree` of `e_λ(z) = exp(Σ_j λ_j z_j)`, with an
/// exponential tail descriptor.
///
/// Coefficients are `λ^α/α!`, built from per-variable tables
/// `t_j[e] = λ_j^e/e!` via `t_j[e] = t_j[e-1]·λ_j/e`.
pub fn exp_function(lambda: &[Complex64], degree: u32) -> TruncatedEntireFunction {
    let active: Vec<(usize, Vec<Complex64>)> = lambda
        .iter()
        .enumerate()
        .filter(|(_, l)| **l != Complex64::new(0.0, 0.0))
        .map(|(j, &l)| {
            let mut table = Vec::with_capacity(degree as usize + 1);
            table.push(Complex64::new(1.0, 0.0));
            for e in 1..=degree {
                let prev = table[e as usize - 1];
                table.push(prev * l / f64::from(e));
            }
            (j + 1, table)
        })
        .collect();

    let mut terms = BTreeMap::new();
    let mut exps = vec![0u32; active.len()];
    enumerate_bounded(&mut exps, 0, degree, &mut |exps| {
        let mut coeff = Complex64::new(1.0, 0.0);
        for (slot, &e) in exps.iter().enumerate() {
            coeff *= active[slot].1[e as usize];
        }
        let index = MultiIndex::new(active.iter().zip(exps).map(|((v, _), &e)| (*v, e))).expect("variables are >= 1");
        terms.insert(index, coeff);
    });

    let tail = TailDescriptor::Exponential(vec![ExponentialTail {
        lambda: lambda.to_vec(),
        degree,
        weight: 1.0,
    }]);
    TruncatedEntireFunction::from_map(terms, degree).with_tail(Some(tail))
}

fn enumerate_bounded(exps: &mut [u32], slot: usize, budget: u32, visit: &mut impl FnMut(&[u32])) {
    if slot == exps.len() {
        visit(exps);
        return;
    }
    for e in 0..=budget {
        exps[slot] = e;
        enumerate_bounded(exps, slot + 1, budget - e, visit);
    }
    exps[slot] = 0;
}

/// Blocks `1, 2, 4, …, 128`.
pub fn default_gap_blocks() -> Vec<u32> {
    (0..=7).map(|i| 1 << i).collect()
}

/// Lacunary series `Σ_i z_var^{m_i} / m_i!` over strictly increasing
/// positive blocks `m_0 < … < m_J`, with `m_J <= 170`.
pub fn gap_series(blocks: &[u32], var: usize) -> Result<TruncatedEntireFunction> {
    if var == 0 {
        return Err(Error::InvalidInput("variables are numbered from 1".into()));
    }
    if blocks.is_empty() {
        return Err(Error::InvalidInput("gap series needs at least one block".into()));
    }
    if blocks[0] == 0 || blocks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!(
            "gap blocks must be strictly increasing positive integers, got {blocks:?}"
        )));
    }
    let last = *blocks.last().unwrap();
    if last > MAX_FACTORIAL_ARG {
        return Err(Error::BlockTooLarge(last));
    }
    let terms = blocks
        .iter()
        .map(|&m| {
            (
                MultiIndex::new([(var, m)]).unwrap(),
                Complex64::new(inv_factorial(m), 0.0),
            )
        })
        .collect();
    let tail = TailDescriptor::Gap(vec![GapTail {
        blocks: blocks.to_vec(),
        degree: last,
        weight: 1.0,
    }]);
    Ok(TruncatedEntireFunction::from_map(terms, last).with_tail(Some(tail)))
}
