use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convolution::ConvolutionSymbol;
use crate::cylinder::coefficient_functional;
use crate::error::{Error, Result};
use crate::series::json::complex_pair;
use crate::series::{MultiIndex, TruncatedEntireFunction};

/// The orbit of `f` stays in the cylinder of its essential dimension `n`,
/// so the coefficient functional at `e_{n+1}` annihilates the span of the
/// orbit while taking the value 1 on `z_{n+1}`: the span is not dense.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonCyclicityCertificate {
    pub operator: ConvolutionSymbol,
    pub function: TruncatedEntireFunction,
    pub n: usize,
    pub annihilator_index: MultiIndex,
    pub witness: TruncatedEntireFunction,
    #[serde(with = "complex_pair")]
    pub witness_value: Complex64,
    pub horizon_checked: usize,
    pub max_abs_functional_on_orbit: f64,
    pub max_orbit_essential_dim: usize,
    pub orbit: Vec<TruncatedEntireFunction>,
}

impl NonCyclicityCertificate {
    pub fn is_valid(&self) -> bool {
        self.max_abs_functional_on_orbit == 0.0
            && self.witness_value == Complex64::new(1.0, 0.0)
            && self.max_orbit_essential_dim <= self.n
    }
}

pub fn non_cyclicity_certificate(
    l: &ConvolutionSymbol,
    f: &TruncatedEntireFunction,
    horizon: usize,
) -> NonCyclicityCertificate {
    let n = f.essential_dimension();
    let annihilator_index = MultiIndex::unit(n + 1);
    let witness = TruncatedEntireFunction::variable(n + 1);
    let orbit = l.orbit(f, horizon);
    let max_abs_functional_on_orbit = orbit
        .iter()
        .map(|g| coefficient_functional(g, &annihilator_index).norm())
        .fold(0.0, f64::max);
    let max_orbit_essential_dim = orbit.iter().map(|g| g.essential_dimension()).max().unwrap_or(0);
    NonCyclicityCertificate {
        operator: l.clone(),
        function: f.clone(),
        n,
        witness_value: coefficient_functional(&witness, &annihilator_index),
        annihilator_index,
        witness,
        horizon_checked: horizon,
        max_abs_functional_on_orbit,
        max_orbit_essential_dim,
        orbit,
    }
}

/// Re-checks a certificate from its serialized orbit only: the orbit starts
/// at `function`, consecutive elements are related by the operator, every
/// element is annihilated and lives in cylinder `n`, and the witness is
/// separated.
pub fn verify_non_cyclicity(cert: &NonCyclicityCertificate) -> bool {
    let idx = &cert.annihilator_index;
    cert.orbit.len() == cert.horizon_checked + 1
        && cert.orbit.first().is_some_and(|g| g.same_terms(&cert.function))
        && cert
            .orbit
            .windows(2)
            .all(|w| cert.operator.apply(&w[0]).same_terms(&w[1]))
        && *idx == MultiIndex::unit(cert.n + 1)
        && cert
            .orbit
            .iter()
            .all(|g| g.coefficient(idx) == Complex64::new(0.0, 0.0))
        && cert.orbit.iter().all(|g| g.essential_dimension() <= cert.n)
        && cert.witness.coefficient(idx) == Complex64::new(1.0, 0.0)
}

/// The orbit of `V = span{g_1..g_r}` stays in the cylinder `m` (the largest
/// essential dimension of a generator). Checking the generators suffices:
/// `L^k(V) = span{L^k g_i}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubspaceConfinementCertificate {
    pub operator: ConvolutionSymbol,
    pub generators: Vec<TruncatedEntireFunction>,
    pub rank: usize,
    pub m: usize,
    pub annihilator_index: MultiIndex,
    pub witness: TruncatedEntireFunction,
    pub horizon_checked: usize,
    pub max_abs_functional_on_orbit: f64,
    pub max_orbit_essential_dim: usize,
    pub justification: String,
}

impl SubspaceConfinementCertificate {
    pub fn is_valid(&self) -> bool {
        self.max_abs_functional_on_orbit == 0.0
            && self.max_orbit_essential_dim <= self.m
            && self.rank == self.generators.len()
            && self.witness.coefficient(&self.annihilator_index) == Complex64::new(1.0, 0.0)
    }
}

/// Rank of the generators' coefficient matrix by Gaussian elimination with
/// partial pivoting. A pivot counts as soon as it is not exactly zero.
pub(crate) fn coefficient_rank(generators: &[TruncatedEntireFunction]) -> usize {
    let mut columns: Vec<&MultiIndex> = generators.iter().flat_map(|g| g.terms().keys()).collect();
    columns.sort();
    columns.dedup();
    let mut rows: Vec<Vec<Complex64>> = generators
        .iter()
        .map(|g| columns.iter().map(|k| g.coefficient(k)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..columns.len() {
        if rank == rows.len() {
            break;
        }
        let pivot = (rank..rows.len())
            .max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm()))
            .unwrap();
        if rows[pivot][col] == Complex64::new(0.0, 0.0) {
            continue;
        }
        rows.swap(rank, pivot);
        let head = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let factor = row[col] / head[col];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (x, h) in row.iter_mut().zip(&head).skip(col) {
                *x -= factor * h;
            }
            row[col] = Complex64::new(0.0, 0.0);
        }
        rank += 1;
    }
    rank
}

pub fn subspace_orbit_certificate(
    l: &ConvolutionSymbol,
    generators: &[TruncatedEntireFunction],
    horizon: usize,
) -> Result<SubspaceConfinementCertificate> {
    if generators.is_empty() {
        return Err(Error::InvalidInput(
            "subspace certificate needs at least one generator".into(),
        ));
    }
    let rank = coefficient_rank(generators);
    if rank < generators.len() {
        return Err(Error::DependentGenerators {
            rank,
            count: generators.len(),
        });
    }
    let m = generators.iter().map(|g| g.essential_dimension()).max().unwrap();
    let annihilator_index = MultiIndex::unit(m + 1);
    let mut max_abs: f64 = 0.0;
    let mut max_dim = 0;
    for g in generators {
        let mut h = g.clone();
        for k in 0..=horizon {
            if k > 0 {
                h = l.apply(&h);
            }
            max_abs = max_abs.max(h.coefficient(&annihilator_index).norm());
            max_dim = max_dim.max(h.essential_dimension());
        }
    }
    Ok(SubspaceConfinementCertificate {
        operator: l.clone(),
        generators: generators.to_vec(),
        rank,
        m,
        witness: TruncatedEntireFunction::variable(m + 1),
        annihilator_index,
        horizon_checked: horizon,
        max_abs_functional_on_orbit: max_abs,
        max_orbit_essential_dim: max_dim,
        justification: format!(
            "L^k(V) = span{{L^k g_i}}; each L^k g_i (k <= {horizon}) lies in cylinder {m}, \
             hence so does every element of L^k(V), and the coefficient of z{} vanishes on all of them",
            m + 1
        ),
    })
}
