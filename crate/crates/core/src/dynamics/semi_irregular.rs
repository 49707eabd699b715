use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::orbit::{trace_of_orbit, DEFAULT_GRID_SAMPLES};
use crate::convolution::ConvolutionSymbol;
use crate::cylinder::{embed, CylinderIndex};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numeric::power_over_factorial;
use crate::series::json::complex_pairs;
use crate::series::{gap_series, linear_combine, Radius, TruncatedEntireFunction};

/// Relative slack allowed between a stored closed-form bound and the value
/// recomputed from the floating-point orbit.
pub const VALIDATION_RTOL: f64 = 1e-10;

/// Checkpoint where the orbit is provably small: `p_r(L^k f) <= upper_bounds[r]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallCheckpoint {
    pub k: usize,
    pub upper_bounds: Vec<f64>,
}

/// Checkpoint where the orbit is provably large: `|(L^k f)(point)| >= lower_bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigCheckpoint {
    pub k: usize,
    #[serde(with = "complex_pairs")]
    pub point: Vec<Complex64>,
    pub lower_bound: f64,
}

/// Finite evidence that `f` is semi-irregular for `operator`: along the
/// orbit, iterates below `eps` (in every listed seminorm) alternate with
/// iterates whose value at a point exceeds `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiIrregularityWitness {
    pub operator: ConvolutionSymbol,
    pub function: TruncatedEntireFunction,
    pub cylinder: usize,
    pub radii: Vec<Radius>,
    pub small_checkpoints: Vec<SmallCheckpoint>,
    pub big_checkpoints: Vec<BigCheckpoint>,
    pub eps: f64,
    pub delta: f64,
}

/// Outcome of recomputing a witness's orbit and comparing it with the
/// stored bounds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessValidation {
    pub invariants: std::result::Result<(), String>,
    /// `p_r(L^k f)` at each small checkpoint, per radius.
    pub observed_small: Vec<Vec<f64>>,
    /// `|(L^k f)(point)|` at each big checkpoint.
    pub observed_big: Vec<f64>,
    pub bounds_hold: bool,
}

impl WitnessValidation {
    pub fn is_valid(&self) -> bool {
        self.invariants.is_ok() && self.bounds_hold
    }
}

impl SemiIrregularityWitness {
    /// Structural invariants: thresholds respected, both lists non-empty,
    /// strictly increasing and disjoint, and consecutive small checkpoints
    /// separated by a big one.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.small_checkpoints.is_empty() || self.big_checkpoints.is_empty() {
            return Err("witness needs small and big checkpoints".into());
        }
        for s in &self.small_checkpoints {
            if s.upper_bounds.len() != self.radii.len() {
                return Err(format!(
                    "small checkpoint {} has {} bounds for {} radii",
                    s.k,
                    s.upper_bounds.len(),
                    self.radii.len()
                ));
            }
            if let Some(b) = s.upper_bounds.iter().find(|&&b| b.is_nan() || b >= self.eps) {
                return Err(format!(
                    "small checkpoint {} bound {b:e} not below eps {:e}",
                    s.k, self.eps
                ));
            }
        }
        if let Some(b) = self
            .big_checkpoints
            .iter()
            .find(|b| b.lower_bound.is_nan() || b.lower_bound <= self.delta)
        {
            return Err(format!(
                "big checkpoint {} bound {} not above delta {}",
                b.k, b.lower_bound, self.delta
            ));
        }
        let small: Vec<usize> = self.small_checkpoints.iter().map(|s| s.k).collect();
        let big: Vec<usize> = self.big_checkpoints.iter().map(|b| b.k).collect();
        if small.windows(2).any(|w| w[0] >= w[1]) || big.windows(2).any(|w| w[0] >= w[1]) {
            return Err("checkpoints must be strictly increasing".into());
        }
        if small.iter().any(|k| big.binary_search(k).is_ok()) {
            return Err("a checkpoint cannot be both small and big".into());
        }
        for w in small.windows(2) {
            if !big.iter().any(|&b| w[0] < b && b < w[1]) {
                return Err(format!(
                    "no big checkpoint between small checkpoints {} and {}",
                    w[0], w[1]
                ));
            }
        }
        Ok(())
    }

    /// Recomputes the orbit up to the last checkpoint and checks every stored
    /// bound against it (up to [`VALIDATION_RTOL`]).
    pub fn validate(&self) -> WitnessValidation {
        let invariants = self.check_invariants();
        let last = self
            .small_checkpoints
            .iter()
            .map(|s| s.k)
            .chain(self.big_checkpoints.iter().map(|b| b.k))
            .max()
            .unwrap_or(0);
        let orbit = self.operator.orbit(&self.function, last);
        let observed_small: Vec<Vec<f64>> = self
            .small_checkpoints
            .iter()
            .map(|s| self.radii.iter().map(|&r| orbit[s.k].majorant(r)).collect())
            .collect();
        let observed_big: Vec<f64> = self
            .big_checkpoints
            .iter()
            .map(|b| orbit[b.k].evaluate(&b.point).norm())
            .collect();
        let small_ok = self.small_checkpoints.iter().zip(&observed_small).all(|(s, obs)| {
            s.upper_bounds
                .iter()
                .zip(obs)
                .all(|(&b, &o)| o <= b * (1.0 + VALIDATION_RTOL) + f64::MIN_POSITIVE)
        });
        let big_ok = self
            .big_checkpoints
            .iter()
            .zip(&observed_big)
            .all(|(b, &o)| o >= b.lower_bound * (1.0 - VALIDATION_RTOL));
        WitnessValidation {
            invariants,
            observed_small,
            observed_big,
            bounds_hold: small_ok && big_ok,
        }
    }

    /// Witness for `c·f`: bounds and thresholds scale by `|c|`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let s = c.norm();
        Self {
            operator: self.operator.clone(),
            function: self.function.scaled(c),
            cylinder: self.cylinder,
            radii: self.radii.clone(),
            small_checkpoints: self
                .small_checkpoints
                .iter()
                .map(|p| SmallCheckpoint {
                    k: p.k,
                    upper_bounds: p.upper_bounds.iter().map(|b| b * s).collect(),
                })
                .collect(),
            big_checkpoints: self
                .big_checkpoints
                .iter()
                .map(|p| BigCheckpoint {
                    k: p.k,
                    point: p.point.clone(),
                    lower_bound: p.lower_bound * s,
                })
                .collect(),
            eps: self.eps * s,
            delta: self.delta * s,
        }
    }
}

/// `p_r(∂^k f) <= Σ_{m_i > k} r^{m_i − k}/(m_i − k)!` for the gap series
/// `f = Σ z^{m_i}/m_i!` (equality in exact arithmetic).
pub fn gap_small_bound(blocks: &[u32], k: usize, r: Radius) -> f64 {
    blocks
        .iter()
        .filter(|&&m| m as usize > k)
        .map(|&m| power_over_factorial(r.get(), m - k as u32))
        .fold(0.0, |a, b| a + b)
}

/// Candidate checkpoints for a gap series: big at each block `m_i`, small
/// at the midpoint `⌊(m_i + m_{i+1})/2⌋` of each gap and at `m_J + ⌊m_J/2⌋`
/// after the last block. For blocks `2^i` the small ones are `3·2^{i−1}`.
pub fn gap_checkpoint_candidates(blocks: &[u32]) -> (Vec<usize>, Vec<usize>) {
    let big = blocks.iter().map(|&m| m as usize).collect();
    let mut small = Vec::new();
    for (i, &m) in blocks.iter().enumerate() {
        let next = blocks.get(i + 1).copied();
        let k = match next {
            Some(n) => (m + n) / 2,
            None => m + m / 2,
        };
        if k > m && next.is_none_or(|n| k < n) {
            small.push(k as usize);
        }
    }
    (big, small)
}

/// Semi-irregularity witness for `∂_var` and the gap series on `blocks`.
///
/// Big checkpoints sit at `k = m_i`: the constant term of `∂^{m_i} f` comes
/// from the block `m_i` alone and equals `m_i!/m_i! = 1`, so the value at 0
/// is exactly 1. Small checkpoints carry [`gap_small_bound`] per radius;
/// only candidates below `eps` for every radius are kept.
pub fn semi_irregular_gap_witness(
    var: usize,
    blocks: &[u32],
    radii: &[Radius],
    eps: f64,
    delta: f64,
) -> Result<SemiIrregularityWitness> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("witness needs at least one radius".into()));
    }
    if !(eps > 0.0 && delta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "thresholds must be positive (eps {eps}, delta {delta})"
        )));
    }
    let function = gap_series(blocks, var)?;
    let (big, small) = gap_checkpoint_candidates(blocks);
    let big_checkpoints: Vec<BigCheckpoint> = big
        .into_iter()
        .map(|k| BigCheckpoint {
            k,
            point: vec![Complex64::new(0.0, 0.0); var],
            lower_bound: 1.0,
        })
        .filter(|b| b.lower_bound > delta)
        .collect();
    let small_checkpoints: Vec<SmallCheckpoint> = small
        .into_iter()
        .map(|k| SmallCheckpoint {
            k,
            upper_bounds: radii.iter().map(|&r| gap_small_bound(blocks, k, r)).collect(),
        })
        .filter(|s| s.upper_bounds.iter().all(|&b| b < eps))
        .collect();
    let witness = SemiIrregularityWitness {
        operator: ConvolutionSymbol::derivative(var),
        function,
        cylinder: var,
        radii: radii.to_vec(),
        small_checkpoints,
        big_checkpoints,
        eps,
        delta,
    };
    witness.check_invariants().map_err(Error::InvalidInput)?;
    Ok(witness)
}

/// Transfers a witness for `L_n` on the cylinder `n` to `L` on the full
/// space. Since `L^k(f_n∘π_n) = (L_n^k f_n)∘π_n` the coefficient tables,
/// and therefore every bound, are unchanged.
pub fn lift_semi_irregular(
    witness: &SemiIrregularityWitness,
    l: &ConvolutionSymbol,
    n: CylinderIndex,
) -> Result<SemiIrregularityWitness> {
    let embedded = embed(&witness.function, n)?;
    if l.associated_operator(n) != witness.operator {
        return Err(Error::AssociatedMismatch {
            operator: l.label().to_string(),
            witness: witness.operator.label().to_string(),
            n: n.get(),
        });
    }
    Ok(SemiIrregularityWitness {
        operator: l.clone(),
        function: embedded.function,
        cylinder: n.get(),
        ..witness.clone()
    })
}

/// Horizon-bounded verdict on whether `(x, y)` is proximal and/or
/// asymptotic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairVerdict {
    pub horizon: usize,
    /// Some `k <= horizon` has `max_r p_r(L^k(x − y)) < eps`.
    pub proximal_observed: bool,
    pub proximal_ks: Vec<usize>,
    /// Every iterate from `first_stable_index` to the horizon is below `eps`.
    pub asymptotic_observed: bool,
    pub first_stable_index: Option<usize>,
    /// Iterate with `|L^k(x − y)(0)| > delta` past every small iterate.
    pub refutation_k: Option<usize>,
    pub note: String,
}

impl PairVerdict {
    pub fn asymptotic_refuted(&self) -> bool {
        self.refutation_k.is_some()
    }
}

#[allow(clippy::too_many_arguments)]
pub fn proximal_asymptotic_check(
    l: &ConvolutionSymbol,
    x: &TruncatedEntireFunction,
    y: &TruncatedEntireFunction,
    horizon: usize,
    radii: &[Radius],
    eps: f64,
    delta: f64,
) -> Result<PairVerdict> {
    if horizon < 1 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    if radii.is_empty() {
        return Err(Error::InvalidInput("at least one radius is required".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let diff = linear_combine(&[(one, x), (-one, y)])?;
    let orbit = l.orbit(&diff, horizon);
    let small: Vec<bool> = orbit
        .iter()
        .map(|g| radii.iter().map(|&r| g.majorant(r)).fold(0.0, f64::max) < eps)
        .collect();
    let big: Vec<bool> = orbit.iter().map(|g| g.evaluate(&[]).norm() > delta).collect();

    let proximal_ks: Vec<usize> = (0..=horizon).filter(|&k| small[k]).collect();
    let first_stable_index = if small[horizon] {
        Some((0..=horizon).rev().take_while(|&k| small[k]).last().unwrap())
    } else {
        None
    };
    let last_small = proximal_ks.last().copied();
    let refutation_k = (0..=horizon)
        .rev()
        .find(|&k| big[k])
        .filter(|&k| last_small.is_none_or(|s| k > s));
    Ok(PairVerdict {
        horizon,
        proximal_observed: !proximal_ks.is_empty(),
        proximal_ks,
        asymptotic_observed: first_stable_index.is_some(),
        first_stable_index,
        refutation_k,
        note: format!("horizon-bounded evidence over k = 0..={horizon}"),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetectorDiagnostics {
    pub min_majorant: f64,
    pub max_lower_bound: f64,
    pub monotone_growth: bool,
    pub monotone_decay: bool,
    pub reason: String,
}

/// Empirical semi-irregularity verdict over a finite horizon.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Detection {
    Observed { small_ks: Vec<usize>, big_ks: Vec<usize> },
    NotObserved(DetectorDiagnostics),
}

impl Detection {
    pub fn is_observed(&self) -> bool {
        matches!(self, Detection::Observed { .. })
    }
}

/// `Observed` iff some iterate has every-radius majorant below `eps` and a
/// later iterate has a lower bound (point value at 0 or torus-grid
/// maximum) above `delta`. A heuristic bounded by the horizon.
pub fn semi_irregularity_detector(
    l: &ConvolutionSymbol,
    f: &TruncatedEntireFunction,
    horizon: usize,
    radii: &[Radius],
    eps: f64,
    delta: f64,
) -> Result<Detection> {
    if horizon < 1 {
        return Err(Error::InvalidInput("horizon must be at least 1".into()));
    }
    if eps.is_nan() || delta.is_nan() || eps >= delta {
        return Err(Error::InvalidInput(format!(
            "eps ({eps}) must be below delta ({delta})"
        )));
    }
    if radii.is_empty() {
        return Err(Error::InvalidInput("at least one radius is required".into()));
    }
    let orbit = l.orbit(f, horizon);
    let trace = trace_of_orbit(l.label(), &orbit, radii, DEFAULT_GRID_SAMPLES, Execution::default());
    let majorants = trace.max_majorants();
    let lower: Vec<f64> = trace
        .records
        .iter()
        .map(|r| r.grid_sup.iter().copied().fold(r.eval_at_zero.norm(), f64::max))
        .collect();

    let small_ks: Vec<usize> = (0..=horizon).filter(|&k| majorants[k] < eps).collect();
    if let Some(&first) = small_ks.first() {
        let big_ks: Vec<usize> = (first + 1..=horizon).filter(|&k| lower[k] > delta).collect();
        if !big_ks.is_empty() {
            return Ok(Detection::Observed { small_ks, big_ks });
        }
    }
    let reason = if small_ks.is_empty() {
        "no iterate fell below eps within the horizon".to_string()
    } else {
        "no iterate exceeded delta after the first small iterate".to_string()
    };
    Ok(Detection::NotObserved(DetectorDiagnostics {
        min_majorant: majorants.iter().copied().fold(f64::INFINITY, f64::min),
        max_lower_bound: lower.iter().copied().fold(0.0, f64::max),
        monotone_growth: majorants.windows(2).all(|w| w[1] >= w[0]),
        monotone_decay: majorants.windows(2).all(|w| w[1] <= w[0]),
        reason,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::default_gap_blocks;

    fn r(x: f64) -> Radius {
        Radius::new(x).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn candidates_for_powers_of_two() {
        let (big, small) = gap_checkpoint_candidates(&default_gap_blocks());
        assert_eq!(big, vec![1, 2, 4, 8, 16, 32, 64, 128]);
        assert_eq!(small, vec![3, 6, 12, 24, 48, 96, 192]);
        let (_, small) = gap_checkpoint_candidates(&[1, 2, 10]);
        assert_eq!(small, vec![6, 15]);
    }

    #[test]
    fn small_bound_examples() {
        let b = [1, 2, 4, 8, 16, 32];
        assert!((gap_small_bound(&b, 24, r(1.0)) - 2.480_158_730_158_73e-5).abs() < 1e-17);
        let b = [1, 2, 4, 8, 16, 32, 64];
        assert!((gap_small_bound(&b, 48, r(1.0)) / 4.779_477_332_387_385e-14 - 1.0).abs() < 1e-12);
        assert_eq!(gap_small_bound(&b, 64, r(3.0)), 0.0);
    }

    #[test]
    fn default_witness() {
        let w = semi_irregular_gap_witness(1, &default_gap_blocks(), &[r(1.0)], 1e-6, 0.9).unwrap();
        let smalls: Vec<usize> = w.small_checkpoints.iter().map(|s| s.k).collect();
        assert_eq!(smalls, vec![48, 96, 192]);
        assert_eq!(w.big_checkpoints.len(), 8);
        let v = w.validate();
        assert!(v.is_valid(), "{v:?}");
        // constant term after 32 derivatives
        let idx = w.big_checkpoints.iter().position(|b| b.k == 32).unwrap();
        assert!((v.observed_big[idx] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_errors() {
        assert!(matches!(
            semi_irregular_gap_witness(1, &[1, 200], &[r(1.0)], 1e-6, 0.9),
            Err(Error::BlockTooLarge(200))
        ));
        assert!(semi_irregular_gap_witness(1, &[1], &[r(1.0)], 1e-6, 0.9).is_err());
        let short = semi_irregular_gap_witness(1, &[1, 2], &[r(1.0)], 1e-6, 0.9).unwrap();
        assert_eq!(short.small_checkpoints[0].k, 3);
        assert!(semi_irregular_gap_witness(1, &default_gap_blocks(), &[], 1e-6, 0.9).is_err());
        assert!(semi_irregular_gap_witness(1, &default_gap_blocks(), &[r(1.0)], 1e-6, 1.0).is_err());
    }

    #[test]
    fn lifting() {
        let w = semi_irregular_gap_witness(1, &default_gap_blocks(), &[r(1.0), r(2.0)], 1e-6, 0.9).unwrap();
        let n1 = CylinderIndex::new(1).unwrap();
        let l = ConvolutionSymbol::derivative(1).plus(&ConvolutionSymbol::derivative(2));
        let lifted = lift_semi_irregular(&w, &l, n1).unwrap();
        assert_eq!(lifted.small_checkpoints, w.small_checkpoints);
        assert_eq!(lifted.big_checkpoints, w.big_checkpoints);
        assert_eq!(lifted.operator, l);
        assert!(lifted.validate().is_valid());

        assert_eq!(
            lift_semi_irregular(&w, &ConvolutionSymbol::derivative(1), n1).unwrap(),
            w
        );
        assert!(matches!(
            lift_semi_irregular(&w, &ConvolutionSymbol::derivative(2), n1),
            Err(Error::AssociatedMismatch { .. })
        ));
    }

    #[test]
    fn pair_checks() {
        let x = crate::series::exp_function(&[c(0.3)], 5);
        let v = proximal_asymptotic_check(&ConvolutionSymbol::derivative(1), &x, &x, 4, &[r(1.0)], 1e-6, 0.9).unwrap();
        assert!(v.proximal_observed && v.asymptotic_observed);
        assert_eq!(v.proximal_ks[0], 0);
        assert_eq!(v.first_stable_index, Some(0));

        let one = TruncatedEntireFunction::constant(c(1.0));
        let zero = TruncatedEntireFunction::zero();
        let v = proximal_asymptotic_check(
            &ConvolutionSymbol::scalar(c(2.0)),
            &one,
            &zero,
            20,
            &[r(1.0)],
            1e-6,
            0.9,
        )
        .unwrap();
        assert!(!v.proximal_observed && !v.asymptotic_observed);
        assert_eq!(v.refutation_k, Some(20));

        let g = gap_series(&default_gap_blocks(), 1).unwrap();
        let v =
            proximal_asymptotic_check(&ConvolutionSymbol::derivative(1), &g, &zero, 128, &[r(1.0)], 1e-6, 0.9).unwrap();
        assert!(v.proximal_observed);
        assert!(v.asymptotic_refuted());
        assert_eq!(v.refutation_k, Some(128));
        assert!(!v.asymptotic_observed);
    }

    #[test]
    fn detector() {
        let g = gap_series(&default_gap_blocks(), 1).unwrap();
        let d = semi_irregularity_detector(&ConvolutionSymbol::derivative(1), &g, 64, &[r(1.0)], 1e-6, 0.9).unwrap();
        assert!(d.is_observed(), "{d:?}");

        let f = &TruncatedEntireFunction::variable(1) + &TruncatedEntireFunction::constant(c(1.0));
        let d = semi_irregularity_detector(&ConvolutionSymbol::scalar(c(2.0)), &f, 64, &[r(1.0)], 1e-6, 0.9).unwrap();
        match d {
            Detection::NotObserved(diag) => assert!(diag.monotone_growth),
            other => panic!("{other:?}"),
        }
        let d = semi_irregularity_detector(&ConvolutionSymbol::scalar(c(0.5)), &f, 64, &[r(1.0)], 1e-6, 0.9).unwrap();
        match d {
            Detection::NotObserved(diag) => assert!(diag.monotone_decay),
            other => panic!("{other:?}"),
        }
        assert!(semi_irregularity_detector(&ConvolutionSymbol::identity(), &f, 4, &[r(1.0)], 1.0, 0.5).is_err());
    }
}
