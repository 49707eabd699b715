use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::semi_irregular::{SemiIrregularityWitness, WitnessValidation};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::json::complex_pair;
use crate::series::TruncatedEntireFunction;

/// Admissible range of `|α − λ|`.
pub const SCALE_RANGE: (f64, f64) = (1e-6, 1e6);

/// `(αf, λf)` is a Li–Yorke pair: the orbit of `(α − λ)f` has iterates
/// below `eps` infinitely often yet keeps returning above `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiYorkePairCertificate {
    #[serde(with = "complex_pair")]
    pub alpha: Complex64,
    #[serde(with = "complex_pair")]
    pub lambda: Complex64,
    /// `|α − λ|`.
    pub scale: f64,
    pub base_function: TruncatedEntireFunction,
    /// Witness for `(α − λ)f`.
    pub witness: SemiIrregularityWitness,
}

impl LiYorkePairCertificate {
    pub fn validate(&self) -> WitnessValidation {
        self.witness.validate()
    }

    pub fn is_valid(&self) -> bool {
        self.alpha != self.lambda
            && self
                .witness
                .function
                .same_terms(&self.base_function.scaled(self.alpha - self.lambda))
            && self.validate().is_valid()
    }
}

pub fn li_yorke_pair_certificate(
    witness: &SemiIrregularityWitness,
    alpha: Complex64,
    lambda: Complex64,
) -> Result<LiYorkePairCertificate> {
    if alpha == lambda {
        return Err(Error::EqualScalars);
    }
    let c = alpha - lambda;
    let scale = c.norm();
    if !(SCALE_RANGE.0..=SCALE_RANGE.1).contains(&scale) {
        return Err(Error::ScaleOutOfRange(scale));
    }
    Ok(LiYorkePairCertificate {
        alpha,
        lambda,
        scale,
        base_function: witness.function.clone(),
        witness: witness.scaled(c),
    })
}

/// Finite sample `{α_i f}` of the scrambled set `span{f}`, with a
/// certificate for every unordered pair `i < j`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScrambledFamily {
    pub scalars: Vec<f64>,
    pub pairs: Vec<LiYorkePairCertificate>,
}

impl ScrambledFamily {
    pub fn min_scale(&self) -> f64 {
        self.pairs.iter().map(|p| p.scale).fold(f64::INFINITY, f64::min)
    }

    /// Validity of each pair, in order.
    pub fn validate_with(&self, exec: Execution) -> Vec<bool> {
        exec.map(&self.pairs, LiYorkePairCertificate::is_valid)
    }

    pub fn all_valid(&self) -> bool {
        self.validate_with(Execution::default()).into_iter().all(|v| v)
    }
}

/// Scalars `α_i = 1 + (i − 1)/m` for `i = 1..=m`.
pub fn scrambled_family(witness: &SemiIrregularityWitness, m: usize) -> Result<ScrambledFamily> {
    scrambled_family_with(witness, m, Execution::default())
}

pub fn scrambled_family_with(witness: &SemiIrregularityWitness, m: usize, exec: Execution) -> Result<ScrambledFamily> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "scrambled family needs at least 2 members, got {m}"
        )));
    }
    let scalars: Vec<f64> = (0..m).map(|i| 1.0 + i as f64 / m as f64).collect();
    let index_pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let pairs = exec
        .map(&index_pairs, |&(i, j)| {
            li_yorke_pair_certificate(
                witness,
                Complex64::new(scalars[j], 0.0),
                Complex64::new(scalars[i], 0.0),
            )
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ScrambledFamily { scalars, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::semi_irregular_gap_witness;
    use crate::series::{default_gap_blocks, Radius};

    fn witness() -> SemiIrregularityWitness {
        let radii = [Radius::new(1.0).unwrap(), Radius::new(2.0).unwrap()];
        semi_irregular_gap_witness(1, &default_gap_blocks(), &radii, 1e-6, 0.9).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_difference_is_identity() {
        let w = witness();
        let cert = li_yorke_pair_certificate(&w, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(cert.witness, w);
        assert_eq!(cert.witness.small_checkpoints, w.small_checkpoints);
        assert!(cert.is_valid());
    }

    #[test]
    fn bounds_scale() {
        let w = witness();
        for (a, l) in [(c(3.0, 0.0), c(1.0, 0.0)), (c(0.0, 1.0), c(0.0, -1.0))] {
            let cert = li_yorke_pair_certificate(&w, a, l).unwrap();
            assert_eq!(cert.scale, 2.0);
            for (s, t) in cert.witness.small_checkpoints.iter().zip(&w.small_checkpoints) {
                for (x, y) in s.upper_bounds.iter().zip(&t.upper_bounds) {
                    assert_eq!(*x, 2.0 * y);
                }
            }
            assert!(cert.witness.big_checkpoints.iter().all(|b| b.lower_bound == 2.0));
            assert!(cert.is_valid());
        }
    }

    #[test]
    fn pair_errors() {
        let w = witness();
        assert!(matches!(
            li_yorke_pair_certificate(&w, c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::EqualScalars)
        ));
        assert!(matches!(
            li_yorke_pair_certificate(&w, c(1e7, 0.0), c(0.0, 0.0)),
            Err(Error::ScaleOutOfRange(_))
        ));
        assert!(matches!(
            li_yorke_pair_certificate(&w, c(1e-8, 0.0), c(0.0, 0.0)),
            Err(Error::ScaleOutOfRange(_))
        ));
    }

    #[test]
    fn families() {
        let w = witness();
        assert!(scrambled_family(&w, 1).is_err());
        let two = scrambled_family(&w, 2).unwrap();
        assert_eq!(two.pairs.len(), 1);
        assert_eq!(two.pairs[0].scale, 0.5);
        let three = scrambled_family(&w, 3).unwrap();
        assert_eq!(three.pairs.len(), 3);
        assert!((three.min_scale() - 1.0 / 3.0).abs() < 1e-15);
        let ten = scrambled_family_with(&w, 10, Execution::Sequential).unwrap();
        assert_eq!(ten.pairs.len(), 45);
        assert!((ten.min_scale() - 0.1).abs() < 1e-15);
        assert!(ten.all_valid());
        assert_eq!(
            ten.pairs,
            scrambled_family_with(&w, 10, Execution::Parallel).unwrap().pairs
        );
    }
}
