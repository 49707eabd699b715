use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::json::complex_pairs;
use super::Radius;
use crate::numeric::{exp_tail, power_over_factorial};

/// Closed-form majorant for the part of an entire function cut off by a
/// polynomial truncation.
///
/// A descriptor is a weighted list of components of one kind; linear
/// combinations concatenate components with weights `|c|`, which keeps the
/// bound sound by the triangle inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "components", rename_all = "lowercase")]
pub enum TailDescriptor {
    /// Remainders of `weight · e_λ` truncated at `degree`.
    Exponential(Vec<ExponentialTail>),
    /// Remainders of `weight · Σ z_j^m / m!` over `m ∈ blocks`, truncated at `degree`.
    Gap(Vec<GapTail>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentialTail {
    #[serde(with = "complex_pairs")]
    pub lambda: Vec<Complex64>,
    pub degree: u32,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapTail {
    pub blocks: Vec<u32>,
    pub degree: u32,
    pub weight: f64,
}

impl ExponentialTail {
    fn bound(&self, r: f64) -> f64 {
        let s = r * self.lambda.iter().map(|l| l.norm()).fold(0.0, |a, b| a + b);
        self.weight * exp_tail(s, self.degree)
    }
}

impl GapTail {
    fn bound(&self, r: f64) -> f64 {
        self.weight
            * self
                .blocks
                .iter()
                .filter(|&&m| m > self.degree)
                .map(|&m| power_over_factorial(r, m))
                .fold(0.0, |a, b| a + b)
    }
}

impl TailDescriptor {
    /// Upper bound for the polydisc majorant of the remainder at radius `r`.
    /// Non-negative and non-decreasing in `r`.
    pub fn bound(&self, r: Radius) -> f64 {
        let r = r.get();
        match self {
            TailDescriptor::Exponential(c) => c.iter().map(|t| t.bound(r)).fold(0.0, |a, b| a + b),
            TailDescriptor::Gap(c) => c.iter().map(|t| t.bound(r)).fold(0.0, |a, b| a + b),
        }
    }

    pub(crate) fn scaled(&self, factor: f64) -> TailDescriptor {
        let factor = factor.abs();
        match self {
            TailDescriptor::Exponential(c) => TailDescriptor::Exponential(
                c.iter()
                    .map(|t| ExponentialTail {
                        weight: t.weight * factor,
                        ..t.clone()
                    })
                    .collect(),
            ),
            TailDescriptor::Gap(c) => TailDescriptor::Gap(
                c.iter()
                    .map(|t| GapTail {
                        weight: t.weight * factor,
                        ..t.clone()
                    })
                    .collect(),
            ),
        }
    }

    /// Same descriptor after dropping every term of degree above `degree`.
    pub(crate) fn truncated(&self, degree: u32) -> TailDescriptor {
        match self {
            TailDescriptor::Exponential(c) => TailDescriptor::Exponential(
                c.iter()
                    .map(|t| ExponentialTail {
                        degree: t.degree.min(degree),
                        ..t.clone()
                    })
                    .collect(),
            ),
            TailDescriptor::Gap(c) => TailDescriptor::Gap(
                c.iter()
                    .map(|t| GapTail {
                        degree: t.degree.min(degree),
                        ..t.clone()
                    })
                    .collect(),
            ),
        }
    }

    /// Conservative descriptor for `Σ c_i f_i`; `None` unless every input
    /// carries a descriptor and all of them share one kind.
    pub(crate) fn combine<'a>(
        parts: impl IntoIterator<Item = (f64, Option<&'a TailDescriptor>)>,
    ) -> Option<TailDescriptor> {
        let mut out: Option<TailDescriptor> = None;
        for (scale, tail) in parts {
            let scaled = tail?.scaled(scale);
            out = Some(match (out, scaled) {
                (None, s) => s,
                (Some(TailDescriptor::Exponential(mut a)), TailDescriptor::Exponential(b)) => {
                    a.extend(b);
                    TailDescriptor::Exponential(a)
                }
                (Some(TailDescriptor::Gap(mut a)), TailDescriptor::Gap(b)) => {
                    a.extend(b);
                    TailDescriptor::Gap(a)
                }
                _ => return None,
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_tail_desc(lambda: f64, degree: u32) -> TailDescriptor {
        TailDescriptor::Exponential(vec![ExponentialTail {
            lambda: vec![Complex64::new(lambda, 0.0)],
            degree,
            weight: 1.0,
        }])
    }

    #[test]
    fn combine_requires_shared_kind() {
        let e = exp_tail_desc(1.0, 3);
        let g = TailDescriptor::Gap(vec![GapTail {
            blocks: vec![1, 2],
            degree: 2,
            weight: 1.0,
        }]);
        assert!(TailDescriptor::combine([(1.0, Some(&e)), (1.0, Some(&g))]).is_none());
        assert!(TailDescriptor::combine([(1.0, Some(&e)), (1.0, None)]).is_none());
        let c = TailDescriptor::combine([(2.0, Some(&e)), (-3.0, Some(&e))]).unwrap();
        let r = Radius::new(1.0).unwrap();
        assert!((c.bound(r) - 5.0 * e.bound(r)).abs() < 1e-15);
    }

    #[test]
    fn gap_tail_counts_only_dropped_blocks() {
        let g = TailDescriptor::Gap(vec![GapTail {
            blocks: vec![1, 2, 4],
            degree: 2,
            weight: 1.0,
        }]);
        let r = Radius::new(2.0).unwrap();
        assert!((g.bound(r) - 16.0 / 24.0).abs() < 1e-15);
        assert_eq!(g.truncated(4).bound(r), g.bound(r));
    }
}
