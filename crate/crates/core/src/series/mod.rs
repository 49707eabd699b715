//! Sparse multivariate complex power series truncated at a finite degree.

mod function;
pub mod json;
mod multi_index;
mod special;
mod tail;

use serde::{Deserialize, Serialize};

pub use function::{linear_combine, multiply, TruncatedEntireFunction};
pub use multi_index::MultiIndex;
pub use special::{default_gap_blocks, exp_function, gap_series};
pub use tail::{ExponentialTail, GapTail, TailDescriptor};

use crate::error::{Error, Result};

/// Radius of the closed polydisc `{|z_j| <= r for all j}`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Radius(f64);

impl Radius {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > 0.0 {
            Ok(Radius(r))
        } else {
            Err(Error::InvalidInput(format!(
                "radius must be positive and finite, got {r}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Radius {
    type Error = Error;

    fn try_from(r: f64) -> Result<Self> {
        Radius::new(r)
    }
}

impl From<Radius> for f64 {
    fn from(r: Radius) -> f64 {
        r.0
    }
}
