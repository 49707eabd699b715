use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Finitely supported exponent vector over variables `1, 2, 3, …`.
///
/// Stored as `(variable, exponent)` pairs sorted by variable with every
/// exponent strictly positive, so structural equality is value equality.
/// Ordering is graded lexicographic: total degree first, then the pair
/// list lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<(usize, u32)>,
}

impl MultiIndex {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The unit index `e_var`.
    ///
    /// # Panics
    /// If `var == 0`; variables are numbered from 1.
    pub fn unit(var: usize) -> Self {
        assert!(var >= 1, "variables are numbered from 1");
        Self {
            entries: vec![(var, 1)],
        }
    }

    /// Builds an index from `(variable, exponent)` pairs. Zero exponents are
    /// dropped and repeated variables accumulate.
    pub fn new(pairs: impl IntoIterator<Item = (usize, u32)>) -> Result<Self> {
        let mut entries: Vec<(usize, u32)> = Vec::new();
        for (var, exp) in pairs {
            if var == 0 {
                return Err(Error::InvalidInput("variable index 0 (variables start at 1)".into()));
            }
            if exp == 0 {
                continue;
            }
            match entries.binary_search_by_key(&var, |e| e.0) {
                Ok(pos) => {
                    entries[pos].1 = entries[pos]
                        .1
                        .checked_add(exp)
                        .ok_or_else(|| Error::InvalidInput("exponent overflow".into()))?
                }
                Err(pos) => entries.insert(pos, (var, exp)),
            }
        }
        Ok(Self { entries })
    }

    /// Dense exponent vector; position `i` holds the exponent of `z_{i+1}`.
    pub fn from_dense(exps: &[u32]) -> Self {
        Self {
            entries: exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| (i + 1, e))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    /// Largest variable index in the support, 0 for the zero index.
    pub fn max_variable(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0)
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.entries
            .binary_search_by_key(&var, |e| e.0)
            .map_or(0, |pos| self.entries[pos].1)
    }

    /// True when the index only involves `z_1, …, z_n`.
    pub fn within(&self, n: usize) -> bool {
        self.max_variable() <= n
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.entries.iter().all(|&(v, e)| other.exponent(v) >= e)
    }

    /// `self - other`, if `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.divides(self) {
            return None;
        }
        let entries = self
            .entries
            .iter()
            .filter_map(|&(v, e)| {
                let d = e - other.exponent(v);
                (d > 0).then_some((v, d))
            })
            .collect();
        Some(Self { entries })
    }

    /// `self - e_var`, if the exponent of `var` is positive.
    pub fn lowered(&self, var: usize) -> Option<MultiIndex> {
        let pos = self.entries.binary_search_by_key(&var, |e| e.0).ok()?;
        let mut entries = self.entries.clone();
        if entries[pos].1 == 1 {
            entries.remove(pos);
        } else {
            entries[pos].1 -= 1;
        }
        Some(Self { entries })
    }

    pub fn sum(&self, other: &MultiIndex) -> MultiIndex {
        let mut entries = self.entries.clone();
        for &(v, e) in &other.entries {
            match entries.binary_search_by_key(&v, |x| x.0) {
                Ok(pos) => entries[pos].1 += e,
                Err(pos) => entries.insert(pos, (v, e)),
            }
        }
        Self { entries }
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.entries.cmp(&other.entries))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("1");
        }
        for (i, &(v, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "z{v}")?;
            } else {
                write!(f, "z{v}^{e}")?;
            }
        }
        Ok(())
    }
}
