//! JSON rendering of series:
//! `{"truncation_degree": D, "terms": [{"exp": {"1": 2}, "re": x, "im": y}, …]}`
//! with terms in graded-lex order. An optional `"tail"` object carries the
//! tail descriptor. Floats are written in shortest round-trip form.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{MultiIndex, TailDescriptor, TruncatedEntireFunction};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: BTreeMap<usize, u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SeriesJson {
    truncation_degree: u32,
    terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailDescriptor>,
}

pub fn terms_to_json<'a>(terms: impl IntoIterator<Item = (&'a MultiIndex, &'a Complex64)>) -> Vec<TermJson> {
    terms
        .into_iter()
        .map(|(k, v)| TermJson {
            exp: k.entries().iter().copied().collect(),
            re: v.re,
            im: v.im,
        })
        .collect()
}

pub fn terms_from_json(terms: &[TermJson]) -> Result<BTreeMap<MultiIndex, Complex64>> {
    let mut out = BTreeMap::new();
    for t in terms {
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        if t.exp.values().any(|&e| e == 0) {
            return Err(Error::InvalidInput("zero exponent stored in term".into()));
        }
        let index = MultiIndex::new(t.exp.iter().map(|(&v, &e)| (v, e)))?;
        if out.insert(index.clone(), Complex64::new(t.re, t.im)).is_some() {
            return Err(Error::InvalidInput(format!("duplicate term {index}")));
        }
    }
    Ok(out)
}

impl From<&TruncatedEntireFunction> for SeriesJson {
    fn from(f: &TruncatedEntireFunction) -> Self {
        SeriesJson {
            truncation_degree: f.truncation_degree(),
            terms: terms_to_json(f.iter()),
            tail: f.tail().cloned(),
        }
    }
}

impl TryFrom<SeriesJson> for TruncatedEntireFunction {
    type Error = Error;

    fn try_from(s: SeriesJson) -> Result<Self> {
        let terms = terms_from_json(&s.terms)?;
        TruncatedEntireFunction::from_map(terms, 0)
            .with_truncation_degree(s.truncation_degree)
            .map(|f| f.with_tail(s.tail))
    }
}

impl Serialize for TruncatedEntireFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedEntireFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(deserializer)?;
        TruncatedEntireFunction::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl TruncatedEntireFunction {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("series serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<usize, u32> = self.entries().iter().copied().collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<usize, u32>::deserialize(deserializer)?;
        if map.values().any(|&e| e == 0) {
            return Err(serde::de::Error::custom("zero exponent stored in multi-index"));
        }
        MultiIndex::new(map).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: a complex number as `[re, im]`.
pub mod complex_pair {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Serde adapter: a complex vector as `[[re, im], …]`.
pub mod complex_pairs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}
