//! Text presets for operators and functions.
//!
//! Operators: sums of terms like `2*id`, `d1`, `0.5*d1^2*d2`, `3` (a bare
//! number is a multiple of the identity), `translation:ξ1,ξ2[@cutoff]`,
//! inline symbol JSON or a path to a `.json` file.
//!
//! Functions: `gap:j[,m1,m2,…]`, `exp:λ1,…,λn,D`, polynomials like
//! `z1^2*z3 - 2*z2 + 1`, inline series JSON or a path to a `.json` file.

use std::collections::BTreeMap;
use std::path::Path;

use convdyn::convolution::translation_symbol;
use convdyn::series::default_gap_blocks;
use convdyn::{
    exp_function, gap_series, Complex64, ConvolutionSymbol, MultiIndex, TranslationVector, TruncatedEntireFunction,
};

/// Cutoff used for `translation:` presets without `@cutoff`.
pub const DEFAULT_TRANSLATION_CUTOFF: u32 = 60;

/// A parsed function, remembering the gap construction when it was used.
#[derive(Clone, Debug)]
pub struct FunctionPreset {
    pub function: TruncatedEntireFunction,
    pub gap: Option<(usize, Vec<u32>)>,
}

fn read_json_file(path: &str) -> Result<String, String> {
    std::fs::read_to_string(Path::new(path)).map_err(|e| format!("cannot read {path}: {e}"))
}

pub fn parse_number(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    let bad = || format!("invalid number '{s}'");
    if let Some(im) = s.strip_suffix('i') {
        let v = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => im.parse::<f64>().map_err(|_| bad())?,
        };
        return finite(Complex64::new(0.0, v)).ok_or_else(bad);
    }
    let v = s.parse::<f64>().map_err(|_| bad())?;
    finite(Complex64::new(v, 0.0)).ok_or_else(bad)
}

fn finite(z: Complex64) -> Option<Complex64> {
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// Splits `a + b - c` into signed terms, leaving exponents like `1e-3` intact.
fn signed_terms(s: &str) -> Result<Vec<(f64, String)>, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty expression".into());
    }
    let chars: Vec<char> = compact.chars().collect();
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let exponent_sign = i >= 2 && matches!(chars[i - 1], 'e' | 'E') && chars[i - 2].is_ascii_digit();
        if (c == '+' || c == '-') && !exponent_sign {
            if !current.is_empty() {
                terms.push((sign, std::mem::take(&mut current)));
            } else if i > 0 {
                return Err(format!("dangling sign in '{s}'"));
            }
            sign = if c == '-' { -1.0 } else { 1.0 };
        } else {
            current.push(c);
        }
    }
    if current.is_empty() {
        return Err(format!("expression '{s}' ends with a sign"));
    }
    terms.push((sign, current));
    Ok(terms)
}

/// Parses `prefix J` or `prefix J^p` into `(J, p)`.
fn indexed_power(factor: &str, prefix: char) -> Option<Result<(usize, u32), String>> {
    let rest = factor.strip_prefix(prefix)?;
    if !rest.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    let (var, pow) = match rest.split_once('^') {
        Some((v, p)) => (v, p),
        None => (rest, "1"),
    };
    Some((|| {
        let var: usize = var.parse().map_err(|_| format!("invalid variable in '{factor}'"))?;
        let pow: u32 = pow.parse().map_err(|_| format!("invalid power in '{factor}'"))?;
        if var == 0 {
            return Err(format!("variables are numbered from 1 in '{factor}'"));
        }
        Ok((var, pow))
    })())
}

fn monomial_terms(s: &str, prefix: char, identity: Option<&str>) -> Result<BTreeMap<MultiIndex, Complex64>, String> {
    let mut out: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
    for (sign, term) in signed_terms(s)? {
        let mut coef = Complex64::new(sign, 0.0);
        let mut exps: Vec<(usize, u32)> = Vec::new();
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(format!("empty factor in '{term}'"));
            }
            if Some(factor) == identity {
                continue;
            }
            match indexed_power(factor, prefix) {
                Some(p) => exps.push(p?),
                None => coef *= parse_number(factor).map_err(|_| format!("unknown factor '{factor}'"))?,
            }
        }
        let index = MultiIndex::new(exps).map_err(|e| e.to_string())?;
        *out.entry(index).or_insert(Complex64::new(0.0, 0.0)) += coef;
    }
    Ok(out)
}

pub fn parse_operator(spec: &str) -> Result<ConvolutionSymbol, String> {
    let s = spec.trim();
    if s.starts_with('{') {
        return ConvolutionSymbol::from_json(s).map_err(|e| e.to_string());
    }
    if s.ends_with(".json") {
        return ConvolutionSymbol::from_json(&read_json_file(s)?).map_err(|e| e.to_string());
    }
    if let Some(rest) = s.strip_prefix("translation:") {
        let (coords, cutoff) = match rest.split_once('@') {
            Some((c, k)) => (c, k.parse::<u32>().map_err(|_| format!("invalid cutoff '{k}'"))?),
            None => (rest, DEFAULT_TRANSLATION_CUTOFF),
        };
        let xi = coords.split(',').map(parse_number).collect::<Result<Vec<_>, _>>()?;
        return Ok(translation_symbol(&TranslationVector::new(xi), cutoff));
    }
    let terms = monomial_terms(s, 'd', Some("id"))?;
    Ok(ConvolutionSymbol::new(terms, s))
}

pub fn parse_function(spec: &str) -> Result<FunctionPreset, String> {
    let s = spec.trim();
    let plain = |function| FunctionPreset { function, gap: None };
    if s.starts_with('{') {
        return TruncatedEntireFunction::from_json(s)
            .map(plain)
            .map_err(|e| e.to_string());
    }
    if s.ends_with(".json") {
        return TruncatedEntireFunction::from_json(&read_json_file(s)?)
            .map(plain)
            .map_err(|e| e.to_string());
    }
    if let Some(rest) = s.strip_prefix("gap:") {
        let mut parts = rest.split(',');
        let var: usize = parts
            .next()
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| format!("invalid gap variable in '{s}'"))?;
        let blocks = parts
            .map(|p| p.trim().parse::<u32>().map_err(|_| format!("invalid gap block '{p}'")))
            .collect::<Result<Vec<_>, _>>()?;
        let blocks = if blocks.is_empty() {
            default_gap_blocks()
        } else {
            blocks
        };
        let function = gap_series(&blocks, var).map_err(|e| e.to_string())?;
        return Ok(FunctionPreset {
            function,
            gap: Some((var, blocks)),
        });
    }
    if let Some(rest) = s.strip_prefix("exp:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() < 2 {
            return Err(format!("'{s}' needs at least one λ and a degree"));
        }
        let degree: u32 = parts[parts.len() - 1]
            .trim()
            .parse()
            .map_err(|_| format!("invalid degree in '{s}'"))?;
        let lambda = parts[..parts.len() - 1]
            .iter()
            .map(|p| parse_number(p))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(plain(exp_function(&lambda, degree)));
    }
    let terms = monomial_terms(s, 'z', None)?;
    Ok(plain(TruncatedEntireFunction::from_terms(terms)))
}
