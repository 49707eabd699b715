use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convolution::ConvolutionSymbol;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::series::json::complex_pair;
use crate::series::{Radius, TruncatedEntireFunction};

pub const DEFAULT_GRID_SAMPLES: usize = 8;

/// Cap on torus grid points per record; `samples_per_axis` is lowered for
/// functions of many variables so that `samples^n` stays below it.
const GRID_BUDGET: f64 = (1u64 << 16) as f64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub k: usize,
    pub essential_dim: usize,
    #[serde(with = "complex_pair")]
    pub eval_at_zero: Complex64,
    /// `p_r(L^k f)` per radius.
    pub majorant: Vec<f64>,
    /// Torus-grid lower estimate of the sup norm per radius.
    pub grid_sup: Vec<f64>,
}

/// Seminorms, point values and essential dimension along `f, Lf, …, L^K f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub operator: String,
    pub radii: Vec<Radius>,
    pub horizon: usize,
    pub samples_per_axis: usize,
    pub records: Vec<OrbitRecord>,
}

pub fn orbit_trace(
    l: &ConvolutionSymbol,
    f: &TruncatedEntireFunction,
    horizon: usize,
    radii: &[Radius],
) -> Result<OrbitTrace> {
    orbit_trace_with(l, f, horizon, radii, DEFAULT_GRID_SAMPLES, Execution::default())
}

/// The orbit itself is sequential in `k`; the per-record seminorm work is
/// spread over `exec`.
pub fn orbit_trace_with(
    l: &ConvolutionSymbol,
    f: &TruncatedEntireFunction,
    horizon: usize,
    radii: &[Radius],
    samples_per_axis: usize,
    exec: Execution,
) -> Result<OrbitTrace> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("orbit trace needs at least one radius".into()));
    }
    let orbit = l.orbit(f, horizon);
    Ok(trace_of_orbit(l.label(), &orbit, radii, samples_per_axis, exec))
}

pub(crate) fn trace_of_orbit(
    label: &str,
    orbit: &[TruncatedEntireFunction],
    radii: &[Radius],
    samples_per_axis: usize,
    exec: Execution,
) -> OrbitTrace {
    let records = exec.map_range(orbit.len(), |k| {
        let g = &orbit[k];
        let n = g.essential_dimension();
        let samples = grid_samples(samples_per_axis, n);
        OrbitRecord {
            k,
            essential_dim: n,
            eval_at_zero: g.evaluate(&[]),
            majorant: radii.iter().map(|&r| g.majorant(r)).collect(),
            grid_sup: radii
                .iter()
                .map(|&r| g.grid_sup_estimate_with(r, samples, Execution::Sequential))
                .collect(),
        }
    });
    OrbitTrace {
        operator: label.to_string(),
        radii: radii.to_vec(),
        horizon: orbit.len().saturating_sub(1),
        samples_per_axis,
        records,
    }
}

fn grid_samples(requested: usize, n: usize) -> usize {
    if n == 0 {
        return requested.max(1);
    }
    let cap = GRID_BUDGET.powf(1.0 / n as f64).floor() as usize;
    requested.min(cap).max(1)
}

fn fmt_f64(x: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(x).to_string()
}

impl OrbitTrace {
    /// CSV with columns `k, essential_dim, eval0_re, eval0_im` followed by a
    /// `majorant_r{r}, gridsup_r{r}` pair per radius. Floats use the shortest
    /// round-trip representation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,essential_dim,eval0_re,eval0_im");
        for r in &self.radii {
            write!(out, ",majorant_r{0},gridsup_r{0}", r.get()).unwrap();
        }
        out.push('\n');
        for rec in &self.records {
            write!(
                out,
                "{},{},{},{}",
                rec.k,
                rec.essential_dim,
                fmt_f64(rec.eval_at_zero.re),
                fmt_f64(rec.eval_at_zero.im)
            )
            .unwrap();
            for (m, g) in rec.majorant.iter().zip(&rec.grid_sup) {
                write!(out, ",{},{}", fmt_f64(*m), fmt_f64(*g)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Largest majorant over the radii at each record.
    pub fn max_majorants(&self) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| r.majorant.iter().copied().fold(0.0, f64::max))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::MultiIndex;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn r(x: f64) -> Radius {
        Radius::new(x).unwrap()
    }

    #[test]
    fn derivative_of_square() {
        let f = TruncatedEntireFunction::monomial(MultiIndex::new([(1, 2)]).unwrap(), c(1.0));
        let t = orbit_trace(&ConvolutionSymbol::derivative(1), &f, 3, &[r(1.0)]).unwrap();
        let m: Vec<f64> = t.records.iter().map(|x| x.majorant[0]).collect();
        assert_eq!(m, vec![1.0, 2.0, 2.0, 0.0]);
        let dims: Vec<usize> = t.records.iter().map(|x| x.essential_dim).collect();
        assert_eq!(dims, vec![1, 1, 0, 0]);
        assert_eq!(t.records[2].eval_at_zero, c(2.0));
        for rec in &t.records {
            assert!(rec.grid_sup[0] <= rec.majorant[0]);
        }
    }

    #[test]
    fn identity_and_geometric() {
        let f = TruncatedEntireFunction::variable(2);
        let t = orbit_trace(&ConvolutionSymbol::identity(), &f, 5, &[r(1.0), r(2.0)]).unwrap();
        assert!(t.records.windows(2).all(|w| w[0].majorant == w[1].majorant));

        let one = TruncatedEntireFunction::constant(c(1.0));
        let t = orbit_trace(&ConvolutionSymbol::scalar(c(2.0)), &one, 3, &[r(1.0)]).unwrap();
        assert_eq!(t.max_majorants(), vec![1.0, 2.0, 4.0, 8.0]);
    }

    #[test]
    fn csv_layout() {
        let f = TruncatedEntireFunction::monomial(MultiIndex::new([(1, 2)]).unwrap(), c(1.0));
        let t = orbit_trace(&ConvolutionSymbol::derivative(1), &f, 0, &[r(1.0)]).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "k,essential_dim,eval0_re,eval0_im,majorant_r1,gridsup_r1");

        let t = orbit_trace(&ConvolutionSymbol::derivative(1), &f, 3, &[r(1.0), r(2.5)]).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0].split(',').count(), 8);
        assert!(lines[0].ends_with("majorant_r2.5,gridsup_r2.5"));
        assert_eq!(lines[2], "1,1,0.0,0.0,2.0,2.0,5.0,5.0");
    }

    #[test]
    fn empty_radii_rejected() {
        let f = TruncatedEntireFunction::variable(1);
        assert!(orbit_trace(&ConvolutionSymbol::derivative(1), &f, 2, &[]).is_err());
    }

    #[test]
    fn modes_agree() {
        let f = crate::series::exp_function(&[c(0.5), c(-1.0)], 6);
        let l = ConvolutionSymbol::derivative(1).plus(&ConvolutionSymbol::derivative(2));
        let a = orbit_trace_with(&l, &f, 6, &[r(1.0)], 8, Execution::Sequential).unwrap();
        let b = orbit_trace_with(&l, &f, 6, &[r(1.0)], 8, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
