//! Per-iteration run traces and their CSV form.

use std::io::Write;

use crate::error::Result;

pub const CSV_HEADER: &str = "iter,wall_ms,grad_evals,f_evals,cost,alpha,backtracks,beta,gamma";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub wall_ms: f64,
    /// Cumulative per-sample gradient evaluations.
    pub grad_evals: u64,
    /// Cumulative per-sample cost evaluations.
    pub f_evals: u64,
    /// True objective when the oracle provides it, otherwise the estimate.
    pub cost: f64,
    pub alpha: f64,
    pub backtracks: usize,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn final_cost(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.cost)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.records {
            write_row(&mut w, r)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }
}

fn write_row<W: Write>(w: &mut W, r: &TraceRecord) -> Result<()> {
    writeln!(
        w,
        "{},{:?},{},{},{:?},{:?},{},{:?},{:?}",
        r.iter, r.wall_ms, r.grad_evals, r.f_evals, r.cost, r.alpha, r.backtracks, r.beta, r.gamma
    )?;
    Ok(())
}

/// Row-wise arithmetic mean of several traces over the rows all of them have.
pub fn mean_trace(traces: &[RunTrace]) -> RunTrace {
    let Some(rows) = traces.iter().map(|t| t.records.len()).min() else {
        return RunTrace::default();
    };
    let n = traces.len() as f64;
    let records = (0..rows)
        .map(|k| {
            let col = |f: &dyn Fn(&TraceRecord) -> f64| traces.iter().map(|t| f(&t.records[k])).sum::<f64>() / n;
            TraceRecord {
                iter: traces[0].records[k].iter,
                wall_ms: col(&|r| r.wall_ms),
                grad_evals: col(&|r| r.grad_evals as f64).round() as u64,
                f_evals: col(&|r| r.f_evals as f64).round() as u64,
                cost: col(&|r| r.cost),
                alpha: col(&|r| r.alpha),
                backtracks: col(&|r| r.backtracks as f64).round() as usize,
                beta: col(&|r| r.beta),
                gamma: col(&|r| r.gamma),
            }
        })
        .collect();
    RunTrace { records }
}
