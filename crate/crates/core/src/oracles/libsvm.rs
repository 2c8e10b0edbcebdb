//! LIBSVM text format: one sample per line,
//!
//! ```text
//! <label> <index>:<value> <index>:<value> ... [# comment]
//! ```
//!
//! with 1-based, strictly increasing indices. Labels are mapped to ±1 by sign.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Binary-labelled sparse samples in compressed-row form, 0-based internally.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseDataset {
    n_features: usize,
    labels: Vec<f64>,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseDataset {
    /// Build from rows of `(0-based index, value)`; `n_features` is raised to
    /// cover every index present.
    pub fn from_rows(labels: Vec<f64>, rows: Vec<Vec<(usize, f64)>>, n_features: usize) -> Result<Self> {
        if labels.len() != rows.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: rows.len(),
            });
        }
        let mut ds = SparseDataset {
            n_features,
            labels: labels.into_iter().map(|l| if l > 0.0 { 1.0 } else { -1.0 }).collect(),
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        };
        for (line, row) in rows.into_iter().enumerate() {
            let mut prev: Option<usize> = None;
            for (idx, val) in row {
                if prev.is_some_and(|p| idx <= p) {
                    return Err(Error::NonIncreasingIndex { line: line + 1 });
                }
                if !val.is_finite() {
                    return Err(Error::NonFinite);
                }
                prev = Some(idx);
                ds.n_features = ds.n_features.max(idx + 1);
                ds.indices.push(idx);
                ds.values.push(val);
            }
            ds.indptr.push(ds.indices.len());
        }
        Ok(ds)
    }

    /// Random separable-with-noise classification data: each feature is
    /// present with probability `density`, values are Gaussian rounded to four
    /// decimals, and labels are the sign of a hidden linear score plus
    /// Gaussian noise of standard deviation `label_noise`.
    pub fn synthetic(n: usize, d: usize, density: f64, label_noise: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let mut labels = Vec::with_capacity(n);
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let mut row = Vec::new();
            let mut score = 0.0;
            for (j, wj) in w.iter().enumerate() {
                if rng.random::<f64>() < density {
                    let v: f64 = rng.sample(StandardNormal);
                    let v = (v * 1e4).round() / 1e4;
                    score += v * wj;
                    row.push((j, v));
                }
            }
            let e: f64 = rng.sample(StandardNormal);
            labels.push(if score + label_noise * e > 0.0 { 1.0 } else { -1.0 });
            rows.push(row);
        }
        SparseDataset::from_rows(labels, rows, d).expect("generated rows are increasing and finite")
    }

    #[inline]
    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    /// 0-based feature indices and values of sample `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    /// `aᵢᵀ x`
    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(&j, v)| v * x[j]).sum()
    }
}

/// Parse LIBSVM text. Blank lines and `#` comments are ignored.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<SparseDataset> {
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    let mut n_features = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = lineno + 1;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else {
            continue;
        };
        let malformed = |tok: &str| Error::MalformedLine {
            line: line_no,
            token: tok.to_string(),
        };
        let label: f64 = label_tok.parse().map_err(|_| malformed(label_tok))?;
        if !label.is_finite() {
            return Err(malformed(label_tok));
        }
        let mut row = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (i, v) = tok.split_once(':').ok_or_else(|| malformed(tok))?;
            let idx: usize = i.parse().map_err(|_| malformed(tok))?;
            let val: f64 = v.parse().map_err(|_| malformed(tok))?;
            if idx == 0 || !val.is_finite() {
                return Err(malformed(tok));
            }
            if idx <= prev {
                return Err(Error::NonIncreasingIndex { line: line_no });
            }
            prev = idx;
            n_features = n_features.max(idx);
            row.push((idx - 1, val));
        }
        labels.push(if label > 0.0 { 1.0 } else { -1.0 });
        rows.push(row);
    }
    SparseDataset::from_rows(labels, rows, n_features)
}

/// Read a LIBSVM file, gunzipping when the name ends in `.gz`.
pub fn read_libsvm(path: &Path) -> Result<SparseDataset> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        parse_libsvm(BufReader::new(GzDecoder::new(file)))
    } else {
        parse_libsvm(BufReader::new(file))
    }
}

/// Write LIBSVM text that parses back to an identical dataset.
pub fn write_libsvm<W: Write>(ds: &SparseDataset, mut w: W) -> Result<()> {
    for i in 0..ds.n_samples() {
        write!(w, "{}", if ds.label(i) > 0.0 { "+1" } else { "-1" })?;
        let (idx, val) = ds.row(i);
        for (j, v) in idx.iter().zip(val) {
            write!(w, " {}:{:?}", j + 1, v)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row() {
        let ds = parse_libsvm("+1 1:0.5 3:-2\n".as_bytes()).unwrap();
        assert_eq!(ds.n_samples(), 1);
        assert_eq!(ds.n_features(), 3);
        assert_eq!(ds.label(0), 1.0);
        assert_eq!(ds.row(0), (&[0usize, 2][..], &[0.5, -2.0][..]));
    }

    #[test]
    fn labels_by_sign_and_comments() {
        let text = "# header\n2 1:1\n\n0 2:1 # trailing\n-3\n";
        let ds = parse_libsvm(text.as_bytes()).unwrap();
        assert_eq!(ds.labels(), &[1.0, -1.0, -1.0]);
        assert_eq!(ds.row(2).0.len(), 0);
        assert_eq!(ds.n_features(), 2);
    }

    #[test]
    fn non_increasing_index() {
        assert_eq!(
            parse_libsvm("1 3:1 2:1".as_bytes()),
            Err(Error::NonIncreasingIndex { line: 1 })
        );
        assert_eq!(
            parse_libsvm("1 1:1\n1 2:1 2:3".as_bytes()),
            Err(Error::NonIncreasingIndex { line: 2 })
        );
    }

    #[test]
    fn malformed_tokens() {
        for (text, tok) in [
            ("x 1:1", "x"),
            ("1 1-1", "1-1"),
            ("1 0:1", "0:1"),
            ("1 a:1", "a:1"),
            ("1 1:b", "1:b"),
            ("1 1:nan", "1:nan"),
        ] {
            assert_eq!(
                parse_libsvm(text.as_bytes()),
                Err(Error::MalformedLine {
                    line: 1,
                    token: tok.to_string()
                }),
                "{text}"
            );
        }
    }

    #[test]
    fn write_then_parse() {
        let ds = parse_libsvm("-1 2:0.1 7:1e-300\n+1 1:3\n".as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_libsvm(&ds, &mut buf).unwrap();
        assert_eq!(parse_libsvm(&buf[..]).unwrap(), ds);
    }
}
