use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::Context;
use nalgebra::{DMatrix, DVector};

use crate::{usage, UsageError};

/// Predictors and response read from a CSV file.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub predictors: Vec<String>,
    pub response: String,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

pub fn read_dataset(path: &Path, response: Option<&str>) -> anyhow::Result<Dataset> {
    let file = File::open(path).map_err(|e| UsageError(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let headers: Vec<String> = match reader.headers() {
        Ok(h) => h.iter().map(str::to_string).collect(),
        Err(e) => return usage(format!("{}: bad header: {e}", path.display())),
    };
    if headers.len() < 2 {
        return usage(format!("{}: need at least one predictor and a response column", path.display()));
    }
    let target = match response {
        Some(name) => match headers.iter().position(|h| h == name) {
            Some(i) => i,
            None => return usage(format!("{}: no column named '{name}'", path.display())),
        },
        None => headers.len() - 1,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return usage(format!("{}:{line}: {e}", path.display()));
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(headers.len());
        for (field, name) in record.iter().zip(&headers) {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => return usage(format!("{}:{line}: column '{name}': '{field}' is not a finite number", path.display())),
            }
        }
        rows.push(row);
    }
    if rows.len() < 2 {
        return usage(format!("{}: need at least 2 data rows, found {}", path.display(), rows.len()));
    }
    let predictors: Vec<usize> = (0..headers.len()).filter(|&j| j != target).collect();
    let x = DMatrix::from_fn(rows.len(), predictors.len(), |a, j| rows[a][predictors[j]]);
    let y = DVector::from_fn(rows.len(), |a, _| rows[a][target]);
    Ok(Dataset {
        predictors: predictors.iter().map(|&j| headers[j].clone()).collect(),
        response: headers[target].clone(),
        x,
        y,
    })
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_default()
}

pub fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, 0.0] {
            assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
        }
    }
}
