use std::path::PathBuf;

use clap::Args;

use qreg_core::inference::CriterionKind;

use crate::data::{fmt17, open_output};
use crate::experiment::{read_rows, Row, BEST};
use crate::{usage, UsageError};

#[derive(Args, Debug)]
pub struct SummarizeArgs {
    /// summary.csv or a per-case CSV written by `experiment`
    pub results: PathBuf,
    /// Comma-separated criteria to take the best over; defaults to all
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

type CaseKey = (String, usize, usize, String, String, usize, usize, u64);

fn key(r: &Row) -> CaseKey {
    (r.q.clone(), r.n, r.d, r.r_nz.clone(), r.theta0.clone(), r.m_trials, r.m_copies, r.base_seed)
}

pub fn run(args: &SummarizeArgs) -> anyhow::Result<()> {
    if !args.results.exists() {
        return usage(format!("{} does not exist", args.results.display()));
    }
    let criteria: Vec<CriterionKind> = if args.criteria.is_empty() {
        CriterionKind::ALL.to_vec()
    } else {
        args.criteria.iter().map(|s| s.parse().map_err(|e: qreg_core::inference::InferenceError| UsageError(e.to_string()))).collect::<Result<_, _>>()?
    };
    let rows: Vec<Row> = read_rows(&args.results)?.into_iter().filter(|r| r.criterion != BEST).collect();

    let mut keys: Vec<CaseKey> = Vec::new();
    for r in &rows {
        if !keys.contains(&key(r)) {
            keys.push(key(r));
        }
    }
    let mut out = csv::Writer::from_writer(open_output(args.output.as_deref())?);
    out.write_record(["q", "n", "d", "r_nz", "theta0", "m_trials", "method", "best_count", "rate", "count_criterion", "best_mean_error", "error_criterion"])?;
    for k in &keys {
        for method in ["LASSO", "SCAD", "MCP"] {
            let cells: Vec<&Row> = criteria
                .iter()
                .filter_map(|c| rows.iter().find(|r| key(r) == *k && r.method == method && r.criterion == c.name()))
                .collect();
            let Some(top) = cells.iter().fold(None::<&&Row>, |b, c| match b {
                Some(b) if b.count >= c.count => Some(b),
                _ => Some(c),
            }) else {
                continue;
            };
            let low = cells
                .iter()
                .filter_map(|c| c.mean_error.parse::<f64>().ok().map(|e| (e, c)))
                .fold(None::<(f64, &&Row)>, |b, (e, c)| match b {
                    Some((be, _)) if be <= e => b,
                    _ => Some((e, c)),
                });
            out.write_record([
                k.0.clone(),
                k.1.to_string(),
                k.2.to_string(),
                k.3.clone(),
                k.4.clone(),
                k.5.to_string(),
                method.to_string(),
                top.count.to_string(),
                fmt17(top.count as f64 / top.m_trials as f64),
                top.criterion.clone(),
                low.map(|(e, _)| fmt17(e)).unwrap_or_default(),
                low.map(|(_, c)| c.criterion.clone()).unwrap_or_default(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}
