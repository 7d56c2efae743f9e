use clap::Args;
use qreg_core::inference::{mlqe, InferenceError};
use qreg_core::linalg::LinalgError;
use qreg_core::solver::{solve_path, standardize};
use qreg_core::QIndex;

use crate::data::{fmt17, open_output, read_dataset};
use crate::{usage, InputArgs, PathArgs};

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub path: PathArgs,
}

/// Warns on stderr when the predictors are collinear.
pub fn report_rank(design: &qreg_core::Design, names: &[String]) {
    match mlqe(design, QIndex::GAUSSIAN) {
        Err(InferenceError::Linalg(LinalgError::RankDeficient { columns })) => {
            let named: Vec<&str> = columns.iter().filter_map(|&j| names.get(j.wrapping_sub(1)).map(String::as_str)).collect();
            eprintln!("warning: design is rank deficient; dependent columns: {}", named.join(", "));
        }
        Err(InferenceError::Linalg(LinalgError::Underdetermined { rows, cols })) => {
            eprintln!("warning: {rows} rows for {cols} coefficients; least squares is underdetermined");
        }
        _ => {}
    }
}

pub fn run(args: &FitArgs) -> anyhow::Result<()> {
    let spec = args.path.spec()?;
    let config = args.path.config()?;
    let data = read_dataset(&args.input.input, args.input.response.as_deref())?;
    let design = match standardize(&data.x, &data.y) {
        Ok(d) => d,
        Err(e) => return usage(format!("{}: {e}", args.input.input.display())),
    };
    report_rank(&design, &data.predictors);
    let path = solve_path(&design, &spec, &config)?;
    if !path.all_converged() {
        eprintln!("warning: coordinate descent did not converge at every lambda (see 'converged' column)");
    }

    let mut out = csv::Writer::from_writer(open_output(args.input.output.as_deref())?);
    let mut header = vec!["index".to_string(), "lambda".into(), "support_size".into(), "converged".into(), "iterations".into(), "intercept".into()];
    header.extend(data.predictors.iter().cloned());
    out.write_record(&header)?;
    for (k, coefs) in path.coefs.iter().enumerate() {
        let (intercept, slopes) = design.raw_coefficients(coefs);
        let report = &path.reports[k];
        let mut row = vec![
            k.to_string(),
            fmt17(path.lambdas[k]),
            coefs.support().len().to_string(),
            report.converged.to_string(),
            report.iterations.to_string(),
            fmt17(intercept),
        ];
        row.extend(slopes.into_iter().map(fmt17));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
