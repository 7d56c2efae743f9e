use std::io::Write;

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qreg_core::inference::{cross_validate_on_grid, select_model, CriterionKind, FitSource};
use qreg_core::solver::{solve_path, standardize};
use qreg_core::QIndex;

use crate::data::{open_output, read_dataset};
use crate::fit::report_rank;
use crate::{usage, InputArgs, PathArgs};

#[derive(Args, Debug)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub path: PathArgs,
    /// AIC1, AIC2, BIC1, BIC2, LqAIC1, LqAIC2, LqBIC1, LqBIC2 or CV
    #[arg(long, default_value = "BIC2")]
    pub criterion: String,
    /// q of the error model, in [1, 3)
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Cross-validation folds
    #[arg(long, default_value_t = qreg_core::inference::DEFAULT_FOLDS)]
    pub folds: usize,
    /// Seed for the cross-validation fold assignment
    #[arg(long, env = "QREG_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct Named {
    name: String,
    value: f64,
}

#[derive(Serialize)]
struct Report {
    response: String,
    penalty: String,
    criterion: CriterionKind,
    q: f64,
    index: usize,
    lambda: f64,
    support: Vec<String>,
    intercept: f64,
    coefficients: Vec<Named>,
    standardized_coefficients: Vec<f64>,
    estimate: Option<FitSource>,
    criterion_value: f64,
    /// Criterion value (or CV error) per lambda; null where unavailable.
    values: Vec<Option<f64>>,
    lambdas: Vec<f64>,
}

pub fn run(args: &SelectArgs) -> anyhow::Result<()> {
    let spec = args.path.spec()?;
    let config = args.path.config()?;
    let criterion: CriterionKind = match args.criterion.parse() {
        Ok(c) => c,
        Err(e) => return usage(format!("{e} (expected one of AIC1, AIC2, BIC1, BIC2, LqAIC1, LqAIC2, LqBIC1, LqBIC2, CV)")),
    };
    let q = match QIndex::new(args.q) {
        Ok(q) => q,
        Err(e) => return usage(e.to_string()),
    };
    let data = read_dataset(&args.input.input, args.input.response.as_deref())?;
    let design = match standardize(&data.x, &data.y) {
        Ok(d) => d,
        Err(e) => return usage(format!("{}: {e}", args.input.input.display())),
    };
    if criterion == CriterionKind::Cv && (args.folds < 2 || args.folds > design.n()) {
        return usage(format!("--folds must lie in [2, {}], got {}", design.n(), args.folds));
    }
    report_rank(&design, &data.predictors);
    let path = solve_path(&design, &spec, &config)?;

    let (index, estimate, source, value, values) = if criterion == CriterionKind::Cv {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let cv = cross_validate_on_grid(&design, &spec, &path.lambdas, &config, args.folds, &mut rng)?;
        let i = cv.index;
        (i, path.coefs[i].clone(), None, cv.errors[i], cv.errors.into_iter().map(Some).collect())
    } else {
        let sel = select_model(&path, criterion, &design, q)
            .map_err(|e| anyhow::anyhow!("{criterion} could not select a model: {e}"))?;
        (sel.index, sel.fit.theta_hat, Some(sel.fit.source), sel.value, sel.values)
    };
    let (intercept, slopes) = design.raw_coefficients(&estimate);
    let report = Report {
        response: data.response.clone(),
        penalty: spec.kind.name().to_string(),
        criterion,
        q: args.q,
        index,
        lambda: path.lambdas[index],
        support: estimate.support().iter().map(|&j| data.predictors[j - 1].clone()).collect(),
        intercept,
        coefficients: data.predictors.iter().zip(slopes).map(|(n, v)| Named { name: n.clone(), value: v }).collect(),
        standardized_coefficients: estimate.theta().iter().copied().collect(),
        estimate: source,
        criterion_value: value,
        values,
        lambdas: path.lambdas.clone(),
    };
    let mut out = open_output(args.input.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
