use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use serde::{Deserialize, Serialize};

use qreg_core::inference::CriterionKind;
use qreg_core::simlab::{run_trials, summarize, CaseSummary, ExperimentCase, TrialResult};

use crate::config::ExperimentConfig;
use crate::data::{fmt17, fmt_opt};

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// TOML experiment configuration
    pub config: PathBuf,
    /// Directory for per-case CSV/JSON files and summary.csv
    #[arg(long, short = 'o', default_value = "results")]
    pub output_dir: PathBuf,
    /// Worker threads; defaults to the available parallelism
    #[arg(long)]
    pub workers: Option<usize>,
    /// Recompute cases whose output already exists
    #[arg(long)]
    pub force: bool,
    /// Also write a per-trial JSON archive for each case
    #[arg(long)]
    pub json: bool,
    /// Base seed used when the config has none
    #[arg(long, env = "QREG_SEED", default_value_t = 0)]
    pub seed: u64,
}

/// One line of a case CSV. Rows with `criterion = best` hold the
/// best-over-criteria result of a method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub q: String,
    pub n: usize,
    pub d: usize,
    pub r_nz: String,
    pub theta0: String,
    pub m_trials: usize,
    pub m_copies: usize,
    pub base_seed: u64,
    pub method: String,
    pub criterion: String,
    pub count: usize,
    pub available: usize,
    pub rate: String,
    pub mean_error: String,
    pub median_error: String,
    pub count_criterion: String,
    pub error_criterion: String,
}

pub const BEST: &str = "best";

#[derive(Serialize)]
struct Archive<'a> {
    case: &'a ExperimentCase,
    summary: &'a CaseSummary,
    trials: &'a [TrialResult],
}

fn rows(summary: &CaseSummary) -> Vec<Row> {
    let case = &summary.case;
    let trials = summary.trials as f64;
    let base = |method: &str, criterion: &str| Row {
        q: fmt17(case.q.value()),
        n: case.n,
        d: case.d,
        r_nz: fmt17(case.r_nz),
        theta0: fmt17(case.theta0),
        m_trials: case.m_trials,
        m_copies: case.m_copies,
        base_seed: case.base_seed,
        method: method.to_string(),
        criterion: criterion.to_string(),
        count: 0,
        available: 0,
        rate: String::new(),
        mean_error: String::new(),
        median_error: String::new(),
        count_criterion: String::new(),
        error_criterion: String::new(),
    };
    let mut out = Vec::new();
    for c in &summary.cells {
        out.push(Row {
            count: c.count,
            available: c.available,
            rate: fmt17(c.count as f64 / trials),
            mean_error: fmt_opt(c.mean_error),
            median_error: fmt_opt(c.median_error),
            ..base(c.method.name(), c.criterion.name())
        });
    }
    for b in &summary.best {
        out.push(Row {
            count: b.best_count,
            available: summary.trials,
            rate: fmt17(b.best_count as f64 / trials),
            mean_error: fmt_opt(b.best_mean_error),
            count_criterion: b.count_criterion.name().to_string(),
            error_criterion: b.error_criterion.map(|c| c.name().to_string()).unwrap_or_default(),
            ..base(b.method.name(), BEST)
        });
    }
    out
}

pub fn write_rows(path: &Path, rows: &[Row]) -> anyhow::Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::Writer::from_path(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_rows(path: &Path) -> anyhow::Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    r.deserialize().collect::<Result<_, _>>().with_context(|| format!("malformed results file {}", path.display()))
}

fn case_path(dir: &Path, case: &ExperimentCase, ext: &str) -> PathBuf {
    dir.join(format!("case_{}.{ext}", case.label()))
}

fn run_one(case: &ExperimentCase, criteria: &[CriterionKind], args: &ExperimentArgs, pool: &rayon::ThreadPool) -> anyhow::Result<Vec<Row>> {
    let trials = pool.install(|| run_trials(case, 0..case.m_trials))?;
    let summary = summarize(case, &trials, criteria);
    let rows = rows(&summary);
    if args.json {
        let file = fs::File::create(case_path(&args.output_dir, case, "json"))?;
        serde_json::to_writer(std::io::BufWriter::new(file), &Archive { case, summary: &summary, trials: &trials })?;
    }
    write_rows(&case_path(&args.output_dir, case, "csv"), &rows)?;
    Ok(rows)
}

pub fn run(args: &ExperimentArgs) -> anyhow::Result<()> {
    let config = ExperimentConfig::load(&args.config)?;
    let cases = config.cases(args.seed)?;
    let criteria = config.criteria()?;
    fs::create_dir_all(&args.output_dir).with_context(|| format!("cannot create {}", args.output_dir.display()))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = args.workers {
        if w == 0 {
            return crate::usage("--workers must be positive");
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build()?;

    let mut all_rows = Vec::new();
    let mut failed_cases = Vec::new();
    let (mut ran, mut skipped) = (0, 0);
    for case in &cases {
        let path = case_path(&args.output_dir, case, "csv");
        if path.exists() && !args.force {
            log::info!("skipping {} (output exists)", case.label());
            all_rows.extend(read_rows(&path)?);
            skipped += 1;
            continue;
        }
        log::info!("running {}", case.label());
        match run_one(case, &criteria, args, &pool) {
            Ok(rows) => {
                all_rows.extend(rows);
                ran += 1;
            }
            Err(e) => {
                eprintln!("case {} failed: {e:#}", case.label());
                failed_cases.push(case.label());
            }
        }
    }

    let summary_path = args.output_dir.join("summary.csv");
    let mut buf = csv::Writer::from_writer(Vec::new());
    for r in &all_rows {
        buf.serialize(r)?;
    }
    let content = buf.into_inner()?;
    if fs::read(&summary_path).ok().as_deref() != Some(content.as_slice()) {
        fs::write(&summary_path, &content)?;
    }

    println!("cases: {} run, {} skipped, {} failed", ran, skipped, failed_cases.len());
    let partial: Vec<&Row> = all_rows.iter().filter(|r| r.criterion != BEST && r.available < r.m_trials).collect();
    if !partial.is_empty() {
        println!("cells without a selection in some trials:");
        for r in partial {
            println!("  q={} n={} d={} r_nz={} theta0={} {} {}: {}/{} available", r.q, r.n, r.d, r.r_nz, r.theta0, r.method, r.criterion, r.available, r.m_trials);
        }
    }
    if !failed_cases.is_empty() {
        anyhow::bail!("{} case(s) failed: {}", failed_cases.len(), failed_cases.join(", "));
    }
    Ok(())
}
