//! Experiment configuration file.
//!
//! ```toml
//! schema_version = 1
//! base_seed = 7
//! m_trials = 200
//! m_copies = 100
//! q = [1, "13/11", 1.5]      # scalars or lists; fractions as strings
//! n = 100
//! d = [10, 100]
//! r_nz = [0.2, 0.4, 0.6, 0.8]
//! theta0 = [1, 10, 100, 1000]
//! criteria = ["BIC2", "CV"]  # optional: criteria for the best-over-criteria rows
//! ```
//!
//! Lists expand as a Cartesian product, `q` outermost and `theta0` innermost.

use std::path::Path;

use serde::Deserialize;

use qreg_core::inference::CriterionKind;
use qreg_core::simlab::ExperimentCase;

use crate::{usage, UsageError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Value(f64),
    Text(String),
}

impl Number {
    fn value(&self) -> anyhow::Result<f64> {
        match self {
            Number::Value(v) => Ok(*v),
            Number::Text(s) => {
                let parsed = match s.split_once('/') {
                    Some((a, b)) => a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok()).map(|(a, b)| a / b),
                    None => s.trim().parse().ok(),
                };
                parsed.filter(|v| v.is_finite()).ok_or_else(|| UsageError(format!("cannot read '{s}' as a number")).into())
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Grid<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> Grid<T> {
    fn items(&self, field: &str) -> anyhow::Result<Vec<T>> {
        let items = match self {
            Grid::One(v) => vec![v.clone()],
            Grid::Many(v) => v.clone(),
        };
        if items.is_empty() {
            return usage(format!("'{field}' must not be an empty list"));
        }
        Ok(items)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub base_seed: Option<u64>,
    pub m_trials: usize,
    #[serde(default = "default_copies")]
    pub m_copies: usize,
    pub q: Grid<Number>,
    pub n: Grid<usize>,
    pub d: Grid<usize>,
    pub r_nz: Grid<Number>,
    pub theta0: Grid<Number>,
    #[serde(default)]
    pub criteria: Option<Vec<String>>,
}

fn default_copies() -> usize {
    100
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        let config: ExperimentConfig =
            toml::from_str(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        if config.schema_version != SCHEMA_VERSION {
            return usage(format!(
                "{}: unsupported schema_version {} (expected {SCHEMA_VERSION})",
                path.display(),
                config.schema_version
            ));
        }
        Ok(config)
    }

    /// Expands and validates every case before any work starts.
    pub fn cases(&self, fallback_seed: u64) -> anyhow::Result<Vec<ExperimentCase>> {
        let qs = self.q.items("q")?;
        let ns = self.n.items("n")?;
        let ds = self.d.items("d")?;
        let rs = self.r_nz.items("r_nz")?;
        let ts = self.theta0.items("theta0")?;
        let seed = self.base_seed.unwrap_or(fallback_seed);
        let mut cases = Vec::new();
        for q in &qs {
            for &n in &ns {
                for &d in &ds {
                    for r in &rs {
                        for t in &ts {
                            let case = ExperimentCase::new(q.value()?, n, d, r.value()?, t.value()?, self.m_trials)
                                .map_err(|e| UsageError(e.to_string()))?
                                .with_copies(self.m_copies)
                                .with_seed(seed);
                            case.validate().map_err(|e| UsageError(e.to_string()))?;
                            cases.push(case);
                        }
                    }
                }
            }
        }
        Ok(cases)
    }

    pub fn criteria(&self) -> anyhow::Result<Vec<CriterionKind>> {
        match &self.criteria {
            None => Ok(CriterionKind::ALL.to_vec()),
            Some(list) if list.is_empty() => usage("'criteria' must not be an empty list"),
            Some(list) => list.iter().map(|s| s.parse().map_err(|e: qreg_core::inference::InferenceError| UsageError(e.to_string()).into())).collect(),
        }
    }
}
