use clap::{Args, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qreg_core::{q_exp, q_log, QIndex, QNormal};

use crate::usage;

#[derive(Args, Debug)]
pub struct QmathArgs {
    #[command(subcommand)]
    pub function: Function,
}

#[derive(Subcommand, Debug)]
pub enum Function {
    /// q-logarithm of u > 0
    Qlog {
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        #[arg(long)]
        q: f64,
    },
    /// q-exponential of u
    Qexp {
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        #[arg(long)]
        q: f64,
    },
    /// q-normal density at y
    Density {
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        xi: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// Normalizing constant Z_q
    Zq {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// Draws from the q-normal distribution, one per line
    Sample {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        xi: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, env = "QREG_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn index(q: f64) -> anyhow::Result<QIndex> {
    QIndex::new(q).or_else(|e| usage(e.to_string()))
}

fn dist(q: f64, xi: f64, sigma: f64) -> anyhow::Result<QNormal> {
    QNormal::new(index(q)?, xi, sigma).or_else(|e| usage(e.to_string()))
}

pub fn run(args: &QmathArgs) -> anyhow::Result<()> {
    match args.function {
        Function::Qlog { u, q } => {
            let v = q_log(u, index(q)?).or_else(|e| usage(e.to_string()))?;
            println!("{v}");
        }
        Function::Qexp { u, q } => println!("{}", q_exp(u, index(q)?)),
        Function::Density { y, q, xi, sigma } => println!("{}", dist(q, xi, sigma)?.density(y)),
        Function::Zq { q, sigma } => println!("{}", dist(q, 0.0, sigma)?.normalizing_constant()),
        Function::Sample { q, count, xi, sigma, seed } => {
            let d = dist(q, xi, sigma)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for v in d.sample(count, &mut rng) {
                println!("{v}");
            }
        }
    }
    Ok(())
}
