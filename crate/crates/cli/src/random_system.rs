use std::path::PathBuf;

use anyhow::{bail, Result};
use fmsys::random::{random_dissipative_system, DEFAULT_TARGET_NORM};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Flavor, SystemDescription};
use crate::{emit, json};

#[derive(clap::Args)]
pub struct Args {
    /// Number of letters / lattice directions.
    #[arg(short = 'd', long, default_value_t = 2)]
    pub arity: usize,
    #[arg(long, default_value_t = 2)]
    pub dim_x: usize,
    #[arg(long, default_value_t = 1)]
    pub dim_u: usize,
    #[arg(long, default_value_t = 1)]
    pub dim_y: usize,
    #[arg(long, default_value_t = 1)]
    pub dim_k: usize,
    #[arg(long, value_enum, default_value_t = Flavor::Noncommutative)]
    pub flavor: Flavor,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Norm of the generated system matrix; values above 1 give non-dissipative systems.
    #[arg(long, default_value_t = DEFAULT_TARGET_NORM)]
    pub norm: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &Args) -> Result<()> {
    if !(args.norm > 0.0 && args.norm.is_finite()) {
        bail!("--norm must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let sys = random_dissipative_system(&mut rng, args.arity, args.dim_x, args.dim_u, args.dim_y, args.norm.min(1.0))?;
    let sys = if args.norm > 1.0 { sys.with_system_norm(args.norm)? } else { sys };
    let desc = SystemDescription::from_realization(&sys, args.flavor, args.dim_k, Some(args.seed));
    emit(args.out.as_deref(), &json::to_string(&desc)?)
}
