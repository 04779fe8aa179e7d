use std::path::PathBuf;

use anyhow::{bail, Result};
use fmsys::commutative::{self, LatticeWeight};
use fmsys::noncommutative::simulate_words;
use fmsys::words::{DEFAULT_WORD_LEVEL_CAP, OMEGA_DEGREE_CAP};
use fmsys::{LatticeSequence, WordSequence};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Flavor, SystemDescription};
use crate::json::{self, vector_pairs, Pair};
use crate::signals::{self, InputKind, StateKind};
use crate::{emit, flavor_or, write_csv};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    pub config: PathBuf,
    /// Largest |n| or |α| reported.
    #[arg(long, default_value_t = 4)]
    pub level: usize,
    #[arg(long, value_enum, default_value_t = InputKind::Random)]
    pub input: InputKind,
    #[arg(long, value_enum, default_value_t = StateKind::Random)]
    pub x0: StateKind,
    /// Largest |n| or |α| carrying a random input value.
    #[arg(long, default_value_t = 2)]
    pub support: usize,
    /// Seed for random inputs and initial states.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the flavor recorded in the config.
    #[arg(long, value_enum)]
    pub flavor: Option<Flavor>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the trajectory as (signal, index, component, re, im) rows.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct Entry {
    index: Vec<usize>,
    u: Vec<Pair>,
    x: Vec<Pair>,
    y: Vec<Pair>,
}

#[derive(Serialize)]
struct LevelBalance {
    level: usize,
    /// Σ weight·‖u‖² over indices of size at most `level`.
    input_energy: f64,
    output_energy: f64,
    /// Weighted ‖x‖² summed over indices of size `level + 1`.
    next_state_energy: f64,
    /// `input_energy + ‖x0‖² − output_energy − next_state_energy`.
    slack: f64,
}

#[derive(Serialize)]
struct Balance {
    weight: &'static str,
    levels: Vec<LevelBalance>,
}

#[derive(Serialize)]
struct Report {
    flavor: &'static str,
    d: usize,
    level: usize,
    system_norm: f64,
    dissipative: bool,
    /// `index` is the multi-index `n` or the letters of `α` from `i_N` down to `i₁`.
    trajectory: Vec<Entry>,
    balance: Vec<Balance>,
}

fn level_balance(levels: usize, x0_energy: f64, mut energy: impl FnMut(&str, usize) -> f64) -> Vec<LevelBalance> {
    let (mut input, mut output) = (0.0, 0.0);
    (0..levels)
        .map(|level| {
            input += energy("u", level);
            output += energy("y", level);
            let next_state_energy = energy("x", level + 1);
            LevelBalance {
                level,
                input_energy: input,
                output_energy: output,
                next_state_energy,
                slack: input + x0_energy - output - next_state_energy,
            }
        })
        .collect()
}

fn lattice_report(
    desc: &SystemDescription,
    args: &Args,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Entry>, Vec<Balance>)> {
    let sys = desc.realization()?;
    if args.level + 1 > OMEGA_DEGREE_CAP as usize {
        bail!("--level {} exceeds the lattice cap {}", args.level, OMEGA_DEGREE_CAP - 1);
    }
    let x0 = signals::initial_state(args.x0, sys.dim_x(), rng);
    let u = signals::lattice_input(args.input, sys.arity(), sys.dim_u(), args.support, args.level, rng)?;
    let traj = commutative::simulate(&sys, &u, &x0, args.level as u32 + 1)?;
    let entries = traj
        .state
        .iter()
        .filter(|(n, _)| n.degree() as usize <= args.level)
        .map(|(n, x)| Entry {
            index: n.components().iter().map(|&c| c as usize).collect(),
            u: vector_pairs(&traj.input.value(n)),
            x: vector_pairs(x),
            y: vector_pairs(&traj.output.value(n)),
        })
        .collect();
    let pick = |s: &str| -> &LatticeSequence {
        match s {
            "u" => &traj.input,
            "y" => &traj.output,
            _ => &traj.state,
        }
    };
    let weighted = |weight: LatticeWeight| {
        level_balance(args.level, x0.norm_squared(), |s, level| {
            pick(s)
                .iter()
                .filter(|(n, _)| n.degree() as usize == level)
                .map(|(n, v)| weight.at(n).expect("degree under cap") * v.norm_squared())
                .sum()
        })
    };
    let balance = vec![
        Balance {
            weight: "multinomial",
            levels: weighted(LatticeWeight::Multinomial),
        },
        Balance {
            weight: "inverse_multinomial",
            levels: weighted(LatticeWeight::InverseMultinomial),
        },
    ];
    Ok((entries, balance))
}

fn word_report(desc: &SystemDescription, args: &Args, rng: &mut ChaCha8Rng) -> Result<(Vec<Entry>, Vec<Balance>)> {
    let sys = desc.realization()?;
    if args.level + 1 > DEFAULT_WORD_LEVEL_CAP {
        bail!("--level {} exceeds the word cap {}", args.level, DEFAULT_WORD_LEVEL_CAP - 1);
    }
    let x0 = signals::initial_state(args.x0, sys.dim_x(), rng);
    let u = signals::word_input(args.input, sys.arity(), sys.dim_u(), args.support, args.level, rng)?;
    let traj = simulate_words(&sys, &u, &x0, args.level + 1)?;
    let entries = traj
        .state
        .iter()
        .filter(|(w, _)| w.len() <= args.level)
        .map(|(w, x)| Entry {
            index: w.letters().collect(),
            u: vector_pairs(&traj.input.value(w)),
            x: vector_pairs(x),
            y: vector_pairs(&traj.output.value(w)),
        })
        .collect();
    let pick = |s: &str| -> &WordSequence {
        match s {
            "u" => &traj.input,
            "y" => &traj.output,
            _ => &traj.state,
        }
    };
    let levels = level_balance(args.level, x0.norm_squared(), |s, level| {
        pick(s).iter().filter(|(w, _)| w.len() == level).map(|(_, v)| v.norm_squared()).sum()
    });
    Ok((entries, vec![Balance { weight: "uniform", levels }]))
}

fn csv_rows(entries: &[Entry]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for e in entries {
        let index = e.index.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        for (signal, values) in [("u", &e.u), ("x", &e.x), ("y", &e.y)] {
            for (k, [re, im]) in values.iter().enumerate() {
                rows.push(vec![signal.into(), index.clone(), k.to_string(), format!("{re:.16e}"), format!("{im:.16e}")]);
            }
        }
    }
    rows
}

pub fn run(args: &Args) -> Result<()> {
    let desc = SystemDescription::load(&args.config)?;
    let sys = desc.realization()?;
    let flavor = flavor_or(desc.flavor, args.flavor);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (trajectory, balance) = match flavor {
        Flavor::Commutative => lattice_report(&desc, args, &mut rng)?,
        Flavor::Noncommutative => word_report(&desc, args, &mut rng)?,
    };
    if let Some(path) = &args.csv {
        write_csv(path, &["signal", "index", "component", "re", "im"], &csv_rows(&trajectory))?;
    }
    let report = Report {
        flavor: flavor.name(),
        d: sys.arity(),
        level: args.level,
        system_norm: sys.system_norm(),
        dissipative: sys.is_dissipative(),
        trajectory,
        balance,
    };
    emit(args.out.as_deref(), &json::to_string(&report)?)
}
