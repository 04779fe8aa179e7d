use std::path::PathBuf;

use anyhow::{Context, Result};
use fmsys::algebra::{c64, operator_norm};
use fmsys::commutative::{self, EvaluationPoint};
use fmsys::noncommutative::{
    nc_observation_eval, nc_observation_series, nc_transfer_eval, nc_transfer_series, series_level_for, series_ratio,
    series_tail_bound,
};
use fmsys::{ComplexMatrix, RowContractionTuple, SystemRealization};
use serde::{Deserialize, Serialize};

use crate::config::{MatrixRepr, SystemDescription};
use crate::json::{self, matrix_rows, Pair};
use crate::{emit, write_csv};

/// Deepest series truncation `transfer --series` will use.
const MAX_SERIES_LEVEL: usize = 2000;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    pub config: PathBuf,
    /// JSON array of `{"z": [[re, im], …]}` and `{"tuple": [T₁, …, T_d]}` records.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also report the gap between the truncated series and the resolvent.
    #[arg(long)]
    pub series: bool,
    /// Target for the series tail bound when `--series` is set.
    #[arg(long, default_value_t = 1e-9)]
    pub series_tol: f64,
    /// Also write F and W entries as (point, function, row, col, re, im) rows.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointSpec {
    #[serde(default)]
    z: Option<Vec<Pair>>,
    #[serde(default)]
    tuple: Option<Vec<MatrixRepr>>,
}

#[derive(Serialize)]
struct SeriesCheck {
    level: usize,
    tail_bound: f64,
    f_discrepancy: f64,
    w_discrepancy: f64,
    within_bound: bool,
}

#[derive(Serialize)]
struct PointReport {
    index: usize,
    kind: &'static str,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(rename = "F", skip_serializing_if = "Option::is_none")]
    f: Option<Vec<Vec<Pair>>>,
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    w: Option<Vec<Vec<Pair>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    series: Option<SeriesCheck>,
}

#[derive(Serialize)]
struct Report {
    d: usize,
    system_norm: f64,
    dissipative: bool,
    points: Vec<PointReport>,
}

fn parse_tuple(blocks: &[MatrixRepr]) -> Result<RowContractionTuple> {
    let k = blocks.first().map_or(0, |b| b.len());
    let mats = blocks
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let mut m = ComplexMatrix::zeros(b.len(), k);
            for (r, row) in b.iter().enumerate() {
                anyhow::ensure!(row.len() == k, "T{}: row {r} has {} entries, expected {k}", j + 1, row.len());
                for (c, [re, im]) in row.iter().enumerate() {
                    m[(r, c)] = c64(*re, *im);
                }
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RowContractionTuple::new(mats)?)
}

struct Evaluated {
    f: ComplexMatrix,
    w: ComplexMatrix,
    series: Option<SeriesCheck>,
}

fn series_check(sys: &SystemRealization, t: &RowContractionTuple, f: &ComplexMatrix, w: &ComplexMatrix, tol: f64) -> Result<SeriesCheck> {
    let ratio = series_ratio(sys, t);
    let level = series_level_for(ratio, tol)
        .filter(|&n| n <= MAX_SERIES_LEVEL)
        .with_context(|| format!("contraction ratio {ratio} too close to 1 for a tail of {tol:e}"))?;
    let tail_bound = series_tail_bound(ratio, level);
    let f_discrepancy = operator_norm(&(nc_transfer_series(sys, t, level)? - f))?;
    let w_discrepancy = operator_norm(&(nc_observation_series(sys, t, level)? - w))?;
    let roundoff = 1e-12;
    Ok(SeriesCheck {
        level,
        tail_bound,
        f_discrepancy,
        w_discrepancy,
        within_bound: f_discrepancy <= tail_bound + roundoff && w_discrepancy <= tail_bound + roundoff,
    })
}

fn evaluate(sys: &SystemRealization, spec: &PointSpec, args: &Args) -> Result<(&'static str, Evaluated)> {
    match (&spec.z, &spec.tuple) {
        (Some(z), None) => {
            let coords: Vec<_> = z.iter().map(|[re, im]| c64(*re, *im)).collect();
            let point = EvaluationPoint::new(coords.clone())?;
            let f = commutative::transfer_eval(sys, &point)?;
            let w = commutative::observation_eval(sys, &point)?;
            let series = if args.series {
                Some(series_check(sys, &RowContractionTuple::from_scalars(&coords)?, &f, &w, args.series_tol)?)
            } else {
                None
            };
            Ok(("z", Evaluated { f, w, series }))
        }
        (None, Some(blocks)) => {
            let t = parse_tuple(blocks)?;
            let f = nc_transfer_eval(sys, &t)?;
            let w = nc_observation_eval(sys, &t)?;
            let series = if args.series { Some(series_check(sys, &t, &f, &w, args.series_tol)?) } else { None };
            Ok(("tuple", Evaluated { f, w, series }))
        }
        _ => anyhow::bail!("a point needs exactly one of \"z\" or \"tuple\""),
    }
}

pub fn run(args: &Args) -> Result<()> {
    let desc = SystemDescription::load(&args.config)?;
    let sys = desc.realization()?;
    let text = std::fs::read_to_string(&args.points).with_context(|| format!("reading {}", args.points.display()))?;
    let specs: Vec<PointSpec> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", args.points.display()))?;

    let mut points = Vec::with_capacity(specs.len());
    let mut rows = Vec::new();
    for (index, spec) in specs.iter().enumerate() {
        let kind_hint = if spec.tuple.is_some() { "tuple" } else { "z" };
        points.push(match evaluate(&sys, spec, args) {
            Ok((kind, e)) => {
                for (name, m) in [("F", &e.f), ("W", &e.w)] {
                    for r in 0..m.nrows() {
                        for c in 0..m.ncols() {
                            let z = m[(r, c)];
                            rows.push(vec![
                                index.to_string(),
                                name.into(),
                                r.to_string(),
                                c.to_string(),
                                format!("{:.16e}", z.re),
                                format!("{:.16e}", z.im),
                            ]);
                        }
                    }
                }
                PointReport {
                    index,
                    kind,
                    valid: true,
                    error: None,
                    f: Some(matrix_rows(&e.f)),
                    w: Some(matrix_rows(&e.w)),
                    series: e.series,
                }
            }
            Err(err) => PointReport {
                index,
                kind: kind_hint,
                valid: false,
                error: Some(format!("{err:#}")),
                f: None,
                w: None,
                series: None,
            },
        });
    }
    if let Some(path) = &args.csv {
        write_csv(path, &["point", "function", "row", "col", "re", "im"], &rows)?;
    }
    let report = Report {
        d: sys.arity(),
        system_norm: sys.system_norm(),
        dissipative: sys.is_dissipative(),
        points,
    };
    emit(args.out.as_deref(), &json::to_string(&report)?)
}
