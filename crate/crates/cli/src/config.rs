//! The system description file.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use fmsys::algebra::c64;
use fmsys::{ComplexMatrix, SystemRealization};
use serde::{Deserialize, Serialize};

use crate::json::{matrix_rows, Pair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Commutative,
    Noncommutative,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Commutative => "commutative",
            Flavor::Noncommutative => "noncommutative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub dim_x: usize,
    pub dim_u: usize,
    pub dim_y: usize,
    #[serde(default = "one")]
    pub dim_k: usize,
}

fn one() -> usize {
    1
}

pub type MatrixRepr = Vec<Vec<Pair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDescription {
    pub d: usize,
    pub flavor: Flavor,
    pub dims: Dims,
    #[serde(rename = "A")]
    pub a: Vec<MatrixRepr>,
    #[serde(rename = "B")]
    pub b: Vec<MatrixRepr>,
    #[serde(rename = "C")]
    pub c: MatrixRepr,
    #[serde(rename = "D")]
    pub feedthrough: MatrixRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn parse_matrix(field: &str, m: &MatrixRepr, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if m.len() != rows {
        bail!("{field}: {} rows, expected {rows}", m.len());
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            bail!("{field}: row {i} has {} entries, expected {cols}", row.len());
        }
        for (j, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                bail!("{field}: entry ({i}, {j}) is not finite");
            }
            out[(i, j)] = c64(*re, *im);
        }
    }
    Ok(out)
}

impl SystemDescription {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn from_realization(sys: &SystemRealization, flavor: Flavor, dim_k: usize, seed: Option<u64>) -> Self {
        Self {
            d: sys.arity(),
            flavor,
            dims: Dims {
                dim_x: sys.dim_x(),
                dim_u: sys.dim_u(),
                dim_y: sys.dim_y(),
                dim_k,
            },
            a: sys.a().iter().map(matrix_rows).collect(),
            b: sys.b().iter().map(matrix_rows).collect(),
            c: matrix_rows(sys.c()),
            feedthrough: matrix_rows(sys.d()),
            seed,
        }
    }

    pub fn realization(&self) -> Result<SystemRealization> {
        let Dims { dim_x, dim_u, dim_y, dim_k } = self.dims;
        if self.d == 0 {
            bail!("d: must be at least 1");
        }
        if dim_k == 0 {
            bail!("dims.dim_k: must be at least 1");
        }
        if self.a.len() != self.d {
            bail!("A: {} matrices, expected d = {}", self.a.len(), self.d);
        }
        if self.b.len() != self.d {
            bail!("B: {} matrices, expected d = {}", self.b.len(), self.d);
        }
        let a = self
            .a
            .iter()
            .enumerate()
            .map(|(k, m)| parse_matrix(&format!("A[{}]", k + 1), m, dim_x, dim_x))
            .collect::<Result<Vec<_>>>()?;
        let b = self
            .b
            .iter()
            .enumerate()
            .map(|(k, m)| parse_matrix(&format!("B[{}]", k + 1), m, dim_x, dim_u))
            .collect::<Result<Vec<_>>>()?;
        let c = parse_matrix("C", &self.c, dim_y, dim_x)?;
        let d = parse_matrix("D", &self.feedthrough, dim_y, dim_u)?;
        Ok(SystemRealization::new(a, b, c, d)?)
    }
}
