//! The benchmark manifest: model parameters, templates, tuned starting
//! points, seeds, and published reference values for every table row.
//! The data file is versioned in the repo and compiled in.

use anyhow::{bail, Context, Result};
use bethe_vqe_core::bethe::RootVector;
use bethe_vqe_core::model::{Boundary, ChainModel};
use bethe_vqe_core::vqe::RootTemplate;
use serde::Deserialize;

use crate::parse::{parse_complex, PrintedComplex};

const TABLES_TOML: &str = include_str!("../data/tables.toml");

#[derive(Debug, Deserialize)]
struct RawManifest {
    row: Vec<RawRow>,
}

#[derive(Debug, Deserialize)]
struct RawRow {
    table: u8,
    boundary: String,
    l: usize,
    m: usize,
    delta: f64,
    #[serde(default)]
    h: f64,
    #[serde(default)]
    h_prime: f64,
    energy: f64,
    true_roots: Vec<String>,
    statevector_roots: Vec<String>,
    template: String,
    theta0: Vec<f64>,
    seed: u64,
    vqe_tol: f64,
    aer_tol: f64,
    #[serde(default)]
    max_iterations: Option<usize>,
    mode: String,
}

/// Objective a table row is solved with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMode {
    Ground,
    Excited,
}

/// One fully parsed manifest row.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub table: u8,
    pub model: ChainModel,
    pub m: usize,
    /// Published energy as printed.
    pub energy: f64,
    /// Published roots with their printed precision.
    pub true_roots: Vec<PrintedComplex>,
    pub statevector_roots: Vec<PrintedComplex>,
    pub template: RootTemplate,
    pub theta0: Vec<f64>,
    pub seed: u64,
    pub vqe_tol: f64,
    pub aer_tol: f64,
    pub max_iterations: Option<usize>,
    pub mode: RowMode,
}

impl TableRow {
    pub fn true_root_vector(&self) -> RootVector {
        RootVector {
            roots: self.true_roots.iter().map(|p| p.value).collect(),
            boundary: self.model.boundary,
        }
    }

    pub fn statevector_root_vector(&self) -> RootVector {
        RootVector {
            roots: self.statevector_roots.iter().map(|p| p.value).collect(),
            boundary: self.model.boundary,
        }
    }
}

fn parse_row(raw: &RawRow) -> Result<TableRow> {
    let model = match raw.boundary.as_str() {
        "closed" => ChainModel::closed(raw.l, raw.delta)?,
        "open" => ChainModel::open(raw.l, raw.delta, raw.h, raw.h_prime)?,
        other => bail!("unknown boundary '{other}'"),
    };
    let true_roots: Vec<PrintedComplex> = raw
        .true_roots
        .iter()
        .map(|s| parse_complex(s))
        .collect::<Result<_>>()?;
    let statevector_roots: Vec<PrintedComplex> = raw
        .statevector_roots
        .iter()
        .map(|s| parse_complex(s))
        .collect::<Result<_>>()?;
    let template: RootTemplate = raw
        .template
        .parse()
        .with_context(|| format!("template of table {} L={} M={}", raw.table, raw.l, raw.m))?;
    if template.num_roots() != raw.m
        || true_roots.len() != raw.m
        || statevector_roots.len() != raw.m
        || raw.theta0.len() != template.num_params()
    {
        bail!("inconsistent row for table {} L={} M={}", raw.table, raw.l, raw.m);
    }
    let mode = match raw.mode.as_str() {
        "ground" => RowMode::Ground,
        "excited" => RowMode::Excited,
        other => bail!("unknown mode '{other}'"),
    };
    Ok(TableRow {
        table: raw.table,
        model,
        m: raw.m,
        energy: raw.energy,
        true_roots,
        statevector_roots,
        template,
        theta0: raw.theta0.clone(),
        seed: raw.seed,
        vqe_tol: raw.vqe_tol,
        aer_tol: raw.aer_tol,
        max_iterations: raw.max_iterations,
        mode,
    })
}

/// All manifest rows, in file order.
pub fn all_rows() -> Result<Vec<TableRow>> {
    let raw: RawManifest = toml::from_str(TABLES_TOML).context("parsing bundled manifest")?;
    raw.row.iter().map(parse_row).collect()
}

/// The rows of one table (1..=4), in file order.
pub fn table_rows(table: u8) -> Result<Vec<TableRow>> {
    if !(1..=4).contains(&table) {
        bail!("table must be 1..4, got {table}");
    }
    let rows: Vec<TableRow> =
        all_rows()?.into_iter().filter(|r| r.table == table).collect();
    if rows.is_empty() {
        bail!("no manifest rows for table {table}");
    }
    Ok(rows)
}

/// The ground-state manifest row for an error-sweep target.
pub fn ground_row(boundary: Boundary, l: usize) -> Result<TableRow> {
    let table = match boundary {
        Boundary::Closed => 1,
        Boundary::Open => 2,
    };
    table_rows(table)?
        .into_iter()
        .find(|r| r.model.l == l)
        .with_context(|| format!("no ground-state manifest row for L = {l}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_loads_and_is_consistent() {
        let rows = all_rows().unwrap();
        assert_eq!(rows.len(), 19);
        assert_eq!(table_rows(1).unwrap().len(), 3);
        assert_eq!(table_rows(2).unwrap().len(), 5);
        assert_eq!(table_rows(3).unwrap().len(), 6);
        assert_eq!(table_rows(4).unwrap().len(), 6);
        for row in &rows {
            assert_eq!(row.template.num_roots(), row.m);
            assert_eq!(row.theta0.len(), row.template.num_params());
        }
    }

    #[test]
    fn ground_rows_resolve_for_l4() {
        assert_eq!(ground_row(Boundary::Closed, 4).unwrap().m, 2);
        assert_eq!(ground_row(Boundary::Open, 4).unwrap().m, 2);
        assert!(ground_row(Boundary::Closed, 3).is_err());
    }
}
