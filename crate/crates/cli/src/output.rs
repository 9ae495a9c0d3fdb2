//! Machine-readable output: JSON result objects and CSV tables.
//!
//! Complex numbers serialize as `{"re": .., "im": ..}`; roots as arrays
//! thereof. Everything except wall-time fields is byte-reproducible for
//! a fixed config and seed.

use bethe_vqe_core::bethe::RootVector;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

pub fn roots_json(roots: &RootVector) -> Vec<ComplexJson> {
    roots.roots.iter().map(|&z| z.into()).collect()
}

#[derive(Debug, Serialize)]
pub struct SolveBetheOutput {
    pub boundary: String,
    pub l: usize,
    pub m: usize,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_prime: Option<f64>,
    pub roots: Vec<ComplexJson>,
    pub residual_norm: f64,
    pub energy: ComplexJson,
    pub eigen_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct VqeOutput {
    pub mode: String,
    pub boundary: String,
    pub l: usize,
    pub m: usize,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_prime: Option<f64>,
    pub template: String,
    pub evaluator: String,
    pub seed: u64,
    pub roots: Vec<ComplexJson>,
    pub final_objective: f64,
    /// Exact ⟨H⟩ on the final state.
    pub energy: f64,
    /// Sector ground energy from exact diagonalization, for reference.
    pub e0_sector: f64,
    pub converged: bool,
    pub evaluations: usize,
    pub objective_trace: Vec<(usize, f64)>,
    pub wall_time_s: f64,
}

#[derive(Debug, Serialize)]
pub struct RestartsOutput {
    pub runs: Vec<VqeOutput>,
}

/// Root list as a compact semicolon-joined CSV field.
pub fn roots_csv_field(roots: &RootVector) -> String {
    roots
        .roots
        .iter()
        .map(|k| {
            if k.im == 0.0 {
                format!("{:.6}", k.re)
            } else {
                format!("{:.6}{:+.6}i", k.re, k.im)
            }
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// One row of the `tables` command output.
#[derive(Debug, Clone, Serialize)]
pub struct TableCsvRow {
    pub l: usize,
    pub m: usize,
    pub energy_exact: f64,
    pub roots_newton: String,
    pub roots_vqe: String,
    pub max_error: f64,
}

pub fn tables_csv(rows: &[TableCsvRow]) -> String {
    let mut out = String::from("L,M,energy_exact,roots_newton,roots_vqe,max_error\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.l, row.m, row.energy_exact, row.roots_newton, row.roots_vqe, row.max_error
        ));
    }
    out
}

/// One row of the `error-sweep` command output; fit columns repeat the
/// per-boundary fit on every row of that boundary (empty when the fit is
/// underdetermined).
#[derive(Debug, Clone, Serialize)]
pub struct SweepCsvRow {
    pub boundary: String,
    pub x: u64,
    pub mean_eps: f64,
    pub std_eps: f64,
    pub fit_a: Option<f64>,
    pub fit_b: Option<f64>,
    pub fit_r2: Option<f64>,
}

pub fn sweep_csv(rows: &[SweepCsvRow]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("boundary,x,mean_eps,std_eps,fit_a,fit_b,fit_r2\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.boundary,
            row.x,
            row.mean_eps,
            row.std_eps,
            opt(row.fit_a),
            opt(row.fit_b),
            opt(row.fit_r2)
        ));
    }
    out
}
