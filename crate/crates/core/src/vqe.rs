//! Variational estimation of Bethe roots.
//!
//! Roots are packed into a real parameter vector through a
//! [`RootTemplate`] (real roots, conjugate pairs, free complex roots),
//! a derivative-free optimizer minimizes either the energy (ground
//! states) or the Hamiltonian variance (excited states) of the Bethe
//! trial state, and the optimum is unpacked and canonicalized back into
//! momenta. Degenerate trial states (repeated roots) evaluate to a large
//! finite penalty so the simplex can cross those ridges.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::bethe::{bethe_state, BetheError, RootVector};
use crate::betheq::canonicalize;
use crate::model::{Boundary, ChainModel};
use crate::sim::{build_evaluator, expval_exact, EvaluatorKind, SimError};
use crate::streams::{derive_seed, substream};
use rand::Rng;

/// Objective value reported when the trial state collapses to null.
pub const NULL_STATE_PENALTY: f64 = 1e6;

const DOMAIN_RESTART_SAMPLE: u64 = 0x5A;
const DOMAIN_RESTART_SEED: u64 = 0x5B;

#[derive(Debug, Error)]
pub enum VqeError {
    #[error("template expands to {template} roots but M = {m}")]
    TemplateMismatch { template: usize, m: usize },
    #[error("parameter vector has {got} entries, template needs {expected}")]
    ParameterCountMismatch { expected: usize, got: usize },
    #[error("root vector does not have the structure of the template")]
    TemplateStructure,
    #[error("cannot parse template spec '{0}' (expected a comma list of r, p, c)")]
    BadTemplateSpec(String),
    #[error("every simplex vertex evaluated to the null-state penalty")]
    EvaluationFailure,
    #[error("unknown optimizer '{0}'")]
    UnknownOptimizer(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Bethe(#[from] BetheError),
}

/// One entry of a root template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateEntry {
    /// One real parameter → one real root.
    RealRoot,
    /// Parameters (a, b) → the conjugate pair (a + bi, a − bi).
    ConjugatePair,
    /// Parameters (a, b) → the single root a + bi.
    FreeComplex,
}

/// Real-parameter structure of a root vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootTemplate {
    entries: Vec<TemplateEntry>,
}

impl RootTemplate {
    pub fn new(entries: Vec<TemplateEntry>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[TemplateEntry] {
        &self.entries
    }

    pub fn num_roots(&self) -> usize {
        self.entries
            .iter()
            .map(|e| match e {
                TemplateEntry::ConjugatePair => 2,
                _ => 1,
            })
            .sum()
    }

    pub fn num_params(&self) -> usize {
        self.entries
            .iter()
            .map(|e| match e {
                TemplateEntry::RealRoot => 1,
                _ => 2,
            })
            .sum()
    }
}

impl FromStr for RootTemplate {
    type Err = VqeError;

    /// Comma list of `r` (real), `p` (conjugate pair), `c` (free complex),
    /// e.g. `"p,r"`.
    fn from_str(s: &str) -> Result<Self, VqeError> {
        let mut entries = Vec::new();
        for tok in s.split(',') {
            match tok.trim() {
                "r" => entries.push(TemplateEntry::RealRoot),
                "p" => entries.push(TemplateEntry::ConjugatePair),
                "c" => entries.push(TemplateEntry::FreeComplex),
                other => return Err(VqeError::BadTemplateSpec(other.to_string())),
            }
        }
        if entries.is_empty() {
            return Err(VqeError::BadTemplateSpec(s.to_string()));
        }
        Ok(Self { entries })
    }
}

impl std::fmt::Display for RootTemplate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let toks: Vec<&str> = self
            .entries
            .iter()
            .map(|e| match e {
                TemplateEntry::RealRoot => "r",
                TemplateEntry::ConjugatePair => "p",
                TemplateEntry::FreeComplex => "c",
            })
            .collect();
        write!(f, "{}", toks.join(","))
    }
}

/// Flatten a root vector into template parameters; exact inverse of
/// [`unpack`] for vectors that carry the template structure.
pub fn pack(k_vec: &RootVector, template: &RootTemplate) -> Result<Vec<f64>, VqeError> {
    if k_vec.m() != template.num_roots() {
        return Err(VqeError::TemplateMismatch { template: template.num_roots(), m: k_vec.m() });
    }
    let mut theta = Vec::with_capacity(template.num_params());
    let mut i = 0;
    for entry in &template.entries {
        match entry {
            TemplateEntry::RealRoot => {
                if k_vec.roots[i].im != 0.0 {
                    return Err(VqeError::TemplateStructure);
                }
                theta.push(k_vec.roots[i].re);
                i += 1;
            }
            TemplateEntry::ConjugatePair => {
                let (a, b) = (k_vec.roots[i], k_vec.roots[i + 1]);
                if a.re != b.re || a.im != -b.im {
                    return Err(VqeError::TemplateStructure);
                }
                theta.push(a.re);
                theta.push(a.im);
                i += 2;
            }
            TemplateEntry::FreeComplex => {
                theta.push(k_vec.roots[i].re);
                theta.push(k_vec.roots[i].im);
                i += 1;
            }
        }
    }
    Ok(theta)
}

/// Expand template parameters into a root vector for `boundary`.
pub fn unpack(
    theta: &[f64],
    template: &RootTemplate,
    boundary: Boundary,
) -> Result<RootVector, VqeError> {
    if theta.len() != template.num_params() {
        return Err(VqeError::ParameterCountMismatch {
            expected: template.num_params(),
            got: theta.len(),
        });
    }
    let mut roots = Vec::with_capacity(template.num_roots());
    let mut i = 0;
    for entry in &template.entries {
        match entry {
            TemplateEntry::RealRoot => {
                roots.push(Complex64::new(theta[i], 0.0));
                i += 1;
            }
            TemplateEntry::ConjugatePair => {
                roots.push(Complex64::new(theta[i], theta[i + 1]));
                roots.push(Complex64::new(theta[i], -theta[i + 1]));
                i += 2;
            }
            TemplateEntry::FreeComplex => {
                roots.push(Complex64::new(theta[i], theta[i + 1]));
                i += 2;
            }
        }
    }
    Ok(RootVector { roots, boundary })
}

/// Stopping rules and simplex scale for the optimizer.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    pub initial_simplex_scale: f64,
    pub xtol: f64,
    pub ftol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { max_iterations: 1000, initial_simplex_scale: 0.3, xtol: 1e-6, ftol: 1e-9 }
    }
}

/// Result of a [`minimize`] run: the best vertex, the per-iteration
/// best-value trace, and whether the stopping tolerances were met.
#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub theta: Vec<f64>,
    pub trace: Vec<(usize, f64)>,
    pub converged: bool,
    pub evaluations: usize,
}

impl MinimizeOutcome {
    pub fn final_value(&self) -> f64 {
        self.trace.last().expect("trace is never empty").1
    }
}

/// Derivative-free minimizers, pluggable behind a common contract so a
/// different method can be substituted without touching the VQE drivers.
pub trait Optimizer {
    fn name(&self) -> &'static str;
    fn minimize(
        &self,
        objective: &mut dyn FnMut(&[f64]) -> f64,
        theta0: &[f64],
        cfg: &OptimizerConfig,
    ) -> MinimizeOutcome;
}

/// Nelder–Mead simplex descent with the standard coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
#[derive(Debug, Default, Clone, Copy)]
pub struct NelderMead;

impl Optimizer for NelderMead {
    fn name(&self) -> &'static str {
        "nelder-mead"
    }

    fn minimize(
        &self,
        objective: &mut dyn FnMut(&[f64]) -> f64,
        theta0: &[f64],
        cfg: &OptimizerConfig,
    ) -> MinimizeOutcome {
        let n = theta0.len();
        assert!(n >= 1, "objective must have at least one parameter");
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            objective(x)
        };

        // Initial simplex: theta0 plus one step along each axis.
        let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let f0 = eval(theta0);
        vertices.push((theta0.to_vec(), f0));
        for i in 0..n {
            let mut v = theta0.to_vec();
            v[i] += cfg.initial_simplex_scale;
            let f = eval(&v);
            vertices.push((v, f));
        }

        let mut trace = Vec::new();
        let mut converged = false;
        for iteration in 0..cfg.max_iterations {
            vertices.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            trace.push((iteration, vertices[0].1));

            let diameter = vertices[1..]
                .iter()
                .map(|(v, _)| {
                    v.iter()
                        .zip(vertices[0].0.iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            let spread = vertices[n].1 - vertices[0].1;
            if diameter < cfg.xtol && spread < cfg.ftol {
                converged = true;
                break;
            }

            let mut centroid = vec![0.0; n];
            for (v, _) in &vertices[..n] {
                for (c, x) in centroid.iter_mut().zip(v.iter()) {
                    *c += x;
                }
            }
            for c in centroid.iter_mut() {
                *c /= n as f64;
            }
            let worst = vertices[n].clone();

            let reflected: Vec<f64> = centroid
                .iter()
                .zip(worst.0.iter())
                .map(|(c, w)| c + (c - w))
                .collect();
            let f_reflected = eval(&reflected);

            if f_reflected < vertices[0].1 {
                let expanded: Vec<f64> = centroid
                    .iter()
                    .zip(worst.0.iter())
                    .map(|(c, w)| c + 2.0 * (c - w))
                    .collect();
                let f_expanded = eval(&expanded);
                vertices[n] = if f_expanded < f_reflected {
                    (expanded, f_expanded)
                } else {
                    (reflected, f_reflected)
                };
            } else if f_reflected < vertices[n - 1].1 {
                vertices[n] = (reflected, f_reflected);
            } else {
                let contracted: Vec<f64> = if f_reflected < worst.1 {
                    centroid
                        .iter()
                        .zip(reflected.iter())
                        .map(|(c, r)| c + 0.5 * (r - c))
                        .collect()
                } else {
                    centroid
                        .iter()
                        .zip(worst.0.iter())
                        .map(|(c, w)| c + 0.5 * (w - c))
                        .collect()
                };
                let f_contracted = eval(&contracted);
                if f_contracted < f_reflected.min(worst.1) {
                    vertices[n] = (contracted, f_contracted);
                } else {
                    // Shrink toward the best vertex.
                    let best = vertices[0].0.clone();
                    for (v, f) in vertices[1..].iter_mut() {
                        for (x, b) in v.iter_mut().zip(best.iter()) {
                            *x = b + 0.5 * (*x - b);
                        }
                        *f = eval(v);
                    }
                }
            }
        }

        vertices.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        if trace.last().map(|&(_, f)| f != vertices[0].1).unwrap_or(true) {
            let next_index = trace.last().map(|&(i, _)| i + 1).unwrap_or(0);
            trace.push((next_index, vertices[0].1));
        }
        MinimizeOutcome { theta: vertices[0].0.clone(), trace, converged, evaluations }
    }
}

/// Optimizer registry; `nelder-mead` is the reference implementation.
pub fn optimizer_from_name(name: &str) -> Result<Box<dyn Optimizer>, VqeError> {
    match name.trim() {
        "nelder-mead" => Ok(Box::new(NelderMead)),
        other => Err(VqeError::UnknownOptimizer(other.to_string())),
    }
}

/// Minimize `objective` from `theta0` with the default optimizer.
pub fn minimize(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    theta0: &[f64],
    cfg: &OptimizerConfig,
) -> MinimizeOutcome {
    NelderMead.minimize(objective, theta0, cfg)
}

/// Which functional of the trial state the optimizer minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VqeObjective {
    /// ⟨H⟩ — ground states, by the variational theorem.
    Energy,
    /// ⟨H²⟩ − ⟨H⟩² — zero exactly on eigenstates, any of them.
    Variance,
}

/// Outcome of one VQE run.
#[derive(Debug, Clone)]
pub struct VqeResult {
    /// Canonicalized best roots.
    pub roots: RootVector,
    pub objective_trace: Vec<(usize, f64)>,
    pub final_objective: f64,
    pub evaluations: usize,
    pub evaluator: EvaluatorKind,
    pub seed: u64,
    pub converged: bool,
    /// Exact ⟨H⟩ on the final trial state, as a diagnostic independent of
    /// the evaluator used during optimization.
    pub energy: f64,
}

fn run_vqe(
    model: &ChainModel,
    m: usize,
    template: &RootTemplate,
    objective_kind: VqeObjective,
    evaluator_kind: EvaluatorKind,
    theta0: &[f64],
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<VqeResult, VqeError> {
    if template.num_roots() != m {
        return Err(VqeError::TemplateMismatch { template: template.num_roots(), m });
    }
    if theta0.len() != template.num_params() {
        return Err(VqeError::ParameterCountMismatch {
            expected: template.num_params(),
            got: theta0.len(),
        });
    }
    let h = model.hamiltonian();
    let mut evaluator = build_evaluator(evaluator_kind, seed);
    let boundary = model.boundary;

    let mut objective = |theta: &[f64]| -> f64 {
        let k_vec = match unpack(theta, template, boundary) {
            Ok(k) => k,
            Err(_) => return NULL_STATE_PENALTY,
        };
        let state = match bethe_state(model, &k_vec) {
            Ok(s) => s,
            Err(_) => return NULL_STATE_PENALTY,
        };
        let report = match objective_kind {
            VqeObjective::Energy => evaluator.expval(&state, &h),
            VqeObjective::Variance => evaluator.variance(&state, &h),
        };
        match report {
            Ok(r) => r.value,
            Err(_) => NULL_STATE_PENALTY,
        }
    };

    let outcome = minimize(&mut objective, theta0, cfg);
    if outcome.final_value() >= NULL_STATE_PENALTY {
        return Err(VqeError::EvaluationFailure);
    }
    let roots = canonicalize(&unpack(&outcome.theta, template, boundary)?);
    let final_state = bethe_state(model, &roots)?;
    let energy = expval_exact(&final_state, &h)?;
    Ok(VqeResult {
        roots,
        final_objective: outcome.final_value(),
        objective_trace: outcome.trace,
        evaluations: outcome.evaluations,
        evaluator: evaluator_kind,
        seed,
        converged: outcome.converged,
        energy,
    })
}

/// Ground-state search: minimize ⟨H⟩ over the template parameters.
#[allow(clippy::too_many_arguments)]
pub fn vqe_ground(
    model: &ChainModel,
    m: usize,
    template: &RootTemplate,
    evaluator: EvaluatorKind,
    theta0: &[f64],
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<VqeResult, VqeError> {
    run_vqe(model, m, template, VqeObjective::Energy, evaluator, theta0, cfg, seed)
}

/// Excited-state search: minimize the variance of H. Which eigenstate is
/// reached depends entirely on `theta0`; the method has no bias toward
/// low energies.
#[allow(clippy::too_many_arguments)]
pub fn vqe_excited(
    model: &ChainModel,
    m: usize,
    template: &RootTemplate,
    evaluator: EvaluatorKind,
    theta0: &[f64],
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<VqeResult, VqeError> {
    run_vqe(model, m, template, VqeObjective::Variance, evaluator, theta0, cfg, seed)
}

/// Sample a template parameter vector: real parts uniform in the
/// canonical strip, imaginary parts uniform in [−1.5, 1.5].
pub fn sample_theta0(template: &RootTemplate, boundary: Boundary, rng: &mut impl Rng) -> Vec<f64> {
    let re_range = match boundary {
        Boundary::Closed => (-PI, PI),
        Boundary::Open => (0.0, PI),
    };
    let mut theta = Vec::with_capacity(template.num_params());
    for entry in template.entries() {
        match entry {
            TemplateEntry::RealRoot => theta.push(rng.gen_range(re_range.0..=re_range.1)),
            TemplateEntry::ConjugatePair | TemplateEntry::FreeComplex => {
                theta.push(rng.gen_range(re_range.0..=re_range.1));
                theta.push(rng.gen_range(-1.5..=1.5));
            }
        }
    }
    theta
}

/// Run `n_restarts` independent VQE searches from randomly sampled
/// starting points, drop duplicates (canonical roots within 1e−4), and
/// sort ascending by final objective.
#[allow(clippy::too_many_arguments)]
pub fn random_restart_driver(
    model: &ChainModel,
    m: usize,
    template: &RootTemplate,
    objective: VqeObjective,
    evaluator: EvaluatorKind,
    n_restarts: usize,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Vec<VqeResult> {
    let mut results: Vec<VqeResult> = Vec::new();
    for restart in 0..n_restarts {
        let mut rng = substream(seed, DOMAIN_RESTART_SAMPLE, restart as u64);
        let theta0 = sample_theta0(template, model.boundary, &mut rng);
        let run_seed = derive_seed(seed, DOMAIN_RESTART_SEED, restart as u64);
        if let Ok(result) =
            run_vqe(model, m, template, objective, evaluator, &theta0, cfg, run_seed)
        {
            results.push(result);
        }
    }
    results.sort_by(|a, b| {
        a.final_objective
            .partial_cmp(&b.final_objective)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut deduped: Vec<VqeResult> = Vec::new();
    for result in results {
        let duplicate = deduped
            .iter()
            .any(|kept| crate::betheq::max_orbit_distance(&kept.roots, &result.roots) < 1e-4);
        if !duplicate {
            deduped.push(result);
        }
    }
    deduped
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn template_spec_round_trip() {
        let t: RootTemplate = "p,r".parse().unwrap();
        assert_eq!(t.num_roots(), 3);
        assert_eq!(t.num_params(), 3);
        assert_eq!(t.to_string(), "p,r");
        assert!("x,r".parse::<RootTemplate>().is_err());
    }

    #[test]
    fn pack_unpack_examples() {
        let t: RootTemplate = "r".parse().unwrap();
        let kv = RootVector::closed(vec![c(PI, 0.0)]);
        assert_eq!(pack(&kv, &t).unwrap(), vec![PI]);

        let t: RootTemplate = "p,r".parse().unwrap();
        let kv = RootVector::closed(vec![c(0.245, 1.4125), c(0.245, -1.4125), c(1.6044, 0.0)]);
        let theta = pack(&kv, &t).unwrap();
        assert_eq!(theta, vec![0.245, 1.4125, 1.6044]);
        let back = unpack(&theta, &t, Boundary::Closed).unwrap();
        assert_eq!(back.roots, kv.roots);

        let t: RootTemplate = "c".parse().unwrap();
        let kv = unpack(&[3.14159, 0.882174], &t, Boundary::Open).unwrap();
        assert_eq!(kv.roots, vec![c(3.14159, 0.882174)]);

        assert!(pack(&RootVector::closed(vec![c(1.0, 0.5)]), &"r".parse().unwrap()).is_err());
    }

    #[test]
    fn nelder_mead_quadratic_bowls() {
        let cfg = OptimizerConfig::default();
        let mut f = |x: &[f64]| (x[0] - 2.0) * (x[0] - 2.0);
        let out = minimize(&mut f, &[0.0], &cfg);
        assert!(out.converged);
        assert!((out.theta[0] - 2.0).abs() < 1e-5, "got {}", out.theta[0]);

        let target = [1.0, -0.5, 2.5, 0.3];
        let mut f = |x: &[f64]| -> f64 {
            x.iter().zip(target.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
        };
        let out = minimize(&mut f, &[0.0, 0.0, 0.0, 0.0], &cfg);
        assert!(out.converged);
        for (got, want) in out.theta.iter().zip(target.iter()) {
            assert!((got - want).abs() < 1e-4, "got {got}, want {want}");
        }
        assert_eq!(out.final_value(), out.trace.last().unwrap().1);
    }

    #[test]
    fn ground_vqe_single_magnon() {
        let model = ChainModel::closed(2, 2.0).unwrap();
        let template: RootTemplate = "r".parse().unwrap();
        let result = vqe_ground(
            &model,
            1,
            &template,
            EvaluatorKind::Exact,
            &[2.8],
            &OptimizerConfig::default(),
            0,
        )
        .unwrap();
        assert!((result.roots.roots[0].re - PI).abs() < 1e-4, "root {:?}", result.roots);
        assert!((result.energy + 2.0).abs() < 1e-8);
        assert!(result.converged);
    }

    #[test]
    fn null_state_start_recovers_through_penalty() {
        // Equal starting roots make the very first vertex a null state.
        let model = ChainModel::closed(4, 2.0).unwrap();
        let template: RootTemplate = "r,r".parse().unwrap();
        let result = vqe_ground(
            &model,
            2,
            &template,
            EvaluatorKind::Exact,
            &[1.9, 1.9],
            &OptimizerConfig::default(),
            0,
        )
        .unwrap();
        assert!(result.final_objective < 0.0);
    }

    #[test]
    fn excited_vqe_conjugate_pair() {
        let model = ChainModel::closed(4, 2.0).unwrap();
        let template: RootTemplate = "p".parse().unwrap();
        let result = vqe_excited(
            &model,
            2,
            &template,
            EvaluatorKind::Exact,
            &[0.0, 0.8],
            &OptimizerConfig::default(),
            0,
        )
        .unwrap();
        let im: Vec<f64> = result.roots.roots.iter().map(|k| k.im).collect();
        assert!((im[0] + 0.831443).abs() < 1e-3, "roots {:?}", result.roots);
        assert!((im[1] - 0.831443).abs() < 1e-3);
        assert!((result.energy - 0.732051).abs() < 1e-4);
        assert!(result.final_objective < 1e-8);
    }

    #[test]
    fn restart_driver_finds_both_single_magnon_states() {
        let model = ChainModel::closed(2, 2.0).unwrap();
        let template: RootTemplate = "r".parse().unwrap();
        let results = random_restart_driver(
            &model,
            1,
            &template,
            VqeObjective::Variance,
            EvaluatorKind::Exact,
            20,
            &OptimizerConfig::default(),
            42,
        );
        assert!(results.len() >= 2, "expected both states, got {}", results.len());
        let energies: Vec<f64> = results.iter().map(|r| r.energy).collect();
        assert!(energies.iter().any(|e| (e + 2.0).abs() < 1e-6), "{energies:?}");
        assert!(energies.iter().any(|e| e.abs() < 1e-6), "{energies:?}");
        // Sorted by objective.
        for w in results.windows(2) {
            assert!(w[0].final_objective <= w[1].final_objective);
        }
    }
}
