//! Bethe-equation residuals and classical root solvers.
//!
//! Residuals are kept in denominator-cleared form so they stay finite at
//! kernel zeros: for the closed chain
//!
//!   r_j = e^{ik_j L} Π_{l≠j} s(k_j, k_l) − Π_{l≠j} (−s(k_l, k_j)),
//!
//! and for the open chain
//!
//!   r_j = α(k_j)β(k_j) Π_{l≠j} B(k_j, k_l) − α(−k_j)β(−k_j) Π_{l≠j} B(−k_j, k_l).
//!
//! A damped Newton iteration over the 2M real unknowns (Re k_j, Im k_j)
//! is the general solver; the all-real ground-state sector of the closed
//! chain can also be solved by fixed-point iteration of the logarithmic
//! form of the equations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::bethe::{boundary_alpha, boundary_beta, kernel_b, kernel_s};
use crate::model::{Boundary, ChainModel};
use crate::bethe::RootVector;

const I: Complex64 = Complex64::new(0.0, 1.0);
const TWO_PI: f64 = 2.0 * PI;

/// Two roots closer than this (after canonicalization) count as repeated.
pub const REPEATED_ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("root vector has the wrong boundary for this operation")]
    BoundaryMismatch,
    #[error("expected {expected} roots, got {got}")]
    RootCountMismatch { expected: usize, got: usize },
    #[error("initial guess or solution has repeated roots")]
    RepeatedRoots,
    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("Jacobian is singular")]
    SingularJacobian,
    #[error("log-form iteration drifted off the real axis (|Im k| = {0:.3e})")]
    NonRealDrift(f64),
    #[error("ground-state quantum numbers only tabulated for even L ≤ 12, got {0}")]
    UnsupportedLength(usize),
}

/// Denominator-free Bethe-equation residuals.
#[derive(Debug, Clone)]
pub struct ResidualVector {
    pub values: Vec<Complex64>,
    pub scheme: ResidualScheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualScheme {
    Cleared,
}

impl ResidualVector {
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.values.iter().map(|r| r.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Cleared residuals plus the magnitude scale max(|lhs|, |rhs|) of each
/// component, used for scale-aware convergence checks.
fn residual_closed_scaled(roots: &[Complex64], l: usize, delta: f64) -> (Vec<Complex64>, Vec<f64>) {
    let m = roots.len();
    let mut values = Vec::with_capacity(m);
    let mut scales = Vec::with_capacity(m);
    for j in 0..m {
        let mut lhs = (I * roots[j] * l as f64).exp();
        let mut rhs = Complex64::new(1.0, 0.0);
        for lidx in 0..m {
            if lidx == j {
                continue;
            }
            lhs *= kernel_s(roots[j], roots[lidx], delta);
            rhs *= -kernel_s(roots[lidx], roots[j], delta);
        }
        values.push(lhs - rhs);
        scales.push(lhs.norm().max(rhs.norm()));
    }
    (values, scales)
}

fn residual_open_scaled(roots: &[Complex64], model: &ChainModel) -> (Vec<Complex64>, Vec<f64>) {
    let m = roots.len();
    let (delta, h, hp, l) = (model.delta, model.h, model.h_prime, model.l);
    let mut values = Vec::with_capacity(m);
    let mut scales = Vec::with_capacity(m);
    for j in 0..m {
        let kj = roots[j];
        // Pair α with β first: their product stays O(1) near the Bethe
        // roots even when β alone is exponentially large in L·Im k.
        let mut lhs = boundary_alpha(kj, delta, h) * boundary_beta(kj, delta, hp, l);
        let mut rhs = boundary_alpha(-kj, delta, h) * boundary_beta(-kj, delta, hp, l);
        for lidx in 0..m {
            if lidx == j {
                continue;
            }
            lhs *= kernel_b(kj, roots[lidx], delta);
            rhs *= kernel_b(-kj, roots[lidx], delta);
        }
        values.push(lhs - rhs);
        scales.push(lhs.norm().max(rhs.norm()));
    }
    (values, scales)
}

/// Closed-chain residuals; the zero vector iff k⃗ solves the closed Bethe
/// equations away from common zeros of both cleared products.
pub fn residual_closed(k_vec: &RootVector, l: usize, delta: f64) -> ResidualVector {
    let (values, _) = residual_closed_scaled(&k_vec.roots, l, delta);
    ResidualVector { values, scheme: ResidualScheme::Cleared }
}

/// Open-chain residuals in the same cleared form.
pub fn residual_open(k_vec: &RootVector, model: &ChainModel) -> ResidualVector {
    let (values, _) = residual_open_scaled(&k_vec.roots, model);
    ResidualVector { values, scheme: ResidualScheme::Cleared }
}

fn residual_for(model: &ChainModel, roots: &[Complex64]) -> (Vec<Complex64>, Vec<f64>) {
    match model.boundary {
        Boundary::Closed => residual_closed_scaled(roots, model.l, model.delta),
        Boundary::Open => residual_open_scaled(roots, model),
    }
}

/// Options for [`newton_solve`].
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tolerance: f64,
    /// Accept when the Newton step falls below this, even if the cleared
    /// residual has hit its floating-point noise floor. Near a simple
    /// root the step size estimates the error of the iterate itself.
    pub step_tolerance: f64,
    pub max_iterations: usize,
    pub fd_step: f64,
    pub max_backtracks: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            step_tolerance: 1e-10,
            max_iterations: 200,
            fd_step: 1e-6,
            max_backtracks: 30,
        }
    }
}

fn pack_roots(roots: &[Complex64]) -> DVector<f64> {
    let mut v = DVector::zeros(2 * roots.len());
    for (j, k) in roots.iter().enumerate() {
        v[2 * j] = k.re;
        v[2 * j + 1] = k.im;
    }
    v
}

fn unpack_roots(v: &DVector<f64>) -> Vec<Complex64> {
    (0..v.len() / 2)
        .map(|j| Complex64::new(v[2 * j], v[2 * j + 1]))
        .collect()
}

fn flatten_residual(r: &[Complex64]) -> DVector<f64> {
    let mut v = DVector::zeros(2 * r.len());
    for (j, rj) in r.iter().enumerate() {
        v[2 * j] = rj.re;
        v[2 * j + 1] = rj.im;
    }
    v
}

/// Component-wise convergence: |r_j| within tolerance relative to the
/// magnitude of the cleared products it was formed from. For O(1)
/// product scales this reduces to the absolute tolerance.
fn residual_converged(values: &[Complex64], scales: &[f64], tol: f64) -> bool {
    values
        .iter()
        .zip(scales.iter())
        .all(|(r, s)| r.norm() <= tol * s.max(1.0))
}

/// Damped Newton iteration on the cleared residuals with a central
/// finite-difference Jacobian. Returns canonicalized roots.
pub fn newton_solve(
    model: &ChainModel,
    m: usize,
    k0: &RootVector,
    options: &NewtonOptions,
) -> Result<RootVector, SolveError> {
    if k0.boundary != model.boundary {
        return Err(SolveError::BoundaryMismatch);
    }
    if k0.m() != m {
        return Err(SolveError::RootCountMismatch { expected: m, got: k0.m() });
    }
    if classify(k0, model).repeated_roots {
        return Err(SolveError::RepeatedRoots);
    }

    let eval = |x: &DVector<f64>| -> (DVector<f64>, Vec<Complex64>, Vec<f64>) {
        let roots = unpack_roots(x);
        let (values, scales) = residual_for(model, &roots);
        (flatten_residual(&values), values, scales)
    };

    let mut x = pack_roots(&k0.roots);
    let (mut r, mut values, mut scales) = eval(&x);

    let finish = |x: &DVector<f64>| -> Result<RootVector, SolveError> {
        let solution = RootVector { roots: unpack_roots(x), boundary: model.boundary };
        let canonical = canonicalize(&solution);
        if classify(&canonical, model).repeated_roots {
            return Err(SolveError::RepeatedRoots);
        }
        Ok(canonical)
    };

    for _ in 0..options.max_iterations {
        if residual_converged(&values, &scales, options.tolerance) {
            return finish(&x);
        }

        let n = x.len();
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for p in 0..n {
            let mut xp = x.clone();
            xp[p] += options.fd_step;
            let mut xm = x.clone();
            xm[p] -= options.fd_step;
            let (rp, _, _) = eval(&xp);
            let (rm, _, _) = eval(&xm);
            jac.set_column(p, &((rp - rm) / (2.0 * options.fd_step)));
        }

        let step = jac
            .lu()
            .solve(&(-&r))
            .ok_or(SolveError::SingularJacobian)?;
        if !step.iter().all(|v| v.is_finite()) {
            return Err(SolveError::SingularJacobian);
        }
        // The residual noise floor can sit above `tolerance` when the
        // cleared products pass through large magnitudes; a vanishing
        // Newton step then certifies the root itself.
        if step.amax() < options.step_tolerance {
            x += step;
            return finish(&x);
        }

        let current_norm = r.norm();
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..=options.max_backtracks {
            let candidate = &x + &step * damping;
            let (rc, vc, sc) = eval(&candidate);
            if rc.norm() < current_norm {
                x = candidate;
                r = rc;
                values = vc;
                scales = sc;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if !accepted {
            return Err(SolveError::NoConvergence(format!(
                "step collapse at residual {current_norm:.3e}"
            )));
        }
    }

    if residual_converged(&values, &scales, options.tolerance) {
        return finish(&x);
    }
    Err(SolveError::NoConvergence(format!(
        "iteration cap at residual {:.3e}",
        r.norm()
    )))
}

/// Fixed-point iteration of the logarithmic closed Bethe equations
///
///   L k_j = 2π I_j + Σ_{l≠j} θ(k_j, k_l),
///
/// where θ is the continuous branch of the two-body phase
/// arg(−s(k_l, k_j)/s(k_j, k_l)). Intended for the all-real ground-state
/// sector of the antiferromagnetic chain (Δ > 1, even L, M = L/2);
/// iterates acquiring an imaginary part are rejected.
pub fn iterate_log_closed(
    l: usize,
    m: usize,
    delta: f64,
    quantum_numbers: &[f64],
) -> Result<RootVector, SolveError> {
    if quantum_numbers.len() != m {
        return Err(SolveError::RootCountMismatch { expected: m, got: quantum_numbers.len() });
    }
    let lf = l as f64;
    let mut roots: Vec<Complex64> = quantum_numbers
        .iter()
        .map(|&qi| Complex64::new(TWO_PI * qi / lf, 0.0))
        .collect();
    // Previous-sweep phases, used to keep the log branch continuous.
    let mut prev_theta: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    let mut have_prev = false;

    for _ in 0..10_000 {
        let mut theta = vec![vec![Complex64::new(0.0, 0.0); m]; m];
        let mut next = Vec::with_capacity(m);
        for j in 0..m {
            let mut sum = Complex64::new(0.0, 0.0);
            for lidx in 0..m {
                if lidx == j {
                    continue;
                }
                let ratio =
                    -kernel_s(roots[lidx], roots[j], delta) / kernel_s(roots[j], roots[lidx], delta);
                let mut t = ratio.ln() * -I;
                if have_prev {
                    // Shift by 2π to stay on the branch of the last sweep.
                    let shift = ((t.re - prev_theta[j][lidx].re) / TWO_PI).round();
                    t.re -= TWO_PI * shift;
                }
                theta[j][lidx] = t;
                sum += t;
            }
            next.push((TWO_PI * quantum_numbers[j] + sum) / lf);
        }
        let drift = next.iter().map(|k| k.im.abs()).fold(0.0, f64::max);
        if drift > 1e-9 {
            return Err(SolveError::NonRealDrift(drift));
        }
        let diff = next
            .iter()
            .zip(roots.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        roots = next;
        prev_theta = theta;
        have_prev = true;
        if diff < 1e-12 {
            let exact: Vec<Complex64> =
                roots.iter().map(|k| Complex64::new(k.re, 0.0)).collect();
            return Ok(canonicalize(&RootVector::closed(exact)));
        }
    }
    Err(SolveError::NoConvergence("log-form iteration cap".into()))
}

/// Ground-state quantum numbers for the closed antiferromagnetic chain
/// (Δ > 1, even L, M = L/2) under the principal-branch phase convention
/// used by [`iterate_log_closed`]. Verified against the Newton solver.
pub fn ground_state_quantum_numbers(l: usize) -> Result<Vec<f64>, SolveError> {
    if l < 2 || l % 2 != 0 || l > 12 {
        return Err(SolveError::UnsupportedLength(l));
    }
    let m = l / 2;
    // Spacing-2 ladders; M odd includes the k = π root at the top.
    let numbers: Vec<f64> = if m % 2 == 1 {
        (0..m).map(|j| (2 * j as i64 - (m as i64 - 2)) as f64).collect()
    } else {
        (0..m).map(|j| (2 * j as i64 - (m as i64 - 1)) as f64).collect()
    };
    Ok(numbers)
}

fn shift_into_strip(re: f64) -> f64 {
    if re > -PI && re <= PI {
        return re;
    }
    PI - (PI - re).rem_euclid(TWO_PI)
}

fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Shift every root into the canonical strip: Re k ∈ (−π, π] for the
/// closed chain; additionally reflect open-chain roots onto Re k ∈ [0, π]
/// (a tie at Re k = 0 is resolved toward Im k ≥ 0). Roots are returned
/// sorted by (Re, Im).
pub fn canonicalize(k_vec: &RootVector) -> RootVector {
    let mut roots: Vec<Complex64> = k_vec
        .roots
        .iter()
        .map(|k| {
            let mut k = Complex64::new(shift_into_strip(k.re), k.im);
            if k_vec.boundary == Boundary::Open {
                if k.re < 0.0 || (k.re == 0.0 && k.im < 0.0) {
                    k = -k;
                }
            }
            k
        })
        .collect();
    sort_roots(&mut roots);
    RootVector { roots, boundary: k_vec.boundary }
}

/// Flags attached to a root vector by [`classify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootClassification {
    pub repeated_roots: bool,
    pub max_residual: f64,
    pub is_canonical: bool,
}

/// Flag repeated roots (including reflection-coincident pairs for the
/// open chain), record the max cleared residual, and report whether the
/// input is already in canonical form.
pub fn classify(k_vec: &RootVector, model: &ChainModel) -> RootClassification {
    let canonical = canonicalize(k_vec);
    let roots = &canonical.roots;
    let mut repeated = false;
    for j in 0..roots.len() {
        for l in j + 1..roots.len() {
            if (roots[j] - roots[l]).norm() < REPEATED_ROOT_TOL {
                repeated = true;
            }
            if k_vec.boundary == Boundary::Open
                && (roots[j] + roots[l]).norm() < REPEATED_ROOT_TOL
            {
                repeated = true;
            }
        }
    }
    let (values, _) = residual_for(model, &k_vec.roots);
    let max_residual = values.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let is_canonical = canonical.roots == k_vec.roots;
    RootClassification { repeated_roots: repeated, max_residual, is_canonical }
}

/// Distance between two momenta modulo the gauge freedom of the Bethe
/// equations: 2π shifts, plus reflection for the open chain.
pub fn orbit_distance(a: Complex64, b: Complex64, boundary: Boundary) -> f64 {
    let mut best = f64::INFINITY;
    for n in -1..=1 {
        let shift = TWO_PI * n as f64;
        best = best.min((a + shift - b).norm());
        if boundary == Boundary::Open {
            best = best.min((-a + shift - b).norm());
        }
    }
    best
}

/// Max component distance between two root vectors under the optimal
/// pairing, measured with [`orbit_distance`]. Both are canonicalized
/// first; vectors of different length give infinity.
pub fn max_orbit_distance(a: &RootVector, b: &RootVector) -> f64 {
    if a.m() != b.m() {
        return f64::INFINITY;
    }
    let a = canonicalize(a);
    let b = canonicalize(b);
    best_assignment(&a.roots, &b.roots, a.boundary).0
}

/// Per-component orbit distances of `got` against `reference`, indexed
/// like `reference`, under the assignment that minimizes the max
/// distance. `None` when the lengths differ.
pub fn component_orbit_distances(got: &RootVector, reference: &RootVector) -> Option<Vec<f64>> {
    if got.m() != reference.m() {
        return None;
    }
    let r = canonicalize(reference);
    let g = canonicalize(got);
    let (_, _, perm) = best_assignment_with_perm(&r.roots, &g.roots, r.boundary);
    Some(
        perm.iter()
            .enumerate()
            .map(|(i, &p)| orbit_distance(r.roots[i], g.roots[p], r.boundary))
            .collect(),
    )
}

/// Relative error ‖k − k'‖ / ‖k‖ with ‖k‖ = √(k·k*), pairing components
/// through the same optimal gauge-aware assignment.
pub fn relative_root_error(truth: &RootVector, estimate: &RootVector) -> f64 {
    if truth.m() != estimate.m() {
        return f64::INFINITY;
    }
    let t = canonicalize(truth);
    let e = canonicalize(estimate);
    let (_, sum_sqr) = best_assignment(&t.roots, &e.roots, t.boundary);
    let norm = t.roots.iter().map(|k| k.norm_sqr()).sum::<f64>().sqrt();
    sum_sqr.sqrt() / norm
}

/// Brute-force assignment over permutations (M ≤ ~8): returns the
/// minimal max component distance and the summed squared distances of
/// that assignment.
fn best_assignment(a: &[Complex64], b: &[Complex64], boundary: Boundary) -> (f64, f64) {
    let (max_d, sum_sqr, _) = best_assignment_with_perm(a, b, boundary);
    (max_d, sum_sqr)
}

fn best_assignment_with_perm(
    a: &[Complex64],
    b: &[Complex64],
    boundary: Boundary,
) -> (f64, f64, Vec<usize>) {
    let m = a.len();
    if m == 0 {
        return (0.0, 0.0, Vec::new());
    }
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best = (f64::INFINITY, f64::INFINITY, perm.clone());
    loop {
        let mut max_d = 0.0f64;
        let mut sum_sqr = 0.0f64;
        for (i, &p) in perm.iter().enumerate() {
            let d = orbit_distance(a[i], b[p], boundary);
            max_d = max_d.max(d);
            sum_sqr += d * d;
        }
        if max_d < best.0 {
            best = (max_d, sum_sqr, perm.clone());
        }
        if !next_perm(&mut perm) {
            break;
        }
    }
    best
}

fn next_perm(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_momentum_solves_single_magnon() {
        for l in [2usize, 4, 6] {
            let k = RootVector::closed(vec![c(TWO_PI / l as f64, 0.0)]);
            let r = residual_closed(&k, l, 2.0);
            assert!(r.max_norm() < 1e-12, "L = {l}: {:?}", r.values);
        }
    }

    #[test]
    fn printed_table_roots_have_small_residuals() {
        // Closed ground states at printed precision, Δ = 2.
        let k = RootVector::closed(vec![c(1.94553, 0.0), c(-1.94553, 0.0)]);
        assert!(residual_closed(&k, 4, 2.0).euclidean_norm() < 1e-4);
        let k = RootVector::closed(vec![c(1.49862, 0.0), c(-1.49862, 0.0), c(PI, 0.0)]);
        assert!(residual_closed(&k, 6, 2.0).euclidean_norm() < 1e-4);

        // Open ground states at printed precision. The cleared form
        // amplifies printed rounding by the local Jacobian scale
        // (~e^{(L+1) Im k} through β), so the bound grows with L.
        let model = ChainModel::open(2, 0.5, 3.0, 0.3).unwrap();
        let k = RootVector::open(vec![c(3.14159, 0.882174)]);
        assert!(residual_open(&k, &model).euclidean_norm() < 1e-4);
        let model = ChainModel::open(4, 0.5, 3.0, 0.3).unwrap();
        let k = RootVector::open(vec![c(3.14159, 0.91503), c(2.11689, 0.0)]);
        assert!(residual_open(&k, &model).euclidean_norm() < 1e-2);
        let refined = newton_solve(&model, 2, &k, &NewtonOptions::default()).unwrap();
        assert!(residual_open(&refined, &model).euclidean_norm() < 1e-10);
    }

    #[test]
    fn open_residual_magnitude_reflection_invariant() {
        let model = ChainModel::open(3, 0.5, 3.0, 0.3).unwrap();
        let k = c(1.1, 0.0);
        let plus = residual_open(&RootVector::open(vec![k]), &model);
        let minus = residual_open(&RootVector::open(vec![-k]), &model);
        assert!((plus.values[0] + minus.values[0]).norm() < 1e-12);
    }

    #[test]
    fn newton_recovers_closed_ground_roots() {
        let model = ChainModel::closed(2, 2.0).unwrap();
        let got = newton_solve(
            &model,
            1,
            &RootVector::closed(vec![c(3.0, 0.0)]),
            &NewtonOptions::default(),
        )
        .unwrap();
        // The root is π; the strip boundary may report it as −π.
        assert!(orbit_distance(got.roots[0], c(PI, 0.0), Boundary::Closed) < 1e-10);

        let model = ChainModel::closed(4, 2.0).unwrap();
        let got = newton_solve(
            &model,
            2,
            &RootVector::closed(vec![c(1.9, 0.0), c(-1.9, 0.0)]),
            &NewtonOptions::default(),
        )
        .unwrap();
        assert!((got.roots[0].re + 1.94553).abs() < 1e-5);
        assert!((got.roots[1].re - 1.94553).abs() < 1e-5);
    }

    #[test]
    fn newton_rejects_repeated_guess() {
        let model = ChainModel::closed(4, 2.0).unwrap();
        let result = newton_solve(
            &model,
            2,
            &RootVector::closed(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            &NewtonOptions::default(),
        );
        assert!(matches!(result, Err(SolveError::RepeatedRoots)));

        // Reflection coincidence counts as repeated for the open chain.
        let model = ChainModel::open(4, 0.5, 3.0, 0.3).unwrap();
        let result = newton_solve(
            &model,
            2,
            &RootVector::open(vec![c(1.0, 0.0), c(-1.0, 0.0)]),
            &NewtonOptions::default(),
        );
        assert!(matches!(result, Err(SolveError::RepeatedRoots)));
    }

    #[test]
    fn canonicalize_examples() {
        let k = canonicalize(&RootVector::closed(vec![c(3.0 * PI + 0.1, 0.0)]));
        assert!((k.roots[0].re - (-PI + 0.1)).abs() < 1e-12);

        let k = canonicalize(&RootVector::open(vec![c(-1.5, 0.0)]));
        assert!((k.roots[0].re - 1.5).abs() < 1e-15);

        let k = canonicalize(&RootVector::closed(vec![c(2.0, 0.0), c(-2.0, 0.0), c(0.5, 0.0)]));
        let res: Vec<f64> = k.roots.iter().map(|r| r.re).collect();
        assert_eq!(res, vec![-2.0, 0.5, 2.0]);

        // Already-canonical input is returned bit-identically.
        let k = RootVector::closed(vec![c(-2.0, 0.3), c(0.5, 0.0)]);
        assert_eq!(canonicalize(&k).roots, k.roots);
    }

    #[test]
    fn classify_examples() {
        let model = ChainModel::closed(4, 2.0).unwrap();
        let flags = classify(&RootVector::closed(vec![c(PI, 0.0), c(PI, 0.0)]), &model);
        assert!(flags.repeated_roots);

        let model = ChainModel::open(4, 0.5, 3.0, 0.3).unwrap();
        let flags = classify(&RootVector::open(vec![c(1.0, 0.0), c(-1.0, 0.0)]), &model);
        assert!(flags.repeated_roots);

        let model = ChainModel::closed(6, 2.0).unwrap();
        let kv = RootVector::closed(vec![c(0.244998, -1.41247), c(0.244998, 1.41247), c(1.6044, 0.0)]);
        let flags = classify(&kv, &model);
        assert!(!flags.repeated_roots);
        assert!(flags.is_canonical);
        assert!(flags.max_residual < 1.0);
    }

    #[test]
    fn residual_norm_gauge_invariance() {
        // 2π shift of any root leaves the cleared residual unchanged.
        let model = ChainModel::closed(4, 2.0).unwrap();
        let base = RootVector::closed(vec![c(1.2, 0.3), c(-0.7, -0.1)]);
        let shifted = RootVector::closed(vec![c(1.2 + TWO_PI, 0.3), c(-0.7, -0.1)]);
        let r0 = residual_closed(&base, 4, 2.0).euclidean_norm();
        let r1 = residual_closed(&shifted, 4, 2.0).euclidean_norm();
        assert!((r0 - r1).abs() < 1e-10 * r0.max(1.0));

        // Reflection of a real open-chain root preserves the norm.
        let omodel = ChainModel::open(4, 0.5, 3.0, 0.3).unwrap();
        let base = RootVector::open(vec![c(1.2, 0.0), c(2.1, 0.4)]);
        let reflected = RootVector::open(vec![c(-1.2, 0.0), c(2.1, 0.4)]);
        let r0 = residual_open(&base, &omodel).euclidean_norm();
        let r1 = residual_open(&reflected, &omodel).euclidean_norm();
        assert!((r0 - r1).abs() < 1e-10 * r0.max(1.0));
        let _ = model;
    }

    #[test]
    fn log_iteration_matches_newton_on_ground_sector() {
        let printed: Vec<(usize, Vec<Complex64>)> = vec![
            (2, vec![c(3.14159, 0.0)]),
            (4, vec![c(1.9, 0.0), c(-1.9, 0.0)]),
            (6, vec![c(1.5, 0.0), c(-1.5, 0.0), c(3.1, 0.0)]),
        ];
        for (l, seed) in printed {
            let m = l / 2;
            let model = ChainModel::closed(l, 2.0).unwrap();
            let numbers = ground_state_quantum_numbers(l).unwrap();
            let via_log = iterate_log_closed(l, m, 2.0, &numbers).unwrap();
            let via_newton = newton_solve(
                &model,
                m,
                &RootVector::closed(seed),
                &NewtonOptions::default(),
            )
            .unwrap();
            let diff = max_orbit_distance(&via_log, &via_newton);
            assert!(diff < 1e-10, "L = {l}: disagreement {diff:.2e}");
        }
    }

    #[test]
    fn log_iteration_quantum_number_examples() {
        assert_eq!(ground_state_quantum_numbers(2).unwrap(), vec![1.0]);
        assert_eq!(ground_state_quantum_numbers(4).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(ground_state_quantum_numbers(6).unwrap(), vec![-1.0, 1.0, 3.0]);
        assert!(ground_state_quantum_numbers(5).is_err());

        // Single magnon: L k = 2π I exactly, no phase sum.
        let roots = iterate_log_closed(2, 1, 2.0, &[1.0]).unwrap();
        assert!((roots.roots[0].re - PI).abs() < 1e-12);
        assert_eq!(roots.roots[0].im, 0.0);

        let roots = iterate_log_closed(4, 2, 2.0, &[-1.0, 1.0]).unwrap();
        assert!((roots.roots[1].re - 1.94553).abs() < 1e-5);
    }

    #[test]
    fn orbit_distance_handles_strip_boundary() {
        // Near Re = π the reflection image wraps around the strip.
        let a = c(3.1414, -0.916);
        let b = c(3.14159, 0.916);
        assert!(orbit_distance(a, b, Boundary::Open) < 1e-3);
        assert!(orbit_distance(a, b, Boundary::Closed) > 1.0);

        let a = c(-PI + 1e-4, 0.0);
        let b = c(PI, 0.0);
        assert!(orbit_distance(a, b, Boundary::Closed) < 2e-4);
    }
}
