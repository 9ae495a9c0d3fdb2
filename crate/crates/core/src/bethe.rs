//! Bethe trial states and closed-form Bethe energies.
//!
//! A root vector k⃗ = (k₁, …, k_M) of complex momenta defines the trial
//! state |B(k⃗)⟩ = Σ_{w ∈ P(L,M)} f(w, k⃗) |w⟩ over all bitstrings with M
//! down-spins. The amplitude f is an (anti)symmetrized sum over root
//! permutations — and, for the open chain, over per-root sign choices —
//! weighted by two-body scattering kernels. When k⃗ solves the Bethe
//! equations, |B(k⃗)⟩ is an exact eigenvector of the chain Hamiltonian
//! with energy
//!
//!   closed:  E = Σ cos(k_j) + (L/4 − M) Δ
//!   open:    E = Σ cos(k_j) + ((L−1)/4 − M) Δ + (h + h')/4
//!
//! For arbitrary k⃗ it is still a valid normalized state, which is what
//! makes it usable as a variational ansatz.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{sector_basis, Boundary, ChainModel};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pre-normalization norm below `NULL_STATE_RTOL` times the largest
/// summand magnitude means the antisymmetrization cancelled everything
/// (repeated or reflection-coincident roots).
const NULL_STATE_RTOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum BetheError {
    #[error("state construction needs 0 ≤ M ≤ L, got M = {m}, L = {l}")]
    RootCountOutOfRange { m: usize, l: usize },
    #[error("bitstring has {got} down-spins, expected {expected}")]
    PopcountMismatch { got: usize, expected: usize },
    #[error("root vector boundary does not match the model boundary")]
    BoundaryMismatch,
    #[error("non-finite root or parameter")]
    NonFinite,
    #[error(
        "null state: amplitudes cancelled (norm {norm:.3e} vs summand scale {scale:.3e}); \
         the root vector is degenerate (e.g. repeated roots)"
    )]
    NullState { norm: f64, scale: f64 },
    #[error("u ↔ k map evaluated at a pole (sinh(u - η/2) = 0)")]
    Pole,
}

/// Ordered list of Bethe momenta with the boundary condition they are
/// meant for.
#[derive(Debug, Clone, PartialEq)]
pub struct RootVector {
    pub roots: Vec<Complex64>,
    pub boundary: Boundary,
}

impl RootVector {
    pub fn closed(roots: Vec<Complex64>) -> Self {
        Self { roots, boundary: Boundary::Closed }
    }

    pub fn open(roots: Vec<Complex64>) -> Self {
        Self { roots, boundary: Boundary::Open }
    }

    /// Number of down-spins M.
    pub fn m(&self) -> usize {
        self.roots.len()
    }

    pub fn is_finite(&self) -> bool {
        self.roots.iter().all(|k| k.re.is_finite() && k.im.is_finite())
    }
}

/// Complex amplitude vector over the full 2^L computational basis.
#[derive(Debug, Clone)]
pub struct QuantumState {
    amps: Vec<Complex64>,
    l: usize,
    normalized: bool,
    /// Largest |f(w, k⃗)| before rescaling, kept for diagnostics.
    pub max_raw_amplitude: f64,
}

impl QuantumState {
    pub fn from_amplitudes(l: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1 << l, "amplitude count must be 2^L");
        Self { amps, l, normalized: false, max_raw_amplitude: 0.0 }
    }

    pub fn num_sites(&self) -> usize {
        self.l
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Normalize in place and fix the global phase so the first
    /// amplitude above noise level is real positive.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in self.amps.iter_mut() {
                *a /= n;
            }
        }
        let max = self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if let Some(first) = self.amps.iter().find(|a| a.norm() > 1e-12 * max) {
            let phase = first / first.norm();
            for a in self.amps.iter_mut() {
                *a /= phase;
            }
        }
        self.normalized = true;
    }

    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Two-body kernel s(k, k') = 1 − 2Δ e^{ik'} + e^{i(k+k')}.
pub fn kernel_s(k: Complex64, k_prime: Complex64, delta: f64) -> Complex64 {
    1.0 - 2.0 * delta * (I * k_prime).exp() + (I * (k + k_prime)).exp()
}

/// Open-chain kernel B(k, k') = s(k, k') s(k', −k).
pub fn kernel_b(k: Complex64, k_prime: Complex64, delta: f64) -> Complex64 {
    kernel_s(k, k_prime, delta) * kernel_s(k_prime, -k, delta)
}

/// Left-boundary factor α(k) = 1 + (h − Δ) e^{−ik}.
pub fn boundary_alpha(k: Complex64, delta: f64, h: f64) -> Complex64 {
    1.0 + (h - delta) * (-I * k).exp()
}

/// Right-boundary factor β(k) = [1 + (h' − Δ) e^{−ik}] e^{i(L+1)k}.
pub fn boundary_beta(k: Complex64, delta: f64, h_prime: f64, l: usize) -> Complex64 {
    (1.0 + (h_prime - delta) * (-I * k).exp()) * (I * ((l + 1) as f64) * k).exp()
}

/// All permutations of 0..m in lexicographic order with their signs.
fn permutations_with_signs(m: usize) -> Vec<(Vec<usize>, f64)> {
    let mut perm: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    loop {
        out.push((perm.clone(), permutation_sign(&perm)));
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
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

/// One expanded summand of the amplitude formula: the momenta in
/// summation order and the constant prefactor (sign × kernel products).
struct SummandTable {
    rows: Vec<(Vec<Complex64>, Complex64)>,
}

impl SummandTable {
    fn closed(roots: &[Complex64], delta: f64) -> Self {
        let m = roots.len();
        let rows = permutations_with_signs(m)
            .into_iter()
            .map(|(perm, sign)| {
                let ks: Vec<Complex64> = perm.iter().map(|&p| roots[p]).collect();
                let mut coeff = Complex64::new(sign, 0.0);
                for j in 0..m {
                    for l in j + 1..m {
                        coeff *= kernel_s(ks[l], ks[j], delta);
                    }
                }
                (ks, coeff)
            })
            .collect();
        Self { rows }
    }

    fn open(roots: &[Complex64], model: &ChainModel) -> Self {
        let m = roots.len();
        let perms = permutations_with_signs(m);
        let mut rows = Vec::with_capacity(perms.len() << m);
        for (perm, sign) in &perms {
            for eps_bits in 0..(1u32 << m) {
                let mut ks = Vec::with_capacity(m);
                let mut sign_eps = 1.0;
                for (j, &p) in perm.iter().enumerate() {
                    if eps_bits >> j & 1 == 1 {
                        sign_eps = -sign_eps;
                        ks.push(-roots[p]);
                    } else {
                        ks.push(roots[p]);
                    }
                }
                let mut coeff = Complex64::new(sign * sign_eps, 0.0);
                for &k in &ks {
                    coeff *= boundary_beta(-k, model.delta, model.h_prime, model.l);
                }
                for j in 0..m {
                    for l in j + 1..m {
                        coeff *= kernel_b(-ks[j], ks[l], model.delta) * (-I * ks[l]).exp();
                    }
                }
                rows.push((ks, coeff));
            }
        }
        Self { rows }
    }

    /// f(w) for the 1-based down-spin positions `xs`, plus the largest
    /// summand magnitude encountered.
    fn evaluate(&self, xs: &[usize]) -> (Complex64, f64) {
        let mut f = Complex64::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for (ks, coeff) in &self.rows {
            let mut phase = Complex64::new(0.0, 0.0);
            for (k, &x) in ks.iter().zip(xs.iter()) {
                phase += k * x as f64;
            }
            let term = coeff * (I * phase).exp();
            scale = scale.max(term.norm());
            f += term;
        }
        (f, scale)
    }
}

/// 1-based positions of the 1-bits of `w`, site 1 = most significant bit.
fn down_spin_positions(w: u64, l: usize) -> Vec<usize> {
    (1..=l).filter(|&n| w >> (l - n) & 1 == 1).collect()
}

/// Closed-chain amplitude f(w, k⃗) = Σ_σ ε(σ) A(k_σ) e^{iΣ k_σ(j) x_j}
/// with A = Π_{j<l} s(k_l, k_j).
pub fn amplitude_closed(
    w: u64,
    l: usize,
    roots: &[Complex64],
    delta: f64,
) -> Result<Complex64, BetheError> {
    let xs = down_spin_positions(w, l);
    if xs.len() != roots.len() {
        return Err(BetheError::PopcountMismatch { got: xs.len(), expected: roots.len() });
    }
    Ok(SummandTable::closed(roots, delta).evaluate(&xs).0)
}

/// Open-chain amplitude: the closed-chain sum extended over all per-root
/// sign choices ε_j = ±1, with A = Π β(−k_j) Π_{j<l} B(−k_j, k_l) e^{−ik_l}.
pub fn amplitude_open(
    w: u64,
    roots: &[Complex64],
    model: &ChainModel,
) -> Result<Complex64, BetheError> {
    let xs = down_spin_positions(w, model.l);
    if xs.len() != roots.len() {
        return Err(BetheError::PopcountMismatch { got: xs.len(), expected: roots.len() });
    }
    Ok(SummandTable::open(roots, model).evaluate(&xs).0)
}

/// Build the normalized Bethe trial state |B(k⃗)⟩ in the full 2^L space.
///
/// Amplitudes outside the M-down-spin sector are exactly zero. After
/// normalization the global phase is fixed so the first nonzero sector
/// amplitude is real positive, making the output deterministic.
pub fn bethe_state(model: &ChainModel, k_vec: &RootVector) -> Result<QuantumState, BetheError> {
    if k_vec.boundary != model.boundary {
        return Err(BetheError::BoundaryMismatch);
    }
    if !k_vec.is_finite() {
        return Err(BetheError::NonFinite);
    }
    let l = model.l;
    let m = k_vec.m();
    if m > l {
        return Err(BetheError::RootCountOutOfRange { m, l });
    }
    let table = match model.boundary {
        Boundary::Closed => SummandTable::closed(&k_vec.roots, model.delta),
        Boundary::Open => SummandTable::open(&k_vec.roots, model),
    };
    let basis = sector_basis(l, m).expect("m validated above");
    let mut sector = Vec::with_capacity(basis.len());
    let mut scale = 0.0f64;
    let mut norm_sqr = 0.0f64;
    let mut max_f = 0.0f64;
    for &w in &basis {
        let xs = down_spin_positions(w, l);
        let (f, s) = table.evaluate(&xs);
        scale = scale.max(s);
        norm_sqr += f.norm_sqr();
        max_f = max_f.max(f.norm());
        sector.push(f);
    }
    let norm = norm_sqr.sqrt();
    if norm < NULL_STATE_RTOL * scale.max(1e-300) {
        return Err(BetheError::NullState { norm, scale });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << l];
    for (&w, f) in basis.iter().zip(sector.iter()) {
        amps[w as usize] = f / max_f;
    }
    let mut state = QuantumState::from_amplitudes(l, amps);
    state.max_raw_amplitude = max_f;
    state.normalize();
    Ok(state)
}

/// Closed-chain Bethe energy E = Σ cos(k_j) + (L/4 − M) Δ, with M taken
/// from the root count. Returned complex; Im E → 0 on true solutions.
pub fn energy_closed(roots: &[Complex64], l: usize, delta: f64) -> Complex64 {
    let m = roots.len() as f64;
    let sum: Complex64 = roots.iter().map(|k| k.cos()).sum();
    sum + delta * (l as f64 / 4.0 - m)
}

/// Open-chain Bethe energy E = Σ cos(k_j) + ((L−1)/4 − M) Δ + (h+h')/4.
pub fn energy_open(roots: &[Complex64], model: &ChainModel) -> Complex64 {
    let m = roots.len() as f64;
    let sum: Complex64 = roots.iter().map(|k| k.cos()).sum();
    sum + model.delta * ((model.l as f64 - 1.0) / 4.0 - m) + (model.h + model.h_prime) / 4.0
}

/// η with cosh η = Δ: real for Δ > 1, i·arccos Δ on |Δ| ≤ 1 (both are
/// the principal complex acosh).
pub fn eta_from_delta(delta: f64) -> Complex64 {
    Complex64::new(delta, 0.0).acosh()
}

/// Map k → u defined by e^{ik} = sinh(u + η/2)/sinh(u − η/2).
pub fn u_from_k(k: Complex64, delta: f64) -> Result<Complex64, BetheError> {
    let eta = eta_from_delta(delta);
    let e = (I * k).exp();
    let den = e - 1.0;
    if den.norm() < 1e-300 {
        return Err(BetheError::Pole);
    }
    let u = ((eta / 2.0).tanh() * (e + 1.0) / den).atanh();
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(BetheError::Pole);
    }
    Ok(u)
}

/// Inverse map u → k; fails on the singular locus sinh(u − η/2) = 0.
pub fn k_from_u(u: Complex64, delta: f64) -> Result<Complex64, BetheError> {
    let eta = eta_from_delta(delta);
    let num = (u + eta / 2.0).sinh();
    let den = (u - eta / 2.0).sinh();
    if den.norm() < 1e-14 * num.norm().max(1.0) {
        return Err(BetheError::Pole);
    }
    let k = (num / den).ln() * -I;
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(BetheError::Pole);
    }
    Ok(k)
}
