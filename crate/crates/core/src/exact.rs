//! Sector-restricted exact diagonalization, the reference oracle for
//! energies and eigenvector checks.
//!
//! [H, Sᶻ] = 0 for both chains, so the Hamiltonian is block diagonal
//! over the fixed-down-spin sectors; diagonalizing one C(L,M) block is
//! enough to check any Bethe energy.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::bethe::QuantumState;
use crate::model::{binomial, sector_basis, ChainModel, PauliHamiltonian, PauliString};
use crate::sim::{apply_hamiltonian, SimError};

/// Largest sector dimension accepted by [`sector_matrix`].
pub const SECTOR_DIM_GUARD: u64 = 10_000;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("down-spin count {m} out of range for {l} sites")]
    SectorOutOfRange { l: usize, m: usize },
    #[error("sector dimension {dim} exceeds the guard {max}")]
    SectorGuard { dim: u64, max: u64 },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Sorted sector eigenvalues, optionally with eigenvectors in the
/// sector basis.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub l: usize,
    pub m: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
}

/// The Hamiltonian restricted to the M-down-spin sector, as a Hermitian
/// C(L,M) × C(L,M) matrix over [`sector_basis`] order.
pub fn sector_matrix(model: &ChainModel, m: usize) -> Result<DMatrix<Complex64>, ExactError> {
    let l = model.l;
    if m > l {
        return Err(ExactError::SectorOutOfRange { l, m });
    }
    let dim = binomial(l, m);
    if dim > SECTOR_DIM_GUARD {
        return Err(ExactError::SectorGuard { dim, max: SECTOR_DIM_GUARD });
    }
    let basis = sector_basis(l, m).expect("validated above");
    let index: std::collections::HashMap<u64, usize> =
        basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let h = model.hamiltonian();
    let dim = dim as usize;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for (col, &b) in basis.iter().enumerate() {
        for (coeff, string) in h.terms() {
            let masks = string.masks();
            let (target, phase) = PauliString::apply_to_basis(&masks, b);
            // Strings can leave the sector individually; those
            // contributions cancel inside H and are dropped here.
            if let Some(&row) = index.get(&target) {
                mat[(row, col)] += coeff * phase;
            }
        }
    }
    Ok(mat)
}

/// Eigenvalues of a Hermitian complex matrix. The chain Hamiltonians are
/// real symmetric, which is solved directly; a genuinely complex input
/// goes through the real embedding [[A, −B], [B, A]].
fn hermitian_eigen(
    mat: &DMatrix<Complex64>,
    want_vectors: bool,
) -> (Vec<f64>, Option<Vec<Vec<Complex64>>>) {
    let n = mat.nrows();
    let max_im = mat.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if max_im < 1e-12 {
        let real = DMatrix::<f64>::from_fn(n, n, |r, c| mat[(r, c)].re);
        let sym = nalgebra::SymmetricEigen::new(real);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            sym.eigenvalues[a]
                .partial_cmp(&sym.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
        let eigenvectors = want_vectors.then(|| {
            order
                .iter()
                .map(|&i| {
                    sym.eigenvectors
                        .column(i)
                        .iter()
                        .map(|&x| Complex64::new(x, 0.0))
                        .collect()
                })
                .collect()
        });
        return (eigenvalues, eigenvectors);
    }

    // H = A + iB Hermitian ⇒ [[A, −B], [B, A]] is symmetric with every
    // eigenvalue of H doubled; vectors embed as (Re v, Im v).
    let mut embed = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = mat[(r, c)];
            embed[(r, c)] = z.re;
            embed[(r, c + n)] = -z.im;
            embed[(r + n, c)] = z.im;
            embed[(r + n, c + n)] = z.re;
        }
    }
    let sym = nalgebra::SymmetricEigen::new(embed);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| {
        sym.eigenvalues[a]
            .partial_cmp(&sym.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<f64> = order.iter().step_by(2).map(|&i| sym.eigenvalues[i]).collect();
    let eigenvectors = want_vectors.then(|| {
        order
            .iter()
            .step_by(2)
            .map(|&i| {
                let col = sym.eigenvectors.column(i);
                (0..n).map(|r| Complex64::new(col[r], col[r + n])).collect()
            })
            .collect()
    });
    (eigenvalues, eigenvectors)
}

/// Sorted sector spectrum by Hermitian eigensolve of [`sector_matrix`].
pub fn eigenvalues(model: &ChainModel, m: usize) -> Result<SectorSpectrum, ExactError> {
    let mat = sector_matrix(model, m)?;
    let (eigenvalues, _) = hermitian_eigen(&mat, false);
    Ok(SectorSpectrum { l: model.l, m, eigenvalues, eigenvectors: None })
}

/// Like [`eigenvalues`], with eigenvectors in sector-basis coordinates.
pub fn eigenvalues_with_vectors(model: &ChainModel, m: usize) -> Result<SectorSpectrum, ExactError> {
    let mat = sector_matrix(model, m)?;
    let (eigenvalues, eigenvectors) = hermitian_eigen(&mat, true);
    Ok(SectorSpectrum { l: model.l, m, eigenvalues, eigenvectors })
}

/// Lowest eigenvalue of the M sector.
pub fn ground_energy(model: &ChainModel, m: usize) -> Result<f64, ExactError> {
    Ok(eigenvalues(model, m)?.eigenvalues[0])
}

/// ‖H v − (v†Hv) v‖₂ for a normalized state: zero exactly on eigenvectors.
pub fn eigen_residual(state: &QuantumState, h: &PauliHamiltonian) -> Result<f64, ExactError> {
    if state.num_sites() != h.num_sites() {
        return Err(ExactError::Sim(SimError::DimensionMismatch {
            state_sites: state.num_sites(),
            ham_sites: h.num_sites(),
        }));
    }
    let amps = state.amplitudes();
    let hv = apply_hamiltonian(amps, h);
    let e: Complex64 = amps.iter().zip(hv.iter()).map(|(a, b)| a.conj() * b).sum();
    let residual: f64 = hv
        .iter()
        .zip(amps.iter())
        .map(|(hb, a)| (hb - e * a).norm_sqr())
        .sum();
    Ok(residual.sqrt())
}

/// Full-space spectrum via the dense matrix, for cross-checks at small L.
pub fn full_spectrum(model: &ChainModel) -> Result<Vec<f64>, ExactError> {
    let h = model.hamiltonian();
    let dense = crate::model::to_dense_matrix(&h).map_err(|_| ExactError::SectorGuard {
        dim: 1 << model.l,
        max: SECTOR_DIM_GUARD,
    })?;
    let (vals, _) = hermitian_eigen(&dense, false);
    Ok(vals)
}

#[allow(dead_code)]
fn as_dvector(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_iterator(v.len(), v.iter().cloned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{bethe_state, RootVector};
    use std::f64::consts::PI;

    #[test]
    fn closed_l2_sector_eigenvalues() {
        let model = ChainModel::closed(2, 2.0).unwrap();
        let spec = eigenvalues(&model, 1).unwrap();
        assert!((spec.eigenvalues[0] + 2.0).abs() < 1e-12);
        assert!(spec.eigenvalues[1].abs() < 1e-12);
    }

    #[test]
    fn open_l2_sector_eigenvalues_match_tables() {
        let model = ChainModel::open(2, 0.5, 3.0, 0.3).unwrap();
        let spec = eigenvalues(&model, 1).unwrap();
        assert!((spec.eigenvalues[0] + 0.965015).abs() < 1e-5);
        assert!((spec.eigenvalues[1] - 0.715015).abs() < 1e-5);
    }

    #[test]
    fn empty_sector_is_scalar() {
        let model = ChainModel::closed(4, 2.0).unwrap();
        let mat = sector_matrix(&model, 0).unwrap();
        assert_eq!(mat.nrows(), 1);
        assert!((mat[(0, 0)].re - 4.0 * 2.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn duality_pairs_sectors() {
        let model = ChainModel::closed(4, 2.0).unwrap();
        for m in 0..=4usize {
            let a = eigenvalues(&model, m).unwrap().eigenvalues;
            let b = eigenvalues(&model, 4 - m).unwrap().eigenvalues;
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sector_union_matches_full_spectrum() {
        let model = ChainModel::open(4, 0.5, 3.0, 0.3).unwrap();
        let mut union: Vec<f64> = Vec::new();
        for m in 0..=4usize {
            union.extend(eigenvalues(&model, m).unwrap().eigenvalues);
        }
        union.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let full = full_spectrum(&model).unwrap();
        assert_eq!(union.len(), full.len());
        for (a, b) in union.iter().zip(full.iter()) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn eigen_residual_distinguishes_mixtures() {
        let model = ChainModel::closed(2, 2.0).unwrap();
        let h = model.hamiltonian();
        let state = bethe_state(&model, &RootVector::closed(vec![Complex64::new(PI, 0.0)]))
            .unwrap();
        assert!(eigen_residual(&state, &h).unwrap() < 1e-12);

        // Equal mixture of E = −2 and E = 0 eigenstates: residual |ΔE|/2.
        let inv = 0.5f64.sqrt();
        let mix = {
            let k_pi = bethe_state(&model, &RootVector::closed(vec![Complex64::new(PI, 0.0)]))
                .unwrap();
            let k_0 = bethe_state(&model, &RootVector::closed(vec![Complex64::new(0.0, 0.0)]))
                .unwrap();
            let amps: Vec<Complex64> = k_pi
                .amplitudes()
                .iter()
                .zip(k_0.amplitudes().iter())
                .map(|(a, b)| (a + b) * inv)
                .collect();
            let mut s = QuantumState::from_amplitudes(2, amps);
            s.normalize();
            s
        };
        let r = eigen_residual(&mix, &h).unwrap();
        assert!((r - 1.0).abs() < 1e-10, "residual {r}");
    }
}
