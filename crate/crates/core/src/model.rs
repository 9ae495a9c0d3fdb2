//! XXZ chain models and their Pauli-string Hamiltonians.
//!
//! Both chains are spin-1/2 with anisotropy `Δ`; the closed chain is
//! periodic, the open chain carries boundary fields `h` (site 1) and
//! `h'` (site L):
//!
//!   closed:  H = (1/4) Σ_{n=1..L}   (XₙXₙ₊₁ + YₙYₙ₊₁ + Δ ZₙZₙ₊₁),  site L+1 ≡ 1
//!   open:    H = (1/4) Σ_{n=1..L-1} (XₙXₙ₊₁ + YₙYₙ₊₁ + Δ ZₙZₙ₊₁) + (1/4)(h Z₁ + h' Z_L)
//!
//! Basis convention, fixed globally: a computational-basis index
//! `b ∈ [0, 2^L)` encodes the bitstring with **site 1 as the most
//! significant bit**, and bit value 1 means down-spin, `|1⟩ = (0,1)ᵀ`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Coefficients smaller than this are dropped when merging Pauli products.
pub const COEFF_PRUNE_THRESHOLD: f64 = 1e-12;

/// Largest chain length accepted by [`to_dense_matrix`].
pub const DENSE_SITE_GUARD: usize = 14;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("chain length must be at least 2, got {0}")]
    ChainTooShort(usize),
    #[error("model parameters must be finite")]
    NonFiniteParameter,
    #[error("dense expansion limited to {max} sites, got {got}")]
    DenseGuard { got: usize, max: usize },
    #[error("down-spin count {m} out of range for {l} sites")]
    SectorOutOfRange { l: usize, m: usize },
}

/// Boundary condition of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Closed,
    Open,
}

/// Chain geometry and couplings. `h`/`h_prime` are only meaningful for
/// the open chain and are stored as zero for the closed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainModel {
    pub boundary: Boundary,
    pub l: usize,
    pub delta: f64,
    pub h: f64,
    pub h_prime: f64,
}

impl ChainModel {
    pub fn closed(l: usize, delta: f64) -> Result<Self, ModelError> {
        if l < 2 {
            return Err(ModelError::ChainTooShort(l));
        }
        if !delta.is_finite() {
            return Err(ModelError::NonFiniteParameter);
        }
        Ok(Self { boundary: Boundary::Closed, l, delta, h: 0.0, h_prime: 0.0 })
    }

    pub fn open(l: usize, delta: f64, h: f64, h_prime: f64) -> Result<Self, ModelError> {
        if l < 2 {
            return Err(ModelError::ChainTooShort(l));
        }
        if !(delta.is_finite() && h.is_finite() && h_prime.is_finite()) {
            return Err(ModelError::NonFiniteParameter);
        }
        Ok(Self { boundary: Boundary::Open, l, delta, h, h_prime })
    }

    /// The Hamiltonian for this model as a merged Pauli-string sum.
    pub fn hamiltonian(&self) -> PauliHamiltonian {
        match self.boundary {
            Boundary::Closed => build_closed_hamiltonian(self.l, self.delta)
                .expect("validated at construction"),
            Boundary::Open => {
                build_open_hamiltonian(self.l, self.delta, self.h, self.h_prime)
                    .expect("validated at construction")
            }
        }
    }
}

/// Single-site Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

/// A length-L tensor product of single-site Paulis. Entry `n` of `ops`
/// acts on chain site `n+1` (0-based storage of 1-based sites).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<PauliOp>,
}

/// Per-string bitmasks used when acting on basis states. Bit `l - n` of
/// a mask corresponds to site `n`, matching the global basis encoding.
#[derive(Debug, Clone, Copy)]
pub struct StringMasks {
    pub flip: u64,
    pub phase_flip: u64,
    pub y_count: u32,
}

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl PauliString {
    pub fn identity(l: usize) -> Self {
        Self { ops: vec![PauliOp::I; l] }
    }

    /// Build a string from (1-based site, op) pairs on an identity background.
    pub fn from_sites(l: usize, sites: &[(usize, PauliOp)]) -> Self {
        let mut ops = vec![PauliOp::I; l];
        for &(site, op) in sites {
            assert!(
                (1..=l).contains(&site),
                "site {site} out of range for {l} sites"
            );
            ops[site - 1] = op;
        }
        Self { ops }
    }

    pub fn num_sites(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.ops
    }

    /// Operator at 1-based site `n`.
    pub fn op_at(&self, n: usize) -> PauliOp {
        self.ops[n - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&op| op == PauliOp::I)
    }

    pub fn masks(&self) -> StringMasks {
        let l = self.ops.len();
        let mut flip = 0u64;
        let mut phase_flip = 0u64;
        let mut y_count = 0u32;
        for (n, &op) in self.ops.iter().enumerate() {
            let bit = 1u64 << (l - 1 - n);
            match op {
                PauliOp::I => {}
                PauliOp::X => flip |= bit,
                PauliOp::Y => {
                    flip |= bit;
                    phase_flip |= bit;
                    y_count += 1;
                }
                PauliOp::Z => phase_flip |= bit,
            }
        }
        StringMasks { flip, phase_flip, y_count }
    }

    /// Action on a basis state: `P |b⟩ = phase · |b ⊕ flip⟩`.
    #[inline]
    pub fn apply_to_basis(masks: &StringMasks, b: u64) -> (u64, Complex64) {
        let mut phase = I_POW[(masks.y_count % 4) as usize];
        if (b & masks.phase_flip).count_ones() % 2 == 1 {
            phase = -phase;
        }
        (b ^ masks.flip, phase)
    }

    /// Site-wise product `self · rhs`, returning the result string and the
    /// accumulated power of i from relations like X·Y = iZ.
    pub fn product(&self, rhs: &PauliString) -> (PauliString, u8) {
        assert_eq!(self.ops.len(), rhs.ops.len(), "length mismatch in Pauli product");
        let mut ops = Vec::with_capacity(self.ops.len());
        let mut i_pow = 0u8;
        for (&a, &b) in self.ops.iter().zip(rhs.ops.iter()) {
            let (op, p) = single_product(a, b);
            ops.push(op);
            i_pow = (i_pow + p) % 4;
        }
        (PauliString { ops }, i_pow)
    }
}

/// Product table for single-site Paulis: returns (result, power of i).
fn single_product(a: PauliOp, b: PauliOp) -> (PauliOp, u8) {
    use PauliOp::*;
    match (a, b) {
        (I, op) | (op, I) => (op, 0),
        (X, X) | (Y, Y) | (Z, Z) => (I, 0),
        (X, Y) => (Z, 1),
        (Y, X) => (Z, 3),
        (Y, Z) => (X, 1),
        (Z, Y) => (X, 3),
        (Z, X) => (Y, 1),
        (X, Z) => (Y, 3),
    }
}

/// Weighted sum of Pauli strings with merged (unique) strings. For the
/// chain builders all coefficients are real; the imaginary parts are
/// exactly zero after simplification.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian {
    l: usize,
    terms: Vec<(Complex64, PauliString)>,
}

impl PauliHamiltonian {
    /// Merge like strings, preserving first-seen order, pruning
    /// coefficients below `prune`.
    pub fn from_terms(
        l: usize,
        terms: impl IntoIterator<Item = (Complex64, PauliString)>,
        prune: f64,
    ) -> Self {
        let mut out: Vec<(Complex64, PauliString)> = Vec::new();
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        for (coeff, string) in terms {
            assert_eq!(string.num_sites(), l, "string length mismatch");
            match index.get(&string) {
                Some(&i) => out[i].0 += coeff,
                None => {
                    index.insert(string.clone(), out.len());
                    out.push((coeff, string));
                }
            }
        }
        out.retain(|(c, _)| c.norm() >= prune);
        for (c, _) in out.iter_mut() {
            if c.im.abs() < COEFF_PRUNE_THRESHOLD {
                c.im = 0.0;
            }
        }
        Self { l, terms: out }
    }

    pub fn num_sites(&self) -> usize {
        self.l
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
}

/// Closed-chain Hamiltonian. For L = 2 the two bonds act on the same
/// pair of sites and merge into three strings with doubled coefficients.
pub fn build_closed_hamiltonian(l: usize, delta: f64) -> Result<PauliHamiltonian, ModelError> {
    if l < 2 {
        return Err(ModelError::ChainTooShort(l));
    }
    if !delta.is_finite() {
        return Err(ModelError::NonFiniteParameter);
    }
    let mut terms = Vec::with_capacity(3 * l);
    for n in 1..=l {
        let next = n % l + 1;
        push_bond(&mut terms, l, n, next, delta);
    }
    Ok(PauliHamiltonian::from_terms(l, terms, 0.0))
}

/// Open-chain Hamiltonian with boundary fields on sites 1 and L.
pub fn build_open_hamiltonian(
    l: usize,
    delta: f64,
    h: f64,
    h_prime: f64,
) -> Result<PauliHamiltonian, ModelError> {
    if l < 2 {
        return Err(ModelError::ChainTooShort(l));
    }
    if !(delta.is_finite() && h.is_finite() && h_prime.is_finite()) {
        return Err(ModelError::NonFiniteParameter);
    }
    let mut terms = Vec::with_capacity(3 * (l - 1) + 2);
    for n in 1..l {
        push_bond(&mut terms, l, n, n + 1, delta);
    }
    if h != 0.0 {
        terms.push((
            Complex64::new(h / 4.0, 0.0),
            PauliString::from_sites(l, &[(1, PauliOp::Z)]),
        ));
    }
    if h_prime != 0.0 {
        terms.push((
            Complex64::new(h_prime / 4.0, 0.0),
            PauliString::from_sites(l, &[(l, PauliOp::Z)]),
        ));
    }
    Ok(PauliHamiltonian::from_terms(l, terms, 0.0))
}

fn push_bond(
    terms: &mut Vec<(Complex64, PauliString)>,
    l: usize,
    a: usize,
    b: usize,
    delta: f64,
) {
    let quarter = Complex64::new(0.25, 0.0);
    terms.push((quarter, PauliString::from_sites(l, &[(a, PauliOp::X), (b, PauliOp::X)])));
    terms.push((quarter, PauliString::from_sites(l, &[(a, PauliOp::Y), (b, PauliOp::Y)])));
    if delta != 0.0 {
        terms.push((
            Complex64::new(delta / 4.0, 0.0),
            PauliString::from_sites(l, &[(a, PauliOp::Z), (b, PauliOp::Z)]),
        ));
    }
}

/// Kronecker-product expansion of `h` into a dense 2^L × 2^L matrix.
pub fn to_dense_matrix(h: &PauliHamiltonian) -> Result<DMatrix<Complex64>, ModelError> {
    let l = h.num_sites();
    if l > DENSE_SITE_GUARD {
        return Err(ModelError::DenseGuard { got: l, max: DENSE_SITE_GUARD });
    }
    let dim = 1usize << l;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
    for (coeff, string) in h.terms() {
        let masks = string.masks();
        for b in 0..dim as u64 {
            let (target, phase) = PauliString::apply_to_basis(&masks, b);
            mat[(target as usize, b as usize)] += coeff * phase;
        }
    }
    Ok(mat)
}

/// `H·H` via Pauli-string algebra, with like strings merged and
/// coefficients below [`COEFF_PRUNE_THRESHOLD`] dropped.
pub fn square_hamiltonian(h: &PauliHamiltonian) -> PauliHamiltonian {
    let l = h.num_sites();
    let products = h.terms().iter().flat_map(|(ci, si)| {
        h.terms().iter().map(move |(cj, sj)| {
            let (string, i_pow) = si.product(sj);
            (ci * cj * I_POW[i_pow as usize], string)
        })
    });
    PauliHamiltonian::from_terms(l, products, COEFF_PRUNE_THRESHOLD)
}

/// All C(L,M) basis bitstrings with exactly `m` down-spins, in increasing
/// integer order under the site-1-most-significant encoding.
pub fn sector_basis(l: usize, m: usize) -> Result<Vec<u64>, ModelError> {
    if m > l {
        return Err(ModelError::SectorOutOfRange { l, m });
    }
    if m == 0 {
        return Ok(vec![0]);
    }
    let limit = 1u64 << l;
    let mut out = Vec::with_capacity(binomial(l, m) as usize);
    // Gosper's hack: next integer with the same popcount.
    let mut v = (1u64 << m) - 1;
    while v < limit {
        out.push(v);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    Ok(out)
}

/// Binomial coefficient C(n, k) in u64 (exact for the sizes used here).
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn closed_l2_merges_double_bond() {
        let h = build_closed_hamiltonian(2, 2.0).unwrap();
        assert_eq!(h.num_terms(), 3);
        for (c, _) in h.terms() {
            assert!(approx(c.re, 0.5, 1e-15) || approx(c.re, 1.0, 1e-15));
            assert_eq!(c.im, 0.0);
        }
    }

    #[test]
    fn closed_term_counts() {
        assert_eq!(build_closed_hamiltonian(4, 2.0).unwrap().num_terms(), 12);
        // Δ = 0 kills every ZZ string.
        assert_eq!(build_closed_hamiltonian(4, 0.0).unwrap().num_terms(), 8);
        assert!(build_closed_hamiltonian(1, 2.0).is_err());
    }

    #[test]
    fn open_term_counts() {
        let h = build_open_hamiltonian(3, 0.5, 3.0, 0.3).unwrap();
        assert_eq!(h.num_terms(), 3 * 2 + 2);
        let free = build_open_hamiltonian(2, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(free.num_terms(), 2);
    }

    #[test]
    fn dense_single_z_is_diag() {
        let h = PauliHamiltonian::from_terms(
            1,
            [(Complex64::new(1.0, 0.0), PauliString::from_sites(1, &[(1, PauliOp::Z)]))],
            0.0,
        );
        let m = to_dense_matrix(&h).unwrap();
        assert_eq!(m[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(m[(1, 1)], Complex64::new(-1.0, 0.0));
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn dense_is_hermitian_and_traceless() {
        for h in [
            build_closed_hamiltonian(2, 2.0).unwrap(),
            build_closed_hamiltonian(4, 2.0).unwrap(),
            build_open_hamiltonian(3, 0.5, 3.0, 0.3).unwrap(),
        ] {
            let m = to_dense_matrix(&h).unwrap();
            let adj = m.adjoint();
            assert_eq!(m, adj);
            assert!(m.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn dense_open_l2_matches_hand_action() {
        // (XX+YY)/4 at Δ = h = h' = 0: eigenvalues {±1/2, 0, 0}.
        let h = build_open_hamiltonian(2, 0.0, 0.0, 0.0).unwrap();
        let m = to_dense_matrix(&h).unwrap();
        let expected = [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.5, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        for r in 0..4 {
            for c in 0..4 {
                assert!(approx(m[(r, c)].re, expected[r][c], 1e-15));
                assert_eq!(m[(r, c)].im, 0.0);
            }
        }
    }

    #[test]
    fn u1_symmetry_commutes_with_sz() {
        let h = build_closed_hamiltonian(4, 2.0).unwrap();
        let m = to_dense_matrix(&h).unwrap();
        let dim = 16;
        let mut sz = DMatrix::<Complex64>::zeros(dim, dim);
        for b in 0..dim as u64 {
            let ones = b.count_ones() as f64;
            sz[(b as usize, b as usize)] = Complex64::new((4.0 - 2.0 * ones) / 2.0, 0.0);
        }
        let comm = &m * &sz - &sz * &m;
        assert!(comm.iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn charge_conjugation_symmetry_closed() {
        let h = build_closed_hamiltonian(4, 2.0).unwrap();
        let m = to_dense_matrix(&h).unwrap();
        let dim = 16u64;
        // C = X^{⊗L} maps |b⟩ to |~b⟩; check H[i,j] = H[~i, ~j].
        for i in 0..dim {
            for j in 0..dim {
                let d = m[(i as usize, j as usize)]
                    - m[((dim - 1 - i) as usize, (dim - 1 - j) as usize)];
                assert!(d.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn square_involution_and_scalar() {
        let xx = PauliHamiltonian::from_terms(
            2,
            [(
                Complex64::new(1.0, 0.0),
                PauliString::from_sites(2, &[(1, PauliOp::X), (2, PauliOp::X)]),
            )],
            0.0,
        );
        let sq = square_hamiltonian(&xx);
        assert_eq!(sq.num_terms(), 1);
        assert!(sq.terms()[0].1.is_identity());
        assert!(approx(sq.terms()[0].0.re, 1.0, 1e-15));

        let scalar = PauliHamiltonian::from_terms(
            2,
            [(Complex64::new(3.0, 0.0), PauliString::identity(2))],
            0.0,
        );
        let sq = square_hamiltonian(&scalar);
        assert!(approx(sq.terms()[0].0.re, 9.0, 1e-15));
    }

    #[test]
    fn square_matches_dense_product() {
        let h = build_closed_hamiltonian(4, 2.0).unwrap();
        let sq = square_hamiltonian(&h);
        for (c, _) in sq.terms() {
            assert_eq!(c.im, 0.0);
        }
        let m = to_dense_matrix(&h).unwrap();
        let direct = &m * &m;
        let via_algebra = to_dense_matrix(&sq).unwrap();
        let diff = (&direct - &via_algebra).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "max entry difference {diff}");
    }

    #[test]
    fn sector_basis_order_and_counts() {
        assert_eq!(sector_basis(2, 1).unwrap(), vec![1, 2]);
        assert_eq!(sector_basis(4, 2).unwrap().len(), 6);
        let s = sector_basis(6, 3).unwrap();
        assert_eq!(s.len(), 20);
        assert!(s.iter().all(|b| b.count_ones() == 3));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sector_basis(3, 0).unwrap(), vec![0]);
        assert!(sector_basis(3, 4).is_err());
    }
}
