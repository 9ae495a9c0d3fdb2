//! Expectation values and variances on a state, exactly or via a seeded
//! shot-based sampler emulating a noiseless measurement device.
//!
//! The exact path applies Pauli strings directly to the amplitude vector
//! (bit flips and phases, no dense matrix). The shot path rotates the
//! state into each string's eigenbasis, computes the exact ±1 outcome
//! probabilities, and simulates `x` independent measurements per string.
//! Since each shot is a Bernoulli trial on the outcome parity, the sample
//! mean of `x` shots is drawn as (2·Binomial(x, p₊) − x)/x, which has
//! exactly the same distribution as summing individual draws.
//!
//! Both paths sit behind the [`Evaluator`] trait; implementations are
//! registered by name ("exact", "shots:<x>") and selected at runtime.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::bethe::QuantumState;
use crate::model::{PauliHamiltonian, PauliOp, PauliString};
use crate::model::square_hamiltonian;
use crate::streams::substream;

/// Substream domains: one per estimated Hamiltonian, so the H and H²
/// passes of a variance estimate never share randomness.
const DOMAIN_EXPVAL: u64 = 0;
const DOMAIN_SQUARE: u64 = 1;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("state is over {state_sites} sites but the Hamiltonian acts on {ham_sites}")]
    DimensionMismatch { state_sites: usize, ham_sites: usize },
    #[error("expectation value has imaginary part {0:.3e}")]
    NonRealExpectation(f64),
    #[error("unknown evaluator spec '{0}' (expected 'exact' or 'shots:<x>')")]
    UnknownEvaluator(String),
    #[error("invalid shot count in evaluator spec '{0}'")]
    InvalidShotCount(String),
}

/// Shot allocation policy. Every non-identity string currently gets the
/// same independent budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShotAllocation {
    #[default]
    PerString,
}

/// How a shot-based estimate is drawn: `shots_per_string` measurements
/// for each non-identity Pauli string, from substreams of `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotConfig {
    pub shots_per_string: u64,
    pub seed: u64,
    pub allocation: ShotAllocation,
}

impl ShotConfig {
    pub fn new(shots_per_string: u64, seed: u64) -> Self {
        assert!(shots_per_string >= 1, "shots_per_string must be at least 1");
        Self { shots_per_string, seed, allocation: ShotAllocation::PerString }
    }
}

/// A single estimate with its statistical error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub value: f64,
    pub std_error: f64,
    pub total_shots: u64,
    pub seed: u64,
}

impl EstimateReport {
    fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, total_shots: 0, seed: 0 }
    }
}

fn check_dims(state: &QuantumState, h: &PauliHamiltonian) -> Result<(), SimError> {
    if state.num_sites() != h.num_sites() {
        return Err(SimError::DimensionMismatch {
            state_sites: state.num_sites(),
            ham_sites: h.num_sites(),
        });
    }
    Ok(())
}

/// ⟨v|P|v⟩ for a single string, by bit-flip/phase action.
fn string_expectation(amps: &[Complex64], string: &PauliString) -> Complex64 {
    let masks = string.masks();
    let mut acc = Complex64::new(0.0, 0.0);
    for (b, amp) in amps.iter().enumerate() {
        let (target, phase) = PauliString::apply_to_basis(&masks, b as u64);
        acc += amps[target as usize].conj() * phase * amp;
    }
    acc
}

/// `H |v⟩` accumulated string by string.
pub(crate) fn apply_hamiltonian(amps: &[Complex64], h: &PauliHamiltonian) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (coeff, string) in h.terms() {
        let masks = string.masks();
        for (b, amp) in amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let (target, phase) = PauliString::apply_to_basis(&masks, b as u64);
            out[target as usize] += coeff * phase * amp;
        }
    }
    out
}

/// Exact ⟨v|H|v⟩. The imaginary part must vanish for a Hermitian sum and
/// is checked against 1e−10 before being discarded.
pub fn expval_exact(state: &QuantumState, h: &PauliHamiltonian) -> Result<f64, SimError> {
    check_dims(state, h)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (coeff, string) in h.terms() {
        acc += coeff * string_expectation(state.amplitudes(), string);
    }
    if acc.im.abs() >= 1e-10 {
        return Err(SimError::NonRealExpectation(acc.im));
    }
    Ok(acc.re)
}

/// Exact variance ⟨H²⟩ − ⟨H⟩², with ⟨H²⟩ = ‖H|v⟩‖² from double string
/// application. Clipped to ≥ 0 (the raw value can dip to −1e−10 in
/// floating point).
pub fn variance_exact(state: &QuantumState, h: &PauliHamiltonian) -> Result<f64, SimError> {
    check_dims(state, h)?;
    let hv = apply_hamiltonian(state.amplitudes(), h);
    let h_sq: f64 = hv.iter().map(|a| a.norm_sqr()).sum();
    let e: Complex64 = state
        .amplitudes()
        .iter()
        .zip(hv.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    if e.im.abs() >= 1e-10 {
        return Err(SimError::NonRealExpectation(e.im));
    }
    let var = h_sq - e.re * e.re;
    debug_assert!(var > -1e-10, "variance fell below the float-noise floor: {var}");
    Ok(var.max(0.0))
}

/// Rotate `amps` into the eigenbasis of `string` (site-wise basis change
/// for X and Y), so a subsequent Z-basis readout measures the string.
fn rotate_to_eigenbasis(amps: &[Complex64], string: &PauliString) -> Vec<Complex64> {
    let l = string.num_sites();
    let mut out = amps.to_vec();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for site in 1..=l {
        let op = string.op_at(site);
        if op == PauliOp::I || op == PauliOp::Z {
            continue;
        }
        let bit = 1usize << (l - site);
        for b in 0..out.len() {
            if b & bit != 0 {
                continue;
            }
            let (v0, v1) = (out[b], out[b | bit]);
            match op {
                PauliOp::X => {
                    out[b] = (v0 + v1) * inv_sqrt2;
                    out[b | bit] = (v0 - v1) * inv_sqrt2;
                }
                PauliOp::Y => {
                    // Eigenvectors (|0⟩ ± i|1⟩)/√2; slot 0 holds the +1 outcome.
                    out[b] = (v0 - Complex64::new(0.0, 1.0) * v1) * inv_sqrt2;
                    out[b | bit] = (v0 + Complex64::new(0.0, 1.0) * v1) * inv_sqrt2;
                }
                _ => unreachable!(),
            }
        }
    }
    out
}

/// Simulate `x` independent ±1 measurements of a (non-identity) Pauli
/// string and return the sample mean — an unbiased estimator of ⟨P⟩.
pub fn sample_string(
    state: &QuantumState,
    string: &PauliString,
    x: u64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    debug_assert!(!string.is_identity(), "identity strings are handled exactly");
    debug_assert!(x >= 1);
    let rotated = rotate_to_eigenbasis(state.amplitudes(), string);
    let masks = string.masks();
    let support = masks.flip | masks.phase_flip;
    let mut p_plus = 0.0f64;
    for (b, amp) in rotated.iter().enumerate() {
        if (b as u64 & support).count_ones() % 2 == 0 {
            p_plus += amp.norm_sqr();
        }
    }
    let p_plus = p_plus.clamp(0.0, 1.0);
    let n_plus = if p_plus == 0.0 {
        0
    } else if p_plus == 1.0 {
        x
    } else {
        Binomial::new(x, p_plus).expect("validated probability").sample(rng)
    };
    (2 * n_plus) as f64 / x as f64 - 1.0
}

fn estimate_hamiltonian(
    state: &QuantumState,
    h: &PauliHamiltonian,
    cfg: &ShotConfig,
    domain: u64,
) -> Result<EstimateReport, SimError> {
    check_dims(state, h)?;
    let x = cfg.shots_per_string;
    let mut value = 0.0f64;
    let mut var_sum = 0.0f64;
    let mut total_shots = 0u64;
    for (index, (coeff, string)) in h.terms().iter().enumerate() {
        if string.is_identity() {
            value += coeff.re;
            continue;
        }
        let mut rng = substream(cfg.seed, domain, index as u64);
        let mean = sample_string(state, string, x, &mut rng);
        value += coeff.re * mean;
        var_sum += coeff.re * coeff.re * (1.0 - mean * mean).max(0.0) / x as f64;
        total_shots += x;
    }
    Ok(EstimateReport { value, std_error: var_sum.sqrt(), total_shots, seed: cfg.seed })
}

/// Shot-based estimate of ⟨H⟩: identity strings contribute exactly, every
/// other string is sampled with `cfg.shots_per_string` shots from its own
/// substream of `cfg.seed`.
pub fn expval_shots(
    state: &QuantumState,
    h: &PauliHamiltonian,
    cfg: &ShotConfig,
) -> Result<EstimateReport, SimError> {
    estimate_hamiltonian(state, h, cfg, DOMAIN_EXPVAL)
}

/// Shot-based variance: the same per-string procedure applied to H²
/// (via the Pauli-product square), minus the squared energy estimate.
pub fn variance_shots(
    state: &QuantumState,
    h: &PauliHamiltonian,
    cfg: &ShotConfig,
) -> Result<EstimateReport, SimError> {
    let h2 = square_hamiltonian(h);
    let sq = estimate_hamiltonian(state, &h2, cfg, DOMAIN_SQUARE)?;
    let en = estimate_hamiltonian(state, h, cfg, DOMAIN_EXPVAL)?;
    let value = sq.value - en.value * en.value;
    let std_error =
        (sq.std_error * sq.std_error + (2.0 * en.value * en.std_error).powi(2)).sqrt();
    Ok(EstimateReport {
        value,
        std_error,
        total_shots: sq.total_shots + en.total_shots,
        seed: cfg.seed,
    })
}

/// How a [`Evaluator`] estimates expectations, as reportable metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluatorKind {
    Exact,
    Shots { shots_per_string: u64 },
}

impl std::fmt::Display for EvaluatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvaluatorKind::Exact => write!(f, "exact"),
            EvaluatorKind::Shots { shots_per_string } => write!(f, "shots:{shots_per_string}"),
        }
    }
}

/// Common interface over the exact and shot-based estimators. Shot-based
/// implementations draw a fresh substream for every call, so repeated
/// evaluations inside an optimization loop see independent noise while
/// whole runs stay reproducible under a fixed seed.
pub trait Evaluator {
    fn kind(&self) -> EvaluatorKind;
    fn expval(&mut self, state: &QuantumState, h: &PauliHamiltonian)
        -> Result<EstimateReport, SimError>;
    fn variance(&mut self, state: &QuantumState, h: &PauliHamiltonian)
        -> Result<EstimateReport, SimError>;
}

/// Statevector evaluation: exact inner products, zero error bars.
#[derive(Debug, Default)]
pub struct ExactEvaluator;

impl Evaluator for ExactEvaluator {
    fn kind(&self) -> EvaluatorKind {
        EvaluatorKind::Exact
    }

    fn expval(
        &mut self,
        state: &QuantumState,
        h: &PauliHamiltonian,
    ) -> Result<EstimateReport, SimError> {
        Ok(EstimateReport::exact(expval_exact(state, h)?))
    }

    fn variance(
        &mut self,
        state: &QuantumState,
        h: &PauliHamiltonian,
    ) -> Result<EstimateReport, SimError> {
        Ok(EstimateReport::exact(variance_exact(state, h)?))
    }
}

/// Seeded shot-based evaluation; evaluation `e` of a run uses the
/// substream seed derived from (base_seed, e).
#[derive(Debug)]
pub struct ShotEvaluator {
    shots_per_string: u64,
    base_seed: u64,
    evaluation: u64,
}

/// Domain tag separating per-evaluation seeds from per-string streams.
const DOMAIN_EVALUATION: u64 = 0xE;

impl ShotEvaluator {
    pub fn new(shots_per_string: u64, base_seed: u64) -> Self {
        assert!(shots_per_string >= 1);
        Self { shots_per_string, base_seed, evaluation: 0 }
    }

    fn next_config(&mut self) -> ShotConfig {
        let seed =
            crate::streams::derive_seed(self.base_seed, DOMAIN_EVALUATION, self.evaluation);
        self.evaluation += 1;
        ShotConfig::new(self.shots_per_string, seed)
    }
}

impl Evaluator for ShotEvaluator {
    fn kind(&self) -> EvaluatorKind {
        EvaluatorKind::Shots { shots_per_string: self.shots_per_string }
    }

    fn expval(
        &mut self,
        state: &QuantumState,
        h: &PauliHamiltonian,
    ) -> Result<EstimateReport, SimError> {
        let cfg = self.next_config();
        expval_shots(state, h, &cfg)
    }

    fn variance(
        &mut self,
        state: &QuantumState,
        h: &PauliHamiltonian,
    ) -> Result<EstimateReport, SimError> {
        let cfg = self.next_config();
        variance_shots(state, h, &cfg)
    }
}

type EvaluatorBuilder = fn(args: Option<&str>, seed: u64) -> Result<Box<dyn Evaluator>, SimError>;

/// Name → builder registry behind the `exact | shots:<x>` spec strings.
static EVALUATOR_REGISTRY: &[(&str, EvaluatorBuilder)] = &[
    ("exact", |args, _seed| {
        if args.is_some() {
            return Err(SimError::UnknownEvaluator("exact takes no arguments".into()));
        }
        Ok(Box::new(ExactEvaluator))
    }),
    ("shots", |args, seed| {
        let arg = args.ok_or_else(|| SimError::InvalidShotCount("shots".into()))?;
        let x: u64 = arg
            .parse()
            .map_err(|_| SimError::InvalidShotCount(format!("shots:{arg}")))?;
        if x == 0 {
            return Err(SimError::InvalidShotCount(format!("shots:{arg}")));
        }
        Ok(Box::new(ShotEvaluator::new(x, seed)))
    }),
];

/// Build the evaluator named by `spec` ("exact" or "shots:<x>").
pub fn evaluator_from_spec(spec: &str, seed: u64) -> Result<Box<dyn Evaluator>, SimError> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    for (reg_name, builder) in EVALUATOR_REGISTRY {
        if *reg_name == name {
            return builder(args, seed);
        }
    }
    Err(SimError::UnknownEvaluator(spec.to_string()))
}

/// Parse an evaluator spec into its metadata form without building it.
pub fn evaluator_kind_from_spec(spec: &str) -> Result<EvaluatorKind, SimError> {
    Ok(evaluator_from_spec(spec, 0)?.kind())
}

/// Build an evaluator from its metadata form.
pub fn build_evaluator(kind: EvaluatorKind, seed: u64) -> Box<dyn Evaluator> {
    match kind {
        EvaluatorKind::Exact => Box::new(ExactEvaluator),
        EvaluatorKind::Shots { shots_per_string } => {
            Box::new(ShotEvaluator::new(shots_per_string, seed))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_closed_hamiltonian, PauliOp};
    use rand::Rng as _;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn state_from(l: usize, amps: Vec<Complex64>) -> QuantumState {
        let mut s = QuantumState::from_amplitudes(l, amps);
        s.normalize();
        s
    }

    #[test]
    fn reference_state_energy_is_l_delta_over_4() {
        for (l, delta) in [(2usize, 2.0), (4, 2.0), (4, 0.5)] {
            let h = build_closed_hamiltonian(l, delta).unwrap();
            let mut amps = vec![c(0.0, 0.0); 1 << l];
            amps[0] = c(1.0, 0.0);
            let state = state_from(l, amps);
            let e = expval_exact(&state, &h).unwrap();
            assert!((e - l as f64 * delta / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_z_measurement() {
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[0] = c(1.0, 0.0);
        let state = state_from(2, amps);
        let zz = PauliString::from_sites(2, &[(1, PauliOp::Z), (2, PauliOp::Z)]);
        for x in [1u64, 7, 1000] {
            let mut rng = substream(3, 0, 0);
            assert_eq!(sample_string(&state, &zz, x, &mut rng), 1.0);
        }
    }

    #[test]
    fn balanced_coin_sample_mean() {
        // |+⟩ ⊗ |0⟩ measured in Z on site 1: mean → 0.
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let amps = vec![c(inv, 0.0), c(0.0, 0.0), c(inv, 0.0), c(0.0, 0.0)];
        let state = state_from(2, amps);
        let z1 = PauliString::from_sites(2, &[(1, PauliOp::Z)]);
        let x = 1_000_000u64;
        let mut rng = substream(11, 0, 0);
        let mean = sample_string(&state, &z1, x, &mut rng);
        assert!(mean.abs() < 5.0 / (x as f64).sqrt(), "mean = {mean}");
    }

    #[test]
    fn bell_state_xx_expectation() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        // (|01⟩ − |10⟩)/√2 has ⟨X₁X₂⟩ = −1.
        let amps = vec![c(0.0, 0.0), c(inv, 0.0), c(-inv, 0.0), c(0.0, 0.0)];
        let state = state_from(2, amps);
        let xx = PauliString::from_sites(2, &[(1, PauliOp::X), (2, PauliOp::X)]);
        assert!((string_expectation(state.amplitudes(), &xx).re + 1.0).abs() < 1e-12);
        let mut rng = substream(5, 0, 0);
        assert_eq!(sample_string(&state, &xx, 100, &mut rng), -1.0);
    }

    #[test]
    fn exact_matches_dense_oracle_on_random_states() {
        use crate::model::to_dense_matrix;
        let h = build_closed_hamiltonian(4, 2.0).unwrap();
        let dense = to_dense_matrix(&h).unwrap();
        let mut rng = substream(17, 0, 0);
        for _ in 0..5 {
            let amps: Vec<Complex64> =
                (0..16).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let state = state_from(4, amps);
            let v = nalgebra::DVector::from_iterator(16, state.amplitudes().iter().cloned());
            let hv = &dense * &v;
            let e_dense = v.dotc(&hv).re;
            let var_dense = hv.dotc(&hv).re - e_dense * e_dense;
            assert!((expval_exact(&state, &h).unwrap() - e_dense).abs() < 1e-10);
            assert!((variance_exact(&state, &h).unwrap() - var_dense.max(0.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn shot_reports_are_bit_reproducible() {
        let h = build_closed_hamiltonian(4, 2.0).unwrap();
        let mut rng = substream(23, 0, 0);
        let amps: Vec<Complex64> =
            (0..16).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let state = state_from(4, amps);
        let cfg = ShotConfig::new(500, 99);
        let a = expval_shots(&state, &h, &cfg).unwrap();
        let b = expval_shots(&state, &h, &cfg).unwrap();
        assert_eq!(a, b);
        let va = variance_shots(&state, &h, &cfg).unwrap();
        let vb = variance_shots(&state, &h, &cfg).unwrap();
        assert_eq!(va, vb);
        assert_eq!(a.total_shots, 500 * h.num_terms() as u64);
    }

    #[test]
    fn shots_converge_to_exact() {
        let h = build_closed_hamiltonian(4, 2.0).unwrap();
        let mut rng = substream(29, 0, 0);
        let amps: Vec<Complex64> =
            (0..16).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let state = state_from(4, amps);
        let exact = expval_exact(&state, &h).unwrap();
        let cfg = ShotConfig::new(1_000_000, 1);
        let report = expval_shots(&state, &h, &cfg).unwrap();
        assert!(
            (report.value - exact).abs() < 10.0 * report.std_error,
            "estimate {} vs exact {} (se {})",
            report.value,
            exact,
            report.std_error
        );
    }

    #[test]
    fn evaluator_registry_resolves_specs() {
        assert_eq!(evaluator_kind_from_spec("exact").unwrap(), EvaluatorKind::Exact);
        assert_eq!(
            evaluator_kind_from_spec("shots:10000").unwrap(),
            EvaluatorKind::Shots { shots_per_string: 10000 }
        );
        assert!(evaluator_kind_from_spec("shots:abc").is_err());
        assert!(evaluator_kind_from_spec("shots:0").is_err());
        assert!(evaluator_kind_from_spec("aer").is_err());
    }
}
