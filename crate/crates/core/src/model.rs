//! Model and state types for the dephasing model, plus the constructors for
//! the initial states used throughout the book and the moment quantities
//! that every characteristic-time formula consumes.
//!
//! The whole Hamiltonian is diagonal in the product number basis, so the
//! system is described by its number-basis density matrix `B` and each
//! reservoir mode by its number distribution `A_{r,r}` alone. Reservoir
//! coherences never enter the reduced purity; the numeric oracle keeps them
//! and confirms this.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Real;

/// Hermiticity, trace and positivity tolerance for [`SystemState`].
pub const STATE_TOLERANCE: f64 = 1e-12;

/// Normalization tolerance for [`ModeDistribution`].
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Default discarded tail mass for thermal truncation.
pub const DEFAULT_TAIL_EPSILON: f64 = 1e-12;

/// Upper bound on the number of levels a thermal truncation may produce.
pub const MAX_THERMAL_LEVELS: usize = 1 << 22;

/// A positive coupling exponent (`x` on the system number operator, `y` on
/// each reservoir number operator).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Real", into = "Real")]
pub struct Exponent(Real);

impl Exponent {
    pub const ONE: Exponent = Exponent(Real::ONE);

    pub fn new(value: Real) -> Result<Self> {
        if !(value.value() > 0.0 && value.value().is_finite()) {
            return Err(Error::InvalidModel(format!("exponent must be positive, got {value}")));
        }
        Ok(Self(value))
    }

    pub fn integer(n: u32) -> Result<Self> {
        Self::new(Real::integer(n as i64))
    }

    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        Self::new(Real::ratio(num, den))
    }

    pub fn value(&self) -> f64 {
        self.0.value()
    }

    pub fn as_real(&self) -> Real {
        self.0
    }

    /// Exact integer value, if the exponent is a known integer.
    pub fn as_integer(&self) -> Option<u32> {
        self.0
            .as_exact()
            .filter(|r| r.is_integer())
            .and_then(|r| u32::try_from(*r.numer()).ok())
    }

    /// `n^self` for a level index `n`.
    pub fn power(&self, n: usize) -> f64 {
        match self.as_integer() {
            Some(k) => (n as f64).powi(k as i32),
            None => (n as f64).powf(self.value()),
        }
    }
}

impl TryFrom<Real> for Exponent {
    type Error = Error;
    fn try_from(value: Real) -> Result<Self> {
        Exponent::new(value)
    }
}

impl From<Exponent> for Real {
    fn from(e: Exponent) -> Real {
        e.0
    }
}

/// Physical constants and couplings.
///
/// `omega`, `g` and `big_omega` enter only the numeric oracle's energies and
/// the recurrence time; the linear entropy depends on the couplings and the
/// exponents alone.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    hbar: f64,
    x: Exponent,
    y: Exponent,
    couplings: Vec<Real>,
    omega: f64,
    g: Real,
    big_omega: f64,
}

impl ModelSpec {
    pub fn builder() -> ModelSpecBuilder {
        ModelSpecBuilder::default()
    }

    /// `hbar = 1`, `x = y = 1`, no Kerr term, unit reservoir frequency.
    pub fn with_couplings(couplings: Vec<Real>) -> Result<Self> {
        Self::builder().couplings(couplings).build()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn x(&self) -> Exponent {
        self.x
    }

    pub fn y(&self) -> Exponent {
        self.y
    }

    pub fn couplings(&self) -> &[Real] {
        &self.couplings
    }

    pub fn modes(&self) -> usize {
        self.couplings.len()
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g(&self) -> Real {
        self.g
    }

    pub fn big_omega(&self) -> f64 {
        self.big_omega
    }

    /// `hbar^(x + y - 1)`, the prefactor every interaction phase carries.
    pub fn phase_scale(&self) -> f64 {
        self.hbar.powf(self.x.value() + self.y.value() - 1.0)
    }

    /// Copy with different Kerr / free-oscillator parameters.
    pub fn with_oscillator(&self, omega: f64, g: Real, big_omega: f64) -> Result<Self> {
        let mut m = self.clone();
        m.omega = omega;
        m.g = g;
        m.big_omega = big_omega;
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.couplings.is_empty() {
            return Err(Error::InvalidModel("at least one reservoir mode is required".into()));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidModel(format!("hbar must be positive, got {}", self.hbar)));
        }
        if let Some((l, c)) = self
            .couplings
            .iter()
            .enumerate()
            .find(|(_, c)| !c.value().is_finite())
        {
            return Err(Error::InvalidModel(format!("coupling {l} is not finite: {c}")));
        }
        if !(self.omega.is_finite() && self.g.value().is_finite() && self.big_omega.is_finite()) {
            return Err(Error::InvalidModel("oscillator frequencies must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ModelSpecBuilder {
    hbar: f64,
    x: Exponent,
    y: Exponent,
    couplings: Vec<Real>,
    omega: f64,
    g: Real,
    big_omega: f64,
}

impl Default for ModelSpecBuilder {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            x: Exponent::ONE,
            y: Exponent::ONE,
            couplings: Vec::new(),
            omega: 0.0,
            g: Real::integer(0),
            big_omega: 1.0,
        }
    }
}

impl ModelSpecBuilder {
    pub fn hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn exponents(mut self, x: Exponent, y: Exponent) -> Self {
        self.x = x;
        self.y = y;
        self
    }

    pub fn couplings(mut self, couplings: Vec<Real>) -> Self {
        self.couplings = couplings;
        self
    }

    /// Takes the couplings of an assembled reservoir.
    pub fn couplings_of(mut self, reservoir: &ReservoirSpec) -> Self {
        self.couplings = reservoir.couplings().collect();
        self
    }

    pub fn omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn kerr(mut self, g: Real) -> Self {
        self.g = g;
        self
    }

    pub fn reservoir_frequency(mut self, big_omega: f64) -> Self {
        self.big_omega = big_omega;
        self
    }

    pub fn build(self) -> Result<ModelSpec> {
        let m = ModelSpec {
            hbar: self.hbar,
            x: self.x,
            y: self.y,
            couplings: self.couplings,
            omega: self.omega,
            g: self.g,
            big_omega: self.big_omega,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Number-basis density matrix of the system of interest, truncated to `dim`
/// levels. Stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    dim: usize,
    b: Vec<Complex64>,
}

impl SystemState {
    /// `(|0> + |1>)(<0| + <1|) / 2`.
    pub fn superposition() -> Self {
        Self {
            dim: 2,
            b: vec![Complex64::new(0.5, 0.0); 4],
        }
    }

    /// Fock state `|n><n|` in an `n + 1` level truncation.
    pub fn fock(n: usize) -> Self {
        let dim = n + 1;
        let mut b = vec![Complex64::default(); dim * dim];
        b[n * dim + n] = Complex64::new(1.0, 0.0);
        Self { dim, b }
    }

    /// Pure state from (unnormalized) number-basis amplitudes.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if amplitudes.is_empty() || !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::InvalidState("amplitudes must be nonzero and finite".into()));
        }
        let dim = amplitudes.len();
        let mut b = Vec::with_capacity(dim * dim);
        for v in amplitudes {
            for w in amplitudes {
                b.push(v * w.conj() / norm2);
            }
        }
        Ok(Self { dim, b })
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidState(format!(
                "expected {dim}x{dim} entries, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("entries must be finite".into()));
        }
        for v in 0..dim {
            for w in 0..v + 1 {
                let d = entries[v * dim + w] - entries[w * dim + v].conj();
                if d.norm() > STATE_TOLERANCE {
                    return Err(Error::InvalidState(format!("not Hermitian at ({v}, {w})")));
                }
            }
        }
        let trace: f64 = (0..dim).map(|v| entries[v * dim + v].re).sum();
        if (trace - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        let min_eig = min_eigenvalue(dim, &entries);
        if min_eig < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig}")));
        }
        Ok(Self { dim, b: entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, v: usize, w: usize) -> Complex64 {
        self.b[v * self.dim + w]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.b
    }

    /// Number distribution `B_{v,v}`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|v| self.entry(v, v).re).collect()
    }

    /// `Tr B^2`.
    pub fn purity(&self) -> f64 {
        self.b.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (1.0 - self.purity()).abs() <= tol
    }
}

/// Smallest eigenvalue of a Hermitian matrix via its real symmetric
/// embedding `[[Re, -Im], [Im, Re]]`, which doubles every eigenvalue.
fn min_eigenvalue(dim: usize, entries: &[Complex64]) -> f64 {
    let n = 2 * dim;
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let z = entries[(i % dim) * dim + (j % dim)];
        match (i < dim, j < dim) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let m = (&m + m.transpose()) * 0.5;
    m.symmetric_eigenvalues().min()
}

/// Where a [`ModeDistribution`] came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Thermal { nbar: f64, tail_epsilon: f64 },
    PhaseState { r_trunc: usize, m: usize },
    Custom,
}

/// Diagonal number-basis occupation probabilities of one reservoir mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeDistribution {
    probs: Vec<f64>,
    provenance: Provenance,
}

impl ModeDistribution {
    /// Thermal state at dimensionless inverse temperature `beta_homega`,
    /// truncated at the smallest dimension whose discarded tail mass is
    /// below `tail_epsilon`, then renormalized.
    ///
    /// `beta_homega = +inf` gives the vacuum.
    pub fn thermal(beta_homega: f64, tail_epsilon: f64) -> Result<Self> {
        if !(beta_homega > 0.0) {
            return Err(Error::InvalidTemperature(beta_homega));
        }
        if !(tail_epsilon > 0.0 && tail_epsilon < 1.0) {
            return Err(Error::InvalidTailEpsilon(tail_epsilon));
        }
        let q = (-beta_homega).exp();
        let nbar = if q == 0.0 { 0.0 } else { 1.0 / beta_homega.exp_m1() };
        // Tail mass of the untruncated geometric law beyond `dim` levels is q^dim.
        let mut dim = 1usize;
        let mut tail = q;
        while tail >= tail_epsilon {
            dim += 1;
            tail *= q;
            if dim > MAX_THERMAL_LEVELS {
                return Err(Error::TruncationTooLarge {
                    levels: dim,
                    limit: MAX_THERMAL_LEVELS,
                });
            }
        }
        let mut probs = Vec::with_capacity(dim);
        let mut w = 1.0;
        for _ in 0..dim {
            probs.push(w);
            w *= q;
        }
        normalize(&mut probs);
        Ok(Self {
            probs,
            provenance: Provenance::Thermal { nbar, tail_epsilon },
        })
    }

    /// Thermal state with mean occupation `nbar`.
    pub fn thermal_with_nbar(nbar: f64, tail_epsilon: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::InvalidDistribution(format!("mean occupation must be >= 0, got {nbar}")));
        }
        Self::thermal(beta_from_nbar(nbar), tail_epsilon)
    }

    /// Number distribution of the phase state `|phi_m>` in an
    /// `r_trunc + 1` dimensional space: uniform over `0..=r_trunc`.
    pub fn phase_state(r_trunc: usize, m: usize) -> Result<Self> {
        if m > r_trunc {
            return Err(Error::InvalidPhaseIndex { r_trunc, m });
        }
        let d = r_trunc + 1;
        Ok(Self {
            probs: vec![1.0 / d as f64; d],
            provenance: Provenance::PhaseState { r_trunc, m },
        })
    }

    /// Point mass at level `k`.
    pub fn fock(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Self {
            probs,
            provenance: Provenance::Custom,
        }
    }

    pub fn custom(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if let Some((n, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidDistribution(format!("probability {n} is {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(Self {
            probs,
            provenance: Provenance::Custom,
        })
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Variance of `N^y` under this distribution.
    pub fn variance_of_power(&self, y: Exponent) -> f64 {
        variance_of_power(self, y)
    }
}

/// `beta * hbar * Omega` giving mean occupation `nbar`; infinite for `nbar = 0`.
pub fn beta_from_nbar(nbar: f64) -> f64 {
    if nbar == 0.0 {
        f64::INFINITY
    } else {
        (1.0 / nbar).ln_1p()
    }
}

fn normalize(probs: &mut [f64]) {
    let sum: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= sum);
}

/// `(Delta_2^l)^2`: variance of `N^y` under `dist`.
pub fn variance_of_power(dist: &ModeDistribution, y: Exponent) -> f64 {
    power_variance(dist.probs(), y)
}

/// `(Delta_1)^2`: variance of `N^x` over the system populations.
pub fn system_power_variance(state: &SystemState, x: Exponent) -> f64 {
    power_variance(&state.populations(), x)
}

/// Two-pass variance of `n^exp` under `probs`; clamped at zero.
fn power_variance(probs: &[f64], exp: Exponent) -> f64 {
    let mean: f64 = probs.iter().enumerate().map(|(n, p)| p * exp.power(n)).sum();
    let var: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let d = exp.power(n) - mean;
            p * d * d
        })
        .sum();
    var.max(0.0)
}

/// One reservoir mode: its number distribution and coupling `lambda_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReservoirMode {
    pub distribution: ModeDistribution,
    pub coupling: Real,
}

/// The `M` reservoir modes, aligned with [`ModelSpec::couplings`].
#[derive(Clone, Debug, PartialEq)]
pub struct ReservoirSpec {
    modes: Vec<ReservoirMode>,
}

impl ReservoirSpec {
    pub fn new(modes: Vec<ReservoirMode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidModel("reservoir needs at least one mode".into()));
        }
        Ok(Self { modes })
    }

    /// `count` identical modes.
    pub fn uniform(distribution: ModeDistribution, coupling: Real, count: usize) -> Result<Self> {
        Self::new(vec![ReservoirMode { distribution, coupling }; count])
    }

    pub fn single(distribution: ModeDistribution, coupling: Real) -> Result<Self> {
        Self::uniform(distribution, coupling, 1)
    }

    pub fn modes(&self) -> &[ReservoirMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn couplings(&self) -> impl Iterator<Item = Real> + '_ {
        self.modes.iter().map(|m| m.coupling)
    }

    /// Checks that the reservoir matches the model mode-for-mode.
    pub fn check_against(&self, model: &ModelSpec) -> Result<()> {
        if self.modes.len() != model.modes() {
            return Err(Error::Mismatch(format!(
                "model has {} couplings but the reservoir has {} modes",
                model.modes(),
                self.modes.len()
            )));
        }
        for (l, (mode, c)) in self.modes.iter().zip(model.couplings()).enumerate() {
            if mode.coupling.value() != c.value() {
                return Err(Error::Mismatch(format!(
                    "mode {l}: reservoir coupling {} differs from model coupling {}",
                    mode.coupling, c
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superposition_state() {
        let s = SystemState::superposition();
        assert_eq!(s.dim(), 2);
        assert!(s.entries().iter().all(|z| *z == Complex64::new(0.5, 0.0)));
        assert!((s.purity() - 1.0).abs() < 1e-15);
        assert!((system_power_variance(&s, Exponent::ONE) - 0.25).abs() < 1e-15);
        assert!((system_power_variance(&s, Exponent::integer(2).unwrap()) - 0.25).abs() < 1e-15);
        assert!(SystemState::from_matrix(2, s.entries().to_vec()).is_ok());
    }

    #[test]
    fn fock_state_has_no_variance() {
        for x in [Exponent::ONE, Exponent::ratio(1, 2).unwrap(), Exponent::integer(3).unwrap()] {
            assert_eq!(system_power_variance(&SystemState::fock(4), x), 0.0);
        }
    }

    #[test]
    fn rejects_invalid_matrices() {
        let c = |re| Complex64::new(re, 0.0);
        let not_hermitian = vec![c(0.5), Complex64::new(0.1, 0.1), Complex64::new(0.1, 0.1), c(0.5)];
        assert!(SystemState::from_matrix(2, not_hermitian).is_err());
        assert!(SystemState::from_matrix(2, vec![c(0.6), c(0.0), c(0.0), c(0.6)]).is_err());
        // Trace one, Hermitian, eigenvalues 1.5 and -0.5.
        assert!(SystemState::from_matrix(2, vec![c(0.5), c(1.0), c(1.0), c(0.5)]).is_err());
        assert!(SystemState::from_matrix(2, vec![c(1.0)]).is_err());
    }

    #[test]
    fn cold_thermal_mode_is_vacuum() {
        let d = ModeDistribution::thermal(50.0, DEFAULT_TAIL_EPSILON).unwrap();
        assert_eq!(d.probs(), &[1.0]);
        match d.provenance() {
            Provenance::Thermal { nbar, .. } => assert!(*nbar < 1e-20),
            p => panic!("unexpected provenance {p:?}"),
        }
        let d = ModeDistribution::thermal(f64::INFINITY, DEFAULT_TAIL_EPSILON).unwrap();
        assert_eq!(d.probs(), &[1.0]);
    }

    #[test]
    fn thermal_variance_matches_geometric_law() {
        // Oracle: direct summation of q^n (1 - q) n^k to convergence.
        let q: f64 = 0.5;
        let (mut m1, mut m2) = (0.0, 0.0);
        for n in 0..2000 {
            let p = (1.0 - q) * q.powi(n);
            m1 += p * n as f64;
            m2 += p * (n * n) as f64;
        }
        let direct = m2 - m1 * m1;
        assert!((direct - 2.0).abs() < 1e-12);

        let d = ModeDistribution::thermal(2f64.ln(), DEFAULT_TAIL_EPSILON).unwrap();
        match d.provenance() {
            Provenance::Thermal { nbar, .. } => assert!((*nbar - 1.0).abs() < 1e-12),
            p => panic!("unexpected provenance {p:?}"),
        }
        assert!((d.variance_of_power(Exponent::ONE) - direct).abs() < 1e-8);
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_rejects_bad_inputs() {
        assert!(matches!(ModeDistribution::thermal(0.0, 1e-12), Err(Error::InvalidTemperature(_))));
        assert!(matches!(ModeDistribution::thermal(-1.0, 1e-12), Err(Error::InvalidTemperature(_))));
        assert!(matches!(ModeDistribution::thermal(f64::NAN, 1e-12), Err(Error::InvalidTemperature(_))));
        assert!(matches!(ModeDistribution::thermal(1.0, 0.0), Err(Error::InvalidTailEpsilon(_))));
        assert!(matches!(ModeDistribution::thermal(1.0, 1.0), Err(Error::InvalidTailEpsilon(_))));
        assert!(matches!(
            ModeDistribution::thermal(1e-9, 1e-12),
            Err(Error::TruncationTooLarge { .. })
        ));
    }

    #[test]
    fn tighter_tail_converges_monotonically() {
        let exact = 1.0 * 2.0;
        let loose = ModeDistribution::thermal(2f64.ln(), 1e-6).unwrap();
        let tight = ModeDistribution::thermal(2f64.ln(), 1e-12).unwrap();
        assert!(tight.dim() >= loose.dim());
        let e_loose = (loose.variance_of_power(Exponent::ONE) - exact).abs();
        let e_tight = (tight.variance_of_power(Exponent::ONE) - exact).abs();
        assert!(e_tight <= e_loose, "{e_tight} > {e_loose}");
    }

    #[test]
    fn phase_state_distribution() {
        assert_eq!(ModeDistribution::phase_state(0, 0).unwrap().probs(), &[1.0]);
        let a = ModeDistribution::phase_state(10, 0).unwrap();
        let b = ModeDistribution::phase_state(10, 3).unwrap();
        assert_eq!(a.probs(), b.probs());
        assert_eq!(a.dim(), 11);
        assert!((a.variance_of_power(Exponent::ONE) - 10.0).abs() < 1e-12);
        // Oracle: direct sum of sqrt(n) over n = 0..=10.
        let mean = (0..=10).map(|n| (n as f64).sqrt()).sum::<f64>() / 11.0;
        let var = (0..=10).map(|n| n as f64).sum::<f64>() / 11.0 - mean * mean;
        let half = Exponent::ratio(1, 2).unwrap();
        assert!((a.variance_of_power(half) - var).abs() < 1e-12);
        assert!((a.variance_of_power(half) - 0.8279).abs() < 5e-5);
        assert!(matches!(
            ModeDistribution::phase_state(3, 4),
            Err(Error::InvalidPhaseIndex { r_trunc: 3, m: 4 })
        ));
    }

    #[test]
    fn point_mass_has_zero_variance() {
        for y in [Exponent::ONE, Exponent::ratio(1, 2).unwrap(), Exponent::ratio(7, 3).unwrap()] {
            assert_eq!(ModeDistribution::fock(5).variance_of_power(y), 0.0);
        }
    }

    #[test]
    fn custom_distribution_validation() {
        assert!(ModeDistribution::custom(vec![0.25, 0.75]).is_ok());
        assert!(ModeDistribution::custom(vec![0.5, 0.6]).is_err());
        assert!(ModeDistribution::custom(vec![1.5, -0.5]).is_err());
        assert!(ModeDistribution::custom(vec![]).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(ModelSpec::with_couplings(vec![]).is_err());
        assert!(ModelSpec::builder().hbar(0.0).couplings(vec![Real::float(0.1)]).build().is_err());
        assert!(ModelSpec::with_couplings(vec![Real::float(f64::INFINITY)]).is_err());
        assert!(Exponent::new(Real::float(0.0)).is_err());
        assert!(ModelSpec::with_couplings(vec![Real::integer(0)]).is_ok());
    }

    #[test]
    fn reservoir_alignment() {
        let res = ReservoirSpec::uniform(ModeDistribution::fock(0), Real::ratio(1, 10), 3).unwrap();
        let model = ModelSpec::builder().couplings_of(&res).build().unwrap();
        assert!(res.check_against(&model).is_ok());
        let short = ModelSpec::with_couplings(vec![Real::ratio(1, 10)]).unwrap();
        assert!(matches!(res.check_against(&short), Err(Error::Mismatch(_))));
    }
}
