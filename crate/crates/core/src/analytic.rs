//! Closed-form linear entropy and characteristic times.
//!
//! Every Hamiltonian piece is diagonal in the product number basis, so the
//! reduced system matrix evolves as
//!
//! ```text
//! rho1_{vw}(t) = B_{vw} e^{-i phi_{vw} t} prod_l g_l(hbar^{x+y-1} lambda_l (v^x - w^x) t)
//! ```
//!
//! where `g_l(u) = sum_r A^l_{rr} exp(-i u r^y)` is the characteristic
//! function of mode `l`'s number distribution (see [`mode_factor`]). The
//! free phase `phi_{vw}` drops out of `|rho1_{vw}|^2`, which gives
//!
//! ```text
//! delta(t) = 1 - sum_{v,w} |B_{vw}|^2 prod_l |g_l(...)|^2
//! ```
//!
//! at `O(M d_r)` per time point and per distinct `|v^x - w^x|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{rational_gcd, Rational, Real};
use crate::model::{
    system_power_variance, variance_of_power, Exponent, ModeDistribution, ModelSpec,
    ReservoirSpec, SystemState, STATE_TOLERANCE,
};
use crate::series::TimeSeries;

/// `g(u) = sum_r probs[r] exp(-i u r^y)`.
///
/// This is the reference summation; [`LinearEntropy`] uses a Horner
/// evaluation when `y = 1`.
pub fn mode_factor(dist: &ModeDistribution, y: Exponent, u: f64) -> Complex64 {
    dist.probs()
        .iter()
        .enumerate()
        .map(|(r, &p)| Complex64::from_polar(p, -u * y.power(r)))
        .sum()
}

#[derive(Clone, Debug)]
enum Levels {
    /// `r^y = r` for `r = 0..d`.
    Consecutive,
    Powers(Vec<f64>),
}

/// Identical modes (same distribution and coupling) collapsed into one
/// factor raised to `count`.
#[derive(Clone, Debug)]
struct ModeGroup {
    coupling: f64,
    count: i32,
    probs: Vec<f64>,
    levels: Levels,
}

impl ModeGroup {
    fn norm_sqr(&self, u: f64) -> f64 {
        match &self.levels {
            Levels::Consecutive => {
                let z = Complex64::from_polar(1.0, -u);
                let mut acc = Complex64::zero();
                for &p in self.probs.iter().rev() {
                    acc = acc * z + p;
                }
                acc.norm_sqr()
            }
            Levels::Powers(levels) => {
                let (mut re, mut im) = (0.0, 0.0);
                for (&p, &l) in self.probs.iter().zip(levels) {
                    let (s, c) = (u * l).sin_cos();
                    re += p * c;
                    im -= p * s;
                }
                re * re + im * im
            }
        }
    }
}

/// Pre-processed linear-entropy evaluator for one configuration.
///
/// Construction validates the configuration once; [`LinearEntropy::at`] is a
/// pure function of `t` and may be called from many threads.
#[derive(Clone, Debug)]
pub struct LinearEntropy {
    scale: f64,
    /// `sum |B_vw|^2` over pairs with `v^x = w^x`, which never dephase.
    constant: f64,
    /// `(|v^x - w^x|, sum |B_vw|^2)` for the dephasing pairs.
    pairs: Vec<(f64, f64)>,
    groups: Vec<ModeGroup>,
}

impl LinearEntropy {
    pub fn new(model: &ModelSpec, sys: &SystemState, res: &ReservoirSpec) -> Result<Self> {
        res.check_against(model)?;
        let x = model.x();
        let y = model.y();

        let xs: Vec<f64> = (0..sys.dim()).map(|v| x.power(v)).collect();
        let mut constant = 0.0;
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for v in 0..sys.dim() {
            for w in 0..sys.dim() {
                let weight = sys.entry(v, w).norm_sqr();
                if weight == 0.0 {
                    continue;
                }
                let a = (xs[v] - xs[w]).abs();
                if a == 0.0 {
                    constant += weight;
                } else if let Some(entry) = pairs.iter_mut().find(|(b, _)| *b == a) {
                    entry.1 += weight;
                } else {
                    pairs.push((a, weight));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut groups: Vec<ModeGroup> = Vec::new();
        for mode in res.modes() {
            let coupling = mode.coupling.value();
            let probs = mode.distribution.probs();
            // Decoupled modes and point masses contribute |g| = 1.
            if coupling == 0.0 || probs.iter().filter(|&&p| p != 0.0).count() <= 1 {
                continue;
            }
            if let Some(g) = groups
                .iter_mut()
                .find(|g| g.coupling == coupling && g.probs == probs)
            {
                g.count += 1;
                continue;
            }
            let levels = if y.as_integer() == Some(1) {
                Levels::Consecutive
            } else {
                Levels::Powers((0..probs.len()).map(|r| y.power(r)).collect())
            };
            groups.push(ModeGroup {
                coupling,
                count: 1,
                probs: probs.to_vec(),
                levels,
            });
        }

        Ok(Self {
            scale: model.phase_scale(),
            constant,
            pairs,
            groups,
        })
    }

    /// `delta(t) = 1 - Tr rho1(t)^2`.
    pub fn at(&self, t: f64) -> f64 {
        1.0 - self.purity_at(t)
    }

    /// `Tr rho1(t)^2`.
    pub fn purity_at(&self, t: f64) -> f64 {
        let mut purity = self.constant;
        for &(a, weight) in &self.pairs {
            let mut factor = 1.0;
            for g in &self.groups {
                factor *= g.norm_sqr(self.scale * g.coupling * a * t).powi(g.count);
                if factor == 0.0 {
                    break;
                }
            }
            purity += weight * factor;
        }
        purity
    }

    pub fn series(&self, times: &[f64]) -> Result<TimeSeries> {
        TimeSeries::new(times.to_vec(), times.iter().map(|&t| self.at(t)).collect())
    }
}

/// `delta(t)` for one time point. Prefer [`LinearEntropy`] for many points.
pub fn linear_entropy(model: &ModelSpec, sys: &SystemState, res: &ReservoirSpec, t: f64) -> Result<f64> {
    Ok(LinearEntropy::new(model, sys, res)?.at(t))
}

/// Closed form for the superposition system against `m` identical thermal
/// modes with `x = y = 1`:
/// `(1/2) {1 - [(1-q)^2 / (1 + q^2 - 2q cos(lambda hbar t))]^M}`, `q = e^{-beta_homega}`.
pub fn thermal_linear_entropy(m: u32, beta_homega: f64, lambda: f64, hbar: f64, t: f64) -> f64 {
    let q = (-beta_homega).exp();
    let one_minus_q = -(-beta_homega).exp_m1();
    let half = 0.5 * lambda * hbar * t;
    // 1 + q^2 - 2q cos(u) = (1 - q)^2 + 4 q sin^2(u / 2)
    let denom = one_minus_q * one_minus_q + 4.0 * q * half.sin().powi(2);
    let bracket = one_minus_q * one_minus_q / denom;
    0.5 * (1.0 - bracket.powi(m as i32))
}

/// `sum_l (lambda_l Delta_2^l)^2`.
fn coupled_variance(model: &ModelSpec, res: &ReservoirSpec) -> f64 {
    res.modes()
        .iter()
        .map(|m| m.coupling.value().powi(2) * variance_of_power(&m.distribution, model.y()))
        .sum()
}

fn require_pure(sys: &SystemState) -> Result<()> {
    if sys.is_pure(STATE_TOLERANCE) {
        Ok(())
    } else {
        Err(Error::MixedState { purity: sys.purity() })
    }
}

/// `t_D = 1 / (hbar^{x+y-1} Delta_1 sqrt(2 sum_l (lambda_l Delta_2^l)^2))`.
pub fn decoherence_time(model: &ModelSpec, sys: &SystemState, res: &ReservoirSpec) -> Result<f64> {
    res.check_against(model)?;
    require_pure(sys)?;
    let delta1 = system_power_variance(sys, model.x()).sqrt();
    if delta1 == 0.0 {
        return Err(Error::NoDecoherence("system has no spread in N^x".into()));
    }
    let coupled = coupled_variance(model, res);
    if coupled == 0.0 {
        return Err(Error::NoDecoherence("every lambda_l Delta_2^l vanishes".into()));
    }
    Ok(1.0 / (model.phase_scale() * delta1 * (2.0 * coupled).sqrt()))
}

/// `tau_R = 2 t_D`.
pub fn revival_lifetime(model: &ModelSpec, sys: &SystemState, res: &ReservoirSpec) -> Result<f64> {
    Ok(2.0 * decoherence_time(model, sys, res)?)
}

/// Least multiple frequency: the rational GCD of the couplings. Requires
/// every nonzero coupling to carry an exact value.
pub fn least_multiple_frequency(couplings: &[Real]) -> Option<Rational> {
    let exact: Option<Vec<Rational>> = couplings
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.as_exact())
        .collect();
    rational_gcd(exact?)
}

/// `t_R = 2 pi s / (hbar^{x+y-1} Lambda)`; absent unless both exponents are
/// integers and the couplings are exact and commensurate.
pub fn revival_time(model: &ModelSpec, s: u32) -> Option<f64> {
    model.x().as_integer()?;
    model.y().as_integer()?;
    let lambda = least_multiple_frequency(model.couplings())?.to_f64()?;
    Some(2.0 * PI * s as f64 / (model.phase_scale() * lambda))
}

/// Outcome of [`recurrence_time`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "time", rename_all = "snake_case")]
pub enum Recurrence {
    At(f64),
    /// `2g / lambda` has no exact rational reduction.
    Incommensurate,
    /// `g = lambda = 0`: the system never moves, every time is a recurrence.
    Degenerate,
}

impl Recurrence {
    pub fn time(&self) -> Option<f64> {
        match self {
            Recurrence::At(t) => Some(*t),
            _ => None,
        }
    }
}

/// Recurrence time of the Kerr oscillator with identical reservoir bosons.
///
/// `lambda = 0` gives `s pi / (hbar g)`; otherwise `2g / lambda = n / m` in
/// lowest terms gives `2 pi m s / (hbar lambda n)`.
pub fn recurrence_time(g: Real, lambda: Real, hbar: f64, s: u32) -> Result<Recurrence> {
    if g.value() < 0.0 {
        return Err(Error::InvalidModel(format!("Kerr strength must be >= 0, got {g}")));
    }
    let s = s as f64;
    match (g.is_zero(), lambda.is_zero()) {
        (true, true) => Ok(Recurrence::Degenerate),
        (false, true) => Ok(Recurrence::At(s * PI / (hbar * g.value()))),
        (true, false) => Ok(Recurrence::At(2.0 * PI * s / (hbar * lambda.value().abs()))),
        (false, false) => {
            let (Some(ge), Some(le)) = (g.as_exact(), lambda.as_exact()) else {
                return Ok(Recurrence::Incommensurate);
            };
            let ratio = ge * Rational::from_integer(2) / le.abs();
            let (n, m) = (*ratio.numer() as f64, *ratio.denom() as f64);
            Ok(Recurrence::At(2.0 * PI * m * s / (hbar * lambda.value().abs() * n)))
        }
    }
}

/// `Hs = sqrt(1 + 12 Delta_2^2)`.
pub fn effective_hilbert_size(delta2: f64) -> f64 {
    (1.0 + 12.0 * delta2 * delta2).sqrt()
}

/// Single-mode reservoirs (thermal and phase state, `y = 1`) with a given
/// `Delta_2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalentReservoir {
    pub nbar: f64,
    pub r_trunc: usize,
}

pub fn equivalent_reservoir(delta2_target: f64) -> EquivalentReservoir {
    let d2 = delta2_target * delta2_target;
    // Root of nbar (nbar + 1) = d2, written without cancellation.
    let nbar = 2.0 * d2 / ((1.0 + 4.0 * d2).sqrt() + 1.0);
    let r = effective_hilbert_size(delta2_target).round() - 1.0;
    EquivalentReservoir {
        nbar,
        r_trunc: r.max(0.0) as usize,
    }
}

/// Characteristic times of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicTimes {
    pub t_d: f64,
    pub t_r: Option<f64>,
    pub tau_r: f64,
    /// Least multiple frequency `Lambda`.
    pub lambda: Option<f64>,
    /// `Lambda / lambda_l`; infinite for decoupled modes.
    pub k_l: Vec<f64>,
    pub delta1: f64,
    /// Aggregate `Delta_2 = sqrt(sum_l (lambda_l Delta_2^l / ref)^2)` with `ref = Lambda`
    /// when it exists, else the largest `|lambda_l|`.
    pub delta2: f64,
    pub hilbert_size: f64,
}

impl CharacteristicTimes {
    pub fn compute(model: &ModelSpec, sys: &SystemState, res: &ReservoirSpec) -> Result<Self> {
        let t_d = decoherence_time(model, sys, res)?;
        let lambda_exact = least_multiple_frequency(model.couplings());
        let lambda = lambda_exact.and_then(|l| l.to_f64());
        let reference = lambda.unwrap_or_else(|| {
            model
                .couplings()
                .iter()
                .map(|c| c.value().abs())
                .fold(0.0, f64::max)
        });
        let k_l = model
            .couplings()
            .iter()
            .map(|c| match lambda {
                Some(l) if !c.is_zero() => l / c.value(),
                _ => f64::INFINITY,
            })
            .collect();
        let delta2 = coupled_variance(model, res).sqrt() / reference;
        Ok(Self {
            t_d,
            t_r: revival_time(model, 1),
            tau_r: 2.0 * t_d,
            lambda,
            k_l,
            delta1: system_power_variance(sys, model.x()).sqrt(),
            delta2,
            hilbert_size: effective_hilbert_size(delta2),
        })
    }

    /// `sqrt(2) / (hbar^{x+y-1} Lambda Delta_1 Delta_2)`, the second route to
    /// `tau_R`; needs `Lambda`.
    pub fn tau_r_from_aggregate(&self, model: &ModelSpec) -> Option<f64> {
        let lambda = self.lambda?;
        Some(2f64.sqrt() / (model.phase_scale() * lambda * self.delta1 * self.delta2))
    }
}

/// Ratio `2g / lambda` in lowest terms, when exact.
pub fn kerr_ratio(g: Real, lambda: Real) -> Option<(i64, i64)> {
    let r = g.as_exact()? * Rational::from_integer(2) / lambda.as_exact()?.abs();
    Some((*r.numer(), *r.denom()))
}
