//! Brute-force ground truth.
//!
//! The full system-plus-reservoir density matrix is built explicitly in the
//! truncated product number basis, evolved by multiplying each element by
//! its exact phase `exp(-i (E_a - E_b) t / hbar)`, and partially traced. No
//! closed form from [`crate::analytic`] is used here, so the two routes check
//! each other. Reservoir coherences (phase states) are kept in full.
//!
//! The module also hosts the empirical tools that read characteristic times
//! off a `delta(t)` curve: [`fit_decoherence_time`], [`detect_revivals`] and
//! [`coarse_grain`].

mod coarse;
mod fit;
mod revivals;

pub use coarse::coarse_grain;
pub use fit::{fit_decoherence_time, DecoherenceFit, MIN_FIT_SAMPLES};
pub use revivals::{detect_revivals, RevivalEvent};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ModeDistribution, ModelSpec, SystemState};
use crate::series::TimeSeries;

/// Default cap on the full Hilbert-space dimension `D`.
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// Full density matrix of one reservoir mode, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeState {
    dim: usize,
    rho: Vec<Complex64>,
}

impl ModeState {
    /// Diagonal state with the given number distribution.
    pub fn from_distribution(dist: &ModeDistribution) -> Self {
        let dim = dist.dim();
        let mut rho = vec![Complex64::default(); dim * dim];
        for (n, &p) in dist.probs().iter().enumerate() {
            rho[n * dim + n] = Complex64::new(p, 0.0);
        }
        Self { dim, rho }
    }

    /// `|phi_m><phi_m|` with `|phi_m> = (r+1)^{-1/2} sum_n e^{i n phi_m} |n>`,
    /// `phi_m = 2 pi m / (r + 1)`, including every coherence.
    pub fn phase_state(r_trunc: usize, m: usize) -> Result<Self> {
        if m > r_trunc {
            return Err(Error::InvalidPhaseIndex { r_trunc, m });
        }
        let dim = r_trunc + 1;
        let phi = 2.0 * PI * m as f64 / dim as f64;
        let norm = 1.0 / dim as f64;
        let mut rho = Vec::with_capacity(dim * dim);
        for n in 0..dim {
            for k in 0..dim {
                rho.push(Complex64::from_polar(norm, (n as f64 - k as f64) * phi));
            }
        }
        Ok(Self { dim, rho })
    }

    pub fn from_matrix(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let checked = SystemState::from_matrix(dim, entries)?;
        Ok(Self {
            dim,
            rho: checked.entries().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.rho
    }

    /// Drops every coherence, keeping the number distribution.
    pub fn diagonal_projection(&self) -> Self {
        let mut rho = vec![Complex64::default(); self.dim * self.dim];
        for n in 0..self.dim {
            rho[n * self.dim + n] = self.rho[n * self.dim + n];
        }
        Self { dim: self.dim, rho }
    }
}

/// Full truncated product-space density matrix. Basis order is
/// lexicographic in `(v, r_1, ..., r_M)` with `v` most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState {
    sys_dim: usize,
    mode_dims: Vec<usize>,
    rho: Vec<Complex64>,
}

impl FullState {
    pub fn dim(&self) -> usize {
        self.sys_dim * self.env_dim()
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    fn env_dim(&self) -> usize {
        self.mode_dims.iter().product()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|a| self.rho[a * d + a]).sum()
    }

    /// `Tr rho^2 = sum_ab |rho_ab|^2` for Hermitian `rho`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `rho_1 = Tr_reservoir rho`, row-major `d_s x d_s`.
    pub fn reduced(&self) -> Vec<Complex64> {
        let (ds, de) = (self.sys_dim, self.env_dim());
        let d = ds * de;
        let mut out = vec![Complex64::default(); ds * ds];
        for v in 0..ds {
            for w in 0..ds {
                out[v * ds + w] = (0..de).map(|e| self.rho[(v * de + e) * d + (w * de + e)]).sum();
            }
        }
        out
    }
}

fn kron(a: &[Complex64], da: usize, b: &[Complex64], db: usize) -> Vec<Complex64> {
    let d = da * db;
    let mut out = vec![Complex64::default(); d * d];
    for i in 0..da {
        for j in 0..da {
            let aij = a[i * da + j];
            if aij == Complex64::default() {
                continue;
            }
            for k in 0..db {
                let row = (i * db + k) * d + j * db;
                for l in 0..db {
                    out[row + l] = aij * b[k * db + l];
                }
            }
        }
    }
    out
}

/// `rho(0) = B (x) rho_1 (x) ... (x) rho_M`, refusing states larger than `cap`.
pub fn build_full_initial_state(sys: &SystemState, modes: &[ModeState], cap: usize) -> Result<FullState> {
    let dim = modes
        .iter()
        .try_fold(sys.dim(), |acc, m| acc.checked_mul(m.dim()))
        .unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::SizeCap { dim, cap });
    }
    let mut rho = sys.entries().to_vec();
    let mut d = sys.dim();
    for m in modes {
        rho = kron(&rho, d, m.entries(), m.dim());
        d *= m.dim();
    }
    Ok(FullState {
        sys_dim: sys.dim(),
        mode_dims: modes.iter().map(|m| m.dim()).collect(),
        rho,
    })
}

/// Eigenenergies of the full Hamiltonian on the product basis:
/// `E(v, r) = hbar w v + hbar^2 g v^2 + sum_l hbar W r_l + sum_l hbar^{x+y} lambda_l v^x r_l^y`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyTable {
    energies: Vec<f64>,
    hbar: f64,
}

impl EnergyTable {
    pub fn new(model: &ModelSpec, state: &FullState) -> Result<Self> {
        if model.modes() != state.mode_dims.len() {
            return Err(Error::Mismatch(format!(
                "model has {} couplings but the state has {} modes",
                model.modes(),
                state.mode_dims.len()
            )));
        }
        let hbar = model.hbar();
        let coupling_scale = hbar.powf(model.x().value() + model.y().value());
        let couplings: Vec<f64> = model.couplings().iter().map(|c| c.value()).collect();
        let (x, y) = (model.x(), model.y());
        let env = state.env_dim();
        let mut energies = Vec::with_capacity(state.dim());
        for v in 0..state.sys_dim {
            let vf = v as f64;
            let system = hbar * model.omega() * vf + hbar * hbar * model.g().value() * vf * vf;
            let vx = x.power(v);
            for e in 0..env {
                // Mixed-radix digits of e, last mode fastest.
                let mut rest = e;
                let mut energy = system;
                for (l, &d) in state.mode_dims.iter().enumerate().rev() {
                    let r = rest % d;
                    rest /= d;
                    energy += hbar * model.big_omega() * r as f64;
                    energy += coupling_scale * couplings[l] * vx * y.power(r);
                }
                energies.push(energy);
            }
        }
        Ok(Self { energies, hbar })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
}

/// `rho_ab(t) = rho_ab(0) exp(-i (E_a - E_b) t / hbar)`.
pub fn evolve(state: &FullState, table: &EnergyTable, t: f64) -> FullState {
    let d = state.dim();
    let phases: Vec<Complex64> = table
        .energies
        .iter()
        .map(|e| Complex64::from_polar(1.0, -e * t / table.hbar))
        .collect();
    let mut rho = state.rho.clone();
    for a in 0..d {
        let pa = phases[a];
        for (b, z) in rho[a * d..(a + 1) * d].iter_mut().enumerate() {
            *z *= pa * phases[b].conj();
        }
    }
    FullState { rho, ..state.clone() }
}

/// `1 - Tr rho1^2` computed as a matrix product trace.
pub fn reduced_linear_entropy(rho1: &[Complex64], dim: usize) -> f64 {
    let mut tr = Complex64::default();
    for v in 0..dim {
        for w in 0..dim {
            tr += rho1[v * dim + w] * rho1[w * dim + v];
        }
    }
    1.0 - tr.re
}

/// `rho_1(t)`. Same as `evolve(state, table, t).reduced()`, but only the
/// elements surviving the partial trace are propagated.
pub fn reduced_state_at(state: &FullState, table: &EnergyTable, t: f64) -> Vec<Complex64> {
    let (ds, de) = (state.sys_dim, state.env_dim());
    let d = ds * de;
    let phases: Vec<Complex64> = table
        .energies
        .iter()
        .map(|e| Complex64::from_polar(1.0, -e * t / table.hbar))
        .collect();
    let mut out = vec![Complex64::default(); ds * ds];
    for v in 0..ds {
        for w in 0..ds {
            out[v * ds + w] = (0..de)
                .map(|e| {
                    let (a, b) = (v * de + e, w * de + e);
                    state.rho[a * d + b] * phases[a] * phases[b].conj()
                })
                .sum();
        }
    }
    out
}

/// `delta(t)` at every requested time, by full evolution and partial trace.
pub fn evolve_linear_entropy(state: &FullState, table: &EnergyTable, times: &[f64]) -> Result<TimeSeries> {
    let ds = state.sys_dim;
    let values = times
        .par_iter()
        .map(|&t| reduced_linear_entropy(&reduced_state_at(state, table, t), ds))
        .collect();
    TimeSeries::new(times.to_vec(), values)
}

/// Angular frequency of the term linear in `N_1`: `hbar w v + hbar^2 g v^2`
/// equals `hbar (w + hbar g) v + hbar^2 g v (v - 1)`.
pub fn linear_rotation_frequency(model: &ModelSpec) -> f64 {
    model.omega() + model.hbar() * model.g().value()
}

/// `max_vw |rho1(t) - rho1(0)|` in the frame rotating with
/// [`linear_rotation_frequency`], which removes the free rotation and leaves
/// the `v (v - 1)` Kerr phase and the reservoir dephasing.
pub fn recurrence_distance(state: &FullState, table: &EnergyTable, model: &ModelSpec, t: f64) -> f64 {
    let ds = state.sys_dim;
    let omega = linear_rotation_frequency(model);
    let initial = state.reduced();
    let now = reduced_state_at(state, table, t);
    let mut worst = 0.0f64;
    for v in 0..ds {
        for w in 0..ds {
            let frame = Complex64::from_polar(1.0, omega * (v as f64 - w as f64) * t);
            worst = worst.max((now[v * ds + w] * frame - initial[v * ds + w]).norm());
        }
    }
    worst
}
