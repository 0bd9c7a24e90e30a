//! Decoherence of a few-level system coupled by pure dephasing to a bath of
//! modes held in thermal, phase or arbitrary diagonal-energy states.
//!
//! The closed-form evolution lives in [`analytic`], a brute-force
//! density-matrix propagator for cross-checking it in [`oracle`], and JSON
//! scenario handling in [`runner`].

pub mod analytic;
pub mod error;
pub mod exact;
pub mod model;
pub mod oracle;
pub mod runner;
pub mod series;

pub use analytic::{
    decoherence_time, effective_hilbert_size, equivalent_reservoir, linear_entropy,
    recurrence_time, revival_lifetime, revival_time, thermal_linear_entropy, CharacteristicTimes,
    EquivalentReservoir, LinearEntropy, Recurrence,
};
pub use error::{Error, Result};
pub use exact::{Rational, Real};
pub use model::{
    Exponent, ModeDistribution, ModelSpec, Provenance, ReservoirMode, ReservoirSpec, SystemState,
};
pub use series::{linspace, TimeSeries};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/linear-entropy.md")]
    mod linear_entropy {}
    #[doc = include_str!("../../../book/src/times.md")]
    mod times {}
    #[doc = include_str!("../../../book/src/hilbert-space.md")]
    mod hilbert_space {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
}
