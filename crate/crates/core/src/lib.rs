//! Finite-time quantum Otto engine whose working medium is a particle in a
//! power-law trap, with the trap shape deformed during the adiabatic strokes.
//!
//! * [`spectrum`]: power-law spectra, canonical sums and entropy matching.
//! * [`two_level`]: two-level closed forms, relaxation and the periodic state.
//! * [`cycle`]: work, heat, efficiency, power, fluctuations and mode.
//! * [`stochastic`]: exact work/heat distributions and a seeded sampler.
//! * [`optimizer`]: power maximization and efficiency at maximum power.

pub mod cycle;
pub mod error;
pub mod optimizer;
pub mod roots;
pub mod spectrum;
pub mod stochastic;
pub mod two_level;

pub use cycle::{CompressionRatio, CycleMetrics, Mode, ModeClass};
pub use error::{OttoError, Result};
pub use spectrum::{SpectrumParams, ThermalPoint, ThermalSums, TrapShape};
pub use stochastic::{HeatDistribution, HeatKernel, Pmf, SampleSummary, WorkDistribution};
pub use two_level::{BathContact, CycleConfig, CycleEndpoints};
