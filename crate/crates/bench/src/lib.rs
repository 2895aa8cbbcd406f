//! Benchmark fixtures shared by the criterion targets.

use otto_core::{BathContact, CycleConfig, TrapShape};

/// A finite-time engine cycle with trap deformation used across benchmarks.
pub fn finite_time_cycle() -> CycleConfig {
    CycleConfig::new(
        0.4,
        1.0,
        TrapShape::HARMONIC,
        TrapShape::BOX,
        BathContact::new(10.0, 1.0, 1.5).unwrap(),
        BathContact::new(2.0, 1.0, 1.5).unwrap(),
        0.5,
    )
    .unwrap()
}
