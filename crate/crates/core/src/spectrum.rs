//! Power-law trap spectra `ε_n = ω n^θ` (levels indexed from `n = 1`) and the
//! canonical thermodynamic functions built on them.
//!
//! All thermal quantities depend on the trap only through the product `βω`
//! and the exponent `θ`. Sums are evaluated relative to the ground level so
//! that very cold points do not underflow.

use crate::error::{check_positive, OttoError, Result};
use crate::roots::bisect;

/// Levels used when no truncation is given.
pub const DEFAULT_TRUNCATION: usize = 200;

/// A level sum counts as converged when its last term contributes less than
/// this fraction of the partition function.
pub const CONVERGENCE_TOL: f64 = 1e-14;

/// Accepted entropy mismatch for [`adiabatic_match`].
pub const MATCH_TOL: f64 = 1e-12;

/// Potential exponent of a power-law trap.
///
/// Only `θ` is stored; the first-gap ratio `γ = 2^θ` is always derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapShape {
    theta: f64,
}

impl TrapShape {
    pub const HARMONIC: TrapShape = TrapShape { theta: 1.0 };
    pub const BOX: TrapShape = TrapShape { theta: 2.0 };
    pub const QUARTIC: TrapShape = TrapShape { theta: 4.0 / 3.0 };

    pub fn new(theta: f64) -> Result<Self> {
        check_positive("theta", theta).map(|theta| TrapShape { theta })
    }

    /// Shape whose first two levels are spaced by the ratio `gamma`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(OttoError::InvalidParameter {
                name: "gamma",
                value: gamma,
                reason: "gap ratio must exceed 1",
            });
        }
        Self::new(gamma.log2())
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `γ = 2^θ = ε_2 / ε_1`.
    #[inline]
    pub fn gamma(&self) -> f64 {
        self.theta.exp2()
    }

    /// Dimensionless level `n^θ`.
    #[inline]
    pub fn level(&self, n: usize) -> f64 {
        (n as f64).powf(self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumParams {
    pub omega: f64,
    pub shape: TrapShape,
    pub truncation: usize,
}

impl SpectrumParams {
    pub fn new(omega: f64, shape: TrapShape, truncation: usize) -> Result<Self> {
        check_positive("omega", omega)?;
        check_truncation(truncation)?;
        Ok(SpectrumParams {
            omega,
            shape,
            truncation,
        })
    }
}

/// Equilibrium state of a trap, fixed by `βω` and the trap shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPoint {
    pub beta_omega: f64,
    pub shape: TrapShape,
}

impl ThermalPoint {
    pub fn new(beta_omega: f64, shape: TrapShape) -> Result<Self> {
        check_positive("beta_omega", beta_omega)?;
        Ok(ThermalPoint { beta_omega, shape })
    }
}

fn check_truncation(levels: usize) -> Result<()> {
    if levels < 2 {
        return Err(OttoError::InvalidParameter {
            name: "truncation",
            value: levels as f64,
            reason: "at least two levels are required",
        });
    }
    Ok(())
}

/// `ε_n = ω n^θ` for `n ≥ 1`.
pub fn energy_level(params: &SpectrumParams, n: i64) -> Result<f64> {
    if n < 1 {
        return Err(OttoError::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "levels are indexed from 1",
        });
    }
    Ok(params.omega * params.shape.level(n as usize))
}

/// Truncated canonical sums at one thermal point.
///
/// Non-convergence is carried as data: a deliberately small truncation (the
/// two-level model) is a legitimate input, so only the strict wrappers
/// ([`partition_function`], [`g_value`], [`entropy`]) turn it into an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSums {
    pub levels: usize,
    /// `ln Z`.
    pub ln_z: f64,
    /// Mean dimensionless energy `g = ⟨n^θ⟩`.
    pub g: f64,
    /// Last included Boltzmann weight relative to `Z`.
    pub tail_ratio: f64,
}

impl ThermalSums {
    pub fn compute(point: &ThermalPoint, levels: usize) -> Result<Self> {
        check_truncation(levels)?;
        let bw = point.beta_omega;
        let mut sum_w = 0.0;
        let mut sum_gw = 0.0;
        let mut last = 0.0;
        for n in 1..=levels {
            let e = point.shape.level(n);
            // weight relative to the ground level, ≤ 1
            let w = (-bw * (e - 1.0)).exp();
            sum_w += w;
            sum_gw += e * w;
            last = w;
        }
        Ok(ThermalSums {
            levels,
            ln_z: -bw + sum_w.ln(),
            g: sum_gw / sum_w,
            tail_ratio: last / sum_w,
        })
    }

    pub fn z(&self) -> f64 {
        self.ln_z.exp()
    }

    /// `S = βω g + ln Z`; the caller supplies the `βω` these sums were built at.
    pub fn entropy(&self, beta_omega: f64) -> f64 {
        (beta_omega * self.g + self.ln_z).max(0.0)
    }

    pub fn converged(&self) -> bool {
        self.tail_ratio < CONVERGENCE_TOL
    }

    pub fn require_converged(self) -> Result<Self> {
        if self.converged() {
            Ok(self)
        } else {
            Err(OttoError::NotConverged {
                levels: self.levels,
                tail_ratio: self.tail_ratio,
            })
        }
    }
}

/// `Z = Σ_{n=1}^{N} exp(−βω n^θ)`, rejected if the tail has not decayed.
pub fn partition_function(point: &ThermalPoint, truncation: usize) -> Result<f64> {
    Ok(ThermalSums::compute(point, truncation)?
        .require_converged()?
        .z())
}

/// Dimensionless internal energy `g = U/ω`.
pub fn g_value(point: &ThermalPoint, truncation: usize) -> Result<f64> {
    Ok(ThermalSums::compute(point, truncation)?
        .require_converged()?
        .g)
}

/// Von Neumann entropy of the canonical state.
pub fn entropy(point: &ThermalPoint, truncation: usize) -> Result<f64> {
    Ok(ThermalSums::compute(point, truncation)?
        .require_converged()?
        .entropy(point.beta_omega))
}

fn raw_entropy(beta_omega: f64, shape: TrapShape, levels: usize) -> Result<f64> {
    let point = ThermalPoint { beta_omega, shape };
    Ok(ThermalSums::compute(&point, levels)?.entropy(beta_omega))
}

/// Finds the thermal point of trap `to_shape` with the same entropy as `from`.
///
/// This is the state reached by an adiabatic deformation of the trap. The
/// truncation is part of the model here (a two-level truncation matches the
/// populations exactly), so unconverged sums are accepted.
pub fn adiabatic_match(
    from: &ThermalPoint,
    to_shape: TrapShape,
    truncation: usize,
) -> Result<ThermalPoint> {
    check_positive("beta_omega", from.beta_omega)?;
    check_truncation(truncation)?;
    if to_shape == from.shape {
        return Ok(*from);
    }
    let target = raw_entropy(from.beta_omega, from.shape, truncation)?;
    if target >= (truncation as f64).ln() {
        return Err(OttoError::Bracket("entropy exceeds the truncated maximum"));
    }
    let s = |bw: f64| raw_entropy(bw, to_shape, truncation).unwrap_or(f64::NAN) - target;

    let mut hi = from.beta_omega;
    let mut expand = 0;
    while s(hi) > 0.0 {
        hi *= 2.0;
        expand += 1;
        if expand > 200 {
            return Err(OttoError::Bracket("entropy target below reachable range"));
        }
    }
    let mut lo = from.beta_omega;
    expand = 0;
    while s(lo) < 0.0 {
        lo *= 0.5;
        expand += 1;
        if expand > 1000 {
            return Err(OttoError::Bracket("entropy target above reachable range"));
        }
    }
    let bw = bisect(s, lo, hi, 0.0)?;
    let miss = s(bw).abs();
    if miss > MATCH_TOL {
        return Err(OttoError::NoConvergence {
            solver: "entropy bisection",
            residual: miss,
        });
    }
    ThermalPoint::new(bw, to_shape)
}
