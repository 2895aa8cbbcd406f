//! Two-time-measurement statistics of work and heat.
//!
//! Work per cycle is fixed by the level `n` found at the end of the hot
//! isochore and the level `m` found at its start:
//! `w = ε_n^h − ε_n^c + ε_m^c − ε_m^h`, with joint weight `p_{n,B} p_{m,A}`.

use std::io::{self, Write};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{OttoError, Result};
use crate::two_level::{CycleConfig, CycleEndpoints};

/// Samples drawn per RNG stream when sampling is sharded.
pub const SHARD_SIZE: u64 = 1 << 16;

/// A finite probability mass function over real values.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    /// `(value, probability)` sorted by value, no zero-probability atoms.
    atoms: Vec<(f64, f64)>,
}

pub type WorkDistribution = Pmf;
pub type HeatDistribution = Pmf;

impl Pmf {
    /// Builds a pmf, merging values closer than `1e-12·max|value|` and
    /// dropping atoms of zero weight.
    pub fn from_weighted(mut raw: Vec<(f64, f64)>) -> Result<Self> {
        if raw
            .iter()
            .any(|&(v, p)| !v.is_finite() || p.is_nan() || p < 0.0)
        {
            return Err(OttoError::InvalidParameter {
                name: "atom",
                value: f64::NAN,
                reason: "atoms need finite values and non-negative weights",
            });
        }
        raw.retain(|&(_, p)| p > 0.0);
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = raw.iter().fold(0.0f64, |m, &(v, _)| m.max(v.abs()));
        let tol = 1e-12 * scale;
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (v, p) in raw {
            match atoms.last_mut() {
                Some(last) if (v - last.0).abs() <= tol => last.1 += p,
                _ => atoms.push((v, p)),
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(OttoError::InvalidParameter {
                name: "total probability",
                value: total,
                reason: "weights must sum to 1",
            });
        }
        Ok(Pmf { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Writes `value,probability` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "value,probability")?;
        for (v, p) in &self.atoms {
            writeln!(out, "{v:e},{p:e}")?;
        }
        Ok(())
    }
}

/// Exact `(mean, variance)` of a pmf.
pub fn moments(pmf: &Pmf) -> (f64, f64) {
    let mean: f64 = pmf.atoms.iter().map(|&(v, p)| v * p).sum();
    let var: f64 = pmf
        .atoms
        .iter()
        .map(|&(v, p)| (v - mean) * (v - mean) * p)
        .sum();
    (mean, var)
}

fn level_pair(omega: f64, gamma: f64) -> [f64; 2] {
    [omega, gamma * omega]
}

fn excited_from_chi(chi: f64) -> [f64; 2] {
    [1.0 / (1.0 + chi), chi / (1.0 + chi)]
}

/// Work distribution of the periodic two-level cycle.
pub fn work_pmf(endpoints: &CycleEndpoints, config: &CycleConfig) -> Result<WorkDistribution> {
    let eh = level_pair(config.omega_h, config.gamma_h());
    let ec = level_pair(config.omega_c, config.gamma_c());
    let p_b = excited_from_chi(endpoints.chi_h);
    let p_a = excited_from_chi(endpoints.chi_c);
    let mut raw = Vec::with_capacity(4);
    for n in 0..2 {
        for m in 0..2 {
            raw.push((eh[n] - ec[n] + ec[m] - eh[m], p_b[n] * p_a[m]));
        }
    }
    Pmf::from_weighted(raw)
}

/// Transition kernel of the hot isochore, `kernel[m][n] = p_{m→n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatKernel {
    /// Complete thermalization: `p_{m→n} = p_n^eq(β_h)`.
    QuasiStatic,
    /// Caller-provided row-stochastic kernel for a finite contact time.
    Supplied([[f64; 2]; 2]),
}

/// Distribution of the heat absorbed during the hot isochore.
pub fn heat_pmf(
    config: &CycleConfig,
    endpoints: &CycleEndpoints,
    kernel: HeatKernel,
) -> Result<HeatDistribution> {
    let kernel = match kernel {
        HeatKernel::QuasiStatic => {
            if config.x() != 0.0 {
                return Err(OttoError::KernelUnavailable);
            }
            let chi = (-(config.gamma_h() - 1.0) * config.hot.beta_r * config.omega_h).exp();
            let row = excited_from_chi(chi);
            [row, row]
        }
        HeatKernel::Supplied(k) => {
            for row in &k {
                if row.iter().any(|&p| !(0.0..=1.0).contains(&p))
                    || (row[0] + row[1] - 1.0).abs() > 1e-12
                {
                    return Err(OttoError::InvalidParameter {
                        name: "kernel",
                        value: row[0] + row[1],
                        reason: "rows must be probability vectors",
                    });
                }
            }
            k
        }
    };
    let eh = level_pair(config.omega_h, config.gamma_h());
    let p_a = excited_from_chi(endpoints.chi_c);
    let mut raw = Vec::with_capacity(4);
    for m in 0..2 {
        for n in 0..2 {
            raw.push((eh[n] - eh[m], kernel[m][n] * p_a[m]));
        }
    }
    Pmf::from_weighted(raw)
}

/// Summary of a Monte Carlo run over a pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSummary {
    pub n_samples: u64,
    pub mean: f64,
    /// Unbiased sample variance (0 for a single sample).
    pub variance: f64,
    /// Draw counts aligned with `Pmf::atoms`.
    pub counts: Vec<u64>,
}

impl SampleSummary {
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.n_samples as f64).sqrt()
    }

    /// Writes `value,probability,count` rows with a header.
    pub fn write_csv<W: Write>(&self, pmf: &Pmf, mut out: W) -> io::Result<()> {
        writeln!(out, "value,probability,count")?;
        for ((v, p), c) in pmf.atoms().iter().zip(&self.counts) {
            writeln!(out, "{v:e},{p:e},{c}")?;
        }
        Ok(())
    }
}

/// Draws `n_samples` values from `pmf`.
///
/// Shard `k` of [`SHARD_SIZE`] draws uses ChaCha8 seeded with `seed` on stream
/// `k`, so the result depends only on `(pmf, n_samples, seed)` and not on the
/// thread count.
pub fn sample_work(pmf: &Pmf, n_samples: u64, seed: u64) -> Result<SampleSummary> {
    if n_samples == 0 {
        return Err(OttoError::InvalidParameter {
            name: "n_samples",
            value: 0.0,
            reason: "at least one sample is required",
        });
    }
    let weights: Vec<f64> = pmf.atoms.iter().map(|a| a.1).collect();
    let index = WeightedIndex::new(&weights).map_err(|_| OttoError::InvalidParameter {
        name: "pmf",
        value: f64::NAN,
        reason: "cannot sample from this pmf",
    })?;
    let shards = n_samples.div_ceil(SHARD_SIZE);
    let counts = (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let take = SHARD_SIZE.min(n_samples - k * SHARD_SIZE);
            let mut counts = vec![0u64; weights.len()];
            for _ in 0..take {
                counts[index.sample(&mut rng)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; weights.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let n = n_samples as f64;
    let mean = pmf
        .atoms
        .iter()
        .zip(&counts)
        .map(|(&(v, _), &c)| v * c as f64)
        .sum::<f64>()
        / n;
    let variance = if n_samples > 1 {
        pmf.atoms
            .iter()
            .zip(&counts)
            .map(|(&(v, _), &c)| (v - mean) * (v - mean) * c as f64)
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    Ok(SampleSummary {
        n_samples,
        mean,
        variance,
        counts,
    })
}

/// Pearson χ² goodness of fit of sampled counts against the pmf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub fn chi_square(pmf: &Pmf, summary: &SampleSummary) -> ChiSquareTest {
    let n = summary.n_samples as f64;
    let statistic = pmf
        .atoms
        .iter()
        .zip(&summary.counts)
        .map(|(&(_, p), &c)| {
            let expect = n * p;
            (c as f64 - expect).powi(2) / expect
        })
        .sum();
    let dof = pmf.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64).map_or(1.0, |d| d.cdf(statistic))
    };
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}
