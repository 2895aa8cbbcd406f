//! Power maximization of the two-level engine and its efficiency at maximum
//! power.
//!
//! Power factorizes as `P = Δ (p_h − p_c) · 𝒢(x, y)/τ_cyc`: the first factor
//! only depends on the frequencies, the second only on the contact times. The
//! optimization therefore runs in two steps, times first and then
//! frequencies. The frequency step is solved in the scaled variables
//! `a = β_c ω_c (γ_c−1)` and `b = β_h ω_h (γ_h−1)`, in which the power factor
//! does not depend on the gap ratios at all.

use crate::cycle::{gain, gain_xi};
use crate::error::{check_positive, OttoError, Result};
use crate::roots::{bisect, newton_2d};
use crate::two_level::{g_from_chi, xi_factors_from};

/// Tolerance on the stationarity residuals.
pub const STATIONARITY_TOL: f64 = 1e-12;

/// Restarts of the Newton solver before falling back to bisection.
pub const MAX_RESTARTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimumKind {
    /// A strict interior maximum.
    Interior,
    /// No adiabatic-stroke time: `𝒢/τ_cyc` is largest in the limit of
    /// vanishing contact times, approached along `τ_c/τ_h = √(Σ_h/Σ_c)`.
    ShortCycleLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeOptimum {
    pub tau_c: f64,
    pub tau_h: f64,
    /// `𝒢/τ_cyc` at the optimum (its limit for [`OptimumKind::ShortCycleLimit`]).
    pub rate: f64,
    /// `τ_c/τ_h` at the optimum.
    pub ratio: f64,
    pub kind: OptimumKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyOptimum {
    pub omega_c: f64,
    pub omega_h: f64,
    /// Residuals of the two stationarity conditions.
    pub residuals: [f64; 2],
    /// Newton restarts used; `None` when the bisection fallback produced the point.
    pub newton_restarts: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub stationarity: [f64; 2],
    pub cosh_relation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub omega_c_star: f64,
    pub omega_h_star: f64,
    pub tau_c_star: f64,
    pub tau_h_star: f64,
    pub eta_star: f64,
    pub p_star: f64,
    pub time_kind: OptimumKind,
    pub residuals: Residuals,
}

/// `𝒢/τ_cyc` for given contact times.
pub fn time_rate(sigma_c: f64, sigma_h: f64, tau_adi: f64, tau_c: f64, tau_h: f64) -> f64 {
    let x = (-sigma_h * tau_h).exp();
    let y = (-sigma_c * tau_c).exp();
    gain(x, y) / (tau_c + tau_h + tau_adi)
}

/// `Σ_h[cosh(Σ_c τ_c) − 1] − Σ_c[cosh(Σ_h τ_h) − 1]`.
pub fn cosh_relation_residual(sigma_c: f64, sigma_h: f64, tau_c: f64, tau_h: f64) -> f64 {
    sigma_h * ((sigma_c * tau_c).cosh() - 1.0) - sigma_c * ((sigma_h * tau_h).cosh() - 1.0)
}

/// `τ_c` on the curve where `∂𝒢/∂τ_c = ∂𝒢/∂τ_h`.
fn cold_time_on_curve(sigma_c: f64, sigma_h: f64, tau_h: f64) -> f64 {
    let z = sigma_h * tau_h;
    let k = sigma_c / sigma_h;
    if z > 700.0 {
        // acosh(1 + k(cosh z − 1)) = z + ln k up to O(e^{-z})
        return (z + k.ln()) / sigma_c;
    }
    // acosh(1 + 2q²) = 2 asinh(q) keeps precision at short times
    2.0 * (k.sqrt() * (0.5 * z).sinh()).asinh() / sigma_c
}

/// Maximizes `𝒢/τ_cyc` over the two contact times.
pub fn optimize_times(sigma_c: f64, sigma_h: f64, tau_adi: f64) -> Result<TimeOptimum> {
    check_positive("sigma_c", sigma_c)?;
    check_positive("sigma_h", sigma_h)?;
    if !(tau_adi.is_finite() && tau_adi >= 0.0) {
        return Err(OttoError::InvalidParameter {
            name: "tau_adi",
            value: tau_adi,
            reason: "must be finite and non-negative",
        });
    }
    let ratio = (sigma_h / sigma_c).sqrt();
    if tau_adi == 0.0 {
        let rate = sigma_h * sigma_c * ratio / ((sigma_h + sigma_c * ratio) * (1.0 + ratio));
        return Ok(TimeOptimum {
            tau_c: 0.0,
            tau_h: 0.0,
            rate,
            ratio,
            kind: OptimumKind::ShortCycleLimit,
        });
    }

    // stationarity along the curve: ∂𝒢/∂τ_h · τ_cyc = 𝒢
    let condition = |tau_h: f64| {
        let tau_c = cold_time_on_curve(sigma_c, sigma_h, tau_h);
        let (zh, zc) = (sigma_h * tau_h, sigma_c * tau_c);
        // 1 − e^{−z} without cancellation at short times
        let (one_x, one_y, den) = (-(-zh).exp_m1(), -(-zc).exp_m1(), -(-zh - zc).exp_m1());
        let d_gain = sigma_h * (-zh).exp() * one_y * one_y / (den * den);
        d_gain * (tau_h + tau_c + tau_adi) - one_x * one_y / den
    };
    let mut hi = 1.0 / sigma_h;
    let mut guard = 0;
    while condition(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(OttoError::NoConvergence {
                solver: "time bracket",
                residual: condition(hi),
            });
        }
    }
    let tau_h = bisect(condition, 1e-9 * hi, hi, 0.0)?;
    let tau_c = cold_time_on_curve(sigma_c, sigma_h, tau_h);
    Ok(TimeOptimum {
        tau_c,
        tau_h,
        rate: time_rate(sigma_c, sigma_h, tau_adi, tau_c, tau_h),
        ratio: tau_c / tau_h,
        kind: OptimumKind::Interior,
    })
}

fn check_baths(beta_c: f64, beta_h: f64, gamma_c: f64, gamma_h: f64) -> Result<()> {
    check_positive("beta_c", beta_c)?;
    check_positive("beta_h", beta_h)?;
    for (name, g) in [("gamma_c", gamma_c), ("gamma_h", gamma_h)] {
        if !(g.is_finite() && g > 1.0) {
            return Err(OttoError::InvalidParameter {
                name,
                value: g,
                reason: "gap ratio must exceed 1",
            });
        }
    }
    if beta_c < beta_h {
        return Err(OttoError::InvalidParameter {
            name: "beta_c",
            value: beta_c,
            reason: "cold bath must not be hotter than the hot bath",
        });
    }
    Ok(())
}

/// Frequency-dependent power factor `Δ (p_h − p_c)` in scaled variables.
fn scaled_power(beta_c: f64, beta_h: f64, a: f64, b: f64) -> f64 {
    let mismatch = b / beta_h - a / beta_c;
    let p_h = 1.0 / (1.0 + b.exp());
    let p_c = 1.0 / (1.0 + a.exp());
    mismatch * (p_h - p_c)
}

/// Stationarity conditions of the power in the scaled variables.
fn scaled_residuals(beta_c: f64, beta_h: f64, a: f64, b: f64) -> [f64; 2] {
    let (chi_c, chi_h) = ((-a).exp(), (-b).exp());
    let gap = a / beta_c - b / beta_h;
    [
        chi_c * beta_c * gap / (1.0 + chi_c) - (chi_c - chi_h) / (1.0 + chi_h),
        chi_h * beta_h * gap / (1.0 + chi_h) - (chi_c - chi_h) / (1.0 + chi_c),
    ]
}

/// Frequency-dependent power factor `Δ (p_h − p_c)` of the quasi-static
/// populations, i.e. the power without its `𝒢/τ_cyc` factor.
pub fn power_factor(
    beta_c: f64,
    beta_h: f64,
    gamma_c: f64,
    gamma_h: f64,
    omega_c: f64,
    omega_h: f64,
) -> f64 {
    scaled_power(
        beta_c,
        beta_h,
        beta_c * omega_c * (gamma_c - 1.0),
        beta_h * omega_h * (gamma_h - 1.0),
    )
}

/// Residuals of `∂P/∂ω_c = 0` and `∂P/∂ω_h = 0` written with
/// `χ'_c = e^{−β_c ω_c (γ_c−1)}` and `χ'_h = e^{−β_h ω_h (γ_h−1)}`.
pub fn stationarity_residuals(
    beta_c: f64,
    beta_h: f64,
    gamma_c: f64,
    gamma_h: f64,
    omega_c: f64,
    omega_h: f64,
) -> [f64; 2] {
    scaled_residuals(
        beta_c,
        beta_h,
        beta_c * omega_c * (gamma_c - 1.0),
        beta_h * omega_h * (gamma_h - 1.0),
    )
}

fn is_engine(beta_c: f64, beta_h: f64, z: [f64; 2]) -> bool {
    let [a, b] = z;
    a > 0.0 && b > 0.0 && b < a && b / beta_h > a / beta_c
}

/// Positive power and a negative definite finite-difference Hessian.
fn is_local_max(beta_c: f64, beta_h: f64, z: [f64; 2]) -> bool {
    let f = |a: f64, b: f64| scaled_power(beta_c, beta_h, a, b);
    let p = f(z[0], z[1]);
    let (ha, hb) = (1e-4 * z[0].max(1.0), 1e-4 * z[1].max(1.0));
    let faa = (f(z[0] + ha, z[1]) - 2.0 * p + f(z[0] - ha, z[1])) / (ha * ha);
    let fbb = (f(z[0], z[1] + hb) - 2.0 * p + f(z[0], z[1] - hb)) / (hb * hb);
    let fab = (f(z[0] + ha, z[1] + hb) - f(z[0] + ha, z[1] - hb) - f(z[0] - ha, z[1] + hb)
        + f(z[0] - ha, z[1] - hb))
        / (4.0 * ha * hb);
    p > 0.0 && faa < 0.0 && faa * fbb - fab * fab > 0.0
}

fn newton_optimum(beta_c: f64, beta_h: f64) -> Option<([f64; 2], usize)> {
    // the scale-matching guess a = b = 1 sits on the engine boundary, so
    // seeds keep a on that scale and put b mid-way into the engine wedge
    // β_h a/β_c < b < a; restarts rescale the seed
    let wedge = 0.5 * (1.0 + beta_h / beta_c);
    for k in 0..=MAX_RESTARTS {
        let scale = 1.0 + 0.5 * k as f64;
        let seed = [scale, scale * wedge];
        let sol = newton_2d(
            |z| scaled_residuals(beta_c, beta_h, z[0], z[1]),
            |z| is_engine(beta_c, beta_h, z),
            seed,
            STATIONARITY_TOL,
            200,
        );
        if let Ok(sol) = sol {
            if is_engine(beta_c, beta_h, sol.point) && is_local_max(beta_c, beta_h, sol.point) {
                return Some((sol.point, k));
            }
        }
    }
    None
}

/// Bisection route. The ratio of the two stationarity conditions gives
/// `√(χ_h β_h/(χ_c β_c)) = (1+χ_h)/(1+χ_c)`, which fixes `a(b)`; the
/// remaining condition `u − v = (χ_c − χ_h)/√(β_c β_h χ_c χ_h)` is then a
/// scalar equation in `b`.
fn reduced_optimum(beta_c: f64, beta_h: f64) -> Option<[f64; 2]> {
    let a_of_b = |b: f64| -> Option<f64> {
        let chi_h = (-b).exp();
        let h1 = |a: f64| {
            0.5 * (chi_h * beta_h / beta_c).ln() + 0.5 * a - chi_h.ln_1p() + (-a).exp().ln_1p()
        };
        let mut hi = b.max(1.0);
        while h1(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e6 {
                return None;
            }
        }
        if h1(b) > 0.0 {
            return None;
        }
        bisect(h1, b, hi, 0.0).ok()
    };
    let h2 = |b: f64| -> f64 {
        match a_of_b(b) {
            Some(a) => {
                let (chi_c, chi_h) = ((-a).exp(), (-b).exp());
                a / beta_c - b / beta_h - (chi_c - chi_h) / (beta_c * beta_h * chi_c * chi_h).sqrt()
            }
            None => f64::NAN,
        }
    };
    // scan for a sign change of the reduced condition
    let grid: Vec<f64> = (1..=400).map(|k| 0.025 * k as f64).collect();
    let mut best: Option<([f64; 2], f64)> = None;
    for w in grid.windows(2) {
        let (f0, f1) = (h2(w[0]), h2(w[1]));
        if !(f0.is_finite() && f1.is_finite()) || f0.signum() == f1.signum() {
            continue;
        }
        let Ok(b) = bisect(h2, w[0], w[1], 0.0) else {
            continue;
        };
        let Some(a) = a_of_b(b) else { continue };
        let z = [a, b];
        if !is_engine(beta_c, beta_h, z) {
            continue;
        }
        let p = scaled_power(beta_c, beta_h, a, b);
        if best.is_none_or(|(_, bp)| p > bp) {
            best = Some((z, p));
        }
    }
    best.map(|(z, _)| z)
}

/// Maximizes the power over `(ω_c, ω_h)` at fixed bath temperatures and gap
/// ratios.
pub fn optimize_frequencies(
    beta_c: f64,
    beta_h: f64,
    gamma_c: f64,
    gamma_h: f64,
) -> Result<FrequencyOptimum> {
    check_baths(beta_c, beta_h, gamma_c, gamma_h)?;
    if beta_c == beta_h {
        return Err(OttoError::NoEngineOptimum);
    }
    let (z, restarts) = match newton_optimum(beta_c, beta_h) {
        Some((z, k)) => (z, Some(k)),
        None => {
            let z = reduced_optimum(beta_c, beta_h).ok_or(OttoError::NoEngineOptimum)?;
            (z, None)
        }
    };
    let residuals = scaled_residuals(beta_c, beta_h, z[0], z[1]);
    let worst = residuals[0].abs().max(residuals[1].abs());
    if worst > 1e-10 {
        return Err(OttoError::NoConvergence {
            solver: "frequency optimizer",
            residual: worst,
        });
    }
    Ok(FrequencyOptimum {
        omega_c: z[0] / (beta_c * (gamma_c - 1.0)),
        omega_h: z[1] / (beta_h * (gamma_h - 1.0)),
        residuals,
        newton_restarts: restarts,
    })
}

/// Same as [`optimize_frequencies`] but restricted to the bisection route.
pub fn optimize_frequencies_reduced(
    beta_c: f64,
    beta_h: f64,
    gamma_c: f64,
    gamma_h: f64,
) -> Result<FrequencyOptimum> {
    check_baths(beta_c, beta_h, gamma_c, gamma_h)?;
    let z = reduced_optimum(beta_c, beta_h).ok_or(OttoError::NoEngineOptimum)?;
    Ok(FrequencyOptimum {
        omega_c: z[0] / (beta_c * (gamma_c - 1.0)),
        omega_h: z[1] / (beta_h * (gamma_h - 1.0)),
        residuals: scaled_residuals(beta_c, beta_h, z[0], z[1]),
        newton_restarts: None,
    })
}

fn two_level_efficiency(gamma_c: f64, gamma_h: f64, omega_c: f64, omega_h: f64) -> f64 {
    1.0 - omega_c / omega_h * (gamma_c - 1.0) / (gamma_h - 1.0)
}

/// Efficiency at maximum power found numerically.
pub fn emp(beta_c: f64, beta_h: f64, gamma_c: f64, gamma_h: f64) -> Result<f64> {
    let opt = optimize_frequencies(beta_c, beta_h, gamma_c, gamma_h)?;
    Ok(two_level_efficiency(
        gamma_c,
        gamma_h,
        opt.omega_c,
        opt.omega_h,
    ))
}

fn check_carnot(eta_c: f64) -> Result<()> {
    if eta_c > 0.0 && eta_c < 1.0 {
        Ok(())
    } else {
        Err(OttoError::InvalidParameter {
            name: "eta_C",
            value: eta_c,
            reason: "Carnot efficiency must lie in (0, 1)",
        })
    }
}

/// `η_C² / [η_C − (1−η_C) ln(1−η_C)]`.
pub fn emp_analytic(eta_c: f64) -> Result<f64> {
    check_carnot(eta_c)?;
    Ok(eta_c * eta_c / (eta_c - (1.0 - eta_c) * (-eta_c).ln_1p()))
}

/// Curzon–Ahlborn efficiency `1 − √(1−η_C)`.
pub fn ca_efficiency(eta_c: f64) -> Result<f64> {
    check_carnot(eta_c)?;
    Ok(1.0 - (1.0 - eta_c).sqrt())
}

/// Both optimization steps for given bath conductivities and stroke time.
pub fn maximize_power(
    beta_c: f64,
    beta_h: f64,
    gamma_c: f64,
    gamma_h: f64,
    sigma_c: f64,
    sigma_h: f64,
    tau_adi: f64,
) -> Result<OptimizationResult> {
    let times = optimize_times(sigma_c, sigma_h, tau_adi)?;
    let freq = optimize_frequencies(beta_c, beta_h, gamma_c, gamma_h)?;
    let factor = power_factor(beta_c, beta_h, gamma_c, gamma_h, freq.omega_c, freq.omega_h);
    Ok(OptimizationResult {
        omega_c_star: freq.omega_c,
        omega_h_star: freq.omega_h,
        tau_c_star: times.tau_c,
        tau_h_star: times.tau_h,
        eta_star: two_level_efficiency(gamma_c, gamma_h, freq.omega_c, freq.omega_h),
        p_star: factor * times.rate,
        time_kind: times.kind,
        residuals: Residuals {
            stationarity: freq.residuals,
            cosh_relation: cosh_relation_residual(sigma_c, sigma_h, times.tau_c, times.tau_h),
        },
    })
}

/// Power factor with the ξ-weighted finite-time factor
/// `(1−x)(1−y)/(1−ξ_hc ξ_ch xy)`, where the ξ-factors follow the
/// frequencies. Returns `None` where that factor is not positive and finite.
#[allow(clippy::too_many_arguments)]
pub fn power_factor_xi_weighted(
    beta_c: f64,
    beta_h: f64,
    gamma_c: f64,
    gamma_h: f64,
    omega_c: f64,
    omega_h: f64,
    x: f64,
    y: f64,
) -> Option<f64> {
    let g_h = g_from_chi((-(gamma_h - 1.0) * beta_h * omega_h).exp(), gamma_h);
    let g_c = g_from_chi((-(gamma_c - 1.0) * beta_c * omega_c).exp(), gamma_c);
    let (xi_hc, xi_ch) = xi_factors_from(gamma_c, gamma_h, g_h, g_c, x, y).ok()?;
    let weight = gain_xi(x, y, xi_hc, xi_ch);
    (weight.is_finite() && weight > 0.0)
        .then(|| power_factor(beta_c, beta_h, gamma_c, gamma_h, omega_c, omega_h) * weight)
}

/// Efficiency at maximum power when the ξ-weighted finite-time factor is
/// kept inside the frequency optimization, at fixed decay factors `x`, `y`.
///
/// Starts from the exact optimum and climbs with damped Newton on a
/// finite-difference gradient.
pub fn emp_xi_weighted(
    beta_c: f64,
    beta_h: f64,
    gamma_c: f64,
    gamma_h: f64,
    x: f64,
    y: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&x) || !(0.0..1.0).contains(&y) {
        return Err(OttoError::InvalidParameter {
            name: "x, y",
            value: x.max(y),
            reason: "decay factors must lie in [0, 1)",
        });
    }
    let start = optimize_frequencies(beta_c, beta_h, gamma_c, gamma_h)?;
    let objective = |z: [f64; 2]| -> f64 {
        power_factor_xi_weighted(beta_c, beta_h, gamma_c, gamma_h, z[0], z[1], x, y)
            .unwrap_or(f64::NAN)
    };
    let gradient = |z: [f64; 2]| -> [f64; 2] {
        let mut g = [0.0; 2];
        for k in 0..2 {
            let h = 1e-5 * z[k];
            let (mut zp, mut zm) = (z, z);
            zp[k] += h;
            zm[k] -= h;
            g[k] = (objective(zp) - objective(zm)) / (2.0 * h) * z[k];
        }
        g
    };
    let sol = newton_2d(
        gradient,
        |z| z[0] > 0.0 && z[1] > 0.0 && objective(z).is_finite(),
        [start.omega_c, start.omega_h],
        1e-11,
        200,
    )?;
    let [wc, wh] = sol.point;
    let best = objective(sol.point);
    if best.is_nan() || best <= 0.0 {
        return Err(OttoError::NoEngineOptimum);
    }
    Ok(two_level_efficiency(gamma_c, gamma_h, wc, wh))
}
