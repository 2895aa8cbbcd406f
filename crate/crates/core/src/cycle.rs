//! Cycle observables of the two-level engine: work, heats, efficiency, power,
//! work fluctuations and the operation mode.
//!
//! Two evaluation routes are kept side by side. The two-level closed forms work
//! with the level-spacing mismatch and the population bias directly. The
//! general ξ-factor forms only use `g` values and ξ-factors and hold for any
//! spectrum. Sign convention: `⟨q_h⟩` is heat absorbed from the hot bath and
//! `⟨q_c⟩ = ⟨w⟩ − ⟨q_h⟩`, which is negative when the engine rejects heat.

use std::fmt;

use crate::error::{OttoError, Result};
use crate::two_level::{relax_endpoints, xi_factors, CycleConfig, CycleEndpoints};

/// Relative size below which a sign is treated as zero.
pub const SIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Heater,
    Engine,
    Refrigerator,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Heater => "heater",
            Mode::Engine => "engine",
            Mode::Refrigerator => "refrigerator",
        })
    }
}

/// Mode label plus whether the point sits on a boundary (`⟨w⟩ = 0`).
///
/// Boundary points are binned to the lower mode in the order
/// heater < engine < refrigerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeClass {
    pub mode: Mode,
    pub boundary: bool,
}

impl fmt::Display for ModeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.boundary {
            write!(f, "{}-boundary", self.mode)
        } else {
            write!(f, "{}", self.mode)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionRatio {
    /// `√(ω_h/ω_c)`
    pub r: f64,
    /// `√(β_c/β_h)`
    pub r_c: f64,
}

impl CompressionRatio {
    pub fn of(config: &CycleConfig) -> Self {
        CompressionRatio {
            r: (config.omega_h / config.omega_c).sqrt(),
            r_c: (config.cold.beta_r / config.hot.beta_r).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleMetrics {
    pub mean_work: f64,
    pub heat_hot: f64,
    pub heat_cold: f64,
    /// `None` outside engine mode.
    pub efficiency: Option<f64>,
    pub power: f64,
    pub work_variance: f64,
    /// `None` when `⟨w⟩ = 0`.
    pub rel_power_fluct: Option<f64>,
    pub mode: ModeClass,
}

impl CycleMetrics {
    pub fn evaluate(config: &CycleConfig) -> Result<Self> {
        let endpoints = relax_endpoints(config)?;
        let mean_work = mean_work(config)?;
        let heat_hot = mean_heat_hot(config, &endpoints);
        let mode = classify_mode(config)?;
        let work_variance = work_variance(config, &endpoints);
        Ok(CycleMetrics {
            mean_work,
            heat_hot,
            heat_cold: mean_work - heat_hot,
            efficiency: efficiency(config).ok(),
            power: power(config)?,
            work_variance,
            rel_power_fluct: fluctuation_ratio(work_variance, mean_work),
            mode,
        })
    }
}

/// Work released when one excitation is carried around the cycle:
/// `(γ_h−1)ω_h − (γ_c−1)ω_c`.
pub fn level_mismatch(config: &CycleConfig) -> f64 {
    (config.gamma_h() - 1.0) * config.omega_h - (config.gamma_c() - 1.0) * config.omega_c
}

/// Finite-time factor `𝒢 = (1−x)(1−y)/(1−xy)` of the two-level cycle.
pub fn gain(x: f64, y: f64) -> f64 {
    (1.0 - x) * (1.0 - y) / (1.0 - x * y)
}

/// ξ-weighted factor `(1−x)(1−y)/(1−ξ_hc ξ_ch xy)` of the general forms.
pub fn gain_xi(x: f64, y: f64, xi_hc: f64, xi_ch: f64) -> f64 {
    (1.0 - x) * (1.0 - y) / (1.0 - xi_hc * xi_ch * x * y)
}

/// Mean work per cycle, two-level closed form with finite-time factor 𝒢.
pub fn mean_work(config: &CycleConfig) -> Result<f64> {
    config.validate()?;
    let (gc, gh) = (config.gamma_c(), config.gamma_h());
    let thermal =
        config.g_eq_hot() - (gh - 1.0) / (gc - 1.0) * config.g_eq_cold() + (gh - gc) / (gc - 1.0);
    let frequency = config.omega_h - (gc - 1.0) / (gh - 1.0) * config.omega_c;
    Ok(thermal * frequency * gain(config.x(), config.y()))
}

/// Quasi-static mean work.
pub fn mean_work_quasi_static(config: &CycleConfig) -> Result<f64> {
    mean_work(&config.to_quasi_static())
}

/// `ω_h(g_B − g_A) + ω_c(g_D − g_C)`.
pub fn mean_work_from_endpoints(config: &CycleConfig, e: &CycleEndpoints) -> f64 {
    config.omega_h * (e.g_b - e.g_a) + config.omega_c * (e.g_d - e.g_c)
}

/// Mean work from the general ξ-factor form, with ξ evaluated at the
/// periodic state.
pub fn mean_work_general(config: &CycleConfig) -> Result<f64> {
    let (xi_hc, xi_ch) = xi_factors(config)?;
    let (x, y) = (config.x(), config.y());
    let (g_h, g_c) = (config.g_eq_hot(), config.g_eq_cold());
    let (wh, wc) = (config.omega_h, config.omega_c);
    let den = 1.0 - xi_hc * xi_ch * x * y;
    // both brackets multiplied through by (1−x)(1−y) to stay finite at x or y = 1
    let hot =
        ((1.0 - xi_hc * xi_ch * y) * (1.0 - x) * wh - xi_hc * wc * (1.0 - x) * (1.0 - y)) * g_h;
    let cold =
        (xi_ch * wh * (1.0 - x) * (1.0 - y) - (1.0 - xi_hc * xi_ch * x) * (1.0 - y) * wc) * g_c;
    Ok((hot - cold) / den)
}

/// Heat absorbed from the hot bath, `ω_h(g_B − g_A)`.
pub fn mean_heat_hot(config: &CycleConfig, e: &CycleEndpoints) -> f64 {
    config.omega_h * (e.g_b - e.g_a)
}

/// Hot-bath heat from the general ξ-factor form.
pub fn mean_heat_hot_general(config: &CycleConfig) -> Result<f64> {
    let (xi_hc, xi_ch) = xi_factors(config)?;
    let (x, y) = (config.x(), config.y());
    let (g_h, g_c) = (config.g_eq_hot(), config.g_eq_cold());
    let den = 1.0 - xi_hc * xi_ch * x * y;
    Ok(config.omega_h
        * ((1.0 - xi_hc * xi_ch * y) * (1.0 - x) * g_h - xi_ch * (1.0 - x) * (1.0 - y) * g_c)
        / den)
}

/// Two-level efficiency `1 − (ω_c/ω_h)(γ_c−1)/(γ_h−1)`; refused outside
/// engine mode.
pub fn efficiency(config: &CycleConfig) -> Result<f64> {
    let class = classify_mode(config)?;
    if class.mode != Mode::Engine || class.boundary {
        return Err(OttoError::NotAnEngine(class.mode));
    }
    Ok(1.0 - config.omega_c / config.omega_h * (config.gamma_c() - 1.0) / (config.gamma_h() - 1.0))
}

/// Efficiency `⟨w⟩/⟨q_h⟩` from the general ξ-factor form. Not restricted
/// to engine mode.
pub fn efficiency_general(config: &CycleConfig) -> Result<f64> {
    let (xi_hc, xi_ch) = xi_factors(config)?;
    let (x, y) = (config.x(), config.y());
    let (g_h, g_c) = (config.g_eq_hot(), config.g_eq_cold());
    let num = xi_hc * g_h * (1.0 - x) * (1.0 - y) - (1.0 - xi_hc * xi_ch * x) * (1.0 - y) * g_c;
    let den = (1.0 - xi_hc * xi_ch * y) * (1.0 - x) * g_h - xi_ch * g_c * (1.0 - x) * (1.0 - y);
    Ok(1.0 - config.omega_c / config.omega_h * num / den)
}

/// Work variance written with the endpoint energies `g_B`, `g_D`.
pub fn work_variance(config: &CycleConfig, e: &CycleEndpoints) -> f64 {
    variance_in_g(config, e.g_b, e.g_d)
}

fn variance_in_g(config: &CycleConfig, g_b: f64, g_d: f64) -> f64 {
    let (gc, gh) = (config.gamma_c(), config.gamma_h());
    let f = config.omega_h - config.omega_c * (gc - 1.0) / (gh - 1.0);
    let second =
        (gh - 1.0) / (gc - 1.0) * f * f * ((g_b - 1.0) * (gc - g_d) + (g_d - 1.0) * (gh - g_b));
    let first = f / (gc - 1.0) * ((g_b - 1.0) * gc - (g_d - 1.0) * gh + (g_d - g_b));
    (second - first * first).max(0.0)
}

/// Work variance written with the population ratios `χ_c`, `χ_h`.
pub fn work_variance_chi(config: &CycleConfig, e: &CycleEndpoints) -> f64 {
    let delta = level_mismatch(config);
    let norm = (1.0 + e.chi_c) * (1.0 + e.chi_h);
    let mean = (e.chi_c - e.chi_h) * delta / norm;
    ((e.chi_c + e.chi_h) * delta * delta / norm - mean * mean).max(0.0)
}

/// Quasi-static work variance from the equilibrium energies.
pub fn work_variance_quasi_static(config: &CycleConfig) -> f64 {
    variance_in_g(config, config.g_eq_hot(), config.g_eq_cold())
}

/// `P = ⟨w⟩/τ_cyc`; zero for an infinitely long cycle.
pub fn power(config: &CycleConfig) -> Result<f64> {
    let w = mean_work(config)?;
    let period = config.period();
    if period.is_infinite() {
        return Ok(0.0);
    }
    Ok(w / period)
}

/// Power from the Boltzmann-factor closed form.
pub fn power_closed_form(config: &CycleConfig) -> Result<f64> {
    config.validate()?;
    let period = config.period();
    if period.is_infinite() {
        return Ok(0.0);
    }
    let (gc, gh) = (config.gamma_c(), config.gamma_h());
    let (bh, bc) = (config.hot.beta_r, config.cold.beta_r);
    let (wh, wc) = (config.omega_h, config.omega_c);
    let z_h = (-bh * wh).exp() + (-gh * bh * wh).exp();
    let z_c = (-bc * wc).exp() + (-gc * bc * wc).exp();
    let bias = (-bh * wh - gc * bc * wc).exp() - (-gh * bh * wh - bc * wc).exp();
    let prefactor = -(gh - 1.0) * wh + (gc - 1.0) * wc;
    Ok(prefactor / (z_h * z_c) * bias * gain(config.x(), config.y()) / period)
}

fn fluctuation_ratio(variance: f64, mean: f64) -> Option<f64> {
    if mean == 0.0 || !mean.is_finite() {
        None
    } else {
        Some(variance.sqrt() / mean.abs())
    }
}

/// `f_P = √⟨δ²w⟩ / |⟨w⟩|`.
pub fn rel_power_fluctuation(config: &CycleConfig) -> Result<f64> {
    let e = relax_endpoints(config)?;
    let class = classify_mode(config)?;
    if class.boundary {
        return Err(OttoError::ModeBoundary);
    }
    fluctuation_ratio(work_variance(config, &e), mean_work(config)?).ok_or(OttoError::ModeBoundary)
}

/// Operation mode from the signs of the energy flows.
///
/// Each cycle either moves an excitation hot→cold (population bias > 0) or
/// the reverse, and each transfer yields work `Δ = (γ_h−1)ω_h − (γ_c−1)ω_c`.
/// Engine: `Δ > 0` with forward bias. Refrigerator: `Δ > 0` with reversed
/// bias (`⟨w⟩ < 0`, heat drawn from the cold bath). Otherwise heater.
pub fn classify_mode(config: &CycleConfig) -> Result<ModeClass> {
    let e = relax_endpoints(config)?;
    let delta = level_mismatch(config);
    let delta_scale =
        (config.gamma_h() - 1.0) * config.omega_h + (config.gamma_c() - 1.0) * config.omega_c;
    let bias = e.excited_b() - e.excited_a();
    let delta_zero = delta.abs() <= SIGN_TOL * delta_scale;
    let bias_zero = bias.abs() <= SIGN_TOL;
    let class = if delta_zero {
        ModeClass {
            mode: Mode::Heater,
            boundary: true,
        }
    } else if bias_zero {
        ModeClass {
            mode: if delta > 0.0 {
                Mode::Engine
            } else {
                Mode::Heater
            },
            boundary: true,
        }
    } else {
        let mode = match (delta > 0.0, bias > 0.0) {
            (true, true) => Mode::Engine,
            (true, false) => Mode::Refrigerator,
            _ => Mode::Heater,
        };
        ModeClass {
            mode,
            boundary: false,
        }
    };
    Ok(class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::TrapShape;
    use crate::two_level::BathContact;

    fn qs(gc: f64, gh: f64, wc: f64, wh: f64) -> CycleConfig {
        CycleConfig::quasi_static(wc, wh, gc, gh, 10.0, 2.0).unwrap()
    }

    fn finite(
        gc: f64,
        gh: f64,
        wc: f64,
        wh: f64,
        tau_c: f64,
        tau_h: f64,
        tau_adi: f64,
    ) -> CycleConfig {
        CycleConfig::new(
            wc,
            wh,
            TrapShape::from_gamma(gc).unwrap(),
            TrapShape::from_gamma(gh).unwrap(),
            BathContact::new(10.0, 1.3, tau_c).unwrap(),
            BathContact::new(2.0, 0.7, tau_h).unwrap(),
            tau_adi,
        )
        .unwrap()
    }

    /// Independent oracle: direct enumeration over the four measurement outcomes.
    fn enumerate(config: &CycleConfig) -> (f64, f64) {
        let e = relax_endpoints(config).unwrap();
        let (gc, gh) = (config.gamma_c(), config.gamma_h());
        let eh = [config.omega_h, gh * config.omega_h];
        let ec = [config.omega_c, gc * config.omega_c];
        let pb = [1.0 - (e.g_b - 1.0) / (gh - 1.0), (e.g_b - 1.0) / (gh - 1.0)];
        let pa = [1.0 - (e.g_a - 1.0) / (gh - 1.0), (e.g_a - 1.0) / (gh - 1.0)];
        let (mut m1, mut m2) = (0.0, 0.0);
        for n in 0..2 {
            for m in 0..2 {
                let w = eh[n] - ec[n] + ec[m] - eh[m];
                m1 += pb[n] * pa[m] * w;
                m2 += pb[n] * pa[m] * w * w;
            }
        }
        (m1, m2 - m1 * m1)
    }

    #[test]
    fn isothermal_identical_strokes_do_no_work() {
        let c = CycleConfig::quasi_static(0.4, 0.4, 2.0, 2.0, 3.0, 3.0).unwrap();
        assert_eq!(mean_work(&c).unwrap(), 0.0);
    }

    #[test]
    fn fig1c_slice_positive_inside_band() {
        for &r in &[1.2, 1.5, 1.8, 2.2] {
            let c = qs(2.0, 2.0, 0.36, 0.36 * r * r);
            assert!(mean_work(&c).unwrap() > 0.0, "r = {r}");
        }
        for &r in &[0.8, 2.3, 2.8] {
            let c = qs(2.0, 2.0, 0.36, 0.36 * r * r);
            assert!(mean_work(&c).unwrap() < 0.0, "r = {r}");
        }
    }

    #[test]
    fn work_routes_agree() {
        let cases = [
            finite(2.0, 1.78, 0.2, 0.85, 1.0, 2.0, 0.5),
            finite(2.0, 4.0, 0.3, 0.5, 0.3, 0.4, 0.0),
            finite(4.0, 2.0, 0.1, 1.3, 3.0, 0.2, 1.0),
            finite(1.5, 3.0, 0.6, 0.7, 0.0, 1.0, 0.0),
            qs(2.0, 1.78, 0.2, 0.85),
        ];
        for c in &cases {
            let e = relax_endpoints(c).unwrap();
            let closed = mean_work(c).unwrap();
            assert!((closed - mean_work_from_endpoints(c, &e)).abs() < 1e-14);
            assert!((closed - mean_work_general(c).unwrap()).abs() < 1e-13);
            assert!((closed - enumerate(c).0).abs() < 1e-13);
            let qh = mean_heat_hot(c, &e);
            assert!((qh - mean_heat_hot_general(c).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn quasi_static_fig2b_work_and_variance_against_enumeration() {
        let c = qs(2.0, 1.78, 0.2, 0.85);
        let (m, v) = enumerate(&c);
        assert!((mean_work_quasi_static(&c).unwrap() - m).abs() < 1e-12);
        assert!((work_variance_quasi_static(&c) - v).abs() < 1e-12);
        // frozen from an independent four-outcome computation
        assert!((m - 0.041_956_532_105_486_8).abs() < 1e-12);
        assert!((v - 0.058_049_021_623_003_2).abs() < 1e-12);
    }

    #[test]
    fn hot_heat_cases() {
        let c = qs(2.0, 2.0, 0.3, 0.9);
        let e = relax_endpoints(&c).unwrap();
        let expect = c.omega_h * (c.g_eq_hot() - c.g_eq_cold());
        assert!((mean_heat_hot(&c, &e) - expect).abs() < 1e-15);

        let mut c = finite(2.0, 3.0, 0.2, 0.6, 1.0, 1e-12, 0.0);
        let e = relax_endpoints(&c).unwrap();
        assert!(mean_heat_hot(&c, &e).abs() < 1e-11);
        c.hot.tau = 0.0;
        let e = relax_endpoints(&c).unwrap();
        assert_eq!(mean_heat_hot(&c, &e), 0.0);
    }

    #[test]
    fn engine_points_absorb_hot_heat() {
        for i in 0..30 {
            for j in 0..30 {
                let wc = 0.05 + 0.03 * i as f64;
                let wh = 0.05 + 0.05 * j as f64;
                let c = qs(2.0, 2.0, wc, wh);
                let m = CycleMetrics::evaluate(&c).unwrap();
                if m.mode.mode == Mode::Engine && !m.mode.boundary {
                    assert!(m.heat_hot > 0.0 && m.mean_work > 0.0 && m.heat_cold < 0.0);
                }
                assert!((m.heat_cold - (m.mean_work - m.heat_hot)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn efficiency_examples() {
        let c = qs(2.0, 2.0, 0.3, 0.6);
        assert!((efficiency(&c).unwrap() - 0.5).abs() < 1e-15);
        let c = qs(2.0, 1.78, 0.2, 0.85);
        let eta = efficiency(&c).unwrap();
        assert!((eta - (1.0 - 0.2 / 0.85 / 0.78)).abs() < 1e-14);
        assert!((eta - 0.70).abs() < 0.005);
        let c = qs(2.0, 1.9, 0.2, 0.85);
        assert!((efficiency(&c).unwrap() - 0.74).abs() < 0.005);
        // heater point
        let c = qs(2.0, 2.0, 0.5, 0.4);
        assert_eq!(efficiency(&c), Err(OttoError::NotAnEngine(Mode::Heater)));
    }

    #[test]
    fn general_efficiency_is_time_independent() {
        for &(x, y) in &[(0.0f64, 0.0f64), (0.3, 0.6), (0.8, 0.1), (0.95, 0.95)] {
            let tc = if y == 0.0 {
                f64::INFINITY
            } else {
                -y.ln() / 1.3
            };
            let th = if x == 0.0 {
                f64::INFINITY
            } else {
                -x.ln() / 0.7
            };
            let c = finite(2.0, 3.3, 0.4, 0.8, tc, th, 0.2);
            let expect = 1.0 - 0.4 / 0.8 * 1.0 / 2.3;
            assert!((efficiency_general(&c).unwrap() - expect).abs() < 1e-12);
            assert!((efficiency(&c).unwrap() - expect).abs() < 1e-15);
        }
        let c = finite(3.0, 3.0, 0.2, 0.7, 0.4, 0.9, 0.0);
        assert!((efficiency_general(&c).unwrap() - (1.0 - 0.2 / 0.7)).abs() < 1e-12);
    }

    #[test]
    fn variance_zero_cases() {
        // both baths effectively at zero temperature
        let c = CycleConfig::quasi_static(0.2, 0.85, 2.0, 1.78, 1e4, 1e3).unwrap();
        let e = relax_endpoints(&c).unwrap();
        assert_eq!(e.chi_c, 0.0);
        assert_eq!(e.chi_h, 0.0);
        assert_eq!(work_variance(&c, &e), 0.0);
        // matched level spacings: every trajectory does the same work
        let c = qs(3.0, 2.0, 0.2, 0.4);
        let e = relax_endpoints(&c).unwrap();
        assert!(work_variance(&c, &e).abs() < 1e-16);
        assert!(work_variance_chi(&c, &e).abs() < 1e-16);
    }

    #[test]
    fn variance_forms_agree() {
        for c in [
            finite(2.0, 1.78, 0.2, 0.85, 1.0, 2.0, 0.5),
            finite(4.0, 2.0, 0.1, 1.3, 3.0, 0.2, 1.0),
            qs(4.0, 3.35, 0.2, 0.85),
        ] {
            let e = relax_endpoints(&c).unwrap();
            assert!((work_variance(&c, &e) - work_variance_chi(&c, &e)).abs() < 1e-12);
            assert!((work_variance(&c, &e) - enumerate(&c).1).abs() < 1e-12);
        }
    }

    #[test]
    fn power_routes_and_limits() {
        let c = finite(2.0, 1.78, 0.2, 0.85, 1.0, 2.0, 0.5);
        let p = power(&c).unwrap();
        assert!((p - power_closed_form(&c).unwrap()).abs() < 1e-12 * p.abs().max(1e-3));
        assert!((p - mean_work(&c).unwrap() / 3.5).abs() < 1e-15);
        let slower = CycleConfig { tau_adi: 1.0, ..c };
        assert!(power(&slower).unwrap() < p);
        let long = finite(2.0, 1.78, 0.2, 0.85, 1e6, 1e6, 0.5);
        assert!(power(&long).unwrap().abs() < 1e-7);
        assert_eq!(power(&qs(2.0, 1.78, 0.2, 0.85)).unwrap(), 0.0);
    }

    #[test]
    fn relative_fluctuation_at_literal_trade_off_points() {
        // independent four-outcome evaluation (see stochastic oracle)
        let cases = [
            (2.0, 1.78, 5.742_458_530_154_9),
            (4.0, 3.35, 9.112_732_127_396_3),
            (2.0, 1.9, 8.526_914_552_038_7),
        ];
        for (gc, gh, expect) in cases {
            let f = rel_power_fluctuation(&qs(gc, gh, 0.2, 0.85)).unwrap();
            assert!((f - expect).abs() < 1e-9, "({gc},{gh}) → {f}");
        }
    }

    #[test]
    fn mode_rules_without_deformation() {
        let at = |r: f64| classify_mode(&qs(2.0, 2.0, 0.3, 0.3 * r * r)).unwrap();
        assert_eq!(at(0.9).mode, Mode::Heater);
        assert_eq!(at(1.8).mode, Mode::Engine);
        assert_eq!(at(2.5).mode, Mode::Refrigerator);
        let edge = at(1.0);
        assert!(edge.boundary && edge.mode == Mode::Heater);
        let edge = classify_mode(&qs(2.0, 2.0, 0.3, 1.5)).unwrap();
        assert!(edge.boundary && edge.mode == Mode::Engine);
    }

    #[test]
    fn deformation_moves_engine_band() {
        // r ≤ 1 is a heater without deformation but an engine for γ_h = 2γ_c
        let c = qs(2.0, 4.0, 0.36, 0.36 * 0.9 * 0.9);
        assert_eq!(classify_mode(&c).unwrap().mode, Mode::Engine);
        // r > r_C is a refrigerator without deformation but an engine for γ_c = 2γ_h
        let c = qs(4.0, 2.0, 0.36, 0.36 * 2.5 * 2.5);
        assert_eq!(classify_mode(&c).unwrap().mode, Mode::Engine);
        assert_eq!(
            classify_mode(&qs(2.0, 2.0, 0.36, 0.36 * 2.5 * 2.5))
                .unwrap()
                .mode,
            Mode::Refrigerator
        );
    }

    #[test]
    fn fluctuation_on_boundary_is_an_error() {
        let c = qs(2.0, 2.0, 0.3, 0.3);
        assert_eq!(rel_power_fluctuation(&c), Err(OttoError::ModeBoundary));
    }

    #[test]
    fn normalized_efficiency_grows_with_r() {
        for &(gc, gh) in &[(2.0, 2.0), (2.0, 4.0), (4.0, 2.0)] {
            let mut last = f64::NEG_INFINITY;
            for k in 0..400 {
                let r = 0.5 + 0.01 * k as f64;
                let c = qs(gc, gh, 0.2, 0.2 * r * r);
                if let Ok(eta) = efficiency(&c) {
                    let ratio = eta / c.carnot_efficiency();
                    assert!(ratio >= last);
                    assert!(ratio <= 1.0);
                    last = ratio;
                }
            }
            assert!(last > 0.0);
        }
    }

    #[test]
    fn variance_shape_over_engine_band() {
        let band = |gc: f64, gh: f64| -> Vec<f64> {
            (0..2000)
                .map(|k| 0.5 + 0.002 * k as f64)
                .map(|r| qs(gc, gh, 0.2, 0.2 * r * r))
                .filter(|c| {
                    let m = classify_mode(c).unwrap();
                    m.mode == Mode::Engine && !m.boundary
                })
                .map(|c| work_variance_quasi_static(&c))
                .collect()
        };
        for (gc, gh) in [(2.0, 2.0), (2.0, 4.0)] {
            let v = band(gc, gh);
            assert!(v.len() > 50);
            assert!(v.windows(2).all(|w| w[1] > w[0]), "({gc},{gh})");
        }
        let v = band(4.0, 2.0);
        let (imax, _) =
            v.iter().enumerate().fold(
                (0, f64::MIN),
                |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc },
            );
        assert!(imax > 0 && imax < v.len() - 1, "no interior maximum");
    }
}
