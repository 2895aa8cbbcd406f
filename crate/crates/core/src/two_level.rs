//! Closed-form thermodynamics of the two-level working substance.
//!
//! Only the two lowest levels `ω` and `γω` are populated. A state is then
//! fully described by its excited-to-ground ratio `χ`, or equivalently by the
//! dimensionless energy `g = (1 + γχ)/(1 + χ)`.
//!
//! The cycle runs A→B (hot isochore, hot trap), B→C (adiabatic expansion and
//! deformation), C→D (cold isochore, cold trap) and D→A (adiabatic
//! compression). Relaxation along each isochore is exponential in `g` with
//! rate `Σ`, and the adiabats conserve level populations.

use crate::error::{check_positive, OttoError, Result};
use crate::spectrum::TrapShape;

/// Contact with one reservoir during an isochore.
///
/// `tau = f64::INFINITY` describes complete thermalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathContact {
    pub beta_r: f64,
    pub sigma: f64,
    pub tau: f64,
}

impl BathContact {
    pub fn new(beta_r: f64, sigma: f64, tau: f64) -> Result<Self> {
        check_positive("beta_r", beta_r)?;
        check_positive("sigma", sigma)?;
        if tau.is_nan() || tau < 0.0 {
            return Err(OttoError::InvalidParameter {
                name: "tau",
                value: tau,
                reason: "contact time must be non-negative",
            });
        }
        Ok(BathContact { beta_r, sigma, tau })
    }

    /// Infinitely long contact with unit conductivity.
    pub fn quasi_static(beta_r: f64) -> Result<Self> {
        Self::new(beta_r, 1.0, f64::INFINITY)
    }

    /// `exp(−Σ τ)`: 1 without contact, 0 after complete relaxation.
    #[inline]
    pub fn decay(&self) -> f64 {
        (-self.sigma * self.tau).exp()
    }
}

/// Full specification of one Otto cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleConfig {
    pub omega_c: f64,
    pub omega_h: f64,
    pub shape_c: TrapShape,
    pub shape_h: TrapShape,
    pub cold: BathContact,
    pub hot: BathContact,
    /// Total time of the two adiabatic strokes.
    pub tau_adi: f64,
}

impl CycleConfig {
    pub fn new(
        omega_c: f64,
        omega_h: f64,
        shape_c: TrapShape,
        shape_h: TrapShape,
        cold: BathContact,
        hot: BathContact,
        tau_adi: f64,
    ) -> Result<Self> {
        let config = CycleConfig {
            omega_c,
            omega_h,
            shape_c,
            shape_h,
            cold,
            hot,
            tau_adi,
        };
        config.validate()?;
        Ok(config)
    }

    /// Quasi-static cycle parameterized by the gap ratios `γ_c`, `γ_h`.
    pub fn quasi_static(
        omega_c: f64,
        omega_h: f64,
        gamma_c: f64,
        gamma_h: f64,
        beta_c: f64,
        beta_h: f64,
    ) -> Result<Self> {
        Self::new(
            omega_c,
            omega_h,
            TrapShape::from_gamma(gamma_c)?,
            TrapShape::from_gamma(gamma_h)?,
            BathContact::quasi_static(beta_c)?,
            BathContact::quasi_static(beta_h)?,
            0.0,
        )
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("omega_c", self.omega_c)?;
        check_positive("omega_h", self.omega_h)?;
        BathContact::new(self.cold.beta_r, self.cold.sigma, self.cold.tau)?;
        BathContact::new(self.hot.beta_r, self.hot.sigma, self.hot.tau)?;
        if self.cold.beta_r < self.hot.beta_r {
            return Err(OttoError::InvalidParameter {
                name: "beta_c",
                value: self.cold.beta_r,
                reason: "cold bath must not be hotter than the hot bath",
            });
        }
        if !(self.tau_adi.is_finite() && self.tau_adi >= 0.0) {
            return Err(OttoError::InvalidParameter {
                name: "tau_adi",
                value: self.tau_adi,
                reason: "adiabatic stroke time must be finite and non-negative",
            });
        }
        if self.hot.tau == 0.0 && self.cold.tau == 0.0 {
            return Err(OttoError::DegenerateCycle);
        }
        Ok(())
    }

    #[inline]
    pub fn gamma_c(&self) -> f64 {
        self.shape_c.gamma()
    }

    #[inline]
    pub fn gamma_h(&self) -> f64 {
        self.shape_h.gamma()
    }

    /// Hot-isochore decay factor `x`.
    #[inline]
    pub fn x(&self) -> f64 {
        self.hot.decay()
    }

    /// Cold-isochore decay factor `y`.
    #[inline]
    pub fn y(&self) -> f64 {
        self.cold.decay()
    }

    pub fn period(&self) -> f64 {
        self.hot.tau + self.cold.tau + self.tau_adi
    }

    pub fn carnot_efficiency(&self) -> f64 {
        1.0 - self.hot.beta_r / self.cold.beta_r
    }

    pub fn is_quasi_static(&self) -> bool {
        self.x() == 0.0 && self.y() == 0.0
    }

    /// Equilibrium `g` of the hot trap at the hot-bath temperature.
    pub fn g_eq_hot(&self) -> f64 {
        g_from_chi(
            boltzmann_ratio(self.hot.beta_r * self.omega_h, self.gamma_h()),
            self.gamma_h(),
        )
    }

    pub fn g_eq_cold(&self) -> f64 {
        g_from_chi(
            boltzmann_ratio(self.cold.beta_r * self.omega_c, self.gamma_c()),
            self.gamma_c(),
        )
    }

    /// Same cycle with complete thermalization on both isochores.
    pub fn to_quasi_static(&self) -> Self {
        CycleConfig {
            cold: BathContact {
                tau: f64::INFINITY,
                ..self.cold
            },
            hot: BathContact {
                tau: f64::INFINITY,
                ..self.hot
            },
            ..*self
        }
    }
}

/// Dimensionless energies at the four cycle instants of the periodic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleEndpoints {
    pub g_a: f64,
    pub g_b: f64,
    pub g_c: f64,
    pub g_d: f64,
    /// Excited/ground ratio at D (and A).
    pub chi_c: f64,
    /// Excited/ground ratio at B (and C).
    pub chi_h: f64,
}

impl CycleEndpoints {
    /// Excited-level population at the end of the hot isochore.
    pub fn excited_b(&self) -> f64 {
        self.chi_h / (1.0 + self.chi_h)
    }

    /// Excited-level population at the start of the hot isochore.
    pub fn excited_a(&self) -> f64 {
        self.chi_c / (1.0 + self.chi_c)
    }

    /// Effective inverse temperatures `(β_B, β_D)` read off the populations.
    pub fn effective_betas(&self, config: &CycleConfig) -> (f64, f64) {
        let beta_b = -self.chi_h.ln() / ((config.gamma_h() - 1.0) * config.omega_h);
        let beta_d = -self.chi_c.ln() / ((config.gamma_c() - 1.0) * config.omega_c);
        (beta_b, beta_d)
    }
}

fn check_beta_omega_gamma(beta_omega: f64, gamma: f64) -> Result<()> {
    if beta_omega.is_nan() || beta_omega <= 0.0 {
        return Err(OttoError::InvalidParameter {
            name: "beta_omega",
            value: beta_omega,
            reason: "must be positive",
        });
    }
    if !(gamma.is_finite() && gamma > 1.0) {
        return Err(OttoError::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "gap ratio must exceed 1",
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn boltzmann_ratio(beta_omega: f64, gamma: f64) -> f64 {
    (-(gamma - 1.0) * beta_omega).exp()
}

#[inline]
pub(crate) fn g_from_chi(chi: f64, gamma: f64) -> f64 {
    (1.0 + gamma * chi) / (1.0 + chi)
}

/// Excited/ground population ratio of a state with energy `g`.
#[inline]
pub fn chi_from_g(g: f64, gamma: f64) -> f64 {
    (g - 1.0) / (gamma - g)
}

/// Equilibrium dimensionless energy of the two-level trap; `βω = ∞` is allowed.
pub fn eq_g(beta_omega: f64, gamma: f64) -> Result<f64> {
    check_beta_omega_gamma(beta_omega, gamma)?;
    Ok(g_from_chi(boltzmann_ratio(beta_omega, gamma), gamma))
}

/// Equilibrium `(p_ground, p_excited)`.
pub fn populations(beta_omega: f64, gamma: f64) -> Result<(f64, f64)> {
    check_beta_omega_gamma(beta_omega, gamma)?;
    let chi = boltzmann_ratio(beta_omega, gamma);
    Ok((1.0 / (1.0 + chi), chi / (1.0 + chi)))
}

/// Maps `g` in trap `from` to the population-preserving `g` in trap `to`.
///
/// With `from = cold, to = hot` this is `g_D ↦ g_A`; with the roles swapped
/// it is `g_B ↦ g_C`.
pub fn deformation_link(g: f64, from: TrapShape, to: TrapShape) -> Result<f64> {
    let (gf, gt) = (from.gamma(), to.gamma());
    if !(gf > 1.0 && gt > 1.0) {
        return Err(OttoError::InvalidParameter {
            name: "gamma",
            value: gf.min(gt),
            reason: "degenerate level spacing",
        });
    }
    let upper = 0.5 * (1.0 + gf);
    let slack = 1e-12 * upper;
    if !(g >= 1.0 - slack && g <= upper + slack) {
        return Err(OttoError::InvalidParameter {
            name: "g",
            value: g,
            reason: "outside the two-level range [1, (1+γ)/2]",
        });
    }
    if from == to {
        return Ok(g);
    }
    Ok(((gt - 1.0) * g + gf - gt) / (gf - 1.0))
}

/// Fraction `(1−y)x/(1−xy)` weighting the hot endpoint, and its cold mirror.
fn mixing(x: f64, y: f64) -> (f64, f64) {
    let den = 1.0 - x * y;
    ((1.0 - y) * x / den, (1.0 - x) * y / den)
}

/// Periodic-state `g_B` and `g_D` from the equilibrium energies.
fn periodic_gb_gd(
    gamma_c: f64,
    gamma_h: f64,
    g_eq_h: f64,
    g_eq_c: f64,
    x: f64,
    y: f64,
) -> (f64, f64) {
    let (kh, kc) = mixing(x, y);
    let g_b = g_eq_h
        + ((gamma_c - gamma_h) / (gamma_c - 1.0) + (gamma_h - 1.0) / (gamma_c - 1.0) * g_eq_c
            - g_eq_h)
            * kh;
    let g_d = g_eq_c
        + ((gamma_h - gamma_c) / (gamma_h - 1.0) + (gamma_c - 1.0) / (gamma_h - 1.0) * g_eq_h
            - g_eq_c)
            * kc;
    (g_b, g_d)
}

/// ξ-factors `(ξ_hc, ξ_ch) = (g_C/g_B, g_A/g_D)` from equilibrium energies and
/// decay factors.
pub fn xi_factors_from(
    gamma_c: f64,
    gamma_h: f64,
    g_eq_h: f64,
    g_eq_c: f64,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    if x * y == 1.0 {
        return Err(OttoError::DegenerateCycle);
    }
    let (bracket_h, bracket_c) = periodic_gb_gd(gamma_c, gamma_h, g_eq_h, g_eq_c, x, y);
    if bracket_h == 0.0 || bracket_c == 0.0 || !bracket_h.is_finite() || !bracket_c.is_finite() {
        return Err(OttoError::DegenerateXi);
    }
    let xi_hc =
        (gamma_c - 1.0) / (gamma_h - 1.0) + (gamma_h - gamma_c) / (gamma_h - 1.0) / bracket_h;
    let xi_ch =
        (gamma_h - 1.0) / (gamma_c - 1.0) + (gamma_c - gamma_h) / (gamma_c - 1.0) / bracket_c;
    Ok((xi_hc, xi_ch))
}

pub fn xi_factors(config: &CycleConfig) -> Result<(f64, f64)> {
    config.validate()?;
    xi_factors_from(
        config.gamma_c(),
        config.gamma_h(),
        config.g_eq_hot(),
        config.g_eq_cold(),
        config.x(),
        config.y(),
    )
}

/// Periodic steady state of the cycle in closed form.
pub fn relax_endpoints(config: &CycleConfig) -> Result<CycleEndpoints> {
    config.validate()?;
    let (gc, gh) = (config.gamma_c(), config.gamma_h());
    let (g_b, g_d) = periodic_gb_gd(
        gc,
        gh,
        config.g_eq_hot(),
        config.g_eq_cold(),
        config.x(),
        config.y(),
    );
    let g_a = deformation_link(g_d, config.shape_c, config.shape_h)?;
    let g_c = deformation_link(g_b, config.shape_h, config.shape_c)?;
    Ok(CycleEndpoints {
        g_a,
        g_b,
        g_c,
        g_d,
        chi_c: chi_from_g(g_d, gc).max(0.0),
        chi_h: chi_from_g(g_b, gh).max(0.0),
    })
}

/// One full cycle B → C → D → A → B starting from `g_B`; returns the new
/// `(g_B, g_D)`.
///
/// Relaxation follows `g_end = g_eq + (g_start − g_eq)·decay`. Iterating this
/// map converges to [`relax_endpoints`] at rate `xy`.
pub fn advance_cycle(config: &CycleConfig, g_b: f64) -> Result<(f64, f64)> {
    let g_c = deformation_link(g_b, config.shape_h, config.shape_c)?;
    let g_d = config.g_eq_cold() + (g_c - config.g_eq_cold()) * config.y();
    let g_a = deformation_link(g_d, config.shape_c, config.shape_h)?;
    let g_b = config.g_eq_hot() + (g_a - config.g_eq_hot()) * config.x();
    Ok((g_b, g_d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shape(gamma: f64) -> TrapShape {
        TrapShape::from_gamma(gamma).unwrap()
    }

    fn finite_config(gc: f64, gh: f64, wc: f64, wh: f64, x: f64, y: f64) -> CycleConfig {
        CycleConfig::new(
            wc,
            wh,
            shape(gc),
            shape(gh),
            BathContact::new(10.0, 1.0, -y.ln()).unwrap(),
            BathContact::new(2.0, 1.0, -x.ln()).unwrap(),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn eq_g_limits_and_value() {
        assert_eq!(eq_g(f64::INFINITY, 2.0).unwrap(), 1.0);
        assert!((eq_g(1e-12, 2.0).unwrap() - 1.5).abs() < 1e-12);
        let (a, b) = ((-1.7f64).exp(), (-3.4f64).exp());
        let g = eq_g(1.7, 2.0).unwrap();
        assert!((g - (a + 2.0 * b) / (a + b)).abs() < 1e-15);
        assert!((g - 1.154_465_265_083_534_8).abs() < 1e-12);
        assert!(eq_g(0.0, 2.0).is_err());
        assert!(eq_g(1.0, 1.0).is_err());
    }

    #[test]
    fn populations_cases() {
        assert_eq!(populations(f64::INFINITY, 2.0).unwrap(), (1.0, 0.0));
        let (pg, pe) = populations(1e-14, 3.0).unwrap();
        assert!((pg - 0.5).abs() < 1e-12 && (pe - 0.5).abs() < 1e-12);
        let (pg, pe) = populations(1.0, 2.0).unwrap();
        let e = (-1f64).exp();
        assert!((pe - e / (1.0 + e)).abs() < 1e-15);
        assert!((pe - 0.268_941_421_369_995).abs() < 1e-12);
        assert!((pg + pe - 1.0).abs() < 1e-15);
        assert!((pe / pg - e).abs() < 1e-15);
    }

    #[test]
    fn deformation_link_examples() {
        assert_eq!(deformation_link(1.3, shape(2.0), shape(2.0)).unwrap(), 1.3);
        assert!((deformation_link(1.25, shape(2.0), shape(4.0)).unwrap() - 1.75).abs() < 1e-12);
        assert!(deformation_link(2.0, shape(2.0), shape(4.0)).is_err());
    }

    #[test]
    fn deformation_link_preserves_populations() {
        for k in 1..20 {
            let g_d = 1.0 + 0.025 * k as f64;
            let g_a = deformation_link(g_d, shape(2.0), shape(4.0)).unwrap();
            let pe_d = chi_from_g(g_d, 2.0) / (1.0 + chi_from_g(g_d, 2.0));
            let pe_a = chi_from_g(g_a, 4.0) / (1.0 + chi_from_g(g_a, 4.0));
            assert!((pe_d - pe_a).abs() < 1e-13);
        }
    }

    #[test]
    fn two_level_g_matches_spectrum_truncation() {
        use crate::spectrum::{ThermalPoint, ThermalSums};
        for &theta in &[1.0, 4.0 / 3.0, 2.0, 0.6] {
            let s = TrapShape::new(theta).unwrap();
            for k in 1..40 {
                let bw = 0.25 * k as f64;
                let sums = ThermalSums::compute(&ThermalPoint::new(bw, s).unwrap(), 2).unwrap();
                assert!((sums.g - eq_g(bw, s.gamma()).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn xi_equal_shapes_is_exactly_one() {
        for &(x, y) in &[(0.0, 0.0), (0.3, 0.8), (0.99, 0.01)] {
            let c = finite_config(2.0, 2.0, 0.3, 0.9, x, y);
            assert_eq!(xi_factors(&c).unwrap(), (1.0, 1.0));
        }
    }

    #[test]
    fn xi_quasi_static_example() {
        let (xi_hc, _) = xi_factors_from(2.0, 4.0, 1.2, 1.1, 0.0, 0.0).unwrap();
        assert!((xi_hc - (1.0 / 3.0 + 2.0 / 3.0 / 1.2)).abs() < 1e-15);
        assert!((xi_hc - 0.888_888_888_888_889).abs() < 1e-12);
    }

    #[test]
    fn xi_matches_endpoint_ratios() {
        for &(gc, gh) in &[(2.0, 4.0), (4.0, 2.0), (2.0, 1.78), (3.0, 5.5)] {
            for &(x, y) in &[(0.0, 0.0), (0.4, 0.7), (0.9, 0.2)] {
                let c = finite_config(gc, gh, 0.2, 0.85, x, y);
                let e = relax_endpoints(&c).unwrap();
                let (xi_hc, xi_ch) = xi_factors(&c).unwrap();
                assert!((e.g_c / e.g_b - xi_hc).abs() < 1e-12);
                assert!((e.g_a / e.g_d - xi_ch).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn xi_swaps_under_label_exchange() {
        let (gc, gh, g_h, g_c, x, y) = (2.0, 3.5, 1.3, 1.1, 0.4, 0.6);
        let (hc, ch) = xi_factors_from(gc, gh, g_h, g_c, x, y).unwrap();
        let (hc2, ch2) = xi_factors_from(gh, gc, g_c, g_h, y, x).unwrap();
        assert!((hc - ch2).abs() < 1e-14 && (ch - hc2).abs() < 1e-14);
    }

    #[test]
    fn quasi_static_endpoints_are_thermal() {
        let c = CycleConfig::quasi_static(0.2, 0.85, 2.0, 1.78, 10.0, 2.0).unwrap();
        let e = relax_endpoints(&c).unwrap();
        assert_eq!(e.g_b, c.g_eq_hot());
        assert_eq!(e.g_d, c.g_eq_cold());
        let (bb, bd) = e.effective_betas(&c);
        assert!((bb - 2.0).abs() < 1e-12 && (bd - 10.0).abs() < 1e-12);
    }

    #[test]
    fn equal_shapes_reduce_to_plain_mixing() {
        let c = finite_config(2.0, 2.0, 0.3, 1.1, 0.35, 0.55);
        let e = relax_endpoints(&c).unwrap();
        let (gh, gc, x, y) = (c.g_eq_hot(), c.g_eq_cold(), c.x(), c.y());
        let expect = gh + (gc - gh) * (1.0 - y) * x / (1.0 - x * y);
        assert!((e.g_b - expect).abs() < 1e-14);
        // oracle: iterate the affine relaxation maps to convergence
        let (mut b, mut d) = (1.0, 1.0);
        for _ in 0..200 {
            (b, d) = advance_cycle(&c, b).unwrap();
        }
        assert!((b - e.g_b).abs() < 1e-14 && (d - e.g_d).abs() < 1e-14);
    }

    #[test]
    fn periodic_state_is_a_fixed_point() {
        for &(gc, gh) in &[(2.0, 4.0), (4.0, 2.0), (1.5, 1.9)] {
            let c = finite_config(gc, gh, 0.3, 0.8, 0.6, 0.3);
            let e = relax_endpoints(&c).unwrap();
            let (b, d) = advance_cycle(&c, e.g_b).unwrap();
            assert!((b - e.g_b).abs() < 1e-12 && (d - e.g_d).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_contact_on_both_sides_is_rejected() {
        let mut c = finite_config(2.0, 2.0, 0.3, 0.8, 0.5, 0.5);
        c.hot.tau = 0.0;
        c.cold.tau = 0.0;
        assert_eq!(relax_endpoints(&c), Err(OttoError::DegenerateCycle));
    }

    #[test]
    fn endpoints_within_two_level_range() {
        let c = finite_config(4.0, 2.0, 0.3, 0.8, 0.6, 0.3);
        let e = relax_endpoints(&c).unwrap();
        assert!(e.g_b > 1.0 && e.g_b < 0.5 * (1.0 + 2.0));
        assert!(e.g_d > 1.0 && e.g_d < 0.5 * (1.0 + 4.0));
    }

    proptest! {
        #[test]
        fn cycle_map_contracts_to_periodic_state(
            gc in 1.2f64..5.0, gh in 1.2f64..5.0,
            wc in 0.05f64..1.0, wh in 0.05f64..2.0,
            x in 0.0f64..0.95, y in 0.0f64..0.95,
            start in 0.0f64..1.0,
        ) {
            let c = finite_config(gc, gh, wc, wh, x.max(1e-9), y.max(1e-9));
            let e = relax_endpoints(&c).unwrap();
            let mut b = 1.0 + start * 0.5 * (gh - 1.0);
            let mut err = (b - e.g_b).abs();
            for _ in 0..6 {
                let prev = err;
                b = advance_cycle(&c, b).unwrap().0;
                err = (b - e.g_b).abs();
                prop_assert!(err <= prev * c.x() * c.y() + 1e-13);
            }
        }

        #[test]
        fn hot_relaxation_lies_between_start_and_equilibrium(
            gc in 1.2f64..5.0, gh in 1.2f64..5.0,
            x in 0.01f64..0.99, y in 0.01f64..0.99,
        ) {
            let c = finite_config(gc, gh, 0.2, 0.9, x, y);
            let e = relax_endpoints(&c).unwrap();
            let (lo, hi) = if e.g_a < c.g_eq_hot() { (e.g_a, c.g_eq_hot()) } else { (c.g_eq_hot(), e.g_a) };
            prop_assert!(e.g_b >= lo - 1e-15 && e.g_b <= hi + 1e-15);
        }
    }
}
