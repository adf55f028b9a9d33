//! Physical parameters and the per-photon-number block quantities.
//!
//! With `n` photons in the cavity the mechanics sees a harmonic oscillator of
//! frequency `Ω_n = sqrt(Ω² + 2ħg₂n/m)`, displaced by the linear coupling.
//! Differences between block frequencies are tiny in realistic regimes
//! (relative size ~1e-7), so every such difference is routed through
//! [`ModelParams::omega_diff`], which never subtracts two square roots.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, from_usize, lit, to_f64, Real};

pub const BOLTZMANN_SI: f64 = 1.380649e-23;
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitSystem {
    Unitless,
    Si,
}

impl UnitSystem {
    /// Boltzmann constant in this unit system (1 when unitless).
    pub fn boltzmann<T: Real>(self) -> T {
        match self {
            UnitSystem::Unitless => T::one(),
            UnitSystem::Si => lit(BOLTZMANN_SI),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UnitSystem::Unitless => "unitless",
            UnitSystem::Si => "SI",
        }
    }
}

impl fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UnitSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unitless" => Ok(UnitSystem::Unitless),
            "si" => Ok(UnitSystem::Si),
            other => Err(Error::Config(format!("unknown unit_system '{other}'"))),
        }
    }
}

/// Parameters of the optomechanical Hamiltonian and of the initial thermal
/// mechanical state.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub hbar: T,
    pub mass: T,
    /// Bare mechanical angular frequency Ω.
    pub omega: T,
    /// Cavity angular frequency ω_c.
    pub omega_c: T,
    pub g1: T,
    pub g2: T,
    /// Mean thermal phonon number of the initial mechanical state.
    pub n_th: T,
    /// Temperature the occupation was derived from, if any. Informational
    /// once `n_th` is set.
    pub temperature: Option<T>,
    pub unit_system: UnitSystem,
}

/// Derived scalars of the `n`-photon block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockQuantities<T> {
    pub n: usize,
    /// Ω_n
    pub omega_n: T,
    /// Ω_n − Ω, evaluated without cancellation.
    pub omega_shift: T,
    /// ω_n = nω_c + Ω_n/2
    pub omega_small: T,
    pub g1_n: T,
    pub mu: T,
    pub nu: T,
}

impl<T: Real> BlockQuantities<T> {
    /// ν/μ, the squeezing ratio that appears throughout the Gaussian form.
    pub fn squeeze_ratio(&self) -> T {
        self.nu / self.mu
    }
}

/// Cavity frequency and its position couplings at the membrane position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionCouplings<T> {
    pub omega_c: T,
    pub g1: T,
    pub g2: T,
}

impl<T: Real> ModelParams<T> {
    /// Unitless reference parameters (ħ = m = Ω = ω_c = 1, g₂ = 0.01, n_th = 1).
    pub fn unitless() -> Self {
        ModelParams {
            hbar: T::one(),
            mass: T::one(),
            omega: T::one(),
            omega_c: T::one(),
            g1: T::zero(),
            g2: lit(0.01),
            n_th: T::one(),
            temperature: None,
            unit_system: UnitSystem::Unitless,
        }
    }

    /// Laboratory-scale parameters in SI units. `n_th` is fixed at 1e5;
    /// the 300 K temperature is kept for reference only.
    pub fn real_world() -> Self {
        let two_pi = std::f64::consts::TAU;
        ModelParams {
            hbar: lit(1.054e-34),
            mass: lit(50e-15),
            omega: lit(two_pi * 134e3),
            omega_c: lit(7e9),
            g1: T::zero(),
            g2: lit(two_pi * 4.46e24),
            n_th: lit(1e5),
            temperature: Some(lit(300.0)),
            unit_system: UnitSystem::Si,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "unitless" => Ok(Self::unitless()),
            "real-world" | "real_world" => Ok(Self::real_world()),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (expected 'unitless' or 'real-world')"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T, name: &str| {
            if v > T::zero() && crate::scalar::is_finite(v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive(self.hbar, "hbar")?;
        positive(self.mass, "mass")?;
        positive(self.omega, "Omega")?;
        if self.omega_c < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "omega_c must be non-negative, got {}",
                self.omega_c
            )));
        }
        if !(self.n_th >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "n_th must be non-negative, got {}",
                self.n_th
            )));
        }
        Ok(())
    }

    /// Validates the parameters and the reality of every block up to `max_photons`.
    pub fn validate_blocks(&self, max_photons: usize) -> Result<()> {
        self.validate()?;
        for n in 0..=max_photons {
            self.omega_n(n)?;
        }
        Ok(())
    }

    pub fn with_g2(&self, g2: T) -> Self {
        ModelParams { g2, ..self.clone() }
    }

    pub fn with_n_th(&self, n_th: T) -> Self {
        ModelParams { n_th, ..self.clone() }
    }

    /// Sets the temperature and replaces `n_th` by the Bose occupation of Ω.
    pub fn with_temperature(&self, temperature: T) -> Self {
        let n_th = self.thermal_occupation(temperature);
        log::debug!("temperature {temperature} mapped to n_th = {n_th:e}");
        ModelParams {
            n_th,
            temperature: Some(temperature),
            ..self.clone()
        }
    }

    pub fn thermal_occupation(&self, temperature: T) -> T {
        thermal_occupation(self.omega, temperature, self.hbar, self.unit_system.boltzmann())
    }

    /// 2ħg₂n/m
    fn quadratic_shift(&self, n: usize) -> T {
        lit::<T>(2.0) * self.hbar * self.g2 * from_usize::<T>(n) / self.mass
    }

    pub fn omega_n(&self, n: usize) -> Result<T> {
        let radicand = self.omega * self.omega + self.quadratic_shift(n);
        if radicand > T::zero() {
            Ok(radicand.sqrt())
        } else {
            Err(Error::NegativeBlockFrequency {
                n,
                radicand: to_f64(radicand),
            })
        }
    }

    /// Ω_n − Ω_m as 2ħg₂(n−m) / [m(Ω_n + Ω_m)].
    pub fn omega_diff(&self, n: usize, m: usize) -> Result<T> {
        let omega_n = self.omega_n(n)?;
        let omega_m = self.omega_n(m)?;
        let dn = from_usize::<T>(n) - from_usize::<T>(m);
        Ok(lit::<T>(2.0) * self.hbar * self.g2 * dn / (self.mass * (omega_n + omega_m)))
    }

    /// (μ_n, ν_n) of `b_n = μ_n b + ν_n b†`.
    pub fn bogoliubov(&self, n: usize) -> Result<(T, T)> {
        let omega_n = self.omega_n(n)?;
        let denom = lit::<T>(2.0) * (self.omega * omega_n).sqrt();
        let mu = (omega_n + self.omega) / denom;
        let nu = self.omega_diff(n, 0)? / denom;
        Ok((mu, nu))
    }

    /// g₁ₙ = n g₁ sqrt(ħ / 2mΩ_n)
    pub fn g1_n(&self, n: usize) -> Result<T> {
        let omega_n = self.omega_n(n)?;
        Ok(from_usize::<T>(n) * self.g1 * (self.hbar / (lit::<T>(2.0) * self.mass * omega_n)).sqrt())
    }

    pub fn block(&self, n: usize) -> Result<BlockQuantities<T>> {
        let omega_n = self.omega_n(n)?;
        let (mu, nu) = self.bogoliubov(n)?;
        Ok(BlockQuantities {
            n,
            omega_n,
            omega_shift: self.omega_diff(n, 0)?,
            omega_small: from_usize::<T>(n) * self.omega_c + omega_n / lit(2.0),
            g1_n: self.g1_n(n)?,
            mu,
            nu,
        })
    }

    /// e^{−iΩ_n t}, formed as e^{−iΩt}·e^{−i(Ω_n−Ω)t}.
    pub fn rotation(&self, block: &BlockQuantities<T>, t: T) -> Complex<T> {
        cis(-self.omega * t) * cis(-block.omega_shift * t)
    }

    /// Linear-coupling part of Φ_n: (g₁ₙ/Ω_n)²[Ω_n t − sin(Ω_n t)].
    fn displacement_phase(block: &BlockQuantities<T>, t: T) -> T {
        let ratio = block.g1_n / block.omega_n;
        let x = block.omega_n * t;
        ratio * ratio * (x - x.sin())
    }

    /// Φ_n(t) = ω_n t − (g₁ₙ²/Ω_n²)[Ω_n t − sin(Ω_n t)]
    pub fn phase_phi(&self, n: usize, t: T) -> Result<T> {
        let b = self.block(n)?;
        Ok(b.omega_small * t - Self::displacement_phase(&b, t))
    }

    /// Φ_n(t) − Φ_m(t) with ω_n − ω_m = (n−m)ω_c + (Ω_n−Ω_m)/2.
    pub fn phase_phi_diff(&self, n: usize, m: usize, t: T) -> Result<T> {
        let bn = self.block(n)?;
        let bm = self.block(m)?;
        let dn = from_usize::<T>(n) - from_usize::<T>(m);
        Ok(
            dn * self.omega_c * t + self.omega_diff(n, m)? * t / lit(2.0) - Self::displacement_phase(&bn, t)
                + Self::displacement_phase(&bm, t),
        )
    }

    /// e^{−i[Φ_n(t) − Φ_m(t)]}.
    ///
    /// Each part of the phase is exponentiated separately: the cavity part
    /// (n−m)ω_c t can be many orders of magnitude larger than the g₂-dependent
    /// part, and summing them first would round the latter away.
    pub fn phase_factor_diff(&self, bn: &BlockQuantities<T>, bm: &BlockQuantities<T>, t: T) -> Result<Complex<T>> {
        let dn = from_usize::<T>(bn.n) - from_usize::<T>(bm.n);
        let beat = self.omega_diff(bn.n, bm.n)?;
        Ok(cis(-dn * self.omega_c * t)
            * cis(-beat * t / lit(2.0))
            * cis(Self::displacement_phase(bn, t) - Self::displacement_phase(bm, t)))
    }

    /// η_n(t) = (g₁ₙ/Ω_n)(e^{−iΩ_n t} − 1)
    pub fn eta(&self, block: &BlockQuantities<T>, t: T) -> Complex<T> {
        let rot = self.rotation(block, t);
        (rot - Complex::new(T::one(), T::zero())) * (block.g1_n / block.omega_n)
    }

    pub fn eta_n(&self, n: usize, t: T) -> Result<Complex<T>> {
        let b = self.block(n)?;
        Ok(self.eta(&b, t))
    }

    /// Beat frequency Δ = Ω₁ − Ω.
    pub fn beat_frequency(&self) -> Result<T> {
        self.omega_diff(1, 0)
    }

    /// Fast frequency δ = ω₁ − ω₀ = ω_c + Δ/2.
    pub fn fast_frequency(&self) -> Result<T> {
        Ok(self.omega_c + self.beat_frequency()? / lit(2.0))
    }

    /// 2π/Δ; errors when g₂ = 0 (no beat).
    pub fn slow_period(&self) -> Result<T> {
        let delta = self.beat_frequency()?;
        if delta == T::zero() {
            return Err(Error::InvalidParameter(
                "beat frequency is zero (g2 = 0): slow period undefined".into(),
            ));
        }
        Ok(T::two_pi() / delta.abs())
    }

    pub fn fast_period(&self) -> Result<T> {
        let delta = self.fast_frequency()?;
        if delta == T::zero() {
            return Err(Error::InvalidParameter("fast frequency is zero".into()));
        }
        Ok(T::two_pi() / delta.abs())
    }
}

/// Bose occupation `[exp(ħΩ/k_B T) − 1]^{-1}`; non-positive temperatures give 0.
pub fn thermal_occupation<T: Real>(omega: T, temperature: T, hbar: T, boltzmann: T) -> T {
    if !(temperature > T::zero()) {
        return T::zero();
    }
    let x = hbar * omega / (boltzmann * temperature);
    let denom = x.exp_m1();
    if crate::scalar::is_finite(denom) {
        T::one() / denom
    } else {
        T::zero()
    }
}

/// Position couplings of a membrane-in-the-middle cavity with
/// `ω(x) = (c/L) arccos[|r| cos(4πx/λ)]`, expanded at `x0`:
/// returns ω(x₀), ω′(x₀) and ω″(x₀)/2.
pub fn cavity_dispersion_couplings<T: Real>(
    length: T,
    reflectivity: T,
    wavelength: T,
    x0: T,
    speed_of_light: T,
) -> Result<DispersionCouplings<T>> {
    let r = reflectivity.abs();
    if !(r < T::one()) || !(length > T::zero()) || !(wavelength > T::zero()) {
        return Err(Error::InvalidParameter(
            "dispersion requires |r| < 1, L > 0, lambda > 0".into(),
        ));
    }
    let k = lit::<T>(4.0) * T::pi() / wavelength;
    let (s, c) = (k * x0).sin_cos();
    let u = r * c;
    let one_minus_u2 = T::one() - u * u;
    if !(one_minus_u2 > T::default_epsilon()) {
        return Err(Error::DerivativeSingular);
    }
    let scale = speed_of_light / length;
    let root = one_minus_u2.sqrt();
    let du = -r * k * s;
    let d2u = -r * k * k * c;
    let omega_c = scale * u.acos();
    let d1 = -scale * du / root;
    let d2 = -scale * (d2u / root + u * du * du / (one_minus_u2 * root));
    Ok(DispersionCouplings {
        omega_c,
        g1: d1,
        g2: d2 / lit(2.0),
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unitless() -> ModelParams<f64> {
        ModelParams::unitless()
    }

    // 50-digit reference values.
    const SQRT_1_02: f64 = 1.009_950_493_836_207_8;
    const MU_1: f64 = 1.000_012_254_526_523_6;
    const NU_1: f64 = 4.950_677_046_680_193_5e-3;
    const REAL_WORLD_DELTA: f64 = 0.070_161_788_121_386_94;

    #[test]
    fn omega_n_examples() {
        let p = unitless();
        assert_eq!(p.omega_n(0).unwrap(), 1.0);
        assert!((p.omega_n(1).unwrap() - SQRT_1_02).abs() < 1e-15);
        let free = p.with_g2(0.0);
        for n in 0..5 {
            assert_eq!(free.omega_n(n).unwrap(), 1.0);
        }
    }

    #[test]
    fn imaginary_block_frequency_is_rejected() {
        let p = unitless().with_g2(-1.0);
        assert!(p.omega_n(0).is_ok());
        match p.omega_n(1) {
            Err(Error::NegativeBlockFrequency { n: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn omega_diff_examples() {
        let p = unitless();
        assert!((p.omega_diff(1, 0).unwrap() - (SQRT_1_02 - 1.0)).abs() < 1e-16);
        assert_eq!(p.omega_diff(3, 3).unwrap(), 0.0);
    }

    #[test]
    fn omega_diff_is_stable_in_the_real_world_regime() {
        let p = ModelParams::<f64>::real_world();
        let stable = p.omega_diff(1, 0).unwrap();
        let naive = p.omega_n(1).unwrap() - p.omega_n(0).unwrap();
        // Independent reference: Ω(√(1+ε) − 1) by its Taylor series.
        let eps = 2.0 * p.hbar * p.g2 / (p.mass * p.omega * p.omega);
        let series = p.omega * (eps / 2.0 - eps * eps / 8.0 + eps.powi(3) / 16.0 - 5.0 * eps.powi(4) / 128.0);
        assert!(((stable - series) / series).abs() < 1e-14);
        assert!(((stable - REAL_WORLD_DELTA) / REAL_WORLD_DELTA).abs() < 1e-14);
        // the naive difference loses about seven digits
        assert!(((naive - series) / series).abs() > 1e-12);
    }

    #[test]
    fn bogoliubov_examples() {
        let p = unitless();
        assert_eq!(p.bogoliubov(0).unwrap(), (1.0, 0.0));
        let (mu, nu) = p.bogoliubov(1).unwrap();
        assert!((mu - MU_1).abs() < 1e-15);
        assert!((nu - NU_1).abs() < 1e-16);
    }

    #[test]
    fn phase_examples() {
        let p = unitless();
        assert_eq!(p.phase_phi(1, 0.0).unwrap(), 0.0);
        assert_eq!(p.phase_phi_diff(1, 0, 0.0).unwrap(), 0.0);
        let delta_fast = 1.0 + (SQRT_1_02 - 1.0) / 2.0;
        assert!((p.fast_frequency().unwrap() - 1.004_975_246_918_103_9).abs() < 1e-15);
        for &t in &[0.3, 7.0, 120.0] {
            let d = p.phase_phi_diff(1, 0, t).unwrap();
            assert!((d - delta_fast * t).abs() < 1e-12 * t);
        }
        let q = ModelParams { g1: 0.3, ..unitless() };
        let n = 2;
        let b = q.block(n).unwrap();
        let t = std::f64::consts::TAU / b.omega_n;
        let expected = b.omega_small * t - (b.g1_n / b.omega_n).powi(2) * std::f64::consts::TAU;
        assert!((q.phase_phi(n, t).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn phase_factor_matches_phase_difference() {
        let q = ModelParams { g1: 0.2, ..unitless() };
        let (b2, b1) = (q.block(2).unwrap(), q.block(1).unwrap());
        for &t in &[0.0, 0.7, 13.1] {
            let f = q.phase_factor_diff(&b2, &b1, t).unwrap();
            let phi = q.phase_phi_diff(2, 1, t).unwrap();
            assert!((f - cis(-phi)).norm() < 1e-13);
        }
    }

    #[test]
    fn eta_examples() {
        let p = unitless();
        assert_eq!(p.eta_n(1, 3.0).unwrap(), Complex::new(0.0, 0.0));
        let q = ModelParams { g1: 0.4, ..unitless() };
        let b = q.block(1).unwrap();
        let period = std::f64::consts::TAU / b.omega_n;
        assert!(q.eta(&b, period).norm() < 1e-15);
        let half = q.eta(&b, period / 2.0);
        assert!((half - Complex::new(-2.0 * b.g1_n / b.omega_n, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn thermal_occupation_examples() {
        assert_eq!(thermal_occupation(1.0, 0.0, 1.0, 1.0), 0.0);
        assert_eq!(thermal_occupation(1.0, 1e-3, 1.0, 1.0), 0.0);
        let t = 1.0 / std::f64::consts::LN_2;
        assert!((thermal_occupation(1.0, t, 1.0, 1.0) - 1.0).abs() < 1e-14);
        let p = ModelParams::<f64>::real_world();
        let n = p.thermal_occupation(300.0);
        assert!((n / 4.667_445_495_6e7 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn with_temperature_sets_occupation() {
        let p = ModelParams::<f64>::real_world().with_temperature(1.0);
        assert_eq!(p.temperature, Some(1.0));
        assert!(p.n_th > 1.5e5 && p.n_th < 1.6e5);
    }

    #[test]
    fn dispersion_at_extremum() {
        let (l, r, lambda) = (67e-3, 0.42, 1064e-9);
        let c = cavity_dispersion_couplings(l, r, lambda, 0.0, SPEED_OF_LIGHT_SI).unwrap();
        assert!(c.g1.abs() < 1e-6 * c.g2.abs() * lambda);
        // 2π × 24 kHz/nm² within 15 %
        let reference = std::f64::consts::TAU * 24e3 * 1e18;
        assert!((c.g2.abs() / reference - 1.0).abs() < 0.15, "g2 = {:e}", c.g2);
    }

    #[test]
    fn dispersion_matches_finite_differences() {
        let (l, r, lambda) = (67e-3, 0.42, 1064e-9);
        let omega = |x: f64| SPEED_OF_LIGHT_SI / l * (r * (4.0 * std::f64::consts::PI * x / lambda).cos()).acos();
        for &x0 in &[37e-9, 101e-9, 200e-9] {
            let c = cavity_dispersion_couplings(l, r, lambda, x0, SPEED_OF_LIGHT_SI).unwrap();
            let h = 1e-12;
            let d1 = (omega(x0 + h) - omega(x0 - h)) / (2.0 * h);
            let h2 = 2e-11;
            let d2 = (omega(x0 + h2) - 2.0 * omega(x0) + omega(x0 - h2)) / (h2 * h2);
            assert!((c.g1 / d1 - 1.0).abs() < 1e-6, "{} vs {}", c.g1, d1);
            assert!((2.0 * c.g2 / d2 - 1.0).abs() < 1e-6, "{} vs {}", 2.0 * c.g2, d2);
        }
    }

    #[test]
    fn dispersion_singular_for_unit_reflectivity_limit() {
        let err = cavity_dispersion_couplings(1.0, 1.0 - 1e-18, 1.0, 0.0, 1.0);
        assert!(matches!(
            err,
            Err(Error::DerivativeSingular) | Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn zero_g2_blocks_are_identical_to_block_zero() {
        let p = unitless().with_g2(0.0);
        let b0 = p.block(0).unwrap();
        for n in 1..6 {
            let b = p.block(n).unwrap();
            assert_eq!(b.omega_n.to_bits(), b0.omega_n.to_bits());
            assert_eq!(b.mu.to_bits(), 1f64.to_bits());
            assert_eq!(b.nu.to_bits(), 0f64.to_bits());
        }
    }

    proptest! {
        #[test]
        fn bogoliubov_hyperbolic_identity(g2 in -0.06f64..5.0, n in 0usize..8) {
            let p = unitless().with_g2(g2);
            let (mu, nu) = p.bogoliubov(n).unwrap();
            prop_assert!(((mu * mu - nu * nu) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn omega_diff_is_additive(g2 in 1e-6f64..2.0, n in 0usize..6, m in 0usize..6, k in 0usize..6) {
            let p = unitless().with_g2(g2);
            let lhs = p.omega_diff(n, m).unwrap() + p.omega_diff(m, k).unwrap();
            let rhs = p.omega_diff(n, k).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(p.omega_diff(n.max(m).max(k), 0).unwrap().abs()));
        }

        #[test]
        fn omega_n_is_monotone_for_positive_g2(g2 in 1e-6f64..2.0, n in 0usize..10) {
            let p = unitless().with_g2(g2);
            prop_assert!(p.omega_n(n + 1).unwrap() > p.omega_n(n).unwrap());
        }

        #[test]
        fn eta_is_periodic(g1 in -1.0f64..1.0, n in 1usize..4, t in 0.0f64..50.0) {
            let p = ModelParams { g1, ..unitless() };
            let b = p.block(n).unwrap();
            let period = std::f64::consts::TAU / b.omega_n;
            prop_assert!((p.eta(&b, t + period) - p.eta(&b, t)).norm() < 1e-12);
        }

        #[test]
        fn thermal_occupation_increases_with_temperature(t in 1e-2f64..1e3, f in 1.0001f64..10.0) {
            prop_assert!(thermal_occupation(1.0, t * f, 1.0, 1.0) > thermal_occupation(1.0, t, 1.0, 1.0));
        }
    }
}
