//! Fisher information for the quadratic coupling g₂.

mod measurement;
mod sld;
mod sweep;

pub use measurement::{cfi_from_states, outcome_probabilities, Pvm, PROBABILITY_FLOOR};
pub use sld::{qfi, qfi_2x2, sld};
pub use sweep::{fisher_at, sweep_phase, sweep_temperature, sweep_time, FisherRecord, SweepFailure, SweepOutcome};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::propagator::evolve;
use crate::scalar::{lit, to_f64, Real};
use crate::state::{hermitize, CMatrix, InitialOpticalState, OpticalState};

/// Relative central-difference step for ∂/∂g₂.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeStep<T> {
    /// Chosen from n_th and the number of elapsed slow periods; see
    /// [`default_relative_step`].
    Auto,
    Relative(T),
}

/// Coupling scale used for the step when g₂ = 0: 1e-6 · mΩ²/ħ, i.e. a
/// relative shift of Ω² of order one part per million.
pub fn g2_scale<T: Real>(params: &ModelParams<T>) -> T {
    lit::<T>(1e-6) * params.mass * params.omega * params.omega / params.hbar
}

/// 1e-4 / (max(1, n_th) · max(1, tΔ/2π)).
///
/// The g₂ dependence of the state enters through phases ~ n_th·Δ·t, so the
/// step shrinks as those grow to keep the difference in the quadratic regime.
pub fn default_relative_step<T: Real>(params: &ModelParams<T>, t: T) -> T {
    let periods = match params.beat_frequency() {
        Ok(d) => (d * t / T::two_pi()).abs(),
        Err(_) => T::zero(),
    };
    lit::<T>(1e-4) / (params.n_th.max(T::one()) * periods.max(T::one()))
}

/// Absolute step h = step · max(|g₂|, g₂ scale).
pub fn absolute_step<T: Real>(params: &ModelParams<T>, t: T, step: DerivativeStep<T>) -> Result<T> {
    let rel = match step {
        DerivativeStep::Auto => default_relative_step(params, t),
        DerivativeStep::Relative(r) => r,
    };
    if !(rel > T::zero()) || !crate::scalar::is_finite(rel) {
        return Err(Error::InvalidParameter(format!(
            "derivative step must be positive, got {rel}"
        )));
    }
    Ok(rel * params.g2.abs().max(g2_scale(params)))
}

/// σ(t) together with ∂σ/∂g₂ and the absolute step used.
#[derive(Clone, Debug)]
pub struct StateDerivative<T: Real> {
    pub state: OpticalState<T>,
    pub derivative: CMatrix<T>,
    pub step: T,
}

/// Central difference [σ(g₂+h) − σ(g₂−h)]/2h, Hermitized.
pub fn d_sigma_dg2<T: Real>(
    params: &ModelParams<T>,
    sigma0: &InitialOpticalState<T>,
    t: T,
    step: DerivativeStep<T>,
) -> Result<StateDerivative<T>> {
    let h = absolute_step(params, t, step)?;
    let plus = evolve(&params.with_g2(params.g2 + h), sigma0, t)?;
    let minus = evolve(&params.with_g2(params.g2 - h), sigma0, t)?;
    let state = evolve(params, sigma0, t)?;
    let diff = (plus.coeffs - minus.coeffs) / num_complex::Complex::new(lit::<T>(2.0) * h, T::zero());
    log::trace!("d sigma / d g2 at t = {t}: h = {:e}", to_f64(h));
    Ok(StateDerivative {
        state,
        derivative: hermitize(&diff),
        step: h,
    })
}
