//! Fisher-information sweeps over time, homodyne phase and temperature.

use rayon::prelude::*;

use super::{cfi_from_states, d_sigma_dg2, qfi, DerivativeStep, Pvm, StateDerivative};
use crate::error::Result;
use crate::model::ModelParams;
use crate::scalar::{to_f64, Real};
use crate::state::InitialOpticalState;

#[derive(Clone, Debug, PartialEq)]
pub struct FisherRecord<T> {
    pub t: T,
    pub g2: T,
    /// Absolute finite-difference step in g₂.
    pub step: T,
    pub qfi: T,
    pub cfi_photodetection: T,
    /// Homodyne CFI at `phi`; only defined for two-level states.
    pub cfi_bhd: Option<T>,
    pub phi: T,
    pub n_th: T,
    pub temperature: Option<T>,
}

/// A grid point that could not be evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepFailure {
    pub index: usize,
    pub coordinate: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome<T> {
    pub records: Vec<FisherRecord<T>>,
    pub failures: Vec<SweepFailure>,
}

impl<T> SweepOutcome<T> {
    fn collect(points: Vec<(usize, f64, Result<FisherRecord<T>>)>) -> Self {
        let mut records = Vec::new();
        let mut failures = Vec::new();
        for (index, coordinate, r) in points {
            match r {
                Ok(rec) => records.push(rec),
                Err(e) => {
                    log::warn!("sweep point {index} ({coordinate:e}) failed: {e}");
                    failures.push(SweepFailure {
                        index,
                        coordinate,
                        message: e.to_string(),
                    });
                }
            }
        }
        SweepOutcome { records, failures }
    }
}

fn record<T: Real>(params: &ModelParams<T>, d: &StateDerivative<T>, phi: T) -> Result<FisherRecord<T>> {
    let sigma = &d.state.coeffs;
    let dim = sigma.nrows();
    let q = qfi(sigma, &d.derivative)?;
    let photo = cfi_from_states(sigma, &d.derivative, &Pvm::photodetection(dim))?;
    let bhd = if dim == 2 {
        Some(cfi_from_states(sigma, &d.derivative, &Pvm::homodyne(phi))?)
    } else {
        None
    };
    Ok(FisherRecord {
        t: d.state.time,
        g2: params.g2,
        step: d.step,
        qfi: q,
        cfi_photodetection: photo,
        cfi_bhd: bhd,
        phi,
        n_th: params.n_th,
        temperature: params.temperature,
    })
}

/// QFI and CFIs at a single time.
pub fn fisher_at<T: Real>(
    params: &ModelParams<T>,
    sigma0: &InitialOpticalState<T>,
    t: T,
    phi: T,
    step: DerivativeStep<T>,
) -> Result<FisherRecord<T>> {
    let d = d_sigma_dg2(params, sigma0, t, step)?;
    record(params, &d, phi)
}

pub fn sweep_time<T: Real>(
    params: &ModelParams<T>,
    sigma0: &InitialOpticalState<T>,
    times: &[T],
    phi: T,
    step: DerivativeStep<T>,
) -> SweepOutcome<T> {
    let points = times
        .par_iter()
        .enumerate()
        .map(|(i, &t)| (i, to_f64(t), fisher_at(params, sigma0, t, phi, step)))
        .collect();
    SweepOutcome::collect(points)
}

/// Homodyne phase sweep at fixed `t`; the state and its derivative are
/// computed once.
pub fn sweep_phase<T: Real>(
    params: &ModelParams<T>,
    sigma0: &InitialOpticalState<T>,
    t: T,
    phis: &[T],
    step: DerivativeStep<T>,
) -> SweepOutcome<T> {
    let d = match d_sigma_dg2(params, sigma0, t, step) {
        Ok(d) => d,
        Err(e) => {
            let message = e.to_string();
            let failures = phis
                .iter()
                .enumerate()
                .map(|(index, &phi)| SweepFailure {
                    index,
                    coordinate: to_f64(phi),
                    message: message.clone(),
                })
                .collect();
            return SweepOutcome {
                records: Vec::new(),
                failures,
            };
        }
    };
    let points = phis
        .iter()
        .enumerate()
        .map(|(i, &phi)| (i, to_f64(phi), record(params, &d, phi)))
        .collect();
    SweepOutcome::collect(points)
}

/// QFI against temperature at fixed `t`; each temperature sets n_th through
/// the Bose occupation.
pub fn sweep_temperature<T: Real>(
    params: &ModelParams<T>,
    sigma0: &InitialOpticalState<T>,
    t: T,
    temperatures: &[T],
    phi: T,
    step: DerivativeStep<T>,
) -> SweepOutcome<T> {
    let points = temperatures
        .par_iter()
        .enumerate()
        .map(|(i, &temp)| {
            let p = params.with_temperature(temp);
            (i, to_f64(temp), fisher_at(&p, sigma0, t, phi, step))
        })
        .collect();
    SweepOutcome::collect(points)
}
