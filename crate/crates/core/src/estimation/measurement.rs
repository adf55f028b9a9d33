//! Projective measurements and classical Fisher information.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{cis, lit, real, to_f64, Real};
use crate::state::{trace, CMatrix};

/// Outcomes with probability below this are left out of the CFI sum.
pub const PROBABILITY_FLOOR: f64 = 1e-14;
const PVM_TOL: f64 = 1e-12;

/// Projection-valued measure on the optical truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct Pvm<T: Real> {
    pub elements: Vec<CMatrix<T>>,
    pub labels: Vec<String>,
}

impl<T: Real> Pvm<T> {
    /// Checks that the elements are Hermitian idempotents summing to identity.
    pub fn new(elements: Vec<CMatrix<T>>, labels: Vec<String>) -> Result<Self> {
        if elements.is_empty() || elements.len() != labels.len() {
            return Err(Error::InvalidMeasurement("need one label per element".into()));
        }
        let dim = elements[0].nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        for (e, label) in elements.iter().zip(&labels) {
            if e.shape() != (dim, dim) {
                return Err(Error::InvalidMeasurement(format!("element '{label}' has wrong shape")));
            }
            let herm = to_f64((e - e.adjoint()).norm());
            let idem = to_f64((e * e - e).norm());
            if herm > PVM_TOL || idem > PVM_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "element '{label}' is not a projector"
                )));
            }
            sum += e;
        }
        let defect = to_f64((sum - CMatrix::identity(dim, dim)).norm());
        if defect > PVM_TOL {
            return Err(Error::InvalidMeasurement(format!(
                "elements sum to identity only within {defect:e}"
            )));
        }
        Ok(Pvm { elements, labels })
    }

    /// Photon counting: |k⟩⟨k| for every Fock level of the truncation.
    pub fn photodetection(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                let mut e = CMatrix::zeros(dim, dim);
                e[(k, k)] = real(T::one());
                e
            })
            .collect();
        let labels = (0..dim).map(|k| k.to_string()).collect();
        Pvm { elements, labels }
    }

    /// Balanced homodyne detection of X_φ = ½(σ⁻e^{iφ} + σ⁺e^{−iφ}) on the
    /// two-level subspace: projectors onto (|0⟩ ± e^{−iφ}|1⟩)/√2, labelled
    /// by the eigenvalue ±½.
    pub fn homodyne(phi: T) -> Self {
        let r = lit::<T>(FRAC_1_SQRT_2);
        let phase = cis(-phi);
        let projector = |sign: T| {
            let v = DVector::from_vec(vec![real(r), phase * (r * sign)]);
            &v * v.adjoint()
        };
        Pvm {
            elements: vec![projector(T::one()), projector(-T::one())],
            labels: vec!["+".into(), "-".into()],
        }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Re Tr[σΠ_i] for every element.
pub fn outcome_probabilities<T: Real>(sigma: &CMatrix<T>, pvm: &Pvm<T>) -> Result<Vec<T>> {
    if sigma.nrows() != pvm.dim() {
        return Err(Error::DimensionMismatch {
            expected: pvm.dim(),
            found: sigma.nrows(),
        });
    }
    Ok(pvm.elements.iter().map(|e| trace(&(sigma * e)).re).collect())
}

/// Σ_i (∂P_i)²/P_i with ∂P_i = Tr[∂σ Π_i]; outcomes below
/// [`PROBABILITY_FLOOR`] are skipped.
pub fn cfi_from_states<T: Real>(sigma: &CMatrix<T>, dsigma: &CMatrix<T>, pvm: &Pvm<T>) -> Result<T> {
    let p = outcome_probabilities(sigma, pvm)?;
    let dp = outcome_probabilities(dsigma, pvm)?;
    let floor = lit::<T>(PROBABILITY_FLOOR);
    let mut total = T::zero();
    for (i, (pi, dpi)) in p.iter().zip(&dp).enumerate() {
        if *pi < floor {
            if *dpi != T::zero() {
                log::debug!(
                    "outcome '{}' excluded: P = {:e}, contribution bounded by {:e}",
                    pvm.labels[i],
                    to_f64(*pi),
                    to_f64(*dpi * *dpi / floor)
                );
            }
            continue;
        }
        total += *dpi * *dpi / *pi;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn homodyne_zero_phase() {
        let pvm = Pvm::<f64>::homodyne(0.0);
        let rho: CMatrix<f64> = CMatrix::from_row_slice(
            2,
            2,
            &[real(0.3), Complex::new(0.2, 0.1), Complex::new(0.2, -0.1), real(0.7)],
        );
        let p = outcome_probabilities(&rho, &pvm).unwrap();
        let expected = 0.5 * (1.0 + (rho[(0, 1)] + rho[(1, 0)]).re);
        assert!((p[0] - expected).abs() < 1e-15);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn homodyne_pi_swaps_outcomes() {
        let a = Pvm::<f64>::homodyne(0.0);
        let b = Pvm::<f64>::homodyne(std::f64::consts::PI);
        assert!((&a.elements[0] - &b.elements[1]).norm() < 1e-15);
        assert!((&a.elements[1] - &b.elements[0]).norm() < 1e-15);
    }

    #[test]
    fn homodyne_is_a_valid_pvm() {
        for k in 0..12 {
            let phi = k as f64 * 0.55;
            let pvm = Pvm::<f64>::homodyne(phi);
            assert!(Pvm::new(pvm.elements.clone(), pvm.labels.clone()).is_ok());
            // eigenvectors of X_φ with eigenvalues ±½
            let x = CMatrix::from_row_slice(
                2,
                2,
                &[
                    real(0.0),
                    Complex::from_polar(0.5, phi),
                    Complex::from_polar(0.5, -phi),
                    real(0.0),
                ],
            );
            let xp = &x * &pvm.elements[0];
            assert!((xp - &pvm.elements[0] * Complex::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_projectors() {
        let bad = CMatrix::<f64>::identity(2, 2) * Complex::new(0.5, 0.0);
        assert!(Pvm::new(vec![bad.clone(), bad], vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn cfi_relabelling_and_zero_projectors() {
        let rho: CMatrix<f64> = CMatrix::from_row_slice(
            2,
            2,
            &[real(0.4), Complex::new(0.1, 0.3), Complex::new(0.1, -0.3), real(0.6)],
        );
        let d = CMatrix::from_row_slice(
            2,
            2,
            &[real(0.0), Complex::new(0.7, -0.2), Complex::new(0.7, 0.2), real(0.0)],
        );
        let pvm = Pvm::homodyne(0.3);
        let base: f64 = cfi_from_states(&rho, &d, &pvm).unwrap();
        let swapped = Pvm {
            elements: vec![pvm.elements[1].clone(), pvm.elements[0].clone(), CMatrix::zeros(2, 2)],
            labels: vec!["-".into(), "+".into(), "none".into()],
        };
        assert!((cfi_from_states(&rho, &d, &swapped).unwrap() - base).abs() < 1e-15);
        let photo = Pvm::photodetection(2);
        assert_eq!(cfi_from_states(&rho, &d, &photo).unwrap(), 0.0);
    }
}
