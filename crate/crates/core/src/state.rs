//! Optical density matrices on a truncated Fock basis.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs, cabs2, lit, real, to_f64, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;

/// Tolerance on trace and Hermiticity when accepting a user matrix.
const ACCEPT_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for an initial state.
const PSD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Mixed,
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::Pure => "pure",
            StateKind::Mixed => "mixed",
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pure" => Ok(StateKind::Pure),
            "mixed" => Ok(StateKind::Mixed),
            other => Err(Error::Config(format!(
                "unknown state '{other}' (expected pure or mixed)"
            ))),
        }
    }
}

/// Optical density matrix at t = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialOpticalState<T: Real> {
    coeffs: CMatrix<T>,
}

impl<T: Real> InitialOpticalState<T> {
    /// |ψ_s⟩ = √s|0⟩ + √(1−s)|1⟩
    pub fn pure(s: T) -> Result<Self> {
        check_s(s)?;
        let a = s.sqrt();
        let b = (T::one() - s).sqrt();
        let coeffs = CMatrix::from_row_slice(2, 2, &[real(a * a), real(a * b), real(a * b), real(b * b)]);
        Ok(InitialOpticalState { coeffs })
    }

    /// ½|ψ_s⟩⟨ψ_s| + ½|ψ_{1−s}⟩⟨ψ_{1−s}|
    pub fn mixed(s: T) -> Result<Self> {
        check_s(s)?;
        let half = lit::<T>(0.5);
        let off = (s * (T::one() - s)).sqrt();
        let coeffs = CMatrix::from_row_slice(2, 2, &[real(half), real(off), real(off), real(half)]);
        Ok(InitialOpticalState { coeffs })
    }

    pub fn two_level(kind: StateKind, s: T) -> Result<Self> {
        match kind {
            StateKind::Pure => Self::pure(s),
            StateKind::Mixed => Self::mixed(s),
        }
    }

    /// Accepts any Hermitian, unit-trace, positive semidefinite matrix.
    pub fn from_matrix(coeffs: CMatrix<T>) -> Result<Self> {
        if !coeffs.is_square() || coeffs.nrows() == 0 {
            return Err(Error::NotADensityMatrix(format!(
                "shape {}x{} is not square",
                coeffs.nrows(),
                coeffs.ncols()
            )));
        }
        let tr = trace(&coeffs);
        if (to_f64(tr.re) - 1.0).abs() > ACCEPT_TOL || to_f64(tr.im).abs() > ACCEPT_TOL {
            return Err(Error::NotADensityMatrix(format!("trace is {tr}")));
        }
        let herm = to_f64(hermiticity_defect(&coeffs));
        if herm > ACCEPT_TOL {
            return Err(Error::NotADensityMatrix(format!("not Hermitian (defect {herm:e})")));
        }
        let min = to_f64(min_eigenvalue(&coeffs));
        if min < -PSD_TOL {
            return Err(Error::NotADensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(InitialOpticalState { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn coeffs(&self) -> &CMatrix<T> {
        &self.coeffs
    }

    pub fn get(&self, n: usize, m: usize) -> Complex<T> {
        self.coeffs[(n, m)]
    }
}

fn check_s<T: Real>(s: T) -> Result<()> {
    if s >= T::zero() && s <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("s must lie in [0, 1], got {s}")))
    }
}

/// Reduced optical state at time `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalState<T: Real> {
    pub time: T,
    pub coeffs: CMatrix<T>,
}

impl<T: Real> OpticalState<T> {
    pub fn dim(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn get(&self, n: usize, m: usize) -> Complex<T> {
        self.coeffs[(n, m)]
    }

    /// Bloch coordinates with r_x + i r_y = 2a₁₀ and r_z = a₀₀ − a₁₁.
    pub fn bloch(&self) -> Result<[T; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let two = lit::<T>(2.0);
        let a10 = self.coeffs[(1, 0)];
        Ok([
            two * a10.re,
            two * a10.im,
            self.coeffs[(0, 0)].re - self.coeffs[(1, 1)].re,
        ])
    }

    /// Tr σ² = Σ|a_nm|².
    pub fn purity(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, z| acc + cabs2(*z))
    }

    pub fn trace(&self) -> Complex<T> {
        trace(&self.coeffs)
    }

    pub fn min_eigenvalue(&self) -> T {
        min_eigenvalue(&self.coeffs)
    }

    pub fn hermiticity_defect(&self) -> T {
        hermiticity_defect(&self.coeffs)
    }
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.diagonal()
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |a, z| a + z)
}

/// max |a_nm − conj(a_mn)|
pub fn hermiticity_defect<T: Real>(m: &CMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max(cabs(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    worst
}

/// (M + M†)/2
pub fn hermitize<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()) * real(lit::<T>(0.5))
}

pub fn min_eigenvalue<T: Real>(m: &CMatrix<T>) -> T {
    hermitize(m)
        .symmetric_eigenvalues()
        .iter()
        .fold(T::max_value().unwrap_or(T::one()), |a, &v| a.min(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    #[test]
    fn pure_state_bloch_and_purity() {
        let s = InitialOpticalState::pure(0.2).unwrap();
        let st = OpticalState {
            time: 0.0,
            coeffs: s.coeffs().clone(),
        };
        let [x, y, z] = st.bloch().unwrap();
        assert!(close(x, 0.8) && close(y, 0.0) && close(z, -0.6));
        assert!(close(st.purity(), 1.0));
    }

    #[test]
    fn mixed_state_bloch_and_purity() {
        let s = InitialOpticalState::mixed(0.2).unwrap();
        // direct construction from the two pure components
        let direct = (InitialOpticalState::pure(0.2).unwrap().coeffs()
            + InitialOpticalState::pure(0.8).unwrap().coeffs())
            * Complex::new(0.5, 0.0);
        assert!((&direct - s.coeffs()).norm() < 1e-15);
        let st = OpticalState {
            time: 0.0,
            coeffs: s.coeffs().clone(),
        };
        let [x, y, z] = st.bloch().unwrap();
        assert!(close(x, 0.8) && close(y, 0.0) && close(z, 0.0));
        assert!(close(st.purity(), 0.82));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(InitialOpticalState::pure(1.5).is_err());
        let not_psd = CMatrix::from_row_slice(2, 2, &[real(0.5), real(0.9), real(0.9), real(0.5)]);
        assert!(matches!(
            InitialOpticalState::from_matrix(not_psd),
            Err(Error::NotADensityMatrix(_))
        ));
        let bad_trace = CMatrix::<f64>::identity(2, 2);
        assert!(InitialOpticalState::from_matrix(bad_trace).is_err());
        let non_herm = CMatrix::from_row_slice(
            2,
            2,
            &[real(0.5), Complex::new(0.1, 0.1), Complex::new(0.1, 0.1), real(0.5)],
        );
        assert!(InitialOpticalState::from_matrix(non_herm).is_err());
    }

    #[test]
    fn bloch_requires_two_levels() {
        let st = OpticalState {
            time: 0.0,
            coeffs: CMatrix::<f64>::identity(3, 3),
        };
        assert!(matches!(
            st.bloch(),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }
}
