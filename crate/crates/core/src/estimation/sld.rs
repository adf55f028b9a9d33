//! Symmetric logarithmic derivative and quantum Fisher information.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cabs2, lit, real, to_f64, Real};
use crate::state::{hermitize, min_eigenvalue, trace, CMatrix};

const PSD_TOL: f64 = 1e-8;
/// Eigenvalue pairs with λ_j + λ_k below this fraction of the trace are
/// outside the support and get a zero SLD entry.
const SUPPORT_TOL: f64 = 1e-12;
const INVERTIBLE_TOL: f64 = 1e-10;

struct Eigen<T: Real> {
    values: Vec<T>,
    vectors: CMatrix<T>,
}

fn check_shapes<T: Real>(sigma: &CMatrix<T>, dsigma: &CMatrix<T>) -> Result<()> {
    if !sigma.is_square() {
        return Err(Error::NotADensityMatrix("matrix is not square".into()));
    }
    if dsigma.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch {
            expected: sigma.nrows(),
            found: dsigma.nrows(),
        });
    }
    Ok(())
}

fn eigen<T: Real>(sigma: &CMatrix<T>) -> Result<Eigen<T>> {
    let eig = hermitize(sigma).symmetric_eigen();
    let values: Vec<T> = eig.eigenvalues.iter().copied().collect();
    let min = values.iter().fold(f64::INFINITY, |a, &v| a.min(to_f64(v)));
    if min < -PSD_TOL {
        return Err(Error::NotADensityMatrix(format!("negative eigenvalue {min:e}")));
    }
    Ok(Eigen {
        values,
        vectors: eig.eigenvectors,
    })
}

/// ∂σ in the eigenbasis of σ, with the support threshold.
fn rotated<T: Real>(sigma: &CMatrix<T>, dsigma: &CMatrix<T>) -> Result<(Eigen<T>, CMatrix<T>, T)> {
    check_shapes(sigma, dsigma)?;
    let e = eigen(sigma)?;
    let d = e.vectors.adjoint() * hermitize(dsigma) * &e.vectors;
    let eps = lit::<T>(SUPPORT_TOL) * trace(sigma).re.abs();
    Ok((e, d, eps))
}

/// L with ∂σ = ½(Lσ + σL), from L_jk = 2(∂σ)_jk/(λ_j + λ_k) in the eigenbasis.
pub fn sld<T: Real>(sigma: &CMatrix<T>, dsigma: &CMatrix<T>) -> Result<CMatrix<T>> {
    let (e, d, eps) = rotated(sigma, dsigma)?;
    let dim = sigma.nrows();
    let two = lit::<T>(2.0);
    let l = CMatrix::from_fn(dim, dim, |j, k| {
        let s = e.values[j] + e.values[k];
        if s > eps {
            d[(j, k)] * real(two / s)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    Ok(hermitize(&(&e.vectors * l * e.vectors.adjoint())))
}

/// Tr[σL²] = Σ_jk 2|(∂σ)_jk|²/(λ_j + λ_k).
pub fn qfi<T: Real>(sigma: &CMatrix<T>, dsigma: &CMatrix<T>) -> Result<T> {
    let (e, d, eps) = rotated(sigma, dsigma)?;
    let dim = sigma.nrows();
    let two = lit::<T>(2.0);
    let mut total = T::zero();
    for j in 0..dim {
        for k in 0..dim {
            let s = e.values[j] + e.values[k];
            if s > eps {
                total += two * cabs2(d[(j, k)]) / s;
            }
        }
    }
    Ok(total)
}

/// Two-level closed form: L = 2∂σ − ½(∂𝒫)σ⁻¹ with ∂𝒫 = 2Tr[σ∂σ].
pub fn qfi_2x2<T: Real>(sigma: &CMatrix<T>, dsigma: &CMatrix<T>) -> Result<T> {
    check_shapes(sigma, dsigma)?;
    if sigma.nrows() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: sigma.nrows(),
        });
    }
    let sigma = hermitize(sigma);
    let dsigma = hermitize(dsigma);
    let min = min_eigenvalue(&sigma);
    if !(to_f64(min) > INVERTIBLE_TOL) {
        return Err(Error::SingularState(to_f64(min)));
    }
    let inv = sigma.clone().try_inverse().ok_or(Error::SingularState(to_f64(min)))?;
    let dp = trace(&(&sigma * &dsigma)) * real(lit::<T>(2.0));
    let l = &dsigma * real(lit::<T>(2.0)) - inv * (dp * real(lit::<T>(0.5)));
    Ok(trace(&(&sigma * &l * &l)).re)
}
