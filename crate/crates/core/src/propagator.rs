//! Closed-form reduced optical dynamics.
//!
//! Tracing out the mechanics turns every coefficient `a_nm(t)` into an
//! eight-dimensional real Gaussian integral over the coherent-state labels of
//! the thermal P-function and of the three resolutions of identity. The
//! integrand is `exp(−½ xᵀAx + Bᵀx + c)` with
//! `x = (Re α, Im α, Re β, Im β, Re δ, Im δ, Re γ, Im γ)`.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BlockQuantities, ModelParams};
use crate::oracle::TruncatedOracle;
use crate::scalar::{cabs, cexp, csqrt, imag, lit, real, to_f64, Real};
use crate::state::{CMatrix, InitialOpticalState, OpticalState};

pub type Mat8<T> = SMatrix<Complex<T>, 8, 8>;
pub type Vec8<T> = SVector<Complex<T>, 8>;

/// Below this occupation the thermal P-function is too narrow for the closed
/// form and [`evolve`] switches to the truncated-Fock evolution.
pub const CLOSED_FORM_MIN_NTH: f64 = 1e-6;
/// Mechanical truncation used on the low-occupation path.
pub const LOW_NTH_NMECH: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm<T: Real> {
    pub a: Mat8<T>,
    pub b: Vec8<T>,
    pub c: Complex<T>,
    /// State-independent prefactor e^{−i(Φ_n−Φ_m)} / (π⁴ n_th μ_n μ_m).
    pub prefactor: Complex<T>,
}

impl<T: Real> QuadForm<T> {
    /// Integral times prefactor: a_nm(t) / a_nm(0).
    pub fn coherence(&self) -> Result<Complex<T>> {
        Ok(self.prefactor * gaussian_integral(&self.a, &self.b, self.c)?)
    }
}

/// Assembles A = 2I₈ + M, B and c for the block pair (n, m) at time `t`.
pub fn build_quadform<T: Real>(
    params: &ModelParams<T>,
    bn: &BlockQuantities<T>,
    bm: &BlockQuantities<T>,
    t: T,
) -> Result<QuadForm<T>> {
    if !(params.n_th > T::zero()) {
        return Err(Error::InvalidParameter("closed form requires n_th > 0".into()));
    }
    let one = T::one();
    let two = lit::<T>(2.0);
    let i = imag(one);
    let re = |x: T| real(x);

    let kn = bn.squeeze_ratio();
    let km = bm.squeeze_ratio();
    let fp = re(kn + km);
    let fm = re(kn - km);
    let inv_mn = re(one / bn.mu);
    let inv_mm = re(one / bm.mu);
    let kn = re(kn);
    let km = re(km);
    // e_n = e^{−iΩ_n t}, e_m = e^{+iΩ_m t}
    let en = params.rotation(bn, t);
    let em = params.rotation(bm, t).conj();
    let en2 = en * en;
    let em2 = em * em;
    let c1 = re(one);
    let z = re(T::zero());
    let th = re(two / params.n_th);

    #[rustfmt::skip]
    let m = Mat8::from_row_slice(&[
        th + fp, i * fm, -inv_mn, i * inv_mn, z, z, -inv_mm, -i * inv_mm,
        i * fm, th - fp, -i * inv_mn, -inv_mn, z, z, i * inv_mm, -inv_mm,
        -inv_mn, -i * inv_mn, -kn * (c1 + en2), i * kn * (c1 - en2), -en * inv_mn, i * en * inv_mn, z, z,
        i * inv_mn, -inv_mn, i * kn * (c1 - en2), kn * (c1 + en2), -i * en * inv_mn, -en * inv_mn, z, z,
        z, z, -en * inv_mn, -i * en * inv_mn, fp, -i * fm, -em * inv_mm, i * em * inv_mm,
        z, z, i * en * inv_mn, -en * inv_mn, -i * fm, -fp, -i * em * inv_mm, -em * inv_mm,
        -inv_mm, i * inv_mm, z, z, -em * inv_mm, -i * em * inv_mm, -km * (c1 + em2), i * km * (em2 - c1),
        -i * inv_mm, -inv_mm, z, z, i * em * inv_mm, -em * inv_mm, i * km * (em2 - c1), km * (c1 + em2),
    ]);
    let a = Mat8::identity() * re(two) + m;

    let eta_n = params.eta(bn, t);
    let eta_m = params.eta(bm, t);
    let rn = en;
    let rm_bar = em;
    let u = -eta_n.conj() * rn + kn * eta_n * rn;
    let w = -eta_m * rm_bar + km * eta_m.conj() * rm_bar;
    let b = Vec8::from_column_slice(&[
        z,
        z,
        u,
        i * u,
        eta_n * inv_mn + eta_m.conj() * inv_mm,
        -i * eta_n * inv_mn + i * eta_m.conj() * inv_mm,
        w,
        -i * w,
    ]);
    let half = re(lit(0.5));
    let c = -half * (re(eta_n.norm_sqr() + eta_m.norm_sqr()) - km * eta_m.conj() * eta_m.conj() - kn * eta_n * eta_n);

    let denom = T::pi().powi(4) * params.n_th * bn.mu * bm.mu;
    let prefactor = params.phase_factor_diff(bn, bm, t)? / re(denom);
    Ok(QuadForm { a, b, c, prefactor })
}

/// ∫ d⁸x exp(−½ xᵀAx + Bᵀx + c) = (2π)⁴ det(A)^{−1/2} exp(½ BᵀA⁻¹B + c).
///
/// Only the symmetric part of `A` enters the integral. Writing it as R + iS
/// with R = LLᵀ positive definite, det A = det R · Π(1 + iκ_j) where κ_j are
/// the eigenvalues of L⁻¹SL⁻ᵀ; taking the principal root factor by factor
/// gives the branch connected to the real case, so no tracking in time is
/// needed.
pub fn gaussian_integral<T: Real>(a: &Mat8<T>, b: &Vec8<T>, c: Complex<T>) -> Result<Complex<T>> {
    let half = lit::<T>(0.5);
    let sym = (a + a.transpose()) * real(half);
    let r = sym.map(|z| z.re);
    let s = sym.map(|z| z.im);
    let chol = r.cholesky().ok_or(Error::NonConvergentGaussian)?;
    let l = chol.l();
    let l_inv = l.try_inverse().ok_or(Error::NonConvergentGaussian)?;
    let k = l_inv * s * l_inv.transpose();
    let k = (k + k.transpose()) * half;
    let kappa = k.symmetric_eigenvalues();

    let mut sqrt_det = real(l.diagonal().iter().fold(T::one(), |acc, &d| acc * d));
    for &kj in kappa.iter() {
        sqrt_det *= csqrt(Complex::new(T::one(), kj));
    }
    if !(cabs(sqrt_det) > T::min_value().unwrap_or(T::zero())) {
        return Err(Error::SingularA);
    }
    let x = sym.lu().solve(b).ok_or(Error::SingularA)?;
    let quad = b.dot(&x);
    let norm = T::two_pi().powi(4);
    let value = cexp(quad * real(half) + c) * real(norm) / sqrt_det;
    if !crate::scalar::is_finite(value.re) || !crate::scalar::is_finite(value.im) {
        return Err(Error::SingularA);
    }
    Ok(value)
}

/// a_nm(t) / a_nm(0) from the closed form.
pub fn coherence_factor<T: Real>(params: &ModelParams<T>, n: usize, m: usize, t: T) -> Result<Complex<T>> {
    let bn = params.block(n)?;
    let bm = params.block(m)?;
    build_quadform(params, &bn, &bm, t)?.coherence()
}

/// a_nm(t) for the given initial state.
pub fn coefficient<T: Real>(
    params: &ModelParams<T>,
    sigma0: &InitialOpticalState<T>,
    n: usize,
    m: usize,
    t: T,
) -> Result<Complex<T>> {
    check_index(sigma0, n.max(m))?;
    let a0 = sigma0.get(n, m);
    if a0 == real(T::zero()) {
        return Ok(a0);
    }
    Ok(a0 * coherence_factor(params, n, m, t)?)
}

fn check_index<T: Real>(sigma0: &InitialOpticalState<T>, k: usize) -> Result<()> {
    if k >= sigma0.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma0.dim(),
            found: k + 1,
        });
    }
    Ok(())
}

/// Whether `params` is handled by the closed form (otherwise by the
/// truncated-Fock evolution).
pub fn uses_closed_form<T: Real>(params: &ModelParams<T>) -> bool {
    to_f64(params.n_th) > CLOSED_FORM_MIN_NTH
}

/// Reduced optical state at time `t`.
pub fn evolve<T: Real>(params: &ModelParams<T>, sigma0: &InitialOpticalState<T>, t: T) -> Result<OpticalState<T>> {
    let dim = sigma0.dim();
    params.validate_blocks(dim - 1)?;
    if !uses_closed_form(params) {
        log::debug!("n_th = {} below closed-form floor; using Fock evolution", params.n_th);
        let oracle = TruncatedOracle::new(params, dim, LOW_NTH_NMECH)?;
        return oracle.reduced_state(sigma0, t);
    }
    let blocks = (0..dim).map(|n| params.block(n)).collect::<Result<Vec<_>>>()?;
    let mut coeffs = CMatrix::zeros(dim, dim);
    for n in 0..dim {
        for m in 0..=n {
            let a0 = sigma0.get(n, m);
            if a0 == real(T::zero()) {
                continue;
            }
            if n == m {
                // each block evolves unitarily, so populations are exact
                coeffs[(n, n)] = a0;
                continue;
            }
            let value = a0 * build_quadform(params, &blocks[n], &blocks[m], t)?.coherence()?;
            coeffs[(n, m)] = value;
            coeffs[(m, n)] = value.conj();
        }
    }
    Ok(OpticalState { time: t, coeffs })
}

/// [`evolve`] over a time grid, in parallel; output order follows `times`.
pub fn evolve_series<T: Real>(
    params: &ModelParams<T>,
    sigma0: &InitialOpticalState<T>,
    times: &[T],
) -> Result<Vec<OpticalState<T>>> {
    if !uses_closed_form(params) {
        let dim = sigma0.dim();
        params.validate_blocks(dim - 1)?;
        let oracle = TruncatedOracle::new(params, dim, LOW_NTH_NMECH)?;
        return times.par_iter().map(|&t| oracle.reduced_state(sigma0, t)).collect();
    }
    times.par_iter().map(|&t| evolve(params, sigma0, t)).collect()
}
