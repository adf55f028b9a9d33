#![allow(dead_code)]

use num_complex::Complex;
use optomech::CMatrix;
use rand::Rng;

pub type C = Complex<f64>;

/// Random 2×2 density matrix with Bloch radius in [r_min, r_max].
pub fn random_state<R: Rng>(rng: &mut R, r_min: f64, r_max: f64) -> CMatrix<f64> {
    let r = rng.gen_range(r_min..r_max);
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    let (x, y, z) = (r * s * phi.cos(), r * s * phi.sin(), r * z);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C::new(0.5 * (1.0 + z), 0.0),
            C::new(0.5 * x, -0.5 * y),
            C::new(0.5 * x, 0.5 * y),
            C::new(0.5 * (1.0 - z), 0.0),
        ],
    )
}

/// Random traceless Hermitian matrix.
pub fn random_tangent<R: Rng>(rng: &mut R, dim: usize) -> CMatrix<f64> {
    let mut m = CMatrix::from_fn(dim, dim, |_, _| {
        C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    m = (&m + m.adjoint()) * C::new(0.5, 0.0);
    let tr = m.trace() / C::new(dim as f64, 0.0);
    for k in 0..dim {
        m[(k, k)] -= tr;
    }
    m
}

/// Random full-rank density matrix of any dimension.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> CMatrix<f64> {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let mut m = &g * g.adjoint() + CMatrix::identity(dim, dim) * C::new(0.05, 0.0);
    let tr = m.trace();
    m /= tr;
    m
}
pub mod quadrature;
