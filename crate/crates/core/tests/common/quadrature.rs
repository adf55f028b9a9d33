//! Tensor Gauss–Hermite quadrature in eight dimensions, used as an
//! independent check on the closed-form Gaussian integral.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rand::Rng;

type C = Complex<f64>;

/// Nodes and weights for ∫ e^{−x²} f(x) dx (Golub–Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            (
                eig.eigenvalues[k],
                std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, k)].powi(2),
            )
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// A well-conditioned random instance near A = 2I.
pub struct Instance {
    pub a: [[C; 8]; 8],
    pub b: [C; 8],
    pub c: C,
}

#[allow(clippy::needless_range_loop)]
pub fn random_instance<R: Rng>(rng: &mut R, spread: f64) -> Instance {
    let mut a = [[C::new(0.0, 0.0); 8]; 8];
    for i in 0..8 {
        for j in 0..=i {
            let z = C::new(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread));
            a[i][j] = z;
            a[j][i] = z;
        }
        a[i][i] += C::new(2.0, 0.0);
    }
    let b = std::array::from_fn(|_| C::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)));
    let c = C::new(rng.gen_range(-0.5..0.5), rng.gen_range(-3.0..3.0));
    Instance { a, b, c }
}

/// ∫ exp(−½xᵀAx + Bᵀx + c) d⁸x with `n` nodes per axis; the e^{−|x|²}
/// part of 2I is taken as the weight.
pub fn integrate(inst: &Instance, n: usize) -> C {
    let (x, w) = gauss_hermite(n);
    let mut e = inst.a;
    for (i, row) in e.iter_mut().enumerate() {
        row[i] -= C::new(2.0, 0.0);
    }
    let total: C = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..n)
            .map(|i0| {
                let (x, w, e) = (&x, &w, &e);
                scope.spawn(move || {
                    let mut pts = [0.0; 8];
                    pts[0] = x[i0];
                    let expo = inst.b[0] * x[i0] - e[0][0] * (0.5 * x[i0] * x[i0]);
                    level(1, &mut pts, expo, w[i0], x, w, e, &inst.b)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).sum()
    });
    total * inst.c.exp()
}

#[allow(clippy::too_many_arguments)]
fn level(d: usize, pts: &mut [f64; 8], expo: C, weight: f64, x: &[f64], w: &[f64], e: &[[C; 8]; 8], b: &[C; 8]) -> C {
    if d == 8 {
        return expo.exp() * weight;
    }
    let mut cross = C::new(0.0, 0.0);
    for j in 0..d {
        cross += e[d][j] * pts[j];
    }
    let mut acc = C::new(0.0, 0.0);
    for (k, &xk) in x.iter().enumerate() {
        pts[d] = xk;
        let add = (b[d] - cross) * xk - e[d][d] * (0.5 * xk * xk);
        acc += level(d + 1, pts, expo + add, weight * w[k], x, w, e, b);
    }
    acc
}
