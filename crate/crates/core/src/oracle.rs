//! Brute-force evolution of the joint optomechanical state in a truncated
//! mechanical Fock basis.
//!
//! Independent of the closed form: the block Hamiltonians are diagonalized
//! once and the thermal state is an explicit Fock mixture. Only practical for
//! small thermal occupations.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::scalar::{cabs2, cis, from_usize, lit, real, to_f64, Real};
use crate::state::{CMatrix, InitialOpticalState, OpticalState};

/// Thermal weight allowed beyond the cutoff.
pub const THERMAL_TAIL_TOL: f64 = 1e-10;
/// Population allowed in the top 10 % of mechanical levels.
pub const LEAKAGE_TOL: f64 = 1e-8;

/// H_n/ħ − nω_c in the bare Fock basis: Ω(b†b + ½) + g₂n x² + g₁n x with
/// x = √(ħ/2mΩ)(b + b†). The (b + b†)² elements are taken from the operator
/// identity, not from squaring the truncated matrix, so the top level is exact.
fn block_generator<T: Real>(params: &ModelParams<T>, n: usize, n_mech: usize) -> DMatrix<T> {
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let x0 = (params.hbar / (two * params.mass * params.omega)).sqrt();
    let quad = params.g2 * from_usize::<T>(n) * x0 * x0;
    let lin = params.g1 * from_usize::<T>(n) * x0;
    let mut h = DMatrix::zeros(n_mech, n_mech);
    for k in 0..n_mech {
        let kf = from_usize::<T>(k);
        h[(k, k)] = params.omega * (kf + half) + quad * (two * kf + T::one());
        if k + 1 < n_mech {
            let s = from_usize::<T>(k + 1).sqrt();
            h[(k, k + 1)] = lin * s;
            h[(k + 1, k)] = lin * s;
        }
        if k + 2 < n_mech {
            let s = (from_usize::<T>(k + 1) * from_usize::<T>(k + 2)).sqrt();
            h[(k, k + 2)] = quad * s;
            h[(k + 2, k)] = quad * s;
        }
    }
    h
}

/// Matrix of H_n (energy units) on the first `n_mech` mechanical Fock states.
pub fn block_hamiltonian<T: Real>(params: &ModelParams<T>, n: usize, n_mech: usize) -> Result<DMatrix<T>> {
    if n_mech < 2 {
        return Err(Error::TruncationTooSmall(format!("n_mech = {n_mech} < 2")));
    }
    let mut h = block_generator(params, n, n_mech);
    for k in 0..n_mech {
        h[(k, k)] += from_usize::<T>(n) * params.omega_c;
    }
    Ok(h * params.hbar)
}

/// Thermal Fock weights n^k/(1+n)^{k+1}, k < cutoff.
pub fn thermal_weights<T: Real>(n_th: T, cutoff: usize) -> Vec<T> {
    let ratio = n_th / (T::one() + n_th);
    let mut w = T::one() / (T::one() + n_th);
    let mut out = Vec::with_capacity(cutoff);
    for _ in 0..cutoff {
        out.push(w);
        w *= ratio;
    }
    out
}

/// Renormalizes the truncated mixture to unit trace.
fn normalized<T: Real>(mut w: Vec<T>) -> Vec<T> {
    let total = w.iter().fold(T::zero(), |a, &x| a + x);
    for x in &mut w {
        *x /= total;
    }
    w
}

/// Smallest cutoff whose neglected thermal weight is at most `tol`.
pub fn thermal_cutoff(n_th: f64, tol: f64) -> usize {
    if n_th <= 0.0 {
        return 1;
    }
    let ratio = n_th / (1.0 + n_th);
    (tol.ln() / ratio.ln()).ceil().max(1.0) as usize
}

/// One diagonalized block.
#[derive(Clone, Debug)]
pub struct BlockEvolution<T: Real> {
    pub n: usize,
    /// Eigenfrequencies of H_n/ħ − nω_c.
    pub frequencies: Vec<T>,
    pub vectors: DMatrix<T>,
}

impl<T: Real> BlockEvolution<T> {
    fn new(params: &ModelParams<T>, n: usize, n_mech: usize) -> Self {
        let eig = SymmetricEigen::new(block_generator(params, n, n_mech));
        BlockEvolution {
            n,
            frequencies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// First `cols` columns of e^{−i(H_n/ħ − nω_c)t}.
    fn propagator_columns(&self, t: T, cols: usize) -> CMatrix<T> {
        let dim = self.vectors.nrows();
        let phases: Vec<Complex<T>> = self.frequencies.iter().map(|&e| cis(-e * t)).collect();
        let mut scaled = CMatrix::zeros(dim, dim);
        for j in 0..dim {
            for i in 0..dim {
                scaled[(i, j)] = phases[j] * self.vectors[(i, j)];
            }
        }
        let head = self.vectors.rows(0, cols).transpose().map(real);
        scaled * head
    }
}

/// Precomputed block diagonalizations for a fixed parameter set.
#[derive(Clone, Debug)]
pub struct TruncatedOracle<T: Real> {
    params: ModelParams<T>,
    n_mech: usize,
    cutoff: usize,
    weights: Vec<T>,
    blocks: Vec<BlockEvolution<T>>,
}

impl<T: Real> TruncatedOracle<T> {
    /// Oracle for optical dimension `dim` with the thermal cutoff chosen so
    /// the neglected weight is below [`THERMAL_TAIL_TOL`].
    pub fn new(params: &ModelParams<T>, dim: usize, n_mech: usize) -> Result<Self> {
        let cutoff = thermal_cutoff(to_f64(params.n_th), THERMAL_TAIL_TOL);
        Self::with_cutoff(params, dim, n_mech, cutoff)
    }

    pub fn with_cutoff(params: &ModelParams<T>, dim: usize, n_mech: usize, cutoff: usize) -> Result<Self> {
        params.validate_blocks(dim.saturating_sub(1))?;
        if n_mech < 2 {
            return Err(Error::TruncationTooSmall(format!("n_mech = {n_mech} < 2")));
        }
        if cutoff == 0 || 2 * cutoff > n_mech {
            return Err(Error::TruncationTooSmall(format!(
                "thermal cutoff {cutoff} needs n_mech >= {}, got {n_mech}",
                2 * cutoff
            )));
        }
        let n_th = to_f64(params.n_th);
        let tail = if n_th > 0.0 {
            (n_th / (1.0 + n_th)).powi(cutoff as i32)
        } else {
            0.0
        };
        if tail > THERMAL_TAIL_TOL {
            return Err(Error::TruncationTooSmall(format!(
                "thermal tail beyond cutoff {cutoff} is {tail:e}"
            )));
        }
        let blocks = (0..dim).map(|n| BlockEvolution::new(params, n, n_mech)).collect();
        Ok(TruncatedOracle {
            params: params.clone(),
            n_mech,
            cutoff,
            weights: normalized(thermal_weights(params.n_th, cutoff)),
            blocks,
        })
    }

    pub fn n_mech(&self) -> usize {
        self.n_mech
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, n: usize) -> &BlockEvolution<T> {
        &self.blocks[n]
    }

    fn evolved_columns(&self, t: T) -> Result<Vec<CMatrix<T>>> {
        let top = self.n_mech - self.n_mech.div_ceil(10);
        let mut out = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let u = b.propagator_columns(t, self.cutoff);
            let mut leak = T::zero();
            for (k, w) in self.weights.iter().enumerate() {
                let col: T = (top..self.n_mech).fold(T::zero(), |a, i| a + cabs2(u[(i, k)]));
                leak += *w * col;
            }
            if to_f64(leak) > LEAKAGE_TOL {
                return Err(Error::TruncationTooSmall(format!(
                    "block {} leaks {:e} into the top mechanical levels at t = {t}",
                    b.n,
                    to_f64(leak)
                )));
            }
            out.push(u);
        }
        Ok(out)
    }

    /// Tr_mech[U_n ρ_th U_m†], including the cavity phase e^{−i(n−m)ω_c t}.
    fn overlap(&self, un: &CMatrix<T>, um: &CMatrix<T>, n: usize, m: usize, t: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (k, w) in self.weights.iter().enumerate() {
            let dot = um.column(k).dotc(&un.column(k));
            acc += dot * *w;
        }
        let dn = from_usize::<T>(n) - from_usize::<T>(m);
        acc * cis(-dn * self.params.omega_c * t)
    }

    /// a_nm(t)/a_nm(0) for every block pair.
    pub fn coherence_factors(&self, t: T) -> Result<CMatrix<T>> {
        let cols = self.evolved_columns(t)?;
        let dim = self.dim();
        let mut f = CMatrix::zeros(dim, dim);
        for n in 0..dim {
            for m in 0..=n {
                let v = self.overlap(&cols[n], &cols[m], n, m, t);
                f[(n, m)] = v;
                f[(m, n)] = v.conj();
            }
        }
        Ok(f)
    }

    pub fn reduced_state(&self, sigma0: &InitialOpticalState<T>, t: T) -> Result<OpticalState<T>> {
        if sigma0.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: sigma0.dim(),
            });
        }
        let f = self.coherence_factors(t)?;
        Ok(OpticalState {
            time: t,
            coeffs: sigma0.coeffs().component_mul(&f),
        })
    }

    /// Full joint density matrix, optical index major:
    /// entry ((n, i), (m, j)) sits at (n·n_mech + i, m·n_mech + j).
    pub fn joint_state(&self, sigma0: &InitialOpticalState<T>, t: T) -> Result<TruncatedJointState<T>> {
        if sigma0.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: sigma0.dim(),
            });
        }
        let cols = self.evolved_columns(t)?;
        let dim = self.dim();
        let nm = self.n_mech;
        let mut rho = CMatrix::zeros(dim * nm, dim * nm);
        for n in 0..dim {
            for m in 0..dim {
                let a0 = sigma0.get(n, m);
                let dn = from_usize::<T>(n) - from_usize::<T>(m);
                let phase = a0 * cis(-dn * self.params.omega_c * t);
                for (k, w) in self.weights.iter().enumerate() {
                    let coef = phase * *w;
                    for i in 0..nm {
                        let left = cols[n][(i, k)] * coef;
                        for j in 0..nm {
                            rho[(n * nm + i, m * nm + j)] += left * cols[m][(j, k)].conj();
                        }
                    }
                }
            }
        }
        Ok(TruncatedJointState {
            optical_dim: dim,
            n_mech: nm,
            rho,
        })
    }

    /// ‖U†U − I‖_F for the full block propagator.
    pub fn unitarity_defect(&self, n: usize, t: T) -> T {
        let u = self.blocks[n].propagator_columns(t, self.n_mech);
        let d = u.adjoint() * &u - CMatrix::identity(self.n_mech, self.n_mech);
        d.norm()
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedJointState<T: Real> {
    pub optical_dim: usize,
    pub n_mech: usize,
    pub rho: CMatrix<T>,
}

impl<T: Real> TruncatedJointState<T> {
    pub fn partial_trace_mechanics(&self) -> CMatrix<T> {
        let nm = self.n_mech;
        CMatrix::from_fn(self.optical_dim, self.optical_dim, |n, m| {
            (0..nm).fold(Complex::new(T::zero(), T::zero()), |a, i| {
                a + self.rho[(n * nm + i, m * nm + i)]
            })
        })
    }
}

/// Convenience wrapper: reduced state at one time.
pub fn oracle_reduced_state<T: Real>(
    params: &ModelParams<T>,
    sigma0: &InitialOpticalState<T>,
    t: T,
    n_mech: usize,
    cutoff: usize,
) -> Result<OpticalState<T>> {
    TruncatedOracle::with_cutoff(params, sigma0.dim(), n_mech, cutoff)?.reduced_state(sigma0, t)
}
