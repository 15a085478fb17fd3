//! Action of `exp(-i beta H)` for a real symmetric sparse `H`.
//!
//! The operator is split into the connected components of its coupling graph.
//! Components up to `dense_limit` states are eigendecomposed once and each
//! application is two dense products. Larger components use a Lanczos
//! approximation with full reorthogonalization and adaptive time stepping
//! (the Krylov basis is rebuilt after every accepted sub-step).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use petgraph::unionfind::UnionFind;

use super::{check_dim, QuantumState, SparseHermitian};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpmMethod {
    /// Dense eigendecomposition for components up to `dense_limit` states, Krylov above.
    #[default]
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpmOptions {
    pub method: ExpmMethod,
    pub dense_limit: usize,
    /// Maximum Lanczos basis size per sub-step.
    pub krylov_dim: usize,
    /// Target absolute error on a unit-norm state over the whole evolution.
    pub tolerance: f64,
    /// Maximum number of attempted Krylov sub-steps per application.
    pub max_steps: usize,
}

impl Default for ExpmOptions {
    fn default() -> Self {
        Self {
            method: ExpmMethod::Auto,
            dense_limit: 1024,
            krylov_dim: 30,
            tolerance: 1e-12,
            max_steps: 10_000,
        }
    }
}

/// Precomputed propagator for one operator, reusable across many `beta`.
#[derive(Debug, Clone)]
pub struct HermitianPropagator<T: Real = f64> {
    n: usize,
    phases: Vec<(usize, T)>,
    dense: Vec<DenseBlock<T>>,
    krylov: Vec<KrylovBlock<T>>,
    options: ExpmOptions,
}

#[derive(Debug, Clone)]
struct DenseBlock<T: Real> {
    indices: Vec<usize>,
    eigenvectors: DMatrix<T>,
    eigenvalues: DVector<T>,
}

#[derive(Debug, Clone)]
struct KrylovBlock<T: Real> {
    indices: Vec<usize>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> HermitianPropagator<T> {
    pub fn new(op: &SparseHermitian<T>, options: ExpmOptions) -> Result<Self> {
        let mut touched: Vec<usize> = op
            .entries()
            .iter()
            .flat_map(|&(r, c, _)| [r as usize, c as usize])
            .collect();
        touched.sort_unstable();
        touched.dedup();
        let local = |i: usize| touched.binary_search(&i).expect("touched index");

        let mut uf = UnionFind::<usize>::new(touched.len());
        for &(r, c, _) in op.entries() {
            if r != c {
                uf.union(local(r as usize), local(c as usize));
            }
        }
        let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (pos, &index) in touched.iter().enumerate() {
            components.entry(uf.find(pos)).or_default().push(index);
        }

        let mut phases = Vec::new();
        let mut dense = Vec::new();
        let mut krylov = Vec::new();
        for indices in components.into_values() {
            let block_entries: Vec<(usize, usize, T)> = indices
                .iter()
                .enumerate()
                .flat_map(|(row, &i)| {
                    op.row(crate::bits::BitString(i as u64)).map(move |(c, v)| (row, c.index(), v))
                })
                .map(|(row, c, v)| (row, indices.binary_search(&c).expect("component closed"), v))
                .collect();
            if indices.len() == 1 {
                if let Some(&(_, _, d)) = block_entries.first() {
                    phases.push((indices[0], d));
                }
                continue;
            }
            let use_dense = match options.method {
                ExpmMethod::Dense => true,
                ExpmMethod::Krylov => false,
                ExpmMethod::Auto => indices.len() <= options.dense_limit,
            };
            if use_dense {
                dense.push(DenseBlock::new(indices, &block_entries));
            } else {
                krylov.push(KrylovBlock::new(indices, block_entries));
            }
        }
        Ok(Self { n: op.n(), phases, dense, krylov, options })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, beta: T, state: &QuantumState<T>) -> Result<QuantumState<T>> {
        let mut out = state.clone();
        self.apply_mut(beta, &mut out)?;
        Ok(out)
    }

    pub fn apply_mut(&self, beta: T, state: &mut QuantumState<T>) -> Result<()> {
        check_dim(self.n, state.n())?;
        if beta == T::zero() {
            return Ok(());
        }
        let psi = state.amplitudes_mut();
        for &(i, d) in &self.phases {
            let theta = beta * d;
            psi[i] *= Complex::new(theta.cos(), -theta.sin());
        }
        for block in &self.dense {
            block.apply(beta, psi);
        }
        for block in &self.krylov {
            block.apply(beta, psi, &self.options)?;
        }
        Ok(())
    }
}

impl<T: Real> DenseBlock<T> {
    fn new(indices: Vec<usize>, entries: &[(usize, usize, T)]) -> Self {
        let k = indices.len();
        let mut m = DMatrix::zeros(k, k);
        for &(r, c, v) in entries {
            m[(r, c)] = v;
        }
        let eig = SymmetricEigen::new(m);
        Self {
            indices,
            eigenvectors: eig.eigenvectors,
            eigenvalues: eig.eigenvalues,
        }
    }

    fn apply(&self, beta: T, psi: &mut [Complex<T>]) {
        let k = self.indices.len();
        let re = DVector::from_iterator(k, self.indices.iter().map(|&i| psi[i].re));
        let im = DVector::from_iterator(k, self.indices.iter().map(|&i| psi[i].im));
        let mut cre = self.eigenvectors.tr_mul(&re);
        let mut cim = self.eigenvectors.tr_mul(&im);
        for j in 0..k {
            let theta = beta * self.eigenvalues[j];
            let (s, c) = (theta.sin(), theta.cos());
            let (a, b) = (cre[j], cim[j]);
            cre[j] = a * c + b * s;
            cim[j] = b * c - a * s;
        }
        let re = &self.eigenvectors * cre;
        let im = &self.eigenvectors * cim;
        for (j, &i) in self.indices.iter().enumerate() {
            psi[i] = Complex::new(re[j], im[j]);
        }
    }
}

fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt()
}

impl<T: Real> KrylovBlock<T> {
    fn new(indices: Vec<usize>, mut entries: Vec<(usize, usize, T)>) -> Self {
        entries.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0; indices.len() + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for r in 0..indices.len() {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            indices,
            row_ptr,
            cols: entries.iter().map(|e| e.1).collect(),
            vals: entries.iter().map(|e| e.2).collect(),
        }
    }

    fn matvec(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for e in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[e]].scale(self.vals[e]);
            }
            *out = acc;
        }
    }

    fn apply(&self, beta: T, psi: &mut [Complex<T>], options: &ExpmOptions) -> Result<()> {
        let mut w: Vec<Complex<T>> = self.indices.iter().map(|&i| psi[i]).collect();
        self.propagate(beta, &mut w, options)?;
        for (j, &i) in self.indices.iter().enumerate() {
            psi[i] = w[j];
        }
        Ok(())
    }

    fn propagate(&self, beta: T, w: &mut [Complex<T>], options: &ExpmOptions) -> Result<()> {
        let dim = w.len();
        let total = beta.abs();
        let sign = if beta < T::zero() { -T::one() } else { T::one() };
        let tol = options.tolerance.max(64.0 * T::EPSILON);
        let tol_t = T::lit(tol);
        let m = options.krylov_dim.max(2).min(dim);
        let not_converged = || Error::KrylovNotConverged { tolerance: tol, max_steps: options.max_steps };

        let mut remaining = total;
        let mut tau = total;
        let mut attempts = 0usize;
        let mut scratch = vec![Complex::new(T::zero(), T::zero()); dim];

        while remaining > T::zero() {
            let rho = norm(w);
            if rho == T::zero() {
                return Ok(());
            }
            let mut basis: Vec<Vec<Complex<T>>> = vec![w.iter().map(|a| a.unscale(rho)).collect()];
            let mut alphas: Vec<T> = Vec::with_capacity(m);
            let mut offdiag: Vec<T> = Vec::with_capacity(m);
            let mut residual = T::zero();
            let mut exhausted = false;
            for j in 0..m {
                self.matvec(&basis[j], &mut scratch);
                let alpha = dot(&basis[j], &scratch).re;
                alphas.push(alpha);
                for v in &basis {
                    let h = dot(v, &scratch);
                    scratch.iter_mut().zip(v).for_each(|(s, vi)| *s -= vi * h);
                }
                let b = norm(&scratch);
                let scale = alpha.abs().max(offdiag.last().copied().unwrap_or(T::zero())).max(T::one());
                if b <= T::lit(T::EPSILON) * scale {
                    exhausted = true;
                    break;
                }
                if j + 1 == m {
                    residual = b;
                    break;
                }
                offdiag.push(b);
                basis.push(scratch.iter().map(|a| a.unscale(b)).collect());
            }

            let k = alphas.len();
            let mut tri = DMatrix::zeros(k, k);
            for j in 0..k {
                tri[(j, j)] = alphas[j];
                if j + 1 < k {
                    tri[(j, j + 1)] = offdiag[j];
                    tri[(j + 1, j)] = offdiag[j];
                }
            }
            let eig = SymmetricEigen::new(tri);

            let mut coeffs;
            let mut err;
            loop {
                attempts += 1;
                if attempts > options.max_steps {
                    return Err(not_converged());
                }
                tau = tau.min(remaining);
                coeffs = small_exponential(&eig, sign * tau);
                err = if exhausted { T::zero() } else { rho * residual * coeffs[k - 1].norm_sqr().sqrt() };
                let allowed = tol_t * rho * tau / total;
                if err <= allowed {
                    break;
                }
                let shrink = (allowed / err).powf(T::one() / T::count(k)) * T::lit(0.9);
                tau *= shrink.max(T::lit(0.1)).min(T::lit(0.5));
                if tau <= T::zero() {
                    return Err(not_converged());
                }
            }

            for (wi, j) in w.iter_mut().zip(0..) {
                *wi = basis
                    .iter()
                    .zip(&coeffs)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (v, c)| acc + v[j] * c)
                    .scale(rho);
            }
            if tau >= remaining {
                remaining = T::zero();
            } else {
                remaining -= tau;
                let allowed = tol_t * rho * tau / total;
                let grow = if err > T::zero() {
                    ((allowed / err).powf(T::one() / T::count(k)) * T::lit(0.9)).min(T::lit(2.0))
                } else {
                    T::lit(2.0)
                };
                tau *= grow.max(T::one());
            }
        }
        Ok(())
    }
}

/// `exp(-i t T) e_1` for the tridiagonal Lanczos matrix `T` given its eigensystem.
fn small_exponential<T: Real>(eig: &SymmetricEigen<T, nalgebra::Dyn>, t: T) -> Vec<Complex<T>> {
    let k = eig.eigenvalues.len();
    (0..k)
        .map(|j| {
            (0..k).fold(Complex::new(T::zero(), T::zero()), |acc, l| {
                let theta = t * eig.eigenvalues[l];
                let w = eig.eigenvectors[(j, l)] * eig.eigenvectors[(0, l)];
                acc + Complex::new(theta.cos(), -theta.sin()).scale(w)
            })
        })
        .collect()
}
