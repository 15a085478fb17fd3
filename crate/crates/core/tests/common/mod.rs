#![allow(dead_code)]

use std::collections::BTreeSet;

use cqaoa::bits::BitString;
use cqaoa::problems::{catalog, ConstraintKind, FeasibleSet, LinearConstraint, ProblemInstance};
use cqaoa::qstate::{QuantumState, SparseHermitian};
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;

/// Random 4-vertex graph partition instances whose optimum is a single
/// complementary pair of strings.
pub fn unique_pair_partitions<R: Rng>(count: usize, rng: &mut R) -> Vec<ProblemInstance> {
    let mut out = Vec::new();
    while out.len() < count {
        let p = catalog::random_graph_partition(4, 0.5, rng);
        if p.brute_force_optima().unwrap().len() == 2 {
            out.push(p);
        }
    }
    out
}

/// Tasks on each processor, as a canonical unordered partition.
pub fn schedule_partition(x: BitString, processors: usize, tasks: usize) -> BTreeSet<BTreeSet<usize>> {
    (0..processors)
        .map(|p| (0..tasks).filter(|&j| x.bit(p * tasks + j)).collect())
        .collect()
}

pub fn partition_of(groups: &[&[usize]]) -> BTreeSet<BTreeSet<usize>> {
    groups.iter().map(|g| g.iter().copied().collect()).collect()
}

/// Symmetric operator with random sparse couplings and diagonal.
pub fn random_operator<R: Rng>(n: usize, density: f64, rng: &mut R) -> SparseHermitian {
    let mut entries = Vec::new();
    for x in 0..1u64 << n {
        entries.push((x, x, rng.random_range(-1.0..1.0)));
        for y in x + 1..1u64 << n {
            if rng.random_bool(density) {
                let v = rng.random_range(-1.0..1.0);
                entries.push((x, y, v));
                entries.push((y, x, v));
            }
        }
    }
    SparseHermitian::from_entries(n, entries).unwrap()
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> QuantumState {
    let amps = (0..1usize << n)
        .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    QuantumState::from_amplitudes(n, amps).unwrap()
}

/// `exp(-i beta H) psi` through nalgebra's complex matrix exponential, independent
/// of the propagator's eigendecomposition and Lanczos paths.
pub fn oracle_exponential(op: &SparseHermitian, beta: f64, psi: &QuantumState) -> Vec<Complex<f64>> {
    let h = op.to_dense().map(|v| Complex::new(0.0, -beta * v));
    let u: DMatrix<Complex<f64>> = h.exp();
    let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
    (u * v).iter().copied().collect()
}

pub fn distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Inequality constraint with nonnegative integer coefficients and every bound gap
/// at least twice the row's largest coefficient, with a nonempty feasible set.
pub fn wide_bounds_constraint<R: Rng>(rng: &mut R) -> (LinearConstraint, FeasibleSet) {
    loop {
        let n = rng.random_range(3..=10);
        let kappa = rng.random_range(1..=3);
        let coeffs: Vec<Vec<f64>> =
            (0..n).map(|_| (0..kappa).map(|_| rng.random_range(0..=3) as f64).collect()).collect();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for mu in 0..kappa {
            let largest = coeffs.iter().map(|c| c[mu]).fold(0.0, f64::max);
            let total: f64 = coeffs.iter().map(|c| c[mu]).sum();
            let a = rng.random_range(0..=total as usize) as f64;
            let gap = 2.0 * largest + rng.random_range(0..=3) as f64;
            lower.push(a);
            upper.push(a + gap);
        }
        let c = LinearConstraint::new(ConstraintKind::Inequality, coeffs, lower, upper).unwrap();
        let omega = FeasibleSet::from_constraint(&c).unwrap();
        if !omega.is_empty() {
            return (c, omega);
        }
    }
}
