//! Exact complex state vectors and the two QAOA evolution primitives:
//! diagonal cost phases and mixer exponentials.

mod expm;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use expm::{ExpmMethod, ExpmOptions, HermitianPropagator};

/// Probabilities of measured bit strings. Only entries above a floor are kept.
pub type Distribution<T = f64> = BTreeMap<BitString, T>;

/// Probabilities below this are dropped from [`QuantumState::distribution`].
pub const DEFAULT_PROBABILITY_FLOOR: f64 = 1e-12;

/// A normalized state on `n` qubits, stored as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T: Real = f64> {
    n: usize,
    amplitudes: Vec<Complex<T>>,
}

/// Diagonal cost operator: `weights[x]` is the quality of basis state `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalCost<T: Real = f64> {
    n: usize,
    weights: Vec<T>,
}

/// Real symmetric sparse operator stored as `(row, col, value)` triplets,
/// sorted by row then column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian<T: Real = f64> {
    n: usize,
    entries: Vec<(u64, u64, T)>,
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn check_index(index: u64, n: usize) -> Result<()> {
    if n < 64 && index >> n != 0 {
        return Err(Error::IndexOutOfRange { index, n });
    }
    Ok(())
}

impl<T: Real> QuantumState<T> {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(n: usize, mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_dim(1 << n, amplitudes.len())?;
        let norm = norm_of(&amplitudes);
        if norm == T::zero() {
            return Err(Error::EmptySupport);
        }
        let inv = T::one() / norm;
        amplitudes.iter_mut().for_each(|a| *a = a.scale(inv));
        Ok(Self { n, amplitudes })
    }

    pub fn basis(n: usize, x: BitString) -> Result<Self> {
        Self::uniform_state_over([x], n)
    }

    /// Equal real amplitude `1/sqrt(|support|)` on each member of `support`.
    pub fn uniform_state_over(
        support: impl IntoIterator<Item = BitString>,
        n: usize,
    ) -> Result<Self> {
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        let mut members = 0usize;
        for x in support {
            check_index(x.0, n)?;
            if amplitudes[x.index()].re == T::zero() {
                amplitudes[x.index()].re = T::one();
                members += 1;
            }
        }
        if members == 0 {
            return Err(Error::EmptySupport);
        }
        let amp = T::one() / T::count(members).sqrt();
        amplitudes.iter_mut().filter(|a| a.re != T::zero()).for_each(|a| a.re = amp);
        Ok(Self { n, amplitudes })
    }

    pub fn uniform_all(n: usize) -> Self {
        let amp = T::one() / T::count(1 << n).sqrt();
        Self {
            n,
            amplitudes: vec![Complex::new(amp, T::zero()); 1 << n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, x: BitString) -> Complex<T> {
        self.amplitudes[x.index()]
    }

    pub fn probability(&self, x: BitString) -> T {
        self.amplitudes[x.index()].norm_sqr()
    }

    pub fn norm(&self) -> T {
        norm_of(&self.amplitudes)
    }

    /// Multiplies amplitude `x` by `exp(-i gamma w_x)`.
    pub fn apply_cost_phase(&self, gamma: T, cost: &DiagonalCost<T>) -> Result<Self> {
        let mut out = self.clone();
        out.apply_cost_phase_mut(gamma, cost)?;
        Ok(out)
    }

    pub fn apply_cost_phase_mut(&mut self, gamma: T, cost: &DiagonalCost<T>) -> Result<()> {
        check_dim(self.n, cost.n)?;
        for (a, &w) in self.amplitudes.iter_mut().zip(&cost.weights) {
            let theta = gamma * w;
            *a *= Complex::new(theta.cos(), -theta.sin());
        }
        Ok(())
    }

    /// Returns `exp(-i beta op)|self>`.
    ///
    /// This rebuilds the propagator on every call; loops that reuse one
    /// operator should hold a [`HermitianPropagator`] instead.
    pub fn apply_hermitian_exponential(&self, beta: T, op: &SparseHermitian<T>) -> Result<Self> {
        let propagator = HermitianPropagator::new(op, ExpmOptions::default())?;
        let mut out = self.clone();
        propagator.apply_mut(beta, &mut out)?;
        Ok(out)
    }

    /// `sum_x |amp_x|^2 w_x`.
    pub fn expectation(&self, cost: &DiagonalCost<T>) -> Result<T> {
        check_dim(self.n, cost.n)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&cost.weights)
            .fold(T::zero(), |acc, (a, &w)| acc + a.norm_sqr() * w))
    }

    pub fn distribution(&self) -> Distribution<T> {
        self.distribution_with_floor(T::lit(DEFAULT_PROBABILITY_FLOOR))
    }

    pub fn distribution_with_floor(&self, floor: T) -> Distribution<T> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter_map(|(x, a)| {
                let p = a.norm_sqr();
                (p >= floor).then_some((BitString(x as u64), p))
            })
            .collect()
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }
}

fn norm_of<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()).sqrt()
}

impl<T: Real> DiagonalCost<T> {
    pub fn new(n: usize, weights: Vec<T>) -> Result<Self> {
        check_dim(1 << n, weights.len())?;
        if let Some(x) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::InvalidInstance(format!("non-finite cost weight at index {x}")));
        }
        Ok(Self { n, weights })
    }

    pub fn from_fn(n: usize, f: impl Fn(BitString) -> T) -> Result<Self> {
        Self::new(n, (0..1u64 << n).map(|x| f(BitString(x))).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, x: BitString) -> T {
        self.weights[x.index()]
    }
}

impl<T: Real> SparseHermitian<T> {
    /// Validates bounds and symmetry; duplicate triplets are rejected.
    pub fn from_entries(n: usize, mut entries: Vec<(u64, u64, T)>) -> Result<Self> {
        for &(r, c, _) in &entries {
            check_index(r, n)?;
            check_index(c, n)?;
        }
        entries.sort_by_key(|e| (e.0, e.1));
        if entries.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidInstance("duplicate operator entry".into()));
        }
        for &(r, c, v) in &entries {
            if r != c {
                let mirror = entries
                    .binary_search_by(|e| (e.0, e.1).cmp(&(c, r)))
                    .map(|i| entries[i].2);
                if mirror != Ok(v) {
                    return Err(Error::InvalidInstance(format!(
                        "operator entry ({r}, {c}) has no symmetric partner"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// Unit-weight adjacency matrix of an undirected edge set.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (BitString, BitString)>) -> Result<Self> {
        let mut entries = Vec::new();
        for (a, b) in edges {
            if a != b {
                entries.push((a.0, b.0, T::one()));
                entries.push((b.0, a.0, T::one()));
            }
        }
        entries.sort_by_key(|e| (e.0, e.1));
        entries.dedup_by(|a, b| (a.0, a.1) == (b.0, b.1));
        Self::from_entries(n, entries)
    }

    pub fn zero(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(u64, u64, T)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: BitString, col: BitString) -> T {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(row.0, col.0)))
            .map(|i| self.entries[i].2)
            .unwrap_or_else(|_| T::zero())
    }

    /// Off-diagonal neighbours of `row`, ascending.
    pub fn row(&self, row: BitString) -> impl Iterator<Item = (BitString, T)> + '_ {
        let start = self.entries.partition_point(|e| e.0 < row.0);
        self.entries[start..]
            .iter()
            .take_while(move |e| e.0 == row.0)
            .map(|&(_, c, v)| (BitString(c), v))
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for &(r, c, v) in &self.entries {
            m[(r as usize, c as usize)] = v;
        }
        m
    }
}
