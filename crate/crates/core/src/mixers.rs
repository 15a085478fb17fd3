//! Constraint-encoding mixers over an enumerated feasible set, plus the
//! unconstrained transverse-field baseline.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problems::FeasibleSet;
use crate::qstate::{ExpmOptions, HermitianPropagator, QuantumState, SparseHermitian};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OperatorKind {
    Distance2,
    Distance1,
    RingXy,
    Star { center: BitString },
    TransverseField,
}

impl OperatorKind {
    /// Whether the operator only couples members of the feasible set it was built on.
    pub fn is_feasibility_preserving(&self) -> bool {
        matches!(self, Self::Distance2 | Self::Distance1 | Self::Star { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Distance2 => "distance2",
            Self::Distance1 => "distance1",
            Self::RingXy => "ring-xy",
            Self::Star { .. } => "star",
            Self::TransverseField => "transverse",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixerOperator<T: Real = f64> {
    kind: OperatorKind,
    matrix: SparseHermitian<T>,
}

impl<T: Real> MixerOperator<T> {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &SparseHermitian<T> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// Undirected edges `(x, y)` with `x < y`.
    pub fn edges(&self) -> impl Iterator<Item = (BitString, BitString)> + '_ {
        self.matrix
            .entries()
            .iter()
            .filter(|(r, c, _)| r < c)
            .map(|&(r, c, _)| (BitString(r), BitString(c)))
    }

    /// Edges with both endpoints in `omega`.
    pub fn feasible_edges<'a>(&'a self, omega: &'a FeasibleSet) -> impl Iterator<Item = (BitString, BitString)> + 'a {
        self.edges().filter(|(x, y)| omega.contains(*x) && omega.contains(*y))
    }

    /// True when no entry couples strings of different Hamming weight.
    pub fn preserves_weight(&self) -> bool {
        self.edges().all(|(x, y)| x.weight() == y.weight())
    }

    /// Reusable `beta -> exp(-i beta B)` applier. Star mixers use the rank-2 closed form.
    pub fn propagator(&self, options: ExpmOptions) -> Result<MixerPropagator<T>> {
        Ok(match self.kind {
            OperatorKind::Star { center } => MixerPropagator::Star(StarRotation::new(self, center)),
            _ => MixerPropagator::Generic(HermitianPropagator::new(&self.matrix, options)?),
        })
    }
}

/// Unit-weight adjacency between members of `omega` at Hamming distance exactly `d`.
pub fn build_distance_mixer<T: Real>(omega: &FeasibleSet, d: usize) -> Result<MixerOperator<T>> {
    let kind = match d {
        1 => OperatorKind::Distance1,
        2 => OperatorKind::Distance2,
        _ => return Err(Error::InvalidConfig(format!("distance mixer needs d in {{1, 2}}, got {d}"))),
    };
    if omega.is_empty() {
        return Err(Error::NoFeasibleSolution);
    }
    let n = omega.n();
    let patterns = flip_patterns(n, d);
    let mut edges = Vec::new();
    for x in omega.iter() {
        for &mask in &patterns {
            let y = BitString(x.0 ^ mask);
            if x < y && omega.contains(y) {
                edges.push((x, y));
            }
        }
    }
    Ok(MixerOperator { kind, matrix: SparseHermitian::from_edges(n, edges)? })
}

fn flip_patterns(n: usize, d: usize) -> Vec<u64> {
    match d {
        1 => (0..n).map(|i| 1 << i).collect(),
        _ => (0..n).flat_map(|i| (i + 1..n).map(move |j| (1 << i) | (1 << j))).collect(),
    }
}

/// `-sum_i (X_i X_{i+1} + Y_i Y_{i+1})` with cyclic wrap over the full space.
///
/// Each adjacent pair `(i, i+1 mod n)` contributes `-2` between strings that
/// differ by swapping unequal bits at those positions. For `n = 2` both terms
/// act on the same pair, so the coupling is `-4`.
pub fn build_ring_xy_mixer<T: Real>(n: usize) -> Result<MixerOperator<T>> {
    if !(2..=63).contains(&n) {
        return Err(Error::InvalidConfig(format!("ring-XY mixer needs 2 <= n <= 63, got {n}")));
    }
    let mut acc = std::collections::BTreeMap::<(u64, u64), f64>::new();
    for x in 0..1u64 << n {
        for i in 0..n {
            let j = (i + 1) % n;
            if (x >> i) & 1 != (x >> j) & 1 {
                let y = x ^ ((1 << i) | (1 << j));
                *acc.entry((x, y)).or_default() -= 2.0;
            }
        }
    }
    let entries = acc.into_iter().map(|((x, y), v)| (x, y, T::lit(v))).collect();
    Ok(MixerOperator { kind: OperatorKind::RingXy, matrix: SparseHermitian::from_entries(n, entries)? })
}

/// Unit edges from `center` to every other member of `omega`.
pub fn build_star_mixer<T: Real>(omega: &FeasibleSet, center: BitString) -> Result<MixerOperator<T>> {
    if !omega.contains(center) {
        return Err(Error::StarCenterInfeasible(center.to_bits(omega.n())));
    }
    let edges = omega.iter().filter(|&x| x != center).map(|x| (center, x));
    Ok(MixerOperator {
        kind: OperatorKind::Star { center },
        matrix: SparseHermitian::from_edges(omega.n(), edges)?,
    })
}

/// `sum_l X_l`: hypercube adjacency on all `2^n` strings.
pub fn build_transverse_field<T: Real>(n: usize) -> Result<MixerOperator<T>> {
    if !(1..=63).contains(&n) {
        return Err(Error::InvalidConfig(format!("transverse field needs 1 <= n <= 63, got {n}")));
    }
    let edges = (0..1u64 << n).flat_map(|x| {
        (0..n).filter(move |&l| (x >> l) & 1 == 0).map(move |l| (BitString(x), BitString(x | (1 << l))))
    });
    Ok(MixerOperator {
        kind: OperatorKind::TransverseField,
        matrix: SparseHermitian::from_edges(n, edges)?,
    })
}

/// `exp(-i beta B) |state>` for a star mixer in `O(|omega|)`.
pub fn star_exponential_apply<T: Real>(
    state: &QuantumState<T>,
    beta: T,
    mixer: &MixerOperator<T>,
) -> Result<QuantumState<T>> {
    let OperatorKind::Star { center } = mixer.kind else {
        return Err(Error::MixerNotApplicable(format!("{} mixer has no star closed form", mixer.kind.name())));
    };
    let mut out = state.clone();
    StarRotation::new(mixer, center).apply_mut(beta, &mut out)?;
    Ok(out)
}

/// Rotation inside span{|center>, |u>} where `u` is the uniform leaf state.
///
/// `B = sqrt(m) (|c><u| + |u><c|)`, so the pair rotates by `beta * sqrt(m)` and
/// the component orthogonal to both is untouched.
#[derive(Debug, Clone)]
pub struct StarRotation {
    n: usize,
    center: usize,
    leaves: Vec<usize>,
}

impl StarRotation {
    fn new<T: Real>(mixer: &MixerOperator<T>, center: BitString) -> Self {
        let leaves = mixer.matrix.row(center).map(|(x, _)| x.index()).collect();
        Self { n: mixer.n(), center: center.index(), leaves }
    }

    pub fn apply_mut<T: Real>(&self, beta: T, state: &mut QuantumState<T>) -> Result<()> {
        crate::qstate::check_dim(self.n, state.n())?;
        if self.leaves.is_empty() {
            return Ok(());
        }
        let amps = state.amplitudes_mut();
        let root = T::count(self.leaves.len()).sqrt();
        let (s, c) = (beta * root).sin_cos();
        let mi = Complex::new(T::zero(), -s);

        let leaf_sum = self.leaves.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &l| acc + amps[l]);
        let alpha = leaf_sum / root;
        let psi_c = amps[self.center];

        amps[self.center] = psi_c * c + alpha * mi;
        let alpha_new = psi_c * mi + alpha * c;
        let shift = (alpha_new - alpha) / root;
        for &l in &self.leaves {
            amps[l] += shift;
        }
        Ok(())
    }
}

/// `beta -> exp(-i beta B)` with any per-operator setup done once.
#[derive(Debug, Clone)]
pub enum MixerPropagator<T: Real = f64> {
    Generic(HermitianPropagator<T>),
    Star(StarRotation),
}

impl<T: Real> MixerPropagator<T> {
    pub fn apply_mut(&self, beta: T, state: &mut QuantumState<T>) -> Result<()> {
        match self {
            Self::Generic(p) => p.apply_mut(beta, state),
            Self::Star(s) => s.apply_mut(beta, state),
        }
    }
}
