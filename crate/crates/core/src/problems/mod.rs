//! Problem instances, feasibility oracles, quality functions and their
//! linear-constraint forms.
//!
//! Every quality is "larger is better": graph partition scores `|E| - cut`,
//! scheduling scores the negated makespan, set packing counts selected sets
//! and vertex cover scores the negated cover size.
//!
//! Qubit layout per problem (all indices 0-based):
//!
//! * graph partition, vertex cover: qubit `v` is vertex `v`;
//! * set packing: qubit `k` selects subset `k`;
//! * scheduling with `m` processors and `t` tasks: qubit `p * t + j` is set
//!   when task `j` runs on processor `p`.

pub mod catalog;
mod constraint;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::qstate::DiagonalCost;
use crate::scalar::Real;

pub use constraint::{ConstraintKind, LinearConstraint};

/// Largest qubit count that may be enumerated exhaustively.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// A constrained combinatorial optimization instance.
///
/// The serde form is the problem-file schema: an object tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemInstance {
    /// Split an even vertex set in half, minimizing crossing edges.
    GraphPartition { n: usize, edges: Vec<[usize; 2]> },
    /// Assign tasks to processors minimizing the makespan.
    #[serde(rename = "mps")]
    MultiProcessorScheduling {
        processors: usize,
        times: Vec<f64>,
        /// Task pairs that must run on different processors.
        #[serde(default)]
        conflicts: Vec<[usize; 2]>,
        /// Task pairs that must run on the same processor.
        #[serde(default)]
        colocations: Vec<[usize; 2]>,
    },
    /// Select the most pairwise-disjoint subsets of `0..universe`.
    SetPacking { universe: usize, subsets: Vec<Vec<usize>> },
    /// Select the fewest vertices touching every edge.
    VertexCover { n: usize, edges: Vec<[usize; 2]> },
}

/// The sorted list of bit strings that pass a problem's feasibility oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleSet {
    n: usize,
    members: Vec<BitString>,
}

fn check_edges(n: usize, edges: &[[usize; 2]], what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &[u, v] in edges {
        if u >= n || v >= n {
            return Err(Error::InvalidInstance(format!("{what} ({u}, {v}) out of range for {n} items")));
        }
        if u == v {
            return Err(Error::InvalidInstance(format!("{what} ({u}, {v}) is a self-loop")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::InvalidInstance(format!("duplicate {what} ({u}, {v})")));
        }
    }
    Ok(())
}

fn cap_check(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        Err(Error::EnumerationCap { n, cap })
    } else {
        Ok(())
    }
}

/// Position of edge `{u, v}` in the lexicographic slot order `(0,1), (0,2), ..., (n-2,n-1)`.
pub fn edge_slot(n: usize, u: usize, v: usize) -> usize {
    let (a, b) = (u.min(v), u.max(v));
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

impl ProblemInstance {
    pub fn graph_partition(n: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        let p = Self::GraphPartition { n, edges };
        p.check()?;
        Ok(p)
    }

    pub fn scheduling(
        processors: usize,
        times: Vec<f64>,
        conflicts: Vec<[usize; 2]>,
        colocations: Vec<[usize; 2]>,
    ) -> Result<Self> {
        let p = Self::MultiProcessorScheduling { processors, times, conflicts, colocations };
        p.check()?;
        Ok(p)
    }

    pub fn set_packing(universe: usize, subsets: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self::SetPacking { universe, subsets };
        p.check()?;
        Ok(p)
    }

    pub fn vertex_cover(n: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        let p = Self::VertexCover { n, edges };
        p.check()?;
        Ok(p)
    }

    /// Vertex cover whose edges are read from an indicator string over the
    /// lexicographic edge slots, first character = slot `(0, 1)`.
    pub fn vertex_cover_from_slots(n: usize, indicator: &str) -> Result<Self> {
        let slots = n * n.saturating_sub(1) / 2;
        if indicator.len() != slots {
            return Err(Error::InvalidInstance(format!(
                "edge indicator has {} slots, expected {slots}",
                indicator.len()
            )));
        }
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| [u, v]));
        let mut edges = Vec::new();
        for (pair, c) in pairs.zip(indicator.chars()) {
            match c {
                '1' => edges.push(pair),
                '0' => {}
                _ => return Err(Error::InvalidInstance(format!("bad edge indicator {indicator:?}"))),
            }
        }
        Self::vertex_cover(n, edges)
    }

    /// Checks the structural invariants of the instance.
    pub fn check(&self) -> Result<()> {
        match self {
            Self::GraphPartition { n, edges } => {
                if *n < 2 || n % 2 != 0 {
                    return Err(Error::InvalidInstance(format!("graph partition needs an even vertex count, got {n}")));
                }
                check_edges(*n, edges, "edge")
            }
            Self::MultiProcessorScheduling { processors, times, conflicts, colocations } => {
                if *processors == 0 || times.is_empty() {
                    return Err(Error::InvalidInstance("scheduling needs processors and tasks".into()));
                }
                if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
                    return Err(Error::InvalidInstance(format!("task time {t} is not a positive number")));
                }
                if processors * times.len() > 63 {
                    return Err(Error::InvalidInstance("scheduling needs more than 63 qubits".into()));
                }
                check_edges(times.len(), conflicts, "conflict")?;
                check_edges(times.len(), colocations, "colocation")
            }
            Self::SetPacking { universe, subsets } => {
                if subsets.is_empty() || subsets.len() > 63 {
                    return Err(Error::InvalidInstance("set packing needs 1 to 63 subsets".into()));
                }
                for (k, s) in subsets.iter().enumerate() {
                    let unique: BTreeSet<_> = s.iter().collect();
                    if unique.len() != s.len() {
                        return Err(Error::InvalidInstance(format!("subset {k} repeats an element")));
                    }
                    if let Some(e) = s.iter().find(|&&e| e >= *universe) {
                        return Err(Error::InvalidInstance(format!("subset {k} element {e} outside universe")));
                    }
                }
                Ok(())
            }
            Self::VertexCover { n, edges } => {
                if *n == 0 || *n > 63 {
                    return Err(Error::InvalidInstance("vertex cover needs 1 to 63 vertices".into()));
                }
                check_edges(*n, edges, "edge")
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::GraphPartition { .. } => "graph_partition",
            Self::MultiProcessorScheduling { .. } => "mps",
            Self::SetPacking { .. } => "set_packing",
            Self::VertexCover { .. } => "vertex_cover",
        }
    }

    pub fn qubit_count(&self) -> usize {
        match self {
            Self::GraphPartition { n, .. } | Self::VertexCover { n, .. } => *n,
            Self::MultiProcessorScheduling { processors, times, .. } => processors * times.len(),
            Self::SetPacking { subsets, .. } => subsets.len(),
        }
    }

    /// Processor of `task` when it is assigned to exactly one, else `None`.
    fn processor_of(x: BitString, processors: usize, tasks: usize, task: usize) -> Option<usize> {
        let mut on = (0..processors).filter(|p| x.bit(p * tasks + task));
        match (on.next(), on.next()) {
            (Some(p), None) => Some(p),
            _ => None,
        }
    }

    /// Feasibility oracle.
    pub fn validate(&self, x: BitString) -> bool {
        match self {
            Self::GraphPartition { n, .. } => x.weight() as usize == n / 2,
            Self::MultiProcessorScheduling { processors, times, conflicts, colocations } => {
                let tasks = times.len();
                let assignment: Option<Vec<usize>> =
                    (0..tasks).map(|j| Self::processor_of(x, *processors, tasks, j)).collect();
                match assignment {
                    None => false,
                    Some(a) => {
                        conflicts.iter().all(|&[j, k]| a[j] != a[k])
                            && colocations.iter().all(|&[j, k]| a[j] == a[k])
                    }
                }
            }
            Self::SetPacking { subsets, .. } => {
                let mut used = BTreeSet::new();
                x.ones().all(|k| subsets[k].iter().all(|e| used.insert(*e)))
            }
            Self::VertexCover { edges, .. } => edges.iter().all(|&[u, v]| x.bit(u) || x.bit(v)),
        }
    }

    /// Solution quality, larger is better. Defined for every bit string.
    pub fn quality(&self, x: BitString) -> f64 {
        match self {
            Self::GraphPartition { edges, .. } => {
                let cut = edges.iter().filter(|&&[u, v]| x.bit(u) != x.bit(v)).count();
                (edges.len() - cut) as f64
            }
            Self::MultiProcessorScheduling { processors, times, .. } => {
                let tasks = times.len();
                let makespan = (0..*processors)
                    .map(|p| (0..tasks).filter(|&j| x.bit(p * tasks + j)).map(|j| times[j]).sum::<f64>())
                    .fold(0.0, f64::max);
                -makespan
            }
            Self::SetPacking { .. } => x.weight() as f64,
            Self::VertexCover { .. } => -(x.weight() as f64),
        }
    }

    pub fn cost_operator<T: Real>(&self) -> Result<DiagonalCost<T>> {
        self.cost_operator_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn cost_operator_with_cap<T: Real>(&self, cap: usize) -> Result<DiagonalCost<T>> {
        cap_check(self.qubit_count(), cap)?;
        DiagonalCost::from_fn(self.qubit_count(), |x| T::lit(self.quality(x)))
    }

    pub fn feasible_set(&self) -> Result<FeasibleSet> {
        self.feasible_set_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn feasible_set_with_cap(&self, cap: usize) -> Result<FeasibleSet> {
        FeasibleSet::from_predicate(self.qubit_count(), cap, |x| self.validate(x))
    }

    /// The constraint in the linear form `a <= sum_k c_k x_k <= b`, or `None`
    /// when the instance carries non-linear side constraints (or is a
    /// single-vertex cover with no edge slots).
    pub fn linear_constraint(&self) -> Option<LinearConstraint> {
        let constraint = match self {
            Self::GraphPartition { n, .. } => LinearConstraint::equality(vec![vec![1.0]; *n], vec![(n / 2) as f64]),
            Self::MultiProcessorScheduling { processors, times, conflicts, colocations } => {
                if !conflicts.is_empty() || !colocations.is_empty() {
                    return None;
                }
                let tasks = times.len();
                let coeffs = (0..processors * tasks)
                    .map(|k| (0..tasks).map(|j| if k % tasks == j { 1.0 } else { 0.0 }).collect())
                    .collect();
                LinearConstraint::equality(coeffs, vec![1.0; tasks])
            }
            Self::SetPacking { universe, subsets } => {
                let coeffs = subsets
                    .iter()
                    .map(|s| (0..*universe).map(|e| if s.contains(&e) { 1.0 } else { 0.0 }).collect())
                    .collect();
                LinearConstraint::inequality(coeffs, vec![0.0; *universe], vec![1.0; *universe])
            }
            Self::VertexCover { n, edges } => {
                if *n < 2 {
                    return None;
                }
                let slots = n * (n - 1) / 2;
                let mut coeffs = vec![vec![0.0; slots]; *n];
                let mut lower = vec![0.0; slots];
                for &[u, v] in edges {
                    let s = edge_slot(*n, u, v);
                    coeffs[u][s] = 1.0;
                    coeffs[v][s] = 1.0;
                    lower[s] = 1.0;
                }
                // sum_k c_k is the largest value f can take, so this bound never binds.
                let upper = lower.iter().map(|l| 2.0 * l).collect();
                LinearConstraint::inequality(coeffs, lower, upper)
            }
        };
        Some(constraint.expect("problem constraints are well formed"))
    }

    /// Feasible strings of maximum quality.
    pub fn brute_force_optima(&self) -> Result<Vec<BitString>> {
        self.brute_force_optima_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn brute_force_optima_with_cap(&self, cap: usize) -> Result<Vec<BitString>> {
        let omega = self.feasible_set_with_cap(cap)?;
        if omega.is_empty() {
            return Err(Error::NoFeasibleSolution);
        }
        Ok(optima_of(&omega, |x| self.quality(x)))
    }

    /// A feasible solution known without search.
    pub fn trivial_feasible(&self) -> Result<BitString> {
        let candidate = match self {
            Self::GraphPartition { n, .. } => BitString::from_ones(0..n / 2),
            Self::MultiProcessorScheduling { times, .. } => BitString::from_ones(0..times.len()),
            Self::SetPacking { .. } => BitString(0),
            Self::VertexCover { n, .. } => BitString::from_ones(0..*n),
        };
        if self.validate(candidate) {
            return Ok(candidate);
        }
        self.feasible_set()?.members().first().copied().ok_or(Error::NoFeasibleSolution)
    }
}

/// Members of `omega` attaining the maximum of `quality`.
pub(crate) fn optima_of(omega: &FeasibleSet, quality: impl Fn(BitString) -> f64) -> Vec<BitString> {
    let best = omega.iter().map(&quality).fold(f64::NEG_INFINITY, f64::max);
    omega.iter().filter(|&x| quality(x) == best).collect()
}

impl FeasibleSet {
    /// Enumerates all `2^n` strings and keeps those passing `validate`.
    pub fn from_predicate(n: usize, cap: usize, validate: impl Fn(BitString) -> bool) -> Result<Self> {
        cap_check(n, cap)?;
        let members = (0..1u64 << n).map(BitString).filter(|&x| validate(x)).collect();
        Ok(Self { n, members })
    }

    pub fn from_constraint(c: &LinearConstraint) -> Result<Self> {
        Self::from_predicate(c.n(), DEFAULT_ENUMERATION_CAP, |x| c.is_satisfied(x))
    }

    /// Builds a set from explicit members (sorted and deduplicated).
    pub fn from_members(n: usize, members: impl IntoIterator<Item = BitString>) -> Result<Self> {
        let mut members: Vec<BitString> = members.into_iter().collect();
        if let Some(x) = members.iter().find(|x| n < 64 && x.0 >> n != 0) {
            return Err(Error::IndexOutOfRange { index: x.0, n });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { n, members })
    }

    /// All `2^n` strings.
    pub fn full(n: usize) -> Result<Self> {
        Self::from_predicate(n, DEFAULT_ENUMERATION_CAP, |_| true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[BitString] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = BitString> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: BitString) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// True when every member has the same Hamming weight.
    pub fn constant_weight(&self) -> Option<u32> {
        let w = self.members.first()?.weight();
        self.members.iter().all(|x| x.weight() == w).then_some(w)
    }
}
