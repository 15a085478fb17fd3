//! Structure of mixer graphs over the feasible set, applicability rules and the
//! mixer comparison harness.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{MixerChoice, RunConfig};
use crate::error::{Error, Result};
use crate::mixers::MixerOperator;
use crate::problems::{ConstraintKind, FeasibleSet, LinearConstraint, ProblemInstance};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixerReport {
    pub nodes: usize,
    pub edges: usize,
    /// degree -> number of feasible nodes with that degree.
    pub degree_histogram: BTreeMap<usize, usize>,
    pub max_degree: usize,
    pub min_degree: usize,
    /// `max_degree - min_degree`.
    pub regularity: usize,
    pub components: usize,
    /// Largest first.
    pub component_sizes: Vec<usize>,
}

/// Degree and component structure of the mixer graph induced on `omega`.
pub fn mixer_report<T: Real>(mixer: &MixerOperator<T>, omega: &FeasibleSet) -> Result<MixerReport> {
    crate::qstate::check_dim(mixer.n(), omega.n())?;
    let members = omega.members();
    let position = |x| members.binary_search(&x).ok();
    let mut degree = vec![0usize; members.len()];
    let mut uf = UnionFind::<usize>::new(members.len());
    let mut edges = 0;
    for (x, y) in mixer.edges() {
        if let (Some(i), Some(j)) = (position(x), position(y)) {
            degree[i] += 1;
            degree[j] += 1;
            uf.union(i, j);
            edges += 1;
        }
    }

    let mut degree_histogram = BTreeMap::new();
    for &d in &degree {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    let mut sizes = BTreeMap::<usize, usize>::new();
    for i in 0..members.len() {
        *sizes.entry(uf.find(i)).or_insert(0) += 1;
    }
    let mut component_sizes: Vec<usize> = sizes.into_values().collect();
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let min_degree = degree.iter().copied().min().unwrap_or(0);
    Ok(MixerReport {
        nodes: members.len(),
        edges,
        degree_histogram,
        max_degree,
        min_degree,
        regularity: max_degree - min_degree,
        components: component_sizes.len(),
        component_sizes,
    })
}

/// Sufficient conditions under which the swap and flip mixers connect every feasible string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityConditions {
    /// Equality constraint whose feasible strings all have the same Hamming weight,
    /// so the distance-2 mixer moves between them by 0-1 swaps.
    pub constant_weight_equality: bool,
    /// Inequality constraint with nonnegative coefficients and every bound gap
    /// `upper - lower` at least twice the row's largest coefficient.
    pub wide_bounds_inequality: bool,
    /// The first violated condition, or a note that both were checked.
    pub witness: String,
}

pub fn check_connectivity_conditions(c: &LinearConstraint) -> ConnectivityConditions {
    let (constant_weight_equality, equality_witness) = match c.kind() {
        ConstraintKind::Inequality => (false, "not an equality constraint".to_string()),
        ConstraintKind::Equality => match FeasibleSet::from_constraint(c) {
            Err(e) => (false, format!("feasible set not enumerable: {e}")),
            Ok(omega) if omega.is_empty() => (false, "no feasible string".to_string()),
            Ok(omega) => match omega.constant_weight() {
                Some(_) => (true, String::new()),
                None => (false, "feasible strings differ in Hamming weight".to_string()),
            },
        },
    };
    let (wide_bounds_inequality, inequality_witness) = wide_bounds(c);
    let witness = match (constant_weight_equality, wide_bounds_inequality) {
        (true, _) => "equality constraint with constant feasible Hamming weight".to_string(),
        (_, true) => "inequality constraint with nonnegative coefficients and bound gaps of at least twice the largest coefficient".to_string(),
        _ if c.kind() == ConstraintKind::Equality => equality_witness,
        _ => inequality_witness,
    };
    ConnectivityConditions { constant_weight_equality, wide_bounds_inequality, witness }
}

fn wide_bounds(c: &LinearConstraint) -> (bool, String) {
    if c.kind() != ConstraintKind::Inequality {
        return (false, "not an inequality constraint".into());
    }
    for (k, col) in c.coeffs().iter().enumerate() {
        if let Some(mu) = col.iter().position(|&v| v < 0.0) {
            return (false, format!("coefficient of x_{k} in row {mu} is negative"));
        }
    }
    for mu in 0..c.kappa() {
        let largest = c.coeffs().iter().map(|col| col[mu]).fold(0.0, f64::max);
        let gap = c.upper()[mu] - c.lower()[mu];
        if gap < 2.0 * largest {
            return (false, format!("row {mu} has bound gap {gap} below twice its largest coefficient {largest}"));
        }
    }
    (true, String::new())
}

fn is_equality_family(problem: &ProblemInstance) -> bool {
    matches!(problem, ProblemInstance::GraphPartition { .. } | ProblemInstance::MultiProcessorScheduling { .. })
}

/// Rejects mixers that cannot keep a feasible start inside `omega` or that would
/// couple no feasible pair.
pub fn check_applicability(problem: &ProblemInstance, omega: &FeasibleSet, choice: MixerChoice) -> Result<()> {
    let fail = |msg: String| Err(Error::MixerNotApplicable(msg));
    match choice {
        MixerChoice::Distance2 => {
            if !is_equality_family(problem) {
                return fail(format!(
                    "distance-2 mixer needs an equality constraint; {} is inequality constrained",
                    problem.name()
                ));
            }
            if let Some(c) = problem.linear_constraint() {
                let cond = check_connectivity_conditions(&c);
                if !cond.constant_weight_equality {
                    return fail(format!("distance-2 mixer condition failed: {}", cond.witness));
                }
            } else if omega.constant_weight().is_none() {
                return fail("distance-2 mixer condition failed: feasible strings differ in Hamming weight".into());
            }
            Ok(())
        }
        MixerChoice::Distance1 => {
            if is_equality_family(problem) {
                return fail(format!(
                    "distance-1 mixer needs an inequality constraint; {} fixes the Hamming weight so no feasible pair is at distance 1",
                    problem.name()
                ));
            }
            Ok(())
        }
        MixerChoice::RingXy => {
            let n = omega.n() as u64;
            let full_sector = omega
                .constant_weight()
                .is_some_and(|w| omega.len() as u64 == binomial(n, w as u64));
            if full_sector {
                Ok(())
            } else {
                fail("mixer not weight-preserving for this Ω".into())
            }
        }
        MixerChoice::Star | MixerChoice::Transverse | MixerChoice::ProjectedCost => Ok(()),
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub mixer: MixerChoice,
    pub p: usize,
    pub regularity: Option<usize>,
    pub optimal_probability: Option<f64>,
    pub expectation: Option<f64>,
    pub infeasible_probability: Option<f64>,
    pub seed: u64,
    pub error: Option<String>,
}

/// One optimized run per `(mixer, p)`, in mixer-major order. Failures become row errors.
pub fn compare_mixers<T: Real>(
    problem: &ProblemInstance,
    mixers: &[MixerChoice],
    ps: &[usize],
    config: &RunConfig,
) -> Result<Vec<ComparisonRow>> {
    if mixers.is_empty() || ps.is_empty() {
        return Err(Error::InvalidConfig("comparison needs at least one mixer and one p".into()));
    }
    let jobs: Vec<(MixerChoice, usize)> = mixers.iter().flat_map(|&m| ps.iter().map(move |&p| (m, p))).collect();
    let inner = RunConfig { threads: None, ..config.clone() };
    let run_row = |&(mixer, p): &(MixerChoice, usize)| {
        let cfg = RunConfig { mixer, p, ..inner.clone() };
        let outcome = crate::engine::PreparedRun::<T>::new(problem, &cfg).and_then(|prepared| {
            let report = mixer_report(&prepared.mixer, &prepared.omega)?;
            let r = crate::engine::optimize_prepared(&prepared, &cfg)?;
            Ok((report, r))
        });
        let mut row = ComparisonRow {
            mixer,
            p,
            regularity: None,
            optimal_probability: None,
            expectation: None,
            infeasible_probability: None,
            seed: config.seed,
            error: None,
        };
        match outcome {
            Ok((report, r)) => {
                row.regularity = Some(report.regularity);
                row.optimal_probability = Some(r.optimal_probability.as_f64());
                row.expectation = Some(r.expectation.as_f64());
                row.infeasible_probability = Some(r.infeasible_probability.as_f64());
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    };
    Ok(match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| jobs.par_iter().map(run_row).collect()),
        None => jobs.par_iter().map(run_row).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::mixers::{build_distance_mixer, build_ring_xy_mixer, build_star_mixer};
    use crate::problems::catalog;

    fn gp4() -> ProblemInstance {
        ProblemInstance::graph_partition(4, vec![[0, 1], [1, 2], [2, 3], [0, 3], [0, 2]]).unwrap()
    }

    #[test]
    fn distance2_report_on_balanced_strings() {
        let omega = gp4().feasible_set().unwrap();
        let r = mixer_report(&build_distance_mixer::<f64>(&omega, 2).unwrap(), &omega).unwrap();
        assert_eq!((r.nodes, r.edges, r.regularity, r.components), (6, 12, 0, 1));
        assert_eq!(r.degree_histogram, BTreeMap::from([(4, 6)]));
    }

    #[test]
    fn ring_xy_report_on_balanced_strings() {
        let omega = gp4().feasible_set().unwrap();
        let r = mixer_report(&build_ring_xy_mixer::<f64>(4).unwrap(), &omega).unwrap();
        assert_eq!((r.max_degree, r.min_degree, r.regularity), (4, 2, 2));
        assert_eq!(r.components, 1);
    }

    #[test]
    fn star_report() {
        let omega = catalog::set_packing_six_subsets().feasible_set().unwrap();
        let r = mixer_report(&build_star_mixer::<f64>(&omega, BitString(0)).unwrap(), &omega).unwrap();
        let q = omega.len();
        assert_eq!((r.max_degree, r.min_degree, r.regularity, r.components), (q - 1, 1, q - 2, 1));
    }

    #[test]
    fn isolated_feasible_nodes_count_as_components() {
        let omega = FeasibleSet::from_members(3, [BitString(0), BitString(3), BitString(5)]).unwrap();
        let r = mixer_report(&build_distance_mixer::<f64>(&omega, 1).unwrap(), &omega).unwrap();
        assert_eq!((r.edges, r.components, r.min_degree), (0, 3, 0));
        assert_eq!(r.component_sizes, vec![1, 1, 1]);
    }

    #[test]
    fn conditions_for_catalog_constraints() {
        let gp = check_connectivity_conditions(&gp4().linear_constraint().unwrap());
        assert!(gp.constant_weight_equality && !gp.wide_bounds_inequality);

        let sp = catalog::set_packing_four_subsets();
        let c = check_connectivity_conditions(&sp.linear_constraint().unwrap());
        assert!(!c.constant_weight_equality && !c.wide_bounds_inequality);
        assert!(c.witness.contains("bound gap 1"), "{}", c.witness);
        // The conditions are only sufficient: this instance is connected anyway.
        let omega = sp.feasible_set().unwrap();
        let r = mixer_report(&build_distance_mixer::<f64>(&omega, 1).unwrap(), &omega).unwrap();
        assert_eq!(r.components, 1);

        let neg = LinearConstraint::inequality(vec![vec![1.0], vec![-1.0]], vec![0.0], vec![4.0]).unwrap();
        let c = check_connectivity_conditions(&neg);
        assert!(!c.wide_bounds_inequality);
        assert!(c.witness.contains("negative"));
    }

    #[test]
    fn applicability_rules() {
        let gp = gp4();
        let omega = gp.feasible_set().unwrap();
        assert!(check_applicability(&gp, &omega, MixerChoice::Distance2).is_ok());
        assert!(check_applicability(&gp, &omega, MixerChoice::RingXy).is_ok());
        assert!(check_applicability(&gp, &omega, MixerChoice::Distance1).is_err());

        let sp = catalog::set_packing_four_subsets();
        let omega = sp.feasible_set().unwrap();
        assert!(check_applicability(&sp, &omega, MixerChoice::Distance2).is_err());
        let e = check_applicability(&sp, &omega, MixerChoice::RingXy).unwrap_err();
        assert!(e.to_string().contains("mixer not weight-preserving for this Ω"));

        let mps = catalog::scheduling_five_tasks();
        let omega = mps.feasible_set().unwrap();
        assert!(check_applicability(&mps, &omega, MixerChoice::RingXy).is_err());
    }

    #[test]
    fn comparison_keeps_going_after_row_errors() {
        let sp = catalog::set_packing_four_subsets();
        let mut config = RunConfig::new(1, MixerChoice::Distance1);
        config.restarts = 2;
        let rows = compare_mixers::<f64>(&sp, &[MixerChoice::RingXy, MixerChoice::Distance1], &[1, 2], &config).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[..2].iter().all(|r| r.error.is_some() && r.regularity.is_none()));
        assert!(rows[2..].iter().all(|r| r.error.is_none() && r.optimal_probability.is_some()));
        assert_eq!(rows.iter().map(|r| r.p).collect::<Vec<_>>(), vec![1, 2, 1, 2]);
        assert!(compare_mixers::<f64>(&sp, &[], &[1], &config).is_err());
    }
}
